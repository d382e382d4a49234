//! Named subspaces, structural predicates, and enumeration of
//! block-closed candidates.
//!
//! The two structural notions here mirror the torus-plus-unipotent
//! analysis of stable subspaces: tails of the monomial basis inside the
//! SL2 spaces, and upper-right block supports inside sl_n.  Block
//! closure constrains only the off-diagonal support and the diagonal
//! parts forced through the corner blocks; Borel stability is a strictly
//! stronger condition (a pure diagonal line is block closed but never
//! stable), which is why the predicates stay separate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlin::{rat, Rational, Subspace};
use crate::repkit::{apply, unit_matrix, Coordinatization, Representation};
use crate::{Error, Result};

use num_traits::Zero;

/// Corner (i, j) of an upper-right block, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockCorner {
    pub i: usize,
    pub j: usize,
}

/// A down-closed union of upper-right blocks, stored by its maximal
/// corners (an antichain in the order i up, j down).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownSet {
    corners: Vec<BlockCorner>,
}

impl DownSet {
    /// Build from per-row column thresholds c_1 <= ... <= c_n, each in
    /// 1..=n+1; row r contributes the columns c_r..n, and n+1 means the
    /// row is empty.
    pub fn from_thresholds(n: usize, thresholds: &[usize]) -> Result<Self> {
        if thresholds.len() != n {
            return Err(Error::InvalidArgument("one threshold per row".into()));
        }
        let mut prev = 0usize;
        for &t in thresholds {
            if t < 1 || t > n + 1 || t < prev {
                return Err(Error::InvalidArgument(
                    "thresholds must be non-decreasing in 1..=n+1".into(),
                ));
            }
            prev = t;
        }
        let mut corners = Vec::new();
        for r in 1..=n {
            let t = thresholds[r - 1];
            if t <= n && (r == n || thresholds[r] > t) {
                corners.push(BlockCorner { i: r, j: t });
            }
        }
        Ok(DownSet { corners })
    }

    pub fn corners(&self) -> &[BlockCorner] {
        &self.corners
    }

    /// The sum of the corner blocks: the smallest block-closed subspace
    /// whose support is this region.
    pub fn subspace(&self, n: usize) -> Result<Subspace> {
        let mut u = Subspace::zero(n * n - 1);
        for c in &self.corners {
            u = u.sum(&block_B(n, c.i, c.j)?);
        }
        Ok(u)
    }
}

/// Tail span of the monomial basis: e_j, .., e_k inside the degree-k
/// space of dimension k+1.
pub fn upper_closed(k: usize, j: usize) -> Result<Subspace> {
    if j > k {
        return Err(Error::InvalidArgument(format!("tail start {j} out of range for degree {k}")));
    }
    let dim = k + 1;
    let rows: Vec<Vec<Rational>> = (j..=k)
        .map(|i| {
            let mut row = vec![Rational::zero(); dim];
            row[i] = rat(1);
            row
        })
        .collect();
    Subspace::from_rows(dim, rows)
}

/// B_{ij}: the span of all E_{k,l} with k <= i and l >= j, intersected
/// with the traceless matrices, in sl_n coordinates.
#[allow(non_snake_case)]
pub fn block_B(n: usize, i: usize, j: usize) -> Result<Subspace> {
    if i < 1 || j < 1 || i > n || j > n {
        return Err(Error::InvalidArgument(format!("block corner ({i},{j}) out of range for n={n}")));
    }
    let coord = Coordinatization::sln(n);
    let mut rows = Vec::new();
    for a in 1..=i {
        for b in j..=n {
            if a != b {
                rows.push(coord.vector_of(&unit_matrix(n, a, b))?);
            }
        }
    }
    // Diagonal positions j..i are touched when j <= i; their traceless
    // span is generated by consecutive differences.
    for a in j..i {
        let m = unit_matrix(n, a, a).sub(&unit_matrix(n, a + 1, a + 1))?;
        rows.push(coord.vector_of(&m)?);
    }
    Subspace::from_rows(coord.dim(), rows)
}

/// Named subspaces used by the structured strategies and examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedSpace {
    /// Upper triangular traceless matrices.
    BorelB,
    /// Elements of the Borel with zero (1,1) entry.
    BHat11,
    /// Elements of the Borel with zero (n,n) entry.
    BHatNN,
    /// Matrices with zero diagonal.
    ZeroDiag,
    /// span(E_11 - E_nn) + B_{n-1,2}: dimension (n-1)^2, diameter 3.
    Counterexample,
    /// Matrices with zero last row and column, inside sl_n.
    LastRowColZero,
    /// span(I, E_12) inside the full 2x2 matrix space.
    Gl2Example,
}

impl NamedSpace {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "borel_b" => NamedSpace::BorelB,
            "b_hat11" => NamedSpace::BHat11,
            "b_hatnn" => NamedSpace::BHatNN,
            "zero_diag" => NamedSpace::ZeroDiag,
            "counterexample" => NamedSpace::Counterexample,
            "last_rowcol_zero" => NamedSpace::LastRowColZero,
            "gl2_example" => NamedSpace::Gl2Example,
            _ => return Err(Error::Parse(format!("unknown named subspace '{s}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedSpace::BorelB => "borel_b",
            NamedSpace::BHat11 => "b_hat11",
            NamedSpace::BHatNN => "b_hatnn",
            NamedSpace::ZeroDiag => "zero_diag",
            NamedSpace::Counterexample => "counterexample",
            NamedSpace::LastRowColZero => "last_rowcol_zero",
            NamedSpace::Gl2Example => "gl2_example",
        }
    }
}

/// Construct a named subspace in the fixed coordinates (sl_n for all but
/// the GL2 example, which lives in the full 2x2 matrix space).
pub fn named(n: usize, which: NamedSpace) -> Result<Subspace> {
    if n < 2 {
        return Err(Error::InvalidArgument("named subspaces need n >= 2".into()));
    }
    let coord = Coordinatization::sln(n);
    let h = |i: usize| -> Result<Vec<Rational>> {
        coord.vector_of(&unit_matrix(n, i, i).sub(&unit_matrix(n, i + 1, i + 1))?)
    };
    let e = |i: usize, j: usize| -> Result<Vec<Rational>> { coord.vector_of(&unit_matrix(n, i, j)) };
    let mut rows = Vec::new();
    match which {
        NamedSpace::BorelB => {
            for i in 1..=n {
                for j in i + 1..=n {
                    rows.push(e(i, j)?);
                }
            }
            for i in 1..n {
                rows.push(h(i)?);
            }
        }
        NamedSpace::BHat11 | NamedSpace::BHatNN => {
            for i in 1..=n {
                for j in i + 1..=n {
                    rows.push(e(i, j)?);
                }
            }
            // Traceless diagonals with a zero first (resp. last) entry.
            let range = if which == NamedSpace::BHat11 { 2..n } else { 1..n - 1 };
            for i in range {
                rows.push(h(i)?);
            }
        }
        NamedSpace::ZeroDiag => {
            for i in 1..=n {
                for j in 1..=n {
                    if i != j {
                        rows.push(e(i, j)?);
                    }
                }
            }
        }
        NamedSpace::Counterexample => {
            if n < 3 {
                return Err(Error::InvalidArgument("the dimension count needs n >= 3".into()));
            }
            let m = unit_matrix(n, 1, 1).sub(&unit_matrix(n, n, n))?;
            rows.push(coord.vector_of(&m)?);
            let u = Subspace::from_rows(coord.dim(), rows)?;
            return Ok(u.sum(&block_B(n, n - 1, 2)?));
        }
        NamedSpace::LastRowColZero => {
            for i in 1..n {
                for j in 1..n {
                    if i != j {
                        rows.push(e(i, j)?);
                    }
                }
            }
            for i in 1..n - 1 {
                rows.push(h(i)?);
            }
        }
        NamedSpace::Gl2Example => {
            if n != 2 {
                return Err(Error::InvalidArgument("the GL2 example lives in 2x2 matrices".into()));
            }
            let mn = Coordinatization::mn(2);
            let rows = vec![
                mn.vector_of(&crate::exactlin::RationalMatrix::identity(2))?,
                mn.vector_of(&unit_matrix(2, 1, 2))?,
            ];
            return Subspace::from_rows(4, rows);
        }
    }
    Subspace::from_rows(coord.dim(), rows)
}

/// True iff whenever some u in U has a nonzero off-diagonal entry at
/// (i,j), the whole block B_{ij} lies in U.  An entry functional is
/// linear, so checking a basis of U is equivalent to checking all of U.
pub fn is_upper_right_block_closed(n: usize, u: &Subspace) -> Result<bool> {
    if u.ambient_dim() != n * n - 1 {
        return Err(Error::DimensionMismatch("expected sl_n coordinates".into()));
    }
    let coord = Coordinatization::sln(n);
    for row in u.basis_rows() {
        let m = coord.matrix_of(&row)?;
        for i in 1..=n {
            for j in 1..=n {
                if i != j && !m.at(i - 1, j - 1).is_zero() && !u.contains_subspace(&block_B(n, i, j)?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// True iff the Borel subalgebra maps U into itself.  The stabilizer of
/// a subspace is a Lie subalgebra, so it suffices to test the raising
/// and diagonal generators; for the connected groups used here this is
/// equivalent to stability under the Borel subgroup.
pub fn is_borel_stable(rep: &Representation, u: &Subspace) -> Result<bool> {
    if u.ambient_dim() != rep.dim_v() {
        return Err(Error::DimensionMismatch("subspace does not live in the representation".into()));
    }
    for x in rep.borel_generators() {
        let image = apply(&rep.lie_evaluate(&x)?, u);
        if !u.contains_subspace(&image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How to pick diagonal parts when enumerating block-closed subspaces.
#[derive(Clone, Copy, Debug)]
pub enum DiagMode {
    /// Only the diagonal parts forced through the corner blocks.
    ForcedOnly,
    /// Forced parts plus randomly sampled diagonal complements.
    Sampled { seed: u64, trials: usize },
}

/// All subspaces (sum of blocks over a down-set) + (diagonal part) of
/// exactly `target_dim`, with the diagonal chosen per `mode`.  Every
/// result is block closed; duplicates are removed.
pub fn enumerate_block_closed(n: usize, target_dim: usize, mode: DiagMode) -> Result<Vec<Subspace>> {
    if n > 7 {
        return Err(Error::InvalidArgument("enumeration is limited to n <= 7".into()));
    }
    if n < 2 || target_dim > n * n - 1 {
        return Err(Error::InvalidArgument(format!(
            "no subspaces of dimension {target_dim} in sl_{n}"
        )));
    }
    let coord = Coordinatization::sln(n);
    let mut out: Vec<Subspace> = Vec::new();
    let push = |u: Subspace, out: &mut Vec<Subspace>| {
        if u.dim() == target_dim && !out.contains(&u) {
            out.push(u);
        }
    };
    let mut thresholds = vec![1usize; n];
    loop {
        let ds = DownSet::from_thresholds(n, &thresholds)?;
        let forced = ds.subspace(n)?;
        match mode {
            DiagMode::ForcedOnly => push(forced, &mut out),
            DiagMode::Sampled { seed, trials } => {
                if forced.dim() == target_dim {
                    push(forced, &mut out);
                } else if forced.dim() < target_dim {
                    let needed = target_dim - forced.dim();
                    if needed <= n - 1 {
                        // Mix the seed with the staircase so distinct
                        // regions draw distinct diagonals.
                        let mix = thresholds.iter().fold(seed, |a, &t| {
                            a.wrapping_mul(1_000_003).wrapping_add(t as u64)
                        });
                        let mut rng = ChaCha8Rng::seed_from_u64(mix);
                        for _ in 0..trials {
                            let mut candidate = forced.clone();
                            for _ in 0..needed {
                                let mut v = vec![Rational::zero(); coord.dim()];
                                for c in v.iter_mut().skip(n * n - n) {
                                    *c = rat(rng.gen_range(-3..=3));
                                }
                                candidate = candidate.sum(&Subspace::from_rows(coord.dim(), vec![v])?);
                            }
                            push(candidate, &mut out);
                        }
                    }
                }
            }
        }
        // Next non-decreasing threshold vector over 1..=n+1.
        let mut r = n;
        loop {
            if r == 0 {
                return Ok(out);
            }
            if thresholds[r - 1] < n + 1 {
                thresholds[r - 1] += 1;
                for t in r..n {
                    thresholds[t] = thresholds[r - 1];
                }
                break;
            }
            r -= 1;
        }
    }
}

/// Random subspace of the given dimension with small integer entries.
pub fn random_subspace(ambient: usize, dim: usize, seed: u64) -> Result<Subspace> {
    if dim > ambient {
        return Err(Error::InvalidArgument("dimension exceeds the ambient space".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows: Vec<Vec<Rational>> = (0..dim)
            .map(|_| (0..ambient).map(|_| rat(rng.gen_range(-5..=5))).collect())
            .collect();
        let u = Subspace::from_rows(ambient, rows)?;
        if u.dim() == dim {
            return Ok(u);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::RationalMatrix;

    #[test]
    fn upper_closed_dimensions() {
        assert_eq!(upper_closed(8, 0).unwrap(), Subspace::full(9));
        assert_eq!(upper_closed(8, 3).unwrap().dim(), 6);
        assert_eq!(upper_closed(8, 8).unwrap().dim(), 1);
        assert!(upper_closed(4, 5).is_err());
    }

    // Position count minus one trace constraint when the block touches
    // the diagonal.
    fn block_dim_oracle(n: usize, i: usize, j: usize) -> usize {
        let positions = i * (n - j + 1);
        let touched = if i >= j { i - j + 1 } else { 0 };
        positions - usize::from(touched >= 1)
    }

    #[test]
    fn block_dimensions_match_the_count_oracle() {
        assert_eq!(block_B(4, 1, 4).unwrap().dim(), 1);
        assert_eq!(block_B(4, 3, 2).unwrap().dim(), 8);
        for n in 2..=5 {
            for i in 1..=n {
                for j in 1..=n {
                    assert_eq!(block_B(n, i, j).unwrap().dim(), block_dim_oracle(n, i, j), "B_{i}{j} in sl_{n}");
                }
            }
        }
        assert!(block_B(3, 0, 1).is_err());
        assert_eq!(block_B(3, 3, 1).unwrap(), Subspace::full(8));
    }

    #[test]
    fn blocks_are_the_borel_closures_of_unit_matrices() {
        for n in 2..=6 {
            let rep = Representation::conj_sln(n).unwrap();
            let coord = Coordinatization::sln(n);
            let gens: Vec<RationalMatrix> =
                rep.borel_generators().iter().map(|x| rep.lie_evaluate(x).unwrap()).collect();
            for i in 1..=n {
                for j in 1..=n {
                    if i == j {
                        continue;
                    }
                    let mut u = Subspace::from_rows(
                        coord.dim(),
                        vec![coord.vector_of(&unit_matrix(n, i, j)).unwrap()],
                    )
                    .unwrap();
                    loop {
                        let mut next = u.clone();
                        for g in &gens {
                            next = next.sum(&apply(g, &u));
                        }
                        if next == u {
                            break;
                        }
                        u = next;
                    }
                    assert_eq!(u, block_B(n, i, j).unwrap(), "closure of E_{i}{j} in sl_{n}");
                }
            }
        }
    }

    #[test]
    fn named_dimensions() {
        for n in 3..=5 {
            assert_eq!(named(n, NamedSpace::Counterexample).unwrap().dim(), (n - 1) * (n - 1));
            assert_eq!(named(n, NamedSpace::LastRowColZero).unwrap().dim(), (n - 1) * (n - 1) - 1);
            assert_eq!(named(n, NamedSpace::ZeroDiag).unwrap().dim(), n * n - n);
            assert_eq!(named(n, NamedSpace::BorelB).unwrap().dim(), n * (n - 1) / 2 + n - 1);
            assert_eq!(named(n, NamedSpace::BHat11).unwrap().dim(), n * (n - 1) / 2 + n - 2);
            assert_eq!(named(n, NamedSpace::BHatNN).unwrap().dim(), n * (n - 1) / 2 + n - 2);
        }
        assert_eq!(named(2, NamedSpace::Gl2Example).unwrap().dim(), 2);
        assert!(named(3, NamedSpace::Gl2Example).is_err());
        assert!(named(2, NamedSpace::Counterexample).is_err());
    }

    #[test]
    fn block_closure_predicate_examples() {
        let n = 3;
        assert!(is_upper_right_block_closed(n, &named(n, NamedSpace::BorelB).unwrap()).unwrap());
        assert!(is_upper_right_block_closed(n, &Subspace::zero(8)).unwrap());
        let coord = Coordinatization::sln(n);
        let mixed = unit_matrix(n, 2, 1).add(&unit_matrix(n, 1, 2)).unwrap();
        let u = Subspace::from_rows(8, vec![coord.vector_of(&mixed).unwrap()]).unwrap();
        assert!(!is_upper_right_block_closed(n, &u).unwrap());
        // A pure diagonal line is block closed but not Borel stable.
        let d = Subspace::from_rows(
            8,
            vec![coord.vector_of(&unit_matrix(3, 1, 1).sub(&unit_matrix(3, 2, 2)).unwrap()).unwrap()],
        )
        .unwrap();
        assert!(is_upper_right_block_closed(n, &d).unwrap());
        let rep = Representation::conj_sln(n).unwrap();
        assert!(!is_borel_stable(&rep, &d).unwrap());
    }

    #[test]
    fn borel_stability_examples() {
        let rep = Representation::conj_sln(4).unwrap();
        assert!(is_borel_stable(&rep, &named(4, NamedSpace::BorelB).unwrap()).unwrap());
        assert!(is_borel_stable(&rep, &named(4, NamedSpace::Counterexample).unwrap()).unwrap());
        let rep3 = Representation::conj_sln(3).unwrap();
        for seed in 0..5 {
            let u = random_subspace(8, 2, seed).unwrap();
            assert!(!is_borel_stable(&rep3, &u).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn sl2_stability_is_exactly_the_upper_tails() {
        for k in 0..=10usize {
            let rep = Representation::sl2_irrep(k);
            let dim = k + 1;
            for mask in 0u32..(1 << dim) {
                let rows: Vec<Vec<Rational>> = (0..dim)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| {
                        let mut row = vec![Rational::zero(); dim];
                        row[i] = rat(1);
                        row
                    })
                    .collect();
                let u = Subspace::from_rows(dim, rows).unwrap();
                let stable = is_borel_stable(&rep, &u).unwrap();
                // Upper tails are the masks of the form {j..k} (including
                // the empty set and the full set): after dropping trailing
                // zeros, all remaining bits up to e_k are set.
                let tz = mask.trailing_zeros() as usize;
                let is_tail = mask == 0 || (mask >> tz) == (1u32 << (dim - tz)) - 1;
                assert_eq!(stable, is_tail, "k={k} mask={mask:b}");
            }
        }
    }

    #[test]
    fn stability_implies_block_closure() {
        for n in 2..=5usize {
            let rep = Representation::conj_sln(n).unwrap();
            let target = (n - 1) * (n - 1) + 1;
            let mut all = enumerate_block_closed(n, target, DiagMode::ForcedOnly).unwrap();
            all.extend(enumerate_block_closed(n, target, DiagMode::Sampled { seed: 5, trials: 3 }).unwrap());
            for u in &all {
                assert!(is_upper_right_block_closed(n, u).unwrap());
                if is_borel_stable(&rep, u).unwrap() {
                    assert!(is_upper_right_block_closed(n, u).unwrap());
                }
            }
            let ambient = n * n - 1;
            for seed in 0..50u64 {
                let u = random_subspace(ambient, 1 + (seed as usize % ambient.min(5)), 100 + seed).unwrap();
                if !is_upper_right_block_closed(n, &u).unwrap() {
                    assert!(!is_borel_stable(&rep, &u).unwrap(), "n={n} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn critical_enumeration_at_n4_matches_the_classification() {
        let n = 4;
        let target = (n - 1) * (n - 1) + 1;
        let results = enumerate_block_closed(n, target, DiagMode::ForcedOnly).unwrap();
        assert!(!results.is_empty());
        let bhat11 = named(n, NamedSpace::BHat11).unwrap();
        let bhatnn = named(n, NamedSpace::BHatNN).unwrap();
        let third = block_B(n, 2, 1).unwrap().sum(&block_B(n, n, 3).unwrap());
        let fourth = block_B(n, n, n - 1).unwrap().sum(&block_B(n, n - 2, 1).unwrap());
        let mut seen = [false; 3];
        for u in &results {
            let c1 = u.contains_subspace(&bhat11);
            let c2 = u.contains_subspace(&bhatnn);
            let c3 = *u == third || *u == fourth;
            assert!(c1 || c2 || c3, "every critical enumerant matches a classified shape");
            seen[0] |= c1;
            seen[1] |= c2;
            seen[2] |= c3;
        }
        assert!(seen.iter().all(|&b| b), "each classified shape is realized");
    }

    #[test]
    fn enumeration_edges() {
        let n = 3;
        let full = enumerate_block_closed(n, n * n - 1, DiagMode::ForcedOnly).unwrap();
        assert_eq!(full, vec![Subspace::full(8)]);

        let ones = enumerate_block_closed(n, 1, DiagMode::ForcedOnly).unwrap();
        let coord = Coordinatization::sln(n);
        let e13 = Subspace::from_rows(8, vec![coord.vector_of(&unit_matrix(3, 1, 3)).unwrap()]).unwrap();
        assert_eq!(ones, vec![e13.clone()]);

        let sampled = enumerate_block_closed(n, 1, DiagMode::Sampled { seed: 9, trials: 8 }).unwrap();
        assert!(sampled.len() > 1, "sampling adds pure diagonal lines");
        assert!(sampled.contains(&e13));
        for u in &sampled {
            assert_eq!(u.dim(), 1);
            if *u != e13 {
                let m = coord.matrix_of(&u.basis_rows()[0]).unwrap();
                let diagonal = (0..3).all(|i| (0..3).all(|j| i == j || m.at(i, j).is_zero()));
                assert!(diagonal, "sampled extras are diagonal lines");
            }
        }
        assert!(enumerate_block_closed(8, 3, DiagMode::ForcedOnly).is_err());
        assert!(enumerate_block_closed(3, 9, DiagMode::ForcedOnly).is_err());
    }
}
