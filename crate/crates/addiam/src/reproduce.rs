//! The reproduction suite behind `addiam reproduce`: one row per anchored
//! statement, each row a deterministic job whose computed summary must match
//! a frozen expected string.
//!
//! Rows are pure functions of the catalog (all randomness is seeded), so the
//! report is stable across runs and machines; they fan out across threads but
//! the output order is fixed by the row index.  A job that detects a mismatch
//! returns a diagnostic string instead of the expected one, which renders as
//! a FAIL row rather than an error.

use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eqmorph::{
    comm_plus_identity, from_map_descriptor, numeric_decompose, square_map, subrep_obstruction,
    twisted_cubic, verify_waring, waring_bound, SubrepVerdict, WaringOutcome,
};
use crate::exactlin::{rat, Rational, RationalMatrix};
use crate::groupdiam::{
    certify_upper, confluent_vandermonde, diameter, lower_ceiling, random_invertible,
    sl2_shift_witnesses, translate_sum, verify, weyl_pair_search, Certificate, DiamValue,
    DiameterResult, ExplicitStrategy, Strategy, Variant, WeylOutcome,
};
use crate::liediam::{
    cap_core, diameter_lie, lie_translate_sum, sl3_distinct_diameters_example,
    square_zero_translate_identity, LieWitness, OperatorAlgebra,
};
use crate::repkit::{elementary_product, flip_matrix, unit_matrix, GroupElement, Representation};
use crate::spaces::{
    block_B, enumerate_block_closed, named, random_subspace, upper_closed, DiagMode, NamedSpace,
};
use crate::tiling::{basic_block_subspace, TilingPlan};
use crate::{Error, Result};

/// One finished row of the report.
pub struct ReproRow {
    pub index: usize,
    pub anchor: &'static str,
    pub expected: &'static str,
    pub computed: String,
    pub pass: bool,
    pub runtime_ms: u128,
}

pub struct ReproReport {
    pub rows: Vec<ReproRow>,
}

impl ReproReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

struct RowSpec {
    anchor: &'static str,
    expected: &'static str,
    job: fn() -> Result<String>,
}

/// Run the rows whose anchor starts with the selector (all rows when absent).
pub fn run_suite(selector: Option<&str>) -> Result<ReproReport> {
    let specs = catalog();
    let selected: Vec<(usize, RowSpec)> = specs
        .into_iter()
        .enumerate()
        .filter(|(_, s)| selector.is_none_or(|sel| s.anchor.starts_with(sel)))
        .collect();
    if selected.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no anchors match selector '{}'",
            selector.unwrap_or("")
        )));
    }
    let rows = selected
        .into_par_iter()
        .map(|(index, spec)| {
            let start = Instant::now();
            let computed = match (spec.job)() {
                Ok(s) => s,
                Err(e) => format!("error: {e}"),
            };
            let pass = computed == spec.expected;
            ReproRow {
                index,
                anchor: spec.anchor,
                expected: spec.expected,
                computed,
                pass,
                runtime_ms: start.elapsed().as_millis(),
            }
        })
        .collect();
    Ok(ReproReport { rows })
}

fn catalog() -> Vec<RowSpec> {
    vec![
        RowSpec {
            anchor: "thm:optimal_sl2:windows",
            expected: "65 windows exact at the ceiling",
            job: sl2_windows,
        },
        RowSpec {
            anchor: "thm:optimal_sl2:random",
            expected: "3250 random subspaces certified",
            job: sl2_random_upper,
        },
        RowSpec {
            anchor: "lem:poly_basis",
            expected: "55 leading blocks invertible",
            job: vandermonde_grids,
        },
        RowSpec {
            anchor: "thm:large_dim_two:enumerated",
            expected: "62 spaces flip-covered; the B21 + B43 exception is exact 3",
            job: large_enumerated,
        },
        RowSpec {
            anchor: "thm:large_dim_two:random",
            expected: "750 subspaces exact at 2",
            job: large_random,
        },
        RowSpec {
            anchor: "prop:counterexample",
            expected: COUNTEREXAMPLE_OK,
            job: counterexample_row,
        },
        RowSpec { anchor: "appendix:gl2", expected: GL2_OK, job: gl2_row },
        RowSpec {
            anchor: "appendix:zero_diag",
            expected: "exact 2; 15 diagonal identities hold",
            job: zero_diag_row,
        },
        RowSpec { anchor: "appendix:last_rowcol", expected: LAST_ROWCOL_OK, job: last_rowcol_row },
        RowSpec { anchor: "sec5:tiling", expected: TILING_OK, job: tiling_row },
        RowSpec { anchor: "sec5:basic_block", expected: BASIC_BLOCK_OK, job: basic_block_row },
        RowSpec {
            anchor: "sec6:monomial_windows",
            expected: "44 windows exact at the ceiling",
            job: monomial_windows,
        },
        RowSpec {
            anchor: "sec6:elementary_infinite",
            expected: "28 windows certified infinite",
            job: elementary_infinite,
        },
        RowSpec { anchor: "sec6:sl3_quadruple", expected: SL3_OK, job: sl3_row },
        RowSpec { anchor: "sec6:burnside", expected: "11 algebras close to full", job: burnside_row },
        RowSpec {
            anchor: "sec6:square_zero",
            expected: "400 sampled identities hold",
            job: square_zero_row,
        },
        RowSpec { anchor: "sec7:twisted_cubic", expected: CUBIC_OK, job: cubic_row },
        RowSpec { anchor: "sec7:square_map", expected: "bound 2 at n = 2, 3", job: square_row },
        RowSpec { anchor: "sec7:comm_trap", expected: COMM_OK, job: comm_row },
        RowSpec {
            anchor: "sec7:containment",
            expected: "100 containments hold",
            job: containment_row,
        },
        RowSpec {
            anchor: "sec7:equivariance",
            expected: "250 identities exact",
            job: equivariance_row,
        },
        RowSpec { anchor: "sec7:decompose", expected: DECOMPOSE_OK, job: decompose_row },
        RowSpec { anchor: "meta:soundness", expected: SOUNDNESS_OK, job: soundness_row },
    ]
}

const COUNTEREXAMPLE_OK: &str = "no pair covers; triple exact 3 (n = 4, 5)";
const GL2_OK: &str = "exact 3 with I, F, I + E21";
const LAST_ROWCOL_OK: &str = "n = 3 exact 3; n = 4 bounded by 3, annihilator blocks 100 pairs";
const TILING_OK: &str = "8 plans within budget; n = 12, k = 5 rejected";
const BASIC_BLOCK_OK: &str = "n = 5 covered at 4, n = 6 at 3";
const SL3_OK: &str = "3, 3, 2, 2 with quoted witnesses; growth capped at 7";
const CUBIC_OK: &str = "bound 4 from tangent diameter 2";
const COMM_OK: &str = "trapped in the traceless coset";
const DECOMPOSE_OK: &str = "3 points, residual below 1e-9";
const SOUNDNESS_OK: &str = "9 certificates replay; 20 mutations rejected";

fn exact_finite(res: &DiameterResult, want: usize) -> bool {
    res.exact_value() == Some(DiamValue::Finite(want))
}

fn verify_all(res: &DiameterResult) -> Result<()> {
    for c in res.certificates() {
        verify(c)?;
    }
    Ok(())
}

/// Every tail window of every small irreducible hits the dimension ceiling,
/// first by the explicit shift witnesses, then through the full search.
fn sl2_windows() -> Result<String> {
    let mut count = 0usize;
    for k in 1..=10usize {
        let rep = Representation::sl2_irrep(k);
        for j in 0..=k {
            let u = upper_closed(k, j)?;
            let d = k + 1 - j;
            let want = (k + 1).div_ceil(d);
            let ws = sl2_shift_witnesses(k, d)?;
            if ws.len() != want {
                return Ok(format!("{} shifts at k={k} j={j}, want {want}", ws.len()));
            }
            if !translate_sum(&rep, &u, &ws)?.is_full() {
                return Ok(format!("shift witnesses fail at k={k} j={j}"));
            }
            let res = diameter(&rep, &u, want + 2, 11)?;
            if !exact_finite(&res, want) {
                return Ok(format!("not exact {want} at k={k} j={j}"));
            }
            verify_all(&res)?;
            count += 1;
        }
    }
    Ok(format!("{count} windows exact at the ceiling"))
}

/// Random subspaces of every dimension also certify at the ceiling; an
/// upper witness is enough since the optimal value is the point.
fn sl2_random_upper() -> Result<String> {
    let mut count = 0usize;
    for k in 1..=10usize {
        let rep = Representation::sl2_irrep(k);
        for d in 1..=k + 1 {
            let want = (k + 1).div_ceil(d);
            for s in 0..50u64 {
                let u = random_subspace(k + 1, d, 1000 * k as u64 + 20 * d as u64 + s)?;
                let strategy = Strategy::Random { seed: 7 + s, trials: 40, entry_range: 10 };
                match certify_upper(&rep, &u, want, &strategy)? {
                    Some(c) => verify(&c)?,
                    None => return Ok(format!("no witness at k={k} d={d} s={s}")),
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} random subspaces certified"))
}

/// The leading (k+1)-column block of the interpolation matrix on integer
/// nodes is invertible for every derivative multiplicity below k+1.
fn vandermonde_grids() -> Result<String> {
    let mut count = 0usize;
    for k in 1..=10usize {
        for d in 1..=k {
            let nodes: Vec<Rational> = (0..(k + 1).div_ceil(d) as i64).map(rat).collect();
            let v = confluent_vandermonde(k, d, &nodes);
            let mut sq = RationalMatrix::zeros(k + 1, k + 1);
            for r in 0..=k {
                for c in 0..=k {
                    *sq.at_mut(r, c) = v.at(r, c).clone();
                }
            }
            if sq.rank() != k + 1 {
                return Ok(format!("singular block at k={k} d={d}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} leading blocks invertible"))
}

fn open_dims(n: usize) -> std::ops::RangeInclusive<usize> {
    (n - 1) * (n - 1) + 1..=n * n - 2
}

/// Enumerated block-closed spaces strictly between the critical dimensions
/// are covered by themselves plus their flip conjugate, with one genuine
/// exception: at n = 4 the space B21 + B43 is flip-invariant on the diagonal
/// (both diagonal spans miss E22 - E33, and the flip swaps them), so the
/// covering argument needs n >= 5.  The exception really has diameter 3: it
/// is Borel-stable, the exhaustive permutation scan is therefore a sound
/// lower bound, and a triple of witnesses closes the gap from above.
fn large_enumerated() -> Result<String> {
    let mut covered = 0usize;
    let mut exceptions = Vec::new();
    for n in 3..=5usize {
        let rep = Representation::conj_sln(n)?;
        let gs = [GroupElement::identity(n), flip_matrix(n)];
        for dim in open_dims(n) {
            for u in enumerate_block_closed(n, dim, DiagMode::Sampled { seed: 17, trials: 8 })? {
                if translate_sum(&rep, &u, &gs)?.is_full() {
                    covered += 1;
                } else {
                    exceptions.push((n, u));
                }
            }
        }
    }
    let [(n, u)] = exceptions.as_slice() else {
        return Ok(format!("{} exceptions", exceptions.len()));
    };
    if *n != 4 || *u != block_B(4, 2, 1)?.sum(&block_B(4, 4, 3)?) {
        return Ok("exception has an unexpected shape".into());
    }
    match weyl_pair_search(4, u)? {
        WeylOutcome::NoPermutationPair => {}
        WeylOutcome::Witness(_) => return Ok("a pair covers the exception".into()),
    }
    let res = diameter(&Representation::conj_sln(4)?, u, 4, 9)?;
    if !exact_finite(&res, 3) {
        return Ok("exception diameter differs from 3".into());
    }
    verify_all(&res)?;
    Ok(format!("{covered} spaces flip-covered; the B21 + B43 exception is exact 3"))
}

/// Random subspaces in the same open dimension range always land on the
/// exact diameter 2.
fn large_random() -> Result<String> {
    let mut count = 0usize;
    for n in 3..=5usize {
        let rep = Representation::conj_sln(n)?;
        for dim in open_dims(n) {
            for s in 0..50u64 {
                let u = random_subspace(n * n - 1, dim, 900 * n as u64 + 37 * dim as u64 + s)?;
                let res = diameter(&rep, &u, 4, 5 + s)?;
                if !exact_finite(&res, 2) {
                    return Ok(format!("not exact 2 at n={n} dim={dim} s={s}"));
                }
                verify_all(&res)?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} subspaces exact at 2"))
}

/// At the critical dimension the permutation scan is exhaustive and empty,
/// and the explicit triple closes the gap from above: exact 3.
fn counterexample_row() -> Result<String> {
    for n in [4usize, 5] {
        let rep = Representation::conj_sln(n)?;
        let u = named(n, NamedSpace::Counterexample)?;
        match weyl_pair_search(n, &u)? {
            WeylOutcome::NoPermutationPair => {}
            WeylOutcome::Witness(_) => return Ok(format!("a pair covers at n={n}")),
        }
        let triple = ExplicitStrategy::FlipLongCycle
            .witnesses(&rep, &u)?
            .expect("triple applies to conjugation spaces");
        if !translate_sum(&rep, &u, &triple)?.is_full() {
            return Ok(format!("triple fails at n={n}"));
        }
        let res = diameter(&rep, &u, 4, 3)?;
        if !exact_finite(&res, 3) {
            return Ok(format!("not exact 3 at n={n}"));
        }
        verify_all(&res)?;
    }
    Ok(COUNTEREXAMPLE_OK.into())
}

/// The 2x2 full-matrix example: every conjugate of U contains I, forcing 3,
/// and the quoted triple realizes it.
fn gl2_row() -> Result<String> {
    let rep = Representation::conj_mn(2)?;
    let u = named(2, NamedSpace::Gl2Example)?;
    let res = diameter(&rep, &u, 4, 2)?;
    let cert = match &res {
        DiameterResult::Exact(c) => c,
        DiameterResult::Bounds { .. } => return Ok("no exact value".into()),
    };
    if cert.value != DiamValue::Finite(3) {
        return Ok(format!("exact value {:?}", cert.value));
    }
    verify(cert)?;
    let want = vec![
        RationalMatrix::identity(2),
        flip_matrix(2).matrix().clone(),
        RationalMatrix::identity(2).add(&unit_matrix(2, 2, 1))?,
    ];
    if cert.witnesses != want {
        return Ok("witnesses differ from the quoted triple".into());
    }
    Ok(GL2_OK.into())
}

/// Zero diagonal covers in two via the unipotent product g; the diagonal of
/// g^{-1} v_l g is the quoted multiple of a simple root, checked entrywise.
fn zero_diag_row() -> Result<String> {
    let mut identities = 0usize;
    for n in 2..=6usize {
        let rep = Representation::conj_sln(n)?;
        let u = named(n, NamedSpace::ZeroDiag)?;
        let res = diameter(&rep, &u, 3, 2)?;
        let cert = match &res {
            DiameterResult::Exact(c) => c,
            DiameterResult::Bounds { .. } => return Ok(format!("inexact at n={n}")),
        };
        if cert.value != DiamValue::Finite(2) {
            return Ok(format!("exact value {:?} at n={n}", cert.value));
        }
        verify(cert)?;
        let g = elementary_product(n);
        if cert.witnesses != vec![RationalMatrix::identity(n), g.matrix().clone()] {
            return Ok(format!("witnesses differ at n={n}"));
        }
        for l in 2..=n {
            let mut v = RationalMatrix::zeros(n, n);
            for j in 1..l {
                *v.at_mut(l - 1, j - 1) = rat(1);
            }
            let m = g.inverse_matrix().mul(&v)?.mul(g.matrix())?;
            for i in 1..=n {
                let want = if i + 1 == l {
                    rat(1 - l as i64)
                } else if i == l {
                    rat(l as i64 - 1)
                } else {
                    rat(0)
                };
                if *m.at(i - 1, i - 1) != want {
                    return Ok(format!("diagonal identity fails at n={n} l={l}"));
                }
            }
            identities += 1;
        }
    }
    Ok(format!("exact 2; {identities} diagonal identities hold"))
}

/// Zero last row and column.  At n = 3 the ceiling already forces 3.  At
/// n = 4 the ceiling drops to 2 and the true lower bound rests on the
/// annihilator e_n^T g^{-1} (U + gUg^{-1}) e_n = 0, which holds for every g
/// but has no encoding among the certificate obstructions; the emitted value
/// stays a [2, 3] bracket while this row replays the functional exactly on
/// sampled elements.
fn last_rowcol_row() -> Result<String> {
    let rep3 = Representation::conj_sln(3)?;
    let u3 = named(3, NamedSpace::LastRowColZero)?;
    let res3 = diameter(&rep3, &u3, 4, 2)?;
    if !exact_finite(&res3, 3) {
        return Ok("n = 3 is not exact 3".into());
    }
    verify_all(&res3)?;

    let rep4 = Representation::conj_sln(4)?;
    let u4 = named(4, NamedSpace::LastRowColZero)?;
    let res4 = diameter(&rep4, &u4, 3, 2)?;
    let upper = match &res4 {
        DiameterResult::Bounds { lower, upper: Some(c) } => {
            if lower.value != DiamValue::Finite(2) {
                return Ok(format!("n = 4 lower {:?}", lower.value));
            }
            c
        }
        DiameterResult::Bounds { upper: None, .. } => return Ok("n = 4 has no upper witness".into()),
        DiameterResult::Exact(_) => return Ok("n = 4 unexpectedly certified exact".into()),
    };
    verify(upper)?;
    if upper.value != DiamValue::Finite(3) {
        return Ok(format!("n = 4 upper {:?}", upper.value));
    }
    let triple = ExplicitStrategy::LastRowCol
        .witnesses(&rep4, &u4)?
        .expect("applies for n >= 3");
    if !translate_sum(&rep4, &u4, &triple)?.is_full() {
        return Ok("the transposition triple does not cover at n = 4".into());
    }
    let coord = rep4.coordinatization().expect("conjugation coordinates");
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..100 {
        let g = random_invertible(&mut rng, 4, 5);
        let w = translate_sum(&rep4, &u4, &[GroupElement::identity(4), g.clone()])?;
        if w.is_full() {
            return Ok("a sampled pair covers at n = 4".into());
        }
        for row in w.basis_rows() {
            let m = coord.matrix_of(&row)?;
            if !g.inverse_matrix().mul(&m)?.at(3, 3).is_zero() {
                return Ok("annihilator misses a sampled pair".into());
            }
        }
    }
    Ok(LAST_ROWCOL_OK.into())
}

/// Each constructible parameter choice builds its full chain (the chain is
/// validated step by step during construction) and stays within the witness
/// budget; the degenerate choice is refused.
fn tiling_row() -> Result<String> {
    let mut ok = 0usize;
    for (n, k) in [(12usize, 2usize), (12, 3), (30, 2), (30, 3), (30, 5), (100, 2), (100, 3), (100, 5)]
    {
        let plan = TilingPlan::new(n, k, n - k)?;
        if (plan.witness_count() as f64) > 3.0 / plan.epsilon() + 10.0 {
            return Ok(format!("budget exceeded at n={n} k={k}"));
        }
        ok += 1;
    }
    if TilingPlan::new(12, 5, 7).is_ok() {
        return Ok("degenerate parameters accepted".into());
    }
    Ok(format!("{ok} plans within budget; n = 12, k = 5 rejected"))
}

/// The basic block covers within eight translates at the small sizes, found
/// by seeded random witnesses and replayed exactly.
fn basic_block_row() -> Result<String> {
    let mut found = Vec::new();
    for n in [5usize, 6] {
        let rep = Representation::conj_sln(n)?;
        let b = basic_block_subspace(n)?;
        let mut hit = None;
        for k in lower_ceiling(rep.dim_v(), b.dim())?..=8 {
            let strategy = Strategy::Random { seed: 29 + k as u64, trials: 40, entry_range: 10 };
            if let Some(cert) = certify_upper(&rep, &b, k, &strategy)? {
                verify(&cert)?;
                hit = Some(k);
                break;
            }
        }
        match hit {
            Some(k) => found.push((n, k)),
            None => return Ok(format!("no witness within 8 at n = {n}")),
        }
    }
    let (n5, k5) = found[0];
    let (n6, k6) = found[1];
    Ok(format!("n = {n5} covered at {k5}, n = {n6} at {k6}"))
}

/// Monomial diameters of the tail windows are optimal for every degree.
fn monomial_windows() -> Result<String> {
    let mut count = 0usize;
    for k in 1..=8usize {
        let rep = Representation::sl2_irrep(k);
        for j in 0..=k {
            let u = upper_closed(k, j)?;
            let want = (k + 1).div_ceil(k + 1 - j);
            let res = diameter_lie(&rep, &u, Variant::LieMonomial, want + 2, 3)?;
            if !exact_finite(&res, want) {
                return Ok(format!("not exact {want} at k={k} j={j}"));
            }
            verify_all(&res)?;
            count += 1;
        }
    }
    Ok(format!("{count} windows exact at the ceiling"))
}

/// Proper tail windows trap single Lie operators: the elementary diameter
/// is infinite whenever the window misses the top weight.
fn elementary_infinite() -> Result<String> {
    let mut count = 0usize;
    for k in 2..=8usize {
        let rep = Representation::sl2_irrep(k);
        for j in 2..=k {
            let u = upper_closed(k, j)?;
            let res = diameter_lie(&rep, &u, Variant::LieElementary, 3, 5)?;
            if res.exact_value() != Some(DiamValue::Infinite) {
                return Ok(format!("not infinite at k={k} j={j}"));
            }
            verify_all(&res)?;
            count += 1;
        }
    }
    Ok(format!("{count} windows certified infinite"))
}

fn random_traceless(rng: &mut ChaCha8Rng, n: usize, h: i64) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            *m.at_mut(i, j) = rat(rng.gen_range(-h..=h));
        }
    }
    let mut s = Rational::zero();
    for i in 0..n - 1 {
        s += m.at(i, i);
    }
    *m.at_mut(n - 1, n - 1) = -s;
    m
}

/// The four diameters of the distinguished adjoint subspace differ between
/// the group/elementary pair and the monomial/associative pair, with the
/// quoted witnesses realizing each; a one-dimensional core pins every single
/// translate to at most seven dimensions.
fn sl3_row() -> Result<String> {
    let ex = sl3_distinct_diameters_example()?;
    let group = diameter(&ex.rep, &ex.subspace, 4, 7)?;
    if !exact_finite(&group, 3) {
        return Ok("group diameter differs".into());
    }
    let elem = diameter_lie(&ex.rep, &ex.subspace, Variant::LieElementary, 5, 7)?;
    if !exact_finite(&elem, 3) {
        return Ok("elementary diameter differs".into());
    }
    let mono = diameter_lie(&ex.rep, &ex.subspace, Variant::LieMonomial, 5, 7)?;
    if !exact_finite(&mono, 2) {
        return Ok("monomial diameter differs".into());
    }
    let ass = diameter_lie(&ex.rep, &ex.subspace, Variant::LieAssociative, 5, 7)?;
    if !exact_finite(&ass, 2) {
        return Ok("associative diameter differs".into());
    }
    for res in [&group, &elem, &mono, &ass] {
        verify_all(res)?;
    }
    if !lie_translate_sum(&ex.rep, &ex.subspace, &ex.monomial)?.is_full() {
        return Ok("quoted monomial witness fails".into());
    }
    if !lie_translate_sum(&ex.rep, &ex.subspace, &ex.elementary)?.is_full() {
        return Ok("quoted elementary witness fails".into());
    }
    if cap_core(&ex.rep, &ex.subspace)?.dim() != 1 {
        return Ok("cap core is not a line".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let w = LieWitness::Elementary { elements: vec![random_traceless(&mut rng, 3, 9)] };
        if lie_translate_sum(&ex.rep, &ex.subspace, &w)?.dim() > 7 {
            return Ok("a single translate escapes the cap".into());
        }
    }
    Ok(SL3_OK.into())
}

/// Irreducibility makes the generated operator algebra everything.
fn burnside_row() -> Result<String> {
    let mut count = 0usize;
    for k in 1..=8usize {
        let alg = OperatorAlgebra::closure(&Representation::sl2_irrep(k))?;
        if alg.dim() != (k + 1) * (k + 1) {
            return Ok(format!("closure short at degree {k}"));
        }
        count += 1;
    }
    for n in 2..=4usize {
        let alg = OperatorAlgebra::closure(&Representation::conj_sln(n)?)?;
        let d = n * n - 1;
        if alg.dim() != d * d {
            return Ok(format!("closure short at n = {n}"));
        }
        count += 1;
    }
    Ok(format!("{count} algebras close to full"))
}

/// 2[u,x] = (I+x)^{-1}u(I+x) - (I-x)^{-1}u(I-x) for square-zero x, sampled
/// over rank-one x = a b^T with b orthogonal to a.
fn square_zero_row() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let mut count = 0usize;
    for n in 2..=5usize {
        let mut done = 0usize;
        while done < 100 {
            let a: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-4..=4))).collect();
            let aa = a.iter().fold(Rational::zero(), |acc, p| acc + p * p);
            if aa.is_zero() {
                continue;
            }
            let braw: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-4..=4))).collect();
            let ab = braw.iter().zip(&a).fold(Rational::zero(), |acc, (p, q)| acc + p * q);
            let factor = &ab / &aa;
            let b: Vec<Rational> = braw.iter().zip(&a).map(|(bi, ai)| bi - &factor * ai).collect();
            let mut x = RationalMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    *x.at_mut(i, j) = &a[i] * &b[j];
                }
            }
            if x.is_zero() {
                continue;
            }
            let mut u = RationalMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    *u.at_mut(i, j) = rat(rng.gen_range(-5..=5));
                }
            }
            if !square_zero_translate_identity(&u, &x)? {
                return Ok(format!("identity fails at n = {n}"));
            }
            done += 1;
            count += 1;
        }
    }
    Ok(format!("{count} sampled identities hold"))
}

/// The cubic's tangent image covers in two, doubling to a four-point bound.
fn cubic_row() -> Result<String> {
    let f = twisted_cubic()?;
    match waring_bound(&f, &[rat(1), rat(1)], 6, 9)? {
        WaringOutcome::Bounded(cert) => {
            verify_waring(&cert)?;
            if cert.k_jacobian != 2 || cert.bound != 4 {
                return Ok(format!("bound ({}, {})", cert.k_jacobian, cert.bound));
            }
            Ok(CUBIC_OK.into())
        }
        WaringOutcome::Obstructed(_) => Ok("unexpectedly obstructed".into()),
        WaringOutcome::Inconclusive { .. } => Ok("no certified bound".into()),
    }
}

/// Squaring has an invertible derivative at the identity, so the tangent
/// image is everything and two points suffice.
fn square_row() -> Result<String> {
    for n in [2usize, 3] {
        let f = square_map(n)?;
        let w: Vec<Rational> =
            (0..n * n).map(|idx| if idx % (n + 1) == 0 { rat(1) } else { rat(0) }).collect();
        match waring_bound(&f, &w, 4, 9)? {
            WaringOutcome::Bounded(cert) => {
                verify_waring(&cert)?;
                if cert.k_jacobian != 1 || cert.bound != 2 {
                    return Ok(format!("bound ({}, {}) at n = {n}", cert.k_jacobian, cert.bound));
                }
            }
            _ => return Ok(format!("no certified bound at n = {n}")),
        }
    }
    Ok("bound 2 at n = 2, 3".into())
}

/// The commutator-plus-identity map shifts into a coset of the traceless
/// subrepresentation, so its derivative diameter is infinite.
fn comm_row() -> Result<String> {
    let f = comm_plus_identity(2)?;
    match subrep_obstruction(&f, 40, 13)? {
        SubrepVerdict::Trapped { trap } => {
            if trap.dim() != 3 {
                return Ok(format!("trap dimension {}", trap.dim()));
            }
        }
        SubrepVerdict::Clear { .. } => return Ok("unexpectedly clear".into()),
    }
    let mut w = vec![rat(0); 8];
    w[1] = rat(1);
    w[6] = rat(1);
    match waring_bound(&f, &w, 4, 13)? {
        WaringOutcome::Obstructed(cert) => {
            verify(&cert)?;
            if cert.value != DiamValue::Infinite {
                return Ok(format!("inner value {:?}", cert.value));
            }
            Ok(COMM_OK.into())
        }
        _ => Ok("not obstructed".into()),
    }
}

const BUILTIN_MAPS: [&str; 5] = ["twisted_cubic", "orbit:4", "square:2", "square:3", "comm_plus_identity:2"];

/// Orbit tangents always land inside the derivative image, replayed across
/// the builtin maps at random points and group elements.
fn containment_row() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut count = 0usize;
    for name in BUILTIN_MAPS {
        let f = from_map_descriptor(name)?;
        for _ in 0..20 {
            let w: Vec<Rational> = (0..f.dim_w()).map(|_| rat(rng.gen_range(-3..=3))).collect();
            let g = random_invertible(&mut rng, f.source_rep().group_size(), 2);
            if !crate::eqmorph::derivative_containment_check(&f, &w, &g)? {
                return Ok(format!("containment fails for {name}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} containments hold"))
}

/// f(g w) = rho(g) f(w) exactly, across the builtins.
fn equivariance_row() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    let mut count = 0usize;
    for name in BUILTIN_MAPS {
        let f = from_map_descriptor(name)?;
        for _ in 0..50 {
            let w: Vec<Rational> = (0..f.dim_w()).map(|_| rat(rng.gen_range(-3..=3))).collect();
            let g = random_invertible(&mut rng, f.source_rep().group_size(), 2);
            let lhs = f.eval(&f.source_rep().evaluate(&g)?.mul_vec(&w)?)?;
            let rhs = f.target_rep().evaluate(&g)?.mul_vec(&f.eval(&w)?)?;
            if lhs != rhs {
                return Ok(format!("equivariance fails for {name}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} identities exact"))
}

/// The middle monomial point needs three cubic points numerically; the
/// residual is recomputed from the returned points.
fn decompose_row() -> Result<String> {
    let f = twisted_cubic()?;
    let target = [0.0, 1.0, 0.0, 0.0];
    match numeric_decompose(&f, &target, 3, 71) {
        Some(points) => {
            let mut total = [0.0f64; 4];
            for p in &points {
                for (t, v) in total.iter_mut().zip(f.eval_f64(p)) {
                    *t += v;
                }
            }
            let residual: f64 =
                total.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if points.len() == 3 && residual < 1e-9 {
                Ok(DECOMPOSE_OK.into())
            } else {
                Ok(format!("{} points, residual {residual:e}", points.len()))
            }
        }
        None => Ok("no decomposition found".into()),
    }
}

/// Every certificate species replays through verification, and one-entry
/// witness mutations (left unsealed) are all rejected by the digest check.
fn soundness_row() -> Result<String> {
    let mut pool: Vec<Certificate> = Vec::new();
    let mut push_all = |res: &DiameterResult| {
        for c in res.certificates() {
            pool.push(c.clone());
        }
    };
    let rep = Representation::sl2_irrep(6);
    push_all(&diameter(&rep, &upper_closed(6, 3)?, 5, 3)?);
    let m2 = Representation::conj_mn(2)?;
    push_all(&diameter(&m2, &named(2, NamedSpace::Gl2Example)?, 4, 2)?);
    let sl4 = Representation::conj_sln(4)?;
    push_all(&diameter(&sl4, &named(4, NamedSpace::Counterexample)?, 4, 3)?);
    push_all(&diameter(&sl4, &named(4, NamedSpace::ZeroDiag)?, 3, 2)?);
    push_all(&diameter(&sl4, &named(4, NamedSpace::LastRowColZero)?, 3, 2)?);
    let sl2 = Representation::sl2_irrep(4);
    push_all(&diameter_lie(&sl2, &upper_closed(4, 2)?, Variant::LieElementary, 3, 5)?);
    push_all(&diameter_lie(&sl2, &upper_closed(4, 2)?, Variant::LieMonomial, 4, 5)?);
    for c in &pool {
        verify(c)?;
    }
    let f = twisted_cubic()?;
    let outer = match waring_bound(&f, &[rat(1), rat(1)], 6, 9)? {
        WaringOutcome::Bounded(c) => c,
        _ => return Ok("no covering certificate".into()),
    };
    verify_waring(&outer)?;
    let total = pool.len() + 1;

    let witnessed: Vec<&Certificate> = pool.iter().filter(|c| !c.witnesses.is_empty()).collect();
    if witnessed.is_empty() {
        return Ok("no witnessed certificates to mutate".into());
    }
    let mut rejected = 0usize;
    for i in 0..20usize {
        let base = witnessed[i % witnessed.len()];
        let mut bad = base.clone();
        let wi = i % bad.witnesses.len();
        let m = &mut bad.witnesses[wi];
        let r = i % m.rows();
        let c = (i / 3) % m.cols();
        *m.at_mut(r, c) = m.at(r, c) + rat(1);
        if verify(&bad).is_ok() {
            return Ok("a mutated certificate slipped through".into());
        }
        rejected += 1;
    }
    Ok(format!("{total} certificates replay; {rejected} mutations rejected"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_filter_by_prefix() {
        let report = run_suite(Some("lem:poly_basis")).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].anchor, "lem:poly_basis");
        assert!(report.rows[0].pass, "computed: {}", report.rows[0].computed);
        assert!(run_suite(Some("no:such:anchor")).is_err());
    }

    #[test]
    fn section_selectors_catch_their_rows() {
        let specs = catalog();
        let sec7 = specs.iter().filter(|s| s.anchor.starts_with("sec7")).count();
        assert_eq!(sec7, 6);
        let appendix = specs.iter().filter(|s| s.anchor.starts_with("appendix")).count();
        assert_eq!(appendix, 3);
        assert_eq!(specs.len(), 23);
    }

    #[test]
    fn rows_keep_catalog_order() {
        let report = run_suite(Some("sec6")).unwrap();
        let anchors: Vec<&str> = report.rows.iter().map(|r| r.anchor).collect();
        assert_eq!(
            anchors,
            vec![
                "sec6:monomial_windows",
                "sec6:elementary_infinite",
                "sec6:sl3_quadruple",
                "sec6:burnside",
                "sec6:square_zero"
            ]
        );
        for r in &report.rows {
            assert!(r.pass, "{} computed: {}", r.anchor, r.computed);
        }
    }

    #[test]
    fn the_quoted_appendix_rows_pass() {
        let report = run_suite(Some("appendix")).unwrap();
        for r in &report.rows {
            assert!(r.pass, "{} computed: {}", r.anchor, r.computed);
        }
    }
}
