//! Concrete representations and group elements.
//!
//! Two families carry all the structured computations: the irreducible
//! SL2 action on binary forms of degree k (basis e_i = X^i Y^(k-i), so
//! dim = k+1), and conjugation of GL_n / SL_n on traceless or full
//! matrices.  Evaluators produce exact operator matrices acting on
//! coordinate columns; `lie_evaluate` produces the differential at the
//! identity, and the two are kept consistent by construction and by test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::exactlin::{rat, Rational, RationalMatrix, Subspace};
use crate::{Error, Result};

/// A permutation of {0, .., n-1}; `images[i]` is the image of i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Transposition of a and b (0-based).
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    /// Swap two equal-length index blocks elementwise, fixing the rest.
    pub fn block_swap(n: usize, a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument("block length mismatch".into()));
        }
        let mut images: Vec<usize> = (0..n).collect();
        for (&x, &y) in a.iter().zip(b) {
            if x >= n || y >= n {
                return Err(Error::InvalidArgument("block index out of range".into()));
            }
            images[x] = y;
            images[y] = x;
        }
        Self::from_images(images)
    }

    /// The n-cycle 0 -> 1 -> ... -> n-1 -> 0.
    pub fn long_cycle(n: usize) -> Self {
        Permutation { images: (0..n).map(|i| (i + 1) % n).collect() }
    }

    /// i -> n-1-i; as a matrix this is the antidiagonal flip.
    pub fn reversal(n: usize) -> Self {
        Permutation { images: (0..n).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.images.len()];
        for (i, &im) in self.images.iter().enumerate() {
            inv[im] = i;
        }
        Permutation { images: inv }
    }

    /// Matrix P with P e_j = e_{perm(j)}.
    pub fn matrix(&self) -> RationalMatrix {
        let n = self.images.len();
        let mut m = RationalMatrix::zeros(n, n);
        for j in 0..n {
            *m.at_mut(self.images[j], j) = Rational::one();
        }
        m
    }

    pub fn group_element(&self) -> GroupElement {
        GroupElement {
            matrix: self.matrix(),
            inverse: self.inverse().matrix(),
            perm: Some(self.clone()),
        }
    }
}

/// An invertible matrix with its inverse cached; permutation elements also
/// carry their index map so conjugation can avoid matrix arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    matrix: RationalMatrix,
    inverse: RationalMatrix,
    perm: Option<Permutation>,
}

impl GroupElement {
    pub fn new(matrix: RationalMatrix) -> Result<Self> {
        let inverse = matrix.inverse()?;
        Ok(GroupElement { matrix, inverse, perm: None })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement {
            matrix: RationalMatrix::identity(n),
            inverse: RationalMatrix::identity(n),
            perm: Some(Permutation::identity(n)),
        }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &RationalMatrix {
        &self.inverse
    }

    pub fn permutation(&self) -> Option<&Permutation> {
        self.perm.as_ref()
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn inverse_element(&self) -> Self {
        GroupElement {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            perm: self.perm.as_ref().map(Permutation::inverse),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        let matrix = self.matrix.mul(&other.matrix)?;
        let inverse = other.inverse.mul(&self.inverse)?;
        Ok(GroupElement { matrix, inverse, perm: None })
    }
}

/// Antidiagonal permutation matrix F with F e_i = e_{n+1-i} (1-based).
pub fn flip_matrix(n: usize) -> GroupElement {
    Permutation::reversal(n).group_element()
}

/// Lower unipotent [[1,0],[a,1]] in SL2.
pub fn unipotent_shift(a: &Rational) -> GroupElement {
    let mut m = RationalMatrix::identity(2);
    *m.at_mut(1, 0) = a.clone();
    let mut inv = RationalMatrix::identity(2);
    *inv.at_mut(1, 0) = -a.clone();
    GroupElement { matrix: m, inverse: inv, perm: None }
}

/// Permutation group element from 0-based images.
pub fn permutation(images: Vec<usize>) -> Result<GroupElement> {
    Ok(Permutation::from_images(images)?.group_element())
}

/// The product (I+E_12)(I+E_23)...(I+E_{n-1,n}); equals the upper
/// triangular all-ones matrix.
pub fn elementary_product(n: usize) -> GroupElement {
    let mut m = RationalMatrix::identity(n);
    for i in 1..n {
        let mut factor = RationalMatrix::identity(n);
        *factor.at_mut(i - 1, i) = Rational::one();
        m = m.mul(&factor).expect("square");
    }
    GroupElement::new(m).expect("unipotent product is invertible")
}

/// Elementary matrix E_{ij} (1-based indices) of size n.
pub fn unit_matrix(n: usize, i: usize, j: usize) -> RationalMatrix {
    assert!(1 <= i && i <= n && 1 <= j && j <= n, "unit matrix index");
    let mut m = RationalMatrix::zeros(n, n);
    *m.at_mut(i - 1, j - 1) = Rational::one();
    m
}

/// Which matrix space a conjugation representation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixSpace {
    /// Traceless matrices; coordinates are all E_ij (i != j) in row-major
    /// order followed by E_ii - E_{i+1,i+1} for i = 1..n-1.
    Sln,
    /// Full matrix space; coordinates are E_ij in row-major order.
    Mn,
}

/// Fixed linear coordinates on sl_n or M_n.
#[derive(Clone, Copy, Debug)]
pub struct Coordinatization {
    pub n: usize,
    pub space: MatrixSpace,
}

impl Coordinatization {
    pub fn sln(n: usize) -> Self {
        Coordinatization { n, space: MatrixSpace::Sln }
    }

    pub fn mn(n: usize) -> Self {
        Coordinatization { n, space: MatrixSpace::Mn }
    }

    pub fn dim(&self) -> usize {
        match self.space {
            MatrixSpace::Sln => self.n * self.n - 1,
            MatrixSpace::Mn => self.n * self.n,
        }
    }

    /// Coordinate index of the off-diagonal position (i, j), 1-based.
    pub fn off_diag_index(&self, i: usize, j: usize) -> usize {
        assert!(i != j && i >= 1 && j >= 1 && i <= self.n && j <= self.n);
        match self.space {
            MatrixSpace::Sln => {
                // Row-major over off-diagonal slots only.
                (i - 1) * (self.n - 1) + (j - 1) - usize::from(j > i)
            }
            MatrixSpace::Mn => (i - 1) * self.n + (j - 1),
        }
    }

    /// Ordered basis as matrices.
    pub fn basis(&self) -> Vec<RationalMatrix> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim());
        match self.space {
            MatrixSpace::Sln => {
                for i in 1..=n {
                    for j in 1..=n {
                        if i != j {
                            out.push(unit_matrix(n, i, j));
                        }
                    }
                }
                for i in 1..n {
                    let m = unit_matrix(n, i, i).sub(&unit_matrix(n, i + 1, i + 1)).unwrap();
                    out.push(m);
                }
            }
            MatrixSpace::Mn => {
                for i in 1..=n {
                    for j in 1..=n {
                        out.push(unit_matrix(n, i, j));
                    }
                }
            }
        }
        out
    }

    pub fn vector_of(&self, m: &RationalMatrix) -> Result<Vec<Rational>> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::DimensionMismatch("matrix size".into()));
        }
        let n = self.n;
        match self.space {
            MatrixSpace::Mn => {
                Ok((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m.at(i, j).clone()).collect())
            }
            MatrixSpace::Sln => {
                if !m.trace().is_zero() {
                    return Err(Error::InvalidArgument("matrix has nonzero trace".into()));
                }
                let mut v = Vec::with_capacity(self.dim());
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            v.push(m.at(i, j).clone());
                        }
                    }
                }
                // Diagonal coords against h_i = E_ii - E_{i+1,i+1} are the
                // partial sums of the diagonal.
                let mut acc = Rational::zero();
                for i in 0..n - 1 {
                    acc += m.at(i, i);
                    v.push(acc.clone());
                }
                Ok(v)
            }
        }
    }

    pub fn matrix_of(&self, v: &[Rational]) -> Result<RationalMatrix> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch("coordinate length".into()));
        }
        let n = self.n;
        let mut m = RationalMatrix::zeros(n, n);
        match self.space {
            MatrixSpace::Mn => {
                for i in 0..n {
                    for j in 0..n {
                        *m.at_mut(i, j) = v[i * n + j].clone();
                    }
                }
            }
            MatrixSpace::Sln => {
                let mut idx = 0;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            *m.at_mut(i, j) = v[idx].clone();
                            idx += 1;
                        }
                    }
                }
                let mut prev = Rational::zero();
                for i in 0..n - 1 {
                    let c = v[idx + i].clone();
                    *m.at_mut(i, i) = &c - &prev;
                    prev = c;
                }
                *m.at_mut(n - 1, n - 1) = -prev;
            }
        }
        Ok(m)
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k.min(n - k) {
        num *= BigInt::from(n - t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

fn pow_rat(x: &Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// A representation together with the data needed to act on subspaces,
/// differentiate at the identity, and name itself in certificates.
#[derive(Clone, Debug)]
pub enum Representation {
    /// SL2 on binary forms of degree k; e_i = X^i Y^(k-i), i = 0..k.
    Sl2Irrep { k: usize },
    /// Conjugation A -> g A g^{-1} on traceless n x n matrices.
    ConjSln { n: usize },
    /// Conjugation on the full matrix space.
    ConjMn { n: usize },
    /// Diagonal conjugation on a direct sum of `copies` copies of M_n.
    ConjMnPower { n: usize, copies: usize },
    /// The defining action on column vectors.
    Standard { n: usize },
    /// Base representation rewritten in another basis: op -> C op C^{-1}.
    Conjugated {
        base: Box<Representation>,
        change: RationalMatrix,
        change_inv: RationalMatrix,
    },
}

impl Representation {
    pub fn sl2_irrep(k: usize) -> Self {
        Representation::Sl2Irrep { k }
    }

    pub fn conj_sln(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("conjugation needs n >= 2".into()));
        }
        Ok(Representation::ConjSln { n })
    }

    pub fn conj_mn(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("n >= 1".into()));
        }
        Ok(Representation::ConjMn { n })
    }

    pub fn standard(n: usize) -> Self {
        Representation::Standard { n }
    }

    pub fn conjugated(base: Representation, change: RationalMatrix) -> Result<Self> {
        let change_inv = change.inverse()?;
        if change.rows() != base.dim_v() {
            return Err(Error::DimensionMismatch("basis change size".into()));
        }
        Ok(Representation::Conjugated { base: Box::new(base), change, change_inv })
    }

    /// Dimension of the representation space.
    pub fn dim_v(&self) -> usize {
        match self {
            Representation::Sl2Irrep { k } => k + 1,
            Representation::ConjSln { n } => n * n - 1,
            Representation::ConjMn { n } => n * n,
            Representation::ConjMnPower { n, copies } => copies * n * n,
            Representation::Standard { n } => *n,
            Representation::Conjugated { base, .. } => base.dim_v(),
        }
    }

    /// Size of the group's matrices.
    pub fn group_size(&self) -> usize {
        match self {
            Representation::Sl2Irrep { .. } => 2,
            Representation::ConjSln { n }
            | Representation::ConjMn { n }
            | Representation::ConjMnPower { n, .. }
            | Representation::Standard { n } => *n,
            Representation::Conjugated { base, .. } => base.group_size(),
        }
    }

    /// Coordinatization of the target when it is a conjugation space.
    pub fn coordinatization(&self) -> Option<Coordinatization> {
        match self {
            Representation::ConjSln { n } => Some(Coordinatization::sln(*n)),
            Representation::ConjMn { n } => Some(Coordinatization::mn(*n)),
            _ => None,
        }
    }

    /// Operator matrix of the group element.
    pub fn evaluate(&self, g: &GroupElement) -> Result<RationalMatrix> {
        if g.size() != self.group_size() {
            return Err(Error::DimensionMismatch(format!(
                "group element size {} for group of size {}",
                g.size(),
                self.group_size()
            )));
        }
        match self {
            Representation::Sl2Irrep { k } => Ok(sl2_operator(*k, g.matrix())),
            Representation::ConjSln { n } => conj_operator(Coordinatization::sln(*n), g),
            Representation::ConjMn { n } => conj_operator(Coordinatization::mn(*n), g),
            Representation::ConjMnPower { n, copies } => {
                let block = conj_operator(Coordinatization::mn(*n), g)?;
                Ok(block_diag(&block, *copies))
            }
            Representation::Standard { .. } => Ok(g.matrix().clone()),
            Representation::Conjugated { base, change, change_inv } => {
                Ok(change.mul(&base.evaluate(g)?)?.mul(change_inv)?)
            }
        }
    }

    /// Differential of the evaluator at the identity, applied to a Lie
    /// algebra element x (a group_size x group_size matrix).
    pub fn lie_evaluate(&self, x: &RationalMatrix) -> Result<RationalMatrix> {
        let n = self.group_size();
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch("lie element size".into()));
        }
        match self {
            Representation::Sl2Irrep { k } => {
                if !(x.at(0, 0) + x.at(1, 1)).is_zero() {
                    return Err(Error::InvalidArgument(
                        "sl2 differential needs a traceless element".into(),
                    ));
                }
                let k = *k;
                let mut m = RationalMatrix::zeros(k + 1, k + 1);
                // x = a h + b e + c f with h = diag(1,-1), e = E_12, f = E_21;
                // h e_i = (2i-k) e_i, e e_i = (k-i) e_{i+1}, f e_i = i e_{i-1}.
                let (a, b, c) = (x.at(0, 0), x.at(0, 1), x.at(1, 0));
                for i in 0..=k {
                    *m.at_mut(i, i) = a * rat(2 * i as i64 - k as i64);
                    if i + 1 <= k {
                        *m.at_mut(i + 1, i) = b * rat((k - i) as i64);
                    }
                    if i >= 1 {
                        *m.at_mut(i - 1, i) = c * rat(i as i64);
                    }
                }
                Ok(m)
            }
            Representation::ConjSln { n } => conj_lie_operator(Coordinatization::sln(*n), x),
            Representation::ConjMn { n } => conj_lie_operator(Coordinatization::mn(*n), x),
            Representation::ConjMnPower { n, copies } => {
                let block = conj_lie_operator(Coordinatization::mn(*n), x)?;
                Ok(block_diag(&block, *copies))
            }
            Representation::Standard { .. } => Ok(x.clone()),
            Representation::Conjugated { base, change, change_inv } => {
                Ok(change.mul(&base.lie_evaluate(x)?)?.mul(change_inv)?)
            }
        }
    }

    /// Basis of the acting Lie algebra (sl_2 or sl_n; scalars act trivially
    /// on conjugation spaces and preserve every subspace of the standard
    /// space, so sl suffices for stability and closure computations).
    pub fn lie_basis(&self) -> Vec<RationalMatrix> {
        match self {
            Representation::Sl2Irrep { .. } => sl2_basis(),
            Representation::Conjugated { base, .. } => base.lie_basis(),
            _ => Coordinatization::sln(self.group_size()).basis(),
        }
    }

    /// Generators of the Borel subalgebra (upper triangular): the simple
    /// raising elements plus the diagonal basis.
    pub fn borel_generators(&self) -> Vec<RationalMatrix> {
        match self {
            Representation::Sl2Irrep { .. } => {
                let b = sl2_basis();
                vec![b[0].clone(), b[1].clone()] // e, h
            }
            Representation::Conjugated { base, .. } => base.borel_generators(),
            _ => {
                let n = self.group_size();
                let mut out = Vec::new();
                for i in 1..n {
                    out.push(unit_matrix(n, i, i + 1));
                }
                for i in 1..n {
                    out.push(unit_matrix(n, i, i).sub(&unit_matrix(n, i + 1, i + 1)).unwrap());
                }
                out
            }
        }
    }

    /// Replayable descriptor; strings for the named kinds, a structure for
    /// composites.
    pub fn descriptor(&self) -> Value {
        match self {
            Representation::Sl2Irrep { k } => json!(format!("sl2:{k}")),
            Representation::ConjSln { n } => json!(format!("conj:sln:{n}")),
            Representation::ConjMn { n } => json!(format!("conj:Mn:{n}")),
            Representation::ConjMnPower { n, copies } => json!(format!("conj:Mn:{n}:x{copies}")),
            Representation::Standard { n } => json!(format!("std:{n}")),
            Representation::Conjugated { base, change, .. } => json!({
                "kind": "conjugated",
                "base": base.descriptor(),
                "change": change,
            }),
        }
    }

    pub fn from_descriptor(v: &Value) -> Result<Representation> {
        match v {
            Value::String(s) => parse_rep_string(s),
            Value::Object(map) => {
                let kind = map.get("kind").and_then(Value::as_str).unwrap_or_default();
                if kind != "conjugated" {
                    return Err(Error::Parse(format!("unknown representation kind '{kind}'")));
                }
                let base = Representation::from_descriptor(
                    map.get("base").ok_or_else(|| Error::Parse("missing base".into()))?,
                )?;
                let change: RationalMatrix = serde_json::from_value(
                    map.get("change").ok_or_else(|| Error::Parse("missing change".into()))?.clone(),
                )?;
                Representation::conjugated(base, change)
            }
            _ => Err(Error::Parse("representation descriptor must be string or object".into())),
        }
    }
}

/// Parse "sl2:k", "conj:sln:n", "conj:Mn:n", "conj:Mn:n:xm", "std:n".
pub fn parse_rep_string(s: &str) -> Result<Representation> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parse(format!("unknown representation descriptor '{s}'"));
    let num = |p: &str| p.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["sl2", k] => Ok(Representation::sl2_irrep(num(k)?)),
        ["conj", "sln", n] => Representation::conj_sln(num(n)?),
        ["conj", "Mn", n] => Representation::conj_mn(num(n)?),
        ["conj", "Mn", n, copies] if copies.starts_with('x') => {
            let c = copies[1..].parse::<usize>().map_err(|_| bad())?;
            Ok(Representation::ConjMnPower { n: num(n)?, copies: c })
        }
        ["std", n] => Ok(Representation::standard(num(n)?)),
        _ => Err(bad()),
    }
}

/// e, h, f basis of sl_2.
pub fn sl2_basis() -> Vec<RationalMatrix> {
    let e = RationalMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
    let h = RationalMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]);
    let f = RationalMatrix::from_i64_rows(&[&[0, 0], &[1, 0]]);
    vec![e, h, f]
}

/// Operator of g = [[a,b],[c,d]] on degree-k forms: e_i maps to
/// (aX + cY)^i (bX + dY)^(k-i), expanded over the e_m.
fn sl2_operator(k: usize, g: &RationalMatrix) -> RationalMatrix {
    let (a, b) = (g.at(0, 0), g.at(0, 1));
    let (c, d) = (g.at(1, 0), g.at(1, 1));
    let mut out = RationalMatrix::zeros(k + 1, k + 1);
    for i in 0..=k {
        // X-degree coefficients of (aX + cY)^i and (bX + dY)^(k-i).
        let p1: Vec<Rational> = (0..=i)
            .map(|p| {
                BigRational::from_integer(binomial(i, p)) * pow_rat(a, p) * pow_rat(c, i - p)
            })
            .collect();
        let p2: Vec<Rational> = (0..=k - i)
            .map(|q| {
                BigRational::from_integer(binomial(k - i, q)) * pow_rat(b, q) * pow_rat(d, k - i - q)
            })
            .collect();
        for (p, v1) in p1.iter().enumerate() {
            if v1.is_zero() {
                continue;
            }
            for (q, v2) in p2.iter().enumerate() {
                if !v2.is_zero() {
                    let e = out.at_mut(p + q, i);
                    *e += v1 * v2;
                }
            }
        }
    }
    out
}

fn conj_operator(coord: Coordinatization, g: &GroupElement) -> Result<RationalMatrix> {
    let dim = coord.dim();
    let mut out = RationalMatrix::zeros(dim, dim);
    for (t, b) in coord.basis().iter().enumerate() {
        let image = g.matrix().mul(b)?.mul(g.inverse_matrix())?;
        let col = coord.vector_of(&image)?;
        for (r, v) in col.into_iter().enumerate() {
            *out.at_mut(r, t) = v;
        }
    }
    Ok(out)
}

fn conj_lie_operator(coord: Coordinatization, x: &RationalMatrix) -> Result<RationalMatrix> {
    let dim = coord.dim();
    let mut out = RationalMatrix::zeros(dim, dim);
    for (t, b) in coord.basis().iter().enumerate() {
        let image = x.commutator(b)?;
        let col = coord.vector_of(&image)?;
        for (r, v) in col.into_iter().enumerate() {
            *out.at_mut(r, t) = v;
        }
    }
    Ok(out)
}

fn block_diag(block: &RationalMatrix, copies: usize) -> RationalMatrix {
    let b = block.rows();
    let mut out = RationalMatrix::zeros(b * copies, b * copies);
    for c in 0..copies {
        for r in 0..b {
            for j in 0..b {
                *out.at_mut(c * b + r, c * b + j) = block.at(r, j).clone();
            }
        }
    }
    out
}

/// Image of a subspace under an operator matrix (rows map through the
/// transpose since basis vectors are stored as rows).
pub fn apply(op: &RationalMatrix, u: &Subspace) -> Subspace {
    assert_eq!(op.cols(), u.ambient_dim(), "operator/subspace mismatch");
    let images = u.basis().mul(&op.transpose()).expect("dims checked");
    Subspace::from_matrix_rows(op.rows(), &images)
}

/// Image of a subspace under the action of a group element.
pub fn translate(rep: &Representation, g: &GroupElement, u: &Subspace) -> Result<Subspace> {
    Ok(apply(&rep.evaluate(g)?, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;
    use num_traits::One;
    use rand::{Rng, SeedableRng};

    fn random_invertible(rng: &mut impl Rng, n: usize, h: i64) -> GroupElement {
        loop {
            let m = RationalMatrix::from_rows(
                (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-h..=h))).collect()).collect(),
            )
            .unwrap();
            if let Ok(g) = GroupElement::new(m) {
                return g;
            }
        }
    }

    #[test]
    fn degree_one_action_is_the_standard_action_up_to_basis_order() {
        let g = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let op = sl2_operator(1, &g);
        // Basis is (Y, X), so the operator is the reversal conjugate of g.
        assert_eq!(op, RationalMatrix::from_i64_rows(&[&[4, 3], &[2, 1]]));
        let r = Permutation::reversal(2).matrix();
        assert_eq!(r.mul(&op).unwrap().mul(&r).unwrap(), g);
    }

    #[test]
    fn degree_two_action_of_upper_unipotent() {
        let g = GroupElement::new(RationalMatrix::from_i64_rows(&[&[1, 1], &[0, 1]])).unwrap();
        let op = Representation::sl2_irrep(2).evaluate(&g).unwrap();
        // Columns: Y^2 -> (X+Y)^2, XY -> X(X+Y), X^2 -> X^2.
        let expected = RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[2, 1, 0], &[1, 1, 1]]);
        assert_eq!(op, expected);
    }

    #[test]
    fn lie_actions_raise_scale_and_lower_indices() {
        let rep = Representation::sl2_irrep(3);
        let b = sl2_basis();
        let ek = rep.lie_evaluate(&b[0]).unwrap();
        let hk = rep.lie_evaluate(&b[1]).unwrap();
        let fk = rep.lie_evaluate(&b[2]).unwrap();
        for i in 0..=3usize {
            for m in 0..=3usize {
                // e e_i = (3-i) e_{i+1}
                let want = if m == i + 1 { rat(3 - i as i64) } else { rat(0) };
                assert_eq!(*ek.at(m, i), want, "e at ({m},{i})");
                let want = if m == i { rat(2 * i as i64 - 3) } else { rat(0) };
                assert_eq!(*hk.at(m, i), want, "h at ({m},{i})");
                let want = if m + 1 == i { rat(i as i64) } else { rat(0) };
                assert_eq!(*fk.at(m, i), want, "f at ({m},{i})");
            }
        }
        assert!(rep.lie_evaluate(&RationalMatrix::identity(2)).is_err());
    }

    #[test]
    fn evaluators_are_homomorphisms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for k in [1usize, 2, 5] {
            let rep = Representation::sl2_irrep(k);
            for _ in 0..10 {
                let g = random_invertible(&mut rng, 2, 4);
                let h = random_invertible(&mut rng, 2, 4);
                let gh = g.compose(&h).unwrap();
                assert_eq!(
                    rep.evaluate(&g).unwrap().mul(&rep.evaluate(&h).unwrap()).unwrap(),
                    rep.evaluate(&gh).unwrap()
                );
            }
        }
        for n in [2usize, 3, 4] {
            let rep = Representation::conj_sln(n).unwrap();
            for _ in 0..5 {
                let g = random_invertible(&mut rng, n, 3);
                let h = random_invertible(&mut rng, n, 3);
                let gh = g.compose(&h).unwrap();
                assert_eq!(
                    rep.evaluate(&g).unwrap().mul(&rep.evaluate(&h).unwrap()).unwrap(),
                    rep.evaluate(&gh).unwrap()
                );
            }
        }
    }

    #[test]
    fn conjugation_differential_is_the_commutator() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 4] {
            let rep = Representation::conj_mn(n).unwrap();
            let coord = Coordinatization::mn(n);
            for _ in 0..10 {
                let x = RationalMatrix::from_rows(
                    (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-4..=4))).collect()).collect(),
                )
                .unwrap();
                let a = RationalMatrix::from_rows(
                    (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-4..=4))).collect()).collect(),
                )
                .unwrap();
                let lhs = rep.lie_evaluate(&x).unwrap().mul_vec(&coord.vector_of(&a).unwrap()).unwrap();
                let rhs = coord.vector_of(&x.commutator(&a).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn flip_conjugation_moves_unit_matrices() {
        let n = 3;
        let f = flip_matrix(n);
        let e12 = unit_matrix(n, 1, 2);
        let conj = f.matrix().mul(&e12).unwrap().mul(f.inverse_matrix()).unwrap();
        assert_eq!(conj, unit_matrix(n, 3, 2));
        // Index map agrees with matrix conjugation for random permutations.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [3usize, 5] {
            for _ in 0..10 {
                let mut images: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    images.swap(i, rng.gen_range(0..=i));
                }
                let p = Permutation::from_images(images).unwrap();
                let g = p.group_element();
                let (i, j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
                let conj = g.matrix().mul(&unit_matrix(n, i, j)).unwrap().mul(g.inverse_matrix()).unwrap();
                assert_eq!(conj, unit_matrix(n, p.apply(i - 1) + 1, p.apply(j - 1) + 1));
            }
        }
    }

    #[test]
    fn flip_bracket_values() {
        // [F, E_ij] = E_{n+1-i,j} - E_{i,n+1-j}; the reversed-order bracket
        // differs by sign, and both span the same line.
        let n = 4;
        let f = flip_matrix(n).matrix().clone();
        for i in 1..=n {
            for j in 1..=n {
                let e = unit_matrix(n, i, j);
                let want = unit_matrix(n, n + 1 - i, j).sub(&unit_matrix(n, i, n + 1 - j)).unwrap();
                assert_eq!(f.commutator(&e).unwrap(), want);
            }
        }
    }

    #[test]
    fn elementary_product_is_the_ones_upper_triangle() {
        let g = elementary_product(3);
        assert_eq!(
            g.matrix(),
            &RationalMatrix::from_i64_rows(&[&[1, 1, 1], &[0, 1, 1], &[0, 0, 1]])
        );
        let g5 = elementary_product(5);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(*g5.matrix().at(i, j), if i <= j { rat(1) } else { rat(0) });
            }
        }
    }

    #[test]
    fn unipotent_shift_at_zero_is_identity() {
        assert!(unipotent_shift(&rat(0)).matrix().is_identity());
        let s = unipotent_shift(&ratio(3, 2));
        assert!(s.matrix().mul(s.inverse_matrix()).unwrap().is_identity());
    }

    #[test]
    fn coordinatization_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for n in [2usize, 3, 5] {
            let sln = Coordinatization::sln(n);
            assert_eq!(sln.dim(), n * n - 1);
            for _ in 0..10 {
                // Random traceless matrix.
                let mut m = RationalMatrix::from_rows(
                    (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-5..=5))).collect()).collect(),
                )
                .unwrap();
                let mut diag_sum = Rational::zero();
                for i in 0..n - 1 {
                    diag_sum += m.at(i, i);
                }
                *m.at_mut(n - 1, n - 1) = -diag_sum;
                let v = sln.vector_of(&m).unwrap();
                assert_eq!(sln.matrix_of(&v).unwrap(), m);
            }
            // First coordinate is the (1,2) slot.
            let v = sln.vector_of(&unit_matrix(n, 1, 2)).unwrap();
            assert!(v[0].is_one() && v[1..].iter().all(Zero::is_zero));
            assert_eq!(sln.off_diag_index(1, 2), 0);

            let mn = Coordinatization::mn(n);
            assert_eq!(mn.dim(), n * n);
            let m = RationalMatrix::identity(n);
            assert_eq!(mn.matrix_of(&mn.vector_of(&m).unwrap()).unwrap(), m);
        }
        // Nonzero trace is rejected for sl_n coordinates.
        assert!(Coordinatization::sln(2).vector_of(&RationalMatrix::identity(2)).is_err());
    }

    #[test]
    fn descriptors_round_trip() {
        for rep in [
            Representation::sl2_irrep(8),
            Representation::conj_sln(4).unwrap(),
            Representation::conj_mn(2).unwrap(),
            Representation::ConjMnPower { n: 2, copies: 2 },
            Representation::standard(2),
        ] {
            let d = rep.descriptor();
            let back = Representation::from_descriptor(&d).unwrap();
            assert_eq!(back.descriptor(), d);
            assert_eq!(back.dim_v(), rep.dim_v());
        }
        let conj = Representation::conjugated(
            Representation::sl2_irrep(1),
            RationalMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]),
        )
        .unwrap();
        let back = Representation::from_descriptor(&conj.descriptor()).unwrap();
        assert_eq!(back.descriptor(), conj.descriptor());
    }

    #[test]
    fn apply_translates_row_spans() {
        // Conjugating span{E_12} in sl_2 by the flip gives span{E_21}.
        let rep = Representation::conj_sln(2).unwrap();
        let coord = Coordinatization::sln(2);
        let u = Subspace::from_rows(3, vec![coord.vector_of(&unit_matrix(2, 1, 2)).unwrap()]).unwrap();
        let image = translate(&rep, &flip_matrix(2), &u).unwrap();
        assert!(image.contains_vector(&coord.vector_of(&unit_matrix(2, 2, 1)).unwrap()));
        assert_eq!(image.dim(), 1);
    }
}
