//! Exact rational linear algebra.
//!
//! Matrices hold arbitrary-precision rationals.  Row reduction is
//! fraction-free (Bareiss) on integer-cleared rows followed by a
//! normalization pass, so intermediate entry growth stays polynomial.
//! Subspaces store their reduced row echelon basis, which is canonical:
//! two subspaces are equal iff their stored bases are identical, so
//! equality is plain comparison and serialized forms are stable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// p/q as a rational.  Panics on q = 0.
pub fn ratio(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse "p/q" or "p".
pub fn parse_rational(s: &str) -> Result<Rational> {
    BigRational::from_str(s.trim()).map_err(|e| Error::Parse(format!("rational '{s}': {e}")))
}

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(RationalMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
            .expect("rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<Rational> {
        self.row(r).to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("add".into()));
        }
        let entries =
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(RationalMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("sub".into()));
        }
        let entries =
            self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(RationalMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if !b.is_zero() {
                        let v = out.at_mut(r, c);
                        *v += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch("mul_vec".into()));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// [self, other] = self*other - other*self.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i).clone()).sum()
    }

    /// Stack two matrices with equal column counts.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(RationalMatrix { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Place two matrices with equal row counts side by side.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(r, c) = self.at(r, c).clone();
            }
            for c in 0..other.cols {
                *out.at_mut(r, self.cols + c) = other.at(r, c).clone();
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and rank.  Fraction-free forward elimination
    /// on integer-cleared rows, then an exact normalization pass.
    pub fn rref(&self) -> (RationalMatrix, usize) {
        // Clear denominators row by row; row scaling preserves the row space.
        let mut int_rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let ints: Vec<BigInt> =
                    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
                primitive_part(ints)
            })
            .collect();

        let (rows, cols) = (self.rows, self.cols);
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0usize;
        for c in 0..cols {
            if r >= rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !int_rows[i][c].is_zero()) else {
                continue;
            };
            int_rows.swap(r, p);
            let pivot = int_rows[r][c].clone();
            for i in r + 1..rows {
                let lead = std::mem::replace(&mut int_rows[i][c], BigInt::zero());
                if lead.is_zero() && pivot.is_one() && prev.is_one() {
                    continue;
                }
                for j in c + 1..cols {
                    let t = &pivot * &int_rows[i][j] - &lead * &int_rows[r][j];
                    int_rows[i][j] = &t / &prev;
                }
            }
            prev = pivot;
            pivots.push((r, c));
            r += 1;
        }
        let rank = pivots.len();

        // Normalize the echelon form: unit pivots, zeros above each pivot.
        let mut out: Vec<Vec<Rational>> = int_rows
            .into_iter()
            .take(rank)
            .map(|row| row.into_iter().map(BigRational::from_integer).collect())
            .collect();
        for &(pr, pc) in pivots.iter().rev() {
            let inv = out[pr][pc].clone();
            for j in pc..cols {
                let v = std::mem::take(&mut out[pr][j]);
                out[pr][j] = v / &inv;
            }
            for i in 0..pr {
                let factor = out[i][pc].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in pc..cols {
                    let sub = &out[pr][j] * &factor;
                    out[i][j] -= sub;
                }
            }
        }
        for _ in rank..rows {
            out.push(vec![Rational::zero(); cols]);
        }
        (RationalMatrix::from_rows(out).expect("rectangular"), rank)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Right null space {v : Mv = 0} as a canonical subspace of dimension
    /// cols - rank.
    pub fn kernel(&self) -> Subspace {
        let (rr, rank) = self.rref();
        let mut pivot_cols = Vec::with_capacity(rank);
        let mut c = 0;
        for r in 0..rank {
            while c < self.cols && rr.at(r, c).is_zero() {
                c += 1;
            }
            pivot_cols.push(c);
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -rr.at(r, f).clone();
            }
            basis.push(v);
        }
        Subspace::from_rows(self.cols, basis).expect("kernel vectors fit ambient")
    }

    /// Exact inverse via row reduction of [M | I].
    pub fn inverse(&self) -> Result<RationalMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n))?;
        let (rr, rank) = aug.rref();
        if rank < n || (0..n).any(|i| !(rr.at(i, i).is_one())) {
            return Err(Error::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                *inv.at_mut(r, c) = rr.at(r, n + c).clone();
            }
        }
        Ok(inv)
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("det of non-square".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        // Track the common row scaling introduced by denominator clearing.
        let mut scale = Rational::one();
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|r| {
                let row = self.row(r);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                scale *= BigRational::from_integer(lcm.clone());
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                m.swap(c, p);
                sign = -sign;
            }
            let pivot = m[c][c].clone();
            for i in c + 1..n {
                let lead = std::mem::replace(&mut m[i][c], BigInt::zero());
                for j in c + 1..n {
                    let t = &pivot * &m[i][j] - &lead * &m[c][j];
                    m[i][j] = &t / &prev;
                }
            }
            prev = pivot;
        }
        let det_int = BigRational::from_integer(m[n - 1][n - 1].clone());
        let det = det_int / scale;
        Ok(if sign < 0 { -det } else { det })
    }
}

fn primitive_part(mut row: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &row {
        g = g.gcd(x);
        if g.is_one() {
            return row;
        }
    }
    if g.is_zero() || g.is_one() {
        return row;
    }
    for x in &mut row {
        *x = &*x / &g;
    }
    row
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// Matrices serialize as an array of arrays of "p/q" strings (exact
// round-trip; integers print without the "/1").
impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed: std::result::Result<Vec<Vec<Rational>>, D::Error> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s).map_err(|e| D::Error::custom(e.to_string())))
                    .collect()
            })
            .collect();
        RationalMatrix::from_rows(parsed?).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// A linear subspace of Q^n held by its reduced row echelon basis.
/// The stored basis is canonical, so derived equality is subspace equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: RationalMatrix, // dim x ambient, RREF, no zero rows
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: RationalMatrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: RationalMatrix::identity(ambient) }
    }

    /// Span of the given row vectors.
    pub fn from_rows(ambient: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "subspace rows must have length {ambient}"
            )));
        }
        let m = RationalMatrix::from_rows(rows)?;
        Ok(Self::from_matrix_rows(ambient, &m))
    }

    /// Span of the rows of a matrix with `ambient` columns.
    pub fn from_matrix_rows(ambient: usize, m: &RationalMatrix) -> Self {
        assert!(m.rows == 0 || m.cols == ambient, "ambient mismatch");
        let (rr, rank) = m.rref();
        let basis = RationalMatrix {
            rows: rank,
            cols: ambient,
            entries: rr.entries[..rank * ambient].to_vec(),
        };
        Subspace { ambient, basis }
    }

    pub fn line(v: Vec<Rational>) -> Self {
        let n = v.len();
        Self::from_rows(n, vec![v]).expect("consistent")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Canonical RREF basis, one vector per row.
    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|r| self.basis.row_vec(r)).collect()
    }

    /// Reduce v against the basis; contained iff the residual vanishes.
    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient mismatch");
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Residual of v after elimination by the pivot rows.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        let mut c = 0usize;
        for r in 0..self.dim() {
            while c < self.ambient && self.basis.at(r, c).is_zero() {
                c += 1;
            }
            if c >= self.ambient {
                break;
            }
            if !v[c].is_zero() {
                let factor = v[c].clone();
                for j in c..self.ambient {
                    let sub = self.basis.at(r, j) * &factor;
                    v[j] -= sub;
                }
            }
        }
        v
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        (0..other.dim()).all(|r| self.contains_vector(other.basis.row(r)))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        let stacked = self.basis.vstack(&other.basis).expect("same ambient");
        Self::from_matrix_rows(self.ambient, &stacked)
    }

    /// Sum of many subspaces with a single reduction.
    pub fn sum_of(ambient: usize, parts: &[&Subspace]) -> Subspace {
        let mut rows = Vec::new();
        for p in parts {
            assert_eq!(p.ambient, ambient, "ambient mismatch");
            rows.extend(p.basis_rows());
        }
        Subspace::from_rows(ambient, rows).expect("consistent")
    }

    /// Zassenhaus: row reduce [A|A; B|0]; rows with vanishing left half
    /// carry an intersection basis on the right.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        let n = self.ambient;
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(self.dim() + other.dim());
        for r in 0..self.dim() {
            let mut row = self.basis.row_vec(r);
            row.extend(self.basis.row_vec(r));
            rows.push(row);
        }
        for r in 0..other.dim() {
            let mut row = other.basis.row_vec(r);
            row.extend(vec![Rational::zero(); n]);
            rows.push(row);
        }
        let m = RationalMatrix::from_rows(rows).expect("rectangular");
        let (rr, rank) = m.rref();
        let mut inter_rows = Vec::new();
        for r in 0..rank {
            if rr.row(r)[..n].iter().all(Zero::is_zero) {
                inter_rows.push(rr.row(r)[n..].to_vec());
            }
        }
        Subspace::from_rows(n, inter_rows).expect("consistent")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Subspace", 2)?;
        st.serialize_field("ambient_dim", &self.ambient)?;
        st.serialize_field("basis", &self.basis)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            ambient_dim: usize,
            basis: RationalMatrix,
        }
        let raw = Raw::deserialize(d)?;
        if raw.basis.rows() > 0 && raw.basis.cols() != raw.ambient_dim {
            return Err(D::Error::custom("basis width differs from ambient dimension"));
        }
        // Re-canonicalize on input so tampered files cannot smuggle a
        // non-canonical basis past equality checks.
        Ok(Subspace::from_matrix_rows(raw.ambient_dim, &raw.basis))
    }
}

/// Floating-point rank with an SVD tolerance; used only for large stress
/// runs, never for certification.
pub fn float_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
    m.svd(false, false).singular_values.iter().filter(|s| **s > tol).count()
}

/// Convert an exact matrix to floats (for reporting / stress paths).
pub fn to_float_rows(m: &RationalMatrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|x| {
                    let n = x.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
                    let d = x.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
                    n / d
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    /// Independent oracle: plain rational Gaussian elimination, no Bareiss.
    fn naive_rank(rows: &[Vec<Rational>]) -> usize {
        let mut m: Vec<Vec<Rational>> = rows.to_vec();
        if m.is_empty() {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][c].clone();
            for j in 0..cols {
                let v = std::mem::take(&mut m[rank][j]);
                m[rank][j] = v / &inv;
            }
            for i in 0..m.len() {
                if i != rank && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..cols {
                        let sub = &m[rank][j] * &f;
                        m[i][j] -= sub;
                    }
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    /// Independent oracle: determinant by cofactor expansion.
    fn cofactor_det(m: &RationalMatrix) -> Rational {
        let n = m.rows();
        assert_eq!(n, m.cols());
        if n == 0 {
            return Rational::one();
        }
        if n == 1 {
            return m.at(0, 0).clone();
        }
        let mut det = Rational::zero();
        for c in 0..n {
            if m.at(0, c).is_zero() {
                continue;
            }
            let mut minor = RationalMatrix::zeros(n - 1, n - 1);
            for r in 1..n {
                let mut cc = 0;
                for c2 in 0..n {
                    if c2 == c {
                        continue;
                    }
                    *minor.at_mut(r - 1, cc) = m.at(r, c2).clone();
                    cc += 1;
                }
            }
            let term = m.at(0, c) * &cofactor_det(&minor);
            if c % 2 == 0 {
                det += term;
            } else {
                det -= term;
            }
        }
        det
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, h: i64) -> RationalMatrix {
        RationalMatrix::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| rat(rng.gen_range(-h..=h))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rref_of_identity_is_identity() {
        let (rr, rank) = RationalMatrix::identity(4).rref();
        assert!(rr.is_identity());
        assert_eq!(rank, 4);
    }

    #[test]
    fn rref_collapses_dependent_rows() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let (rr, rank) = m.rref();
        assert_eq!(rank, 1);
        assert_eq!(rr, RationalMatrix::from_i64_rows(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn rank_three_matrix_matches_cofactor_oracle() {
        let m = RationalMatrix::from_i64_rows(&[&[0, 0, 1], &[1, 2, 1], &[4, 4, 1]]);
        // Cofactor oracle value, frozen: expansion along the first row gives
        // 1 * (1*4 - 2*4) = -4.
        assert_eq!(cofactor_det(&m), rat(-4));
        assert_eq!(m.det().unwrap(), rat(-4));
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn subspace_basis_is_canonical() {
        let s = Subspace::from_rows(3, vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(1), rat(0)]])
            .unwrap();
        // Canonical basis of span{e1+e2, e2} is {e1, e2}.
        assert_eq!(s.basis(), &RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0]]));
        let t = Subspace::from_rows(3, vec![vec![rat(1), rat(0), rat(0)], vec![rat(5), rat(7), rat(0)]])
            .unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn zero_subspace_has_dim_zero() {
        assert_eq!(Subspace::zero(5).dim(), 0);
        let z = Subspace::from_rows(4, vec![vec![rat(0); 4]]).unwrap();
        assert_eq!(z.dim(), 0);
        assert_eq!(z, Subspace::zero(4));
    }

    #[test]
    fn nine_random_rows_in_dim_eight_have_rank_eight() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let m = random_matrix(&mut rng, 9, 8, 10);
        assert_eq!(m.rank(), 8);
        assert_eq!(naive_rank(&(0..9).map(|r| m.row_vec(r)).collect::<Vec<_>>()), 8);
    }

    #[test]
    fn intersect_of_coordinate_planes() {
        let a = Subspace::from_rows(3, vec![vec![rat(1), rat(0), rat(0)], vec![rat(0), rat(1), rat(0)]])
            .unwrap();
        let b = Subspace::from_rows(3, vec![vec![rat(0), rat(1), rat(0)], vec![rat(0), rat(0), rat(1)]])
            .unwrap();
        let i = a.intersect(&b);
        assert_eq!(i.dim(), 1);
        assert!(i.contains_vector(&[rat(0), rat(1), rat(0)]));
    }

    #[test]
    fn grassmann_dimension_formula_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let da = rng.gen_range(0..=n);
            let db = rng.gen_range(0..=n);
            let a = Subspace::from_matrix_rows(n, &random_matrix(&mut rng, da, n, 5));
            let b = Subspace::from_matrix_rows(n, &random_matrix(&mut rng, db, n, 5));
            let sum = a.sum(&b);
            let inter = a.intersect(&b);
            assert_eq!(sum.dim() + inter.dim(), a.dim() + b.dim());
            assert!(sum.contains_subspace(&a) && sum.contains_subspace(&b));
            assert!(a.contains_subspace(&inter) && b.contains_subspace(&inter));
            // Cross-check dims against the naive elimination oracle.
            let mut stacked = a.basis_rows();
            stacked.extend(b.basis_rows());
            assert_eq!(naive_rank(&stacked), sum.dim());
        }
    }

    #[test]
    fn kernel_dimension_complements_rank() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.dim(), 2);
        for r in 0..k.dim() {
            let v = k.basis().row_vec(r);
            assert!(m.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = RationalMatrix::from_i64_rows(&[&[2, 1, 0], &[1, 1, 1], &[0, 3, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut m = RationalMatrix::zeros(2, 2);
        *m.at_mut(0, 0) = ratio(-3, 7);
        *m.at_mut(0, 1) = Rational::new(
            BigInt::parse_bytes(b"1000000000000000000000000000000", 10).unwrap(),
            BigInt::from(7),
        );
        *m.at_mut(1, 0) = rat(0);
        *m.at_mut(1, 1) = rat(12);
        let s = serde_json::to_string(&m).unwrap();
        let back: RationalMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);

        let sub = Subspace::from_rows(2, vec![vec![ratio(1, 2), rat(3)]]).unwrap();
        let s = serde_json::to_string(&sub).unwrap();
        let back: Subspace = serde_json::from_str(&s).unwrap();
        assert_eq!(sub, back);
    }

    #[test]
    fn float_rank_matches_exact_on_well_conditioned_input() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 0, 2], &[0, 1, 1], &[1, 1, 3]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(float_rank(&to_float_rows(&m), 1e-9), 2);
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in 0u64..500) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..=5);
            let c = rng.gen_range(1..=5);
            let m = random_matrix(&mut rng, r, c, 7);
            let (rr, rank) = m.rref();
            let (rr2, rank2) = rr.rref();
            prop_assert_eq!(rank, rank2);
            prop_assert_eq!(rr, rr2);
        }

        #[test]
        fn rank_equals_rank_of_transpose(seed in 0u64..500) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..=6);
            let c = rng.gen_range(1..=6);
            let m = random_matrix(&mut rng, r, c, 9);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn span_is_invariant_under_row_scaling_and_permutation(seed in 0u64..300) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=5);
            let d = rng.gen_range(1..=n);
            let m = random_matrix(&mut rng, d, n, 6);
            let s1 = Subspace::from_matrix_rows(n, &m);
            let mut rows = (0..d).map(|r| m.row_vec(r)).collect::<Vec<_>>();
            rows.reverse();
            for row in rows.iter_mut() {
                let k = rat(rng.gen_range(1..=4));
                for x in row.iter_mut() {
                    *x *= &k;
                }
            }
            let s2 = Subspace::from_rows(n, rows).unwrap();
            prop_assert_eq!(s1, s2);
        }
    }
}
