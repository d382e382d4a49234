//! Equivariant polynomial maps: exact evaluation and Jacobians, images
//! of derivatives, the doubled covering bound, and the subrepresentation
//! obstruction.
//!
//! The covering bound rests on two exact facts that are replayed, plus
//! one accepted theorem that is not: the image of the derivative moves
//! equivariantly, and the k-fold sum map's derivative at a translated
//! tuple is the stacked Jacobian (both checked by rank computations);
//! a dominant polynomial image added to itself covers everything (the
//! doubling factor 2, taken on faith).  Certificates therefore record
//! the inner diameter witnesses and the full-rank stacked Jacobian, and
//! `bound` is twice the inner value.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exactlin::{parse_rational, rat, ratio, Rational, RationalMatrix, Subspace};
use crate::groupdiam::{
    diameter, generated_module, verify, CertKind, Certificate, DiamValue, DiameterResult,
};
use crate::poly::{parse_trace_expr, MultiPoly, TraceExpr};
use crate::repkit::{GroupElement, Permutation, Representation};
use crate::{Error, Result};

/// A polynomial map between representation spaces of one group, with
/// the coordinate polynomials written in the target's basis.  The
/// intertwining identity f(lambda(g) w) = rho(g) f(w) is sampled at
/// construction (20 pairs) and construction fails if any sample breaks.
#[derive(Clone, Debug)]
pub struct PolyMap {
    name: String,
    source_rep: Representation,
    target_rep: Representation,
    coords: Vec<MultiPoly>,
    partials: Vec<Vec<MultiPoly>>,
}

fn random_group_element(rng: &mut impl Rng, n: usize) -> Result<GroupElement> {
    for _ in 0..200 {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *m.at_mut(i, j) = rat(rng.gen_range(-2..=2));
            }
        }
        if let Ok(g) = GroupElement::new(m) {
            return Ok(g);
        }
    }
    Err(Error::InvalidArgument("no invertible sample found".into()))
}

impl PolyMap {
    pub fn new(
        name: impl Into<String>,
        source_rep: Representation,
        target_rep: Representation,
        coords: Vec<MultiPoly>,
    ) -> Result<Self> {
        let dim_w = source_rep.dim_v();
        let dim_v = target_rep.dim_v();
        if source_rep.group_size() != target_rep.group_size() {
            return Err(Error::DimensionMismatch("source and target act for one group".into()));
        }
        if coords.len() != dim_v {
            return Err(Error::DimensionMismatch("one coordinate polynomial per target dimension".into()));
        }
        if coords.iter().any(|p| p.nvars() != dim_w) {
            return Err(Error::DimensionMismatch("coordinates must use the source variables".into()));
        }
        let partials = coords
            .iter()
            .map(|p| (0..dim_w).map(|j| p.partial(j)).collect())
            .collect();
        let map = PolyMap { name: name.into(), source_rep, target_rep, coords, partials };
        // Sampled intertwining check; deterministic, so a map that
        // constructs once constructs always.
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
        for _ in 0..20 {
            let g = random_group_element(&mut rng, map.source_rep.group_size())?;
            let w: Vec<Rational> =
                (0..dim_w).map(|_| rat(rng.gen_range(-3..=3))).collect();
            let lam = map.source_rep.evaluate(&g)?;
            let rho = map.target_rep.evaluate(&g)?;
            let lhs = map.eval(&lam.mul_vec(&w)?)?;
            let rhs = rho.mul_vec(&map.eval(&w)?)?;
            if lhs != rhs {
                return Err(Error::Verification(format!(
                    "map '{}' is not equivariant at a sampled pair",
                    map.name
                )));
            }
        }
        Ok(map)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_w(&self) -> usize {
        self.source_rep.dim_v()
    }

    pub fn dim_v(&self) -> usize {
        self.target_rep.dim_v()
    }

    pub fn source_rep(&self) -> &Representation {
        &self.source_rep
    }

    pub fn target_rep(&self) -> &Representation {
        &self.target_rep
    }

    pub fn coords(&self) -> &[MultiPoly] {
        &self.coords
    }

    pub fn eval(&self, w: &[Rational]) -> Result<Vec<Rational>> {
        if w.len() != self.dim_w() {
            return Err(Error::DimensionMismatch("point length".into()));
        }
        self.coords.iter().map(|p| p.eval(w)).collect()
    }

    pub fn eval_f64(&self, w: &[f64]) -> Vec<f64> {
        self.coords.iter().map(|p| p.eval_f64(w)).collect()
    }

    /// Matrix of partial derivatives at w: dim_V rows, dim_W columns.
    pub fn jacobian(&self, w: &[Rational]) -> Result<RationalMatrix> {
        if w.len() != self.dim_w() {
            return Err(Error::DimensionMismatch("point length".into()));
        }
        let mut m = RationalMatrix::zeros(self.dim_v(), self.dim_w());
        for (i, row) in self.partials.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                *m.at_mut(i, j) = p.eval(w)?;
            }
        }
        Ok(m)
    }

    pub fn jacobian_f64(&self, w: &[f64]) -> Vec<Vec<f64>> {
        self.partials
            .iter()
            .map(|row| row.iter().map(|p| p.eval_f64(w)).collect())
            .collect()
    }
}

/// Column span of the Jacobian at w.
pub fn derivative_image(f: &PolyMap, w: &[Rational]) -> Result<Subspace> {
    let jac = f.jacobian(w)?;
    let rows: Vec<Vec<Rational>> =
        (0..f.dim_w()).map(|j| (0..f.dim_v()).map(|i| jac.at(i, j).clone()).collect()).collect();
    Subspace::from_rows(f.dim_v(), rows)
}

/// Exact check of the containment
/// im(D_w f) >= rho(g^-1) . im(D_g rho) . f(w):
/// the right side is spanned by rho(g)^-1 lie(x) rho(g) f(w) over the Lie
/// basis, since curves through g are left translates of curves through
/// the identity.  Always true for an equivariant f; a false return
/// flags an implementation bug.
pub fn derivative_containment_check(f: &PolyMap, w: &[Rational], g: &GroupElement) -> Result<bool> {
    let fw = f.eval(w)?;
    let rho_g = f.target_rep.evaluate(g)?;
    let rho_g_inv = f.target_rep.evaluate(&g.inverse_element())?;
    let moved = rho_g.mul_vec(&fw)?;
    let rows: Vec<Vec<Rational>> = f
        .target_rep
        .lie_basis()
        .iter()
        .map(|x| {
            let tangent = f.target_rep.lie_evaluate(x)?.mul_vec(&moved)?;
            rho_g_inv.mul_vec(&tangent)
        })
        .collect::<Result<_>>()?;
    let rhs = Subspace::from_rows(f.dim_v(), rows)?;
    Ok(derivative_image(f, w)?.contains_subspace(&rhs))
}

// Base points serialize like matrix entries: exact "p/q" strings.
mod point_serde {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: serde::Serializer>(
        v: &[Rational],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        serde::Serialize::serialize(&strings, s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let strings: Vec<String> = serde::Deserialize::deserialize(d)?;
        strings
            .iter()
            .map(|s| parse_rational(s).map_err(|e| D::Error::custom(e.to_string())))
            .collect()
    }
}

/// Covering bound artifact: the inner group-diameter certificate for
/// im(D_w f) plus the replayed full-rank stacked Jacobian, doubled.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaringCertificate {
    pub schema: u32,
    pub map: String,
    #[serde(with = "point_serde")]
    pub base_point: Vec<Rational>,
    pub k_jacobian: usize,
    pub bound: usize,
    pub inner: Certificate,
    pub inputs_digest: String,
}

impl WaringCertificate {
    pub fn compute_digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("certificate serializes");
        v.as_object_mut().expect("certificate is an object").remove("inputs_digest");
        let payload = serde_json::to_string(&v).expect("canonical payload");
        let mut hasher = Sha256::new();
        hasher.update(payload.as_bytes());
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn seal(mut self) -> Self {
        self.inputs_digest = self.compute_digest();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[derive(Debug)]
pub enum WaringOutcome {
    /// Finite certified bound.
    Bounded(WaringCertificate),
    /// The derivative image generates a proper submodule; no tuple of
    /// translates can ever cover, so no finite bound exists through
    /// this base point.  Carries the inner Infinite certificate.
    Obstructed(Certificate),
    /// Search budget exhausted without an upper witness.
    Inconclusive { lower: Certificate },
}

fn stacked_jacobian_rank(f: &PolyMap, w: &[Rational], witnesses: &[RationalMatrix]) -> Result<usize> {
    let mut rows = Vec::with_capacity(witnesses.len() * f.dim_w());
    for gm in witnesses {
        let g = GroupElement::new(gm.clone())?;
        let moved = f.source_rep.evaluate(&g)?.mul_vec(w)?;
        let jac = f.jacobian(&moved)?;
        for j in 0..f.dim_w() {
            rows.push((0..f.dim_v()).map(|i| jac.at(i, j).clone()).collect());
        }
    }
    Ok(Subspace::from_rows(f.dim_v(), rows)?.dim())
}

/// Bound the number of image points of f summing to an arbitrary target
/// through the group diameter of the derivative image at w.
pub fn waring_bound(f: &PolyMap, w: &[Rational], max_k: usize, seed: u64) -> Result<WaringOutcome> {
    let u = derivative_image(f, w)?;
    if u.dim() == 0 {
        return Err(Error::Precondition("the derivative vanishes at the base point".into()));
    }
    let inner = diameter(&f.target_rep, &u, max_k, seed)?;
    let upper = match inner {
        DiameterResult::Exact(c) if c.value == DiamValue::Infinite => {
            return Ok(WaringOutcome::Obstructed(c));
        }
        DiameterResult::Exact(c) => c,
        DiameterResult::Bounds { upper: Some(c), .. } => c,
        DiameterResult::Bounds { lower, upper: None } => {
            return Ok(WaringOutcome::Inconclusive { lower });
        }
    };
    let k = match upper.value {
        DiamValue::Finite(k) => k,
        DiamValue::Infinite => unreachable!("finite upper certificates carry finite values"),
    };
    let rank = stacked_jacobian_rank(f, w, &upper.witnesses)?;
    if rank != f.dim_v() {
        return Err(Error::Verification("stacked Jacobian is not of full rank".into()));
    }
    let cert = WaringCertificate {
        schema: 1,
        map: f.name.clone(),
        base_point: w.to_vec(),
        k_jacobian: k,
        bound: 2 * k,
        inner: upper,
        inputs_digest: String::new(),
    }
    .seal();
    verify_waring(&cert)?;
    Ok(WaringOutcome::Bounded(cert))
}

/// Full replay of a covering-bound certificate: digest, map identity,
/// derivative image, the inner diameter certificate, and the stacked
/// Jacobian rank.
pub fn verify_waring(cert: &WaringCertificate) -> Result<()> {
    let fail = |msg: &str| Err(Error::Verification(msg.into()));
    if cert.schema != 1 {
        return fail("unsupported schema");
    }
    if cert.inputs_digest != cert.compute_digest() {
        return fail("digest mismatch");
    }
    let map = from_map_descriptor(&cert.map)?;
    if cert.inner.rep != map.target_rep.descriptor() {
        return fail("inner certificate is for a different representation");
    }
    if cert.base_point.len() != map.dim_w() {
        return fail("base point length");
    }
    if cert.inner.subspace != derivative_image(&map, &cert.base_point)? {
        return fail("inner subspace is not the derivative image at the base point");
    }
    if !matches!(cert.inner.kind, CertKind::Exact | CertKind::UpperBound) {
        return fail("inner certificate must carry an upper witness");
    }
    verify(&cert.inner)?;
    match cert.inner.value {
        DiamValue::Finite(k) => {
            if cert.k_jacobian != k || cert.bound != 2 * k {
                return fail("bound does not match the inner value");
            }
        }
        DiamValue::Infinite => return fail("no finite bound follows from an infinite diameter"),
    }
    if stacked_jacobian_rank(&map, &cert.base_point, &cert.inner.witnesses)? != map.dim_v() {
        return fail("stacked Jacobian is not of full rank");
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub enum SubrepVerdict {
    /// span(im(f - f(0))) is all of V, exhibited by finitely many
    /// sample differences: a certificate.
    Clear { span_dim: usize },
    /// The samples stay inside a proper submodule; Z is the module the
    /// samples generate.  Evidence only: sampling cannot prove that the
    /// whole image stays inside Z.
    Trapped { trap: Subspace },
}

/// Probe whether the translated image spans the target, the only
/// obstacle to a finite covering bound.
pub fn subrep_obstruction(f: &PolyMap, samples: usize, seed: u64) -> Result<SubrepVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = f.eval(&vec![Rational::zero(); f.dim_w()])?;
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples {
        let w: Vec<Rational> = (0..f.dim_w()).map(|_| rat(rng.gen_range(-4..=4))).collect();
        let fw = f.eval(&w)?;
        rows.push(fw.iter().zip(f0.iter()).map(|(a, b)| a - b).collect());
    }
    let span = Subspace::from_rows(f.dim_v(), rows)?;
    if span.is_full() {
        Ok(SubrepVerdict::Clear { span_dim: span.dim() })
    } else {
        Ok(SubrepVerdict::Trapped { trap: generated_module(&f.target_rep, &span)? })
    }
}

fn binomial_i64(n: usize, k: usize) -> i64 {
    let mut c = 1i64;
    for i in 0..k.min(n - k) {
        c = c * (n - i) as i64 / (i + 1) as i64;
    }
    c
}

/// Degree-k orbit map of the plane: w = (s, t) to the coordinates of
/// (sX + tY)^k in the monomial basis, coordinate i = C(k,i) s^i t^(k-i).
pub fn sl2_orbit_map(k: usize) -> Result<PolyMap> {
    if k == 0 || k > 20 {
        return Err(Error::InvalidArgument("orbit map degree out of range".into()));
    }
    let coords = (0..=k)
        .map(|i| {
            MultiPoly::var(2, 0)
                .pow(i as u32)
                .mul(&MultiPoly::var(2, 1).pow((k - i) as u32))
                .expect("same arity")
                .scale(&rat(binomial_i64(k, i)))
        })
        .collect();
    PolyMap::new(
        format!("orbit:{k}"),
        Representation::standard(2),
        Representation::sl2_irrep(k),
        coords,
    )
}

/// The cubic curve (s,t) to (s^3, s^2 t, s t^2, t^3).  Without the
/// binomial weights the target basis is rescaled and reversed relative
/// to the degree-3 orbit map, so the target representation is the
/// conjugated one.
pub fn twisted_cubic() -> Result<PolyMap> {
    let s = MultiPoly::var(2, 0);
    let t = MultiPoly::var(2, 1);
    let coords = vec![
        s.pow(3),
        s.pow(2).mul(&t)?,
        s.mul(&t.pow(2))?,
        t.pow(3),
    ];
    let mut d = RationalMatrix::identity(4);
    *d.at_mut(1, 1) = ratio(1, 3);
    *d.at_mut(2, 2) = ratio(1, 3);
    let change = Permutation::reversal(4).matrix().mul(&d)?;
    PolyMap::new(
        "twisted_cubic",
        Representation::standard(2),
        Representation::conjugated(Representation::sl2_irrep(3), change)?,
        coords,
    )
}

fn mn_index(n: usize, v: usize, i: usize, j: usize) -> usize {
    v * n * n + i * n + j
}

/// X to X^2 on the full matrix space under conjugation.
pub fn square_map(n: usize) -> Result<PolyMap> {
    if n < 1 {
        return Err(Error::InvalidArgument("n >= 1".into()));
    }
    let nv = n * n;
    let mut coords = Vec::with_capacity(nv);
    for i in 0..n {
        for j in 0..n {
            let mut p = MultiPoly::zero(nv);
            for k in 0..n {
                p = p.add(
                    &MultiPoly::var(nv, mn_index(n, 0, i, k))
                        .mul(&MultiPoly::var(nv, mn_index(n, 0, k, j)))?,
                )?;
            }
            coords.push(p);
        }
    }
    PolyMap::new(
        format!("square:{n}"),
        Representation::conj_mn(n)?,
        Representation::conj_mn(n)?,
        coords,
    )
}

/// (X, Y) to I + XY - YX; every image point has trace n, so the
/// translated image spans only a coset of the traceless matrices.
pub fn comm_plus_identity(n: usize) -> Result<PolyMap> {
    if n < 2 {
        return Err(Error::InvalidArgument("n >= 2".into()));
    }
    let nv = 2 * n * n;
    let mut coords = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut p = if i == j {
                MultiPoly::constant(nv, rat(1))
            } else {
                MultiPoly::zero(nv)
            };
            for k in 0..n {
                let xy = MultiPoly::var(nv, mn_index(n, 0, i, k))
                    .mul(&MultiPoly::var(nv, mn_index(n, 1, k, j)))?;
                let yx = MultiPoly::var(nv, mn_index(n, 1, i, k))
                    .mul(&MultiPoly::var(nv, mn_index(n, 0, k, j)))?;
                p = p.add(&xy.sub(&yx)?)?;
            }
            coords.push(p);
        }
    }
    PolyMap::new(
        format!("comm_plus_identity:{n}"),
        Representation::ConjMnPower { n, copies: 2 },
        Representation::conj_mn(n)?,
        coords,
    )
}

fn word_entries(expr_vars: usize, n: usize, word: &[usize]) -> Result<Vec<Vec<MultiPoly>>> {
    let nv = expr_vars * n * n;
    let mut cur: Vec<Vec<MultiPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| MultiPoly::constant(nv, if i == j { rat(1) } else { Rational::zero() }))
                .collect()
        })
        .collect();
    for &v in word {
        let mut next: Vec<Vec<MultiPoly>> =
            (0..n).map(|_| (0..n).map(|_| MultiPoly::zero(nv)).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                let mut p = MultiPoly::zero(nv);
                for k in 0..n {
                    p = p.add(&cur[i][k].mul(&MultiPoly::var(nv, mn_index(n, v, k, j)))?)?;
                }
                next[i][j] = p;
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn trace_expr_coords(expr: &TraceExpr, n: usize) -> Result<Vec<MultiPoly>> {
    let m = expr.variable_count();
    let nv = m * n * n;
    let mut coords = vec![MultiPoly::zero(nv); n * n];
    for term in &expr.terms {
        let mut scalar = MultiPoly::constant(nv, term.coeff.clone());
        for trace_word in &term.traces {
            let entries = word_entries(m, n, trace_word)?;
            let mut tr = MultiPoly::zero(nv);
            for (i, row) in entries.iter().enumerate() {
                tr = tr.add(&row[i])?;
            }
            scalar = scalar.mul(&tr)?;
        }
        let entries = word_entries(m, n, &term.word)?;
        for i in 0..n {
            for j in 0..n {
                let c = scalar.mul(&entries[i][j])?;
                coords[i * n + j] = coords[i * n + j].add(&c)?;
            }
        }
    }
    Ok(coords)
}

/// A trace polynomial on m copies of the matrix space: sums of scalar
/// trace factors times matrix words, conjugation-equivariant by
/// construction.
pub fn trace_poly(n: usize, expression: &str) -> Result<PolyMap> {
    if n < 2 {
        return Err(Error::InvalidArgument("n >= 2".into()));
    }
    let expr = parse_trace_expr(expression)?;
    let m = expr.variable_count();
    if m == 0 {
        return Err(Error::InvalidArgument("expression uses no matrix variables".into()));
    }
    let coords = trace_expr_coords(&expr, n)?;
    PolyMap::new(
        format!("trace:{n}:{expression}"),
        Representation::ConjMnPower { n, copies: m },
        Representation::conj_mn(n)?,
        coords,
    )
}

/// Rebuild a builtin map from its certificate descriptor.
pub fn from_map_descriptor(s: &str) -> Result<PolyMap> {
    if s == "twisted_cubic" {
        return twisted_cubic();
    }
    let bad = || Error::Parse(format!("unknown map descriptor '{s}'"));
    if let Some(rest) = s.strip_prefix("orbit:") {
        return sl2_orbit_map(rest.parse().map_err(|_| bad())?);
    }
    if let Some(rest) = s.strip_prefix("square:") {
        return square_map(rest.parse().map_err(|_| bad())?);
    }
    if let Some(rest) = s.strip_prefix("comm_plus_identity:") {
        return comm_plus_identity(rest.parse().map_err(|_| bad())?);
    }
    if let Some(rest) = s.strip_prefix("trace:") {
        let (n, expr) = rest.split_once(':').ok_or_else(bad)?;
        return trace_poly(n.parse().map_err(|_| bad())?, expr);
    }
    Err(bad())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Random-restart Gauss-Newton search for points w_1..w_k with
/// f(w_1) + .. + f(w_k) = target.  Success-only evidence: Some holds a
/// decomposition with residual below 1e-9, None proves nothing.
pub fn numeric_decompose(
    f: &PolyMap,
    target: &[f64],
    k: usize,
    seed: u64,
) -> Option<Vec<Vec<f64>>> {
    if target.len() != f.dim_v() || k == 0 {
        return None;
    }
    let dim_w = f.dim_w();
    let dim_v = f.dim_v();
    let nv = k * dim_w;
    let residual = |z: &[f64]| -> Vec<f64> {
        let mut r = vec![0.0; dim_v];
        for c in 0..k {
            let fz = f.eval_f64(&z[c * dim_w..(c + 1) * dim_w]);
            for (ri, v) in r.iter_mut().zip(fz.iter()) {
                *ri += v;
            }
        }
        for (ri, t) in r.iter_mut().zip(target.iter()) {
            *ri -= t;
        }
        r
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _restart in 0..100 {
        let mut z: Vec<f64> = (0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut r = residual(&z);
        let mut rn = norm(&r);
        for _iter in 0..200 {
            if rn < 1e-9 {
                return Some(z.chunks(dim_w).map(|c| c.to_vec()).collect());
            }
            let mut jac = nalgebra::DMatrix::zeros(dim_v, nv);
            for c in 0..k {
                let block = f.jacobian_f64(&z[c * dim_w..(c + 1) * dim_w]);
                for i in 0..dim_v {
                    for j in 0..dim_w {
                        jac[(i, c * dim_w + j)] = block[i][j];
                    }
                }
            }
            let rhs = nalgebra::DVector::from_iterator(dim_v, r.iter().map(|x| -x));
            let svd = jac.svd(true, true);
            let step = match svd.solve(&rhs, 1e-12) {
                Ok(s) => s,
                Err(_) => break,
            };
            // Halve the step until the residual actually drops.
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand: Vec<f64> =
                    z.iter().zip(step.iter()).map(|(a, d)| a + scale * d).collect();
                let cr = residual(&cand);
                let crn = norm(&cr);
                if crn < rn {
                    z = cand;
                    r = cr;
                    rn = crn;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if rn < 1e-9 {
            return Some(z.chunks(dim_w).map(|c| c.to_vec()).collect());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::{apply, unit_matrix, Coordinatization};

    fn rats(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&v| rat(v)).collect()
    }

    #[test]
    fn twisted_cubic_values_and_jacobian() {
        let f = twisted_cubic().unwrap();
        assert_eq!(f.eval(&rats(&[1, 0])).unwrap(), rats(&[1, 0, 0, 0]));
        assert_eq!(f.eval(&rats(&[2, 1])).unwrap(), rats(&[8, 4, 2, 1]));
        let jac = f.jacobian(&rats(&[1, 0])).unwrap();
        assert_eq!(jac.at(0, 0), &rat(3));
        assert_eq!(jac.at(1, 1), &rat(1));
        let im = derivative_image(&f, &rats(&[1, 0])).unwrap();
        assert_eq!(im.dim(), 2);
        assert!(im.contains_vector(&rats(&[1, 0, 0, 0])));
        assert!(im.contains_vector(&rats(&[0, 1, 0, 0])));
        assert_eq!(derivative_image(&f, &rats(&[0, 0])).unwrap().dim(), 0);
    }

    #[test]
    fn orbit_map_matches_the_cubic_after_the_basis_change() {
        let cubic = twisted_cubic().unwrap();
        let orbit = sl2_orbit_map(3).unwrap();
        let mut d = RationalMatrix::identity(4);
        *d.at_mut(1, 1) = ratio(1, 3);
        *d.at_mut(2, 2) = ratio(1, 3);
        let m = Permutation::reversal(4).matrix().mul(&d).unwrap();
        for w in [[1i64, 0], [0, 1], [2, -1], [3, 5]] {
            let p = rats(&w);
            assert_eq!(
                cubic.eval(&p).unwrap(),
                m.mul_vec(&orbit.eval(&p).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn square_map_derivative_at_identity_doubles() {
        for n in 2..=3 {
            let f = square_map(n).unwrap();
            let id: Vec<Rational> =
                Coordinatization::mn(n).vector_of(&RationalMatrix::identity(n)).unwrap();
            let jac = f.jacobian(&id).unwrap();
            let mut twice = RationalMatrix::identity(n * n);
            for i in 0..n * n {
                *twice.at_mut(i, i) = rat(2);
            }
            assert_eq!(jac, twice);
            assert!(derivative_image(&f, &id).unwrap().is_full());
        }
    }

    #[test]
    fn equivariance_identity_holds_exactly() {
        let maps = vec![
            twisted_cubic().unwrap(),
            sl2_orbit_map(4).unwrap(),
            square_map(2).unwrap(),
            comm_plus_identity(2).unwrap(),
            trace_poly(2, "X1^2*X2").unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for f in &maps {
            for _ in 0..6 {
                let g = random_group_element(&mut rng, f.source_rep().group_size()).unwrap();
                let w: Vec<Rational> =
                    (0..f.dim_w()).map(|_| rat(rng.gen_range(-3..=3))).collect();
                let lam = f.source_rep().evaluate(&g).unwrap();
                let rho = f.target_rep().evaluate(&g).unwrap();
                // D_{lam(g)w} f . lam(g) = rho(g) . D_w f
                let lhs = f.jacobian(&lam.mul_vec(&w).unwrap()).unwrap().mul(&lam).unwrap();
                let rhs = rho.mul(&f.jacobian(&w).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "map {}", f.name());
                // Image equivariance.
                let moved = derivative_image(f, &lam.mul_vec(&w).unwrap()).unwrap();
                assert_eq!(moved, apply(&rho, &derivative_image(f, &w).unwrap()));
            }
        }
    }

    #[test]
    fn containment_of_orbit_tangents_in_derivative_images() {
        let maps = vec![
            twisted_cubic().unwrap(),
            sl2_orbit_map(5).unwrap(),
            square_map(2).unwrap(),
            trace_poly(2, "X1^2 - tr(X1)X1").unwrap(),
            comm_plus_identity(2).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for f in &maps {
            for _ in 0..8 {
                let g = random_group_element(&mut rng, f.source_rep().group_size()).unwrap();
                let w: Vec<Rational> =
                    (0..f.dim_w()).map(|_| rat(rng.gen_range(-3..=3))).collect();
                assert!(
                    derivative_containment_check(f, &w, &g).unwrap(),
                    "map {}",
                    f.name()
                );
            }
        }
        // Degenerate center: the commutator map sends 0 to the identity,
        // whose orbit tangent vanishes.
        let f = comm_plus_identity(2).unwrap();
        let zero = vec![Rational::zero(); f.dim_w()];
        assert!(derivative_containment_check(&f, &zero, &GroupElement::identity(2)).unwrap());
    }

    #[test]
    fn regular_semisimple_image_contains_the_off_diagonal() {
        // f(X1, X2) = X1^2 X2 at X1 = diag(1,2,3), X2 = I has the
        // regular semisimple value diag(1,4,9), so the derivative image
        // contains every off-diagonal direction.
        let f = trace_poly(3, "X1^2*X2").unwrap();
        let coord = Coordinatization::mn(3);
        let mut w = coord.vector_of(&RationalMatrix::from_i64_rows(&[
            &[1, 0, 0],
            &[0, 2, 0],
            &[0, 0, 3],
        ])).unwrap();
        w.extend(coord.vector_of(&RationalMatrix::identity(3)).unwrap());
        let fw = f.eval(&w).unwrap();
        assert_eq!(coord.matrix_of(&fw).unwrap(), RationalMatrix::from_i64_rows(&[
            &[1, 0, 0],
            &[0, 4, 0],
            &[0, 0, 9],
        ]));
        let im = derivative_image(&f, &w).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                if i != j {
                    let v = coord.vector_of(&unit_matrix(3, i, j)).unwrap();
                    assert!(im.contains_vector(&v), "E{i}{j} missing");
                }
            }
        }
    }

    #[test]
    fn waring_bound_for_the_cubic_is_four() {
        let f = twisted_cubic().unwrap();
        let outcome = waring_bound(&f, &rats(&[1, 0]), 6, 17).unwrap();
        let cert = match outcome {
            WaringOutcome::Bounded(c) => c,
            other => panic!("expected a bound, got {other:?}"),
        };
        assert_eq!(cert.k_jacobian, 2);
        assert_eq!(cert.bound, 4);
        verify_waring(&cert).unwrap();
        let json = cert.to_json();
        let back: WaringCertificate = serde_json::from_str(&json).unwrap();
        verify_waring(&back).unwrap();

        let mut tampered = cert.clone();
        tampered.bound = 6;
        assert!(verify_waring(&tampered).is_err());
        let resealed = tampered.seal();
        assert!(verify_waring(&resealed).is_err());
        let mut moved = cert.clone();
        moved.base_point = rats(&[0, 1]);
        let moved = moved.seal();
        assert!(verify_waring(&moved).is_err());
    }

    #[test]
    fn waring_bound_for_squares_is_two() {
        let f = square_map(2).unwrap();
        let id = Coordinatization::mn(2).vector_of(&RationalMatrix::identity(2)).unwrap();
        match waring_bound(&f, &id, 4, 3).unwrap() {
            WaringOutcome::Bounded(c) => {
                assert_eq!(c.k_jacobian, 1);
                assert_eq!(c.bound, 2);
                verify_waring(&c).unwrap();
            }
            other => panic!("expected a bound, got {other:?}"),
        }
    }

    #[test]
    fn orbit_map_chain_of_bounds() {
        for k in 3..=6 {
            let f = sl2_orbit_map(k).unwrap();
            let w = rats(&[1, 0]);
            match waring_bound(&f, &w, 8, 5).unwrap() {
                WaringOutcome::Bounded(c) => {
                    let want = (k + 1).div_ceil(2);
                    assert_eq!(c.k_jacobian, want, "k={k}");
                    assert_eq!(c.bound, 2 * want, "k={k}");
                }
                other => panic!("expected a bound for k={k}, got {other:?}"),
            }
        }
    }

    #[test]
    fn commutator_shift_is_obstructed() {
        let f = comm_plus_identity(2).unwrap();
        // Image points all have trace 2.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coord = Coordinatization::mn(2);
        for _ in 0..10 {
            let w: Vec<Rational> = (0..f.dim_w()).map(|_| rat(rng.gen_range(-4..=4))).collect();
            let img = coord.matrix_of(&f.eval(&w).unwrap()).unwrap();
            assert_eq!(img.trace(), rat(2));
        }
        // The sampled differences stay inside the traceless subspace.
        match subrep_obstruction(&f, 12, 7).unwrap() {
            SubrepVerdict::Trapped { trap } => {
                assert_eq!(trap.dim(), 3);
                for row in trap.basis_rows() {
                    assert!(coord.matrix_of(&row).unwrap().trace().is_zero());
                }
            }
            SubrepVerdict::Clear { .. } => panic!("the commutator shift cannot span"),
        }
        // And the covering bound is obstructed by the same trap.
        let mut w = vec![Rational::zero(); f.dim_w()];
        w[1] = rat(1);
        w[4 + 2] = rat(1);
        match waring_bound(&f, &w, 4, 11).unwrap() {
            WaringOutcome::Obstructed(inner) => {
                assert_eq!(inner.value, DiamValue::Infinite);
                verify(&inner).unwrap();
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
    }

    #[test]
    fn spanning_maps_come_back_clear() {
        let f = square_map(2).unwrap();
        match subrep_obstruction(&f, 12, 5).unwrap() {
            SubrepVerdict::Clear { span_dim } => assert_eq!(span_dim, 4),
            SubrepVerdict::Trapped { .. } => panic!("squares span"),
        }
        // A linear isomorphism is trivially clear.
        let nv = 4;
        let coords = (0..nv).map(|i| MultiPoly::var(nv, i)).collect();
        let ident = PolyMap::new(
            "identity",
            Representation::conj_mn(2).unwrap(),
            Representation::conj_mn(2).unwrap(),
            coords,
        )
        .unwrap();
        match subrep_obstruction(&ident, 9, 2).unwrap() {
            SubrepVerdict::Clear { span_dim } => assert_eq!(span_dim, 4),
            SubrepVerdict::Trapped { .. } => panic!("the identity spans"),
        }
    }

    #[test]
    fn chain_rule_against_substitution() {
        let f = twisted_cubic().unwrap();
        // Affine reparameterization w -> A w + b.
        let a = RationalMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let b = rats(&[1, -2]);
        let subs: Vec<MultiPoly> = (0..2)
            .map(|i| {
                MultiPoly::var(2, 0)
                    .scale(a.at(i, 0))
                    .add(&MultiPoly::var(2, 1).scale(a.at(i, 1)))
                    .unwrap()
                    .add(&MultiPoly::constant(2, b[i].clone()))
                    .unwrap()
            })
            .collect();
        let composed: Vec<MultiPoly> =
            f.coords().iter().map(|p| p.substitute(&subs).unwrap()).collect();
        for w in [[0i64, 0], [1, 2], [-3, 1]] {
            let p = rats(&w);
            let moved: Vec<Rational> = (0..2)
                .map(|i| a.at(i, 0) * &p[0] + a.at(i, 1) * &p[1] + &b[i])
                .collect();
            let outer = f.jacobian(&moved).unwrap().mul(&a).unwrap();
            let mut direct = RationalMatrix::zeros(4, 2);
            for (i, c) in composed.iter().enumerate() {
                for j in 0..2 {
                    *direct.at_mut(i, j) = c.partial(j).eval(&p).unwrap();
                }
            }
            assert_eq!(direct, outer);
        }
    }

    #[test]
    fn descriptors_round_trip() {
        for name in [
            "twisted_cubic",
            "orbit:5",
            "square:3",
            "comm_plus_identity:2",
            "trace:2:X1^2*X2 - tr(X2)*X1",
        ] {
            let f = from_map_descriptor(name).unwrap();
            assert_eq!(f.name(), name);
        }
        assert!(from_map_descriptor("orbit:zero").is_err());
        assert!(from_map_descriptor("nonsense").is_err());
        assert!(trace_poly(2, "3").is_err());
    }

    #[test]
    fn rejects_non_equivariant_coordinates() {
        let coords = vec![
            MultiPoly::var(2, 0).pow(2),
            MultiPoly::zero(2),
            MultiPoly::zero(2),
        ];
        let err = PolyMap::new(
            "bogus",
            Representation::standard(2),
            Representation::sl2_irrep(2),
            coords,
        );
        assert!(matches!(err, Err(Error::Verification(_))));
    }

    #[test]
    fn numeric_decomposition_of_the_cubic() {
        let f = twisted_cubic().unwrap();
        // k = 1 recovers a preimage of an actual image point.
        let target = f.eval_f64(&[0.7, -0.4]);
        let got = numeric_decompose(&f, &target, 1, 13).expect("preimage exists");
        let back = f.eval_f64(&got[0]);
        let diff: Vec<f64> = back.iter().zip(target.iter()).map(|(a, b)| a - b).collect();
        assert!(norm(&diff) < 1e-8);

        // The interesting point needs three summands.  Two summands are
        // not refused here: the point is a limit of two-term sums with
        // diverging coordinates, so a numeric search may legitimately
        // drive the residual below any tolerance.  One summand keeps the
        // residual bounded away from zero.
        let special = [0.0, 1.0, 0.0, 0.0];
        let three = numeric_decompose(&f, &special, 3, 29).expect("three points suffice");
        let mut total = vec![0.0; 4];
        for p in &three {
            for (t, v) in total.iter_mut().zip(f.eval_f64(p).iter()) {
                *t += v;
            }
        }
        let diff: Vec<f64> = total.iter().zip(special.iter()).map(|(a, b)| a - b).collect();
        assert!(norm(&diff) < 1e-9);
        assert!(numeric_decompose(&f, &special, 1, 31).is_none());
    }
}
