//! Group-additive diameter certificates.
//!
//! Everything here is certificate-or-nothing: an upper bound is a list
//! of group elements whose translate sum is verified to be the full
//! space, and a lower bound is one of four replayable obstructions.
//! Failed random searches are reported as absence of a certificate and
//! never as evidence.  `verify` replays a certificate from scratch:
//! digest first, then the complete mathematical content.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::exactlin::{rat, Rational, RationalMatrix, Subspace};
use crate::liediam::LieWitness;
use crate::repkit::{
    apply, elementary_product, flip_matrix, permutation, unipotent_shift, GroupElement,
    Permutation, Representation,
};
use crate::spaces::is_borel_stable;
use crate::{Error, Result};

use num_traits::{One, Zero};

/// A diameter value; sums of translates of a proper invariant subspace
/// never grow, so Infinite is a certifiable outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiamValue {
    Finite(usize),
    Infinite,
}

impl DiamValue {
    pub fn finite(&self) -> Option<usize> {
        match self {
            DiamValue::Finite(k) => Some(*k),
            DiamValue::Infinite => None,
        }
    }
}

impl std::fmt::Display for DiamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiamValue::Finite(k) => write!(f, "{k}"),
            DiamValue::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for DiamValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DiamValue::Finite(k) => s.serialize_u64(*k as u64),
            DiamValue::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for DiamValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        match &v {
            Value::Number(n) => n
                .as_u64()
                .map(|k| DiamValue::Finite(k as usize))
                .ok_or_else(|| serde::de::Error::custom("diameter value must be a count")),
            Value::String(s) if s == "infinite" => Ok(DiamValue::Infinite),
            _ => Err(serde::de::Error::custom("diameter value must be a count or \"infinite\"")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    UpperBound,
    LowerBound,
    Exact,
}

/// Which diameter notion the certificate is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Group,
    LieElementary,
    LieMonomial,
    LieAssociative,
}

/// Replayable lower-bound evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Obstruction {
    /// dim V / dim U forces at least the ceiling.
    CeilingDim,
    /// An invariant subspace contained in U; every translate contains it,
    /// so k translates span at most dim core + k (dim U - dim core).
    InvariantCore { core: Subspace },
    /// No permutation pair covers; by the Bruhat reduction (sound for
    /// Borel-stable U) no group pair covers either, so the diameter is
    /// at least 3.
    WeylExhaustive,
    /// A proper subspace that traps every translate sum: the diameter is
    /// infinite.
    SubrepTrap { trap: Subspace },
}

/// A self-contained, replayable claim about a diameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub rep: Value,
    pub subspace: Subspace,
    pub variant: Variant,
    pub kind: CertKind,
    pub value: DiamValue,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<RationalMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_witness: Option<LieWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    pub inputs_digest: String,
}

impl Certificate {
    /// Digest over the full content except the digest field itself, so
    /// any mutation of witnesses, subspace, value, or obstruction is
    /// detected before replay.
    pub fn compute_digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("certificate serializes");
        v.as_object_mut().expect("certificate is an object").remove("inputs_digest");
        let payload = serde_json::to_string(&v).expect("canonical payload");
        let mut hasher = Sha256::new();
        hasher.update(payload.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn seal(mut self) -> Self {
        self.inputs_digest = self.compute_digest();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

mod hex {
    pub fn encode(bytes: impl AsRef<[u8]>) -> String {
        bytes.as_ref().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn group_cert(
    rep: &Representation,
    u: &Subspace,
    kind: CertKind,
    value: DiamValue,
    witnesses: Vec<GroupElement>,
    obstruction: Option<Obstruction>,
) -> Certificate {
    Certificate {
        schema: 1,
        rep: rep.descriptor(),
        subspace: u.clone(),
        variant: Variant::Group,
        kind,
        value,
        witnesses: witnesses.into_iter().map(|g| g.matrix().clone()).collect(),
        lie_witness: None,
        obstruction,
        inputs_digest: String::new(),
    }
    .seal()
}

/// The sum of the translates of U under the given group elements.
pub fn translate_sum(rep: &Representation, u: &Subspace, gs: &[GroupElement]) -> Result<Subspace> {
    if u.ambient_dim() != rep.dim_v() {
        return Err(Error::DimensionMismatch("subspace does not live in the representation".into()));
    }
    let mut total = Subspace::zero(rep.dim_v());
    for g in gs {
        total = total.sum(&apply(&rep.evaluate(g)?, u));
    }
    Ok(total)
}

/// The dimension-forced floor: any d translates span at most d dim U.
pub fn lower_ceiling(dim_v: usize, dim_u: usize) -> Result<usize> {
    if dim_u == 0 {
        return Err(Error::InvalidArgument("a zero subspace covers nothing".into()));
    }
    Ok(dim_v.div_ceil(dim_u))
}

/// Largest subspace of U stable under the whole Lie algebra, computed
/// by shrinking to a fixed point.  For the connected groups here this
/// is the largest subrepresentation inside U.
pub fn invariant_core(rep: &Representation, u: &Subspace) -> Result<Subspace> {
    let ops: Vec<RationalMatrix> =
        rep.lie_basis().iter().map(|x| rep.lie_evaluate(x)).collect::<Result<_>>()?;
    if ops.is_empty() {
        return Ok(u.clone());
    }
    let mut w = u.clone();
    loop {
        if w.dim() == 0 {
            return Ok(w);
        }
        // Keep the combinations c of the basis of W with op * (c . basis)
        // still inside W, for every op: stack the residuals of the basis
        // images and take the kernel.
        let basis = w.basis_rows();
        let mut residual_rows: Vec<Vec<Rational>> = vec![Vec::new(); basis.len()];
        for op in &ops {
            for (i, b) in basis.iter().enumerate() {
                let image = op.mul_vec(b)?;
                residual_rows[i].extend(w.reduce(&image));
            }
        }
        let residual = RationalMatrix::from_rows(residual_rows)?;
        // Kernel of the transpose: combinations of rows summing to zero.
        let keep = residual.transpose().kernel();
        if keep.dim() == w.dim() {
            return Ok(w);
        }
        let next_rows: Vec<Vec<Rational>> = keep
            .basis_rows()
            .iter()
            .map(|c| {
                let mut v = vec![Rational::zero(); w.ambient_dim()];
                for (ci, b) in c.iter().zip(basis.iter()) {
                    if !ci.is_zero() {
                        for (slot, bv) in v.iter_mut().zip(b.iter()) {
                            *slot += ci * bv;
                        }
                    }
                }
                v
            })
            .collect();
        w = Subspace::from_rows(u.ambient_dim(), next_rows)?;
    }
}

/// Lower bound from the invariant core: Infinite when U itself is a
/// proper invariant subspace, 1 when U is everything, otherwise the
/// refined ceiling.
pub fn lower_invariant_core(rep: &Representation, u: &Subspace) -> Result<DiamValue> {
    let w = invariant_core(rep, u)?;
    let dim_v = rep.dim_v();
    if w.dim() == u.dim() {
        return Ok(if u.dim() == dim_v { DiamValue::Finite(1) } else { DiamValue::Infinite });
    }
    Ok(DiamValue::Finite((dim_v - w.dim()).div_ceil(u.dim() - w.dim())))
}

/// Smallest Lie-stable subspace containing U; equals the G-submodule
/// generated by U for the connected groups here.
pub fn generated_module(rep: &Representation, u: &Subspace) -> Result<Subspace> {
    let ops: Vec<RationalMatrix> =
        rep.lie_basis().iter().map(|x| rep.lie_evaluate(x)).collect::<Result<_>>()?;
    let mut m = u.clone();
    loop {
        let mut next = m.clone();
        for op in &ops {
            next = next.sum(&apply(op, &m));
        }
        if next == m {
            return Ok(m);
        }
        m = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeylOutcome {
    Witness(Permutation),
    NoPermutationPair,
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out
}

/// Exhaustive scan of U + wUw^{-1} over the Weyl group.  Sound only for
/// Borel-stable U (the Bruhat factorization g = b w b' lets the Borel
/// parts be absorbed into U), so stability is a hard precondition.
pub fn weyl_pair_search(n: usize, u: &Subspace) -> Result<WeylOutcome> {
    if n > 7 {
        return Err(Error::InvalidArgument("factorial scan is limited to n <= 7".into()));
    }
    let rep = Representation::conj_sln(n)?;
    if !is_borel_stable(&rep, u)? {
        return Err(Error::Precondition(
            "weyl_pair_search requires a Borel-stable subspace; the Bruhat reduction is unsound otherwise"
                .into(),
        ));
    }
    let found: Vec<Permutation> = all_permutations(n)
        .into_par_iter()
        .filter_map(|images| {
            let p = Permutation::from_images(images).expect("valid images");
            let g = p.group_element();
            let sum = u.sum(&apply(&rep.evaluate(&g).ok()?, u));
            if sum.is_full() {
                Some(p)
            } else {
                None
            }
        })
        .collect();
    match found.into_iter().next() {
        Some(p) => Ok(WeylOutcome::Witness(p)),
        None => Ok(WeylOutcome::NoPermutationPair),
    }
}

/// The lower-unipotent witnesses with shifts 0, 1, 2, ...; any distinct
/// values work, integers keep coefficients small.
pub fn sl2_shift_witnesses(k: usize, d: usize) -> Result<Vec<GroupElement>> {
    if d == 0 || d > k + 1 {
        return Err(Error::InvalidArgument("need 1 <= d <= k+1".into()));
    }
    let count = (k + 1).div_ceil(d);
    Ok((0..count).map(|a| unipotent_shift(&rat(a as i64))).collect())
}

/// The (k+1) x (n d) Hermite interpolation matrix: block V_a has entry
/// (j, i) equal to the i-th derivative of x^j at a.
pub fn confluent_vandermonde(k: usize, d: usize, nodes: &[Rational]) -> RationalMatrix {
    let rows = k + 1;
    let cols = nodes.len() * d;
    let mut m = RationalMatrix::zeros(rows, cols);
    for (b, a) in nodes.iter().enumerate() {
        for i in 0..d {
            for j in 0..rows {
                if j < i {
                    continue;
                }
                // falling factorial j (j-1) .. (j-i+1)
                let mut coeff = Rational::one();
                for t in 0..i {
                    coeff *= rat((j - t) as i64);
                }
                let mut power = Rational::one();
                for _ in 0..(j - i) {
                    power *= a;
                }
                *m.at_mut(j, b * d + i) = coeff * power;
            }
        }
    }
    m
}

/// Named explicit witness constructions from the structured proofs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExplicitStrategy {
    /// Lower-unipotent shifts for the SL2 spaces.
    Shifts,
    /// {I, F}: the antidiagonal flip pairs with any Borel-stable large
    /// subspace.
    Flip,
    /// {I, F, inverse long cycle}: covers the sharp dimension example.
    FlipLongCycle,
    /// {I, product of elementary matrices}: covers from the zero
    /// diagonal.
    ZeroDiagProduct,
    /// {I, F, I + E21} in the 2x2 full matrix space.
    Gl2Appendix,
    /// {I, P_1n, P_2n}: covers from the zero last row and column.
    LastRowCol,
}

impl ExplicitStrategy {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "shifts" => ExplicitStrategy::Shifts,
            "flip" => ExplicitStrategy::Flip,
            "flip_longcycle" => ExplicitStrategy::FlipLongCycle,
            "zero_diag" => ExplicitStrategy::ZeroDiagProduct,
            "gl2" => ExplicitStrategy::Gl2Appendix,
            "last_rowcol" => ExplicitStrategy::LastRowCol,
            _ => return Err(Error::Parse(format!("unknown strategy '{s}'"))),
        })
    }

    /// The witness list, or None when the strategy does not apply to the
    /// representation.
    pub fn witnesses(&self, rep: &Representation, u: &Subspace) -> Result<Option<Vec<GroupElement>>> {
        let n = rep.group_size();
        let id = GroupElement::identity(n);
        Ok(match self {
            ExplicitStrategy::Shifts => match rep {
                Representation::Sl2Irrep { k } => {
                    if u.dim() == 0 {
                        None
                    } else {
                        Some(sl2_shift_witnesses(*k, u.dim())?)
                    }
                }
                _ => None,
            },
            ExplicitStrategy::Flip => Some(vec![id, flip_matrix(n)]),
            ExplicitStrategy::FlipLongCycle => {
                let w = Permutation::long_cycle(n).group_element().inverse_element();
                Some(vec![id, flip_matrix(n), w])
            }
            ExplicitStrategy::ZeroDiagProduct => Some(vec![id, elementary_product(n)]),
            ExplicitStrategy::Gl2Appendix => {
                if n != 2 {
                    None
                } else {
                    let mut e = RationalMatrix::identity(2);
                    *e.at_mut(1, 0) = rat(1);
                    Some(vec![id, flip_matrix(2), GroupElement::new(e)?])
                }
            }
            ExplicitStrategy::LastRowCol => {
                if n < 3 {
                    None
                } else {
                    Some(vec![
                        id,
                        permutation({
                            let mut v: Vec<usize> = (0..n).collect();
                            v.swap(0, n - 1);
                            v
                        })?,
                        permutation({
                            let mut v: Vec<usize> = (0..n).collect();
                            v.swap(1, n - 1);
                            v
                        })?,
                    ])
                }
            }
        })
    }
}

/// Witness search policy for certify_upper.
#[derive(Clone, Debug)]
pub enum Strategy {
    Explicit(ExplicitStrategy),
    Random { seed: u64, trials: usize, entry_range: i64 },
}

/// Random invertible matrix with integer entries in [-h, h].
pub fn random_invertible(rng: &mut impl Rng, n: usize, h: i64) -> GroupElement {
    loop {
        let m = RationalMatrix::from_rows(
            (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-h..=h))).collect()).collect(),
        )
        .expect("rectangular");
        if let Ok(g) = GroupElement::new(m) {
            return g;
        }
    }
}

/// Try to certify diam <= k.  None is not evidence of anything: the
/// witness set is open, so failures only mean the search was unlucky.
pub fn certify_upper(
    rep: &Representation,
    u: &Subspace,
    k: usize,
    strategy: &Strategy,
) -> Result<Option<Certificate>> {
    if u.ambient_dim() != rep.dim_v() {
        return Err(Error::DimensionMismatch("subspace does not live in the representation".into()));
    }
    let full = Subspace::full(rep.dim_v());
    if u == &full && k >= 1 {
        let ws = vec![GroupElement::identity(rep.group_size())];
        return Ok(Some(group_cert(rep, u, CertKind::UpperBound, DiamValue::Finite(1), ws, None)));
    }
    let try_witnesses = |ws: Vec<GroupElement>| -> Result<Option<Certificate>> {
        if ws.is_empty() || ws.len() > k {
            return Ok(None);
        }
        if translate_sum(rep, u, &ws)?.is_full() {
            let cert = group_cert(
                rep,
                u,
                CertKind::UpperBound,
                DiamValue::Finite(ws.len()),
                ws,
                None,
            );
            // Mandatory post-emission self-check before handing it out.
            verify(&cert)?;
            Ok(Some(cert))
        } else {
            Ok(None)
        }
    };
    match strategy {
        Strategy::Explicit(e) => match e.witnesses(rep, u)? {
            Some(ws) => try_witnesses(ws),
            None => Ok(None),
        },
        Strategy::Random { seed, trials, entry_range } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let n = rep.group_size();
            for trial in 0..*trials {
                // Grow the entry range slowly; witnesses exist in any
                // neighborhood once they exist at all.
                let h = entry_range + (trial as i64 / 16) * entry_range;
                let mut ws = vec![GroupElement::identity(n)];
                for _ in 1..k {
                    ws.push(random_invertible(&mut rng, n, h));
                }
                if let Some(cert) = try_witnesses(ws)? {
                    return Ok(Some(cert));
                }
            }
            Ok(None)
        }
    }
}

/// Outcome of the orchestrated search: either matching evidence on both
/// sides, or the best bounds found.
#[derive(Clone, Debug)]
pub enum DiameterResult {
    Exact(Certificate),
    Bounds { lower: Certificate, upper: Option<Certificate> },
}

impl DiameterResult {
    pub fn is_exact(&self) -> bool {
        matches!(self, DiameterResult::Exact(_))
    }

    pub fn exact_value(&self) -> Option<DiamValue> {
        match self {
            DiameterResult::Exact(c) => Some(c.value),
            DiameterResult::Bounds { .. } => None,
        }
    }

    pub fn certificates(&self) -> Vec<&Certificate> {
        match self {
            DiameterResult::Exact(c) => vec![c],
            DiameterResult::Bounds { lower, upper } => {
                let mut v = vec![lower];
                v.extend(upper.iter());
                v
            }
        }
    }
}

fn structured_candidates(rep: &Representation, u: &Subspace, k: usize) -> Result<Vec<Vec<GroupElement>>> {
    let mut out = Vec::new();
    let strategies = [
        ExplicitStrategy::Shifts,
        ExplicitStrategy::Flip,
        ExplicitStrategy::ZeroDiagProduct,
        ExplicitStrategy::FlipLongCycle,
        ExplicitStrategy::LastRowCol,
        ExplicitStrategy::Gl2Appendix,
    ];
    for s in strategies {
        if let Some(ws) = s.witnesses(rep, u)? {
            if ws.len() == k {
                out.push(ws);
            }
        }
    }
    Ok(out)
}

/// Compute the best certified diameter information within budget.
pub fn diameter(rep: &Representation, u: &Subspace, max_k: usize, seed: u64) -> Result<DiameterResult> {
    let dim_v = rep.dim_v();
    if u.ambient_dim() != dim_v {
        return Err(Error::DimensionMismatch("subspace does not live in the representation".into()));
    }
    if u.dim() == 0 {
        return Err(Error::InvalidArgument("a zero subspace covers nothing".into()));
    }
    // Exact-1 fast path: translates of a proper subspace stay proper.
    if u.dim() == dim_v {
        let ws = vec![GroupElement::identity(rep.group_size())];
        return Ok(DiameterResult::Exact(group_cert(
            rep,
            u,
            CertKind::Exact,
            DiamValue::Finite(1),
            ws,
            Some(Obstruction::CeilingDim),
        )));
    }
    // Infinite detection: if U does not generate, nothing ever covers.
    let gen = generated_module(rep, u)?;
    if !gen.is_full() {
        return Ok(DiameterResult::Exact(group_cert(
            rep,
            u,
            CertKind::Exact,
            DiamValue::Infinite,
            Vec::new(),
            Some(Obstruction::SubrepTrap { trap: gen }),
        )));
    }
    // Lower bounds: dimension ceiling, then the invariant-core refinement.
    let mut lower = lower_ceiling(dim_v, u.dim())?;
    let mut obstruction = Obstruction::CeilingDim;
    let core = invariant_core(rep, u)?;
    // core < U holds here: U generates V and is proper, so U itself is
    // not invariant.  The second guard is defensive.
    if core.dim() > 0 && core.dim() < u.dim() {
        let refined = (dim_v - core.dim()).div_ceil(u.dim() - core.dim());
        if refined > lower {
            lower = refined;
            obstruction = Obstruction::InvariantCore { core: core.clone() };
        }
    }
    // Weyl upgrade: for Borel-stable conjugation subspaces, an exhaustive
    // permutation scan either supplies a pair witness or raises the lower
    // bound to 3.
    let mut weyl_witness: Option<GroupElement> = None;
    if lower == 2 {
        if let Representation::ConjSln { n } = rep {
            if *n <= 6 && is_borel_stable(rep, u)? {
                match weyl_pair_search(*n, u)? {
                    WeylOutcome::Witness(p) => weyl_witness = Some(p.group_element()),
                    WeylOutcome::NoPermutationPair => {
                        lower = 3;
                        obstruction = Obstruction::WeylExhaustive;
                    }
                }
            }
        }
    }
    let lower_cert = group_cert(
        rep,
        u,
        CertKind::LowerBound,
        DiamValue::Finite(lower),
        Vec::new(),
        Some(obstruction.clone()),
    );
    // Upper search, escalating from the lower bound.
    for k in lower..=max_k.max(lower) {
        let mut candidates = structured_candidates(rep, u, k)?;
        if k == 2 {
            if let Some(w) = &weyl_witness {
                candidates.insert(0, vec![GroupElement::identity(rep.group_size()), w.clone()]);
            }
        }
        for ws in candidates {
            if translate_sum(rep, u, &ws)?.is_full() {
                return Ok(finish(rep, u, k, lower, ws, &obstruction));
            }
        }
        let found = certify_upper(
            rep,
            u,
            k,
            &Strategy::Random { seed: seed.wrapping_add(k as u64), trials: 40, entry_range: 10 },
        )?;
        if let Some(cert) = found {
            let ws: Vec<GroupElement> = cert
                .witnesses
                .iter()
                .map(|m| GroupElement::new(m.clone()))
                .collect::<Result<_>>()?;
            return Ok(finish(rep, u, ws.len(), lower, ws, &obstruction));
        }
    }
    Ok(DiameterResult::Bounds { lower: lower_cert, upper: None })
}

fn finish(
    rep: &Representation,
    u: &Subspace,
    k: usize,
    lower: usize,
    ws: Vec<GroupElement>,
    obstruction: &Obstruction,
) -> DiameterResult {
    if k == lower {
        DiameterResult::Exact(group_cert(
            rep,
            u,
            CertKind::Exact,
            DiamValue::Finite(k),
            ws,
            Some(obstruction.clone()),
        ))
    } else {
        let lower_cert = group_cert(
            rep,
            u,
            CertKind::LowerBound,
            DiamValue::Finite(lower),
            Vec::new(),
            Some(obstruction.clone()),
        );
        let upper_cert =
            group_cert(rep, u, CertKind::UpperBound, DiamValue::Finite(k), ws, None);
        DiameterResult::Bounds { lower: lower_cert, upper: Some(upper_cert) }
    }
}

/// Replay a lower-bound obstruction; returns the bound it certifies.
fn replay_obstruction(
    rep: &Representation,
    u: &Subspace,
    obstruction: &Obstruction,
) -> Result<DiamValue> {
    let dim_v = rep.dim_v();
    let fail = |msg: &str| Err(Error::Verification(msg.into()));
    match obstruction {
        Obstruction::CeilingDim => Ok(DiamValue::Finite(lower_ceiling(dim_v, u.dim())?)),
        Obstruction::InvariantCore { core } => {
            if core.ambient_dim() != dim_v || !u.contains_subspace(core) {
                return fail("claimed core is not inside the subspace");
            }
            for x in rep.lie_basis() {
                if !core.contains_subspace(&apply(&rep.lie_evaluate(&x)?, core)) {
                    return fail("claimed core is not invariant");
                }
            }
            if core.dim() == u.dim() {
                return Ok(if u.dim() == dim_v { DiamValue::Finite(1) } else { DiamValue::Infinite });
            }
            Ok(DiamValue::Finite((dim_v - core.dim()).div_ceil(u.dim() - core.dim())))
        }
        Obstruction::WeylExhaustive => {
            let n = rep.group_size();
            if !matches!(rep, Representation::ConjSln { .. }) {
                return fail("the Weyl obstruction applies to the conjugation representation");
            }
            if u.dim() == dim_v {
                return fail("the Weyl obstruction needs a proper subspace");
            }
            match weyl_pair_search(n, u)? {
                WeylOutcome::NoPermutationPair => Ok(DiamValue::Finite(3)),
                WeylOutcome::Witness(_) => fail("a permutation pair covers; the bound does not hold"),
            }
        }
        Obstruction::SubrepTrap { trap } => {
            if trap.ambient_dim() != dim_v || !trap.contains_subspace(u) {
                return fail("claimed trap does not contain the subspace");
            }
            if trap.dim() == dim_v {
                return fail("claimed trap is the full space");
            }
            for x in rep.lie_basis() {
                if !trap.contains_subspace(&apply(&rep.lie_evaluate(&x)?, trap)) {
                    return fail("claimed trap is not invariant");
                }
            }
            Ok(DiamValue::Infinite)
        }
    }
}

/// Full verification: digest, then complete mathematical replay of both
/// sides of the claim.
pub fn verify(cert: &Certificate) -> Result<()> {
    let fail = |msg: &str| Err(Error::Verification(msg.into()));
    if cert.schema != 1 {
        return fail("unknown certificate schema");
    }
    if cert.compute_digest() != cert.inputs_digest {
        return fail("digest mismatch: certificate content was altered");
    }
    if !matches!(cert.variant, Variant::Group) {
        return crate::liediam::replay_certificate(cert);
    }
    let rep = Representation::from_descriptor(&cert.rep)?;
    if cert.subspace.ambient_dim() != rep.dim_v() {
        return fail("subspace does not live in the representation");
    }
    let needs_upper = matches!(cert.kind, CertKind::UpperBound | CertKind::Exact);
    let needs_lower = matches!(cert.kind, CertKind::LowerBound | CertKind::Exact);
    if needs_upper {
        match cert.value {
            DiamValue::Finite(v) => {
                if cert.witnesses.len() != v {
                    return fail("witness count does not match the claimed value");
                }
                let ws: Vec<GroupElement> = cert
                    .witnesses
                    .iter()
                    .map(|m| GroupElement::new(m.clone()))
                    .collect::<Result<_>>()
                    .map_err(|_| Error::Verification("witness matrix is singular".into()))?;
                if !translate_sum(&rep, &cert.subspace, &ws)?.is_full() {
                    return fail("translate sum does not cover the space");
                }
            }
            DiamValue::Infinite => {
                if !cert.witnesses.is_empty() {
                    return fail("an infinite value admits no witnesses");
                }
                if !matches!(cert.kind, CertKind::Exact) {
                    return fail("an infinite upper bound is not a claim");
                }
                // Exact infinite: the obstruction itself carries the claim.
            }
        }
    }
    if needs_lower {
        if matches!(cert.kind, CertKind::LowerBound) && !cert.witnesses.is_empty() {
            return fail("lower bounds carry no witnesses");
        }
        let obstruction = match &cert.obstruction {
            Some(o) => o,
            None => return fail("lower-bound claims need an obstruction"),
        };
        let certified = replay_obstruction(&rep, &cert.subspace, obstruction)?;
        match (certified, cert.value) {
            (DiamValue::Infinite, DiamValue::Infinite) => {}
            (DiamValue::Infinite, DiamValue::Finite(_)) => {
                return fail("obstruction certifies infinity but the value is finite");
            }
            (DiamValue::Finite(b), DiamValue::Finite(v)) => {
                if b != v {
                    return fail("obstruction bound does not match the claimed value");
                }
            }
            (DiamValue::Finite(_), DiamValue::Infinite) => {
                return fail("finite obstruction cannot certify an infinite value");
            }
        }
    } else if matches!(cert.kind, CertKind::UpperBound) && cert.obstruction.is_some() {
        return fail("upper bounds carry no obstruction");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;
    use crate::repkit::{unit_matrix, Coordinatization};
    use crate::spaces::{named, upper_closed, NamedSpace};

    #[test]
    fn translate_sum_examples() {
        let rep = Representation::conj_sln(3).unwrap();
        let u = named(3, NamedSpace::ZeroDiag).unwrap();
        let id = GroupElement::identity(3);
        assert_eq!(translate_sum(&rep, &u, &[id.clone()]).unwrap(), u);
        let sum = translate_sum(&rep, &u, &[id, elementary_product(3)]).unwrap();
        assert_eq!(sum.dim(), 8);
        assert!(sum.is_full());

        let rep8 = Representation::sl2_irrep(8);
        let tail = upper_closed(8, 3).unwrap();
        let shifts = sl2_shift_witnesses(8, 6).unwrap();
        assert_eq!(shifts.len(), 2);
        assert!(translate_sum(&rep8, &tail, &shifts).unwrap().is_full());
    }

    #[test]
    fn ceiling_arithmetic() {
        assert_eq!(lower_ceiling(9, 2).unwrap(), 5);
        for n in 2..=6 {
            assert_eq!(lower_ceiling(n * n - 1, n * n - n).unwrap(), 2);
        }
        assert_eq!(lower_ceiling(4, 4).unwrap(), 1);
        assert!(lower_ceiling(4, 0).is_err());
    }

    #[test]
    fn invariant_core_examples() {
        let rep = Representation::conj_mn(2).unwrap();
        let full = Subspace::full(4);
        assert_eq!(invariant_core(&rep, &full).unwrap(), full);

        let u = named(2, NamedSpace::Gl2Example).unwrap();
        let core = invariant_core(&rep, &u).unwrap();
        let mn = Coordinatization::mn(2);
        assert_eq!(core, Subspace::line(mn.vector_of(&RationalMatrix::identity(2)).unwrap()));
        assert_eq!(lower_invariant_core(&rep, &u).unwrap(), DiamValue::Finite(3));

        // Proper subspaces of an irreducible representation have zero core.
        let rep5 = Representation::sl2_irrep(5);
        for seed in 0..5 {
            let r = crate::spaces::random_subspace(6, 3, 40 + seed).unwrap();
            assert_eq!(invariant_core(&rep5, &r).unwrap().dim(), 0);
        }

        // U itself invariant and proper: infinite.
        let line = Subspace::line(mn.vector_of(&RationalMatrix::identity(2)).unwrap());
        assert_eq!(lower_invariant_core(&rep, &line).unwrap(), DiamValue::Infinite);
    }

    #[test]
    fn weyl_search_outcomes() {
        let u = named(4, NamedSpace::Counterexample).unwrap();
        assert_eq!(weyl_pair_search(4, &u).unwrap(), WeylOutcome::NoPermutationPair);

        // Borel plus one lower entry exceeds (n-1)^2 and pairs with some w.
        let coord = Coordinatization::sln(4);
        let extra = Subspace::line(coord.vector_of(&unit_matrix(4, 2, 1)).unwrap());
        let big = named(4, NamedSpace::BorelB).unwrap().sum(&extra);
        assert_eq!(big.dim(), 10);
        match weyl_pair_search(4, &big).unwrap() {
            WeylOutcome::Witness(p) => {
                let rep = Representation::conj_sln(4).unwrap();
                let g = p.group_element();
                let sum = big.sum(&apply(&rep.evaluate(&g).unwrap(), &big));
                assert!(sum.is_full());
            }
            WeylOutcome::NoPermutationPair => panic!("a witness pair must exist"),
        }

        assert!(matches!(
            weyl_pair_search(3, &named(3, NamedSpace::ZeroDiag).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn vandermonde_shapes() {
        // Single-derivative blocks at nodes 0,1,2: plain Vandermonde.
        let m = confluent_vandermonde(2, 1, &[rat(0), rat(1), rat(2)]);
        assert_eq!(m.det().unwrap(), rat(2));

        // Repeated nodes duplicate columns.
        let m = confluent_vandermonde(2, 1, &[rat(1), rat(1), rat(0)]);
        assert_eq!(m.rank(), 2);

        // Full-width block at a single node: triangular with factorials.
        let m = confluent_vandermonde(3, 4, &[rat(0)]);
        assert_eq!(m.det().unwrap(), rat(1 * 1 * 2 * 6));

        // Hermite well-posedness: first k+1 columns invertible.
        for k in 1..=8usize {
            for d in 1..=k {
                let n = (k + 1).div_ceil(d);
                let nodes: Vec<Rational> = (0..n).map(|a| rat(a as i64)).collect();
                let m = confluent_vandermonde(k, d, &nodes);
                let first = RationalMatrix::from_rows(
                    (0..=k).map(|r| (0..=k).map(|c| m.at(r, c).clone()).collect()).collect(),
                )
                .unwrap();
                assert_eq!(first.rank(), k + 1, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn certify_and_verify_round_trip() {
        let rep = Representation::conj_sln(3).unwrap();
        let u = crate::spaces::random_subspace(8, 5, 17).unwrap();
        let cert = certify_upper(&rep, &u, 2, &Strategy::Random { seed: 3, trials: 40, entry_range: 10 })
            .unwrap()
            .expect("dimension 5 > 4 covers in two for generic witnesses");
        assert_eq!(cert.value, DiamValue::Finite(2));
        verify(&cert).unwrap();

        // JSON round trip preserves everything.
        let json = cert.to_json();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        verify(&back).unwrap();
        assert_eq!(back.to_json(), json);

        // Monotonicity: appending the identity keeps the sum full.
        let mut ws: Vec<GroupElement> =
            cert.witnesses.iter().map(|m| GroupElement::new(m.clone()).unwrap()).collect();
        ws.push(GroupElement::identity(3));
        assert!(translate_sum(&rep, &u, &ws).unwrap().is_full());
    }

    #[test]
    fn tampered_certificates_fail() {
        let rep = Representation::conj_sln(3).unwrap();
        let u = named(3, NamedSpace::ZeroDiag).unwrap();
        let cert = certify_upper(
            &rep,
            &u,
            2,
            &Strategy::Explicit(ExplicitStrategy::ZeroDiagProduct),
        )
        .unwrap()
        .unwrap();
        verify(&cert).unwrap();

        let mut bad = cert.clone();
        *bad.witnesses[1].at_mut(0, 1) = ratio(7, 3);
        assert!(verify(&bad).is_err(), "mutated witness must fail the digest");

        let mut bad = cert.clone();
        bad.value = DiamValue::Finite(3);
        assert!(verify(&bad).is_err());

        // Re-sealing a tampered claim still fails the replay.
        let mut bad = cert.clone();
        bad.witnesses.pop();
        bad.value = DiamValue::Finite(1);
        let resealed = bad.seal();
        assert!(verify(&resealed).is_err(), "one translate cannot cover");
    }

    #[test]
    fn diameter_counterexample_is_exactly_three() {
        let rep = Representation::conj_sln(4).unwrap();
        let u = named(4, NamedSpace::Counterexample).unwrap();
        let result = diameter(&rep, &u, 6, 1).unwrap();
        match result {
            DiameterResult::Exact(c) => {
                assert_eq!(c.value, DiamValue::Finite(3));
                assert!(matches!(c.obstruction, Some(Obstruction::WeylExhaustive)));
                verify(&c).unwrap();
            }
            DiameterResult::Bounds { .. } => panic!("expected an exact certificate"),
        }
    }

    #[test]
    fn diameter_handles_invariant_and_full_subspaces() {
        let rep = Representation::conj_mn(2).unwrap();
        let mn = Coordinatization::mn(2);
        let line = Subspace::line(mn.vector_of(&RationalMatrix::identity(2)).unwrap());
        match diameter(&rep, &line, 4, 0).unwrap() {
            DiameterResult::Exact(c) => {
                assert_eq!(c.value, DiamValue::Infinite);
                verify(&c).unwrap();
            }
            _ => panic!("invariant line has infinite diameter"),
        }
        match diameter(&rep, &Subspace::full(4), 4, 0).unwrap() {
            DiameterResult::Exact(c) => assert_eq!(c.value, DiamValue::Finite(1)),
            _ => panic!("full subspace has diameter 1"),
        }
    }

    #[test]
    fn diameter_sl2_tails() {
        for (k, j, want) in [(3usize, 2usize, 2usize), (8, 3, 2), (4, 4, 5)] {
            let rep = Representation::sl2_irrep(k);
            let u = upper_closed(k, j).unwrap();
            match diameter(&rep, &u, 8, 5).unwrap() {
                DiameterResult::Exact(c) => {
                    assert_eq!(c.value, DiamValue::Finite(want), "k={k} j={j}");
                    verify(&c).unwrap();
                }
                _ => panic!("tails certify exactly"),
            }
        }
    }

    #[test]
    fn flip_conjugation_reverses_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 3..=5usize {
            let f = flip_matrix(n);
            for _ in 0..5 {
                let a = RationalMatrix::from_rows(
                    (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-5..=5))).collect()).collect(),
                )
                .unwrap();
                let faf = f.matrix().mul(&a).unwrap().mul(f.matrix()).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(faf.at(i, j), a.at(n - 1 - i, n - 1 - j));
                    }
                }
            }
        }
    }

    #[test]
    fn gl2_appendix_strategy() {
        let rep = Representation::conj_mn(2).unwrap();
        let u = named(2, NamedSpace::Gl2Example).unwrap();
        let cert = certify_upper(&rep, &u, 3, &Strategy::Explicit(ExplicitStrategy::Gl2Appendix))
            .unwrap()
            .expect("the quoted witnesses cover");
        assert_eq!(cert.value, DiamValue::Finite(3));
        verify(&cert).unwrap();
    }
}
