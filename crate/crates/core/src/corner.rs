//! Finite-precision models of Corner groups
//! `G^A = <B, R a_n^alpha : n, alpha in A>_{p*}` with `B = R^m`.
//!
//! Elements of `B` are stored by their `Z`-coordinates: basis element `t` of
//! `R` in block `j` has index `j * rank + t`, and `R` acts blockwise by its
//! regular representation. Membership asks for a certificate
//! `p^k x = z + sum_j r_j a_j (mod p^N)` with `k <= K` and all integer
//! coordinates of `z` and the `r_j` bounded by `H` in absolute value. The
//! certificates form a coset of the kernel lattice of `[I | G]`, which is
//! searched exhaustively.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::ReducedLattice;
use crate::linalg::IntMatrix;
use crate::padic::{PadicRing, PadicVector};
use crate::random::{sample_supported_elements, Seed, SupportedElement};
use crate::ring::RingPresentation;

const NODE_LIMIT: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerParams {
    pub ring: RingPresentation,
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    /// Denominator cap `K`: purification up to `p^K`.
    pub cap: u32,
    /// Coefficient bound `H` for membership certificates.
    pub height: u64,
    /// Number of free `R`-generators of `B` in the window.
    pub module_rank: usize,
    pub labels: Vec<u32>,
    pub generators_per_label: usize,
}

impl Default for CornerParams {
    fn default() -> Self {
        Self {
            ring: RingPresentation::integers(),
            p: 5,
            precision: 16,
            cap: 8,
            height: 10,
            module_rank: 3,
            labels: vec![0, 1, 2],
            generators_per_label: 2,
        }
    }
}

/// `sum_{b in I} b xi_b` as a vector of `Z`-coordinates; `b` is the identity
/// of `R` placed in block `b`.
pub fn build_generator(
    se: &SupportedElement,
    ring: &RingPresentation,
    module_rank: usize,
    precision: u32,
) -> Result<PadicVector> {
    let pr = se.ring().with_precision(precision);
    if precision > se.ring().precision() {
        return Err(Error::PrecisionOutOfRange {
            requested: precision,
            available: se.ring().precision(),
        });
    }
    let n = ring.rank();
    let one = ring.one();
    let mut v = PadicVector::zero(&pr);
    for (&b, xi) in se.coefficients() {
        if b >= module_rank {
            return Err(Error::InvalidInput(format!(
                "support index {b} outside the window of {module_rank}"
            )));
        }
        let xi = xi.reduce_precision(precision)?;
        for (t, u) in one.iter().enumerate() {
            if !u.is_zero() {
                v.set(b * n + t, xi.scale(u).residue().clone());
            }
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub index: usize,
    pub label: u32,
    pub vector: PadicVector,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CornerModelWire")]
pub struct CornerModel {
    pub params: CornerParams,
    pub seed: u64,
    pub elements: Vec<SupportedElement>,
    #[serde(skip_serializing)]
    generators: Vec<Generator>,
    #[serde(skip_serializing)]
    ring: Arc<PadicRing>,
}

#[derive(Deserialize)]
struct CornerModelWire {
    params: CornerParams,
    seed: u64,
    elements: Vec<SupportedElement>,
}

impl TryFrom<CornerModelWire> for CornerModel {
    type Error = Error;

    fn try_from(w: CornerModelWire) -> Result<Self> {
        Self::from_elements(w.params, w.seed, w.elements)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    InAtPrecision,
    NotIn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub k: u32,
    /// `B`-part coordinates.
    #[serde(with = "arith::decimal_signed_vec")]
    pub z: Vec<BigInt>,
    /// Ring coefficients, `rank` entries per generator in `generators`.
    #[serde(with = "arith::decimal_signed_vec")]
    pub r: Vec<BigInt>,
    pub generators: Vec<(usize, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    #[serde(rename = "N")]
    pub precision: u32,
    pub cap: u32,
    pub height: u64,
    pub meaning: String,
}

impl CornerModel {
    pub fn build(params: CornerParams, seed: u64) -> Result<Self> {
        validate_params(&params)?;
        let root = Seed::new(seed).child("corner");
        let mut elements = Vec::new();
        for n in 0..params.generators_per_label {
            elements.extend(sample_supported_elements(
                params.p,
                params.precision,
                n,
                &params.labels,
                Some(params.module_rank),
                &root,
            )?);
        }
        Self::from_elements(params, seed, elements)
    }

    pub fn from_elements(params: CornerParams, seed: u64, elements: Vec<SupportedElement>) -> Result<Self> {
        validate_params(&params)?;
        let ring = PadicRing::new(params.p, params.precision)?;
        let labels: BTreeSet<u32> = params.labels.iter().copied().collect();
        let generators = elements
            .iter()
            .map(|se| {
                if !labels.contains(&se.label()) {
                    return Err(Error::InvalidInput(format!("unknown label {}", se.label())));
                }
                if se.ring().p() != params.p {
                    return Err(Error::IncompatibleOperands("generator prime differs".into()));
                }
                Ok(Generator {
                    index: se.index(),
                    label: se.label(),
                    vector: build_generator(se, &params.ring, params.module_rank, params.precision)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            seed,
            elements,
            generators,
            ring,
        })
    }

    pub fn padic_ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    /// Number of `Z`-coordinates of the window.
    pub fn width(&self) -> usize {
        self.params.module_rank * self.params.ring.rank()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn labels(&self) -> BTreeSet<u32> {
        self.params.labels.iter().copied().collect()
    }

    /// `r x` with `r` acting blockwise.
    pub fn act(&self, r: &[BigInt], x: &PadicVector) -> PadicVector {
        let lr = self.params.ring.regular_rep(r);
        let map = AdditiveMap::blockwise(&lr, self.params.module_rank);
        map.apply(x, self.width())
    }

    fn check_subset(&self, a: &BTreeSet<u32>) -> Result<()> {
        let labels = self.labels();
        if let Some(bad) = a.iter().find(|l| !labels.contains(l)) {
            return Err(Error::InvalidInput(format!("label {bad} not in the model")));
        }
        Ok(())
    }

    /// Precomputes the reduced certificate lattice for label set `a`.
    pub fn solver(&self, a: &BTreeSet<u32>) -> Result<MembershipSolver> {
        self.check_subset(a)?;
        let w = self.width();
        let rank = self.params.ring.rank();
        let m = self.ring.modulus();
        let mut columns = Vec::new();
        let mut gens = Vec::new();
        for g in self.generators.iter().filter(|g| a.contains(&g.label)) {
            gens.push((g.index, g.label));
            for t in 0..rank {
                let col = self.act(&self.params.ring.basis(t), &g.vector).to_dense(w);
                columns.push(col);
            }
        }
        let c = columns.len();
        let dim = w + c;
        let modulus = BigInt::from(m.clone());
        let mut basis = Vec::with_capacity(dim);
        for i in 0..w {
            let mut row = vec![BigInt::zero(); dim];
            row[i] = modulus.clone();
            basis.push(row);
        }
        for (j, col) in columns.iter().enumerate() {
            let mut row = vec![BigInt::zero(); dim];
            for (i, x) in col.iter().enumerate() {
                row[i] = -arith::symmetric(x, m);
            }
            row[w + j] = BigInt::one();
            basis.push(row);
        }
        Ok(MembershipSolver {
            lattice: ReducedLattice::new(basis)?,
            width: w,
            generators: gens,
            ring: self.ring.clone(),
            cap: self.params.cap,
            height: self.params.height,
        })
    }

    pub fn membership(&self, x: &PadicVector, a: &BTreeSet<u32>) -> Result<MembershipReport> {
        self.solver(a)?.check(x)
    }
}

fn validate_params(p: &CornerParams) -> Result<()> {
    p.ring.validate().map_err(|v| {
        Error::InvalidInput(format!("invalid ring presentation ({} violations)", v.len()))
    })?;
    if p.labels.is_empty() {
        return Err(Error::InvalidParameter("labels must be non-empty".into()));
    }
    if p.module_rank == 0 {
        return Err(Error::InvalidParameter("module rank must be positive".into()));
    }
    if p.height == 0 {
        return Err(Error::InvalidParameter("height bound must be positive".into()));
    }
    Ok(())
}

/// Reduced certificate lattice for one label set.
#[derive(Clone, Debug)]
pub struct MembershipSolver {
    lattice: ReducedLattice,
    width: usize,
    generators: Vec<(usize, u32)>,
    ring: Arc<PadicRing>,
    cap: u32,
    height: u64,
}

impl MembershipSolver {
    pub fn check(&self, x: &PadicVector) -> Result<MembershipReport> {
        if !x.ring().same_as(&self.ring) {
            return Err(Error::IncompatibleOperands(format!(
                "element at p={} N={} but model at p={} N={}",
                x.p(),
                x.precision(),
                self.ring.p(),
                self.ring.precision()
            )));
        }
        let n = self.ring.precision();
        let outside = x.entries().keys().any(|&i| i >= self.width);
        let mut certificate = None;
        if !outside {
            let dense = x.to_dense(self.width);
            let m = self.ring.modulus();
            let dim = self.lattice.dim();
            for k in 0..=self.cap {
                let pk = arith::pow_u64(self.ring.p(), k);
                let mut shift = vec![BigInt::zero(); dim];
                for (s, v) in shift.iter_mut().zip(&dense) {
                    *s = arith::symmetric(&((v * &pk) % m), m);
                }
                let mut found = None;
                self.lattice.enumerate_box(&shift, self.height, NODE_LIMIT, |y| {
                    found = Some(y.to_vec());
                    false
                })?;
                if let Some(y) = found {
                    certificate = Some(Certificate {
                        k,
                        z: y[..self.width].to_vec(),
                        r: y[self.width..].to_vec(),
                        generators: self.generators.clone(),
                    });
                    break;
                }
            }
        }
        let verdict = if certificate.is_some() { Verdict::InAtPrecision } else { Verdict::NotIn };
        let meaning = match verdict {
            Verdict::InAtPrecision => format!("consistent at precision {n}"),
            Verdict::NotIn => format!(
                "no certificate with k <= {} and height <= {} at precision {n}",
                self.cap, self.height
            ),
        };
        Ok(MembershipReport {
            verdict,
            certificate,
            precision: n,
            cap: self.cap,
            height: self.height,
            meaning,
        })
    }

    pub fn is_member(&self, x: &PadicVector) -> Result<bool> {
        Ok(self.check(x)?.verdict == Verdict::InAtPrecision)
    }
}

/// Additive map of the window given by an integer matrix on
/// `Z`-coordinates, extended `J_p`-linearly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveMap {
    pub kind: String,
    #[serde(with = "int_matrix")]
    pub matrix: IntMatrix,
}

mod int_matrix {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|r| r.iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

impl AdditiveMap {
    pub fn identity(width: usize) -> Self {
        Self {
            kind: "identity".into(),
            matrix: crate::linalg::identity(width),
        }
    }

    fn blockwise(block: &IntMatrix, blocks: usize) -> Self {
        let n = block.len();
        let w = n * blocks;
        let mut m = vec![vec![BigInt::zero(); w]; w];
        for b in 0..blocks {
            for i in 0..n {
                for j in 0..n {
                    m[b * n + i][b * n + j] = block[i][j].clone();
                }
            }
        }
        Self {
            kind: "blockwise".into(),
            matrix: m,
        }
    }

    /// Left multiplication by `r` on every block.
    pub fn multiplication(ring: &RingPresentation, module_rank: usize, r: &[BigInt]) -> Self {
        let mut m = Self::blockwise(&ring.regular_rep(r), module_rank);
        m.kind = "multiplication".into();
        m
    }

    /// Returns `r` when the map is left multiplication by `r`.
    pub fn as_multiplication(&self, ring: &RingPresentation, module_rank: usize) -> Option<Vec<BigInt>> {
        let n = ring.rank();
        if self.matrix.len() != n * module_rank {
            return None;
        }
        // r = phi(1 in block 0)
        let one = ring.one();
        let r: Vec<BigInt> = (0..n)
            .map(|i| (0..n).map(|j| &self.matrix[i][j] * &one[j]).sum())
            .collect();
        (Self::multiplication(ring, module_rank, &r).matrix == self.matrix).then_some(r)
    }

    /// Uniform entries in `[-bound, bound]`, redrawn until the map is not a
    /// multiplication. Fails when every map is one (width 1 or bound 0).
    pub fn random_non_multiplication(
        ring: &RingPresentation,
        module_rank: usize,
        bound: i64,
        seed: &Seed,
    ) -> Result<Self> {
        let w = ring.rank() * module_rank;
        if w < 2 || bound < 1 {
            return Err(Error::InvalidParameter(format!(
                "every additive map of width {w} with entries in [-{bound}, {bound}] is a multiplication"
            )));
        }
        let mut rng = seed.rng();
        for _ in 0..10_000 {
            let matrix: IntMatrix = (0..w)
                .map(|_| (0..w).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
                .collect();
            let m = Self {
                kind: "random".into(),
                matrix,
            };
            if m.as_multiplication(ring, module_rank).is_none() {
                return Ok(m);
            }
        }
        Err(Error::ResourceLimit("no non-multiplication map found in 10000 draws".into()))
    }

    pub fn apply(&self, x: &PadicVector, width: usize) -> PadicVector {
        let ring = x.ring();
        let m = ring.modulus();
        let dense = x.to_dense(width);
        let mut out = PadicVector::zero(ring);
        for (i, row) in self.matrix.iter().enumerate() {
            let mut acc = BigInt::zero();
            for (a, v) in row.iter().zip(&dense) {
                if !a.is_zero() && !v.is_zero() {
                    acc += a * BigInt::from(v.clone());
                }
            }
            out.set(i, arith::reduce(&acc, m));
        }
        out
    }
}

/// `r e_i` and `r a` pass membership for every window basis vector and every
/// generator with label in `a`.
pub fn mult_by_r_probe(model: &CornerModel, r: &[BigInt], a: &BTreeSet<u32>) -> Result<bool> {
    let solver = model.solver(a)?;
    let ring = model.padic_ring();
    for i in 0..model.width() {
        if !solver.is_member(&model.act(r, &PadicVector::basis(ring, i)))? {
            return Ok(false);
        }
    }
    for g in model.generators().iter().filter(|g| a.contains(&g.label)) {
        if !solver.is_member(&model.act(r, &g.vector))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RigidityVerdict {
    Consistent,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityOutcome {
    pub verdict: RigidityVerdict,
    pub map: AdditiveMap,
    /// `(index, label)` of the first generator whose image failed.
    pub failing_generator: Option<(usize, u32)>,
    pub images_checked: usize,
}

/// Applies `phi` to the window basis and to every generator with label in
/// `a`, checking membership in `G^d`. Generators whose labels lie outside
/// `d` are tried first.
pub fn rigidity_trial_with(
    model: &CornerModel,
    a: &BTreeSet<u32>,
    d: &BTreeSet<u32>,
    phi: &AdditiveMap,
) -> Result<RigidityOutcome> {
    model.check_subset(a)?;
    let solver = model.solver(d)?;
    let w = model.width();
    if phi.matrix.len() != w || phi.matrix.iter().any(|r| r.len() != w) {
        return Err(Error::InvalidInput(format!("map must be {w}x{w}")));
    }
    let ring = model.padic_ring();
    let mut checked = 0;
    let mut gens: Vec<&Generator> = model.generators().iter().filter(|g| a.contains(&g.label)).collect();
    gens.sort_by_key(|g| (d.contains(&g.label), g.label, g.index));
    for g in gens {
        checked += 1;
        if !solver.is_member(&phi.apply(&g.vector, w))? {
            return Ok(RigidityOutcome {
                verdict: RigidityVerdict::Violation,
                map: phi.clone(),
                failing_generator: Some((g.index, g.label)),
                images_checked: checked,
            });
        }
    }
    for i in 0..w {
        checked += 1;
        if !solver.is_member(&phi.apply(&PadicVector::basis(ring, i), w))? {
            return Ok(RigidityOutcome {
                verdict: RigidityVerdict::Violation,
                map: phi.clone(),
                failing_generator: None,
                images_checked: checked,
            });
        }
    }
    Ok(RigidityOutcome {
        verdict: RigidityVerdict::Consistent,
        map: phi.clone(),
        failing_generator: None,
        images_checked: checked,
    })
}

/// Entry bound for random additive maps.
pub const RANDOM_MAP_BOUND: i64 = 3;

/// Rigidity trial with a random additive map that is not a multiplication.
pub fn rigidity_trial(
    model: &CornerModel,
    a: &BTreeSet<u32>,
    d: &BTreeSet<u32>,
    seed: &Seed,
) -> Result<RigidityOutcome> {
    let phi = AdditiveMap::random_non_multiplication(
        &model.params.ring,
        model.params.module_rank,
        RANDOM_MAP_BOUND,
        &seed.child("phi"),
    )?;
    rigidity_trial_with(model, a, d, &phi)
}

/// All subsets of `labels`, smallest first.
pub fn label_subsets(labels: &[u32]) -> Vec<BTreeSet<u32>> {
    let n = labels.len();
    let mut out: Vec<BTreeSet<u32>> = (0u32..1 << n)
        .map(|mask| {
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &l)| l)
                .collect()
        })
        .collect();
    out.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
    out
}

/// Sum of certificate heights; exposed for reports.
pub fn certificate_height(c: &Certificate) -> BigInt {
    c.z.iter().chain(&c.r).map(|x| x.abs()).max().unwrap_or_default()
}

/// Recomputes `z + sum r_j a_j - p^k x` to confirm a certificate.
pub fn verify_certificate(model: &CornerModel, x: &PadicVector, c: &Certificate) -> Result<bool> {
    let ring = model.padic_ring();
    let rank = model.params.ring.rank();
    let by_key: BTreeMap<(usize, u32), &Generator> =
        model.generators().iter().map(|g| ((g.index, g.label), g)).collect();
    let mut acc = PadicVector::from_dense(ring, &c.z);
    for (j, key) in c.generators.iter().enumerate() {
        let g = by_key
            .get(key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator {key:?}")))?;
        let r = &c.r[j * rank..(j + 1) * rank];
        acc = acc.add(&model.act(r, &g.vector))?;
    }
    let pk = BigInt::from(arith::pow_u64(ring.p(), c.k));
    let target = x.scale_int(&pk);
    Ok(acc.sub(&target)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicApprox;
    use num_bigint::BigUint;

    fn set(xs: &[u32]) -> BTreeSet<u32> {
        xs.iter().copied().collect()
    }

    fn gaussian_model(seed: u64) -> CornerModel {
        CornerModel::build(
            CornerParams {
                ring: RingPresentation::gaussian_integers(),
                ..CornerParams::default()
            },
            seed,
        )
        .unwrap()
    }

    #[test]
    fn width_one_has_no_random_map() {
        let z = RingPresentation::integers();
        let seed = Seed::new(0);
        assert!(AdditiveMap::random_non_multiplication(&z, 1, 3, &seed).is_err());
        assert!(AdditiveMap::random_non_multiplication(&z, 2, 0, &seed).is_err());
        let m = AdditiveMap::random_non_multiplication(&z, 2, 3, &seed).unwrap();
        assert!(m.as_multiplication(&z, 2).is_none());
    }

    #[test]
    fn generator_assembly() {
        let ring = PadicRing::new(7, 2).unwrap();
        let z = RingPresentation::integers();
        let se = SupportedElement::new(0, 0, [(0, ring.from_i64(1))].into_iter().collect()).unwrap();
        assert_eq!(build_generator(&se, &z, 2, 2).unwrap(), PadicVector::basis(&ring, 0));
        let se = SupportedElement::new(
            0,
            0,
            [(0, ring.from_i64(3)), (1, ring.from_i64(5))].into_iter().collect(),
        )
        .unwrap();
        let v = build_generator(&se, &z, 2, 2).unwrap();
        assert_eq!(v.get(0), BigUint::from(3u32));
        assert_eq!(v.get(1), BigUint::from(5u32));
        assert!(build_generator(&se, &z, 1, 2).is_err());
        assert!(SupportedElement::new(0, 0, BTreeMap::<usize, PadicApprox>::new()).is_err());
    }

    #[test]
    fn basis_and_generators_are_members() {
        let model = gaussian_model(1);
        let all = model.labels();
        let solver = model.solver(&all).unwrap();
        for i in 0..model.width() {
            let e = PadicVector::basis(model.padic_ring(), i);
            let rep = solver.check(&e).unwrap();
            assert_eq!(rep.verdict, Verdict::InAtPrecision);
            assert!(verify_certificate(&model, &e, rep.certificate.as_ref().unwrap()).unwrap());
        }
        for g in model.generators() {
            let rep = solver.check(&g.vector).unwrap();
            assert_eq!(rep.verdict, Verdict::InAtPrecision);
            assert!(verify_certificate(&model, &g.vector, rep.certificate.as_ref().unwrap()).unwrap());
        }
    }

    #[test]
    fn foreign_generators_are_rejected() {
        let mut rejected = 0;
        for seed in 0..40 {
            let model = gaussian_model(seed);
            let solver = model.solver(&set(&[0, 1])).unwrap();
            let g = model.generators().iter().find(|g| g.label == 2).unwrap();
            if solver.check(&g.vector).unwrap().verdict == Verdict::NotIn {
                rejected += 1;
            }
        }
        assert_eq!(rejected, 40);
    }

    #[test]
    fn purification_uses_the_cap() {
        // x = (g - z0) / p with z0 the lowest digits of g, so p x = g - z0
        let model = CornerModel::build(CornerParams::default(), 3).unwrap();
        let ring = model.padic_ring().clone();
        let g = &model.generators()[0].vector;
        let p = BigUint::from(model.params.p);
        let mut x = PadicVector::zero(&ring);
        for (&i, v) in g.entries() {
            x.set(i, (v - (v % &p)) / &p);
        }
        let all = model.labels();
        let rep = model.membership(&x, &all).unwrap();
        assert_eq!(rep.verdict, Verdict::InAtPrecision);
        let cert = rep.certificate.unwrap();
        assert_eq!(cert.k, 1);
        assert!(verify_certificate(&model, &x, &cert).unwrap());

        let mut capped = model.params.clone();
        capped.cap = 0;
        let m0 = CornerModel::from_elements(capped, model.seed, model.elements.clone()).unwrap();
        assert_eq!(m0.membership(&x, &all).unwrap().verdict, Verdict::NotIn);
    }

    #[test]
    fn multiplications_pass_the_probe() {
        let model = gaussian_model(2);
        let all = model.labels();
        for r in [[1i64, 0], [0, 0], [0, 1], [3, -2]] {
            let r: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
            assert!(mult_by_r_probe(&model, &r, &all).unwrap());
        }
    }

    #[test]
    fn multiplication_is_consistent_and_identity_is_not() {
        let model = gaussian_model(4);
        let r = vec![BigInt::from(2), BigInt::from(-1)];
        let phi = AdditiveMap::multiplication(&model.params.ring, model.params.module_rank, &r);
        assert_eq!(phi.as_multiplication(&model.params.ring, 3), Some(r));
        let out = rigidity_trial_with(&model, &set(&[0]), &set(&[0, 1]), &phi).unwrap();
        assert_eq!(out.verdict, RigidityVerdict::Consistent);
        let id = AdditiveMap::identity(model.width());
        let out = rigidity_trial_with(&model, &set(&[0, 2]), &set(&[0, 1]), &id).unwrap();
        assert_eq!(out.verdict, RigidityVerdict::Violation);
        assert_eq!(out.failing_generator.map(|g| g.1), Some(2));
    }

    #[test]
    fn random_maps_violate() {
        let model = gaussian_model(5);
        let all = model.labels();
        for s in 0..5 {
            let out = rigidity_trial(&model, &all, &all, &Seed::new(s)).unwrap();
            assert_eq!(out.verdict, RigidityVerdict::Violation);
        }
    }

    #[test]
    fn accepted_set_closed_under_small_sums() {
        let model = gaussian_model(6);
        let all = model.labels();
        let solver = model.solver(&all).unwrap();
        let gens = model.generators();
        for pair in gens.windows(2) {
            let s = pair[0].vector.add(&pair[1].vector).unwrap();
            assert!(solver.is_member(&s).unwrap());
            let i = vec![BigInt::from(0), BigInt::from(1)];
            assert!(solver.is_member(&model.act(&i, &s)).unwrap());
        }
    }

    #[test]
    fn model_json_round_trip() {
        let model = gaussian_model(7);
        let json = serde_json::to_string(&model).unwrap();
        let back: CornerModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back.generators(), model.generators());
    }

    #[test]
    fn subsets_enumerated() {
        let s = label_subsets(&[0, 1, 2]);
        assert_eq!(s.len(), 8);
        assert!(s[0].is_empty());
        assert_eq!(s[7], set(&[0, 1, 2]));
    }

    #[test]
    fn precision_mismatch_is_an_error() {
        let model = gaussian_model(8);
        let other = PadicRing::new(5, 15).unwrap();
        assert!(model.membership(&PadicVector::basis(&other, 0), &model.labels()).is_err());
    }
}
