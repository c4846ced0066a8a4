//! Seeded samplers for every random object used by the constructions.
//!
//! Every draw is a pure function of `(parameters, Seed)`. Seeds form a tree:
//! [`Seed::child`] appends a label to the derivation path, so independent
//! objects (tree digits, supports, trial runs) never share a stream and the
//! result does not depend on the order in which objects are generated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::{PadicApprox, PadicRing, PadicVector};

/// Depth used when sampling trees without an explicit request (31 digits).
pub const DEFAULT_TREE_DEPTH: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub root: u64,
    pub path: Vec<String>,
}

impl Seed {
    pub fn new(root: u64) -> Self {
        Self {
            root,
            path: Vec::new(),
        }
    }

    pub fn child(&self, label: impl fmt::Display) -> Self {
        let mut path = self.path.clone();
        path.push(label.to_string());
        Self {
            root: self.root,
            path,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(self.root.to_le_bytes());
        for label in &self.path {
            h.update((label.len() as u64).to_le_bytes());
            h.update(label.as_bytes());
        }
        ChaCha8Rng::from_seed(h.finalize().into())
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        for label in &self.path {
            write!(f, "/{label}")?;
        }
        Ok(())
    }
}

/// Uniform integer in `[0, p^digits)`, drawn one base-`p` digit at a time so
/// that more digits only extend the same expansion.
fn uniform_digits(p: u64, digits: u32, seed: &Seed) -> BigUint {
    let mut rng = seed.rng();
    let mut acc = BigUint::zero();
    let mut place = BigUint::from(1u32);
    for _ in 0..digits {
        let d = rng.gen_range(0..p);
        acc += &place * d;
        place *= p;
    }
    acc
}

/// Uniform residue mod `p^N`. Refinement: the precision-`N` draw is the
/// reduction of the precision-`N+1` draw under the same seed.
pub fn sample_uniform(p: u64, precision: u32, seed: &Seed) -> Result<PadicApprox> {
    let ring = PadicRing::new(p, precision)?;
    Ok(ring.element(uniform_digits(p, precision, seed))?)
}

/// A finite 0-1 sequence, written as a string of `0`/`1` characters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinarySeq(pub Vec<bool>);

impl BinarySeq {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Initial segment `s|n`.
    pub fn prefix(&self, n: usize) -> Self {
        Self(self.0[..n].to_vec())
    }

    /// Bits of `value`, least significant first, padded to `len`.
    pub fn from_index(value: u64, len: usize) -> Self {
        Self((0..len).map(|i| i < 64 && (value >> i) & 1 == 1).collect())
    }

    /// All sequences of length exactly `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Self> {
        (0..1u64 << len).map(move |v| Self((0..len).rev().map(|i| (v >> i) & 1 == 1).collect()))
    }
}

impl fmt::Display for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinarySeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("`{s}` is not a 0-1 sequence"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl Serialize for BinarySeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinarySeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of base-`p` digits of the tree digit `a_s` for `len(s) = n`:
/// `a_s` ranges over `[0, p^(2^(n+1) - 2^n))`.
pub fn digit_width(n: usize) -> u32 {
    1u32 << n
}

/// Precision of `b_s` for `len(s) = n`, namely `2^(n+1) - 1`.
pub fn level_precision(n: usize) -> u32 {
    (1u32 << (n + 1)) - 1
}

/// The random digits `a_s` of a binary tree of depth `depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCoefficients {
    p: u64,
    depth: u32,
    #[serde(with = "digit_map")]
    digits: BTreeMap<BinarySeq, BigUint>,
}

mod digit_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<BinarySeq, BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: BTreeMap<String, String> = m
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_str_radix(10)))
            .collect();
        wire.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<BinarySeq, BigUint>, D::Error> {
        let wire = BTreeMap::<String, String>::deserialize(d)?;
        wire.into_iter()
            .map(|(k, v)| {
                let k = k.parse().map_err(serde::de::Error::custom)?;
                let v = v.parse().map_err(serde::de::Error::custom)?;
                Ok((k, v))
            })
            .collect()
    }
}

fn tree_digit_seed(seed: &Seed, s: &BinarySeq) -> Seed {
    seed.child(format!("a[{s}]"))
}

impl TreeCoefficients {
    /// Builds a tree from explicit digits, checking the range and shape
    /// invariants.
    pub fn from_digits(p: u64, depth: u32, digits: BTreeMap<BinarySeq, BigUint>) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let expected: usize = (0..=depth).map(|n| 1usize << n).sum();
        if digits.len() != expected {
            return Err(Error::InvalidInput(format!(
                "depth {depth} needs {expected} digits, got {}",
                digits.len()
            )));
        }
        for (s, a) in &digits {
            if s.len() > depth as usize {
                return Err(Error::InvalidInput(format!("sequence {s} deeper than {depth}")));
            }
            if a >= &arith::pow_u64(p, digit_width(s.len())) {
                return Err(Error::InvalidInput(format!("digit a_{s} = {a} out of range")));
            }
        }
        Ok(Self { p, depth, digits })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn digits(&self) -> &BTreeMap<BinarySeq, BigUint> {
        &self.digits
    }

    pub fn digit(&self, s: &BinarySeq) -> Option<&BigUint> {
        self.digits.get(s)
    }

    /// `b_s = sum_{j<=n} p^(2^j - 1) a_{s|j}` at precision `2^(n+1) - 1`.
    pub fn partial_sum_b(&self, s: &BinarySeq) -> Result<PadicApprox> {
        if s.len() > self.depth as usize {
            return Err(Error::InvalidInput(format!(
                "sequence of length {} exceeds depth {}",
                s.len(),
                self.depth
            )));
        }
        let ring = PadicRing::new_unchecked(self.p, level_precision(s.len()));
        let mut acc = BigUint::zero();
        for j in 0..=s.len() {
            let a = &self.digits[&s.prefix(j)];
            acc += arith::pow_u64(self.p, (1u32 << j) - 1) * a;
        }
        ring.element(acc)
    }

    /// The branch value `xi_f` truncated at the tree depth; precision
    /// `2^(depth+1) - 1`.
    pub fn xi_of_branch(&self, f: &BinarySeq) -> Result<PadicApprox> {
        if f.len() != self.depth as usize {
            return Err(Error::InvalidInput(format!(
                "branch of length {} in a tree of depth {}",
                f.len(),
                self.depth
            )));
        }
        self.partial_sum_b(f)
    }
}

/// Samples `a_s` uniformly and independently for every `s` of length at most
/// `depth`.
pub fn sample_tree(p: u64, depth: u32, seed: &Seed) -> Result<TreeCoefficients> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if depth > 20 {
        return Err(Error::InvalidParameter(format!("tree depth {depth} too large")));
    }
    let mut digits = BTreeMap::new();
    for n in 0..=depth as usize {
        for s in BinarySeq::all_of_length(n) {
            let a = uniform_digits(p, digit_width(n), &tree_digit_seed(seed, &s));
            digits.insert(s, a);
        }
    }
    Ok(TreeCoefficients { p, depth, digits })
}

/// `xi_f` for a single branch without materialising the whole tree. Agrees
/// with `sample_tree(p, len(f), seed).xi_of_branch(f)`.
pub fn sample_branch_value(p: u64, f: &BinarySeq, seed: &Seed) -> Result<PadicApprox> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let ring = PadicRing::new_unchecked(p, level_precision(f.len()));
    let mut acc = BigUint::zero();
    for j in 0..=f.len() {
        let a = uniform_digits(p, digit_width(j), &tree_digit_seed(seed, &f.prefix(j)));
        acc += arith::pow_u64(p, (1u32 << j) - 1) * a;
    }
    ring.element(acc)
}

/// Smallest tree depth giving at least `precision` digits and at least
/// `branches` distinct branches, never below [`DEFAULT_TREE_DEPTH`].
pub fn depth_for(precision: u32, branches: u64) -> u32 {
    let mut d = DEFAULT_TREE_DEPTH;
    while level_precision(d as usize) < precision || (1u64 << d) < branches {
        d += 1;
    }
    d
}

/// Random non-empty finite set of basis indices.
///
/// Size `k` has law `P(k) = 2^-k`; indices are drawn i.i.d. with
/// `P(j) ∝ 2^-j`, duplicates redrawn. With a `window`, sizes above the window
/// and indices outside it are rejected and redrawn, which keeps every
/// non-empty subset of the window at positive probability.
pub fn sample_support(window: Option<usize>, seed: &Seed) -> Result<BTreeSet<usize>> {
    if window == Some(0) {
        return Err(Error::InvalidParameter("support window must be non-empty".into()));
    }
    let mut rng = seed.rng();
    let size = loop {
        let mut k = 1usize;
        while rng.gen_bool(0.5) {
            k += 1;
        }
        if window.map_or(true, |w| k <= w) {
            break k;
        }
    };
    let mut out = BTreeSet::new();
    while out.len() < size {
        let mut j = 0usize;
        while rng.gen_bool(0.5) {
            j += 1;
        }
        if window.map_or(true, |w| j < w) {
            out.insert(j);
        }
    }
    Ok(out)
}

/// One random element `a_n^alpha = sum_{b in I_n} b xi_{n,b}^alpha`, kept
/// as its support and coefficient map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportedElement {
    index: usize,
    label: u32,
    support: BTreeSet<usize>,
    coefficients: BTreeMap<usize, PadicApprox>,
}

impl SupportedElement {
    pub fn new(
        index: usize,
        label: u32,
        coefficients: BTreeMap<usize, PadicApprox>,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput("support must be non-empty".into()));
        }
        let mut rings = coefficients.values().map(|x| x.ring());
        let first = rings.next().expect("non-empty");
        if rings.any(|r| !r.same_as(first)) {
            return Err(Error::IncompatibleOperands("coefficients at mixed precision".into()));
        }
        Ok(Self {
            index,
            label,
            support: coefficients.keys().copied().collect(),
            coefficients,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> u32 {
        self.label
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, PadicApprox> {
        &self.coefficients
    }

    pub fn ring(&self) -> &Arc<PadicRing> {
        self.coefficients.values().next().expect("non-empty").ring()
    }
}

/// Samples the support `I_n` (shared by every label) and the coefficients
/// `xi_{n,b}^alpha` for each requested label. Each `(n, b)` owns one random
/// tree; label `alpha` selects the branch spelled by the bits of `alpha`.
pub fn sample_supported_elements(
    p: u64,
    precision: u32,
    index: usize,
    labels: &[u32],
    window: Option<usize>,
    seed: &Seed,
) -> Result<Vec<SupportedElement>> {
    let max_label = labels.iter().copied().max().unwrap_or(0) as u64;
    let depth = depth_for(precision, max_label + 1);
    let support = sample_support(window, &seed.child(format!("support[{index}]")))?;
    labels
        .iter()
        .map(|&label| {
            let branch = BinarySeq::from_index(label as u64, depth as usize);
            let coefficients = support
                .iter()
                .map(|&b| {
                    let tree_seed = seed.child(format!("xi[{index},{b}]"));
                    let xi = sample_branch_value(p, &branch, &tree_seed)?.reduce_precision(precision)?;
                    Ok((b, xi))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            SupportedElement::new(index, label, coefficients)
        })
        .collect()
}

/// Nearly uniform law on the completion: at precision `n` the coordinates
/// `e_0 .. e_{w(n)}` with `w(n) = ceil(n^(alpha-1))` are independent and
/// uniform mod `p^n`, all others zero. `min_window` optionally forces at
/// least that many coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearlyUniform {
    pub p: u64,
    pub alpha: f64,
    pub min_window: usize,
}

impl NearlyUniform {
    pub fn new(p: u64, alpha: f64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must exceed 1, got {alpha}")));
        }
        Ok(Self {
            p,
            alpha,
            min_window: 0,
        })
    }

    pub fn with_min_window(mut self, min_window: usize) -> Self {
        self.min_window = min_window;
        self
    }

    /// `w(n) = ceil(n^(alpha-1))`.
    pub fn window_index(&self, n: u32) -> usize {
        let x = (n as f64).powf(self.alpha - 1.0);
        (x - 1e-9).ceil().max(0.0) as usize
    }

    /// Number of populated coordinates at precision `n`.
    pub fn window_len(&self, n: u32) -> usize {
        (self.window_index(n) + 1).max(self.min_window)
    }

    /// Exact probability of any fixed coset of `p^n B`: `p^(-n * window_len)`.
    pub fn coset_probability_exponent(&self, n: u32) -> u64 {
        n as u64 * self.window_len(n) as u64
    }

    /// `log_p` of the required bound `p^(-n^alpha)`.
    pub fn bound_exponent(&self, n: u32) -> f64 {
        (n as f64).powf(self.alpha)
    }

    pub fn sample(&self, n: u32, seed: &Seed) -> Result<PadicVector> {
        if n == 0 {
            return Err(Error::InvalidParameter("precision must be positive".into()));
        }
        let ring = PadicRing::new_unchecked(self.p, n);
        let mut v = PadicVector::zero(&ring);
        for i in 0..self.window_len(n) {
            v.set(i, uniform_digits(self.p, n, &seed.child(format!("coord[{i}]"))));
        }
        Ok(v)
    }
}

pub fn sample_nearly_uniform(p: u64, n: u32, alpha: f64, seed: &Seed) -> Result<PadicVector> {
    NearlyUniform::new(p, alpha)?.sample(n, seed)
}
