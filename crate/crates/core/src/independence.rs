//! Bounded integer relation search among truncated p-adic numbers, and root
//! counting modulo prime powers.
//!
//! A relation of degree `<= d` and height `<= H` is an integer vector `c`,
//! indexed by monomials, with `sum c_m m(xs) = 0 mod p^N` and
//! `max |c_m| <= H`. Such vectors form the intersection of a box with the
//! kernel lattice of the monomial values; the lattice is reduced and the box
//! enumerated exactly, so "not found" means no relation exists within the
//! bounds at this precision.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::ReducedLattice;
use crate::padic::PadicApprox;
use crate::poly::{monomials, IntPolynomial, UniPoly};
use crate::zmod;

/// Largest monomial count accepted by [`find_relation`].
pub const MAX_MONOMIALS: usize = 64;
/// Enumeration node budget for a single relation search.
pub const NODE_LIMIT: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub found: bool,
    pub witness: Option<IntPolynomial>,
    pub degree_bound: u32,
    pub height_bound: u64,
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub monomials: usize,
    /// Always "relation at precision N": a vanishing residue is not a proof
    /// of algebraic dependence.
    pub meaning: String,
}

pub fn evaluate(f: &IntPolynomial, xs: &[PadicApprox]) -> Result<PadicApprox> {
    f.evaluate(xs)
}

fn cmp_witness(a: &[BigInt], b: &[BigInt]) -> std::cmp::Ordering {
    let inf = |v: &[BigInt]| v.iter().map(|x| x.abs()).max().unwrap_or_default();
    let l1 = |v: &[BigInt]| v.iter().map(|x| x.abs()).sum::<BigInt>();
    inf(a)
        .cmp(&inf(b))
        .then_with(|| l1(a).cmp(&l1(b)))
        .then_with(|| a.cmp(b))
}

/// Searches for a non-zero polynomial of total degree `<= d` and height
/// `<= h` vanishing on `xs` modulo `p^N`. The returned witness is the
/// smallest such relation (by max-norm, then 1-norm) with a positive
/// leading coefficient in graded lexicographic order.
pub fn find_relation(xs: &[PadicApprox], d: u32, h: u64) -> Result<RelationReport> {
    let Some(first) = xs.first() else {
        return Err(Error::InvalidInput("no values given".into()));
    };
    let ring = first.ring().clone();
    if xs.iter().any(|x| !x.ring().same_as(&ring)) {
        return Err(Error::IncompatibleOperands("values differ in p or N".into()));
    }
    if h == 0 {
        return Err(Error::InvalidParameter("height bound must be positive".into()));
    }
    let monos = monomials(xs.len(), d);
    if monos.len() > MAX_MONOMIALS {
        return Err(Error::ResourceLimit(format!(
            "{} monomials exceed the limit of {MAX_MONOMIALS}",
            monos.len()
        )));
    }
    let vars = xs.len();
    let values: Vec<Vec<BigUint>> = monos
        .iter()
        .map(|e| {
            let f = IntPolynomial::from_terms(vars, [(e.clone(), BigInt::one())]);
            Ok(vec![f.evaluate(xs)?.residue().clone()])
        })
        .collect::<Result<_>>()?;
    let basis = zmod::kernel_lattice(&ring, &values, 1);
    let lattice = ReducedLattice::new(basis)?;
    let zero = vec![BigInt::zero(); monos.len()];
    // growing boxes; the first non-empty one holds the minimal witness
    let mut best: Option<Vec<BigInt>> = None;
    let mut t = 1u64;
    loop {
        let t_box = t.min(h);
        lattice.enumerate_box(&zero, t_box, NODE_LIMIT, |c| {
            if c.iter().all(|x| x.is_zero()) {
                return true;
            }
            let mut c = c.to_vec();
            if c.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                for x in c.iter_mut() {
                    *x = -&*x;
                }
            }
            if best.as_ref().map_or(true, |b| cmp_witness(&c, b).is_lt()) {
                best = Some(c);
            }
            true
        })?;
        if best.is_some() || t_box == h {
            break;
        }
        t = t.saturating_mul(2);
    }
    let witness = best.map(|c| {
        IntPolynomial::from_terms(vars, monos.iter().cloned().zip(c))
    });
    if let Some(w) = &witness {
        // self-check
        if !w.evaluate(xs)?.is_zero() {
            return Err(Error::Inconclusive("relation witness failed re-evaluation".into()));
        }
    }
    Ok(RelationReport {
        found: witness.is_some(),
        witness,
        degree_bound: d,
        height_bound: h,
        p: ring.p(),
        precision: ring.precision(),
        monomials: monos.len(),
        meaning: format!("relation at precision {}", ring.precision()),
    })
}

/// Number of `x in [0, p^N)` with `g(x) = 0 mod p^N`, by lifting root
/// classes level by level. A class whose every lift is a root is counted in
/// one step.
pub fn count_roots_mod_pn(g: &UniPoly, p: u64, n: u32) -> Result<BigUint> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    let modulus = BigInt::from(arith::pow_u64(p, n));
    Ok(count_from(g, p, n, &modulus, &BigInt::zero(), 0))
}

fn count_from(g: &UniPoly, p: u64, n: u32, modulus: &BigInt, r: &BigInt, k: u32) -> BigUint {
    if k == n {
        return BigUint::one();
    }
    // coefficients of g(r + p^k y); all divisible by p^N means a full class
    let shifted = g.taylor_shift(r);
    let pk = BigInt::from(arith::pow_u64(p, k));
    let mut scale = BigInt::one();
    let mut full = true;
    for c in shifted.coeffs() {
        if !(c * &scale).is_multiple_of(modulus) {
            full = false;
            break;
        }
        scale *= &pk;
    }
    if full {
        return arith::pow_u64(p, n - k);
    }
    let next = BigInt::from(arith::pow_u64(p, k + 1));
    let mut total = BigUint::zero();
    for t in 0..p {
        let r2 = r + &pk * t;
        if g.eval(&r2).is_multiple_of(&next) {
            total += count_from(g, p, n, modulus, &r2, k + 1);
        }
    }
    total
}

/// Brute-force root count for small moduli.
pub fn count_roots_brute(g: &UniPoly, p: u64, n: u32) -> u64 {
    let m = p.pow(n);
    let coeffs = g.residues_u64(m);
    (0..m)
        .filter(|&x| {
            coeffs
                .iter()
                .rev()
                .fold(0u128, |acc, &c| (acc * x as u128 + c as u128) % m as u128)
                == 0
        })
        .count() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootBound {
    #[serde(with = "arith::decimal")]
    pub count: BigUint,
    /// `l p^(N - floor((N - M)/l))`; absent when `l = 0`.
    pub bound: Option<String>,
    pub holds: bool,
}

/// Checks `R(N) <= l p^(N - floor((N-M)/l))` for `g = h * prod (x - lambda_i)`.
pub fn root_bound_check(
    g: &UniPoly,
    lambdas: &[BigInt],
    h: &UniPoly,
    m: u32,
    p: u64,
    n: u32,
) -> Result<RootBound> {
    if n <= m {
        return Err(Error::InvalidParameter(format!("need N > M, got N={n}, M={m}")));
    }
    let product = lambdas
        .iter()
        .fold(h.clone(), |acc, l| acc.mul(&UniPoly::linear(l)));
    if &product != g {
        return Err(Error::InvalidInput("g differs from h * prod(x - lambda_i)".into()));
    }
    if let Some(pm) = p.checked_pow(m + 1).filter(|&pm| pm <= 1_000_000) {
        if count_roots_brute(h, p, m + 1) > 0 {
            return Err(Error::InvalidInput(format!(
                "h has a root modulo p^{} = {pm}",
                m + 1
            )));
        }
    }
    let count = count_roots_mod_pn(g, p, n)?;
    let l = lambdas.len() as u32;
    if l == 0 {
        return Ok(RootBound {
            holds: count.is_zero(),
            count,
            bound: None,
        });
    }
    let bound = BigUint::from(l) * arith::pow_u64(p, n - (n - m) / l);
    Ok(RootBound {
        holds: count <= bound,
        count,
        bound: Some(bound.to_string()),
    })
}
