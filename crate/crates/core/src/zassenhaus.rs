//! Prime-by-prime construction data for realizing a ring as an endomorphism
//! ring: `M = <A, p^(-r_p) (c_p - a_p) A : p>`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::density::{primes_up_to, roots_mod_p};
use crate::random::Seed;
use crate::ring::{order_in_qa_mod_a, RationalVector, RingPresentation};
use crate::{Error, Result};

pub const DEFAULT_BOX: u64 = 3;

/// Construction data at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZassenhausDatum {
    pub p: u64,
    #[serde(with = "arith::decimal_signed_vec")]
    pub a: Vec<BigInt>,
    pub c: u64,
    pub r: u32,
    #[serde(with = "arith::decimal_signed")]
    pub d: BigInt,
    /// Order of `(c - a)^-1` in `QA/A` is prime to `p`; `r = 1` by convention.
    pub inert: bool,
}

fn c_minus_a(ring: &RingPresentation, c: u64, a: &[BigInt]) -> Vec<BigInt> {
    ring.scalar(&BigInt::from(c)).iter().zip(a).map(|(x, y)| x - y).collect()
}

/// Minimal `(r, d)` with `p^r d (c - a)^-1` in `A` and `d` prime to `p`.
pub fn complete_datum(ring: &RingPresentation, p: u64, a: &[BigInt], c: u64) -> Result<ZassenhausDatum> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a.len() != ring.rank() {
        return Err(Error::Arity {
            expected: ring.rank(),
            got: a.len(),
        });
    }
    let inv = ring.invert_in_qa(&c_minus_a(ring, c, a))?;
    let m = order_in_qa_mod_a(&inv);
    let v = arith::valuation_int(&m, p).expect("order is non-zero");
    let d = &m / BigInt::from(arith::pow_u64(p, v));
    Ok(ZassenhausDatum {
        p,
        a: a.to_vec(),
        c,
        r: v.max(1),
        d,
        inert: v == 0,
    })
}

/// `p^r d (c - a)^-1` lies in `A`, `gcd(d, p) = 1`, `c` in `[p, 2p-1]`.
pub fn check_datum(ring: &RingPresentation, datum: &ZassenhausDatum) -> Result<bool> {
    let inv = ring.invert_in_qa(&c_minus_a(ring, datum.c, &datum.a))?;
    let scale = BigRational::from_integer(BigInt::from(arith::pow_u64(datum.p, datum.r)) * &datum.d);
    let in_range = (datum.p..2 * datum.p).contains(&datum.c);
    let coprime = !datum.d.is_zero() && (&datum.d % BigInt::from(datum.p)) != BigInt::zero();
    Ok(in_range && coprime && datum.r >= 1 && inv.scale(&scale).is_integral())
}

/// Lowering `r` (while keeping it positive) breaks integrality.
pub fn is_minimal(ring: &RingPresentation, datum: &ZassenhausDatum) -> Result<bool> {
    if datum.r <= 1 {
        return Ok(true);
    }
    let inv = ring.invert_in_qa(&c_minus_a(ring, datum.c, &datum.a))?;
    let scale = BigRational::from_integer(BigInt::from(arith::pow_u64(datum.p, datum.r - 1)) * &datum.d);
    Ok(!inv.scale(&scale).is_integral())
}

/// Draws `a` uniformly from the non-zero vectors in `[-H, H]^n` and `c`
/// uniformly from `[p, 2p-1]`; `None` when `c - a` is not invertible.
pub fn sample_datum(ring: &RingPresentation, p: u64, h: u64, seed: &Seed) -> Result<Option<ZassenhausDatum>> {
    if h == 0 {
        return Err(Error::InvalidParameter("box bound H must be at least 1".into()));
    }
    let (a, c) = sample_pair(ring.rank(), p, h, seed);
    match complete_datum(ring, p, &a, c) {
        Ok(d) => Ok(Some(d)),
        Err(Error::NonInvertible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn sample_pair(rank: usize, p: u64, h: u64, seed: &Seed) -> (Vec<BigInt>, u64) {
    let mut rng = seed.rng();
    let h = h as i64;
    let a = loop {
        let a: Vec<i64> = (0..rank).map(|_| rng.gen_range(-h..=h)).collect();
        if a.iter().any(|&x| x != 0) {
            break a;
        }
    };
    let c = rng.gen_range(p..2 * p);
    (a.into_iter().map(BigInt::from).collect(), c)
}

/// `datum.a = a` and `p` divides the order of `(c - a)^-1 e`.
pub fn verify_pair(ring: &RingPresentation, a: &[BigInt], e: &[BigInt], datum: &ZassenhausDatum) -> Result<bool> {
    if e.iter().all(|x| x.is_zero()) {
        return Err(Error::InvalidInput("e must be non-zero".into()));
    }
    let inv = ring.invert_in_qa(&c_minus_a(ring, datum.c, &datum.a))?;
    if datum.a != a {
        return Ok(false);
    }
    let y = ring.mul_rational(&inv, &RationalVector::from_ints(e));
    Ok(order_in_qa_mod_a(&y).is_multiple_of(&BigInt::from(datum.p)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanHit {
    pub p: u64,
    pub c: u64,
    pub root: u64,
    pub datum: ZassenhausDatum,
}

/// Primes `p <= budget` outside the exceptional set, ascending; for each
/// root `c0` of `f` mod `p` tries `c = c0 + p`. Stops after `max_hits`.
pub fn deterministic_scan(
    ring: &RingPresentation,
    a: &[BigInt],
    e: &[BigInt],
    budget: u64,
    max_hits: usize,
) -> Result<(Vec<ScanHit>, crate::ring::DenominatorData, u64)> {
    let data = ring.denominator_polynomial(a, e)?;
    let primes: Vec<u64> = primes_up_to(budget).into_iter().filter(|&p| !data.is_exceptional(p)).collect();
    let mut hits = Vec::new();
    let mut scanned = 0u64;
    for chunk in primes.chunks(256) {
        let found: Vec<Vec<ScanHit>> = chunk
            .par_iter()
            .map(|&p| -> Result<Vec<ScanHit>> {
                let mut out = Vec::new();
                for c0 in roots_mod_p(&data.f, p)? {
                    let c = c0 + p;
                    let datum = match complete_datum(ring, p, a, c) {
                        Ok(d) => d,
                        Err(Error::NonInvertible(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    if verify_pair(ring, a, e, &datum)? {
                        out.push(ScanHit { p, c, root: c0, datum });
                        break;
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        for h in found {
            scanned += 1;
            hits.extend(h);
            if hits.len() >= max_hits {
                hits.truncate(max_hits);
                return Ok((hits, data, scanned));
            }
        }
    }
    Ok((hits, data, scanned))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ScanStatus {
    Verified { p: u64, c: u64 },
    BudgetExhausted { primes_scanned: u64 },
    NoDenominator { reason: String },
}

/// A sampled datum with `a_p = a` for a requested pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coincidence {
    pub p: u64,
    pub c: u64,
    /// `f(c) = 0 mod p`.
    pub root: bool,
    pub exceptional: bool,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    #[serde(with = "arith::decimal_signed_vec")]
    pub a: Vec<BigInt>,
    #[serde(with = "arith::decimal_signed_vec")]
    pub e: Vec<BigInt>,
    /// Denominator polynomial of `(c - a)^-1 e`, when one exists.
    pub f: Option<String>,
    pub exceptional_primes: Vec<u64>,
    pub deterministic: ScanStatus,
    /// Smallest sampled prime verifying the pair.
    pub sampled: Option<u64>,
    pub coincidences: Vec<Coincidence>,
    /// Every coincidence at a non-exceptional root was verified.
    pub agreement: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub ring: RingPresentation,
    pub budget: u64,
    #[serde(rename = "H")]
    pub box_bound: u64,
    pub data: Vec<ZassenhausDatum>,
    /// Primes where the sampled `c - a` was singular.
    pub skipped: Vec<u64>,
    pub pairs: Vec<PairReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizeParams {
    pub budget: u64,
    #[serde(rename = "H")]
    pub box_bound: u64,
    pub deterministic_only: bool,
}

impl Default for RealizeParams {
    fn default() -> Self {
        Self {
            budget: 10_000,
            box_bound: DEFAULT_BOX,
            deterministic_only: false,
        }
    }
}

/// Pairs `(b_i, 1)` for each basis element.
pub fn auto_pairs(ring: &RingPresentation) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
    (0..ring.rank()).map(|i| (ring.basis(i), ring.one())).collect()
}

pub fn realize(
    ring: &RingPresentation,
    pairs: &[(Vec<BigInt>, Vec<BigInt>)],
    params: &RealizeParams,
    seed: &Seed,
) -> Result<ConstructionReport> {
    if params.budget < 2 {
        return Err(Error::InvalidParameter(format!("budget must be at least 2, got {}", params.budget)));
    }
    if params.box_bound == 0 {
        return Err(Error::InvalidParameter("box bound H must be at least 1".into()));
    }
    if let Err(v) = ring.validate() {
        return Err(Error::InvalidInput(format!("ring presentation has {} violations", v.len())));
    }
    let h = BigInt::from(params.box_bound);
    for (a, e) in pairs {
        if a.len() != ring.rank() || e.len() != ring.rank() {
            return Err(Error::Arity {
                expected: ring.rank(),
                got: a.len().min(e.len()),
            });
        }
        if a.iter().all(|x| x.is_zero()) || e.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidInput("pairs need non-zero a and e".into()));
        }
        if a.iter().any(|x| x.abs() > h) {
            return Err(Error::InvalidParameter(format!("pair element {a:?} exceeds the box H = {h}")));
        }
    }

    let mut data = Vec::new();
    let mut skipped = Vec::new();
    if !params.deterministic_only {
        let sampled: Vec<(u64, Option<ZassenhausDatum>)> = primes_up_to(params.budget)
            .into_par_iter()
            .map(|p| Ok((p, sample_datum(ring, p, params.box_bound, &seed.child(format!("prime[{p}]")))?)))
            .collect::<Result<_>>()?;
        for (p, d) in sampled {
            match d {
                Some(d) => data.push(d),
                None => skipped.push(p),
            }
        }
    }

    let mut reports = Vec::with_capacity(pairs.len());
    for (a, e) in pairs {
        let (f, exceptional, deterministic) = match deterministic_scan(ring, a, e, params.budget, 1) {
            Ok((hits, dd, scanned)) => {
                let status = match hits.first() {
                    Some(hit) => ScanStatus::Verified { p: hit.p, c: hit.c },
                    None => ScanStatus::BudgetExhausted { primes_scanned: scanned },
                };
                (Some(dd.f.clone()), dd.exceptional_primes.clone(), status)
            }
            Err(Error::Inconclusive(reason)) => (None, Vec::new(), ScanStatus::NoDenominator { reason }),
            Err(err) => return Err(err),
        };
        let mut coincidences = Vec::new();
        let mut sampled_hit = None;
        for d in data.iter().filter(|d| &d.a == a) {
            let verified = verify_pair(ring, a, e, d)?;
            if verified && sampled_hit.is_none() {
                sampled_hit = Some(d.p);
            }
            let root = f.as_ref().is_some_and(|f| {
                let c = f.residues_u64(d.p);
                c.iter().rev().fold(0u128, |acc, &k| (acc * d.c as u128 + k as u128) % d.p as u128) == 0
            });
            coincidences.push(Coincidence {
                p: d.p,
                c: d.c,
                root,
                exceptional: exceptional.contains(&d.p),
                verified,
            });
        }
        let agreement = coincidences.iter().all(|c| !c.root || c.exceptional || c.verified);
        reports.push(PairReport {
            a: a.clone(),
            e: e.clone(),
            f: f.map(|f| f.to_string()),
            exceptional_primes: exceptional,
            deterministic,
            sampled: sampled_hit,
            coincidences,
            agreement,
        });
    }
    Ok(ConstructionReport {
        ring: ring.clone(),
        budget: params.budget,
        box_bound: params.box_bound,
        data,
        skipped,
        pairs: reports,
    })
}

/// Decomposition `p_i^(-r_i) (c_i - a_i) m = a + sum_j p_j^(-r_j) (c_j - a_j) b_j`
/// with `a` and every `b_j` in `A`; `j` indexes the data list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    #[serde(with = "arith::decimal_signed_vec")]
    pub a: Vec<BigInt>,
    pub terms: Vec<CertificateTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub datum: usize,
    #[serde(with = "arith::decimal_signed_vec")]
    pub b: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub holds: bool,
    pub p: u64,
    #[serde(with = "arith::decimal_signed")]
    pub order_of_m: BigInt,
    /// Order of `d_i m` computed from the multiplied right-hand side.
    #[serde(with = "arith::decimal_signed")]
    pub order_of_rhs: BigInt,
}

fn generator(ring: &RingPresentation, d: &ZassenhausDatum) -> RationalVector {
    let x = RationalVector::from_ints(&c_minus_a(ring, d.c, &d.a));
    x.scale(&BigRational::new(BigInt::one(), BigInt::from(arith::pow_u64(d.p, d.r))))
}

/// Checks the certificate, multiplies it on the left by
/// `p^r d (c - a)^-1` and confirms `p_i` divides neither the order of the
/// resulting right-hand side nor that of `m`.
pub fn order_condition_check(
    ring: &RingPresentation,
    data: &[ZassenhausDatum],
    m: &RationalVector,
    i: usize,
    cert: &MembershipCertificate,
) -> Result<OrderCheck> {
    let di = data
        .get(i)
        .ok_or_else(|| Error::InvalidParameter(format!("datum index {i} out of range")))?;
    let n = ring.rank();
    if m.0.len() != n || cert.a.len() != n || cert.terms.iter().any(|t| t.b.len() != n) {
        return Err(Error::InvalidInput("certificate dimensions do not match the ring".into()));
    }
    let lhs = ring.mul_rational(&generator(ring, di), m);
    let mut rhs = RationalVector::from_ints(&cert.a);
    for t in &cert.terms {
        let dj = data
            .get(t.datum)
            .ok_or_else(|| Error::InvalidInput(format!("certificate refers to missing datum {}", t.datum)))?;
        rhs = rhs.add(&ring.mul_rational(&generator(ring, dj), &RationalVector::from_ints(&t.b)));
    }
    if lhs != rhs {
        return Err(Error::InvalidInput("certificate sides differ".into()));
    }
    let inv = ring.invert_in_qa(&c_minus_a(ring, di.c, &di.a))?;
    let scale = BigRational::from_integer(BigInt::from(arith::pow_u64(di.p, di.r)) * &di.d);
    let a_tilde = inv.scale(&scale);
    let multiplied = ring.mul_rational(&a_tilde, &rhs);
    let dm = m.scale(&BigRational::from_integer(di.d.clone()));
    if multiplied != dm {
        return Err(Error::InvalidInput("multiplied certificate does not reproduce d m".into()));
    }
    let p = BigInt::from(di.p);
    let order_of_rhs = order_in_qa_mod_a(&multiplied);
    let order_of_m = order_in_qa_mod_a(m);
    Ok(OrderCheck {
        holds: !order_of_rhs.is_multiple_of(&p) && !order_of_m.is_multiple_of(&p),
        p: di.p,
        order_of_m,
        order_of_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn integer_data() {
        let z = RingPresentation::integers();
        let d = complete_datum(&z, 3, &ints(&[1]), 4).unwrap();
        assert_eq!((d.r, d.d.clone(), d.inert), (1, BigInt::from(1), false));
        let d = complete_datum(&z, 3, &ints(&[1]), 5).unwrap();
        assert_eq!((d.r, d.d.clone(), d.inert), (1, BigInt::from(4), true));
        assert!(check_datum(&z, &d).unwrap());
        assert!(matches!(complete_datum(&z, 3, &ints(&[4]), 4), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn gaussian_datum() {
        let zi = RingPresentation::gaussian_integers();
        let d = complete_datum(&zi, 5, &ints(&[0, 1]), 7).unwrap();
        assert_eq!((d.r, d.d.clone()), (2, BigInt::from(2)));
        assert!(check_datum(&zi, &d).unwrap());
        assert!(is_minimal(&zi, &d).unwrap());
    }

    #[test]
    fn pair_verification() {
        let z = RingPresentation::integers();
        let one = ints(&[1]);
        let d = complete_datum(&z, 3, &one, 4).unwrap();
        assert!(verify_pair(&z, &one, &one, &d).unwrap());
        let d5 = complete_datum(&z, 3, &one, 5).unwrap();
        assert!(!verify_pair(&z, &one, &one, &d5).unwrap());
        assert!(!verify_pair(&z, &ints(&[2]), &one, &d).unwrap());
    }

    #[test]
    fn integer_scan() {
        let z = RingPresentation::integers();
        let one = ints(&[1]);
        let (hits, data, _) = deterministic_scan(&z, &one, &one, 100, 3).unwrap();
        assert!(data.exceptional_primes.is_empty());
        let found: Vec<(u64, u64)> = hits.iter().map(|h| (h.p, h.c)).collect();
        assert_eq!(found, vec![(2, 3), (3, 4), (5, 6)]);
    }

    #[test]
    fn gaussian_scan_uses_roots() {
        let zi = RingPresentation::gaussian_integers();
        let (a, e) = (ints(&[0, 1]), ints(&[1, 0]));
        let (hits, data, _) = deterministic_scan(&zi, &a, &e, 10_000, 10).unwrap();
        assert_eq!(data.f.to_string(), "x^2 + 1");
        assert_eq!(hits.len(), 10);
        for h in &hits {
            assert!(h.p == 2 || h.p % 4 == 1);
            assert_eq!((h.c * h.c + 1) % h.p, 0);
            assert!(!data.is_exceptional(h.p));
            assert!(check_datum(&zi, &h.datum).unwrap());
        }
    }

    #[test]
    fn realize_reports() {
        let zi = RingPresentation::gaussian_integers();
        let pairs = vec![(ints(&[0, 1]), ints(&[1, 0]))];
        let params = RealizeParams {
            budget: 2000,
            ..Default::default()
        };
        let rep = realize(&zi, &pairs, &params, &Seed::new(1)).unwrap();
        assert!(matches!(rep.pairs[0].deterministic, ScanStatus::Verified { .. }));
        assert!(rep.pairs[0].agreement);
        let mut ps: Vec<u64> = rep.data.iter().map(|d| d.p).chain(rep.skipped.iter().copied()).collect();
        let len = ps.len();
        ps.dedup();
        assert_eq!(ps.len(), len);
        assert_eq!(len, primes_up_to(2000).len());
        for d in &rep.data {
            assert!(check_datum(&zi, d).unwrap());
        }

        let empty = realize(&zi, &[], &params, &Seed::new(1)).unwrap();
        assert!(empty.pairs.is_empty());
        assert!(!empty.data.is_empty());

        let too_big = vec![(ints(&[0, 9]), ints(&[1, 0]))];
        assert!(matches!(realize(&zi, &too_big, &params, &Seed::new(1)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // x^2 + 1 has no root mod 3, and 2 is the only smaller prime
        let zi = RingPresentation::gaussian_integers();
        let params = RealizeParams {
            budget: 4,
            deterministic_only: true,
            ..Default::default()
        };
        let rep = realize(&zi, &[(ints(&[0, 1]), ints(&[1, 0]))], &params, &Seed::new(0)).unwrap();
        // p = 2: c = 3, (3 - i)^-1 = (3 + i)/10, order 10
        assert_eq!(rep.pairs[0].deterministic, ScanStatus::Verified { p: 2, c: 3 });
        let params = RealizeParams { budget: 2, ..params };
        let rep = realize(&RingPresentation::integers(), &[(ints(&[2]), ints(&[1]))], &params, &Seed::new(0)).unwrap();
        // the only root lift at p = 2 is c = 2 = a, which is singular
        assert_eq!(rep.pairs[0].deterministic, ScanStatus::BudgetExhausted { primes_scanned: 1 });
        let params = RealizeParams { budget: 3, ..params };
        let rep = realize(&zi, &[(ints(&[1, 0]), ints(&[0, 3]))], &params, &Seed::new(0)).unwrap();
        // (c - 1)^-1 * 3i: p = 3 is exceptional (resultant 3), p = 2 gives c = 3, order of 3i/2 is 2
        assert_eq!(rep.pairs[0].exceptional_primes, vec![3]);
        assert_eq!(rep.pairs[0].deterministic, ScanStatus::Verified { p: 2, c: 3 });
        let rep = realize(
            &zi,
            &[(ints(&[1, 0]), ints(&[0, 6]))],
            &RealizeParams { budget: 3, ..params },
            &Seed::new(0),
        )
        .unwrap();
        assert_eq!(rep.pairs[0].deterministic, ScanStatus::BudgetExhausted { primes_scanned: 0 });
    }

    #[test]
    fn sampler_frequencies() {
        let z = RingPresentation::integers();
        let trials = 4000;
        let mut plus = 0;
        for t in 0..trials {
            let d = sample_datum(&z, 7, 1, &Seed::new(3).child(t)).unwrap().unwrap();
            assert!((7..14).contains(&d.c));
            assert!(d.a == ints(&[1]) || d.a == ints(&[-1]));
            plus += (d.a == ints(&[1])) as u32;
        }
        let f = plus as f64 / trials as f64;
        assert!((f - 0.5).abs() <= 3.0 * (0.25f64 / trials as f64).sqrt());
    }

    #[test]
    fn sampler_skip_rate_matches_singular_count() {
        let zz = RingPresentation::bundled("z_cross_z").unwrap();
        let (p, h) = (2u64, 3i64);
        // exhaustive: c - a singular iff c equals a coordinate of a
        let mut singular = 0;
        let mut total = 0;
        for a0 in -h..=h {
            for a1 in -h..=h {
                if a0 == 0 && a1 == 0 {
                    continue;
                }
                for c in p..2 * p {
                    total += 1;
                    singular += (a0 == c as i64 || a1 == c as i64) as u32;
                }
            }
        }
        let exact = singular as f64 / total as f64;
        let trials = 4000;
        let skips = (0..trials)
            .filter(|&t| sample_datum(&zz, p, h as u64, &Seed::new(9).child(t)).unwrap().is_none())
            .count();
        let f = skips as f64 / trials as f64;
        assert!((f - exact).abs() <= 3.0 * (exact * (1.0 - exact) / trials as f64).sqrt());
    }

    #[test]
    fn order_condition() {
        let z = RingPresentation::integers();
        let one = ints(&[1]);
        let data = vec![
            complete_datum(&z, 3, &one, 4).unwrap(),
            complete_datum(&z, 5, &one, 6).unwrap(),
        ];
        // m in A
        let m = RationalVector::from_ints(&ints(&[2]));
        let g0 = generator(&z, &data[0]);
        let lhs = z.mul_rational(&g0, &m);
        let cert = MembershipCertificate {
            a: lhs.to_ints().unwrap(),
            terms: vec![],
        };
        assert!(order_condition_check(&z, &data, &m, 0, &cert).unwrap().holds);

        // m = p_1^r (c_1 - a_1)^-1 * p_0^-r (c_0 - a_0), so the generator at
        // index 1 maps m onto the generator at index 0
        let inv1 = z.invert_in_qa(&ints(&[5])).unwrap();
        let m = z.mul_rational(&inv1.scale(&BigRational::from_integer(5.into())), &g0);
        let cert = MembershipCertificate {
            a: ints(&[0]),
            terms: vec![CertificateTerm { datum: 0, b: one.clone() }],
        };
        let check = order_condition_check(&z, &data, &m, 1, &cert).unwrap();
        assert!(check.holds);
        assert_eq!(check.order_of_m, BigInt::from(1));

        let forged = MembershipCertificate {
            a: ints(&[1]),
            terms: vec![CertificateTerm { datum: 0, b: one }],
        };
        assert!(matches!(order_condition_check(&z, &data, &m, 1, &forged), Err(Error::InvalidInput(_))));
    }

    proptest! {
        #[test]
        fn completed_data_are_minimal(a0 in -3i64..=3, a1 in -3i64..=3, pi in 0usize..6) {
            let zi = RingPresentation::gaussian_integers();
            let p = [2u64, 3, 5, 7, 11, 13][pi];
            prop_assume!(a0 != 0 || a1 != 0);
            for c in p..2 * p {
                match complete_datum(&zi, p, &ints(&[a0, a1]), c) {
                    Ok(d) => {
                        prop_assert!(check_datum(&zi, &d).unwrap());
                        prop_assert!(is_minimal(&zi, &d).unwrap());
                        let m = order_in_qa_mod_a(&zi.invert_in_qa(&c_minus_a(&zi, c, &d.a)).unwrap());
                        prop_assert!(m.is_multiple_of(&d.d));
                    }
                    Err(Error::NonInvertible(_)) => {}
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }
    }
}
