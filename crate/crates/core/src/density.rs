//! Primes modulo which a polynomial has a root, with exact reciprocal sums.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::poly::UniPoly;
use crate::{Error, Result};

/// Largest scan bound accepted by [`density_report`].
pub const MAX_BOUND: u64 = 10_000_000;

/// Sieve of Eratosthenes.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn eval_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0u128, |acc, &c| (acc * x as u128 + c as u128) % p as u128) as u64
}

fn check_non_constant(f: &UniPoly) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    Ok(())
}

/// Roots of `f` in `[0, p)` by direct scan, ascending.
pub fn roots_mod_p(f: &UniPoly, p: u64) -> Result<Vec<u64>> {
    check_non_constant(f)?;
    let c = f.residues_u64(p);
    Ok((0..p).filter(|&x| eval_mod(&c, x, p) == 0).collect())
}

pub fn has_root_mod_p(f: &UniPoly, p: u64) -> Result<bool> {
    check_non_constant(f)?;
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let c = f.residues_u64(p);
    Ok((0..p).any(|x| eval_mod(&c, x, p) == 0))
}

/// `sum 1/p` kept as `numerator / denominator` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReciprocalSum {
    #[serde(with = "arith::decimal")]
    pub numerator: BigUint,
    #[serde(with = "arith::decimal")]
    pub denominator: BigUint,
}

impl ReciprocalSum {
    pub fn zero() -> Self {
        Self {
            numerator: BigUint::zero(),
            denominator: BigUint::one(),
        }
    }

    /// Adds `1/p`; lowest terms are kept because the denominator is a
    /// product of distinct primes not divisible by `p`.
    fn push(&mut self, p: u64) {
        self.numerator = &self.numerator * p + &self.denominator;
        self.denominator *= p;
    }

    fn merge(self, other: Self) -> Self {
        let num = &self.numerator * &other.denominator + &other.numerator * &self.denominator;
        let den = self.denominator * other.denominator;
        let g = num.gcd(&den);
        Self {
            numerator: num / &g,
            denominator: den / g,
        }
    }

    /// Decimal expansion truncated to `digits` places.
    pub fn decimal(&self, digits: u32) -> String {
        let scaled = &self.numerator * BigUint::from(10u32).pow(digits) / &self.denominator;
        let s = format!("{:0>width$}", scaled.to_string(), width = digits as usize + 1);
        let (int, frac) = s.split_at(s.len() - digits as usize);
        format!("{int}.{frac}")
    }

    pub fn to_f64(&self) -> f64 {
        self.decimal(17).parse().expect("decimal string")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub bound: u64,
    pub primes_scanned: u64,
    pub primes_with_root: u64,
    pub reciprocal_sum: ReciprocalSum,
    pub reciprocal_sum_decimal: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityReport {
    pub polynomial: String,
    #[serde(rename = "X")]
    pub bound: u64,
    pub primes_scanned: u64,
    pub primes_with_root: u64,
    /// `primes_with_root / primes_scanned` in lowest terms.
    pub density_exact: String,
    pub density: f64,
    pub reciprocal_sum: ReciprocalSum,
    pub reciprocal_sum_decimal: String,
    /// Powers of ten up to `X`, then `X` itself.
    pub checkpoints: Vec<Checkpoint>,
    /// Each checkpoint's sum exceeds the previous one.
    pub strictly_increasing: bool,
}

/// Full scan over the primes up to `x`.
pub fn density_report(f: &UniPoly, x: u64) -> Result<DensityReport> {
    check_non_constant(f)?;
    if x < 2 {
        return Err(Error::InvalidParameter(format!("bound must be at least 2, got {x}")));
    }
    if x > MAX_BOUND {
        return Err(Error::ResourceLimit(format!("bound {x} exceeds {MAX_BOUND}")));
    }
    let primes = primes_up_to(x);
    let hits: Vec<u64> = primes
        .par_iter()
        .copied()
        .filter(|&p| {
            let c = f.residues_u64(p);
            (0..p).any(|y| eval_mod(&c, y, p) == 0)
        })
        .collect();

    let mut bounds: Vec<u64> = std::iter::successors(Some(10u64), |b| b.checked_mul(10))
        .take_while(|&b| b < x)
        .collect();
    bounds.push(x);

    // exact sums per checkpoint segment, merged in order
    let segments: Vec<(ReciprocalSum, u64, u64)> = bounds
        .par_iter()
        .enumerate()
        .map(|(i, &b)| {
            let lo = if i == 0 { 0 } else { bounds[i - 1] };
            let seg: Vec<u64> = hits.iter().copied().filter(|&p| p > lo && p <= b).collect();
            let sum = seg
                .par_chunks(512)
                .map(|c| {
                    let mut s = ReciprocalSum::zero();
                    for &p in c {
                        s.push(p);
                    }
                    s
                })
                .reduce(ReciprocalSum::zero, ReciprocalSum::merge);
            let scanned = primes.iter().filter(|&&p| p > lo && p <= b).count() as u64;
            (sum, scanned, seg.len() as u64)
        })
        .collect();

    let mut total = ReciprocalSum::zero();
    let mut scanned = 0;
    let mut with_root = 0;
    let mut checkpoints = Vec::with_capacity(bounds.len());
    let mut strictly_increasing = true;
    for (b, (s, n, h)) in bounds.iter().zip(segments) {
        total = total.merge(s);
        scanned += n;
        with_root += h;
        if h == 0 && !checkpoints.is_empty() {
            strictly_increasing = false;
        }
        checkpoints.push(Checkpoint {
            bound: *b,
            primes_scanned: scanned,
            primes_with_root: with_root,
            reciprocal_sum_decimal: total.decimal(12),
            reciprocal_sum: total.clone(),
        });
    }
    Ok(DensityReport {
        polynomial: f.to_string(),
        bound: x,
        primes_scanned: scanned,
        primes_with_root: with_root,
        density_exact: {
            let g = with_root.gcd(&scanned);
            format!("{}/{}", with_root / g, scanned / g)
        },
        density: with_root as f64 / scanned as f64,
        reciprocal_sum_decimal: total.decimal(12),
        reciprocal_sum: total,
        checkpoints,
        strictly_increasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};

    fn poly(s: &str) -> UniPoly {
        s.parse().unwrap()
    }

    #[test]
    fn small_sieves() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2), vec![2]);
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(10_000).len(), 1229);
    }

    #[test]
    fn roots_of_x2_plus_1() {
        let f = poly("x^2+1");
        assert!(has_root_mod_p(&f, 5).unwrap());
        assert!(!has_root_mod_p(&f, 3).unwrap());
        assert!(has_root_mod_p(&f, 2).unwrap());
        assert_eq!(roots_mod_p(&f, 13).unwrap(), vec![5, 8]);
        assert!(has_root_mod_p(&poly("x"), 97).unwrap());
        assert!(matches!(has_root_mod_p(&poly("7"), 5), Err(Error::ConstantPolynomial)));
    }

    #[test]
    fn linear_density_is_one() {
        let r = density_report(&poly("x"), 100).unwrap();
        assert_eq!(r.primes_scanned, 25);
        assert_eq!(r.primes_with_root, 25);
        assert_eq!(r.density, 1.0);
        let want = primes_up_to(100)
            .into_iter()
            .map(|p| BigRational::new(BigInt::one(), BigInt::from(p)))
            .fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(BigInt::from(r.reciprocal_sum.numerator.clone()), *want.numer());
        assert_eq!(BigInt::from(r.reciprocal_sum.denominator.clone()), *want.denom());
        assert_eq!(r.checkpoints.len(), 2);
        let r = density_report(&poly("x^2-x"), 1000).unwrap();
        assert_eq!(r.density, 1.0);
    }

    #[test]
    fn decimals() {
        let mut s = ReciprocalSum::zero();
        s.push(2);
        s.push(3);
        assert_eq!(s.decimal(4), "0.8333");
        assert!((s.to_f64() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_density_subsample() {
        let f = poly("x^2+1");
        let r = density_report(&f, 20_000).unwrap();
        assert!(r.density > 0.45 && r.density < 0.55);
        assert!(r.strictly_increasing);
        // independent recomputation on a 1% subsample: p = 1 mod 4 or p = 2
        let primes = primes_up_to(20_000);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..primes.len() / 100 {
            let p = primes[rng.gen_range(0..primes.len())];
            assert_eq!(has_root_mod_p(&f, p).unwrap(), p == 2 || p % 4 == 1);
        }
        let direct = primes.iter().filter(|&&p| p == 2 || p % 4 == 1).count() as u64;
        assert_eq!(r.primes_with_root, direct);
    }
}
