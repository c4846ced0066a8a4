//! Small integer helpers shared across modules.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Trial-division primality test. Adequate for the desk-scale primes used
/// throughout the crate (p < 2^32).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Returns `Some((p, k))` when `q = p^k` for a prime `p`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// `p`-adic valuation of a non-zero integer; `None` for zero.
pub fn valuation_int(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

pub fn valuation_u64(mut x: u64, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// Representative of `x mod m` in `(-m/2, m/2]`.
pub fn symmetric(x: &BigUint, m: &BigUint) -> BigInt {
    let x = BigInt::from(x % m);
    let m = BigInt::from(m.clone());
    if &x + &x > m {
        x - m
    } else {
        x
    }
}

/// Non-negative representative of `x mod m`.
pub fn reduce(x: &BigInt, m: &BigUint) -> BigUint {
    let m_int = BigInt::from(m.clone());
    let r = x.mod_floor(&m_int);
    r.to_biguint().expect("mod_floor is non-negative")
}

pub fn pow_u64(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Inverse of `x` modulo `m` when `gcd(x, m) = 1`.
pub fn inverse_mod(x: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(x % m);
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return None;
    }
    Some(reduce(&e.x, m))
}

pub fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(&x.abs()))
}

/// Distinct prime factors found by trial division up to `limit`, plus the
/// remaining cofactor (1 when fully factored).
pub fn small_prime_factors(x: &BigInt, limit: u64) -> (Vec<u64>, BigUint) {
    let mut n = x.abs().to_biguint().unwrap_or_default();
    let mut out = Vec::new();
    if n.is_zero() {
        return (out, n);
    }
    let mut d = 2u64;
    while d <= limit {
        let db = BigUint::from(d);
        if &db * &db > n {
            break;
        }
        if (&n % &db).is_zero() {
            out.push(d);
            while (&n % &db).is_zero() {
                n /= &db;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() {
        if let Some(small) = n.to_u64() {
            if small <= limit.saturating_mul(limit) {
                out.push(small);
                n = BigUint::one();
            }
        }
    }
    out.sort_unstable();
    (out, n)
}

pub fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Same as [`decimal`] for signed integers.
pub mod decimal_signed {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Vector of signed integers written as decimal strings.
pub mod decimal_signed_vec {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer, ser::SerializeSeq};

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_str_radix(10))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

pub mod decimal_signed_vec_opt {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        match xs {
            Some(v) => s.serialize_some(&v.iter().map(|x| x.to_str_radix(10)).collect::<Vec<_>>()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        let raw = Option::<Vec<String>>::deserialize(d)?;
        raw.map(|v| v.iter().map(|s| s.parse().map_err(D::Error::custom)).collect())
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(2_147_483_647));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn symmetric_lift() {
        let m = BigUint::from(10u32);
        assert_eq!(symmetric(&BigUint::from(7u32), &m), BigInt::from(-3));
        assert_eq!(symmetric(&BigUint::from(5u32), &m), BigInt::from(5));
    }

    #[test]
    fn factor_resultant() {
        let (ps, rest) = small_prime_factors(&BigInt::from(-6), 1000);
        assert_eq!(ps, vec![2, 3]);
        assert!(rest.is_one());
    }
}
