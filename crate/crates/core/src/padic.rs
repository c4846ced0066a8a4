//! Truncated p-adic integers `Z/p^N` and finitely supported vectors over them.
//!
//! A value always carries its precision explicitly. Binary operations require
//! both operands to share `(p, N)`; there is no silent coercion between
//! precisions, callers reduce explicitly with [`PadicApprox::reduce_precision`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};

/// The residue ring `Z/p^N` with `p` prime.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct PadicRing {
    p: u64,
    precision: u32,
    modulus: BigUint,
}

impl PadicRing {
    pub fn new(p: u64, precision: u32) -> Result<Arc<Self>> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 32 {
            return Err(Error::InvalidParameter(format!("prime {p} too large")));
        }
        if precision == 0 {
            return Err(Error::InvalidParameter("precision must be positive".into()));
        }
        Ok(Self::new_unchecked(p, precision))
    }

    /// Skips the primality test; `p` must already be known prime.
    pub(crate) fn new_unchecked(p: u64, precision: u32) -> Arc<Self> {
        Arc::new(Self {
            p,
            precision,
            modulus: arith::pow_u64(p, precision),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^N`.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Same prime at a different precision.
    pub fn with_precision(&self, precision: u32) -> Arc<Self> {
        Self::new_unchecked(self.p, precision)
    }

    pub fn element(self: &Arc<Self>, residue: impl Into<BigUint>) -> Result<PadicApprox> {
        let residue = residue.into();
        if residue >= self.modulus {
            return Err(Error::InvalidInput(format!(
                "residue {residue} not below {}^{}",
                self.p, self.precision
            )));
        }
        Ok(PadicApprox {
            ring: Arc::clone(self),
            residue,
        })
    }

    /// Reduces an arbitrary integer into the ring.
    pub fn from_int(self: &Arc<Self>, x: &BigInt) -> PadicApprox {
        PadicApprox {
            ring: Arc::clone(self),
            residue: arith::reduce(x, &self.modulus),
        }
    }

    pub fn from_i64(self: &Arc<Self>, x: i64) -> PadicApprox {
        self.from_int(&BigInt::from(x))
    }

    pub fn zero(self: &Arc<Self>) -> PadicApprox {
        PadicApprox {
            ring: Arc::clone(self),
            residue: BigUint::zero(),
        }
    }

    pub fn one(self: &Arc<Self>) -> PadicApprox {
        self.from_i64(1)
    }

    pub fn same_as(&self, other: &PadicRing) -> bool {
        self.p == other.p && self.precision == other.precision
    }

    fn check(&self, other: &PadicRing) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::IncompatibleOperands(format!(
                "(p={}, N={}) vs (p={}, N={})",
                self.p, self.precision, other.p, other.precision
            )))
        }
    }
}

/// A p-adic integer known modulo `p^N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    ring: Arc<PadicRing>,
    residue: BigUint,
}

impl PadicApprox {
    pub fn new(p: u64, precision: u32, residue: impl Into<BigUint>) -> Result<Self> {
        PadicRing::new(p, precision)?.element(residue)
    }

    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Representative in `(-p^N/2, p^N/2]`.
    pub fn symmetric(&self) -> BigInt {
        arith::symmetric(&self.residue, &self.ring.modulus)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ring.check(&other.ring)?;
        Ok(self.with_residue((&self.residue + &other.residue) % &self.ring.modulus))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ring.check(&other.ring)?;
        let m = &self.ring.modulus;
        Ok(self.with_residue((&self.residue + m - &other.residue) % m))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ring.check(&other.ring)?;
        Ok(self.with_residue((&self.residue * &other.residue) % &self.ring.modulus))
    }

    pub fn neg(&self) -> Self {
        let m = &self.ring.modulus;
        self.with_residue((m - &self.residue) % m)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        self.ring.from_int(&(k * BigInt::from(self.residue.clone())))
    }

    pub fn is_unit(&self) -> bool {
        !(&self.residue % self.ring.p).is_zero()
    }

    pub fn unit_inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit(format!(
                "{} mod {}^{}",
                self.residue, self.ring.p, self.ring.precision
            )));
        }
        let inv = arith::inverse_mod(&self.residue, &self.ring.modulus)
            .expect("units are invertible");
        Ok(self.with_residue(inv))
    }

    /// Largest `v <= N` with `p^v | residue`; zero reports `N`.
    pub fn valuation(&self) -> u32 {
        if self.residue.is_zero() {
            return self.ring.precision;
        }
        let p = BigUint::from(self.ring.p);
        let mut v = 0;
        let mut r = self.residue.clone();
        loop {
            let (q, rem) = r.div_rem(&p);
            if !rem.is_zero() {
                return v;
            }
            r = q;
            v += 1;
        }
    }

    pub fn reduce_precision(&self, precision: u32) -> Result<Self> {
        if precision == 0 || precision > self.ring.precision {
            return Err(Error::PrecisionOutOfRange {
                requested: precision,
                available: self.ring.precision,
            });
        }
        if precision == self.ring.precision {
            return Ok(self.clone());
        }
        let ring = self.ring.with_precision(precision);
        let residue = &self.residue % ring.modulus();
        Ok(Self { ring, residue })
    }

    /// Base-`p` digits, least significant first, exactly `N` of them.
    pub fn digits(&self) -> Vec<u64> {
        let p = BigUint::from(self.ring.p);
        let mut r = self.residue.clone();
        (0..self.ring.precision)
            .map(|_| {
                let (q, d) = r.div_rem(&p);
                r = q;
                u64::try_from(d).expect("digit below p")
            })
            .collect()
    }

    fn with_residue(&self, residue: BigUint) -> Self {
        Self {
            ring: Arc::clone(&self.ring),
            residue,
        }
    }
}

impl fmt::Debug for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.ring.p, self.ring.precision)
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct PadicWire {
    p: u64,
    #[serde(rename = "N")]
    precision: u32,
    #[serde(with = "arith::decimal")]
    residue: BigUint,
}

impl Serialize for PadicApprox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PadicWire {
            p: self.ring.p,
            precision: self.ring.precision,
            residue: self.residue.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicApprox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PadicWire::deserialize(d)?;
        PadicApprox::new(w.p, w.precision, w.residue).map_err(D::Error::custom)
    }
}

/// Finitely supported vector `sum x_i e_i` with coordinates in `Z/p^N`.
/// Zero coordinates are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicVector {
    ring: Arc<PadicRing>,
    entries: BTreeMap<usize, BigUint>,
}

impl PadicVector {
    pub fn zero(ring: &Arc<PadicRing>) -> Self {
        Self {
            ring: Arc::clone(ring),
            entries: BTreeMap::new(),
        }
    }

    /// The basis vector `e_index`.
    pub fn basis(ring: &Arc<PadicRing>, index: usize) -> Self {
        let mut v = Self::zero(ring);
        v.entries.insert(index, BigUint::one() % ring.modulus());
        v.entries.retain(|_, x| !x.is_zero());
        v
    }

    /// Builds a vector from integer coordinates, reducing each mod `p^N`.
    pub fn from_ints<'a>(
        ring: &Arc<PadicRing>,
        coords: impl IntoIterator<Item = (usize, &'a BigInt)>,
    ) -> Self {
        let mut v = Self::zero(ring);
        for (i, x) in coords {
            v.set(i, arith::reduce(x, ring.modulus()));
        }
        v
    }

    pub fn from_dense(ring: &Arc<PadicRing>, coords: &[BigInt]) -> Self {
        Self::from_ints(ring, coords.iter().enumerate())
    }

    pub fn from_elements(entries: impl IntoIterator<Item = (usize, PadicApprox)>, ring: &Arc<PadicRing>) -> Result<Self> {
        let mut v = Self::zero(ring);
        for (i, x) in entries {
            ring.check(x.ring())?;
            v.set(i, x.residue);
        }
        Ok(v)
    }

    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision
    }

    pub fn entries(&self) -> &BTreeMap<usize, BigUint> {
        &self.entries
    }

    pub fn get(&self, index: usize) -> BigUint {
        self.entries.get(&index).cloned().unwrap_or_default()
    }

    pub fn coordinate(&self, index: usize) -> PadicApprox {
        PadicApprox {
            ring: Arc::clone(&self.ring),
            residue: self.get(index),
        }
    }

    /// Sets a coordinate; `value` is reduced mod `p^N`.
    pub fn set(&mut self, index: usize, value: BigUint) {
        let value = value % self.ring.modulus();
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the largest stored index (0 for the zero vector).
    pub fn span_len(&self) -> usize {
        self.entries.keys().next_back().map_or(0, |&i| i + 1)
    }

    pub fn to_dense(&self, len: usize) -> Vec<BigUint> {
        (0..len).map(|i| self.get(i)).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ring.check(&other.ring)?;
        let mut out = self.clone();
        for (&i, x) in &other.entries {
            let y = out.get(i) + x;
            out.set(i, y);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let m = self.ring.modulus();
        let entries = self
            .entries
            .iter()
            .map(|(&i, x)| (i, m - x))
            .collect();
        Self {
            ring: Arc::clone(&self.ring),
            entries,
        }
    }

    /// Multiplies every coordinate by a p-adic scalar.
    pub fn scale(&self, c: &PadicApprox) -> Result<Self> {
        self.ring.check(c.ring())?;
        let mut out = Self::zero(&self.ring);
        for (&i, x) in &self.entries {
            out.set(i, x * c.residue());
        }
        Ok(out)
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        let c = self.ring.from_int(k);
        self.scale(&c).expect("same ring")
    }

    pub fn reduce_precision(&self, precision: u32) -> Result<Self> {
        if precision == 0 || precision > self.ring.precision {
            return Err(Error::PrecisionOutOfRange {
                requested: precision,
                available: self.ring.precision,
            });
        }
        let ring = self.ring.with_precision(precision);
        let mut out = Self::zero(&ring);
        for (&i, x) in &self.entries {
            out.set(i, x.clone());
        }
        Ok(out)
    }

    /// Keeps only coordinates with index below `len`.
    pub fn truncate(&self, len: usize) -> Self {
        Self {
            ring: Arc::clone(&self.ring),
            entries: self.entries.range(..len).map(|(&i, x)| (i, x.clone())).collect(),
        }
    }

    /// Minimum coordinate valuation; `N` for the zero vector.
    pub fn valuation(&self) -> u32 {
        self.entries
            .keys()
            .map(|&i| self.coordinate(i).valuation())
            .min()
            .unwrap_or(self.ring.precision)
    }
}

impl fmt::Debug for PadicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicVector(p={}, N={}, {:?})", self.ring.p, self.ring.precision, self.entries)
    }
}

#[derive(Serialize, Deserialize)]
struct VectorWire {
    p: u64,
    #[serde(rename = "N")]
    precision: u32,
    entries: BTreeMap<String, String>,
}

impl Serialize for PadicVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorWire {
            p: self.ring.p,
            precision: self.ring.precision,
            entries: self
                .entries
                .iter()
                .map(|(i, x)| (i.to_string(), x.to_str_radix(10)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = VectorWire::deserialize(d)?;
        let ring = PadicRing::new(w.p, w.precision).map_err(D::Error::custom)?;
        let mut v = PadicVector::zero(&ring);
        for (i, x) in w.entries {
            let i: usize = i.parse().map_err(D::Error::custom)?;
            let x: BigUint = x.parse().map_err(D::Error::custom)?;
            if &x >= ring.modulus() {
                return Err(D::Error::custom("coordinate out of range"));
            }
            v.set(i, x);
        }
        Ok(v)
    }
}
