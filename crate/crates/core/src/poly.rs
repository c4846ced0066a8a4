//! Integer polynomials: sparse multivariate [`IntPolynomial`] and dense
//! univariate [`UniPoly`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;
use crate::padic::PadicApprox;

/// Sparse polynomial in `x1..xk` with integer coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPolynomial {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], c.into());
        p
    }

    /// The variable `x_{i+1}`.
    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Self::from_terms(vars, [(e, BigInt::one())])
    }

    pub fn from_terms(vars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn height(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::Arity {
                expected: self.vars,
                got: other.vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Value at `xs` modulo `p^N`.
    pub fn evaluate(&self, xs: &[PadicApprox]) -> Result<PadicApprox> {
        if xs.len() != self.vars {
            return Err(Error::Arity {
                expected: self.vars,
                got: xs.len(),
            });
        }
        let Some(first) = xs.first() else {
            return Err(Error::InvalidInput("no evaluation points".into()));
        };
        let ring = first.ring().clone();
        for x in xs {
            if !x.ring().same_as(&ring) {
                return Err(Error::IncompatibleOperands(
                    "evaluation points differ in p or N".into(),
                ));
            }
        }
        let m = ring.modulus();
        let mut acc = num_bigint::BigUint::zero();
        for (e, c) in &self.terms {
            let mut t = crate::arith::reduce(c, m);
            for (x, &k) in xs.iter().zip(e) {
                if k > 0 {
                    t = (t * x.residue().modpow(&k.into(), m)) % m;
                }
            }
            acc = (acc + t) % m;
        }
        ring.element(acc)
    }

    /// Exact integer value at `xs`.
    pub fn evaluate_int(&self, xs: &[BigInt]) -> Result<BigInt> {
        if xs.len() != self.vars {
            return Err(Error::Arity {
                expected: self.vars,
                got: xs.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                xs.iter()
                    .zip(e)
                    .fold(c.clone(), |acc, (x, &k)| acc * x.pow(k))
            })
            .sum())
    }

    /// Dense univariate view (requires a single variable).
    pub fn to_univariate(&self) -> Result<UniPoly> {
        if self.vars != 1 {
            return Err(Error::Arity {
                expected: 1,
                got: self.vars,
            });
        }
        let deg = self.degree().unwrap_or(0) as usize;
        let mut c = vec![BigInt::zero(); deg + 1];
        for (e, v) in &self.terms {
            c[e[0] as usize] = v.clone();
        }
        Ok(UniPoly::new(c))
    }
}

/// Exponent vectors of total degree `<= d` in `vars` variables, in graded
/// lexicographic order starting with the constant monomial.
pub fn monomials(vars: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(vars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == vars {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(vars, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=d {
        rec(vars, total, &mut Vec::new(), &mut out);
    }
    out
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    let name = if self.vars == 1 { "x".to_string() } else { format!("x{}", j + 1) };
                    if k == 1 { name } else { format!("{name}^{k}") }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    vars: usize,
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exponents: Vec<u32>,
    coefficient: String,
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyWire {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermWire {
                    exponents: e.clone(),
                    coefficient: c.to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PolyWire::deserialize(d)?;
        let mut p = IntPolynomial::zero(w.vars);
        for t in w.terms {
            if t.exponents.len() != w.vars {
                return Err(D::Error::custom("exponent vector length"));
            }
            let c: BigInt = t.coefficient.parse().map_err(D::Error::custom)?;
            p.add_term(t.exponents, c);
        }
        Ok(p)
    }
}

/// Dense univariate integer polynomial, coefficients from the constant
/// term upward, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// `x - root`.
    pub fn linear(root: &BigInt) -> Self {
        Self::new(vec![-root, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Coefficients reduced into `[0, m)`; used by the fast `u64` paths.
    pub fn residues_u64(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().expect("reduced below m"))
            .collect()
    }

    /// `g(r + y)` as a polynomial in `y`.
    pub fn taylor_shift(&self, r: &BigInt) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &c[j + 1] * r;
                c[j] += t;
            }
        }
        Self::new(c)
    }

    /// Pseudo-remainder of `self` by `d` (multiplied through by powers of the
    /// leading coefficient of `d`).
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("non-zero divisor");
        let lc = d.leading();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lr = r.leading();
            let mut shifted = vec![BigInt::zero(); dr - dd];
            shifted.extend(d.coeffs.iter().map(|c| c * &lr));
            r = r.scale(&lc).sub(&Self::new(shifted));
        }
        r
    }

    /// Greatest common divisor over `Z[x]`, primitive with positive leading
    /// coefficient (times the gcd of the contents).
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_with_content();
        }
        if other.is_zero() {
            return self.primitive_with_content();
        }
        let cont = self.content().gcd(&other.content());
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive() };
        }
        a.primitive().scale(&cont)
    }

    fn primitive_with_content(&self) -> Self {
        if self.leading().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact quotient `self / d` over `Z`; `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let lc = d.leading();
        let mut r = self.clone();
        let Some(dr) = r.degree() else {
            return Some(Self::zero());
        };
        if dr < dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); dr - dd + 1];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let (t, rem) = r.leading().div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            let k = dr - dd;
            q[k] = t.clone();
            let mut shifted = vec![BigInt::zero(); k];
            shifted.extend(d.coeffs.iter().map(|c| c * &t));
            r = r.sub(&Self::new(shifted));
        }
        Some(Self::new(q))
    }

    /// Resultant via the Sylvester determinant. For a constant `other = c`
    /// this is `c^deg(self)`.
    pub fn resultant(&self, other: &Self) -> BigInt {
        let (Some(m), Some(n)) = (self.degree(), other.degree()) else {
            return BigInt::zero();
        };
        if m == 0 && n == 0 {
            return BigInt::one();
        }
        let size = m + n;
        let mut s = vec![vec![BigInt::zero(); size]; size];
        // rows: n shifts of self, m shifts of other; highest degree first
        for i in 0..n {
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                s[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in other.coeffs.iter().rev().enumerate() {
                s[n + i][i + j] = c.clone();
            }
        }
        linalg::det_bareiss(&s)
    }

    pub fn to_multivariate(&self) -> IntPolynomial {
        IntPolynomial::from_terms(
            1,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (vec![i as u32], c.clone())),
        )
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_multivariate().fmt(f)
    }
}

impl FromStr for UniPoly {
    type Err = Error;

    /// Parses `"x^2 + 1"`, `"3x^2-2*x+7"`, `"-x"`. A single variable `x`,
    /// integer coefficients, `^` for powers.
    fn from_str(s: &str) -> Result<Self> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bad = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
        let bytes = src.as_bytes();
        let mut i = 0;
        let mut coeffs: Vec<BigInt> = Vec::new();
        while i < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            } else if i > 0 {
                return Err(bad("expected '+' or '-'"));
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coef = if i > start {
                src[start..i].parse::<BigInt>().map_err(|_| bad("bad coefficient"))?
            } else {
                BigInt::one()
            };
            let mut exp = 0usize;
            let had_digits = i > start;
            if i < bytes.len() && bytes[i] == b'*' {
                if !had_digits {
                    return Err(bad("dangling '*'"));
                }
                i += 1;
                if i >= bytes.len() || bytes[i] != b'x' {
                    return Err(bad("expected 'x' after '*'"));
                }
            }
            if i < bytes.len() && bytes[i] == b'x' {
                i += 1;
                exp = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let es = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if es == i {
                        return Err(bad("missing exponent"));
                    }
                    exp = src[es..i].parse().map_err(|_| bad("bad exponent"))?;
                    if exp > 4096 {
                        return Err(bad("exponent too large"));
                    }
                }
            } else if !had_digits {
                return Err(bad("empty term"));
            }
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigInt::zero());
            }
            coeffs[exp] += sign * coef;
        }
        Ok(UniPoly::new(coeffs))
    }
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
