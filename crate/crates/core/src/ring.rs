//! Finite-rank rings given by integer structure constants, and exact
//! arithmetic in `Q ⊗ A`.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::poly::UniPoly;

pub const MAX_RANK: usize = 16;

/// `e_i e_j = sum_k structure[i][j][k] e_k`, with `identity` the coordinates
/// of `1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingPresentation {
    pub rank: usize,
    pub structure: Vec<Vec<Vec<i64>>>,
    pub identity: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape { detail: String },
    Associativity { i: usize, j: usize, k: usize },
    LeftIdentity { i: usize },
    RightIdentity { i: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { detail } => write!(f, "shape: {detail}"),
            Violation::Associativity { i, j, k } => {
                write!(f, "(e{i} e{j}) e{k} != e{i} (e{j} e{k})")
            }
            Violation::LeftIdentity { i } => write!(f, "1 * e{i} != e{i}"),
            Violation::RightIdentity { i } => write!(f, "e{i} * 1 != e{i}"),
        }
    }
}

const BUNDLED: &[(&str, &str)] = &[
    ("integers", include_str!("../rings/integers.json")),
    ("gaussian_integers", include_str!("../rings/gaussian_integers.json")),
    ("z_cross_z", include_str!("../rings/z_cross_z.json")),
    ("upper_triangular_2x2", include_str!("../rings/upper_triangular_2x2.json")),
    ("broken_no_identity", include_str!("../rings/broken_no_identity.json")),
];

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl RingPresentation {
    /// Names accepted by [`RingPresentation::bundled`].
    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _)| *n)
    }

    /// A bundled presentation, unvalidated.
    pub fn bundled(name: &str) -> Result<Self> {
        let (_, src) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::InvalidInput(format!("no bundled ring named {name:?}")))?;
        Self::from_json_unchecked(src)
    }

    pub fn integers() -> Self {
        Self::bundled("integers").expect("bundled")
    }

    pub fn gaussian_integers() -> Self {
        Self::bundled("gaussian_integers").expect("bundled")
    }

    fn from_json_unchecked(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parses and validates a JSON presentation.
    pub fn from_json(src: &str) -> Result<Self> {
        let r = Self::from_json_unchecked(src)?;
        r.validate().map_err(|v| {
            Error::InvalidInput(format!(
                "invalid ring presentation: {}",
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
            ))
        })?;
        Ok(r)
    }

    /// Loads a file path, or a bundled name when no such file exists.
    pub fn load(spec: &str) -> Result<Self> {
        let path = Path::new(spec);
        if path.exists() {
            let src = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("{spec}: {e}")))?;
            return Self::from_json(&src);
        }
        if let Ok(r) = Self::bundled(spec) {
            r.validate().map_err(|_| Error::InvalidInput(format!("bundled ring {spec} is invalid")))?;
            return Ok(r);
        }
        Err(Error::InvalidInput(format!("no ring file or bundled ring {spec:?}")))
    }

    fn shape_errors(&self) -> Vec<Violation> {
        let n = self.rank;
        let mut out = Vec::new();
        if n == 0 || n > MAX_RANK {
            out.push(Violation::Shape {
                detail: format!("rank {n} outside 1..={MAX_RANK}"),
            });
            return out;
        }
        let ok = self.structure.len() == n
            && self
                .structure
                .iter()
                .all(|row| row.len() == n && row.iter().all(|v| v.len() == n));
        if !ok {
            out.push(Violation::Shape {
                detail: format!("structure tensor is not {n}x{n}x{n}"),
            });
        }
        if self.identity.len() != n {
            out.push(Violation::Shape {
                detail: format!("identity has {} coordinates, expected {n}", self.identity.len()),
            });
        }
        out
    }

    /// Checks shape, associativity on all basis triples and both identity
    /// laws.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut out = self.shape_errors();
        if !out.is_empty() {
            return Err(out);
        }
        let n = self.rank;
        let basis: Vec<Vec<BigInt>> = (0..n).map(|i| self.basis(i)).collect();
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul(&basis[i], &basis[j]);
                for k in 0..n {
                    let left = self.mul(&ij, &basis[k]);
                    let right = self.mul(&basis[i], &self.mul(&basis[j], &basis[k]));
                    if left != right {
                        out.push(Violation::Associativity { i, j, k });
                    }
                }
            }
        }
        let u = ints(&self.identity);
        for (i, e) in basis.iter().enumerate() {
            if &self.mul(&u, e) != e {
                out.push(Violation::LeftIdentity { i });
            }
            if &self.mul(e, &u) != e {
                out.push(Violation::RightIdentity { i });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self, i: usize) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); self.rank];
        e[i] = BigInt::one();
        e
    }

    pub fn one(&self) -> Vec<BigInt> {
        ints(&self.identity)
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank]
    }

    /// Integer multiple of the identity.
    pub fn scalar(&self, c: &BigInt) -> Vec<BigInt> {
        self.identity.iter().map(|&u| c * u).collect()
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = self.rank;
        let mut out = vec![BigInt::zero(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let ab = ai * bj;
                for (k, &c) in self.structure[i][j].iter().enumerate() {
                    if c != 0 {
                        out[k] += &ab * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x -> a x`: column `j` holds `a e_j`.
    pub fn regular_rep(&self, a: &[BigInt]) -> IntMatrix {
        let n = self.rank;
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, &c) in self.structure[i][j].iter().enumerate() {
                    if c != 0 {
                        m[k][j] += ai * c;
                    }
                }
            }
        }
        m
    }

    /// Product in `Q ⊗ A`.
    pub fn mul_rational(&self, a: &RationalVector, b: &RationalVector) -> RationalVector {
        let n = self.rank;
        let mut out = vec![BigRational::zero(); n];
        for (i, ai) in a.0.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.0.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let ab = ai * bj;
                for (k, &c) in self.structure[i][j].iter().enumerate() {
                    if c != 0 {
                        out[k] += &ab * BigRational::from_integer(BigInt::from(c));
                    }
                }
            }
        }
        RationalVector(out)
    }

    /// Two-sided inverse of `x` in `Q ⊗ A`.
    pub fn invert_in_qa(&self, x: &[BigInt]) -> Result<RationalVector> {
        let l = self.regular_rep(x);
        let y = linalg::solve_rational(&l, &self.one())
            .ok_or_else(|| Error::NonInvertible(format!("{x:?} has singular regular representation")))?;
        let y = RationalVector(y);
        let one = RationalVector::from_ints(&self.one());
        if self.mul_rational(&y, &RationalVector::from_ints(x)) != one {
            return Err(Error::NonInvertible(format!("{x:?} has no two-sided inverse")));
        }
        Ok(y)
    }

    /// Reduced rational-function description of `(c - a)^{-1} e`.
    pub fn denominator_polynomial(&self, a: &[BigInt], e: &[BigInt]) -> Result<DenominatorData> {
        if e.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidInput("e must be non-zero".into()));
        }
        let m = self.regular_rep(a);
        let (chi, adj) = linalg::char_poly_and_adjugate(&m);
        let chi = UniPoly::new(chi);
        let n = self.rank;
        let mut coordinates = Vec::with_capacity(n);
        for k in 0..n {
            // numerator of coordinate k: sum_j adj(c)[k][j] e_j
            let num = UniPoly::new(
                adj.iter()
                    .map(|mk| mk[k].iter().zip(e).map(|(x, y)| x * y).sum())
                    .collect(),
            );
            if num.is_zero() {
                coordinates.push(None);
                continue;
            }
            let g = num.gcd(&chi);
            let mut rn = num.div_exact(&g).expect("gcd divides numerator");
            let mut rd = chi.div_exact(&g).expect("gcd divides denominator");
            if rd.leading().is_negative() {
                rn = rn.neg();
                rd = rd.neg();
            }
            let resultant = rd.resultant(&rn);
            coordinates.push(Some(ReducedCoordinate {
                numerator: rn,
                denominator: rd,
                resultant,
            }));
        }
        let chosen = coordinates
            .iter()
            .position(|c| c.as_ref().is_some_and(|c| !c.denominator.is_constant()))
            .ok_or_else(|| Error::Inconclusive("every coordinate of (c - a)^-1 e is polynomial".into()))?;
        let f = coordinates[chosen].as_ref().expect("chosen").denominator.clone();
        let mut primes = Vec::new();
        let mut unfactored = Vec::new();
        for c in coordinates.iter().flatten() {
            let (ps, rest) = arith::small_prime_factors(&c.resultant, 1 << 20);
            primes.extend(ps);
            if !rest.is_one() && !rest.is_zero() {
                unfactored.push(rest.to_string());
            }
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(DenominatorData {
            f,
            chosen_coordinate: chosen,
            coordinates,
            exceptional_primes: primes,
            unfactored_cofactors: unfactored,
        })
    }
}

/// Coordinates in `Q ⊗ A`, each in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector(pub Vec<BigRational>);

impl RationalVector {
    pub fn from_ints(v: &[BigInt]) -> Self {
        Self(v.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    /// Integer coordinates when integral.
    pub fn to_ints(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.0.iter().map(|x| x.to_integer()).collect())
    }
}

/// Order of `v` in `QA / A`: the lcm of the coordinate denominators.
pub fn order_in_qa_mod_a(v: &RationalVector) -> BigInt {
    v.0.iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| s.parse::<BigRational>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RationalVector)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedCoordinate {
    pub numerator: UniPoly,
    pub denominator: UniPoly,
    #[serde(with = "arith::decimal_signed")]
    pub resultant: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DenominatorData {
    /// Reduced denominator of the first coordinate with a non-constant one.
    pub f: UniPoly,
    pub chosen_coordinate: usize,
    /// `None` for coordinates that vanish identically.
    pub coordinates: Vec<Option<ReducedCoordinate>>,
    /// Primes dividing some numerator/denominator resultant.
    pub exceptional_primes: Vec<u64>,
    /// Parts of resultants left unfactored by trial division.
    pub unfactored_cofactors: Vec<String>,
}

impl DenominatorData {
    /// Exact test: does `p` divide a resultant?
    pub fn is_exceptional(&self, p: u64) -> bool {
        let pb = BigInt::from(p);
        self.coordinates
            .iter()
            .flatten()
            .any(|c| c.resultant.is_multiple_of(&pb))
    }
}
