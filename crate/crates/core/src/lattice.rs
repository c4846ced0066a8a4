//! Integer lattices: exact LLL reduction and bounded enumeration of short
//! vectors in a coset.
//!
//! Reduction runs entirely in integers (Cohen, Algorithm 2.6.7), so the
//! reduced basis spans exactly the input lattice. Enumeration uses a
//! floating-point Gram–Schmidt of the reduced basis only to prune; every
//! reported vector is recomputed exactly and checked against the bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const DELTA_NUM: i64 = 99;
const DELTA_DEN: i64 = 100;

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to `a / b` for `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

struct Lll<'a> {
    b: &'a mut Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
}

impl Lll<'_> {
    // indices follow Cohen: vectors 1..=n stored at b[k-1], d[0] = 1
    fn redi(&mut self, k: usize, l: usize) {
        let two_lambda: BigInt = &self.lambda[k][l] * 2;
        if two_lambda.abs() <= self.d[l] {
            return;
        }
        let q = round_div(&self.lambda[k][l], &self.d[l]);
        let bl = self.b[l - 1].clone();
        for (x, y) in self.b[k - 1].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        self.lambda[k][l] -= &q * &self.d[l];
        for i in 1..l {
            let t = &q * &self.lambda[l][i];
            self.lambda[k][i] -= t;
        }
    }

    fn swapi(&mut self, k: usize, kmax: usize) {
        self.b.swap(k - 1, k - 2);
        for j in 1..k - 1 {
            let t = self.lambda[k][j].clone();
            self.lambda[k][j] = self.lambda[k - 1][j].clone();
            self.lambda[k - 1][j] = t;
        }
        let lam = self.lambda[k][k - 1].clone();
        let bb = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            self.lambda[i][k] = (&self.d[k] * &self.lambda[i][k - 1] - &lam * &t) / &self.d[k - 1];
            self.lambda[i][k - 1] = (&bb * &t + &lam * &self.lambda[i][k]) / &self.d[k];
        }
        self.d[k - 1] = bb;
    }
}

/// LLL-reduces the rows of `basis` in place (δ = 0.99). The rows must be
/// linearly independent.
pub fn lll_reduce(basis: &mut Vec<Vec<BigInt>>) -> Result<()> {
    let n = basis.len();
    if n <= 1 {
        if n == 1 && basis[0].iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidInput("lattice basis is dependent".into()));
        }
        return Ok(());
    }
    let mut st = Lll {
        d: vec![BigInt::zero(); n + 1],
        lambda: vec![vec![BigInt::zero(); n + 1]; n + 1],
        b: basis,
    };
    st.d[0] = BigInt::from(1);
    st.d[1] = dot(&st.b[0], &st.b[0]);
    if st.d[1].is_zero() {
        return Err(Error::InvalidInput("lattice basis is dependent".into()));
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&st.b[k - 1], &st.b[j - 1]);
                for i in 1..j {
                    u = (&st.d[i] * u - &st.lambda[k][i] * &st.lambda[j][i]) / &st.d[i - 1];
                }
                if j < k {
                    st.lambda[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::InvalidInput("lattice basis is dependent".into()));
                    }
                    st.d[k] = u;
                }
            }
        }
        loop {
            st.redi(k, k - 1);
            let lhs = &st.d[k] * &st.d[k - 2] * DELTA_DEN;
            let lam = &st.lambda[k][k - 1];
            let rhs = &st.d[k - 1] * &st.d[k - 1] * DELTA_NUM - lam * lam * DELTA_DEN;
            if lhs < rhs {
                st.swapi(k, kmax);
                k = (k - 1).max(2);
            } else {
                for l in (1..k - 1).rev() {
                    st.redi(k, l);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(())
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// A reduced lattice with its floating-point Gram–Schmidt data, ready for
/// repeated coset enumeration.
#[derive(Clone, Debug)]
pub struct ReducedLattice {
    basis: Vec<Vec<BigInt>>,
    // mu[i][j] for j < i
    mu: Vec<Vec<f64>>,
    bstar: Vec<Vec<f64>>,
    bnorm: Vec<f64>,
}

/// Outcome of an enumeration that visited every candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumStats {
    pub nodes: u64,
    pub stopped_early: bool,
}

impl ReducedLattice {
    /// Reduces a full-rank square basis.
    pub fn new(mut basis: Vec<Vec<BigInt>>) -> Result<Self> {
        lll_reduce(&mut basis)?;
        let n = basis.len();
        let bf: Vec<Vec<f64>> = basis.iter().map(|r| r.iter().map(to_f64).collect()).collect();
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        let mut bnorm = vec![0.0; n];
        for i in 0..n {
            let mut v = bf[i].clone();
            for j in 0..i {
                let m = fdot(&bf[i], &bstar[j]) / bnorm[j];
                mu[i][j] = m;
                for (x, y) in v.iter_mut().zip(&bstar[j]) {
                    *x -= m * y;
                }
            }
            bnorm[i] = fdot(&v, &v);
            bstar.push(v);
        }
        Ok(Self { basis, mu, bstar, bnorm })
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Moves `shift` within its coset towards the origin (iterated Babai
    /// rounding; exact in the integers).
    pub fn babai(&self, shift: &[BigInt]) -> Vec<BigInt> {
        let mut x = shift.to_vec();
        for _ in 0..16 {
            let mut changed = false;
            for i in (0..self.dim()).rev() {
                let xf: Vec<f64> = x.iter().map(to_f64).collect();
                let c = (fdot(&xf, &self.bstar[i]) / self.bnorm[i]).round();
                if c != 0.0 && c.is_finite() {
                    let q = BigInt::from_f64(c).expect("finite");
                    for (a, b) in x.iter_mut().zip(&self.basis[i]) {
                        *a -= &q * b;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        x
    }

    /// Calls `visit` on every vector `y` of `shift + L` with
    /// `max |y_i| <= bound`. `visit` returns `false` to stop. Fails with a
    /// resource error after `node_limit` search nodes.
    pub fn enumerate_box(
        &self,
        shift: &[BigInt],
        bound: u64,
        node_limit: u64,
        mut visit: impl FnMut(&[BigInt]) -> bool,
    ) -> Result<EnumStats> {
        let n = self.dim();
        let x0 = self.babai(shift);
        let x0f: Vec<f64> = x0.iter().map(to_f64).collect();
        let t: Vec<f64> = (0..n).map(|j| fdot(&x0f, &self.bstar[j]) / self.bnorm[j]).collect();
        let width = shift.len() as f64;
        let r2 = (bound as f64).powi(2) * width * (1.0 + 1e-9) + 1e-6;
        let bound = BigInt::from(bound);

        let mut coeffs = vec![0i64; n];
        let mut stats = EnumStats { nodes: 0, stopped_early: false };
        let mut stack_partial = vec![0.0f64; n + 1];
        self.descend(
            n,
            &t,
            r2,
            &mut coeffs,
            &mut stack_partial,
            &x0,
            &bound,
            node_limit,
            &mut stats,
            &mut visit,
        )?;
        Ok(stats)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        level: usize,
        t: &[f64],
        r2: f64,
        coeffs: &mut [i64],
        partial: &mut [f64],
        x0: &[BigInt],
        bound: &BigInt,
        node_limit: u64,
        stats: &mut EnumStats,
        visit: &mut dyn FnMut(&[BigInt]) -> bool,
    ) -> Result<bool> {
        if level == 0 {
            let mut y = x0.to_vec();
            for (i, &k) in coeffs.iter().enumerate() {
                if k != 0 {
                    let k = BigInt::from(k);
                    for (a, b) in y.iter_mut().zip(&self.basis[i]) {
                        *a += &k * b;
                    }
                }
            }
            if y.iter().all(|v| v.abs() <= *bound) && !visit(&y) {
                stats.stopped_early = true;
                return Ok(false);
            }
            return Ok(true);
        }
        let j = level - 1;
        stats.nodes += 1;
        if stats.nodes > node_limit {
            return Err(Error::ResourceLimit(format!(
                "lattice enumeration exceeded {node_limit} nodes"
            )));
        }
        let mut c = t[j];
        for i in j + 1..self.dim() {
            c += self.mu[i][j] * coeffs[i] as f64;
        }
        let room = r2 - partial[level];
        if room < 0.0 {
            return Ok(true);
        }
        let rad = (room / self.bnorm[j]).sqrt();
        let lo = (-c - rad).ceil() as i64;
        let hi = (-c + rad).floor() as i64;
        for k in lo..=hi {
            let d = k as f64 + c;
            partial[j] = partial[level] + d * d * self.bnorm[j];
            coeffs[j] = k;
            if !self.descend(j, t, r2, coeffs, partial, x0, bound, node_limit, stats, visit)? {
                return Ok(false);
            }
        }
        coeffs[j] = 0;
        Ok(true)
    }
}

fn fdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn det(m: &[Vec<BigInt>]) -> BigRational {
        let n = m.len();
        let mut a: Vec<Vec<BigRational>> = m
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let mut d = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                a.swap(p, c);
                d = -d;
            }
            d *= a[c][c].clone();
            for r in c + 1..n {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
        d
    }

    fn check_reduced(b: &[Vec<BigInt>]) {
        let n = b.len();
        let rb: Vec<Vec<BigRational>> = b
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let rdot = |x: &[BigRational], y: &[BigRational]| -> BigRational {
            x.iter().zip(y).map(|(a, b)| a * b).fold(BigRational::zero(), |s, v| s + v)
        };
        let mut bs: Vec<Vec<BigRational>> = Vec::new();
        let mut norms = Vec::new();
        let half = BigRational::new(1.into(), 2.into());
        for i in 0..n {
            let mut v = rb[i].clone();
            let mut mus = Vec::new();
            for j in 0..i {
                let m: BigRational = rdot(&rb[i], &bs[j]) / &norms[j];
                assert!(m.abs() <= half, "size reduction");
                for (x, y) in v.iter_mut().zip(&bs[j]) {
                    *x -= &m * y;
                }
                mus.push(m);
            }
            let nv = rdot(&v, &v);
            if i > 0 {
                let delta = BigRational::new(99.into(), 100.into());
                let m = &mus[i - 1];
                assert!(&nv >= &((delta - m * m) * &norms[i - 1]), "Lovasz");
            }
            norms.push(nv);
            bs.push(v);
        }
    }

    #[test]
    fn reduces_classic_example() {
        let mut b = ints(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        let before = det(&b);
        lll_reduce(&mut b).unwrap();
        assert_eq!(det(&b).abs(), before.abs());
        check_reduced(&b);
    }

    #[test]
    fn dependent_rows_rejected() {
        let mut b = ints(&[&[1, 2], &[2, 4]]);
        assert!(lll_reduce(&mut b).is_err());
    }

    #[test]
    fn enumeration_counts_box_points() {
        // lattice 3Z x Z, coset (1, 0) + L, box |y| <= 2: y0 in {1,-2}, y1 in [-2,2]
        let lat = ReducedLattice::new(ints(&[&[3, 0], &[0, 1]])).unwrap();
        let mut seen = Vec::new();
        lat.enumerate_box(&[BigInt::from(100), BigInt::from(-50)], 2, 1_000_000, |y| {
            seen.push(y.to_vec());
            true
        })
        .unwrap();
        seen.sort();
        assert_eq!(seen.len(), 10);
        assert!(seen.iter().all(|y| (&y[0] - 1i32).is_multiple_of(&BigInt::from(3))));
    }

    proptest! {
        #[test]
        fn lll_preserves_lattice_and_reduces(
            entries in prop::collection::vec(-50i64..50, 16),
        ) {
            let rows: Vec<Vec<BigInt>> = entries
                .chunks(4)
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            let d0 = det(&rows);
            prop_assume!(!d0.is_zero());
            let mut b = rows.clone();
            lll_reduce(&mut b).unwrap();
            prop_assert_eq!(det(&b).abs(), d0.abs());
            check_reduced(&b);
        }

        #[test]
        fn enumeration_matches_brute_force(
            a in 1i64..6, b in -5i64..5, c in 1i64..6, s0 in -30i64..30, s1 in -30i64..30,
        ) {
            // L spanned by (a, b), (0, c); brute-force the box |y| <= 4
            let lat = ReducedLattice::new(ints(&[&[a, b], &[0, c]])).unwrap();
            let mut got = Vec::new();
            lat.enumerate_box(&[BigInt::from(s0), BigInt::from(s1)], 4, 1_000_000, |y| {
                got.push((y[0].to_i64().unwrap(), y[1].to_i64().unwrap()));
                true
            }).unwrap();
            got.sort();
            let mut want = Vec::new();
            for y0 in -4i64..=4 {
                for y1 in -4i64..=4 {
                    // (y - s) in L: y0 - s0 = k a, y1 - s1 - k b = l c
                    let dx = y0 - s0;
                    if dx % a != 0 { continue; }
                    let k = dx / a;
                    if (y1 - s1 - k * b) % c == 0 {
                        want.push((y0, y1));
                    }
                }
            }
            prop_assert_eq!(got, want);
        }
    }
}
