//! Exact dense linear algebra over `Z` and `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

/// Determinant by fraction-free Bareiss elimination.
pub fn det_bareiss(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: IntMatrix = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn mat_add(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

/// Solves `a x = b` over `Q` for square non-singular `a`; `None` when singular.
pub fn solve_rational(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Faddeev–LeVerrier: returns `(chi, adj)` where `chi[k]` is the coefficient
/// of `c^k` in `det(cI - M)` and `adj[k]` the matrix coefficient of `c^k` in
/// `adj(cI - M)`.
pub fn char_poly_and_adjugate(m: &[Vec<BigInt>]) -> (Vec<BigInt>, Vec<IntMatrix>) {
    let n = m.len();
    let mut chi = vec![BigInt::zero(); n + 1];
    chi[n] = BigInt::one();
    // M_1 = I, c_{n-1} = -tr(M); M_k = M M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(M M_k)/k
    let mut mk = identity(n);
    let mut mats = Vec::with_capacity(n);
    for k in 1..=n {
        if k > 1 {
            let mut next = mat_mul(m, &mk);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += &chi[n - k + 1];
            }
            mk = next;
        }
        let am = mat_mul(m, &mk);
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        chi[n - k] = -tr / BigInt::from(k);
        mats.push(mk.clone());
    }
    // adj(cI - M) = sum_{k=1..n} c^{n-k} M_k
    let mut adj = vec![vec![vec![BigInt::zero(); n]; n]; n];
    for (k, mk) in mats.into_iter().enumerate() {
        adj[n - 1 - k] = mk;
    }
    (chi, adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn det_naive(m: &IntMatrix) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        (0..n)
            .map(|j| {
                let minor: IntMatrix = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let s = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                s * &m[0][j] * det_naive(&minor)
            })
            .sum()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det_bareiss(&ints(&[&[0, -1], &[1, 0]])), BigInt::from(1));
        assert_eq!(det_bareiss(&ints(&[&[0, 1, 2], &[0, 3, 4], &[5, 6, 7]])), BigInt::from(-10));
    }

    #[test]
    fn gaussian_char_poly() {
        // multiplication by i on Z[i]
        let (chi, adj) = char_poly_and_adjugate(&ints(&[&[0, -1], &[1, 0]]));
        assert_eq!(chi, vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)]);
        assert_eq!(adj[1], identity(2));
        assert_eq!(adj[0], ints(&[&[0, -1], &[1, 0]]));
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(e in prop::collection::vec(-9i64..9, 16)) {
            let m: IntMatrix = e.chunks(4).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            prop_assert_eq!(det_bareiss(&m), det_naive(&m));
        }

        #[test]
        fn adjugate_identity(e in prop::collection::vec(-5i64..5, 9), c in -6i64..6) {
            // (cI - M) adj(cI - M) = det(cI - M) I
            let m: IntMatrix = e.chunks(3).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let (chi, adj) = char_poly_and_adjugate(&m);
            let cb = BigInt::from(c);
            let mut ci_m: IntMatrix = m.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
            for (i, row) in ci_m.iter_mut().enumerate() {
                row[i] += &cb;
            }
            let det = det_bareiss(&ci_m);
            let chi_at: BigInt = chi.iter().rev().fold(BigInt::zero(), |acc, k| acc * &cb + k);
            prop_assert_eq!(&chi_at, &det);
            let mut adj_at = vec![vec![BigInt::zero(); 3]; 3];
            for (k, mk) in adj.iter().enumerate() {
                let ck = cb.pow(k as u32);
                for i in 0..3 { for j in 0..3 { adj_at[i][j] += &ck * &mk[i][j]; } }
            }
            let prod = mat_mul(&ci_m, &adj_at);
            for i in 0..3 { for j in 0..3 {
                let want = if i == j { det.clone() } else { BigInt::zero() };
                prop_assert_eq!(&prod[i][j], &want);
            } }
        }

        #[test]
        fn rational_solve_round_trip(e in prop::collection::vec(-9i64..9, 9), b in prop::collection::vec(-9i64..9, 3)) {
            let m: IntMatrix = e.chunks(3).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let bb: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
            match solve_rational(&m, &bb) {
                None => prop_assert!(det_bareiss(&m).is_zero()),
                Some(x) => {
                    for (row, rhs) in m.iter().zip(&bb) {
                        let s: BigRational = row.iter().zip(&x)
                            .map(|(a, y)| BigRational::from_integer(a.clone()) * y)
                            .fold(BigRational::zero(), |acc, v| acc + v);
                        prop_assert_eq!(s, BigRational::from_integer(rhs.clone()));
                    }
                }
            }
        }
    }
}
