//! Linear algebra over the chain ring `Z/p^N`.
//!
//! Two normal forms are provided. [`smith_reduce`] diagonalises a matrix by
//! pivoting on the entry of least valuation, keeping the column transform,
//! which yields elementary divisors and kernel generators. [`HowellForm`] is
//! the canonical row echelon form with the Howell property: every element of
//! the row span whose first `j` entries vanish is a combination of the rows
//! whose pivot lies at or after column `j`. That property makes span
//! membership a single left-to-right reduction and lets kernel modules be
//! lifted to integer lattices with a triangular basis.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;
use crate::padic::PadicRing;

/// Dense matrix over `Z/p^N`, row major, entries in `[0, p^N)`.
pub type Matrix = Vec<Vec<BigUint>>;

fn valuation(x: &BigUint, ring: &PadicRing) -> u32 {
    if x.is_zero() {
        return ring.precision();
    }
    let p = BigUint::from(ring.p());
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

/// `x / y` in `Z/p^N` for `val(x) >= val(y)`, `y != 0`. Any lift works; the
/// result `f` satisfies `f * y = x`.
fn exact_quotient(x: &BigUint, y: &BigUint, ring: &PadicRing) -> BigUint {
    let m = ring.modulus();
    let v = valuation(y, ring);
    let pv = arith::pow_u64(ring.p(), v);
    let unit = y / &pv;
    let t = x / &pv;
    let inv = arith::inverse_mod(&unit, m).expect("unit part is invertible");
    (t * inv) % m
}

fn sub_scaled(target: &mut [BigUint], source: &[BigUint], factor: &BigUint, m: &BigUint) {
    if factor.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(source) {
        let prod = (factor * s) % m;
        *t = (&*t + m - prod) % m;
    }
}

/// Result of diagonalising a `rows x cols` matrix `A`: `P A T = D` with
/// `D` diagonal. Only `T` (acting on columns) is kept.
#[derive(Clone, Debug)]
pub struct SmithReduction {
    /// Valuations of the diagonal entries, non-decreasing, one per pivot.
    pub pivot_valuations: Vec<u32>,
    /// `cols x cols` column transform; column `k` of `T` is the combination
    /// of original columns that produced diagonal position `k`.
    pub transform: Matrix,
    pub cols: usize,
}

impl SmithReduction {
    pub fn rank(&self) -> usize {
        self.pivot_valuations.len()
    }

    /// Column `k` of the transform as a coefficient vector.
    pub fn combination(&self, k: usize) -> Vec<BigUint> {
        self.transform.iter().map(|row| row[k].clone()).collect()
    }

    /// Generators of `{c : A c = 0}`: `p^(N - v_k) T e_k` for pivots and
    /// `T e_k` for the remaining columns.
    pub fn kernel_generators(&self, ring: &PadicRing) -> Vec<Vec<BigUint>> {
        let m = ring.modulus();
        (0..self.cols)
            .map(|k| {
                let scale = match self.pivot_valuations.get(k) {
                    Some(&v) => arith::pow_u64(ring.p(), ring.precision() - v),
                    None => BigUint::one(),
                };
                self.combination(k).into_iter().map(|x| (x * &scale) % m).collect()
            })
            .filter(|g: &Vec<BigUint>| g.iter().any(|x| !x.is_zero()))
            .collect()
    }
}

/// Diagonalises `a` (given as rows) by minimal-valuation pivoting.
pub fn smith_reduce(ring: &PadicRing, a: &Matrix, cols: usize) -> SmithReduction {
    let m = ring.modulus();
    let rows = a.len();
    let mut a: Matrix = a.iter().map(|r| r.iter().map(|x| x % m).collect()).collect();
    let mut t: Matrix = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigUint::one() % m } else { BigUint::zero() }).collect())
        .collect();
    let mut pivots = Vec::new();
    let n = ring.precision();

    for r in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in r..rows {
            for j in r..cols {
                let v = valuation(&a[i][j], ring);
                if v < n && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break;
                    }
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((v, pi, pj)) = best else { break };
        a.swap(r, pi);
        if pj != r {
            for row in a.iter_mut() {
                row.swap(r, pj);
            }
            for row in t.iter_mut() {
                row.swap(r, pj);
            }
        }
        let pivot = a[r][r].clone();
        // clear row r with column operations
        for j in r + 1..cols {
            if a[r][j].is_zero() {
                continue;
            }
            let f = exact_quotient(&a[r][j], &pivot, ring);
            for row in a.iter_mut() {
                let prod = (&f * &row[r]) % m;
                row[j] = (&row[j] + m - prod) % m;
            }
            for row in t.iter_mut() {
                let prod = (&f * &row[r]) % m;
                row[j] = (&row[j] + m - prod) % m;
            }
        }
        // clear column r with row operations
        let pivot_row = a[r].clone();
        for i in r + 1..rows {
            if a[i][r].is_zero() {
                continue;
            }
            let f = exact_quotient(&a[i][r], &pivot, ring);
            sub_scaled(&mut a[i], &pivot_row, &f, m);
        }
        pivots.push(v);
    }
    SmithReduction {
        pivot_valuations: pivots,
        transform: t,
        cols,
    }
}

/// Row echelon form with the Howell property over `Z/p^N`.
#[derive(Clone, Debug)]
pub struct HowellForm {
    cols: usize,
    /// `(pivot column, pivot valuation, row)`; pivot entries equal `p^v`.
    rows: Vec<(usize, u32, Vec<BigUint>)>,
}

impl HowellForm {
    pub fn new(ring: &PadicRing, generators: &[Vec<BigUint>], cols: usize) -> Self {
        let m = ring.modulus();
        let n = ring.precision();
        let mut pending: Vec<Vec<BigUint>> = generators
            .iter()
            .map(|g| g.iter().map(|x| x % m).collect::<Vec<_>>())
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .collect();
        let mut out: Vec<(usize, u32, Vec<BigUint>)> = Vec::new();

        for col in 0..cols {
            let best = pending
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by_key(|(_, r)| valuation(&r[col], ring))
                .map(|(i, _)| i);
            let Some(idx) = best else { continue };
            let mut piv = pending.swap_remove(idx);
            let v = valuation(&piv[col], ring);
            let pv = arith::pow_u64(ring.p(), v);
            let unit = &piv[col] / &pv;
            let inv = arith::inverse_mod(&unit, m).expect("unit");
            for x in piv.iter_mut() {
                *x = (&*x * &inv) % m;
            }
            for row in pending.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let f = &row[col] / &pv;
                sub_scaled(row, &piv, &f, m);
            }
            pending.retain(|r| r.iter().any(|x| !x.is_zero()));
            // annihilator multiple: zero at `col`, may be non-zero later
            let ann = arith::pow_u64(ring.p(), n - v);
            let extra: Vec<BigUint> = piv.iter().map(|x| (x * &ann) % m).collect();
            if extra.iter().any(|x| !x.is_zero()) {
                pending.push(extra);
            }
            out.push((col, v, piv));
        }

        // reduce entries above each pivot into [0, p^v)
        for k in 0..out.len() {
            let (col, v, ref pivot_row) = out[k];
            let pivot_row = pivot_row.clone();
            let pv = arith::pow_u64(ring.p(), v);
            for (_, _, row) in out.iter_mut().take(k) {
                let q = &row[col] / &pv;
                sub_scaled(row, &pivot_row, &q, m);
            }
        }
        Self { cols, rows: out }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, u32, &[BigUint])> {
        self.rows.iter().map(|(c, v, r)| (*c, *v, r.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `target` by the rows; returns the remainder and the
    /// coefficients used (one per Howell row). The remainder is zero iff the
    /// target lies in the row span.
    pub fn reduce(&self, ring: &PadicRing, target: &[BigUint]) -> (Vec<BigUint>, Vec<BigUint>) {
        let m = ring.modulus();
        let mut rem: Vec<BigUint> = target.iter().map(|x| x % m).collect();
        let mut coeffs = vec![BigUint::zero(); self.rows.len()];
        for (k, (col, v, row)) in self.rows.iter().enumerate() {
            if rem[*col].is_zero() {
                continue;
            }
            if valuation(&rem[*col], ring) < *v {
                break;
            }
            let f = &rem[*col] / arith::pow_u64(ring.p(), *v);
            sub_scaled(&mut rem, row, &f, m);
            coeffs[k] = f;
        }
        (rem, coeffs)
    }

    pub fn contains(&self, ring: &PadicRing, target: &[BigUint]) -> bool {
        self.reduce(ring, target).0.iter().all(|x| x.is_zero())
    }

    /// Number of elements of the row span, as a power of `p`.
    pub fn span_size_exponent(&self, ring: &PadicRing) -> u32 {
        self.rows.iter().map(|(_, v, _)| ring.precision() - v).sum()
    }

    /// Integer basis of the lattice `{c in Z^cols : c mod p^N in span}`:
    /// lifted Howell rows plus `p^N e_j` for columns without a pivot.
    pub fn lattice_basis(&self, ring: &PadicRing) -> Vec<Vec<BigInt>> {
        let m = BigInt::from(ring.modulus().clone());
        let mut by_col: Vec<Option<&Vec<BigUint>>> = vec![None; self.cols];
        for (col, _, row) in &self.rows {
            by_col[*col] = Some(row);
        }
        by_col
            .into_iter()
            .enumerate()
            .map(|(j, row)| match row {
                Some(r) => r.iter().map(|x| BigInt::from(x.clone())).collect(),
                None => {
                    let mut e = vec![BigInt::zero(); self.cols];
                    e[j] = m.clone();
                    e
                }
            })
            .collect()
    }
}

/// Integer basis of `{c in Z^k : sum_i c_i v_i = 0 mod p^N}` for the given
/// vectors `v_1..v_k` (each of length `dim`).
pub fn kernel_lattice(ring: &PadicRing, vectors: &[Vec<BigUint>], dim: usize) -> Vec<Vec<BigInt>> {
    let k = vectors.len();
    let a: Matrix = (0..dim)
        .map(|i| vectors.iter().map(|v| v[i].clone()).collect())
        .collect();
    let red = smith_reduce(ring, &a, k);
    let gens = red.kernel_generators(ring);
    HowellForm::new(ring, &gens, k).lattice_basis(ring)
}

/// Solves `sum_i c_i cols[i] = target` over `F_p`; `None` when the target
/// is outside the span. Entries must already be reduced mod `p`.
pub fn solve_mod_prime(cols: &[Vec<u64>], target: &[u64], p: u64) -> Option<Vec<u64>> {
    let rows = target.len();
    let k = cols.len();
    // augmented matrix, one row per coordinate
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|i| cols.iter().map(|c| c[i] % p).chain(std::iter::once(target[i] % p)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = modpow(a[r][c], p - 2, p);
        for x in a[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..=k {
                    a[i][j] = (a[i][j] + p - f * a[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| row[k] != 0) {
        return None;
    }
    let mut sol = vec![0; k];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = a[i][k];
    }
    Some(sol)
}

/// Rank of a matrix over `F_p`, rows given as slices.
pub fn rank_mod_prime(rows: &[Vec<u64>], p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, pr);
        let inv = modpow(a[rank][c], p - 2, p);
        for i in rank + 1..a.len() {
            if a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                for j in c..cols {
                    a[i][j] = (a[i][j] + p - f * a[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}
