//! Finite-precision freeness checks: linear independence over the p-adic
//! integers, the containment bound for nearly uniform samples, and bases of
//! p-purifications of finite-rank subgroups.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::padic::{PadicRing, PadicVector};
use crate::random::{NearlyUniform, Seed};
use crate::zmod::{self, HowellForm};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub independent: bool,
    /// Dependence coefficients, symmetric representatives mod `p^N`.
    #[serde(with = "arith::decimal_signed_vec_opt")]
    pub witness: Option<Vec<BigInt>>,
    pub pivot_valuations: Vec<u32>,
    pub rank: usize,
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
}

fn common_ring(vectors: &[PadicVector]) -> Result<Arc<PadicRing>> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("at least one vector is required".into()))?;
    let ring = first.ring().clone();
    for v in vectors {
        if !v.ring().same_as(&ring) {
            return Err(Error::IncompatibleOperands(format!(
                "vectors over (p={}, N={}) and (p={}, N={})",
                ring.p(),
                ring.precision(),
                v.p(),
                v.precision()
            )));
        }
    }
    Ok(ring)
}

fn ambient_len(vectors: &[PadicVector]) -> usize {
    vectors.iter().map(|v| v.span_len()).max().unwrap_or(0)
}

/// Column reduction with minimal-valuation pivoting. Independent iff every
/// vector yields a pivot and all pivot valuations are below `N/2`.
pub fn jp_linear_independence(vectors: &[PadicVector]) -> Result<IndependenceVerdict> {
    let ring = common_ring(vectors)?;
    let n = ring.precision();
    let dim = ambient_len(vectors);
    let k = vectors.len();
    let dense: Vec<Vec<BigUint>> = vectors.iter().map(|v| v.to_dense(dim)).collect();
    let a: zmod::Matrix = (0..dim).map(|i| dense.iter().map(|v| v[i].clone()).collect()).collect();
    let red = zmod::smith_reduce(&ring, &a, k);
    let rank = red.rank();
    let independent = rank == k && red.pivot_valuations.iter().all(|&v| 2 * v < n);

    let witness = if independent {
        None
    } else {
        let m = ring.modulus();
        let raw: Vec<BigUint> = if rank < k {
            red.combination(rank)
        } else {
            let (idx, &v) = red
                .pivot_valuations
                .iter()
                .enumerate()
                .max_by_key(|(_, v)| **v)
                .expect("non-empty");
            let scale = arith::pow_u64(ring.p(), n - v);
            red.combination(idx).into_iter().map(|x| (x * &scale) % m).collect()
        };
        let mut w: Vec<BigInt> = raw.iter().map(|x| arith::symmetric(x, m)).collect();
        if w.iter().find(|c| !c.is_zero()).is_some_and(|c| c.sign() == num_bigint::Sign::Minus) {
            w = w.into_iter().map(|c| -c).collect();
        }
        Some(w)
    };
    Ok(IndependenceVerdict {
        independent,
        witness,
        pivot_valuations: red.pivot_valuations,
        rank,
        p: ring.p(),
        precision: n,
    })
}

/// `sum_i c_i v_i = 0 mod p^N`.
pub fn verify_witness(vectors: &[PadicVector], witness: &[BigInt]) -> Result<bool> {
    let ring = common_ring(vectors)?;
    if witness.len() != vectors.len() {
        return Err(Error::Arity {
            expected: vectors.len(),
            got: witness.len(),
        });
    }
    let mut acc = PadicVector::zero(&ring);
    for (v, c) in vectors.iter().zip(witness) {
        acc = acc.add(&v.scale_int(c))?;
    }
    Ok(acc.is_zero() && witness.iter().any(|c| !arith::reduce(c, ring.modulus()).is_zero()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub p: u64,
    pub k: usize,
    pub n: u32,
    pub alpha: f64,
    pub trials: u64,
    pub hits: u64,
    pub frequency: Option<f64>,
    /// `p^(nk - n^alpha)`, capped at 1.
    pub bound: f64,
    pub sigma: f64,
    /// Exact containment probability for the sampler and the fixed `b_i`.
    pub exact_probability: f64,
    pub passes: bool,
    pub b: Vec<PadicVector>,
}

/// Frequency of `a in <b_1..b_k> + p^n B` for nearly uniform `a`. The `b_i`
/// are sampled once from the same law unless supplied.
pub fn containment_probability_trial(
    p: u64,
    k: usize,
    n: u32,
    alpha: f64,
    trials: u64,
    seed: &Seed,
    fixed_b: Option<&[PadicVector]>,
) -> Result<ContainmentReport> {
    let sampler = NearlyUniform::new(p, alpha)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let ring = PadicRing::new(p, n)?;
    let b: Vec<PadicVector> = match fixed_b {
        Some(bs) => {
            if bs.len() != k {
                return Err(Error::Arity {
                    expected: k,
                    got: bs.len(),
                });
            }
            bs.iter().map(|v| v.reduce_precision(n)).collect::<Result<_>>()?
        }
        None => (0..k)
            .map(|i| sampler.sample(n, &seed.child(format!("b[{i}]"))))
            .collect::<Result<_>>()?,
    };
    let w = sampler.window_len(n);
    let dim = ambient_len(&b).max(w);
    // window coordinates last so the Howell tail describes span ∩ window
    let order: Vec<usize> = (w..dim).chain(0..w).collect();
    let permute = |v: &PadicVector| -> Vec<BigUint> { order.iter().map(|&i| v.get(i)).collect() };
    let howell = HowellForm::new(&ring, &b.iter().map(permute).collect::<Vec<_>>(), dim);
    let tail_exp: u32 = howell.rows().filter(|(c, _, _)| *c >= dim - w).map(|(_, v, _)| n - v).sum();
    let exact_probability = (p as f64).powf(tail_exp as f64 - (n as f64) * w as f64);

    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let a = sampler.sample(n, &seed.child(format!("trial[{t}]")))?;
            Ok(howell.contains(&ring, &permute(&a)) as u64)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;

    let exponent = n as f64 * k as f64 - sampler.bound_exponent(n);
    let bound = (p as f64).powf(exponent).min(1.0);
    let sigma = if trials == 0 {
        0.0
    } else {
        (bound * (1.0 - bound) / trials as f64).sqrt()
    };
    let frequency = (trials > 0).then(|| hits as f64 / trials as f64);
    let passes = bound >= 1.0 || frequency.map_or(true, |f| f <= bound + 3.0 * sigma);
    Ok(ContainmentReport {
        p,
        k,
        n,
        alpha,
        trials,
        hits,
        frequency,
        bound,
        sigma,
        exact_probability,
        passes,
        b,
    })
}

/// One basis vector `t` of a purification with `p^d t = sum_i c_i x_i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PureBasisVector {
    /// Known to precision `N - d`.
    pub vector: PadicVector,
    pub denominator_exponent: u32,
    #[serde(with = "arith::decimal_signed_vec")]
    pub coefficients: Vec<BigInt>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeBasisReport {
    pub basis: Vec<PureBasisVector>,
    pub rank: usize,
    /// Rank of the input span from the column reduction at precision `N`.
    pub input_rank: usize,
    pub cap: u32,
    pub certified: bool,
}

struct Candidate {
    vec: Vec<BigUint>,
    prec: u32,
    denom: u32,
    coeffs: Vec<BigInt>,
}

/// Basis of the p-purification (denominators at most `p^K`) of the integer
/// span of `elements`. The kept vectors stay independent mod `p`, so their
/// span is p-pure; an input that falls into that span mod `p` is replaced by
/// `(x - sum c_i t_i) / p` until it is new mod `p` or vanishes.
pub fn finite_rank_free_basis(elements: &[PadicVector], cap: u32) -> Result<FreeBasisReport> {
    let ring = common_ring(elements)?;
    let p = ring.p();
    let n = ring.precision();
    let dim = ambient_len(elements);
    let count = elements.len();
    let pb = BigUint::from(p);
    let mod_p = |v: &[BigUint]| -> Vec<u64> { v.iter().map(|x| (x % &pb).to_u64().unwrap()).collect() };

    let mut kept: Vec<Candidate> = Vec::new();
    for (idx, x) in elements.iter().enumerate() {
        let mut coeffs = vec![BigInt::zero(); count];
        coeffs[idx] = 1.into();
        let mut y = Candidate {
            vec: x.to_dense(dim),
            prec: n,
            denom: 0,
            coeffs,
        };
        loop {
            if y.vec.iter().all(|c| c.is_zero()) {
                break;
            }
            let cols: Vec<Vec<u64>> = kept.iter().map(|t| mod_p(&t.vec)).collect();
            let Some(c) = zmod::solve_mod_prime(&cols, &mod_p(&y.vec), p) else {
                kept.push(y);
                break;
            };
            let used: Vec<usize> = (0..kept.len()).filter(|&i| c[i] != 0).collect();
            let prec = used.iter().map(|&i| kept[i].prec).fold(y.prec, u32::min);
            let denom = used.iter().map(|&i| kept[i].denom).fold(y.denom, u32::max) + 1;
            if denom > cap {
                return Err(Error::Inconclusive(format!(
                    "purification still growing at denominator cap p^{cap} (element {idx})"
                )));
            }
            if prec <= 1 {
                return Err(Error::Inconclusive(format!("precision exhausted while purifying element {idx}")));
            }
            let m = arith::pow_u64(p, prec);
            let mut z: Vec<BigInt> = y.vec.iter().map(|v| BigInt::from(v.clone())).collect();
            // common denominator p^(denom-1) for the coefficient bookkeeping
            let lift = |d: u32| BigInt::from(arith::pow_u64(p, denom - 1 - d));
            let mut new_coeffs: Vec<BigInt> = y.coeffs.iter().map(|a| a * lift(y.denom)).collect();
            for &i in &used {
                let ci = BigInt::from(c[i]);
                for (zj, tj) in z.iter_mut().zip(&kept[i].vec) {
                    *zj -= &ci * BigInt::from(tj.clone());
                }
                let scale = &ci * lift(kept[i].denom);
                for (a, b) in new_coeffs.iter_mut().zip(&kept[i].coeffs) {
                    *a -= &scale * b;
                }
            }
            let next_m = arith::pow_u64(p, prec - 1);
            let vec = z
                .iter()
                .map(|zj| {
                    let r = arith::reduce(zj, &m);
                    let (q, rem) = r.div_rem(&pb);
                    debug_assert!(rem.is_zero());
                    q % &next_m
                })
                .collect();
            y = Candidate {
                vec,
                prec: prec - 1,
                denom,
                coeffs: new_coeffs,
            };
        }
    }

    let input_rank = zmod::smith_reduce(
        &ring,
        &(0..dim)
            .map(|i| elements.iter().map(|v| v.get(i)).collect())
            .collect::<Vec<_>>(),
        count,
    )
    .rank();

    let mut basis = Vec::with_capacity(kept.len());
    let mut identities_hold = true;
    for t in kept {
        let tr = ring.with_precision(t.prec);
        let dense: Vec<BigInt> = t.vec.iter().map(|x| BigInt::from(x.clone())).collect();
        let vector = PadicVector::from_dense(&tr, &dense);
        identities_hold &= check_identity(&ring, elements, &t.vec, t.prec, t.denom, &t.coeffs, dim);
        basis.push(PureBasisVector {
            vector,
            denominator_exponent: t.denom,
            coefficients: t.coeffs,
        });
    }
    let rank = basis.len();
    Ok(FreeBasisReport {
        certified: identities_hold && rank == input_rank,
        basis,
        rank,
        input_rank,
        cap,
    })
}

/// `p^d t = sum_i c_i x_i` modulo `p^(prec + d)`.
fn check_identity(
    ring: &PadicRing,
    elements: &[PadicVector],
    t: &[BigUint],
    prec: u32,
    d: u32,
    coeffs: &[BigInt],
    dim: usize,
) -> bool {
    let m = arith::pow_u64(ring.p(), (prec + d).min(ring.precision()));
    let pd = BigInt::from(arith::pow_u64(ring.p(), d));
    (0..dim).all(|j| {
        let lhs = &pd * BigInt::from(t[j].clone());
        let rhs: BigInt = elements.iter().zip(coeffs).map(|(x, c)| c * BigInt::from(x.get(j))).sum();
        arith::reduce(&(lhs - rhs), &m).is_zero()
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreenessParams {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub window: usize,
    pub alpha: f64,
    pub num_random: usize,
    pub cap: u32,
}

impl Default for FreenessParams {
    fn default() -> Self {
        Self {
            p: 2,
            precision: 32,
            window: 8,
            alpha: 1.5,
            num_random: 3,
            cap: 16,
        }
    }
}

impl FreenessParams {
    /// Index `k` of the last basis vector: `e_0..e_k` fill the window
    /// together with the random elements.
    pub fn k(&self) -> usize {
        self.window - self.num_random - 1
    }

    pub fn expected_rank(&self) -> usize {
        self.k() + self.num_random + 1
    }

    pub fn validate(&self) -> Result<()> {
        if !arith::is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        if self.num_random + 1 > self.window {
            return Err(Error::InvalidParameter(format!(
                "{} random elements do not fit a window of {}",
                self.num_random, self.window
            )));
        }
        if self.precision == 0 {
            return Err(Error::InvalidParameter("precision must be positive".into()));
        }
        NearlyUniform::new(self.p, self.alpha).map(|_| ())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreenessTrial {
    pub trial: u64,
    pub independent: bool,
    pub pivot_valuations: Vec<u32>,
    pub basis_rank: Option<usize>,
    pub certified: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreenessReport {
    pub params: FreenessParams,
    pub trials: u64,
    pub independent: u64,
    pub independent_fraction: Option<f64>,
    /// Independent instances whose purification basis has the expected rank.
    pub basis_ok: u64,
    pub expected_rank: usize,
    pub failures: Vec<FreenessTrial>,
    pub meaning: String,
}

/// Inputs of one pipeline trial: `e_0..e_k` then the random elements.
pub fn freeness_instance(params: &FreenessParams, seed: &Seed) -> Result<Vec<PadicVector>> {
    params.validate()?;
    let ring = PadicRing::new(params.p, params.precision)?;
    let sampler = NearlyUniform::new(params.p, params.alpha)?.with_min_window(params.window);
    let mut out: Vec<PadicVector> = (0..=params.k()).map(|i| PadicVector::basis(&ring, i)).collect();
    for j in 0..params.num_random {
        let a = sampler.sample(params.precision, &seed.child(format!("a[{j}]")))?;
        out.push(PadicVector::from_elements(
            a.entries().iter().map(|(i, r)| (*i, ring.element(r.clone()).expect("in range"))),
            &ring,
        )?);
    }
    Ok(out)
}

fn run_trial(params: &FreenessParams, seed: &Seed, trial: u64) -> Result<FreenessTrial> {
    let vectors = freeness_instance(params, &seed.child(format!("trial[{trial}]")))?;
    let verdict = jp_linear_independence(&vectors)?;
    let mut out = FreenessTrial {
        trial,
        independent: verdict.independent,
        pivot_valuations: verdict.pivot_valuations,
        basis_rank: None,
        certified: false,
        error: None,
    };
    if verdict.independent {
        match finite_rank_free_basis(&vectors, params.cap) {
            Ok(r) => {
                out.basis_rank = Some(r.rank);
                out.certified = r.certified;
            }
            Err(e) => out.error = Some(e.to_string()),
        }
    }
    Ok(out)
}

/// Runs the independence test and, on independent instances, the
/// purification basis, over `trials` derived seeds.
pub fn freeness_pipeline(params: &FreenessParams, trials: u64, seed: &Seed) -> Result<FreenessReport> {
    params.validate()?;
    let results: Vec<FreenessTrial> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(params, seed, t))
        .collect::<Result<_>>()?;
    let expected = params.expected_rank();
    let independent = results.iter().filter(|r| r.independent).count() as u64;
    let basis_ok = results
        .iter()
        .filter(|r| r.independent && r.basis_rank == Some(expected) && r.certified)
        .count() as u64;
    let failures: Vec<FreenessTrial> = results
        .into_iter()
        .filter(|r| !r.independent || r.basis_rank != Some(expected) || !r.certified)
        .take(20)
        .collect();
    Ok(FreenessReport {
        params: params.clone(),
        trials,
        independent,
        independent_fraction: (trials > 0).then(|| independent as f64 / trials as f64),
        basis_ok,
        expected_rank: expected,
        failures,
        meaning: format!(
            "independence is a finite-precision verdict (all pivots below N/2 at N={}), not a proof",
            params.precision
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u64, n: u32) -> Arc<PadicRing> {
        PadicRing::new(p, n).unwrap()
    }

    fn vec_of(r: &Arc<PadicRing>, xs: &[i64]) -> PadicVector {
        PadicVector::from_dense(r, &xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    #[test]
    fn basis_vectors_independent() {
        let r = ring(5, 6);
        let v = jp_linear_independence(&[PadicVector::basis(&r, 0), PadicVector::basis(&r, 1)]).unwrap();
        assert!(v.independent);
        assert!(v.witness.is_none());
        assert_eq!(v.pivot_valuations, vec![0, 0]);
    }

    #[test]
    fn scalar_multiple_witness() {
        let r = ring(5, 3);
        let vs = [vec_of(&r, &[1]), vec_of(&r, &[3])];
        let v = jp_linear_independence(&vs).unwrap();
        assert!(!v.independent);
        let w = v.witness.unwrap();
        assert_eq!(w, vec![BigInt::from(3), BigInt::from(-1)]);
        assert!(verify_witness(&vs, &w).unwrap());
    }

    #[test]
    fn integer_combination_dependent() {
        let r = ring(3, 8);
        let vs = [vec_of(&r, &[1, 0]), vec_of(&r, &[0, 1]), vec_of(&r, &[1, 3])];
        let v = jp_linear_independence(&vs).unwrap();
        assert!(!v.independent);
        assert!(verify_witness(&vs, &v.witness.unwrap()).unwrap());
    }

    #[test]
    fn deep_pivot_is_not_independent() {
        // p^5 e_0 at N = 8: full rank but the pivot sits past N/2
        let r = ring(2, 8);
        let vs = [vec_of(&r, &[32])];
        let v = jp_linear_independence(&vs).unwrap();
        assert!(!v.independent);
        assert_eq!(v.pivot_valuations, vec![5]);
        assert!(verify_witness(&vs, &v.witness.unwrap()).unwrap());
    }

    #[test]
    fn mixed_precision_rejected() {
        let vs = [PadicVector::basis(&ring(2, 4), 0), PadicVector::basis(&ring(2, 5), 1)];
        assert!(matches!(jp_linear_independence(&vs), Err(Error::IncompatibleOperands(_))));
    }

    #[test]
    fn purification_examples() {
        let r = ring(2, 10);
        let b = finite_rank_free_basis(&[vec_of(&r, &[2])], 1).unwrap();
        assert_eq!(b.rank, 1);
        assert_eq!(b.basis[0].vector.get(0), BigUint::from(1u32));
        assert_eq!(b.basis[0].denominator_exponent, 1);
        assert!(b.certified);

        let b = finite_rank_free_basis(&[vec_of(&r, &[3])], 4).unwrap();
        assert_eq!(b.basis[0].vector.get(0), BigUint::from(3u32));
        assert_eq!(b.basis[0].denominator_exponent, 0);

        let vs = [vec_of(&r, &[1, 0]), vec_of(&r, &[1, 2]), vec_of(&r, &[0, 1])];
        let b = finite_rank_free_basis(&vs, 4).unwrap();
        assert_eq!(b.rank, 2);
        assert!(b.certified);
    }

    #[test]
    fn purification_cap_is_enforced() {
        let r = ring(2, 10);
        assert!(matches!(
            finite_rank_free_basis(&[vec_of(&r, &[8])], 2),
            Err(Error::Inconclusive(_))
        ));
        assert_eq!(finite_rank_free_basis(&[vec_of(&r, &[8])], 3).unwrap().rank, 1);
    }

    #[test]
    fn containment_k0_matches_coset_probability() {
        let rep = containment_probability_trial(2, 0, 3, 1.5, 20000, &Seed::new(3), None).unwrap();
        // window of 3 coordinates mod 8
        assert_eq!(rep.exact_probability, 2f64.powi(-9));
        let expect = rep.exact_probability;
        let sd = (expect * (1.0 - expect) / 20000.0).sqrt();
        assert!((rep.frequency.unwrap() - expect).abs() <= 3.0 * sd + 1e-12);
    }

    #[test]
    fn containment_with_fixed_b() {
        let r = ring(2, 3);
        let b = [PadicVector::basis(&r, 0)];
        let rep = containment_probability_trial(2, 1, 3, 1.5, 10000, &Seed::new(4), Some(&b)).unwrap();
        assert_eq!(rep.exact_probability, 2f64.powi(-6));
        assert!(rep.passes);
        assert!(rep.exact_probability <= rep.bound);
    }

    #[test]
    fn containment_bound_above_one_passes() {
        let rep = containment_probability_trial(2, 3, 2, 1.5, 100, &Seed::new(1), None).unwrap();
        assert_eq!(rep.bound, 1.0);
        assert!(rep.passes);
    }

    #[test]
    fn pipeline_small_run() {
        let params = FreenessParams::default();
        let rep = freeness_pipeline(&params, 20, &Seed::new(11)).unwrap();
        assert_eq!(rep.expected_rank, 8);
        assert!(rep.independent >= 19);
        assert_eq!(rep.basis_ok, rep.independent);
    }

    fn arb_vectors() -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-20i64..20, 3), 1..4)
    }

    proptest! {
        #[test]
        fn verdict_permutation_and_unit_invariant(vs in arb_vectors(), u in 0u64..50, rot in 0usize..4) {
            let r = ring(3, 6);
            let vecs: Vec<PadicVector> = vs.iter().map(|v| vec_of(&r, v)).collect();
            let base = jp_linear_independence(&vecs).unwrap();
            let mut perm = vecs.clone();
            perm.rotate_left(rot % vecs.len());
            let unit = BigInt::from(3 * u + 1);
            perm[0] = perm[0].scale_int(&unit);
            let other = jp_linear_independence(&perm).unwrap();
            prop_assert_eq!(base.independent, other.independent);
            prop_assert_eq!(base.pivot_valuations, other.pivot_valuations);
            if let Some(w) = &other.witness {
                prop_assert!(verify_witness(&perm, w).unwrap());
            }
        }

        #[test]
        fn purification_rank_matches_reduction(vs in arb_vectors()) {
            let r = ring(2, 12);
            let vecs: Vec<PadicVector> = vs.iter().map(|v| vec_of(&r, v)).collect();
            let rep = finite_rank_free_basis(&vecs, 12).unwrap();
            prop_assert!(rep.certified);
        }
    }
}
