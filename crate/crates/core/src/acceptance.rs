//! Fixed-seed acceptance suite. Each criterion returns a verdict with a short
//! detail line and its wall time against the allowed budget.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::corner::{self, AdditiveMap, CornerModel, CornerParams, RigidityVerdict};
use crate::density;
use crate::free::{self, FreenessParams};
use crate::independence;
use crate::poly::UniPoly;
use crate::random::{digit_width, level_precision, sample_branch_value, BinarySeq, Seed, TreeCoefficients};
use crate::ring::{order_in_qa_mod_a, RationalVector, RingPresentation};
use crate::stats;
use crate::zassenhaus::{self, RealizeParams, ScanStatus};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks_passed: bool,
    pub elapsed_ms: u64,
    pub budget_ms: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub suite: String,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Result<(bool, String)>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "gl", budget: Duration::from_secs(5), run: gl },
    Criterion { id: 2, name: "tree", budget: Duration::from_secs(1), run: tree },
    Criterion { id: 3, name: "roots", budget: Duration::from_secs(30), run: roots },
    Criterion { id: 4, name: "independence", budget: Duration::from_secs(60), run: independence_surrogate },
    Criterion { id: 5, name: "containment", budget: Duration::from_secs(30), run: containment },
    Criterion { id: 6, name: "freeness", budget: Duration::from_secs(60), run: freeness },
    Criterion { id: 7, name: "corner", budget: Duration::from_secs(120), run: corner_rigidity },
    Criterion { id: 8, name: "zassenhaus", budget: Duration::from_secs(10), run: zassenhaus_realizer },
    Criterion { id: 9, name: "density", budget: Duration::from_secs(10), run: density_criterion },
    Criterion { id: 10, name: "algebra", budget: Duration::from_secs(5), run: algebra },
];

/// `(id, name)` of every criterion in order.
pub fn criteria() -> Vec<(u8, &'static str)> {
    CRITERIA.iter().map(|c| (c.id, c.name)).collect()
}

fn select(suite: &str) -> Result<Vec<&'static Criterion>> {
    let suite = suite.trim();
    if suite == "all" {
        return Ok(CRITERIA.iter().collect());
    }
    suite
        .split(',')
        .map(|part| {
            let part = part.trim();
            CRITERIA
                .iter()
                .find(|c| c.name == part || part.parse::<u8>().ok() == Some(c.id))
                .ok_or_else(|| Error::InvalidParameter(format!("unknown acceptance criterion `{part}`")))
        })
        .collect()
}

/// Runs `all`, a criterion name or number, or a comma-separated list.
pub fn run_suite(suite: &str) -> Result<AcceptanceReport> {
    let selected = select(suite)?;
    let criteria: Vec<CriterionResult> = selected.into_iter().map(run_one).collect();
    Ok(AcceptanceReport {
        suite: suite.to_string(),
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}

pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    let c = CRITERIA
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    Ok(run_one(c))
}

fn run_one(c: &Criterion) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)();
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id: c.id,
        name: c.name.to_string(),
        passed: ok && elapsed <= c.budget,
        checks_passed: ok,
        elapsed_ms: elapsed.as_millis() as u64,
        budget_ms: c.budget.as_millis() as u64,
        detail,
    }
}

impl CriterionResult {
    /// One line: `PASS 3 roots (120 ms / 30000 ms): detail`.
    pub fn line(&self) -> String {
        format!(
            "{} {} {} ({} ms / {} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.budget_ms,
            self.detail
        )
    }
}

fn gl() -> Result<(bool, String)> {
    let exact = stats::gl_exact_count(2, 2)?;
    let brute = stats::gl_brute_count(2, 2)?;
    let s = stats::gl_invertibility_mc(3, 3, 100_000, &Seed::new(7))?;
    let target_ok = stats::gl_probability(3, 3)? == stats::gl_product_formula(3, 3);
    let ok = exact == BigUint::from(6u32) && brute == 6 && target_ok && s.within_three_sigma() == Some(true);
    Ok((
        ok,
        format!(
            "|GL(2,2)| = {exact} (enumerated {brute}); GL(3,3) frequency {:.5} vs {:.5}, z = {:.2}",
            s.frequency.unwrap_or(f64::NAN),
            s.target_value.unwrap_or(f64::NAN),
            s.z_score.unwrap_or(f64::NAN)
        ),
    ))
}

/// Every assignment of the digits on each branch of the depth-2 binary tree
/// at `p = 2`; digits off the branch do not enter `xi_f` or `b_{f|n}`.
fn tree() -> Result<(bool, String)> {
    let p = 2u64;
    let depth = 2usize;
    let mut congruences = 0u64;
    let mut failures = 0u64;
    let mut law_ok = true;
    for f in BinarySeq::all_of_length(depth) {
        let ranges: Vec<u64> = (0..=depth).map(|j| p.pow(digit_width(j))).collect();
        let total: u64 = ranges.iter().product();
        // histograms of b_{f|n} and joint (b_{f|j}, b_{f|n})
        let mut hist: Vec<BTreeMap<BigUint, u64>> = vec![BTreeMap::new(); depth + 1];
        let mut joint: BTreeMap<(usize, usize, BigUint, BigUint), u64> = BTreeMap::new();
        for idx in 0..total {
            let mut x = idx;
            let mut digits = BTreeMap::new();
            for n in 0..=depth {
                for s in BinarySeq::all_of_length(n) {
                    digits.insert(s, BigUint::zero());
                }
            }
            for (j, r) in ranges.iter().enumerate() {
                digits.insert(f.prefix(j), BigUint::from(x % r));
                x /= r;
            }
            let t = TreeCoefficients::from_digits(p, depth as u32, digits)?;
            let xi = t.xi_of_branch(&f)?;
            let bs: Vec<BigUint> = (0..=depth)
                .map(|n| t.partial_sum_b(&f.prefix(n)).map(|b| b.residue().clone()))
                .collect::<Result<_>>()?;
            for (n, b) in bs.iter().enumerate() {
                congruences += 1;
                if xi.residue() % arith::pow_u64(p, level_precision(n)) != *b {
                    failures += 1;
                }
                *hist[n].entry(b.clone()).or_default() += 1;
                for (j, bj) in bs.iter().enumerate().take(n) {
                    *joint.entry((j, n, bj.clone(), b.clone())).or_default() += 1;
                }
            }
        }
        for (n, h) in hist.iter().enumerate() {
            let size = p.pow(level_precision(n));
            let each = total / size;
            law_ok &= h.len() as u64 == size && h.values().all(|&c| c == each);
        }
        // P(b_{s} = c | b_{s|j} = d) = p^-(2^(n+1) - 2^(j+1)) when c = d mod p^(2^(j+1)-1), else 0
        for n in 1..=depth {
            for j in 0..n {
                let lo = arith::pow_u64(p, level_precision(j));
                let expected = BigRational::new(BigInt::one(), BigInt::from(arith::pow_u64(p, level_precision(n) - level_precision(j))));
                for d in 0..p.pow(level_precision(j)) {
                    let d = BigUint::from(d);
                    let given = hist[j][&d];
                    for c in 0..p.pow(level_precision(n)) {
                        let c = BigUint::from(c);
                        let count = joint.get(&(j, n, d.clone(), c.clone())).copied().unwrap_or(0);
                        let prob = BigRational::new(count.into(), given.into());
                        let want = if &c % &lo == d { expected.clone() } else { BigRational::zero() };
                        law_ok &= prob == want;
                    }
                }
            }
        }
    }
    Ok((
        failures == 0 && law_ok,
        format!("{congruences} congruences checked, {failures} failed; uniform and conditional laws exact: {law_ok}"),
    ))
}

fn roots() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut held = 0;
    let mut cross_checked = 0;
    let mut mismatches = 0;
    let cases = 50;
    for i in 0..cases {
        let p = [2u64, 3, 5][i % 3];
        let m = rng.gen_range(0..=3u32);
        let n = rng.gen_range(m + 1..=12u32);
        let l = rng.gen_range(0..=3usize);
        // no root mod p, so h = p^M (q + p r) has no root mod p^(M+1)
        let q = match p {
            2 => UniPoly::from_i64s(&[1, 1, 1]),
            3 => UniPoly::from_i64s(&[1, 0, 1]),
            _ => UniPoly::from_i64s(&[2, 0, 1]),
        };
        let r = UniPoly::from_i64s(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
        let h = q
            .add(&r.scale(&BigInt::from(p)))
            .scale(&BigInt::from(arith::pow_u64(p, m)));
        let lambdas: Vec<BigInt> = (0..l).map(|_| BigInt::from(rng.gen_range(-20..=20))).collect();
        let g = lambdas.iter().fold(h.clone(), |acc, lam| acc.mul(&UniPoly::linear(lam)));
        let rb = independence::root_bound_check(&g, &lambdas, &h, m, p, n)?;
        held += rb.holds as u32;
        if p.checked_pow(n).is_some_and(|q| q <= 100_000) {
            cross_checked += 1;
            if BigUint::from(independence::count_roots_brute(&g, p, n)) != rb.count {
                mismatches += 1;
            }
        }
    }
    Ok((
        held == cases as u32 && mismatches == 0,
        format!("bound held in {held}/{cases}; {cross_checked} counts cross-checked, {mismatches} mismatches"),
    ))
}

fn independence_surrogate() -> Result<(bool, String)> {
    let (p, depth, count, d, h) = (7u64, 4usize, 4u64, 2u32, 10u64);
    let found: Vec<u64> = (0..100u64)
        .into_par_iter()
        .map(|s| -> Result<Option<u64>> {
            let seed = Seed::new(s).child("independence");
            let xs = (0..count)
                .map(|i| sample_branch_value(p, &BinarySeq::from_index(i, depth), &seed))
                .collect::<Result<Vec<_>>>()?;
            Ok(independence::find_relation(&xs, d, h)?.found.then_some(s))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok((
        found.is_empty(),
        format!(
            "p={p}, precision {}, degree <= {d}, height <= {h}: relations found for {} of 100 seeds {:?}",
            level_precision(depth),
            found.len(),
            found
        ),
    ))
}

fn containment() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [3u32, 4, 5] {
        let rep = free::containment_probability_trial(2, 1, n, 1.5, 10_000, &Seed::new(5).child(n), None)?;
        ok &= rep.passes;
        parts.push(format!(
            "n={n}: {:.4} <= {:.4} + 3*{:.4}",
            rep.frequency.unwrap_or(f64::NAN),
            rep.bound,
            rep.sigma
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn freeness() -> Result<(bool, String)> {
    let params = FreenessParams::default();
    let rep = free::freeness_pipeline(&params, 1000, &Seed::new(6))?;
    let ok = rep.independent * 100 >= 99 * rep.trials && rep.basis_ok == rep.independent;
    Ok((
        ok,
        format!(
            "independent {}/{}; rank-{} bases on {}/{} independent instances",
            rep.independent, rep.trials, rep.expected_rank, rep.basis_ok, rep.independent
        ),
    ))
}

fn corner_params() -> CornerParams {
    CornerParams {
        ring: RingPresentation::gaussian_integers(),
        precision: 16,
        cap: 8,
        ..CornerParams::default()
    }
}

fn corner_rigidity() -> Result<(bool, String)> {
    let params = corner_params();
    let subsets = corner::label_subsets(&params.labels);
    let not_contained: Vec<(BTreeSet<u32>, BTreeSet<u32>)> = subsets
        .iter()
        .flat_map(|a| subsets.iter().map(move |d| (a.clone(), d.clone())))
        .filter(|(a, d)| !a.is_subset(d))
        .collect();
    let contained: Vec<(BTreeSet<u32>, BTreeSet<u32>)> = subsets
        .iter()
        .flat_map(|a| subsets.iter().map(move |d| (a.clone(), d.clone())))
        .filter(|(a, d)| !a.is_empty() && a.is_subset(d))
        .collect();

    let probe_model = CornerModel::build(params.clone(), 7000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let non_empty: Vec<&BTreeSet<u32>> = subsets.iter().filter(|s| !s.is_empty()).collect();
    let mut probes = 0;
    for i in 0..20 {
        let r: Vec<BigInt> = (0..params.ring.rank()).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
        probes += corner::mult_by_r_probe(&probe_model, &r, non_empty[i % non_empty.len()])? as u32;
    }

    let outcomes: Vec<(bool, bool)> = (0..500u64)
        .into_par_iter()
        .map(|s| -> Result<(bool, bool)> {
            let model = CornerModel::build(params.clone(), 7100 + s)?;
            let (a, d) = &not_contained[s as usize % not_contained.len()];
            let id = corner::rigidity_trial_with(&model, a, d, &AdditiveMap::identity(model.width()))?;
            let (a, d) = &contained[s as usize % contained.len()];
            let rnd = corner::rigidity_trial(&model, a, d, &Seed::new(s).child("rigidity"))?;
            Ok((
                id.verdict == RigidityVerdict::Violation,
                rnd.verdict == RigidityVerdict::Violation,
            ))
        })
        .collect::<Result<_>>()?;
    let id_viol = outcomes.iter().filter(|o| o.0).count();
    let rnd_viol = outcomes.iter().filter(|o| o.1).count();
    Ok((
        probes == 20 && id_viol * 100 >= 99 * 500 && rnd_viol * 100 >= 99 * 500,
        format!(
            "Z[i], N={}, K={}: probes {probes}/20; identity across A not in D violated {id_viol}/500; random maps violated {rnd_viol}/500",
            params.precision, params.cap
        ),
    ))
}

fn zassenhaus_realizer() -> Result<(bool, String)> {
    let z = RingPresentation::integers();
    let one = vec![BigInt::one()];
    let datum = zassenhaus::complete_datum(&z, 3, &one, 4)?;
    let exact = zassenhaus::verify_pair(&z, &one, &one, &datum)? && datum.r == 1 && datum.d == BigInt::one();
    let (hits, _, _) = zassenhaus::deterministic_scan(&z, &one, &one, 100, 5)?;
    let scan_has_3 = hits.iter().any(|h| h.p == 3 && h.c == 4);
    let params = RealizeParams {
        budget: 100,
        deterministic_only: true,
        ..RealizeParams::default()
    };
    let rz = zassenhaus::realize(&z, &[(one.clone(), one.clone())], &params, &Seed::new(8))?;
    let z_ok = matches!(rz.pairs[0].deterministic, ScanStatus::Verified { .. });

    let zi = RingPresentation::gaussian_integers();
    let pair = (vec![BigInt::zero(), BigInt::one()], zi.one());
    let params = RealizeParams {
        budget: 10_000,
        ..RealizeParams::default()
    };
    let rzi = zassenhaus::realize(&zi, &[pair], &params, &Seed::new(8))?;
    let zi_status = rzi.pairs[0].deterministic.clone();
    let zi_ok = matches!(zi_status, ScanStatus::Verified { .. }) && rzi.pairs[0].agreement;
    Ok((
        exact && scan_has_3 && z_ok && zi_ok,
        format!(
            "Z (1,1): p=3 c=4 verified {exact}, in scan {scan_has_3}, first verifying prime {:?}; Z[i] (i,1): {:?}",
            hits.first().map(|h| (h.p, h.c)),
            zi_status
        ),
    ))
}

fn density_criterion() -> Result<(bool, String)> {
    let f: UniPoly = "x^2+1".parse()?;
    let r = density::density_report(&f, 100_000)?;
    let at = |b: u64| r.checkpoints.iter().find(|c| c.bound == b).map(|c| c.primes_with_root);
    let increasing = match (at(1000), at(10_000), at(100_000)) {
        (Some(a), Some(b), Some(c)) => a < b && b < c && a > 0,
        _ => false,
    };
    let lin = density::density_report(&"x".parse()?, 100_000)?;
    let pi = density::primes_up_to(10_000).len();
    let ok = (0.45..=0.55).contains(&r.density)
        && increasing
        && lin.primes_with_root == lin.primes_scanned
        && pi == 1229;
    Ok((
        ok,
        format!(
            "x^2+1: density {:.4}, sums {}; x: density {}; pi(10^4) = {pi}",
            r.density,
            r.checkpoints
                .iter()
                .filter(|c| c.bound >= 1000)
                .map(|c| c.reciprocal_sum_decimal.clone())
                .collect::<Vec<_>>()
                .join(" < "),
            lin.density
        ),
    ))
}

fn algebra() -> Result<(bool, String)> {
    let mut valid = 0;
    for name in ["integers", "gaussian_integers", "z_cross_z", "upper_triangular_2x2"] {
        valid += RingPresentation::bundled(name)?.validate().is_ok() as u32;
    }
    let broken_rejected = RingPresentation::bundled("broken_no_identity")
        .map(|r| r.validate().is_err())
        .unwrap_or(true);

    let zi = RingPresentation::gaussian_integers();
    let one = RationalVector::from_ints(&zi.one());
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut round_trips = 0;
    let mut order_matches = 0;
    let mut tested = 0;
    while tested < 100 {
        let x: Vec<BigInt> = (0..2).map(|_| BigInt::from(rng.gen_range(-10..=10))).collect();
        if x.iter().all(|c| c.is_zero()) {
            continue;
        }
        tested += 1;
        let inv = zi.invert_in_qa(&x)?;
        let xr = RationalVector::from_ints(&x);
        round_trips += (zi.mul_rational(&inv, &xr) == one && zi.mul_rational(&xr, &inv) == one) as u32;
        let order = order_in_qa_mod_a(&inv);
        let brute = (1u64..)
            .find(|&m| inv.scale(&BigRational::from_integer(m.into())).is_integral())
            .expect("some multiple is integral");
        order_matches += (order.to_u64() == Some(brute)) as u32;
    }
    Ok((
        valid == 4 && broken_rejected && round_trips == 100 && order_matches == 100,
        format!(
            "{valid}/4 bundled rings valid, broken rejected {broken_rejected}; {round_trips}/100 inverses round-trip; {order_matches}/100 orders match"
        ),
    ))
}
