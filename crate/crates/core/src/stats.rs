//! Seeded Monte Carlo trials and the invertibility probability of random
//! matrices over a finite field.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::free::{self, FreenessParams};
use crate::independence;
use crate::random::{sample_branch_value, BinarySeq, NearlyUniform, Seed};
use crate::zmod;
use crate::{Error, Result};

/// `|GL(n, q)| = prod_{k=1..n} (q^n - q^(k-1))`.
pub fn gl_exact_count(n: u32, q: u64) -> Result<BigUint> {
    if arith::prime_power(q).is_none() {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let qb = BigUint::from(q);
    let qn = qb.pow(n);
    Ok((1..=n).map(|k| &qn - qb.pow(k - 1)).product())
}

/// Invertible `n x n` matrices over `F_q` (prime `q`) by enumeration.
pub fn gl_brute_count(n: u32, q: u64) -> Result<u64> {
    if !arith::is_prime(q) {
        return Err(Error::Unsupported(format!("field arithmetic needs a prime, got {q}")));
    }
    let cells = (n * n) as u32;
    let total = q
        .checked_pow(cells)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::ResourceLimit(format!("{q}^{cells} matrices")))?;
    let count = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let mut x = idx;
            let rows: Vec<Vec<u64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let d = x % q;
                            x /= q;
                            d
                        })
                        .collect()
                })
                .collect();
            zmod::rank_mod_prime(&rows, q) == n as usize
        })
        .count();
    Ok(count as u64)
}

/// `|GL(n, q)| / q^(n^2)` in lowest terms.
pub fn gl_probability(n: u32, q: u64) -> Result<BigRational> {
    let count = gl_exact_count(n, q)?;
    let total = BigUint::from(q).pow(n * n);
    Ok(BigRational::new(count.into(), total.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub experiment: String,
    pub trials: u64,
    pub successes: u64,
    /// `null` for zero trials.
    pub frequency: Option<f64>,
    /// Exact success probability as `"a/b"`, when known.
    pub target: Option<String>,
    pub target_value: Option<f64>,
    pub z_score: Option<f64>,
}

impl TrialSummary {
    pub fn new(experiment: String, trials: u64, successes: u64, target: Option<&BigRational>) -> Self {
        let frequency = (trials > 0).then(|| successes as f64 / trials as f64);
        let target_value = target.and_then(|t| t.to_f64());
        let z_score = match (frequency, target_value) {
            (Some(f), Some(t)) if t > 0.0 && t < 1.0 => Some((f - t) / (t * (1.0 - t) / trials as f64).sqrt()),
            _ => None,
        };
        Self {
            experiment,
            trials,
            successes,
            frequency,
            target: target.map(|t| format!("{}/{}", t.numer(), t.denom())),
            target_value,
            z_score,
        }
    }

    /// Combines summaries of disjoint trial sets by adding counts.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.experiment != other.experiment || self.target != other.target {
            return Err(Error::IncompatibleOperands(format!(
                "summaries of `{}` and `{}`",
                self.experiment, other.experiment
            )));
        }
        let target = self.target.as_deref().map(parse_ratio).transpose()?;
        Ok(Self::new(
            self.experiment.clone(),
            self.trials + other.trials,
            self.successes + other.successes,
            target.as_ref(),
        ))
    }

    /// `|frequency - target| <= 3 sigma`.
    pub fn within_three_sigma(&self) -> Option<bool> {
        self.z_score.map(|z| z.abs() <= 3.0)
    }
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    let (a, b) = s.split_once('/').ok_or_else(|| Error::Parse(format!("bad ratio `{s}`")))?;
    let a: BigInt = a.parse().map_err(|_| Error::Parse(format!("bad ratio `{s}`")))?;
    let b: BigInt = b.parse().map_err(|_| Error::Parse(format!("bad ratio `{s}`")))?;
    if b.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(a, b))
}

/// Uniform `n x n` matrix over `F_q` is invertible.
pub fn gl_invertibility_mc(n: u32, q: u64, trials: u64, seed: &Seed) -> Result<TrialSummary> {
    run_trials(&Experiment::Gl { n, q }, trials, seed)
}

/// Registered experiments. Descriptor syntax: `name` or
/// `name:key=value,key=value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Experiment {
    /// Random matrix over `F_q` is invertible.
    Gl { n: u32, q: u64 },
    /// Nearly uniform sample lies in `<b_1..b_k> + p^n B`, with the `b_i`
    /// drawn once from the run seed.
    Containment { p: u64, k: usize, n: u32, alpha: f64 },
    /// `count` tree branch values admit no relation of degree `<= d` and
    /// height `<= h`.
    Independence { p: u64, depth: u32, count: usize, d: u32, h: u64 },
    /// Freeness pipeline instance is independent with a full-rank
    /// purification basis.
    Freeness {
        p: u64,
        precision: u32,
        window: usize,
        alpha: f64,
        num_random: usize,
    },
}

impl Experiment {
    pub fn names() -> &'static [&'static str] {
        &["gl", "containment", "independence", "freeness"]
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Experiment::Gl { n, q } => {
                if n == 0 || n > 16 {
                    return Err(Error::InvalidParameter(format!("matrix size {n} outside 1..=16")));
                }
                if !arith::is_prime(q) {
                    return Err(Error::Unsupported(format!("field arithmetic needs a prime, got {q}")));
                }
                if q > u32::MAX as u64 {
                    return Err(Error::InvalidParameter(format!("q = {q} too large")));
                }
            }
            Experiment::Containment { p, n, alpha, .. } => {
                NearlyUniform::new(p, alpha)?;
                if n == 0 {
                    return Err(Error::InvalidParameter("n must be positive".into()));
                }
            }
            Experiment::Independence { p, depth, count, .. } => {
                if !arith::is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                if depth > 16 || count == 0 || count as u64 > 1u64 << depth {
                    return Err(Error::InvalidParameter(format!("{count} branches at depth {depth}")));
                }
            }
            Experiment::Freeness { .. } => self.freeness_params().expect("freeness").validate()?,
        }
        Ok(())
    }

    fn freeness_params(&self) -> Option<FreenessParams> {
        match *self {
            Experiment::Freeness {
                p,
                precision,
                window,
                alpha,
                num_random,
            } => Some(FreenessParams {
                p,
                precision,
                window,
                alpha,
                num_random,
                cap: precision.div_ceil(2),
            }),
            _ => None,
        }
    }

    /// Exact success probability, when it has a closed form.
    pub fn target(&self) -> Option<BigRational> {
        match *self {
            Experiment::Gl { n, q } => gl_probability(n, q).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Experiment::Gl { n, q } => write!(f, "gl:n={n},q={q}"),
            Experiment::Containment { p, k, n, alpha } => write!(f, "containment:p={p},k={k},n={n},alpha={alpha}"),
            Experiment::Independence { p, depth, count, d, h } => {
                write!(f, "independence:p={p},depth={depth},count={count},d={d},h={h}")
            }
            Experiment::Freeness {
                p,
                precision,
                window,
                alpha,
                num_random,
            } => write!(
                f,
                "freeness:p={p},precision={precision},window={window},alpha={alpha},num_random={num_random}"
            ),
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str, default: &str| -> String { kv.remove(key).unwrap_or_else(|| default.to_string()) };
        fn num<T: FromStr>(key: &str, v: String) -> Result<T> {
            v.parse().map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}`")))
        }
        let exp = match name.trim() {
            "gl" => Experiment::Gl {
                n: num("n", take("n", "3"))?,
                q: num("q", take("q", "3"))?,
            },
            "containment" => Experiment::Containment {
                p: num("p", take("p", "2"))?,
                k: num("k", take("k", "1"))?,
                n: num("n", take("n", "3"))?,
                alpha: num("alpha", take("alpha", "1.5"))?,
            },
            "independence" => Experiment::Independence {
                p: num("p", take("p", "7"))?,
                depth: num("depth", take("depth", "4"))?,
                count: num("count", take("count", "4"))?,
                d: num("d", take("d", "2"))?,
                h: num("h", take("h", "10"))?,
            },
            "freeness" => Experiment::Freeness {
                p: num("p", take("p", "2"))?,
                precision: num("precision", take("precision", "32"))?,
                window: num("window", take("window", "8"))?,
                alpha: num("alpha", take("alpha", "1.5"))?,
                num_random: num("num_random", take("num_random", "3"))?,
            },
            other => return Err(Error::UnknownExperiment(other.to_string())),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Parse(format!("unknown parameter `{k}` for `{name}`")));
        }
        Ok(exp)
    }
}

fn random_matrix_invertible(n: u32, q: u64, seed: &Seed) -> bool {
    let mut rng = seed.rng();
    let rows: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect();
    zmod::rank_mod_prime(&rows, q) == n as usize
}

/// Runs `trials` independent trials; trial `t` uses the seed path
/// `trial[t]`, so the result does not depend on scheduling.
pub fn run_trials(experiment: &Experiment, trials: u64, seed: &Seed) -> Result<TrialSummary> {
    experiment.validate()?;
    let trial_seed = |t: u64| seed.child(format!("trial[{t}]"));
    let successes: u64 = match experiment {
        Experiment::Gl { n, q } => (0..trials)
            .into_par_iter()
            .filter(|&t| random_matrix_invertible(*n, *q, &trial_seed(t)))
            .count() as u64,
        Experiment::Containment { p, k, n, alpha } => {
            free::containment_probability_trial(*p, *k, *n, *alpha, trials, seed, None)?.hits
        }
        Experiment::Independence { p, depth, count, d, h } => (0..trials)
            .into_par_iter()
            .map(|t| -> Result<u64> {
                let s = trial_seed(t);
                let xs = (0..*count)
                    .map(|i| sample_branch_value(*p, &BinarySeq::from_index(i as u64, *depth as usize), &s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(!independence::find_relation(&xs, *d, *h)?.found as u64)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?,
        Experiment::Freeness { .. } => {
            let params = experiment.freeness_params().expect("freeness");
            free::freeness_pipeline(&params, trials, seed)?.basis_ok
        }
    };
    Ok(TrialSummary::new(
        experiment.to_string(),
        trials,
        successes,
        experiment.target().as_ref(),
    ))
}

/// Exact invertibility probability `prod (1 - q^(k-1) / q^n)`.
pub fn gl_product_formula(n: u32, q: u64) -> BigRational {
    let qn = BigInt::from(q).pow(n);
    (1..=n).fold(BigRational::one(), |acc, k| {
        acc * (BigRational::one() - BigRational::new(BigInt::from(q).pow(k - 1), qn.clone()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_counts() {
        assert_eq!(gl_exact_count(1, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(gl_exact_count(2, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(gl_exact_count(2, 3).unwrap(), BigUint::from(48u32));
        assert_eq!(gl_exact_count(2, 4).unwrap(), BigUint::from(180u32));
        assert!(gl_exact_count(2, 6).is_err());
    }

    #[test]
    fn brute_force_agrees() {
        for (n, q) in [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)] {
            assert_eq!(
                BigUint::from(gl_brute_count(n, q).unwrap()),
                gl_exact_count(n, q).unwrap(),
                "n={n} q={q}"
            );
        }
        assert!(matches!(gl_brute_count(2, 4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn targets() {
        assert_eq!(gl_probability(1, 2).unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(gl_probability(2, 2).unwrap(), BigRational::new(3.into(), 8.into()));
        for (n, q) in [(1, 2), (2, 3), (3, 5), (4, 7)] {
            assert_eq!(gl_probability(n, q).unwrap(), gl_product_formula(n, q));
        }
    }

    #[test]
    fn non_prime_field_unsupported() {
        assert!(matches!(
            gl_invertibility_mc(2, 4, 10, &Seed::new(1)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mc_within_three_sigma() {
        let s = gl_invertibility_mc(3, 3, 20_000, &Seed::new(7)).unwrap();
        assert_eq!(s.trials, 20_000);
        assert!(s.within_three_sigma().unwrap(), "{s:?}");
    }

    #[test]
    fn zero_trials_and_determinism() {
        let e: Experiment = "gl:n=2,q=2".parse().unwrap();
        let s = run_trials(&e, 0, &Seed::new(1)).unwrap();
        assert_eq!(s.frequency, None);
        assert_eq!(s.z_score, None);
        let json = serde_json::to_value(&s).unwrap();
        assert!(json["frequency"].is_null());
        let a = run_trials(&e, 500, &Seed::new(2)).unwrap();
        let b = run_trials(&e, 500, &Seed::new(2)).unwrap();
        assert_eq!(a, b);
        let c = run_trials(&e, 300, &Seed::new(3)).unwrap();
        let m = a.merge(&c).unwrap();
        assert_eq!((m.trials, m.successes), (800, a.successes + c.successes));
        assert_eq!(m.target.as_deref(), Some("3/8"));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let e = Experiment::Gl { n: 3, q: 2 };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| run_trials(&e, 2000, &Seed::new(4)).unwrap());
        assert_eq!(single, run_trials(&e, 2000, &Seed::new(4)).unwrap());
    }

    #[test]
    fn descriptors() {
        assert!(matches!("nope".parse::<Experiment>(), Err(Error::UnknownExperiment(_))));
        assert!(matches!("gl:n=2,z=1".parse::<Experiment>(), Err(Error::Parse(_))));
        for name in Experiment::names() {
            let e: Experiment = name.parse().unwrap();
            assert_eq!(e.to_string().parse::<Experiment>().unwrap(), e);
        }
    }

    #[test]
    fn other_experiments_run() {
        let s = run_trials(&"containment:n=3".parse().unwrap(), 200, &Seed::new(1)).unwrap();
        assert_eq!(s.trials, 200);
        let s = run_trials(&"freeness".parse().unwrap(), 5, &Seed::new(1)).unwrap();
        assert_eq!(s.successes, 5);
        let s = run_trials(&"independence:count=2,d=1,h=3".parse().unwrap(), 3, &Seed::new(1)).unwrap();
        assert_eq!(s.successes, 3);
    }
}
