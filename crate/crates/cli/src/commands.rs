use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use padic_rigid::acceptance::run_suite;
use padic_rigid::corner::{rigidity_trial, rigidity_trial_with, AdditiveMap, CornerModel, CornerParams};
use padic_rigid::density::density_report;
use padic_rigid::free::{freeness_pipeline, FreenessParams};
use padic_rigid::independence::find_relation;
use padic_rigid::poly::UniPoly;
use padic_rigid::random::{
    depth_for, sample_branch_value, sample_supported_elements, sample_tree, sample_uniform, BinarySeq,
    NearlyUniform, Seed,
};
use padic_rigid::ring::RingPresentation;
use padic_rigid::stats::{gl_invertibility_mc, run_trials, Experiment};
use padic_rigid::zassenhaus::{auto_pairs, realize, RealizeParams};
use padic_rigid::{PadicRing, PadicVector};

use crate::output::{emit, envelope, render};
use crate::{Cli, Command, CornerCmd, Failure, McCmd, ModelArgs, SampleCmd, ZassenhausCmd};

type Res<T> = Result<T, Failure>;

/// What a command produced: report, CSV row selector, effective precision
/// and whether the run counts as a success.
struct Outcome {
    name: &'static str,
    report: Value,
    rows: Option<&'static str>,
    precision: Option<u32>,
    ok: bool,
}

fn to_value<T: Serialize>(x: &T) -> Res<Value> {
    serde_json::to_value(x).map_err(|e| Failure::Domain(e.to_string()))
}

fn outcome(name: &'static str, report: Value, precision: Option<u32>) -> Outcome {
    Outcome {
        name,
        report,
        rows: None,
        precision,
        ok: true,
    }
}

/// Returns `Ok(false)` when the command ran but reported failure.
pub fn run(cli: &Cli) -> Res<bool> {
    let seed = Seed::new(cli.seed);
    let o = match &cli.command {
        Command::Sample(c) => sample(c, cli.precision, &seed)?,
        Command::Independence(a) => {
            let n = cli.precision.unwrap_or(20);
            let ring = PadicRing::new(a.p, n)?;
            let values = match (&a.values, a.branches) {
                (Some(v), _) => parse_ints(v)?.iter().map(|x| ring.from_int(x)).collect(),
                (None, Some(k)) => {
                    let depth = depth_for(n, k as u64);
                    (0..k)
                        .map(|i| {
                            sample_branch_value(a.p, &BinarySeq::from_index(i as u64, depth as usize), &seed)?
                                .reduce_precision(n)
                        })
                        .collect::<padic_rigid::Result<Vec<_>>>()?
                }
                (None, None) => return Err(Failure::Usage("give --values or --branches".into())),
            };
            let rel = find_relation(&values, a.degree, a.height)?;
            outcome("independence", json!({ "values": to_value(&values)?, "relation": to_value(&rel)? }), Some(n))
        }
        Command::Corner(c) => corner(c, cli.precision, cli.seed)?,
        Command::FreeCheck(a) => {
            let n = cli.precision.unwrap_or(32);
            let params = FreenessParams {
                p: a.p,
                precision: n,
                window: a.rank_window,
                alpha: a.alpha,
                num_random: a.num_random,
                cap: a.cap.unwrap_or(n.div_ceil(2)),
            };
            params.validate()?;
            let r = freeness_pipeline(&params, a.trials, &seed)?;
            outcome("free-check", to_value(&r)?, Some(n))
        }
        Command::Zassenhaus(ZassenhausCmd::Realize {
            ring,
            pairs,
            budget,
            box_bound,
            deterministic_only,
        }) => {
            let ring = load_ring(ring)?;
            let pairs = if pairs == "auto" {
                auto_pairs(&ring)
            } else {
                load_pairs(Path::new(pairs))?
            };
            let params = RealizeParams {
                budget: *budget,
                box_bound: *box_bound,
                deterministic_only: *deterministic_only,
            };
            let r = realize(&ring, &pairs, &params, &seed)?;
            let mut o = outcome("zassenhaus realize", to_value(&r)?, None);
            o.rows = Some("pairs");
            o
        }
        Command::Density(a) => {
            let f: UniPoly = a.poly.parse().map_err(|e: padic_rigid::Error| Failure::Usage(e.to_string()))?;
            let r = density_report(&f, a.bound)?;
            let mut o = outcome("density", to_value(&r)?, None);
            o.rows = Some("checkpoints");
            o
        }
        Command::Mc(McCmd::Gl { n, q, trials }) => {
            let r = gl_invertibility_mc(*n, *q, *trials, &seed)?;
            outcome("mc gl", to_value(&r)?, None)
        }
        Command::Mc(McCmd::Run { experiment, trials }) => {
            let e: Experiment = experiment.parse()?;
            let r = run_trials(&e, *trials, &seed)?;
            outcome("mc run", json!({ "experiment": to_value(&e)?, "summary": to_value(&r)? }), None)
        }
        Command::Acceptance(a) => {
            let r = run_suite(&a.suite)?;
            for c in &r.criteria {
                eprintln!("{}", c.line());
            }
            let mut o = outcome("acceptance", to_value(&r)?, None);
            o.rows = Some("criteria");
            o.ok = r.passed;
            o
        }
    };
    let doc = envelope(o.name, cli.seed, o.precision, o.report);
    let bytes = render(&doc, o.rows, cli.format)?;
    emit(&bytes, cli.out.as_deref())?;
    Ok(o.ok)
}

fn sample(c: &SampleCmd, precision: Option<u32>, seed: &Seed) -> Res<Outcome> {
    Ok(match c {
        SampleCmd::Uniform { p } => {
            let n = precision.unwrap_or(20);
            let x = sample_uniform(*p, n, seed)?;
            outcome("sample uniform", json!({ "value": to_value(&x)?, "digits": x.digits() }), Some(n))
        }
        SampleCmd::Tree { p, depth } => {
            let t = sample_tree(*p, *depth, seed)?;
            let branches = BinarySeq::all_of_length(*depth as usize)
                .map(|f| {
                    let v = t.xi_of_branch(&f)?;
                    Ok(json!({ "branch": f.to_string(), "value": to_value(&v)? }))
                })
                .collect::<Res<Vec<_>>>()?;
            let mut o = outcome(
                "sample tree",
                json!({ "tree": to_value(&t)?, "branches": branches }),
                None,
            );
            o.rows = Some("branches");
            o
        }
        SampleCmd::Branch { p, branch } => {
            let f: BinarySeq = branch.parse()?;
            let mut v = sample_branch_value(*p, &f, seed)?;
            if let Some(n) = precision {
                v = v.reduce_precision(n)?;
            }
            outcome(
                "sample branch",
                json!({ "branch": f.to_string(), "value": to_value(&v)? }),
                Some(v.precision()),
            )
        }
        SampleCmd::NearlyUniform { p, alpha } => {
            let n = precision.unwrap_or(16);
            let law = NearlyUniform::new(*p, *alpha)?;
            let v = law.sample(n, seed)?;
            outcome(
                "sample nearly-uniform",
                json!({ "law": to_value(&law)?, "window": law.window_len(n), "vector": to_value(&v)? }),
                Some(n),
            )
        }
        SampleCmd::Supported { p, index, labels, window } => {
            let n = precision.unwrap_or(16);
            let labels: Vec<u32> = parse_labels(labels)?.into_iter().collect();
            let els = sample_supported_elements(*p, n, *index, &labels, *window, seed)?;
            outcome("sample supported", json!({ "elements": to_value(&els)? }), Some(n))
        }
    })
}

fn corner(c: &CornerCmd, precision: Option<u32>, seed: u64) -> Res<Outcome> {
    Ok(match c {
        CornerCmd::Build(m) => {
            let model = load_model(m, precision, seed)?;
            outcome("corner build", to_value(&model)?, Some(model.params.precision))
        }
        CornerCmd::Member {
            model,
            set,
            vector,
            generator,
        } => {
            let model = load_model(model, precision, seed)?;
            let a = parse_labels(set)?;
            let x = match (vector, generator) {
                (Some(v), _) => parse_sparse(v, model.padic_ring())?,
                (None, Some(g)) => model
                    .generators()
                    .get(*g)
                    .ok_or_else(|| Failure::Usage(format!("model has {} generators", model.generators().len())))?
                    .vector
                    .clone(),
                (None, None) => return Err(Failure::Usage("give --vector or --generator".into())),
            };
            let r = model.membership(&x, &a)?;
            outcome(
                "corner member",
                json!({ "set": a, "vector": to_value(&x)?, "membership": to_value(&r)? }),
                Some(model.params.precision),
            )
        }
        CornerCmd::Rigidity { model, from, to, map } => {
            let model = load_model(model, precision, seed)?;
            let a = parse_labels(from)?;
            let d = parse_labels(to)?;
            let r = match map.as_str() {
                "random" => rigidity_trial(&model, &a, &d, &Seed::new(seed))?,
                "identity" => rigidity_trial_with(&model, &a, &d, &AdditiveMap::identity(model.width()))?,
                m => {
                    let coeffs = m
                        .strip_prefix("mult:")
                        .ok_or_else(|| Failure::Usage(format!("unknown map `{m}`")))?;
                    let r = parse_ints(coeffs)?;
                    if r.len() != model.params.ring.rank() {
                        return Err(Failure::Usage(format!(
                            "ring element needs {} coordinates",
                            model.params.ring.rank()
                        )));
                    }
                    let phi = AdditiveMap::multiplication(&model.params.ring, model.params.module_rank, &r);
                    rigidity_trial_with(&model, &a, &d, &phi)?
                }
            };
            outcome(
                "corner rigidity",
                json!({ "from": a, "to": d, "outcome": to_value(&r)? }),
                Some(model.params.precision),
            )
        }
    })
}

fn load_ring(spec: &str) -> Res<RingPresentation> {
    RingPresentation::load(spec).map_err(|e| Failure::Usage(e.to_string()))
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_model(m: &ModelArgs, precision: Option<u32>, seed: u64) -> Res<CornerModel> {
    if let Some(path) = &m.model {
        let bad = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", path.display()));
        let mut v: Value = serde_json::from_str(&read(path)?).map_err(bad)?;
        // output of `corner build` is wrapped in the report envelope
        if v.get("command").is_some() {
            v = v["report"].take();
        }
        return serde_json::from_value(v).map_err(bad);
    }
    let params = CornerParams {
        ring: load_ring(&m.ring)?,
        p: m.p,
        precision: precision.unwrap_or(16),
        cap: m.cap,
        height: m.height,
        module_rank: m.module_rank,
        labels: parse_labels(&m.labels)?.into_iter().collect(),
        generators_per_label: m.generators_per_label,
    };
    Ok(CornerModel::build(params, seed)?)
}

/// Accepts `[{"a": [..], "e": [..]}]` or `[[a, e]]`, coordinates as
/// integers or decimal strings.
fn load_pairs(path: &Path) -> Res<Vec<(Vec<BigInt>, Vec<BigInt>)>> {
    let bad = |m: &str| Failure::Usage(format!("{}: {m}", path.display()));
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| bad(&e.to_string()))?;
    let coords = |x: &Value| -> Res<Vec<BigInt>> {
        x.as_array()
            .ok_or_else(|| bad("expected an array of coordinates"))?
            .iter()
            .map(|c| match c {
                Value::Number(n) => n.to_string().parse().map_err(|_| bad("non-integer coordinate")),
                Value::String(s) => s.trim().parse().map_err(|_| bad("non-integer coordinate")),
                _ => Err(bad("coordinate must be an integer or string")),
            })
            .collect()
    };
    v.as_array()
        .ok_or_else(|| bad("expected an array of pairs"))?
        .iter()
        .map(|p| match p {
            Value::Object(o) => Ok((
                coords(o.get("a").ok_or_else(|| bad("pair without `a`"))?)?,
                coords(o.get("e").ok_or_else(|| bad("pair without `e`"))?)?,
            )),
            Value::Array(xs) if xs.len() == 2 => Ok((coords(&xs[0])?, coords(&xs[1])?)),
            _ => Err(bad("pair must be {\"a\", \"e\"} or [a, e]")),
        })
        .collect()
}

fn parse_ints(s: &str) -> Res<Vec<BigInt>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("`{x}` is not an integer")))
        })
        .collect()
}

fn parse_labels(s: &str) -> Res<BTreeSet<u32>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("`{x}` is not a label")))
        })
        .collect()
}

fn parse_sparse(s: &str, ring: &std::sync::Arc<PadicRing>) -> Res<PadicVector> {
    let entries = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|item| {
            let (i, v) = item
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("`{item}` is not index:value")))?;
            let i: usize = i.trim().parse().map_err(|_| Failure::Usage(format!("bad index `{i}`")))?;
            let v: BigInt = v.trim().parse().map_err(|_| Failure::Usage(format!("bad value `{v}`")))?;
            Ok((i, v))
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(PadicVector::from_ints(ring, entries.iter().map(|(i, v)| (*i, v))))
}
