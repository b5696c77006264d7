use std::path::Path;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use hyperlat::counting::{self, CountCache, Counter};
use hyperlat::experiments::{
    hypersum_with, lcm_moment_gate, logcoord_ks_gate, reports_to_csv, ArithmeticFunction, Mode,
    Strategy,
};
use hyperlat::limits::{
    gcd_limit_pmf, lcm_ratio_moment, order_statistic_cdf, spacing_marginal_cdf, u_cdf, volume,
    LimitModel,
};
use hyperlat::sampling::{metadata_path, write_dump, SampleMetadata};
use hyperlat::verify::{self, VerifyOptions};
use hyperlat::{Error, ProductCap, Rational, RegionSpec, Sampler, SamplerConfig, ScaleVector};
use serde_json::{json, Value};

use crate::args::{Command, Global, ModelArgs, RegionArgs};
use crate::output::Output;

/// What a command produced, and whether its gates held.
pub struct Outcome {
    pub output: Output,
    pub gates_passed: bool,
}

impl From<Output> for Outcome {
    fn from(output: Output) -> Self {
        Self {
            output,
            gates_passed: true,
        }
    }
}

pub type CmdResult = Result<Outcome, Error>;

fn region(a: &RegionArgs) -> Result<RegionSpec, Error> {
    RegionSpec::new(a.ell, a.r, a.n)
}

fn counter(g: &Global) -> Counter {
    g.budget.map_or_else(Counter::default, Counter::with_budget)
}

fn model(m: &ModelArgs) -> Result<LimitModel, Error> {
    LimitModel::new(m.prime_cutoff, m.exponent_cap, m.tolerance)
}

/// Prints elapsed time to stderr every few seconds until dropped.
struct Ticker(Option<mpsc::Sender<()>>, Option<thread::JoinHandle<()>>);

impl Ticker {
    fn start(label: String) -> Self {
        let (tx, rx) = mpsc::channel::<()>();
        let handle = thread::spawn(move || {
            let start = Instant::now();
            while let Err(mpsc::RecvTimeoutError::Timeout) = rx.recv_timeout(Duration::from_secs(5))
            {
                eprintln!("{label}: {:.0}s elapsed", start.elapsed().as_secs_f64());
            }
        });
        Self(Some(tx), Some(handle))
    }
}

impl Drop for Ticker {
    fn drop(&mut self) {
        drop(self.0.take());
        if let Some(h) = self.1.take() {
            let _ = h.join();
        }
    }
}

/// Looks the count up in the cache when one is configured.
fn cached(
    g: &Global,
    h: &RegionSpec,
    variant: Option<&str>,
    compute: impl FnOnce() -> hyperlat::Result<u128>,
) -> hyperlat::Result<u128> {
    let _ticker = Ticker::start(format!("counting {h}"));
    match &g.cache_dir {
        Some(dir) => CountCache::open(dir)?.get_or_compute(&CountCache::key(h, variant), compute),
        None => compute(),
    }
}

pub fn run(cmd: &Command, g: &Global) -> CmdResult {
    match cmd {
        Command::Count { region: a, mu, cap } => {
            let h = region(a)?;
            let c = counter(g);
            let (value, extra) = if let Some(mu) = mu {
                let v = cached(g, &h, Some(&counting::divisibility_variant(mu)), || {
                    Ok(c.count_with_divisibility(&h, mu)?.value())
                })?;
                (v, json!({ "mu": mu }))
            } else if let Some(cap) = cap {
                let cap = ProductCap::new(cap.parse::<Rational>()?);
                let v = cached(g, &h, Some(&counting::cap_variant(&cap)), || {
                    Ok(c.count_constrained(&h, &cap)?.value())
                })?;
                (v, json!({ "cap": cap.bound.to_string() }))
            } else {
                (
                    cached(g, &h, None, || Ok(c.count(&h)?.value()))?,
                    Value::Null,
                )
            };
            let mut j = json!({ "l": h.ell, "r": h.r, "n": h.n, "count": value.to_string() });
            if let Value::Object(extra) = extra {
                j.as_object_mut().expect("object").extend(extra);
            }
            Ok(Output::scalar(value.to_string(), j).into())
        }
        Command::CountScaled { region: a, t } => {
            let h = region(a)?;
            let t = ScaleVector::new(
                t.iter()
                    .map(|s| s.parse::<Rational>())
                    .collect::<Result<_, _>>()?,
            )?;
            let c = counter(g);
            let v = cached(g, &h, Some(&counting::scaled_variant(&t)), || {
                Ok(c.count_scaled(&h, &t)?.value())
            })?;
            let ts: Vec<String> = t.entries().iter().map(|x| x.to_string()).collect();
            Ok(Output::scalar(
                v.to_string(),
                json!({ "l": h.ell, "r": h.r, "n": h.n, "t": ts, "count": v.to_string() }),
            )
            .into())
        }
        Command::Sample {
            region: a,
            m,
            seed,
            method,
            dump,
        } => {
            let h = region(a)?;
            let cfg = SamplerConfig::new(h, seed.seed, *method)?;
            let sampler = Sampler::with_options(cfg, counter(g).opts)?;
            let points = sampler.sample_batch(*m as usize)?;
            let meta = SampleMetadata::new(&cfg, points.len());
            if let Some(path) = dump {
                write_dump(path, &points, &meta)?;
                let j = json!({
                    "dump": path.display().to_string(),
                    "metadata": metadata_path(path).display().to_string(),
                    "draws": points.len(),
                    "seed": seed.seed,
                });
                return Ok(Output::scalar(path.display().to_string(), j).into());
            }
            let header: Vec<String> = (1..=h.r).map(|k| format!("i{k}")).collect();
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| p.coords.iter().map(u128::to_string).collect())
                .collect();
            let pts: Vec<Vec<String>> = rows.clone();
            Ok(Output::table(header, rows, json!({ "metadata": meta, "points": pts })).into())
        }
        Command::GcdDist {
            r,
            max_value,
            ell,
            n,
            m,
            seed,
        } => {
            let mut header = vec!["m".to_string(), "limit_pmf".to_string()];
            let mut freq = None;
            if let (Some(ell), Some(n)) = (ell, n) {
                let h = RegionSpec::new(*ell, *r, *n)?;
                let s =
                    Sampler::with_options(SamplerConfig::exact(h, seed.seed)?, counter(g).opts)?;
                let pts = s.sample_batch(*m as usize)?;
                let mut counts = vec![0u64; *max_value as usize];
                for p in &pts {
                    let d = p.gcd();
                    if d <= u128::from(*max_value) {
                        counts[d as usize - 1] += 1;
                    }
                }
                header.push("empirical".into());
                freq = Some(
                    counts
                        .into_iter()
                        .map(|c| c as f64 / *m as f64)
                        .collect::<Vec<_>>(),
                );
            }
            let mut rows = Vec::new();
            let mut objs = Vec::new();
            for v in 1..=*max_value {
                let p = gcd_limit_pmf(*r, v)?;
                let mut row = vec![v.to_string(), p.to_string()];
                let mut obj = json!({ "m": v, "limit_pmf": p });
                if let Some(f) = &freq {
                    let e = f[v as usize - 1];
                    row.push(e.to_string());
                    obj["empirical"] = json!(e);
                }
                rows.push(row);
                objs.push(obj);
            }
            Ok(Output::table(header, rows, Value::Array(objs)).into())
        }
        Command::LcmMoment {
            r,
            beta,
            model: ma,
            ell,
            n,
            m,
            seed,
        } => {
            let lm = model(ma)?;
            let est = lcm_ratio_moment(*r, *beta, &lm)?;
            if let (Some(ell), Some(n)) = (ell, n) {
                let h = RegionSpec::new(*ell, *r, *n)?;
                let reports =
                    lcm_moment_gate(&[h], *beta, *m as usize, seed.seed, f64::INFINITY, &lm)?;
                let rep = &reports[0];
                let rows = vec![
                    vec!["limit".into(), rep.target.value.to_string()],
                    vec!["empirical".into(), rep.empirical.to_string()],
                    vec!["relative_error".into(), rep.statistic.value.to_string()],
                ];
                let j = json!({ "lcm_ratio_moment": est, "target": rep.target, "empirical": rep.empirical,
                    "relative_error": rep.statistic.value, "notes": rep.notes, "seed": seed.seed, "draws": m });
                return Ok(Output::table(vec!["quantity".into(), "value".into()], rows, j).into());
            }
            let rows = vec![
                vec!["value".into(), est.value.to_string()],
                vec!["error_bound".into(), est.error_bound.to_string()],
                vec!["lower".into(), est.lower.to_string()],
                vec!["upper".into(), est.upper.to_string()],
            ];
            Ok(
                Output::table(vec!["quantity".into(), "value".into()], rows, json!(est))
                    .with_scalar(format!("{} +- {:e}", est.value, est.error_bound))
                    .into(),
            )
        }
        Command::Volume { ell, r, n } => {
            let _ticker = Ticker::start(format!("volume of ({ell},{r})"));
            let v = volume(*ell, *r, *n)?;
            Ok(Output::scalar(format!("{:?}", v.value), json!(v)).into())
        }
        Command::UCdf {
            ell,
            r,
            x,
            reference_n,
        } => {
            let v = u_cdf(*ell, *r, *x, *reference_n)?;
            Ok(Output::scalar(
                format!("{v:?}"),
                json!({ "l": ell, "r": r, "x": x, "cdf": v }),
            )
            .into())
        }
        Command::Spacings { r, x, n, m, seed } => {
            let mut rows = Vec::new();
            let mut j = json!({ "r": r });
            if let Some(x) = x {
                let marginal = spacing_marginal_cdf(*r, *x)?;
                rows.push(vec!["marginal_cdf".into(), marginal.to_string()]);
                let mut partial = Vec::new();
                for k in 1..*r {
                    let v = order_statistic_cdf(*r, k, *x)?;
                    rows.push(vec![format!("partial_sum_{k}_cdf"), v.to_string()]);
                    partial.push(v);
                }
                j["x"] = json!(x);
                j["marginal_cdf"] = json!(marginal);
                j["partial_sum_cdf"] = json!(partial);
            }
            let mut passed = true;
            if let Some(n) = n {
                let rep = logcoord_ks_gate(*r, *n, *m as usize, seed.seed, 0.05)?;
                rows.push(vec!["ks_distance".into(), rep.statistic.value.to_string()]);
                passed = rep.passed();
                j["report"] = serde_json::to_value(&rep)?;
            }
            Ok(Outcome {
                output: Output::table(vec!["quantity".into(), "value".into()], rows, j),
                gates_passed: passed,
            })
        }
        Command::Hypersum {
            region: a,
            f,
            table,
            mode,
            m,
            seed,
        } => {
            let h = region(a)?;
            let func = match table {
                Some(path) => ArithmeticFunction::table_from_file(path)?,
                None => f.parse()?,
            };
            let mode: Mode = mode.parse()?;
            let strategy = match m {
                Some(m) => Strategy::Sampled {
                    m: *m as usize,
                    seed: seed.seed,
                },
                None => Strategy::Exact,
            };
            let res = {
                let _ticker = Ticker::start(format!("summing over {h}"));
                hypersum_with(&counter(g), &h, &func, mode, strategy)?
            };
            let text = match res.exact_integer {
                Some(v) => v.to_string(),
                None => format!("{:?}", res.value),
            };
            let mut rows = vec![
                vec!["sum".into(), text.clone()],
                vec!["count".into(), res.count.to_string()],
                vec!["mean".into(), res.mean().to_string()],
            ];
            if let Some(se) = res.standard_error {
                rows.push(vec!["standard_error".into(), se.to_string()]);
            }
            let mut j = json!(res);
            j["count"] = json!(res.count.to_string());
            if let Some(v) = res.exact_integer {
                j["exact_integer"] = json!(v.to_string());
            }
            Ok(
                Output::table(vec!["quantity".into(), "value".into()], rows, j)
                    .with_scalar(text)
                    .into(),
            )
        }
        Command::Verify {
            quick,
            seed,
            criteria,
        } => {
            let opts = VerifyOptions {
                quick: *quick,
                seed: seed.seed,
            };
            let ids: Vec<u32> = criteria
                .clone()
                .unwrap_or_else(|| (1..=verify::CRITERIA).collect());
            let outcomes =
                verify::run_criteria(&ids, &opts, |o| eprintln!("{}", o.summary_line()))?;
            let passed = outcomes.iter().all(|o| o.passed());
            let table: Vec<String> = outcomes.iter().map(|o| o.summary_line()).collect();
            let json_text = verify::reports_json(&outcomes)?;
            let csv_text = reports_to_csv(&verify::all_reports(&outcomes))?;
            Ok(Outcome {
                output: Output::prerendered(table.join("\n"), json_text, csv_text),
                gates_passed: passed,
            })
        }
    }
}

pub fn write(out: &Output, g: &Global, path: Option<&Path>) -> Result<(), Error> {
    let text = out.render(g.format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
