//! Hyperbolic sums and convergence gates.
//!
//! A gate compares a finite-`n` lattice statistic with its limit and returns
//! an [`ExperimentReport`]; the verdict is `pass` exactly when the error
//! statistic is at most the tolerance. Reports depend only on their inputs
//! and seed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, lcm_vec};
use crate::counting::{Counter, RegionSpec};
use crate::error::{Error, Result};
use crate::exact::coordinate_cap_f64;
use crate::limits::spacing::order_statistic_cdf;
use crate::limits::{
    gcd_limit_pmf, lcm_ratio_moment, spacing_marginal_cdf, u_moment, LimitModel, ProductLimitLaw,
};
use crate::rng::RNG_ALGORITHM;
use crate::sampling::{log_coords, LatticePoint, Sampler, SamplerConfig};
use crate::stats::{ks_p_value, ks_sorted, ks_two_sample_sorted, mean_and_se};
use crate::sympoly::gcd_u128;

/// Real-valued arithmetic function `f : N -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ArithmeticFunction {
    Identity,
    Power {
        beta: f64,
    },
    Log,
    IndicatorOfOne,
    /// `values[m - 1] = f(m)`.
    Table {
        values: Vec<f64>,
    },
}

impl ArithmeticFunction {
    /// Reads `m,value` rows (header optional) covering `1..=M` without gaps.
    pub fn table_from_file(path: &Path) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::domain(format!("table {}: {e}", path.display())))?;
        let mut values = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| Error::domain(format!("table: {e}")))?;
            if rec.len() != 2 {
                return Err(Error::domain(format!(
                    "table row {} needs two fields",
                    i + 1
                )));
            }
            let (Ok(m), Ok(v)) = (rec[0].parse::<u64>(), rec[1].parse::<f64>()) else {
                if i == 0 {
                    continue; // header
                }
                return Err(Error::domain(format!(
                    "table row {} is not `m,value`",
                    i + 1
                )));
            };
            if m != values.len() as u64 + 1 {
                return Err(Error::domain(format!(
                    "table rows must list m = 1, 2, ... in order (row {})",
                    i + 1
                )));
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::domain("empty table"));
        }
        Ok(ArithmeticFunction::Table { values })
    }

    pub fn eval(&self, m: u128) -> Result<f64> {
        if m == 0 {
            return Err(Error::domain("arithmetic functions are defined on m >= 1"));
        }
        Ok(match self {
            ArithmeticFunction::Identity => m as f64,
            ArithmeticFunction::Power { beta } => (m as f64).powf(*beta),
            ArithmeticFunction::Log => (m as f64).ln(),
            ArithmeticFunction::IndicatorOfOne => f64::from(u8::from(m == 1)),
            ArithmeticFunction::Table { values } => *usize::try_from(m - 1)
                .ok()
                .and_then(|i| values.get(i))
                .ok_or_else(|| Error::domain(format!("table has no value for m = {m}")))?,
        })
    }

    /// Exact value for the integer-valued kinds.
    pub fn eval_integer(&self, m: u128) -> Option<u128> {
        match self {
            ArithmeticFunction::Identity => Some(m),
            ArithmeticFunction::IndicatorOfOne => Some(u128::from(m == 1)),
            ArithmeticFunction::Power { beta }
                if *beta >= 0.0 && beta.fract() == 0.0 && *beta <= 127.0 =>
            {
                m.checked_pow(*beta as u32)
            }
            _ => None,
        }
    }

    fn is_integer_valued(&self) -> bool {
        match self {
            ArithmeticFunction::Identity | ArithmeticFunction::IndicatorOfOne => true,
            ArithmeticFunction::Power { beta } => {
                *beta >= 0.0 && beta.fract() == 0.0 && *beta <= 127.0
            }
            _ => false,
        }
    }

    /// Index of regular variation where it is defined.
    pub fn regular_variation_index(&self) -> Option<f64> {
        match self {
            ArithmeticFunction::Identity => Some(1.0),
            ArithmeticFunction::Power { beta } => Some(*beta),
            ArithmeticFunction::Log => Some(0.0),
            _ => None,
        }
    }

    /// `sup |f|` when finite.
    fn sup_abs(&self) -> Option<f64> {
        match self {
            ArithmeticFunction::IndicatorOfOne => Some(1.0),
            ArithmeticFunction::Power { beta } if *beta <= 0.0 => Some(1.0),
            ArithmeticFunction::Table { values } => {
                Some(values.iter().fold(0.0f64, |a, v| a.max(v.abs())))
            }
            _ => None,
        }
    }
}

impl std::str::FromStr for ArithmeticFunction {
    type Err = Error;

    /// `identity`, `log`, `indicator-of-one`, `power:BETA`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "id" => Ok(ArithmeticFunction::Identity),
            "log" => Ok(ArithmeticFunction::Log),
            "indicator-of-one" | "one" => Ok(ArithmeticFunction::IndicatorOfOne),
            _ => {
                if let Some(b) = s.strip_prefix("power:") {
                    let beta = b
                        .parse()
                        .map_err(|_| Error::domain(format!("bad exponent in {s:?}")))?;
                    Ok(ArithmeticFunction::Power { beta })
                } else {
                    Err(Error::domain(format!("unknown arithmetic function {s:?}")))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gcd,
    Lcm,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcd" => Ok(Mode::Gcd),
            "lcm" => Ok(Mode::Lcm),
            _ => Err(Error::domain(format!("mode must be gcd or lcm, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exact,
    Sampled { m: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypersumResult {
    pub region: RegionSpec,
    pub count: u128,
    /// The sum, or its unbiased estimate `|H| * mean`.
    pub value: f64,
    /// Exact integer sum for integer-valued `f` under exact enumeration.
    pub exact_integer: Option<u128>,
    pub standard_error: Option<f64>,
    pub draws: Option<usize>,
}

impl HypersumResult {
    /// `E f(.) = sum / |H|`.
    pub fn mean(&self) -> f64 {
        self.value / self.count as f64
    }
}

#[derive(Debug, Clone, Copy)]
enum Acc {
    Int(u128),
    Real(f64),
}

/// Sum of `f(GCD(i))` or `f(LCM(i))` over `H_{l,r}(n)`.
pub fn hypersum(
    region: &RegionSpec,
    f: &ArithmeticFunction,
    mode: Mode,
    strategy: Strategy,
) -> Result<HypersumResult> {
    hypersum_with(&Counter::default(), region, f, mode, strategy)
}

pub fn hypersum_with(
    counter: &Counter,
    region: &RegionSpec,
    f: &ArithmeticFunction,
    mode: Mode,
    strategy: Strategy,
) -> Result<HypersumResult> {
    match strategy {
        Strategy::Exact => exact_hypersum(counter, region, f, mode),
        Strategy::Sampled { m, seed } => {
            if m < 2 {
                return Err(Error::domain(
                    "sampled hyperbolic sums need at least two draws",
                ));
            }
            let sampler =
                Sampler::with_options(SamplerConfig::exact(*region, seed)?, counter.opts)?;
            let pts = sampler.sample_batch(m)?;
            let vals = pts
                .iter()
                .map(|p| f.eval(statistic_of(p, mode)?))
                .collect::<Result<Vec<_>>>()?;
            let (mean, se) = mean_and_se(&vals);
            let total = sampler.total();
            Ok(HypersumResult {
                region: *region,
                count: total,
                value: total as f64 * mean,
                exact_integer: None,
                standard_error: Some(total as f64 * se),
                draws: Some(m),
            })
        }
    }
}

fn statistic_of(p: &LatticePoint, mode: Mode) -> Result<u128> {
    match mode {
        Mode::Gcd => Ok(p.gcd()),
        Mode::Lcm => p.lcm(),
    }
}

fn exact_hypersum(
    counter: &Counter,
    region: &RegionSpec,
    f: &ArithmeticFunction,
    mode: Mode,
) -> Result<HypersumResult> {
    let integer = f.is_integer_valued();
    let init =
        || -> (Result<Acc>, u128) { (Ok(if integer { Acc::Int(0) } else { Acc::Real(0.0) }), 0) };
    let groups = counter.fold_slab_groups(region, None, init, |(acc, points), prefix, last| {
        *points += last;
        let Ok(a) = acc else { return };
        let step = slab_sum(f, mode, prefix, last, integer);
        *acc = match (step, *a) {
            (Ok(Acc::Int(x)), Acc::Int(y)) => x
                .checked_add(y)
                .map(Acc::Int)
                .ok_or(Error::Overflow("hyperbolic sum")),
            (Ok(Acc::Real(x)), Acc::Real(y)) => Ok(Acc::Real(x + y)),
            (Err(e), _) => Err(e),
            _ => unreachable!("accumulator kinds agree"),
        };
    })?;
    let mut count = 0u128;
    let mut total = if integer { Acc::Int(0) } else { Acc::Real(0.0) };
    for (acc, points) in groups {
        count += points;
        total = match (acc?, total) {
            (Acc::Int(x), Acc::Int(y)) => {
                Acc::Int(x.checked_add(y).ok_or(Error::Overflow("hyperbolic sum"))?)
            }
            (Acc::Real(x), Acc::Real(y)) => Acc::Real(x + y),
            _ => unreachable!("accumulator kinds agree"),
        };
    }
    let (value, exact_integer) = match total {
        Acc::Int(v) => (v as f64, Some(v)),
        Acc::Real(v) => (v, None),
    };
    Ok(HypersumResult {
        region: *region,
        count,
        value,
        exact_integer,
        standard_error: None,
        draws: None,
    })
}

/// Contribution of the slab `prefix x [1, last]`.
fn slab_sum(
    f: &ArithmeticFunction,
    mode: Mode,
    prefix: &[u128],
    last: u128,
    integer: bool,
) -> Result<Acc> {
    let mut int_acc = 0u128;
    let mut real_acc = 0.0f64;
    let mut add = |m: u128| -> Result<()> {
        if integer {
            let v = f.eval_integer(m).ok_or(Error::Overflow("function value"))?;
            int_acc = int_acc
                .checked_add(v)
                .ok_or(Error::Overflow("hyperbolic sum"))?;
        } else {
            real_acc += f.eval(m)?;
        }
        Ok(())
    };
    match mode {
        Mode::Gcd => {
            let g = prefix.iter().fold(0u128, |a, &x| gcd_u128(a, x));
            if g == 1 {
                // every gcd is 1
                if integer {
                    let one = f.eval_integer(1).ok_or(Error::Overflow("function value"))?;
                    int_acc = one
                        .checked_mul(last)
                        .ok_or(Error::Overflow("hyperbolic sum"))?;
                } else {
                    real_acc = f.eval(1)? * last as f64;
                }
            } else if g == 0 {
                for v in 1..=last {
                    add(v)?;
                }
            } else if g <= u64::MAX as u128 {
                let g64 = g as u64;
                for v in 1..=last {
                    add(gcd_u64(g64, (v % g) as u64) as u128)?;
                }
            } else {
                for v in 1..=last {
                    add(gcd_u128(g, v))?;
                }
            }
        }
        Mode::Lcm => {
            let l = if prefix.is_empty() {
                1
            } else {
                lcm_vec(prefix)?
            };
            for v in 1..=last {
                let g = gcd_u128(l, v);
                add((l / g).checked_mul(v).ok_or(Error::Overflow("lcm"))?)?;
            }
        }
    }
    Ok(if integer {
        Acc::Int(int_acc)
    } else {
        Acc::Real(real_acc)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticKind {
    KsDistance,
    ZScore,
    RelativeError,
    AbsoluteError,
    /// `-log10` of a p-value; a gate at level `alpha` uses `-log10 alpha`.
    NegLog10PValue,
    Ratio,
    Count,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub value: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub kind: StatisticKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub regions: Vec<RegionSpec>,
    pub sample_size: Option<u64>,
    pub exact: bool,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub target: Target,
    pub empirical: f64,
    pub statistic: Statistic,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: impl Into<String>,
        regions: Vec<RegionSpec>,
        sampling: Option<(u64, u64)>,
        target: f64,
        provenance: impl Into<String>,
        empirical: f64,
        statistic: Statistic,
        tolerance: f64,
    ) -> Self {
        let verdict = if statistic.value <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            id: id.into(),
            regions,
            sample_size: sampling.map(|s| s.0),
            exact: sampling.is_none(),
            seed: sampling.map(|s| s.1),
            rng: sampling.map(|_| RNG_ALGORITHM.to_string()),
            target: Target {
                value: target,
                provenance: provenance.into(),
            },
            empirical,
            statistic,
            tolerance,
            verdict,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Relative error `|a - b| / |b|`.
pub fn relative_error(empirical: f64, target: f64) -> f64 {
    (empirical - target).abs() / target.abs()
}

/// CSV summary: `experiment,l,r,n,m,target,empirical,stat,tol,verdict`.
pub fn reports_to_csv(reports: &[ExperimentReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::domain(format!("csv: {e}"));
    w.write_record([
        "experiment",
        "l",
        "r",
        "n",
        "m",
        "target",
        "empirical",
        "stat",
        "tol",
        "verdict",
    ])
    .map_err(csv_err)?;
    for rep in reports {
        let region = rep.regions.last();
        let field = |f: fn(&RegionSpec) -> String| region.map(f).unwrap_or_default();
        w.write_record([
            rep.id.clone(),
            field(|h| h.ell.to_string()),
            field(|h| h.r.to_string()),
            field(|h| h.n.to_string()),
            rep.sample_size
                .map(|m| m.to_string())
                .unwrap_or_else(|| "exact".into()),
            format!("{}", rep.target.value),
            format!("{}", rep.empirical),
            format!("{}", rep.statistic.value),
            format!("{}", rep.tolerance),
            match rep.verdict {
                Verdict::Pass => "pass".into(),
                Verdict::Fail => "fail".into(),
            },
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::domain(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// How a gate turns its comparison into a statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `|emp - target| / target <= x`.
    Relative(f64),
    /// `|emp - target| / se <= k`.
    ZScore(f64),
}

fn draw(region: &RegionSpec, m: usize, seed: u64) -> Result<(Sampler, Vec<LatticePoint>)> {
    let sampler = Sampler::new(SamplerConfig::exact(*region, seed)?)?;
    let pts = sampler.sample_batch(m)?;
    Ok((sampler, pts))
}

/// `E f(GCD)` over the region against `sum_m f(m) m^{-r} / zeta(r)`.
pub fn gcd_limit_gate(
    region: &RegionSpec,
    f: &ArithmeticFunction,
    strategy: Strategy,
    tolerance: Tolerance,
) -> Result<ExperimentReport> {
    let r = region.r;
    let sup = f
        .sup_abs()
        .ok_or_else(|| Error::domain("the gcd gate needs a bounded function"))?;
    let terms = 100_000u64;
    let mut target = 0.0;
    for m in (1..=terms).rev() {
        let v = f.eval(m as u128)?;
        if v != 0.0 {
            target += v * gcd_limit_pmf(r, m)?;
        }
    }
    let tail = sup * crate::limits::gcd::pmf_partial(r, terms)?.1;
    let res = hypersum(region, f, Mode::Gcd, strategy)?;
    let emp = res.mean();
    let (stat, sampling) = match (tolerance, strategy) {
        (Tolerance::Relative(_), _) => (
            Statistic {
                kind: StatisticKind::RelativeError,
                value: relative_error(emp, target),
            },
            None,
        ),
        (Tolerance::ZScore(_), Strategy::Sampled { m, seed }) => {
            let se = res.standard_error.unwrap_or(f64::NAN) / res.count as f64;
            (
                Statistic {
                    kind: StatisticKind::ZScore,
                    value: (emp - target).abs() / se,
                },
                Some((m as u64, seed)),
            )
        }
        (Tolerance::ZScore(_), Strategy::Exact) => {
            return Err(Error::domain("a z-score needs a sampled strategy"));
        }
    };
    let sampling = sampling.or(match strategy {
        Strategy::Sampled { m, seed } => Some((m as u64, seed)),
        Strategy::Exact => None,
    });
    let tol = match tolerance {
        Tolerance::Relative(x) | Tolerance::ZScore(x) => x,
    };
    Ok(ExperimentReport::new(
        "gcd-limit",
        vec![*region],
        sampling,
        target,
        format!("sum_m f(m) m^-{r} / zeta({r}), m <= {terms}, tail <= {tail:.1e}"),
        emp,
        stat,
        tol,
    ))
}

/// Sampled `E[(LCM / n^{r/l})^beta]` against `E[U^beta] E[L_r^beta]` along a
/// sequence of regions. Only the last region is gated by `tolerance`; the
/// second report is the trend check, whose statistic counts steps along the
/// sequence where the relative error did not shrink.
pub fn lcm_moment_gate(
    regions: &[RegionSpec],
    beta: f64,
    m: usize,
    seed: u64,
    tolerance: f64,
    model: &LimitModel,
) -> Result<Vec<ExperimentReport>> {
    let last = *regions
        .last()
        .ok_or_else(|| Error::domain("need at least one region"))?;
    let (ell, r) = (last.ell, last.r);
    if regions.iter().any(|h| (h.ell, h.r) != (ell, r)) {
        return Err(Error::domain(
            "all regions in a sequence must share l and r",
        ));
    }
    let lcm_part = lcm_ratio_moment(r, beta, model)?;
    let u_part = u_moment(ell, r, beta, None)?;
    let target = u_part * lcm_part.value;
    let mut steps = Vec::new();
    for h in regions {
        let (_, pts) = draw(h, m, seed)?;
        let scale = h.scale();
        let vals = pts
            .iter()
            .map(|p| Ok((p.lcm()? as f64 / scale).powf(beta)))
            .collect::<Result<Vec<_>>>()?;
        let (mean, se) = mean_and_se(&vals);
        steps.push((h.n, mean, se, relative_error(mean, target)));
    }
    let &(_, mean, se, err) = steps.last().expect("nonempty");
    let final_report = ExperimentReport::new(
        "lcm-moment",
        vec![last],
        Some((m as u64, seed)),
        target,
        format!(
            "E[U_({ell},{r})^{beta}] * E[L_{r}^{beta}] = {u_part:.6} * {:.6} (+-{:.1e})",
            lcm_part.value, lcm_part.error_bound
        ),
        mean,
        Statistic {
            kind: StatisticKind::RelativeError,
            value: err,
        },
        tolerance,
    )
    .with_note(format!("standard error {se:.3e}"));
    let bad_steps = steps.windows(2).filter(|w| w[1].3 >= w[0].3).count();
    let mut trend = ExperimentReport::new(
        "lcm-moment-trend",
        regions.to_vec(),
        Some((m as u64, seed)),
        0.0,
        "relative error strictly decreasing along the sequence",
        bad_steps as f64,
        Statistic {
            kind: StatisticKind::Count,
            value: bad_steps as f64,
        },
        0.0,
    );
    for (n, mean, se, err) in steps {
        trend = trend.with_note(format!(
            "n={n}: mean {mean:.6} (se {se:.2e}), relative error {err:.5}"
        ));
    }
    Ok(vec![final_report, trend])
}

/// Sampled `E[LCM / prod]` against `E[L_r]`.
pub fn lcm_ratio_gate(
    region: &RegionSpec,
    m: usize,
    seed: u64,
    z: f64,
    model: &LimitModel,
) -> Result<ExperimentReport> {
    let moment = lcm_ratio_moment(region.r, 1.0, model)?;
    let (_, pts) = draw(region, m, seed)?;
    let vals = pts
        .iter()
        .map(|p| Ok(p.lcm()? as f64 / p.product()? as f64))
        .collect::<Result<Vec<_>>>()?;
    let (mean, se) = mean_and_se(&vals);
    Ok(ExperimentReport::new(
        "lcm-ratio",
        vec![*region],
        Some((m as u64, seed)),
        moment.value,
        format!(
            "E[L_{}] from the truncated Euler product (+-{:.1e})",
            region.r, moment.error_bound
        ),
        mean,
        Statistic {
            kind: StatisticKind::ZScore,
            value: (mean - moment.value).abs() / se,
        },
        z,
    )
    .with_note(format!("standard error {se:.3e}")))
}

/// KS distance between sampled `prod V_k / n^{r/l}` and the law of `U_{l,r}`.
pub fn product_ks_gate(
    region: &RegionSpec,
    m: usize,
    seed: u64,
    tolerance: f64,
    reference_n: Option<u64>,
) -> Result<ExperimentReport> {
    let law = ProductLimitLaw::new(region.ell, region.r, reference_n)?;
    let (_, pts) = draw(region, m, seed)?;
    let scale = region.scale();
    let mut xs = pts
        .iter()
        .map(|p| Ok(p.product()? as f64 / scale))
        .collect::<Result<Vec<_>>>()?;
    xs.sort_by(f64::total_cmp);
    let d = match &law {
        ProductLimitLaw::Lattice(l) => ks_two_sample_sorted(&xs, l.sorted_values()),
        _ => ks_sorted(&xs, |x| law.cdf(x)),
    };
    Ok(ExperimentReport::new(
        "product-ks",
        vec![*region],
        Some((m as u64, seed)),
        0.0,
        format!("law of U_({},{}): {}", region.ell, region.r, law.describe()),
        d,
        Statistic {
            kind: StatisticKind::KsDistance,
            value: d,
        },
        tolerance,
    )
    .with_note(format!(
        "asymptotic p-value {:.3e}",
        ks_p_value(d, m as f64)
    )))
}

/// KS distance between sampled `log V_1 / log n` over `H_{r,r}(n)` and the
/// spacing marginal `1 - (1 - x)^{r-1}`. Notes carry the KS distances of the
/// partial sums `log(V_1 ... V_k) / log n` against `Z^(k)`.
pub fn logcoord_ks_gate(
    r: u32,
    n: u64,
    m: usize,
    seed: u64,
    tolerance: f64,
) -> Result<ExperimentReport> {
    let h = RegionSpec::new(r, r, n)?;
    let (_, pts) = draw(&h, m, seed)?;
    let logs = pts
        .iter()
        .map(|p| log_coords(p, n))
        .collect::<Result<Vec<_>>>()?;
    let mut first: Vec<f64> = logs.iter().map(|l| l[0]).collect();
    first.sort_by(f64::total_cmp);
    let d = ks_sorted(&first, |x| {
        spacing_marginal_cdf(r, x.clamp(0.0, 1.0)).unwrap_or(1.0)
    });
    let mut rep = ExperimentReport::new(
        "logcoord-ks",
        vec![h],
        Some((m as u64, seed)),
        0.0,
        format!("spacing marginal 1 - (1 - x)^{}", r - 1),
        d,
        Statistic {
            kind: StatisticKind::KsDistance,
            value: d,
        },
        tolerance,
    )
    .with_note(format!(
        "asymptotic p-value {:.3e}",
        ks_p_value(d, m as f64)
    ));
    for k in 2..r {
        let mut partial: Vec<f64> = logs
            .iter()
            .map(|l| l[..k as usize].iter().sum::<f64>())
            .collect();
        partial.sort_by(f64::total_cmp);
        let dk = ks_sorted(&partial, |x| {
            order_statistic_cdf(r, k, x.clamp(0.0, 1.0)).unwrap_or(1.0)
        });
        rep = rep.with_note(format!("partial sum k={k} vs Z^({k}): KS {dk:.5}"));
    }
    Ok(rep)
}

/// Exact `count_with_divisibility / count` against `prod_k mu_k^{-1}` with
/// `mu_k = prod_t p_t^{j_{k,t}}`.
pub fn valuation_gate(
    region: &RegionSpec,
    primes: &[u64],
    pattern: &[Vec<u32>],
    tolerance: f64,
) -> Result<ExperimentReport> {
    if pattern.len() != region.dims() || pattern.iter().any(|row| row.len() != primes.len()) {
        return Err(Error::domain(
            "pattern must have r rows of one exponent per prime",
        ));
    }
    let mu = pattern
        .iter()
        .map(|row| {
            row.iter().zip(primes).try_fold(1u64, |acc, (&j, &p)| {
                p.checked_pow(j)
                    .and_then(|x| acc.checked_mul(x))
                    .ok_or(Error::Overflow("divisor"))
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    let counter = Counter::default();
    let total = counter.count(region)?.value();
    let sub = counter.count_with_divisibility(region, &mu)?.value();
    let ratio = sub as f64 / total as f64;
    let target = mu.iter().map(|&x| 1.0 / x as f64).product::<f64>();
    Ok(ExperimentReport::new(
        "valuation",
        vec![*region],
        None,
        target,
        format!("prod_k 1/mu_k with mu = {mu:?}"),
        ratio,
        Statistic {
            kind: StatisticKind::RelativeError,
            value: relative_error(ratio, target),
        },
        tolerance,
    )
    .with_note(format!("{sub} of {total} points")))
}

/// Sampled `P{V_k <= alpha_k n^{1/l} for all k}` against the box count at a
/// larger reference `N`.
pub fn joint_cdf_gate(
    region: &RegionSpec,
    alpha: &[f64],
    m: usize,
    seed: u64,
    reference_n: u64,
    z: f64,
) -> Result<ExperimentReport> {
    if region.ell >= region.r {
        return Err(Error::domain("the joint cdf gate needs l < r"));
    }
    if alpha.len() != region.dims() || alpha.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::domain("need one positive alpha per coordinate"));
    }
    let caps = alpha
        .iter()
        .map(|&a| coordinate_cap_f64(a, region.ell, region.n))
        .collect::<Result<Vec<_>>>()?;
    let (_, pts) = draw(region, m, seed)?;
    let hits = pts
        .iter()
        .filter(|p| p.coords.iter().zip(&caps).all(|(x, c)| x <= c))
        .count();
    let emp = hits as f64 / m as f64;
    let big = RegionSpec::new(region.ell, region.r, reference_n)?;
    let counter = Counter::default();
    let upper = alpha
        .iter()
        .map(|&a| coordinate_cap_f64(a, big.ell, reference_n))
        .collect::<Result<Vec<_>>>()?;
    let target =
        counter.count_in_box(&big, &upper)?.value() as f64 / counter.count(&big)?.value() as f64;
    let se = (target * (1.0 - target) / m as f64).sqrt();
    Ok(ExperimentReport::new(
        "joint-cdf",
        vec![*region, big],
        Some((m as u64, seed)),
        target,
        format!("box count at reference n={reference_n}"),
        emp,
        Statistic {
            kind: StatisticKind::ZScore,
            value: (emp - target).abs() / se,
        },
        z,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(ell: u32, r: u32, n: u64) -> RegionSpec {
        RegionSpec::new(ell, r, n).unwrap()
    }

    /// Plain loops over the box `[1, n]^r`.
    fn brute(h: &RegionSpec, f: &ArithmeticFunction, mode: Mode) -> (f64, u128) {
        let r = h.dims();
        let n = h.n as u128;
        let mut idx = vec![1u128; r];
        let (mut sum, mut count) = (0.0, 0u128);
        loop {
            let e = crate::sympoly::eval_elem_sym(
                &crate::sympoly::SymPolyQuery::new(h.order(), idx.clone()).unwrap(),
            )
            .unwrap();
            if e <= n {
                let p = LatticePoint::new(idx.clone());
                let v = match mode {
                    Mode::Gcd => p.gcd(),
                    Mode::Lcm => p.lcm().unwrap(),
                };
                sum += f.eval(v).unwrap();
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == r {
                    return (sum, count);
                }
                idx[k] += 1;
                if idx[k] <= n {
                    break;
                }
                idx[k] = 1;
                k += 1;
            }
        }
    }

    #[test]
    fn hypersum_examples() {
        let one = ArithmeticFunction::IndicatorOfOne;
        let res = hypersum(&region(2, 2, 4), &one, Mode::Gcd, Strategy::Exact).unwrap();
        // (2,2) is the only point of H_{2,2}(4) with gcd > 1
        assert_eq!(res.exact_integer, Some(7));
        assert_eq!(res.count, 8);
        let res = hypersum(
            &region(2, 2, 1),
            &ArithmeticFunction::Identity,
            Mode::Lcm,
            Strategy::Exact,
        )
        .unwrap();
        assert_eq!(res.exact_integer, Some(1));
    }

    #[test]
    fn exact_sums_match_brute_force() {
        let fs = [
            ArithmeticFunction::Identity,
            ArithmeticFunction::IndicatorOfOne,
            ArithmeticFunction::Log,
        ];
        for h in [
            region(2, 2, 300),
            region(1, 2, 60),
            region(2, 3, 120),
            region(3, 3, 200),
            region(1, 1, 50),
            region(2, 4, 30),
        ] {
            for f in &fs {
                for mode in [Mode::Gcd, Mode::Lcm] {
                    let (want, count) = brute(&h, f, mode);
                    let got = hypersum(&h, f, mode, Strategy::Exact).unwrap();
                    assert_eq!(got.count, count);
                    assert!(
                        (got.value - want).abs() <= 1e-9 * want.abs().max(1.0),
                        "{h} {f:?} {mode:?}"
                    );
                    if let Some(v) = got.exact_integer {
                        assert_eq!(v as f64, want);
                    }
                }
            }
        }
    }

    #[test]
    fn mean_identity_is_exact_for_integer_functions() {
        let h = region(2, 3, 500);
        let res = hypersum(
            &h,
            &ArithmeticFunction::Identity,
            Mode::Lcm,
            Strategy::Exact,
        )
        .unwrap();
        let mut acc = 0u128;
        Counter::default()
            .for_each_point(&h, |p| acc += LatticePoint::new(p.to_vec()).lcm().unwrap())
            .unwrap();
        assert_eq!(res.exact_integer, Some(acc));
        assert_eq!(res.mean(), acc as f64 / res.count as f64);
    }

    #[test]
    fn sampled_sums_are_unbiased() {
        let h = region(2, 2, 200);
        let f = ArithmeticFunction::Log;
        let exact = hypersum(&h, &f, Mode::Lcm, Strategy::Exact).unwrap().value;
        let (mut mean, mut var) = (0.0, 0.0);
        let seeds = 50;
        for seed in 0..seeds {
            let s = hypersum(&h, &f, Mode::Lcm, Strategy::Sampled { m: 400, seed }).unwrap();
            mean += s.value / seeds as f64;
            var += s.standard_error.unwrap().powi(2) / (seeds * seeds) as f64;
        }
        assert!(
            (mean - exact).abs() <= 4.0 * var.sqrt(),
            "mean={mean} exact={exact}"
        );
    }

    #[test]
    fn function_parsing_and_tables() {
        assert_eq!(
            "identity".parse::<ArithmeticFunction>().unwrap(),
            ArithmeticFunction::Identity
        );
        assert_eq!(
            "power:0.5".parse::<ArithmeticFunction>().unwrap(),
            ArithmeticFunction::Power { beta: 0.5 }
        );
        assert!("sine".parse::<ArithmeticFunction>().is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "m,value\n1,2.5\n2,-1\n3,0\n").unwrap();
        let t = ArithmeticFunction::table_from_file(&path).unwrap();
        assert_eq!(t.eval(2).unwrap(), -1.0);
        assert!(t.eval(4).is_err());
        std::fs::write(&path, "1,2.5\n3,0\n").unwrap();
        assert!(ArithmeticFunction::table_from_file(&path).is_err());
        assert_eq!(
            ArithmeticFunction::Power { beta: 2.0 }.eval_integer(7),
            Some(49)
        );
        assert_eq!(ArithmeticFunction::Log.regular_variation_index(), Some(0.0));
    }

    #[test]
    fn report_verdict_and_serialization() {
        let stat = Statistic {
            kind: StatisticKind::KsDistance,
            value: 0.01,
        };
        let rep = ExperimentReport::new(
            "x",
            vec![region(2, 2, 10)],
            Some((100, 7)),
            0.0,
            "t",
            0.01,
            stat,
            0.05,
        );
        assert!(rep.passed());
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"verdict\":\"pass\""));
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
        let nan = Statistic {
            kind: StatisticKind::ZScore,
            value: f64::NAN,
        };
        assert!(!ExperimentReport::new("y", vec![], None, 0.0, "t", 0.0, nan, 1.0).passed());
        let csv = reports_to_csv(&[rep]).unwrap();
        assert_eq!(
            csv.lines().next().unwrap(),
            "experiment,l,r,n,m,target,empirical,stat,tol,verdict"
        );
        assert!(csv.lines().nth(1).unwrap().starts_with("x,2,2,10,100,"));
    }

    #[test]
    fn gates_run_and_are_reproducible() {
        let h = region(2, 2, 10_000);
        let a = product_ks_gate(&h, 5000, 3, 0.05, None).unwrap();
        let b = product_ks_gate(&h, 5000, 3, 0.05, None).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.statistic.value < 0.1);

        let v = valuation_gate(
            &region(2, 3, 20_000),
            &[2],
            &[vec![1], vec![1], vec![1]],
            0.05,
        )
        .unwrap();
        assert!(v.passed(), "{v:?}");

        let g = gcd_limit_gate(
            &region(2, 2, 20_000),
            &ArithmeticFunction::IndicatorOfOne,
            Strategy::Exact,
            Tolerance::Relative(0.2),
        )
        .unwrap();
        assert!((g.target.value - 0.607_927).abs() < 1e-5);
        assert!(gcd_limit_gate(
            &h,
            &ArithmeticFunction::Identity,
            Strategy::Exact,
            Tolerance::Relative(0.1)
        )
        .is_err());

        let j = joint_cdf_gate(
            &region(2, 3, 20_000),
            &[0.5, 0.5, 0.5],
            4000,
            1,
            80_000,
            4.0,
        )
        .unwrap();
        assert!(j.target.value > 0.0 && j.target.value < 1.0);

        let l = logcoord_ks_gate(3, 100_000, 4000, 2, 0.5).unwrap();
        assert_eq!(l.notes.len(), 2);
    }
}
