//! Exact uniform sampling from `H_{l,r}(n)`.
//!
//! The conditional-count method fixes coordinates left to right. Coordinate
//! `k` is drawn by inverse transform on the exact law
//! `P{i_k = v | prefix} = count_completions(prefix, v) / count_completions(prefix)`
//! with an integer uniform draw, so no floating point enters the decision.
//! The cumulative counts of the first coordinate are tabulated once per
//! sampler. The same decoding, fed a rank instead of fresh draws, gives the
//! bijection [`Sampler::unrank`] from `[0, |H|)` onto the region.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_vec, lcm_vec};
use crate::counting::product::{ProductCounter, QuotientBlocks};
use crate::counting::{CountOptions, Counter, RegionSpec};
use crate::error::{Error, Result};
use crate::rng::{self, Stream, CHUNK, RNG_ALGORITHM};
use crate::sympoly::{binomial, linear_parts, next_coord_bound, PrefixCoefficients};

/// Largest first-coordinate table built for `1 < l < r`.
pub const MAX_TABLE_LEN: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ConditionalCount,
    Rejection,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conditional-count" | "exact" => Ok(Method::ConditionalCount),
            "rejection" => Ok(Method::Rejection),
            _ => Err(Error::domain(format!("unknown sampling method {s:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ConditionalCount => "conditional-count",
            Method::Rejection => "rejection",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub region: RegionSpec,
    pub seed: u64,
    pub method: Method,
}

impl SamplerConfig {
    pub fn new(region: RegionSpec, seed: u64, method: Method) -> Result<Self> {
        region.require_nonempty()?;
        if method == Method::Rejection && region.ell != 1 {
            return Err(Error::domain(
                "the rejection method is only available for l = 1",
            ));
        }
        Ok(Self {
            region,
            seed,
            method,
        })
    }

    pub fn exact(region: RegionSpec, seed: u64) -> Result<Self> {
        Self::new(region, seed, Method::ConditionalCount)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub coords: Vec<u128>,
}

impl LatticePoint {
    pub fn new(coords: Vec<u128>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[u128] {
        &self.coords
    }

    pub fn product(&self) -> Result<u128> {
        self.coords
            .iter()
            .try_fold(1u128, |a, &x| a.checked_mul(x))
            .ok_or(Error::Overflow("coordinate product"))
    }

    pub fn gcd(&self) -> u128 {
        gcd_vec(&self.coords).expect("lattice points have positive coordinates")
    }

    pub fn lcm(&self) -> Result<u128> {
        lcm_vec(&self.coords)
    }
}

/// `(log i_1 / log n, ..., log i_r / log n)`.
pub fn log_coords(p: &LatticePoint, n: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain("log coordinates need n >= 2"));
    }
    let ln = (n as f64).ln();
    Ok(p.coords.iter().map(|&x| (x as f64).ln() / ln).collect())
}

/// Cumulative counts of the first coordinate. `ends[k]` is the number of
/// points whose first coordinate is at most `hi[k]`; every value in segment
/// `k` carries `weight[k]` points.
#[derive(Debug, Clone, Default)]
struct FirstTable {
    lo: Vec<u128>,
    weight: Vec<u128>,
    ends: Vec<u128>,
}

impl FirstTable {
    fn push(&mut self, lo: u128, hi: u128, weight: u128) -> Result<()> {
        if weight == 0 {
            return Ok(());
        }
        let before = self.ends.last().copied().unwrap_or(0);
        let mass = (hi - lo + 1)
            .checked_mul(weight)
            .and_then(|m| m.checked_add(before))
            .ok_or(Error::Overflow("first-coordinate table"))?;
        self.lo.push(lo);
        self.weight.push(weight);
        self.ends.push(mass);
        Ok(())
    }

    fn total(&self) -> u128 {
        self.ends.last().copied().unwrap_or(0)
    }

    /// `(v, residual, weight)` for `u < total`.
    fn locate(&self, u: u128) -> (u128, u128, u128) {
        let k = self.ends.partition_point(|&e| e <= u);
        let start = if k == 0 { 0 } else { self.ends[k - 1] };
        let off = u - start;
        let w = self.weight[k];
        (self.lo[k] + off / w, off % w, w)
    }
}

#[derive(Debug)]
pub struct Sampler {
    cfg: SamplerConfig,
    counter: Counter,
    total: u128,
    first: FirstTable,
}

impl Sampler {
    pub fn new(cfg: SamplerConfig) -> Result<Self> {
        Self::with_options(cfg, CountOptions::default())
    }

    pub fn with_options(cfg: SamplerConfig, opts: CountOptions) -> Result<Self> {
        cfg.region.require_nonempty()?;
        let counter = Counter::new(CountOptions {
            parallel: false,
            ..opts
        });
        let (ell, r, n) = (cfg.region.order(), cfg.region.dims(), cfg.region.n as u128);
        let mut first = FirstTable::default();
        if cfg.method == Method::ConditionalCount && ell > 1 && r > 1 {
            if ell == r {
                let mut pc = ProductCounter::new();
                for (lo, hi, q) in QuotientBlocks::new(n) {
                    first.push(lo, hi, pc.count(r - 1, q)?)?;
                }
            } else {
                let empty = PrefixCoefficients::empty(ell);
                let vmax = next_coord_bound(&empty, r, n)?;
                if vmax > MAX_TABLE_LEN {
                    return Err(Error::BudgetExceeded {
                        budget: MAX_TABLE_LEN as u64,
                    });
                }
                let inner = |v: u128| -> Result<u128> {
                    Ok(counter
                        .count_completions(&empty.with(v)?, r - 1, n, None)?
                        .value())
                };
                let weights: Vec<u128> = if opts.parallel {
                    (1..=vmax)
                        .into_par_iter()
                        .map(inner)
                        .collect::<Result<_>>()?
                } else {
                    (1..=vmax).map(inner).collect::<Result<_>>()?
                };
                for (i, w) in weights.into_iter().enumerate() {
                    let v = i as u128 + 1;
                    first.push(v, v, w)?;
                }
            }
        }
        let total = if first.ends.is_empty() {
            counter.count(&cfg.region)?.value()
        } else {
            first.total()
        };
        Ok(Self {
            cfg,
            counter,
            total,
            first,
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    /// `|H_{l,r}(n)|`.
    pub fn total(&self) -> u128 {
        self.total
    }

    /// One exactly uniform point.
    pub fn sample(&self, rng: &mut Stream) -> Result<LatticePoint> {
        let p = match self.cfg.method {
            Method::ConditionalCount => {
                self.decode(self.total, |bound, _| rng::below(rng, bound))?
            }
            Method::Rejection => self.reject(rng),
        };
        debug_assert!(
            self.contains(&p),
            "sampled point {p:?} outside {}",
            self.cfg.region
        );
        Ok(p)
    }

    /// The point of rank `rank` in the decoding order (lexicographic).
    pub fn unrank(&self, rank: u128) -> Result<LatticePoint> {
        if rank >= self.total {
            return Err(Error::domain(format!(
                "rank {rank} out of range 0..{}",
                self.total
            )));
        }
        self.decode(rank, |_, residual| residual)
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        let h = &self.cfg.region;
        p.coords.len() == h.dims()
            && p.coords.iter().all(|&x| x >= 1)
            && PrefixCoefficients::from_prefix(h.order(), &p.coords)
                .is_ok_and(|pc| pc.coeffs()[h.order()] <= h.n as u128)
    }

    /// `next(bound, residual)` yields the offset within the current level:
    /// a fresh uniform draw below `bound`, or the carried residual.
    fn decode(
        &self,
        first_arg: u128,
        mut next: impl FnMut(u128, u128) -> u128,
    ) -> Result<LatticePoint> {
        let h = &self.cfg.region;
        let (ell, r, n) = (h.order(), h.dims(), h.n as u128);
        let mut coords = Vec::with_capacity(r);
        let mut pc = PrefixCoefficients::empty(ell);
        let mut bound = self.total;
        let mut residual = first_arg;
        for k in 0..r {
            let d = r - k;
            let u = next(bound, residual);
            let (v, rest, w) = if d == 1 {
                (u + 1, 0, 1)
            } else if k == 0 && !self.first.ends.is_empty() {
                self.first.locate(u)
            } else if ell == 1 {
                locate_simplex(n - pc.coeffs()[1], d, u)?
            } else if ell == r {
                locate_product(n / pc.coeffs()[k], d, u)?
            } else {
                self.locate_scan(&pc, d, n, u)?
            };
            coords.push(v);
            pc.push(v)?;
            bound = w;
            residual = rest;
        }
        Ok(LatticePoint::new(coords))
    }

    fn locate_scan(
        &self,
        pc: &PrefixCoefficients,
        d: usize,
        n: u128,
        u: u128,
    ) -> Result<(u128, u128, u128)> {
        let vmax = next_coord_bound(pc, d, n)?;
        if d == 2 {
            return locate_pair(pc, vmax, n, u);
        }
        let mut acc = 0u128;
        for v in 1..=vmax {
            let next = pc.with(v)?;
            let w = self
                .counter
                .count_completions(&next, d - 1, n, None)?
                .value();
            if u < acc + w {
                return Ok((v, u - acc, w));
            }
            acc += w;
        }
        Err(Error::domain("rank exceeds the completion count"))
    }

    fn reject(&self, rng: &mut Stream) -> LatticePoint {
        let h = &self.cfg.region;
        let (r, n) = (h.dims() as u128, h.n as u128);
        let side = n - r + 1;
        loop {
            let coords: Vec<u128> = (0..r).map(|_| rng::below(rng, side) + 1).collect();
            if coords.iter().sum::<u128>() <= n {
                return LatticePoint::new(coords);
            }
        }
    }

    /// `m` draws; chunk `c` of [`CHUNK`] draws uses stream `c` of the seed, so
    /// the output does not depend on the number of worker threads.
    pub fn sample_batch(&self, m: usize) -> Result<Vec<LatticePoint>> {
        let chunks = m.div_ceil(CHUNK);
        let parts: Vec<Vec<LatticePoint>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK.min(m - c * CHUNK);
                let mut s = rng::stream(self.cfg.seed, c as u64);
                (0..len)
                    .map(|_| self.sample(&mut s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(parts.into_iter().flatten().collect())
    }
}

/// Two coordinates left, `1 < l`: with the prefix fixed, `e_l = A(v) + x B(v)`
/// where `A(v) = A0 + A1 v` and `B(v) = B0 + B1 v`, so value `v` carries
/// `w(v) = floor((n - A(v)) / B(v))` completions. `w` is nonincreasing and
/// `w(v') >= q` iff `v' <= (n - A0 - q B0) / (A1 + q B1)`, so the scan walks
/// blocks of equal weight.
fn locate_pair(
    pc: &PrefixCoefficients,
    vmax: u128,
    n: u128,
    u: u128,
) -> Result<(u128, u128, u128)> {
    // the last coordinate has no later ones: e_0 = 1, e_k = 0
    let mut last = vec![0u128; pc.ell() + 1];
    last[0] = 1;
    let parts = |v: u128| linear_parts(pc.with(v)?.coeffs(), &last);
    let (a1v, b1v) = parts(1)?;
    let (a2v, b2v) = parts(2)?;
    let (a1, b1) = (a2v - a1v, b2v - b1v);
    let (a0, b0) = (a1v - a1, b1v - b1);
    if a1 == 0 {
        return Err(Error::domain(
            "pair decoding needs a coordinate-dependent constraint",
        ));
    }
    let c = n
        .checked_sub(a0)
        .ok_or_else(|| Error::domain("rank exceeds the completion count"))?;
    let mut acc = 0u128;
    let mut v = 1u128;
    while v <= vmax {
        let q = (c - a1 * v) / (b0 + b1 * v);
        let end = ((c - q * b0) / (a1 + q * b1)).min(vmax);
        let mass = (end - v + 1) * q;
        if u < acc + mass {
            let off = u - acc;
            return Ok((v + off / q, off % q, q));
        }
        acc += mass;
        v = end + 1;
    }
    Err(Error::domain("rank exceeds the completion count"))
}

/// One-shot batch.
pub fn sample_batch(cfg: &SamplerConfig, m: usize) -> Result<Vec<LatticePoint>> {
    Sampler::new(*cfg)?.sample_batch(m)
}

/// `l = 1`: with `m` left of the budget and `d` coordinates to place, value
/// `v` carries `C(m - v, d - 1)` completions, and the first `v` values carry
/// `C(m, d) - C(m - v, d)`.
fn locate_simplex(m: u128, d: usize, u: u128) -> Result<(u128, u128, u128)> {
    let d = d as u128;
    let all = binomial(m, d)?;
    let cum = |v: u128| -> Result<u128> { Ok(all - binomial(m - v, d)?) };
    let (mut lo, mut hi) = (1u128, m - d + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cum(mid)? > u {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok((lo, u - cum(lo - 1)?, binomial(m - lo, d - 1)?))
}

/// `l = r`: with product budget `m`, value `v` carries `W_{d-1}(m / v)`
/// completions, constant on quotient blocks.
fn locate_product(m: u128, d: usize, u: u128) -> Result<(u128, u128, u128)> {
    let mut pc = ProductCounter::new();
    let mut acc = 0u128;
    for (lo, hi, q) in QuotientBlocks::new(m) {
        let w = pc.count(d - 1, q)?;
        let mass = (hi - lo + 1) * w;
        if u < acc + mass {
            let off = u - acc;
            return Ok((lo + off / w, off % w, w));
        }
        acc += mass;
    }
    Err(Error::domain("rank exceeds the completion count"))
}

/// Side-file metadata for a sample dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetadata {
    pub region: RegionSpec,
    pub seed: u64,
    pub method: Method,
    pub rng: String,
    pub draws: usize,
}

impl SampleMetadata {
    pub fn new(cfg: &SamplerConfig, draws: usize) -> Self {
        Self {
            region: cfg.region,
            seed: cfg.seed,
            method: cfg.method,
            rng: RNG_ALGORITHM.to_string(),
            draws,
        }
    }
}

/// Path of the JSON side file for a CSV dump.
pub fn metadata_path(csv: &Path) -> std::path::PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta.json");
    name.into()
}

/// Writes `i1,...,ir` CSV plus the JSON side file.
pub fn write_dump(path: &Path, points: &[LatticePoint], meta: &SampleMetadata) -> Result<()> {
    let r = meta.region.dims();
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record((1..=r).map(|k| format!("i{k}")))
        .map_err(csv_err)?;
    for p in points {
        w.write_record(p.coords.iter().map(u128::to_string))
            .map_err(csv_err)?;
    }
    w.flush()?;
    let mut f = fs::File::create(metadata_path(path))?;
    serde_json::to_writer_pretty(&mut f, meta)?;
    writeln!(f)?;
    Ok(())
}

pub fn read_dump(path: &Path) -> Result<Vec<LatticePoint>> {
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let width = rd.headers().map_err(csv_err)?.len();
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != width {
            return Err(Error::domain("ragged sample dump"));
        }
        let coords = rec
            .iter()
            .map(|f| {
                f.parse::<u128>()
                    .map_err(|_| Error::domain(format!("bad coordinate {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(LatticePoint::new(coords));
    }
    Ok(out)
}

pub fn read_metadata(csv_path: &Path) -> Result<SampleMetadata> {
    Ok(serde_json::from_str(&fs::read_to_string(metadata_path(
        csv_path,
    ))?)?)
}

fn csv_err(e: csv::Error) -> Error {
    Error::domain(format!("csv: {e}"))
}
