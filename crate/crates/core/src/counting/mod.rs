//! Exact cardinalities of `H_{l,r}(n)` and of its scaled, divisibility
//! constrained, product-capped and boxed variants.
//!
//! `count` dispatches on the order: `l = 1` is a binomial coefficient, `l = r`
//! is the divisor-type recursion in [`product`], and everything else goes
//! through the pruned depth-first enumerator.

pub mod cache;
pub(crate) mod engine;
pub mod product;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::AtomicU64;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sympoly::{binomial, gcd_u128, min_value, PrefixCoefficients};

pub use cache::CountCache;
pub use engine::{EngineOptions as CountOptions, DEFAULT_NODE_BUDGET};
use engine::{Problem, SlabWalker};
pub use product::{count_product, divisor_summatory, ProductCounter};

/// The triple `(l, r, n)` naming `H_{l,r}(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionSpec {
    pub ell: u32,
    pub r: u32,
    pub n: u64,
}

impl RegionSpec {
    pub fn new(ell: u32, r: u32, n: u64) -> Result<Self> {
        if r == 0 || ell == 0 || ell > r {
            return Err(Error::domain(format!(
                "need r >= 1 and 1 <= l <= r, got l={ell}, r={r}"
            )));
        }
        Ok(Self { ell, r, n })
    }

    /// `C(r, l)`, the smallest `n` with a nonempty region.
    pub fn min_n(&self) -> u128 {
        min_value(self.ell, self.r).unwrap_or(u128::MAX)
    }

    pub fn is_nonempty(&self) -> bool {
        (self.n as u128) >= self.min_n()
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_nonempty() {
            Ok(())
        } else {
            Err(Error::EmptyRegion {
                ell: self.ell,
                r: self.r,
                n: self.n,
            })
        }
    }

    pub fn dims(&self) -> usize {
        self.r as usize
    }

    pub fn order(&self) -> usize {
        self.ell as usize
    }

    /// `n^{r/l}` in floating point.
    pub fn scale(&self) -> f64 {
        (self.n as f64).powf(self.r as f64 / self.ell as f64)
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{{{},{}}}({})", self.ell, self.r, self.n)
    }
}

/// Exact nonnegative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u128,
    den: u128,
}

impl Rational {
    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("zero denominator"));
        }
        let g = gcd_u128(num, den).max(1);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(v: u128) -> Self {
        Self { num: v, den: 1 }
    }

    pub fn num(&self) -> u128 {
        self.num
    }

    pub fn den(&self) -> u128 {
        self.den
    }

    pub fn floor(&self) -> u128 {
        self.num / self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a`, `a/b` and plain decimals such as `0.125`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("not a nonnegative rational: {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: u128 = a.trim().parse().map_err(|_| bad())?;
            let b: u128 = b.trim().parse().map_err(|_| bad())?;
            return Rational::new(a, b);
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 30 {
                return Err(bad());
            }
            let whole: u128 = if whole.is_empty() {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            let den = 10u128.pow(frac.len() as u32);
            let frac: u128 = frac.parse().map_err(|_| bad())?;
            let num = whole
                .checked_mul(den)
                .and_then(|w| w.checked_add(frac))
                .ok_or_else(bad)?;
            return Rational::new(num, den);
        }
        Ok(Rational::integer(s.parse().map_err(|_| bad())?))
    }
}

/// Positive per-coordinate scale factors `t_1, ..., t_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleVector(Vec<Rational>);

impl ScaleVector {
    pub fn new(t: Vec<Rational>) -> Result<Self> {
        if t.iter().any(|x| x.num == 0) {
            return Err(Error::domain("scale factors must be positive"));
        }
        Ok(Self(t))
    }

    pub fn from_integers(t: &[u64]) -> Result<Self> {
        Self::new(t.iter().map(|&x| Rational::integer(x as u128)).collect())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn product_f64(&self) -> f64 {
        self.0.iter().map(Rational::to_f64).product()
    }

    /// Common denominator `D` and integer numerators `T_k = t_k D`.
    fn cleared(&self) -> Result<(u128, Vec<u128>)> {
        let mut d = 1u128;
        for t in &self.0 {
            let g = gcd_u128(d, t.den);
            d = (d / g)
                .checked_mul(t.den)
                .ok_or(Error::Overflow("scale denominators"))?;
        }
        let weights = self
            .0
            .iter()
            .map(|t| {
                t.num
                    .checked_mul(d / t.den)
                    .ok_or(Error::Overflow("scale numerators"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((d, weights))
    }

    fn descriptor(&self) -> String {
        self.0
            .iter()
            .map(|t| format!("{}/{}", t.num, t.den))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Cap `B` on `i_1 ... i_r`, given as an exact rational. Since the product is an
/// integer only `floor(B)` matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductCap {
    pub bound: Rational,
}

impl ProductCap {
    pub fn new(bound: Rational) -> Self {
        Self { bound }
    }

    pub fn integer(b: u128) -> Self {
        Self {
            bound: Rational::integer(b),
        }
    }
}

/// Exact cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CountValue(pub u128);

impl CountValue {
    pub fn value(&self) -> u128 {
        self.0
    }

    pub fn as_f64(&self) -> f64 {
        self.0 as f64
    }
}

impl fmt::Display for CountValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Counting front end carrying engine options (node budget, parallelism,
/// orbit mode).
#[derive(Debug, Clone, Copy, Default)]
pub struct Counter {
    pub opts: CountOptions,
}

impl Counter {
    pub fn new(opts: CountOptions) -> Self {
        Self { opts }
    }

    pub fn with_budget(budget: u64) -> Self {
        Self {
            opts: CountOptions {
                budget,
                ..CountOptions::default()
            },
        }
    }

    /// `|H_{l,r}(n)|`.
    pub fn count(&self, region: &RegionSpec) -> Result<CountValue> {
        let (ell, r, n) = (region.order(), region.dims(), region.n as u128);
        let v = if ell == 1 {
            binomial(n, r as u128)?
        } else if ell == r {
            count_product(r, n)?
        } else {
            let p = Problem::new(unit_start(ell), 0, vec![1; r], n, None, None)?;
            engine::count(&p, &self.opts)?
        };
        Ok(CountValue(v))
    }

    /// `|{ i : e_l(t_1 i_1, ..., t_r i_r) <= n }|`.
    pub fn count_scaled(&self, region: &RegionSpec, t: &ScaleVector) -> Result<CountValue> {
        let (ell, r) = (region.order(), region.dims());
        if t.0.len() != r {
            return Err(Error::domain(format!(
                "scale vector has {} entries, region has {r} coordinates",
                t.0.len()
            )));
        }
        let (d, weights) = t.cleared()?;
        let bound = d
            .checked_pow(ell as u32)
            .and_then(|x| x.checked_mul(region.n as u128))
            .ok_or(Error::Overflow("scaled threshold"))?;
        let v = if ell == r {
            let prod = weights
                .iter()
                .try_fold(1u128, |acc, &w| acc.checked_mul(w))
                .ok_or(Error::Overflow("scale product"))?;
            count_product(r, bound / prod)?
        } else if ell == 1 && weights.windows(2).all(|w| w[0] == w[1]) {
            binomial(bound / weights[0], r as u128)?
        } else {
            let p = Problem::new(unit_start(ell), 0, weights, bound, None, None)?;
            engine::count(&p, &self.opts)?
        };
        Ok(CountValue(v))
    }

    /// `|{ i in H_{l,r}(n) : mu_k | i_k for all k }|`, via `i_k = mu_k j_k`.
    pub fn count_with_divisibility(&self, region: &RegionSpec, mu: &[u64]) -> Result<CountValue> {
        if mu.contains(&0) {
            return Err(Error::domain("divisors must be positive"));
        }
        self.count_scaled(region, &ScaleVector::from_integers(mu)?)
    }

    /// `|{ i in H_{l,r}(n) : i_1 ... i_r <= B }|`.
    pub fn count_constrained(&self, region: &RegionSpec, cap: &ProductCap) -> Result<CountValue> {
        let (ell, r, n) = (region.order(), region.dims(), region.n as u128);
        let b = cap.bound.floor();
        let v = if ell == r {
            count_product(r, n.min(b))?
        } else {
            let p = Problem::new(unit_start(ell), 0, vec![1; r], n, Some(b), None)?;
            engine::count(&p, &self.opts)?
        };
        Ok(CountValue(v))
    }

    /// `|{ i in H_{l,r}(n) : i_k <= upper_k for all k }|`.
    pub fn count_in_box(&self, region: &RegionSpec, upper: &[u128]) -> Result<CountValue> {
        let (ell, r, n) = (region.order(), region.dims(), region.n as u128);
        if upper.len() != r {
            return Err(Error::domain("box has wrong dimension"));
        }
        if upper.contains(&0) {
            return Ok(CountValue(0));
        }
        let p = Problem::new(
            unit_start(ell),
            0,
            vec![1; r],
            n,
            None,
            Some(upper.to_vec()),
        )?;
        Ok(CountValue(engine::count(&p, &self.opts)?))
    }

    /// Number of ways to complete a prefix with `remaining_dims` more
    /// coordinates so that `sum_j c_j e_{l-j}(suffix) <= n` and, if given, the
    /// product of the suffix is at most `cap_remainder`.
    pub fn count_completions(
        &self,
        pc: &PrefixCoefficients,
        remaining_dims: usize,
        n: u128,
        cap_remainder: Option<u128>,
    ) -> Result<CountValue> {
        let ell = pc.ell();
        let fixed = pc.fixed();
        let c = pc.coeffs();
        if fixed + remaining_dims < ell {
            return Err(Error::domain(
                "too few coordinates for the polynomial order",
            ));
        }
        if remaining_dims == 0 {
            let ok = c[ell] <= n && cap_remainder.is_none_or(|b| b >= 1);
            return Ok(CountValue(u128::from(ok)));
        }
        let v = if fixed + remaining_dims == ell {
            // only the term e_fixed(prefix) * prod(suffix) survives
            let lim = n / c[fixed];
            count_product(remaining_dims, cap_remainder.map_or(lim, |b| lim.min(b)))?
        } else if ell == 1 && cap_remainder.is_none() {
            if c[1] > n {
                0
            } else {
                binomial(n - c[1], remaining_dims as u128)?
            }
        } else {
            let p = Problem::new(
                c.to_vec(),
                fixed,
                vec![1; remaining_dims],
                n,
                cap_remainder,
                None,
            )?;
            engine::count(&p, &self.opts)?
        };
        Ok(CountValue(v))
    }

    /// Folds every point of the region, presented as slabs
    /// `prefix x [1, last_max]`, into one accumulator per first-coordinate
    /// value. Groups run in parallel when enabled; the accumulators come back
    /// in group order, so any reduction over them is deterministic.
    pub fn fold_slab_groups<T, I, F>(
        &self,
        region: &RegionSpec,
        cap: Option<u128>,
        init: I,
        fold: F,
    ) -> Result<Vec<T>>
    where
        T: Send,
        I: Fn() -> T + Sync,
        F: Fn(&mut T, &[u128], u128) + Sync,
    {
        let (ell, r, n) = (region.order(), region.dims(), region.n as u128);
        let p = Problem::new(unit_start(ell), 0, vec![1; r], n, cap, None)?;
        let walker = SlabWalker::new(&p, self.opts.budget);
        let groups = walker.groups()?;
        let shared = AtomicU64::new(0);
        let run = |g: &u128| -> Result<T> {
            let mut acc = init();
            walker.visit_group(*g, &shared, &mut |pre: &[u128], last: u128| {
                fold(&mut acc, pre, last)
            })?;
            Ok(acc)
        };
        if self.opts.parallel {
            groups.par_iter().map(run).collect()
        } else {
            groups.iter().map(run).collect()
        }
    }

    /// Calls `f` for every point of the region, sequentially and in
    /// lexicographic order.
    pub fn for_each_point(&self, region: &RegionSpec, mut f: impl FnMut(&[u128])) -> Result<()> {
        let (ell, r, n) = (region.order(), region.dims(), region.n as u128);
        let p = Problem::new(unit_start(ell), 0, vec![1; r], n, None, None)?;
        let walker = SlabWalker::new(&p, self.opts.budget);
        let shared = AtomicU64::new(0);
        let mut point = vec![0u128; r];
        for g in walker.groups()? {
            walker.visit_group(g, &shared, &mut |prefix: &[u128], last: u128| {
                point[..r - 1].copy_from_slice(prefix);
                for v in 1..=last {
                    point[r - 1] = v;
                    f(&point);
                }
            })?;
        }
        Ok(())
    }
}

fn unit_start(ell: usize) -> Vec<u128> {
    let mut c = vec![0u128; ell + 1];
    c[0] = 1;
    c
}

/// `|H_{l,r}(n)|` with default options.
pub fn count(region: &RegionSpec) -> Result<CountValue> {
    Counter::default().count(region)
}

pub fn count_scaled(region: &RegionSpec, t: &ScaleVector) -> Result<CountValue> {
    Counter::default().count_scaled(region, t)
}

pub fn count_with_divisibility(region: &RegionSpec, mu: &[u64]) -> Result<CountValue> {
    Counter::default().count_with_divisibility(region, mu)
}

pub fn count_constrained(region: &RegionSpec, cap: &ProductCap) -> Result<CountValue> {
    Counter::default().count_constrained(region, cap)
}

pub fn count_completions(
    pc: &PrefixCoefficients,
    remaining_dims: usize,
    n: u128,
    cap_remainder: Option<u128>,
) -> Result<CountValue> {
    Counter::default().count_completions(pc, remaining_dims, n, cap_remainder)
}

/// Cache key variant strings.
pub fn scaled_variant(t: &ScaleVector) -> String {
    format!("scaled={}", t.descriptor())
}

pub fn divisibility_variant(mu: &[u64]) -> String {
    let parts: Vec<String> = mu.iter().map(u64::to_string).collect();
    format!("div={}", parts.join(","))
}

pub fn cap_variant(cap: &ProductCap) -> String {
    format!("cap={}", cap.bound.floor())
}

/// Leading-order size of `H_{l,r}(n)`: `n^r / r!` for `l = 1`,
/// `n log^{r-1} n / (r-1)!` for `l = r`, and `V n^{r/l}` otherwise (the volume
/// estimate must then be supplied).
pub fn asymptotic_count(region: &RegionSpec, volume_estimate: Option<f64>) -> Result<f64> {
    let (ell, r) = (region.ell, region.r);
    let n = region.n as f64;
    if ell == 1 {
        let fact: f64 = (1..=r).map(f64::from).product();
        Ok(n.powi(r as i32) / fact)
    } else if ell == r {
        let fact: f64 = (1..r).map(f64::from).product();
        Ok(n * n.ln().powi(r as i32 - 1) / fact)
    } else {
        let v = volume_estimate.ok_or_else(|| {
            Error::domain(format!(
                "asymptotic count for 1 < l < r needs a volume estimate (l={ell}, r={r})"
            ))
        })?;
        Ok(v * region.scale())
    }
}

#[cfg(test)]
mod tests;
