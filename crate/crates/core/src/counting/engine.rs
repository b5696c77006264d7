//! Depth-first enumeration of `{ i : sum_j c_j e_{ell-j}(T_1 i_1, ..., T_d i_d) <= N }`
//! with optional product cap and per-coordinate box.
//!
//! Coordinates are fixed left to right. For each prefix the next coordinate
//! ranges over `1..=v_max`, where `v_max` comes from the constraint evaluated
//! with every later coordinate at its minimum. The constraint is linear in
//! the next coordinate (`A + x B`), so the bound is a single division. The
//! last coordinate is never enumerated: its range is counted directly.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sympoly::{elementary_all, linear_parts};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

const FLUSH_EVERY: u64 = 1 << 14;

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    /// Coefficients of the already fixed prefix (`c_0..=c_ell`).
    start: Vec<u128>,
    /// Scale numerators of the free coordinates.
    weights: Vec<u128>,
    bound: u128,
    /// Bound on the product of the free (unscaled) coordinates.
    cap: Option<u128>,
    /// Per-coordinate upper bounds on the free (unscaled) coordinates.
    upper: Option<Vec<u128>>,
    /// `suffix_e[k][j] = e_j(weights[k+1..])`.
    suffix_e: Vec<Vec<u128>>,
}

impl Problem {
    pub(crate) fn new(
        start: Vec<u128>,
        fixed: usize,
        weights: Vec<u128>,
        bound: u128,
        cap: Option<u128>,
        upper: Option<Vec<u128>>,
    ) -> Result<Self> {
        let ell = start.len() - 1;
        let d = weights.len();
        if fixed + d < ell {
            return Err(Error::domain(format!(
                "{fixed} fixed plus {d} free coordinates cannot carry order {ell}"
            )));
        }
        if weights.contains(&0) {
            return Err(Error::domain("scale factors must be positive"));
        }
        if let Some(u) = &upper {
            if u.len() != d {
                return Err(Error::domain("box has wrong dimension"));
            }
        }
        let suffix_e = (0..d)
            .map(|k| elementary_all(&weights[k + 1..], ell))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            start,
            weights,
            bound,
            cap,
            upper,
            suffix_e,
        })
    }

    pub(crate) fn dims(&self) -> usize {
        self.weights.len()
    }

    fn ell(&self) -> usize {
        self.start.len() - 1
    }

    fn symmetric(&self) -> bool {
        self.upper.is_none() && self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Largest admissible value of free coordinate `k` given the prefix
    /// coefficients `c` and product `prod` of earlier free coordinates.
    #[inline]
    fn coord_max(&self, k: usize, c: &[u128], prod: u128) -> Result<u128> {
        let (a, b) = linear_parts(c, &self.suffix_e[k])?;
        if a > self.bound {
            return Ok(0);
        }
        let step = b
            .checked_mul(self.weights[k])
            .ok_or(Error::Overflow("coordinate bound"))?;
        let mut v = (self.bound - a) / step;
        if let Some(cap) = self.cap {
            v = v.min(cap / prod);
        }
        if let Some(upper) = &self.upper {
            v = v.min(upper[k]);
        }
        Ok(v)
    }

    /// Whether the fixed prefix alone satisfies the constraints (zero free
    /// coordinates).
    fn prefix_feasible(&self) -> bool {
        let ell = self.ell();
        self.start[ell] <= self.bound && self.cap.is_none_or(|c| c >= 1)
    }
}

#[inline]
fn extend(dst: &mut [u128], src: &[u128], x: u128) -> Result<()> {
    dst[0] = src[0];
    for j in 1..src.len() {
        let t = src[j - 1]
            .checked_mul(x)
            .ok_or(Error::Overflow("prefix coefficients"))?;
        dst[j] = src[j]
            .checked_add(t)
            .ok_or(Error::Overflow("prefix coefficients"))?;
    }
    Ok(())
}

pub(crate) struct Meter<'a> {
    shared: &'a AtomicU64,
    budget: u64,
    local: u64,
}

impl<'a> Meter<'a> {
    pub(crate) fn new(shared: &'a AtomicU64, budget: u64) -> Self {
        Self {
            shared,
            budget,
            local: 0,
        }
    }

    /// Charges `work` units, e.g. the children of a node about to be visited.
    #[inline]
    fn charge(&mut self, work: u128) -> Result<()> {
        self.local = self
            .local
            .saturating_add(u64::try_from(work).unwrap_or(u64::MAX));
        if self.local >= FLUSH_EVERY {
            self.flush()?;
        }
        Ok(())
    }

    fn exhausted(&self) -> Result<()> {
        if self.shared.load(Ordering::Relaxed) > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let total = self
            .shared
            .fetch_add(self.local, Ordering::Relaxed)
            .saturating_add(self.local);
        self.local = 0;
        if total > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }
}

impl Drop for Meter<'_> {
    fn drop(&mut self) {
        self.shared.fetch_add(self.local, Ordering::Relaxed);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    pub budget: u64,
    pub parallel: bool,
    /// Count weakly decreasing representatives weighted by orbit size.
    /// Only used when the constraint is symmetric.
    pub orbit: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_NODE_BUDGET,
            parallel: true,
            orbit: false,
        }
    }
}

struct Scratch {
    levels: Vec<u128>,
    width: usize,
}

impl Scratch {
    fn new(p: &Problem) -> Self {
        let width = p.ell() + 1;
        let mut levels = vec![0u128; width * (p.dims() + 1)];
        levels[..width].copy_from_slice(&p.start);
        Self { levels, width }
    }

    /// Writes level `k+1` from level `k` extended by `x`.
    #[inline]
    fn push(&mut self, k: usize, x: u128) -> Result<()> {
        let w = self.width;
        let (lo, hi) = self.levels.split_at_mut((k + 1) * w);
        extend(&mut hi[..w], &lo[k * w..], x)
    }

    #[inline]
    fn level(&self, k: usize) -> &[u128] {
        &self.levels[k * self.width..(k + 1) * self.width]
    }
}

pub(crate) fn count(p: &Problem, opts: &EngineOptions) -> Result<u128> {
    let d = p.dims();
    if d == 0 {
        return Ok(u128::from(p.prefix_feasible()));
    }
    let orbit = opts.orbit && p.symmetric() && d <= 33;
    let shared = AtomicU64::new(0);
    let first_max = p.coord_max(0, &p.start, 1)?;
    if d == 1 {
        return Ok(first_max);
    }

    let sub = |v: u128| -> Result<u128> {
        let mut meter = Meter::new(&shared, opts.budget);
        meter.exhausted()?;
        meter.charge(1)?;
        let mut s = Scratch::new(p);
        s.push(0, p.weights[0] * v)?;
        let c = if orbit {
            let fact = factorial(d);
            orbit_rec(p, &mut s, 1, v, v, 1, 1, fact, &mut meter)?
        } else {
            plain_rec(p, &mut s, 1, v, &mut meter)?
        };
        meter.flush()?;
        Ok(c)
    };

    let total = if opts.parallel {
        (1..=first_max).into_par_iter().map(sub).try_reduce(
            || 0u128,
            |a, b| a.checked_add(b).ok_or(Error::Overflow("count")),
        )?
    } else {
        let mut acc = 0u128;
        for v in 1..=first_max {
            acc = acc.checked_add(sub(v)?).ok_or(Error::Overflow("count"))?;
        }
        acc
    };
    let used = shared.load(Ordering::Relaxed);
    if used > opts.budget {
        return Err(Error::BudgetExceeded {
            budget: opts.budget,
        });
    }
    Ok(total)
}

fn plain_rec(
    p: &Problem,
    s: &mut Scratch,
    k: usize,
    prod: u128,
    meter: &mut Meter,
) -> Result<u128> {
    let vmax = p.coord_max(k, s.level(k), prod)?;
    if k + 1 == p.dims() {
        return Ok(vmax);
    }
    meter.charge(vmax)?;
    let mut total = 0u128;
    for v in 1..=vmax {
        s.push(k, p.weights[k] * v)?;
        let sub = plain_rec(p, s, k + 1, prod.saturating_mul(v), meter)?;
        total = total.checked_add(sub).ok_or(Error::Overflow("count"))?;
    }
    Ok(total)
}

fn factorial(d: usize) -> u128 {
    (1..=d as u128).product()
}

/// Counts weakly decreasing completions; `prev` is the previous coordinate,
/// `run` the length of its run of equal values and `denom` the product of
/// factorials of completed runs times `run!`.
#[allow(clippy::too_many_arguments)]
fn orbit_rec(
    p: &Problem,
    s: &mut Scratch,
    k: usize,
    prod: u128,
    prev: u128,
    run: u128,
    denom: u128,
    fact: u128,
    meter: &mut Meter,
) -> Result<u128> {
    let vmax = p.coord_max(k, s.level(k), prod)?.min(prev);
    if k + 1 == p.dims() {
        let below = vmax.min(prev - 1);
        let mut total = below
            .checked_mul(fact / denom)
            .ok_or(Error::Overflow("count"))?;
        if vmax == prev {
            total = total
                .checked_add(fact / (denom * (run + 1)))
                .ok_or(Error::Overflow("count"))?;
        }
        return Ok(total);
    }
    meter.charge(vmax)?;
    let mut total = 0u128;
    for v in 1..=vmax {
        s.push(k, p.weights[k] * v)?;
        let next_prod = prod.saturating_mul(v);
        let sub = if v == prev {
            orbit_rec(
                p,
                s,
                k + 1,
                next_prod,
                v,
                run + 1,
                denom * (run + 1),
                fact,
                meter,
            )?
        } else {
            orbit_rec(p, s, k + 1, next_prod, v, 1, denom, fact, meter)?
        };
        total = total.checked_add(sub).ok_or(Error::Overflow("count"))?;
    }
    Ok(total)
}

/// Visits every point of a problem as slabs: a prefix of the first `d-1`
/// free coordinates together with the largest admissible last coordinate
/// (the slab is `prefix x [1, last_max]`).
pub(crate) struct SlabWalker<'p> {
    p: &'p Problem,
    budget: u64,
}

impl<'p> SlabWalker<'p> {
    pub(crate) fn new(p: &'p Problem, budget: u64) -> Self {
        Self { p, budget }
    }

    pub(crate) fn first_max(&self) -> Result<u128> {
        self.p.coord_max(0, &self.p.start, 1)
    }

    /// Visits slabs whose first coordinate is `v1` (`d >= 2`), or the single
    /// slab with an empty prefix when `d == 1` (then `v1` is ignored).
    pub(crate) fn visit_group<F>(&self, v1: u128, shared: &AtomicU64, f: &mut F) -> Result<()>
    where
        F: FnMut(&[u128], u128),
    {
        let p = self.p;
        let d = p.dims();
        if d == 1 {
            let m = self.first_max()?;
            if m > 0 {
                f(&[], m);
            }
            return Ok(());
        }
        let mut meter = Meter::new(shared, self.budget);
        meter.exhausted()?;
        let mut s = Scratch::new(p);
        let mut prefix = vec![0u128; d - 1];
        prefix[0] = v1;
        s.push(0, p.weights[0] * v1)?;
        walk_rec(p, &mut s, 1, v1, &mut prefix, &mut meter, f)?;
        meter.flush()
    }

    /// Groups for deterministic parallel iteration: first-coordinate values, or
    /// a single group when there is only one free coordinate.
    pub(crate) fn groups(&self) -> Result<Vec<u128>> {
        if self.p.dims() == 1 {
            Ok(vec![0])
        } else {
            Ok((1..=self.first_max()?).collect())
        }
    }
}

fn walk_rec<F>(
    p: &Problem,
    s: &mut Scratch,
    k: usize,
    prod: u128,
    prefix: &mut Vec<u128>,
    meter: &mut Meter,
    f: &mut F,
) -> Result<()>
where
    F: FnMut(&[u128], u128),
{
    let vmax = p.coord_max(k, s.level(k), prod)?;
    if k + 1 == p.dims() {
        if vmax > 0 {
            f(prefix, vmax);
        }
        return Ok(());
    }
    meter.charge(vmax)?;
    for v in 1..=vmax {
        prefix[k] = v;
        s.push(k, p.weights[k] * v)?;
        walk_rec(p, s, k + 1, prod.saturating_mul(v), prefix, meter, f)?;
    }
    Ok(())
}
