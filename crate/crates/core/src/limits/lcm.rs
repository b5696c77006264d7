//! The LCM ratio limit `L_r = prod_p p^{max_k G_k(p) - sum_k G_k(p)}`, where
//! the `G_k(p)` are independent with `P{G = j} = (1 - 1/p) p^{-j}`.
//!
//! Moments are computed as a truncated Euler product with a rigorous bracket:
//! each factor `F_p(beta) = E[p^{beta (max - sum)}]` is summed over exponent
//! vectors with entries `<= J_p`. The integrand lies in `(0, 1]`, so the
//! omitted mass `<= r p^{-(J_p + 1)}` bounds the truncation from above. For
//! `p > P` the integrand equals 1 unless two exponents are positive, so
//! `F_p >= 1 - C(r,2) p^{-2}` and the tail product lies in `[1 - C(r,2)/P, 1]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::sieve_primes;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Truncation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitModel {
    pub prime_cutoff: u64,
    pub exponent_cap: u32,
    pub tolerance: f64,
}

impl Default for LimitModel {
    fn default() -> Self {
        Self {
            prime_cutoff: 100_000,
            exponent_cap: 40,
            tolerance: 1e-6,
        }
    }
}

impl LimitModel {
    pub fn new(prime_cutoff: u64, exponent_cap: u32, tolerance: f64) -> Result<Self> {
        let m = Self {
            prime_cutoff,
            exponent_cap,
            tolerance,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.prime_cutoff < 2 || self.exponent_cap < 1 || !(self.tolerance > 0.0) {
            return Err(Error::domain(
                "limit model needs P >= 2, J >= 1 and tolerance > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Enumeration size allowed per prime before the exponent cap is lowered.
const MAX_VECTORS: f64 = 4.0e6;

/// `(S_p, omitted mass)` for one prime.
fn prime_factor(p: u64, r: usize, beta: f64, cap: u32, target: f64) -> (f64, f64) {
    let pf = p as f64;
    let rf = r as f64;
    // smallest J with r p^{-(J+1)} <= target, within the cap and the size limit
    let mut j = 1u32;
    while j < cap
        && rf * pf.powi(-(j as i32 + 1)) > target
        && ((j + 2) as f64).powi(r as i32) <= MAX_VECTORS
    {
        j += 1;
    }
    let tail = (rf * pf.powi(-(j as i32 + 1))).min(1.0);
    let top = r * j as usize;
    let inv: Vec<f64> = (0..=top).map(|k| pf.powi(-(k as i32))).collect();
    let damp: Vec<f64> = (0..=top).map(|k| pf.powf(-beta * k as f64)).collect();
    let norm = (1.0 - 1.0 / pf).powi(r as i32);
    let mut sum = 0.0;
    enumerate(r, j, 0, 0, &mut |total, max| {
        sum += inv[total] * damp[total - max];
    });
    (norm * sum, tail)
}

fn enumerate(left: usize, cap: u32, total: usize, max: usize, f: &mut impl FnMut(usize, usize)) {
    if left == 0 {
        f(total, max);
        return;
    }
    for g in 0..=cap as usize {
        enumerate(left - 1, cap, total + g, max.max(g), f);
    }
}

/// `E[L_r^beta]` with a rigorous bracket.
pub fn lcm_ratio_moment(r: u32, beta: f64, model: &LimitModel) -> Result<MomentEstimate> {
    model.validate()?;
    if r < 2 {
        return Err(Error::domain("the lcm ratio needs r >= 2"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain("moment order must be positive"));
    }
    let primes = sieve_primes(model.prime_cutoff);
    let per_prime = (model.tolerance / 4.0) / primes.len().max(1) as f64;
    let factors: Vec<(f64, f64)> = primes
        .par_iter()
        .map(|&p| prime_factor(p, r as usize, beta, model.exponent_cap, per_prime))
        .collect();
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    for &(s, t) in &factors {
        lo *= s;
        hi *= (s + t).min(1.0);
    }
    let pairs = (r as f64) * (r as f64 - 1.0) / 2.0;
    lo *= (1.0 - pairs / model.prime_cutoff as f64).max(0.0);
    let slack = 4.0 * f64::EPSILON * primes.len() as f64;
    let (lower, upper) = (lo * (1.0 - slack), hi * (1.0 + slack));
    Ok(MomentEstimate {
        value: 0.5 * (lower + upper),
        error_bound: 0.5 * (upper - lower),
        lower,
        upper,
    })
}

/// One draw of `L_r` with primes `<= P`, returned as the integer `1 / L_r`.
pub fn sample_lcm_ratio_denominator(r: u32, primes: &[u64], stream: &mut Stream) -> Result<u128> {
    if r < 2 {
        return Err(Error::domain("the lcm ratio needs r >= 2"));
    }
    let mut den = 1u128;
    for &p in primes {
        let inv = 1.0 / p as f64;
        let ln_p = (p as f64).ln();
        let (mut sum, mut max) = (0u32, 0u32);
        for _ in 0..r {
            let u = rng::open_unit(stream);
            // P{G >= j} = p^{-j}; skip the logarithm when G = 0
            let g = if u > inv {
                0
            } else {
                (-u.ln() / ln_p).floor() as u32
            };
            sum += g;
            max = max.max(g);
        }
        if sum > max {
            let f = (p as u128)
                .checked_pow(sum - max)
                .ok_or(Error::Overflow("lcm ratio denominator"))?;
            den = den
                .checked_mul(f)
                .ok_or(Error::Overflow("lcm ratio denominator"))?;
        }
    }
    Ok(den)
}

/// `L_r` as a real in `(0, 1]`.
pub fn sample_lcm_ratio_limit(r: u32, model: &LimitModel, stream: &mut Stream) -> Result<f64> {
    model.validate()?;
    let primes = sieve_primes(model.prime_cutoff);
    Ok(1.0 / sample_lcm_ratio_denominator(r, &primes, stream)? as f64)
}
