//! Riemann zeta on the real axis `s > 1`.
//!
//! `zeta(s) = sum_{k<K} k^-s + K^{1-s}/(s-1) + K^-s/2 + sum_j B_{2j}/(2j)! (s)_{2j-1} K^{-s-2j+1} + R`.
//! For `x^-s` all derivatives have alternating constant signs, so the
//! remainder is bounded by the first omitted correction term.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// `B_2, B_4, ..., B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Corrections used; the next one serves as the remainder bound.
const TERMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    /// Rigorous bound on the truncation error plus a rounding allowance.
    pub error_bound: f64,
    pub terms: u64,
}

/// `(value, bound)` with `K - 1` explicit terms.
fn euler_maclaurin(s: f64, k: u64) -> (f64, f64) {
    let kf = k as f64;
    // small terms first
    let mut direct = 0.0;
    for i in (1..k).rev() {
        direct += (i as f64).powf(-s);
    }
    let mut sum = direct + kf.powf(1.0 - s) / (s - 1.0) + 0.5 * kf.powf(-s);
    // (s)_{2j-1} K^{-s-2j+1} / (2j)!, built incrementally
    let mut rising = s; // (s)_1
    let mut fact = 2.0; // 2!
    let mut kpow = kf.powf(-s - 1.0);
    let mut omitted = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate().take(TERMS + 1) {
        let term = b / fact * rising * kpow;
        if j == TERMS {
            omitted = term.abs();
            break;
        }
        sum += term;
        let m = 2.0 * j as f64 + 1.0; // advance (s)_{2j-1} to (s)_{2j+1}
        rising *= (s + m) * (s + m + 1.0);
        fact *= (m + 2.0) * (m + 3.0);
        kpow /= kf * kf;
    }
    let rounding = (k as f64 + 10.0) * f64::EPSILON * sum.abs();
    (sum, omitted + rounding)
}

/// `zeta(s)` within absolute error `eps`.
pub fn zeta_bounded(s: f64, eps: f64) -> Result<ZetaValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::domain(format!("zeta needs s > 1, got {s}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("zeta tolerance must be positive"));
    }
    let mut k = 8u64;
    loop {
        let (value, bound) = euler_maclaurin(s, k);
        if bound <= eps || k >= 1 << 22 {
            if bound > eps {
                return Err(Error::domain(format!(
                    "zeta({s}) cannot reach tolerance {eps}; best bound {bound}"
                )));
            }
            return Ok(ZetaValue {
                value,
                error_bound: bound,
                terms: k,
            });
        }
        k *= 2;
    }
}

pub fn zeta(s: f64, eps: f64) -> Result<f64> {
    Ok(zeta_bounded(s, eps)?.value)
}

/// `zeta(r)` for integers `r >= 2` at tolerance `1e-13`, memoized.
pub fn zeta_int(r: u32) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().expect("zeta cache").get(&r) {
        return Ok(v);
    }
    let v = zeta(r as f64, 1e-13)?;
    cache.lock().expect("zeta cache").insert(r, v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        let z2 = zeta_bounded(2.0, 1e-12).unwrap();
        assert!((z2.value - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta(4.0, 1e-12).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
        assert!((zeta_int(6).unwrap() - PI.powi(6) / 945.0).abs() < 1e-13);
    }

    /// Plain partial sum bracketed by integral tail bounds.
    fn bracket(s: f64, k: u64) -> (f64, f64) {
        let head: f64 = (1..=k).rev().map(|i| (i as f64).powf(-s)).sum();
        let lo = head + ((k + 1) as f64).powf(1.0 - s) / (s - 1.0);
        let hi = head + (k as f64).powf(1.0 - s) / (s - 1.0);
        (lo, hi)
    }

    #[test]
    fn agrees_with_integral_brackets() {
        for s in [1.3, 1.5, 2.5, 3.0] {
            let z = zeta(s, 1e-10).unwrap();
            for k in [10_000u64, 1_000_000] {
                let (lo, hi) = bracket(s, k);
                assert!(lo - 1e-9 <= z && z <= hi + 1e-9, "s={s} k={k}");
            }
        }
        assert!((zeta(3.0, 1e-12).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-12);
    }

    #[test]
    fn known_values() {
        // mpmath: zeta(1.5), zeta(1.3)
        assert!((zeta(1.5, 1e-12).unwrap() - 2.612_375_348_685_488).abs() < 1e-11);
        assert!((zeta(1.3, 1e-10).unwrap() - 3.931_949_211_809_544).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(zeta(1.0, 1e-6).is_err());
        assert!(zeta(0.5, 1e-6).is_err());
        assert!(zeta(f64::NAN, 1e-6).is_err());
        assert!(zeta(2.0, 0.0).is_err());
    }
}
