//! Limit law of the GCD of `r` coordinates: `P{U = m} = m^{-r} / zeta(r)`,
//! with Mellin transform `E[U^s] = zeta(r - s) / zeta(r)` for `s < r - 1`.

use crate::error::{Error, Result};
use crate::limits::zeta::{zeta, zeta_int};

fn check_r(r: u32) -> Result<()> {
    if r < 2 {
        return Err(Error::domain(format!(
            "the gcd limit law needs r >= 2, got {r}"
        )));
    }
    Ok(())
}

pub fn gcd_limit_pmf(r: u32, m: u64) -> Result<f64> {
    check_r(r)?;
    if m == 0 {
        return Err(Error::domain("gcd values are positive"));
    }
    Ok((m as f64).powi(-(r as i32)) / zeta_int(r)?)
}

pub fn gcd_limit_mellin(r: u32, s: f64) -> Result<f64> {
    check_r(r)?;
    if !(s < r as f64 - 1.0) {
        return Err(Error::domain(format!(
            "Mellin transform needs s < r - 1, got s={s}, r={r}"
        )));
    }
    Ok(zeta(r as f64 - s, 1e-12)? / zeta_int(r)?)
}

/// Bracket `[lo, hi]` for `sum_{m > big_m} m^{-a}`, `a > 1`, from the
/// integrals over `[M + 1, inf)` and `[M, inf)`.
pub fn power_tail(a: f64, big_m: u64) -> (f64, f64) {
    let m = big_m as f64;
    (
        (m + 1.0).powf(1.0 - a) / (a - 1.0),
        m.powf(1.0 - a) / (a - 1.0),
    )
}

/// `sum_{m <= M} m^s pmf(r, m)` together with a bracket `[lo, hi]` for the
/// full series, which equals the Mellin transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinPartial {
    pub partial: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn mellin_partial(r: u32, s: f64, big_m: u64) -> Result<MellinPartial> {
    check_r(r)?;
    let a = r as f64 - s;
    if !(a > 1.0) {
        return Err(Error::domain("partial Mellin sums need s < r - 1"));
    }
    let z = zeta_int(r)?;
    let partial = (1..=big_m).rev().map(|m| (m as f64).powf(-a)).sum::<f64>() / z;
    let (tl, th) = power_tail(a, big_m);
    Ok(MellinPartial {
        partial,
        lo: partial + tl / z,
        hi: partial + th / z,
    })
}

/// `sum_{m <= M} pmf(r, m)` and the upper bound `M^{1-r}/((r-1) zeta(r))` on
/// the omitted mass.
pub fn pmf_partial(r: u32, big_m: u64) -> Result<(f64, f64)> {
    let p = mellin_partial(r, 0.0, big_m)?;
    Ok((p.partial, p.hi - p.partial))
}
