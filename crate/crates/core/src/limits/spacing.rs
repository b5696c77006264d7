//! Spacing laws: for `l = r`, `log V_k / log n` converges to the spacings
//! `J_k` of `r - 1` uniform order statistics (with `Z^(r) = 1`), and the
//! partial sums `log(V_1 ... V_k) / log n` converge to `Z^(k)`.

use crate::error::{Error, Result};
use crate::sympoly::binomial;

/// `P{J_k <= x} = 1 - (1 - x)^{r-1}`.
pub fn spacing_marginal_cdf(r: u32, x: f64) -> Result<f64> {
    if r < 1 || !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "spacing cdf needs r >= 1 and x in [0, 1], got r={r}, x={x}"
        )));
    }
    if r == 1 {
        // J_1 = Z^(1) = 1
        return Ok(if x >= 1.0 { 1.0 } else { 0.0 });
    }
    Ok(1.0 - (1.0 - x).powi(r as i32 - 1))
}

/// Density of `(J_1, ..., J_{r-1})`: `(r-1)!` on the open simplex.
pub fn spacing_joint_density(r: u32, point: &[f64]) -> Result<f64> {
    if r < 2 || point.len() != r as usize - 1 {
        return Err(Error::domain(
            "joint spacing density needs r >= 2 and r - 1 coordinates",
        ));
    }
    let inside = point.iter().all(|&x| x > 0.0) && point.iter().sum::<f64>() < 1.0;
    if !inside {
        return Err(Error::domain("point lies outside the open simplex"));
    }
    Ok((1..r).map(f64::from).product())
}

/// `P{Z^(k) <= x}` for the `k`-th of `r - 1` uniform order statistics;
/// `Z^(r) = 1`.
pub fn order_statistic_cdf(r: u32, k: u32, x: f64) -> Result<f64> {
    if k == 0 || k > r || !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "order statistic needs 1 <= k <= r and x in [0, 1], got k={k}, r={r}, x={x}"
        )));
    }
    if k == r {
        return Ok(if x >= 1.0 { 1.0 } else { 0.0 });
    }
    let m = r - 1;
    let mut acc = 0.0;
    for j in k..=m {
        let c = binomial(m as u128, j as u128)? as f64;
        acc += c * x.powi(j as i32) * (1.0 - x).powi((m - j) as i32);
    }
    Ok(acc.min(1.0))
}
