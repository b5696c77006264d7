//! Laws of the normalized product `U = i_1 ... i_r / n^{r/l}` and the volumes
//! `V_{l,r} = lim |H_{l,r}(n)| / n^{r/l}`.
//!
//! For `l = r` the limit is uniform on `[0, 1]`, for `(l, r) = (1, 2)` it has
//! a closed form, and otherwise it is approximated by the exact law at a
//! finite reference `n`, which is the Riemann sum of the limiting integral.

use serde::{Deserialize, Serialize};

use crate::counting::{Counter, ProductCap, RegionSpec};
use crate::error::{Error, Result};
use crate::exact::product_cap_f64;
use crate::sympoly::binomial;

/// Reference thresholds used when the caller does not pick one.
pub fn default_reference_n(ell: u32, r: u32) -> u64 {
    match (ell, r) {
        (2, 3) => 100_000,
        (1, _) => 2_000,
        _ => 10_000,
    }
}

/// `C(r, l)^{-r/l}`, the right end of the support of `U_{l,r}`.
pub fn x_star(ell: u32, r: u32) -> Result<f64> {
    check(ell, r)?;
    let c = binomial(r as u128, ell as u128)? as f64;
    Ok(c.powf(-(r as f64) / ell as f64))
}

fn check(ell: u32, r: u32) -> Result<()> {
    if ell == 0 || ell > r {
        return Err(Error::domain(format!(
            "need 1 <= l <= r, got l={ell}, r={r}"
        )));
    }
    Ok(())
}

/// `P{U_{1,2} <= x} = 1 - s + 2x log((1 + s)/(1 - s))`, `s = sqrt(1 - 4x)`.
pub fn u12_cdf(x: f64) -> Result<f64> {
    if !(0.0..=0.25).contains(&x) {
        return Err(Error::domain(format!("U_(1,2) lives on [0, 1/4], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let s = (1.0 - 4.0 * x).max(0.0).sqrt();
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - s + 2.0 * x * ((1.0 + s) / (1.0 - s)).ln()).min(1.0))
}

/// Density `2 log((1 + s)/(1 - s))` on `(0, 1/4)`.
pub fn u12_density(x: f64) -> Result<f64> {
    if !(0.0..=0.25).contains(&x) {
        return Err(Error::domain(format!("U_(1,2) lives on [0, 1/4], got {x}")));
    }
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    let s = (1.0 - 4.0 * x).max(0.0).sqrt();
    Ok(2.0 * ((1.0 + s) / (1.0 - s)).ln())
}

/// `|{i in H_{l,r}(n) : prod i <= floor(x n^{r/l})}| / |H_{l,r}(n)|`.
pub fn u_cdf_lattice(ell: u32, r: u32, x: f64, n: u64) -> Result<f64> {
    let h = RegionSpec::new(ell, r, n)?;
    h.require_nonempty()?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "x must be finite and nonnegative, got {x}"
        )));
    }
    let counter = Counter::default();
    let total = counter.count(&h)?.value();
    let b = product_cap_f64(x, ell, r, n)?;
    let below = counter
        .count_constrained(&h, &ProductCap::integer(b))?
        .value();
    Ok(below as f64 / total as f64)
}

/// `P{U_{l,r} <= x}`: exact for `l = r` and for `(1, 2)`, lattice
/// approximation at `approximation_n` otherwise.
pub fn u_cdf(ell: u32, r: u32, x: f64, approximation_n: Option<u64>) -> Result<f64> {
    check(ell, r)?;
    let top = x_star(ell, r)?;
    if !(0.0..=top).contains(&x) {
        return Err(Error::domain(format!("x must lie in [0, {top}], got {x}")));
    }
    if ell == r {
        return Ok(x);
    }
    if (ell, r) == (1, 2) {
        return u12_cdf(x);
    }
    u_cdf_lattice(
        ell,
        r,
        x,
        approximation_n.unwrap_or_else(|| default_reference_n(ell, r)),
    )
}

/// Representation of the law of `U_{l,r}`.
#[derive(Debug, Clone)]
pub enum ProductLimitLaw {
    Uniform,
    U12,
    Lattice(LatticeProductLaw),
}

impl ProductLimitLaw {
    /// Exact law where known; the lattice law at `n` otherwise.
    pub fn new(ell: u32, r: u32, n: Option<u64>) -> Result<Self> {
        check(ell, r)?;
        Ok(if ell == r {
            ProductLimitLaw::Uniform
        } else if (ell, r) == (1, 2) {
            ProductLimitLaw::U12
        } else {
            let n = n.unwrap_or_else(|| default_reference_n(ell, r));
            ProductLimitLaw::Lattice(LatticeProductLaw::new(ell, r, n)?)
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ProductLimitLaw::Uniform => x.clamp(0.0, 1.0),
            ProductLimitLaw::U12 => u12_cdf(x.clamp(0.0, 0.25)).unwrap_or(1.0),
            ProductLimitLaw::Lattice(l) => l.cdf(x),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ProductLimitLaw::Uniform => "uniform on [0,1]".into(),
            ProductLimitLaw::U12 => "closed form for U_(1,2)".into(),
            ProductLimitLaw::Lattice(l) => {
                format!("exact law at n={} ({} points)", l.n, l.values.len())
            }
        }
    }
}

/// Sorted normalized products of every point of `H_{l,r}(n)`.
#[derive(Debug, Clone)]
pub struct LatticeProductLaw {
    pub ell: u32,
    pub r: u32,
    pub n: u64,
    values: Vec<f64>,
}

/// Largest region materialized by [`LatticeProductLaw`].
pub const MAX_LATTICE_POINTS: u128 = 20_000_000;

impl LatticeProductLaw {
    pub fn new(ell: u32, r: u32, n: u64) -> Result<Self> {
        let h = RegionSpec::new(ell, r, n)?;
        h.require_nonempty()?;
        let counter = Counter::default();
        let total = counter.count(&h)?.value();
        if total > MAX_LATTICE_POINTS {
            return Err(Error::domain(format!(
                "{h} has {total} points; the lattice law is limited to {MAX_LATTICE_POINTS}"
            )));
        }
        let scale = h.scale();
        let groups =
            counter.fold_slab_groups(&h, None, Vec::new, |acc: &mut Vec<f64>, pre, last| {
                let base: u128 = pre.iter().product();
                acc.extend((1..=last).map(|v| (base * v) as f64 / scale));
            })?;
        let mut values: Vec<f64> = groups.into_iter().flatten().collect();
        values.sort_by(f64::total_cmp);
        Ok(Self { ell, r, n, values })
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.values
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }
}

/// `E[U_{l,r}^beta]`: `1/(1+beta)` for `l = r`, otherwise the exact moment at
/// the reference `n`.
pub fn u_moment(ell: u32, r: u32, beta: f64, approximation_n: Option<u64>) -> Result<f64> {
    check(ell, r)?;
    if !(beta > 0.0) {
        return Err(Error::domain("moment order must be positive"));
    }
    if ell == r {
        return Ok(1.0 / (1.0 + beta));
    }
    let n = approximation_n.unwrap_or_else(|| default_reference_n(ell, r));
    let h = RegionSpec::new(ell, r, n)?;
    let counter = Counter::default();
    let total = counter.count(&h)?.value() as f64;
    let scale = h.scale();
    let parts = counter.fold_slab_groups(
        &h,
        None,
        || 0.0f64,
        |acc, pre, last| {
            let base = pre.iter().product::<u128>() as f64 / scale;
            let s: f64 = if beta == 1.0 {
                (last * (last + 1) / 2) as f64
            } else {
                (1..=last).map(|v| (v as f64).powf(beta)).sum()
            };
            *acc += base.powf(beta) * s;
        },
    )?;
    Ok(parts.into_iter().sum::<f64>() / total)
}

/// `V_{l,r}` estimated as `|H_{l,r}(n)| / n^{r/l}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub ell: u32,
    pub r: u32,
    pub value: f64,
    /// Set when `value` is a finite-`n` Riemann sum (a lower bound).
    pub lower_bound: bool,
    pub approximation_n: Option<u64>,
    pub count: Option<u128>,
}

pub fn volume(ell: u32, r: u32, approximation_n: u64) -> Result<VolumeEstimate> {
    volume_with(&Counter::default(), ell, r, approximation_n)
}

pub fn volume_with(
    counter: &Counter,
    ell: u32,
    r: u32,
    approximation_n: u64,
) -> Result<VolumeEstimate> {
    check(ell, r)?;
    if ell == r {
        return Err(Error::domain(format!("H_({r},{r})(1) has infinite volume")));
    }
    if ell == 1 {
        let fact: f64 = (1..=r).map(f64::from).product();
        return Ok(VolumeEstimate {
            ell,
            r,
            value: 1.0 / fact,
            lower_bound: false,
            approximation_n: None,
            count: None,
        });
    }
    let h = RegionSpec::new(ell, r, approximation_n)?;
    let c = counter.count(&h)?.value();
    Ok(VolumeEstimate {
        ell,
        r,
        value: c as f64 / h.scale(),
        lower_bound: true,
        approximation_n: Some(approximation_n),
        count: Some(c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert_eq!(x_star(3, 3).unwrap(), 1.0);
        assert!((x_star(2, 3).unwrap() - 0.192_450_089_729_875_25).abs() < 1e-15);
        assert_eq!(x_star(1, 2).unwrap(), 0.25);
        assert!(x_star(3, 2).is_err());
    }

    #[test]
    fn u12_values() {
        assert_eq!(u12_cdf(0.0).unwrap(), 0.0);
        assert_eq!(u12_cdf(0.25).unwrap(), 1.0);
        assert!((u12_cdf(0.125).unwrap() - 0.733_58).abs() < 5e-6);
        assert!(u12_cdf(0.3).is_err());
        let mut prev = 0.0;
        for k in 0..=1000 {
            let c = u12_cdf(0.25 * k as f64 / 1000.0).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    /// Integral of the density by the midpoint rule after `x = t^2`, which
    /// removes the logarithmic singularity at 0.
    fn density_integral(upper: f64) -> f64 {
        let steps = 200_000;
        let top = upper.sqrt();
        let h = top / steps as f64;
        (0..steps)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                2.0 * t * u12_density(t * t).unwrap() * h
            })
            .sum()
    }

    #[test]
    fn u12_density_integrates_to_cdf() {
        assert!((density_integral(0.25) - 1.0).abs() < 1e-6);
        assert!((density_integral(0.125) - u12_cdf(0.125).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn u_cdf_dispatch() {
        assert_eq!(u_cdf(2, 2, 0.3, None).unwrap(), 0.3);
        assert_eq!(u_cdf(1, 2, 0.25, None).unwrap(), 1.0);
        assert!(u_cdf(2, 2, 1.5, None).is_err());
        assert!(u_cdf(2, 3, 0.5, Some(1000)).is_err());
        let top = x_star(2, 3).unwrap();
        assert_eq!(u_cdf(2, 3, top, Some(2000)).unwrap(), 1.0);
        assert_eq!(u_cdf(2, 3, 0.0, Some(2000)).unwrap(), 0.0);
    }

    #[test]
    fn lattice_cdf_is_monotone_and_bounded() {
        let mut prev = 0.0;
        for k in 0..=40 {
            let x = 0.2 * k as f64 / 40.0;
            let c = u_cdf_lattice(2, 3, x, 3000).unwrap();
            assert!(c >= prev && c <= 1.0);
            prev = c;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn lattice_law_agrees_with_counts() {
        let law = LatticeProductLaw::new(2, 3, 2000).unwrap();
        for x in [0.01, 0.05, 0.1, 0.15] {
            let direct = u_cdf_lattice(2, 3, x, 2000).unwrap();
            assert!((law.cdf(x) - direct).abs() < 1e-12, "x={x}");
        }
        // the lattice law for (1,2) sits close to the closed form
        let l12 = LatticeProductLaw::new(1, 2, 4000).unwrap();
        for x in [0.05, 0.125, 0.2] {
            assert!((l12.cdf(x) - u12_cdf(x).unwrap()).abs() < 2e-3);
        }
    }

    #[test]
    fn moments() {
        assert_eq!(u_moment(2, 2, 1.0, None).unwrap(), 0.5);
        // E[U_(1,2)] = 2 * int int_{y1 + y2 <= 1} y1 y2 = 1/12
        let m = u_moment(1, 2, 1.0, Some(4000)).unwrap();
        assert!((m - 1.0 / 12.0).abs() < 1e-3, "{m}");
        let m2 = u_moment(1, 2, 2.0, Some(2000)).unwrap();
        // E[U^2] = 2 * 2! 2! / 6! = 1/90
        assert!((m2 - 1.0 / 90.0).abs() < 1e-3, "{m2}");
    }

    #[test]
    fn volumes() {
        assert_eq!(volume(1, 3, 10).unwrap().value, 1.0 / 6.0);
        assert_eq!(volume(1, 2, 10).unwrap().value, 0.5);
        assert!(volume(2, 2, 10).is_err());
        for r in 2..=4u32 {
            let v = volume(r - 1, r, 2000).unwrap();
            assert_eq!(v.lower_bound, r > 2);
            assert!(v.value <= ((r - 1) as f64).powi(r as i32 - 1), "r={r}");
        }
    }
}
