//! Goodness-of-fit statistics: one- and two-sample Kolmogorov-Smirnov,
//! Pearson chi-square, and standard-error bands.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Significance used by every gate.
pub const ALPHA: f64 = 1e-3;

/// `sup_x |F_m(x) - F(x)|` for a continuous reference `F`. Ties in the sample
/// are handled by the sorted-order formula.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    ks_sorted(&xs, cdf)
}

/// As [`ks_statistic`] for an already sorted sample.
pub fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let m = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    d
}

/// Two-sample statistic `sup_x |F_a(x) - F_b(x)|` over sorted inputs; exact
/// in the presence of ties within or across samples.
pub fn ks_two_sample_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Kolmogorov survival function `Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2)`.
pub fn kolmogorov_q(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a one-sample statistic `d` from `m` draws, with
/// Stephens' small-sample correction.
pub fn ks_p_value(d: f64, m: f64) -> f64 {
    let s = m.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * d)
}

/// Smallest `d` rejected at level `alpha` for `m` draws.
pub fn ks_critical(alpha: f64, m: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ks_p_value(mid, m) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_result(statistic: f64, dof: usize) -> Result<ChiSquareResult> {
    if dof == 0 {
        return Err(Error::domain("chi-square needs at least two bins"));
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::domain(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

/// Pearson goodness of fit against expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() {
        return Err(Error::domain("observed and expected differ in length"));
    }
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 0.0 {
            if o > 0 {
                return Err(Error::domain("observation in a bin with zero expectation"));
            }
            continue;
        }
        let diff = o as f64 - e;
        stat += diff * diff / e;
        bins += 1;
    }
    chi_result(stat, bins.saturating_sub(1))
}

/// Homogeneity of two histograms over the same bins.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.len() != b.len() {
        return Err(Error::domain("histograms differ in length"));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::domain("empty histogram"));
    }
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        let diff = ka * x as f64 - kb * y as f64;
        stat += diff * diff / (x + y) as f64;
        bins += 1;
    }
    chi_result(stat, bins.saturating_sub(1))
}

/// Sample mean and its standard error, summed in input order.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    #[test]
    fn ks_examples() {
        assert_eq!(ks_statistic(&[0.5; 10], |x| x), 0.5);
        let m = 200;
        let grid: Vec<f64> = (1..=m).map(|k| k as f64 / m as f64).collect();
        assert!(ks_statistic(&grid, |x| x) <= 1.0 / m as f64 + 1e-12);
        let mut s = rng::stream(3, 0);
        let u: Vec<f64> = (0..100_000).map(|_| s.random::<f64>()).collect();
        assert!(ks_statistic(&u, |x| x) < 0.01);
    }

    #[test]
    fn ks_brute_force() {
        // sup over a fine grid of |ECDF - F|, approached from both sides
        let xs = [0.1, 0.1, 0.35, 0.4, 0.4, 0.4, 0.9];
        let f = |x: f64| x * x;
        let ecdf = |t: f64| xs.iter().filter(|&&x| x <= t).count() as f64 / xs.len() as f64;
        let mut d: f64 = 0.0;
        for &x in &xs {
            d = d
                .max((ecdf(x) - f(x)).abs())
                .max((ecdf(x - 1e-12) - f(x)).abs());
        }
        assert!((ks_statistic(&xs, f) - d).abs() < 1e-9);
    }

    #[test]
    fn two_sample_with_ties() {
        let a = [1.0, 2.0, 2.0, 3.0];
        let b = [2.0, 2.0, 4.0, 5.0];
        // at x = 3: F_a = 1, F_b = 0.5
        assert!((ks_two_sample_sorted(&a, &b) - 0.5).abs() < 1e-12);
        assert_eq!(ks_two_sample_sorted(&a, &a), 0.0);
    }

    #[test]
    fn kolmogorov_distribution() {
        // Q(1.3581) = 0.05 and Q(1.9495) = 0.001 from standard tables
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_q(1.9495) - 0.001).abs() < 1e-5);
        let c = ks_critical(ALPHA, 1e6);
        assert!((c * 1e3 - 1.9495).abs() < 2e-3, "{c}");
    }

    #[test]
    fn chi_square_examples() {
        let res = chi_square(&[10, 10, 10, 10], &[10.0; 4]).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.dof, 3);
        assert!((res.p_value - 1.0).abs() < 1e-12);
        let res = chi_square(&[25, 5, 10, 0], &[10.0, 10.0, 10.0, 10.0]).unwrap();
        assert!((res.statistic - 35.0).abs() < 1e-12);
        assert!(res.p_value < 1e-6);
        assert!(chi_square(&[1, 1], &[0.0, 2.0]).is_err());
        let two = chi_square_two_sample(&[50, 50], &[100, 100]).unwrap();
        assert!(two.statistic.abs() < 1e-12);
    }

    #[test]
    fn chi_square_tail() {
        let dist = ChiSquared::new(3.0).unwrap();
        assert!((dist.sf(7.814728) - 0.05).abs() < 1e-6);
    }

    #[test]
    fn mean_and_standard_error() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }
}
