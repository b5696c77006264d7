//! Exact thresholds of the form `floor(x * m^{1/l})` for rational or
//! floating `x`, computed as the largest `B` with `B^l <= x^l * m`.

use num_bigint::BigUint;

use crate::counting::Rational;
use crate::error::{Error, Result};

/// Exact value of a finite nonnegative `f64` as `num / den`, `den` a power of two.
pub fn f64_as_ratio(x: f64) -> Result<(BigUint, BigUint)> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "expected a finite nonnegative number, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok((BigUint::from(0u8), BigUint::from(1u8)));
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let mant = BigUint::from(mant);
    if exp >= 0 {
        Ok((mant << exp as usize, BigUint::from(1u8)))
    } else {
        Ok((mant, BigUint::from(1u8) << (-exp) as usize))
    }
}

/// Largest `B` with `B^l * den^l <= num^l * m`.
pub fn floor_scaled_root(num: &BigUint, den: &BigUint, ell: u32, m: &BigUint) -> Result<u128> {
    if ell == 0 {
        return Err(Error::domain("root order must be positive"));
    }
    let target = num.pow(ell) * m / den.pow(ell);
    let b = target.nth_root(ell);
    u128::try_from(b).map_err(|_| Error::Overflow("scaled root"))
}

/// `floor(x * n^{r/l})` for rational `x`.
pub fn product_cap(x: &Rational, ell: u32, r: u32, n: u64) -> Result<u128> {
    let m = BigUint::from(n).pow(r);
    floor_scaled_root(&BigUint::from(x.num()), &BigUint::from(x.den()), ell, &m)
}

/// `floor(x * n^{r/l})` for floating `x`, using its exact binary value.
pub fn product_cap_f64(x: f64, ell: u32, r: u32, n: u64) -> Result<u128> {
    let (num, den) = f64_as_ratio(x)?;
    floor_scaled_root(&num, &den, ell, &BigUint::from(n).pow(r))
}

/// `floor(alpha * n^{1/l})` for floating `alpha`.
pub fn coordinate_cap_f64(alpha: f64, ell: u32, n: u64) -> Result<u128> {
    product_cap_f64(alpha, ell, 1, n)
}
