//! Exact elementary symmetric polynomials and the feasibility geometry used
//! by the enumerators.
//!
//! Everything here is exact `u128` arithmetic with checked operations; a value
//! that does not fit is reported as [`Error::Overflow`] instead of wrapping.

use crate::error::{Error, Result};

/// Arguments of `e_ell(coords)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPolyQuery {
    ell: usize,
    coords: Vec<u128>,
}

impl SymPolyQuery {
    pub fn new(ell: usize, coords: Vec<u128>) -> Result<Self> {
        if ell == 0 || ell > coords.len() {
            return Err(Error::domain(format!(
                "order {ell} must lie in 1..={}",
                coords.len()
            )));
        }
        if coords.contains(&0) {
            return Err(Error::domain("coordinates must be positive"));
        }
        Ok(Self { ell, coords })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn coords(&self) -> &[u128] {
        &self.coords
    }
}

/// `e_ell` of the query's coordinates.
pub fn eval_elem_sym(q: &SymPolyQuery) -> Result<u128> {
    let all = elementary_all(&q.coords, q.ell)?;
    Ok(all[q.ell])
}

/// `(e_0, ..., e_max_degree)` of `values`, built one coordinate at a time with
/// `e_j(x, y) = e_j(x) + y e_{j-1}(x)`.
pub fn elementary_all(values: &[u128], max_degree: usize) -> Result<Vec<u128>> {
    let mut e = vec![0u128; max_degree + 1];
    e[0] = 1;
    for &v in values {
        extend_in_place(&mut e, v)?;
    }
    Ok(e)
}

#[inline]
pub(crate) fn extend_in_place(e: &mut [u128], v: u128) -> Result<()> {
    for j in (1..e.len()).rev() {
        let add = e[j - 1]
            .checked_mul(v)
            .ok_or(Error::Overflow("elementary symmetric polynomial"))?;
        e[j] = e[j]
            .checked_add(add)
            .ok_or(Error::Overflow("elementary symmetric polynomial"))?;
    }
    Ok(())
}

/// Binomial coefficient with exact intermediate reduction.
pub fn binomial(n: u128, k: u128) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        let mut num = n - i;
        let mut den = i + 1;
        let g = gcd_u128(num, den);
        num /= g;
        den /= g;
        // den divides acc once the common factor with num is removed
        acc = (acc / den)
            .checked_mul(num)
            .ok_or(Error::Overflow("binomial coefficient"))?;
    }
    Ok(acc)
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `C(r, ell)`: the value of `e_ell` at the all-ones point, hence the smallest
/// `n` for which `H_{ell,r}(n)` is nonempty.
pub fn min_value(ell: u32, r: u32) -> Result<u128> {
    if ell == 0 || ell > r {
        return Err(Error::domain(format!(
            "need 1 <= l <= r, got l={ell}, r={r}"
        )));
    }
    binomial(r as u128, ell as u128)
}

/// Elementary symmetric values `c_j = e_j(prefix)` of the coordinates fixed so
/// far, for `j = 0..=ell`.
///
/// With a suffix `s`, `e_ell(prefix, s) = sum_j c_j e_{ell-j}(s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCoefficients {
    coeffs: Vec<u128>,
    fixed: usize,
}

impl PrefixCoefficients {
    /// Empty prefix: `c = (1, 0, ..., 0)`.
    pub fn empty(ell: usize) -> Self {
        let mut coeffs = vec![0u128; ell + 1];
        coeffs[0] = 1;
        Self { coeffs, fixed: 0 }
    }

    pub fn from_prefix(ell: usize, prefix: &[u128]) -> Result<Self> {
        let mut pc = Self::empty(ell);
        for &v in prefix {
            pc.push(v)?;
        }
        Ok(pc)
    }

    pub fn push(&mut self, v: u128) -> Result<()> {
        if v == 0 {
            return Err(Error::domain("coordinates must be positive"));
        }
        extend_in_place(&mut self.coeffs, v)?;
        self.fixed += 1;
        Ok(())
    }

    pub fn with(&self, v: u128) -> Result<Self> {
        let mut next = self.clone();
        next.push(v)?;
        Ok(next)
    }

    pub fn ell(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of coordinates already fixed.
    pub fn fixed(&self) -> usize {
        self.fixed
    }

    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }
}

/// Splits the constraint for the next coordinate `x` into `A + x B`, given the
/// elementary symmetric values `suffix_e[k] = e_k(later coordinates)` of the
/// coordinates after it (at their minimal values).
#[inline]
pub(crate) fn linear_parts(coeffs: &[u128], suffix_e: &[u128]) -> Result<(u128, u128)> {
    let ell = coeffs.len() - 1;
    let mut a: u128 = 0;
    let mut b: u128 = 0;
    for j in 0..=ell {
        let e = suffix_e[ell - j];
        if e == 0 {
            continue;
        }
        let t = coeffs[j]
            .checked_mul(e)
            .ok_or(Error::Overflow("constraint evaluation"))?;
        a = a
            .checked_add(t)
            .ok_or(Error::Overflow("constraint evaluation"))?;
        if j >= 1 {
            let t = coeffs[j - 1]
                .checked_mul(e)
                .ok_or(Error::Overflow("constraint evaluation"))?;
            b = b
                .checked_add(t)
                .ok_or(Error::Overflow("constraint evaluation"))?;
        }
    }
    Ok((a, b))
}

/// Largest value `v` for the next coordinate such that, with every later
/// coordinate set to 1, `sum_j c_j e_{ell-j}(v, 1, ..., 1) <= n` still holds.
/// `remaining_dims` counts the next coordinate itself. Returns 0 when no
/// `v >= 1` is feasible.
pub fn next_coord_bound(pc: &PrefixCoefficients, remaining_dims: usize, n: u128) -> Result<u128> {
    if remaining_dims == 0 {
        return Err(Error::domain("no coordinate left to bound"));
    }
    let ell = pc.ell();
    let suffix_e = (0..=ell)
        .map(|k| binomial((remaining_dims - 1) as u128, k as u128))
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = linear_parts(pc.coeffs(), &suffix_e)?;
    if b == 0 {
        return Err(Error::domain(
            "prefix plus remaining coordinates has fewer than l entries",
        ));
    }
    if a > n {
        return Ok(0);
    }
    Ok((n - a) / b)
}
