//! `W_k(m) = #{ i in N^k : i_1 ... i_k <= m }` via
//! `W_k(m) = sum_i W_{k-1}(floor(m / i))`, summed over blocks of equal
//! quotient and memoized at the quotient values.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct ProductCounter {
    memo: Vec<HashMap<u128, u128>>,
}

impl ProductCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// `W_k(m)`.
    pub fn count(&mut self, k: usize, m: u128) -> Result<u128> {
        match k {
            _ if m == 0 => Ok(0),
            0 => Ok(1),
            1 => Ok(m),
            2 => divisor_summatory(m),
            _ => {
                if self.memo.len() <= k {
                    self.memo.resize_with(k + 1, HashMap::new);
                }
                if let Some(&v) = self.memo[k].get(&m) {
                    return Ok(v);
                }
                let mut total = 0u128;
                for (lo, hi, q) in QuotientBlocks::new(m) {
                    let inner = self.count(k - 1, q)?;
                    let t = (hi - lo + 1)
                        .checked_mul(inner)
                        .ok_or(Error::Overflow("product count"))?;
                    total = total
                        .checked_add(t)
                        .ok_or(Error::Overflow("product count"))?;
                }
                self.memo[k].insert(m, total);
                Ok(total)
            }
        }
    }
}

/// `W_k(m)` with a fresh memo.
pub fn count_product(k: usize, m: u128) -> Result<u128> {
    ProductCounter::new().count(k, m)
}

/// `sum_{i <= m} floor(m / i)` by the hyperbola identity.
pub fn divisor_summatory(m: u128) -> Result<u128> {
    if m == 0 {
        return Ok(0);
    }
    let s = isqrt(m);
    let mut acc = 0u128;
    if m <= u64::MAX as u128 {
        let m64 = m as u64;
        for i in 1..=s as u64 {
            acc += (m64 / i) as u128;
        }
    } else {
        for i in 1..=s {
            acc = acc
                .checked_add(m / i)
                .ok_or(Error::Overflow("divisor sum"))?;
        }
    }
    acc.checked_mul(2)
        .and_then(|x| x.checked_sub(s * s))
        .ok_or(Error::Overflow("divisor sum"))
}

pub fn isqrt(m: u128) -> u128 {
    if m < 2 {
        return m;
    }
    let mut x = (m as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > m) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= m) {
        x += 1;
    }
    x
}

/// Iterates maximal runs `[lo, hi]` of `i` in `1..=m` on which `floor(m / i)`
/// is constant, yielding `(lo, hi, quotient)`.
#[derive(Debug, Clone)]
pub struct QuotientBlocks {
    m: u128,
    next: u128,
}

impl QuotientBlocks {
    pub fn new(m: u128) -> Self {
        Self { m, next: 1 }
    }
}

impl Iterator for QuotientBlocks {
    type Item = (u128, u128, u128);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next > self.m {
            return None;
        }
        let lo = self.next;
        let q = self.m / lo;
        let hi = self.m / q;
        self.next = hi + 1;
        Some((lo, hi, q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Term-by-term recursion, no grouping and no memo.
    fn plain(k: usize, m: u128) -> u128 {
        match k {
            _ if m == 0 => 0,
            0 => 1,
            1 => m,
            _ => (1..=m).map(|i| plain(k - 1, m / i)).sum(),
        }
    }

    #[test]
    fn small_values() {
        assert_eq!(count_product(2, 4).unwrap(), 8);
        assert_eq!(count_product(2, 1).unwrap(), 1);
        assert_eq!(count_product(3, 1).unwrap(), 1);
        assert_eq!(count_product(0, 5).unwrap(), 1);
        assert_eq!(count_product(3, 0).unwrap(), 0);
    }

    #[test]
    fn grouped_matches_plain() {
        let mut pc = ProductCounter::new();
        for m in [1u128, 2, 3, 10, 97, 360, 1000, 2047] {
            for k in 1..=4 {
                assert_eq!(pc.count(k, m).unwrap(), plain(k, m), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn blocks_cover_range() {
        for m in [1u128, 7, 100, 12345] {
            let mut expect = 1;
            for (lo, hi, q) in QuotientBlocks::new(m) {
                assert_eq!(lo, expect);
                for i in lo..=hi {
                    assert_eq!(m / i, q);
                }
                expect = hi + 1;
            }
            assert_eq!(expect, m + 1);
        }
    }

    #[test]
    fn integer_sqrt() {
        for m in 0u128..2000 {
            let s = isqrt(m);
            assert!(s * s <= m && (s + 1) * (s + 1) > m);
        }
        assert_eq!(isqrt(u64::MAX as u128 * u64::MAX as u128), u64::MAX as u128);
    }
}
