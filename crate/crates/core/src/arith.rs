//! Integer kernels: GCD and LCM of vectors, a prime sieve, p-adic valuations
//! and trial-division factorization.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::sympoly::gcd_u128;

/// Largest integer [`factorize`] accepts.
pub const FACTORIZE_LIMIT: u64 = 1_000_000_000_000;

const SHARED_SIEVE_LIMIT: u64 = 1_000_000;

/// Ordered `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactorizationMap(pub Vec<(u64, u32)>);

impl FactorizationMap {
    pub fn entries(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u64 {
        self.0.iter().map(|&(p, k)| p.pow(k)).product()
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.0.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, k)| k)
    }
}

pub fn gcd_vec(v: &[u128]) -> Result<u128> {
    check_positive(v)?;
    Ok(v.iter().fold(0, |g, &x| gcd_u128(g, x)))
}

/// LCM folded as `a / gcd(a, b) * b`; runs in `u64` until the first overflow.
pub fn lcm_vec(v: &[u128]) -> Result<u128> {
    check_positive(v)?;
    let mut acc = 1u128;
    let mut narrow = true;
    for &x in v {
        if narrow && x <= u64::MAX as u128 {
            let (a, b) = (acc as u64, x as u64);
            let g = gcd_u64(a, b);
            if let Some(l) = (a / g).checked_mul(b) {
                acc = l as u128;
                continue;
            }
        }
        narrow = false;
        let g = gcd_u128(acc, x);
        acc = (acc / g).checked_mul(x).ok_or(Error::Overflow("lcm"))?;
    }
    Ok(acc)
}

fn check_positive(v: &[u128]) -> Result<()> {
    if v.is_empty() || v.contains(&0) {
        return Err(Error::domain(
            "gcd/lcm need a nonempty vector of positive integers",
        ));
    }
    Ok(())
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primes `<= limit` by the sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Primes up to `10^6`, built once.
pub fn shared_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(SHARED_SIEVE_LIMIT))
}

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &p in shared_primes() {
        if p * p > m {
            return true;
        }
        if m.is_multiple_of(p) {
            return m == p;
        }
    }
    // m > 10^12: fall back to plain odd trial division
    let mut d = SHARED_SIEVE_LIMIT + 1;
    while d.saturating_mul(d) <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `lambda_p(m)`, the exponent of `p` in `m`.
pub fn valuation(p: u64, m: u128) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if m == 0 {
        return Err(Error::domain("valuation of 0 is undefined"));
    }
    Ok(valuation_unchecked(p as u128, m))
}

pub(crate) fn valuation_unchecked(p: u128, mut m: u128) -> u32 {
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    k
}

/// Complete factorization by trial division against the shared sieve.
pub fn factorize(m: u64) -> Result<FactorizationMap> {
    if m == 0 {
        return Err(Error::domain("cannot factorize 0"));
    }
    if m > FACTORIZE_LIMIT {
        return Err(Error::domain(format!(
            "{m} exceeds the factorization limit {FACTORIZE_LIMIT}"
        )));
    }
    let mut rest = m;
    let mut out = Vec::new();
    for &p in shared_primes() {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            out.push((p, k));
        }
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(FactorizationMap(out))
}
