//! Binomial coefficients, log-factorials and the falling-factorial estimate.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::LogReal;
use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative integer.
pub type BigCount = BigUint;

const FACT_TABLE_LEN: usize = 171;

fn ln_fact_table() -> &'static [f64; FACT_TABLE_LEN] {
    static TABLE: OnceLock<[f64; FACT_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; FACT_TABLE_LEN];
        let mut f = 1.0f64;
        for (n, slot) in t.iter_mut().enumerate().skip(1) {
            f *= n as f64;
            *slot = f.ln();
        }
        t
    })
}

/// `ln(n!) - [(n + 1/2) ln n - n + ln(2 pi)/2]`, the Stirling remainder.
fn stirling_err(n: u64) -> f64 {
    if (n as usize) < FACT_TABLE_LEN {
        let x = n as f64;
        return ln_fact_table()[n as usize] - (x + 0.5) * x.ln() + x - 0.5 * (2.0 * PI).ln();
    }
    let x = n as f64;
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

/// Natural log of `n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < FACT_TABLE_LEN {
        return ln_fact_table()[n as usize];
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_err(n)
}

/// `C(a, b)` exactly; zero outside `0 <= b <= a`.
pub fn binomial_exact(a: u64, b: i64) -> BigCount {
    if b < 0 || b as u64 > a {
        return BigUint::zero();
    }
    let k = (b as u64).min(a - b as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// `C(a, b)` in log space.
///
/// Small arguments go through a factorial table; large ones use the
/// Stirling-remainder form, which avoids cancelling two huge log-gammas.
pub fn log_binomial(a: u64, b: i64) -> LogReal {
    if b < 0 || b as u64 > a {
        return LogReal::ZERO;
    }
    let k = (b as u64).min(a - b as u64);
    if k == 0 {
        return LogReal::ONE;
    }
    if (a as usize) < FACT_TABLE_LEN {
        let t = ln_fact_table();
        return LogReal::from_ln(t[a as usize] - t[k as usize] - t[(a - k) as usize]);
    }
    let n = a as f64;
    let kf = k as f64;
    let rest = (a - k) as f64;
    let main = kf * (n / kf).ln() - rest * (-kf / n).ln_1p();
    let ln = main - 0.5 * (2.0 * PI * kf * rest / n).ln() + stirling_err(a)
        - stirling_err(k)
        - stirling_err(a - k);
    LogReal::from_ln(ln)
}

/// Leading-order estimate of `a!/(a-b)!` valid for `b < a/2`:
/// `a^b * exp(-(b^2 - b)/(2a))`, with relative error envelope `b^3/a^2`.
pub fn falling_factorial_approx(a: u64, b: u64) -> Result<(LogReal, f64)> {
    if 2 * (b as u128) >= a as u128 {
        return Err(Error::Precondition(format!(
            "falling factorial estimate needs b < a/2 (a = {a}, b = {b})"
        )));
    }
    let af = a as f64;
    let bf = b as f64;
    let ln = bf * af.ln() - (bf * bf - bf) / (2.0 * af);
    Ok((LogReal::from_ln(ln), bf * bf * bf / (af * af)))
}
