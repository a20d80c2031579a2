//! Nonnegative reals carried as natural logarithms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// A nonnegative real stored as `ln(x)`; zero is `ln = -inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogReal {
    ln: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogReal = LogReal { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogReal::from_ln(NaN)");
        assert!(ln != f64::INFINITY, "LogReal::from_ln(+inf)");
        LogReal { ln }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0 && x.is_finite(), "LogReal::from_f64({x})");
        LogReal { ln: x.ln() }
    }

    pub fn from_u64(x: u64) -> Self {
        LogReal { ln: (x as f64).ln() }
    }

    /// Exact-to-rounding logarithm of an arbitrarily large integer.
    pub fn from_biguint(x: &BigUint) -> Self {
        let bits = x.bits();
        if bits == 0 {
            return Self::ZERO;
        }
        if bits <= 1000 {
            return LogReal {
                ln: x.to_f64().expect("fits in f64").ln(),
            };
        }
        let shift = bits - 64;
        let top = (x >> shift).to_f64().expect("64-bit head");
        LogReal {
            ln: top.ln() + shift as f64 * std::f64::consts::LN_2,
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    #[inline]
    pub fn ln(&self) -> f64 {
        self.ln
    }

    pub fn to_f64(&self) -> f64 {
        self.ln.exp()
    }

    pub fn powu(self, e: u64) -> Self {
        if e == 0 {
            Self::ONE
        } else if self.is_zero() {
            Self::ZERO
        } else {
            LogReal {
                ln: self.ln * e as f64,
            }
        }
    }

    /// Two-term log-sum-exp.
    pub fn add(self, other: Self) -> Self {
        let (hi, lo) = if self.ln >= other.ln {
            (self, other)
        } else {
            (other, self)
        };
        if lo.is_zero() {
            return hi;
        }
        LogReal {
            ln: hi.ln + (lo.ln - hi.ln).exp().ln_1p(),
        }
    }

    /// Sum of many terms, accumulated in descending order of magnitude.
    pub fn sum<I: IntoIterator<Item = LogReal>>(terms: I) -> Self {
        let mut logs: Vec<f64> = terms
            .into_iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.ln)
            .collect();
        match logs.len() {
            0 => return Self::ZERO,
            1 => return LogReal { ln: logs[0] },
            _ => {}
        }
        logs.sort_unstable_by(|a, b| b.total_cmp(a));
        let max = logs[0];
        let acc: f64 = logs.iter().map(|l| (l - max).exp()).sum();
        LogReal { ln: max + acc.ln() }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            LogReal::ZERO
        } else {
            LogReal {
                ln: self.ln + rhs.ln,
            }
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero(), "LogReal division by zero");
        if self.is_zero() {
            LogReal::ZERO
        } else {
            LogReal {
                ln: self.ln - rhs.ln,
            }
        }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl fmt::Debug for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "LogReal(0)")
        } else {
            write!(f, "LogReal(e^{})", self.ln)
        }
    }
}
