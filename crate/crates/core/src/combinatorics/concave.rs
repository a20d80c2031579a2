//! Log-concavity (strong unimodality) checks.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::LogReal;

#[derive(Debug, Clone, PartialEq)]
pub struct UnimodalCheckResult {
    pub is_log_concave: bool,
    pub first_violation_index: Option<usize>,
    /// Largest `a(s-1) a(s+1) / a(s)^2` over interior indices; `inf` for an
    /// internal zero.
    pub max_violation_ratio: f64,
}

const DEFAULT_REL_TOL: f64 = 1e-10;

/// Checks `a(s)^2 >= a(s-1) a(s+1)` and that the support has no holes.
pub fn check_log_concave(seq: &[LogReal]) -> UnimodalCheckResult {
    check_log_concave_tol(seq, DEFAULT_REL_TOL)
}

/// Same as [`check_log_concave`], with slack `rel_tol * (1 + max |ln a(s)|)`
/// on the log-space inequality.
pub fn check_log_concave_tol(seq: &[LogReal], rel_tol: f64) -> UnimodalCheckResult {
    let scale = seq
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| x.ln().abs())
        .fold(0.0f64, f64::max);
    let slack = rel_tol * (1.0 + scale);
    let mut first = support_hole(seq.iter().map(|x| !x.is_zero()));
    let mut worst = if first.is_some() { f64::INFINITY } else { 0.0 };
    for s in 1..seq.len().saturating_sub(1) {
        let (a, b, c) = (seq[s - 1], seq[s], seq[s + 1]);
        if a.is_zero() || b.is_zero() || c.is_zero() {
            continue;
        }
        let excess = a.ln() + c.ln() - 2.0 * b.ln();
        worst = worst.max(excess.exp());
        if excess > slack && first.is_none() {
            first = Some(s);
        }
    }
    UnimodalCheckResult {
        is_log_concave: first.is_none(),
        first_violation_index: first,
        max_violation_ratio: worst,
    }
}

/// Exact version over nonnegative rationals.
pub fn check_log_concave_exact(seq: &[BigRational]) -> UnimodalCheckResult {
    let mut first = support_hole(seq.iter().map(|x| !x.is_zero()));
    let mut worst = if first.is_some() { f64::INFINITY } else { 0.0 };
    for s in 1..seq.len().saturating_sub(1) {
        let (a, b, c) = (&seq[s - 1], &seq[s], &seq[s + 1]);
        if a.is_zero() || b.is_zero() || c.is_zero() {
            continue;
        }
        let lhs = a * c;
        let rhs = b * b;
        let ratio = (&lhs / &rhs).to_f64().unwrap_or(f64::INFINITY);
        worst = worst.max(ratio);
        if lhs > rhs && first.is_none() {
            first = Some(s);
        }
    }
    UnimodalCheckResult {
        is_log_concave: first.is_none(),
        first_violation_index: first,
        max_violation_ratio: worst,
    }
}

/// First index of a zero lying strictly between two positive entries.
fn support_hole(positive: impl Iterator<Item = bool>) -> Option<usize> {
    let flags: Vec<bool> = positive.collect();
    let first = flags.iter().position(|&p| p)?;
    let last = flags.iter().rposition(|&p| p)?;
    (first..=last).find(|&i| !flags[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::log_binomial;

    fn lr(xs: &[f64]) -> Vec<LogReal> {
        xs.iter().map(|&x| LogReal::from_f64(x)).collect()
    }

    #[test]
    fn binomial_rows_are_log_concave() {
        assert!(check_log_concave(&lr(&[1.0, 2.0, 1.0])).is_log_concave);
        let row: Vec<LogReal> = (0..=10).map(|i| log_binomial(10, i)).collect();
        let res = check_log_concave(&row);
        assert!(res.is_log_concave);
        assert!(res.max_violation_ratio < 1.0);
    }

    #[test]
    fn reports_first_violation() {
        let res = check_log_concave(&lr(&[1.0, 1.0, 4.0]));
        assert!(!res.is_log_concave);
        assert_eq!(res.first_violation_index, Some(1));
        assert!((res.max_violation_ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn internal_zero_is_a_violation() {
        let res = check_log_concave(&lr(&[1.0, 0.0, 1.0]));
        assert_eq!(res.first_violation_index, Some(1));
        let edges = check_log_concave(&lr(&[0.0, 0.0, 1.0, 2.0, 1.0, 0.0]));
        assert!(edges.is_log_concave);
    }

    #[test]
    fn geometric_sequence_is_on_the_boundary() {
        let seq: Vec<LogReal> = (0..50).map(|i| LogReal::from_ln(0.37 * i as f64)).collect();
        assert!(check_log_concave(&seq).is_log_concave);
    }
}
