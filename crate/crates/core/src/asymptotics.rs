//! The `e^{-c}` limit and everything built on it.
//!
//! With `G_j(t) = t^j e^{-t}`, the subset model's limiting success probability
//! is `e^{-c}` where `c` is the limit of `(N/S) G_{R-1}(SK/N) / (R-1)!`; the
//! bins model uses `n G_{R-1}(m/n) / (R-1)!`. Everything here evaluates those
//! expressions at finite parameters; convergence is for the caller to observe.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::combinatorics::ln_factorial;
use crate::error::{Error, Result};
use crate::model::{BinsModelParams, Model, SubsetModelParams};

/// `G_j(t) = t^j e^{-t}`, evaluated through its logarithm.
#[allow(non_snake_case)]
pub fn G(j: f64, t: f64) -> f64 {
    assert!(t >= 0.0, "G_j is defined for t >= 0");
    ln_g(j, t).exp()
}

fn ln_g(j: f64, t: f64) -> f64 {
    if j == 0.0 {
        -t
    } else {
        j * t.ln() - t
    }
}

/// Upper end of the domain of `T_j`, i.e. `G_j(j) = (j/e)^j` (1 for `j = 0`).
pub fn t_domain_sup(j: u64) -> f64 {
    ln_g(j as f64, j as f64).exp()
}

/// Inverse of `G_j` on its decreasing branch `t > j`.
///
/// Solves `j ln t - t = ln s` by a safeguarded Newton iteration inside a
/// bracket seeded by the leading-order expansion.
#[allow(non_snake_case)]
pub fn T_inverse(j: u64, s: f64) -> Result<f64> {
    let domain_err = |reason: &str| Error::Domain {
        j,
        value: s,
        reason: reason.to_string(),
    };
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain_err("must be positive"));
    }
    if j == 0 {
        if s >= 1.0 {
            return Err(domain_err("T_0 is defined on (0, 1)"));
        }
        return Ok(-s.ln());
    }
    let jf = j as f64;
    let ln_s = s.ln();
    let ln_sup = ln_g(jf, jf);
    if ln_s >= ln_sup {
        return Err(domain_err(&format!("must be below (j/e)^j = {:.6e}", ln_sup.exp())));
    }
    // h is strictly decreasing for t > j, positive at t = j
    let h = |t: f64| jf * t.ln() - t - ln_s;
    let mut lo = jf;
    let mut hi = jf + 50f64.max(4.0 * ln_s.abs());
    while h(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let guess = T_inverse_asymptotic(j, s);
    let mut t = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let v = h(t);
        if v == 0.0 {
            return Ok(t);
        }
        if v > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let deriv = jf / t - 1.0;
        let newton = t - v / deriv;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= 1e-15 * t || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

/// Leading-order expansion `T_j(s) ~ -ln s + j ln|ln s|` for small `s`.
#[allow(non_snake_case)]
pub fn T_inverse_asymptotic(j: u64, s: f64) -> f64 {
    let l = s.ln();
    -l + j as f64 * l.abs().ln()
}

/// A finite-parameter evaluation of `c`, possibly `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CParameter {
    pub c: f64,
    /// `ln c` when `c` is finite and positive.
    pub log_c: Option<f64>,
    /// `e^{-c}`.
    pub prob: f64,
    pub warnings: Vec<String>,
}

impl CParameter {
    fn from_log(log_c: f64, warnings: Vec<String>) -> Self {
        let c = log_c.exp();
        CParameter {
            c,
            log_c: (c > 0.0 && c.is_finite()).then_some(log_c),
            prob: (-c).exp(),
            warnings,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.c.is_infinite()
    }
}

// ln of (count) G_j(x) / j!
fn log_c(count: f64, j: u64, x: f64) -> (f64, Vec<String>) {
    let mut warnings = Vec::new();
    if (j as f64) > x {
        warnings.push(format!(
            "G_{j} evaluated at {x:.6} left of its mode {j}; outside the T_{j} branch"
        ));
    }
    (count.ln() + ln_g(j as f64, x) - ln_factorial(j), warnings)
}

/// `(N/S) G_{R-1}(SK/N) / (R-1)!` for the subset model.
pub fn c_subset(p: &SubsetModelParams) -> CParameter {
    let ratio = p.universe as f64 / p.block_len as f64;
    let x = p.subset_size as f64 / ratio;
    let (l, w) = log_c(ratio, p.min_hits - 1, x);
    CParameter::from_log(l, w)
}

/// `n G_{R-1}(m/n) / (R-1)!` for the bins model.
pub fn c_bins(p: &BinsModelParams) -> CParameter {
    let x = p.balls as f64 / p.bins as f64;
    let (l, w) = log_c(p.bins as f64, p.min_load - 1, x);
    CParameter::from_log(l, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Ok,
    Marginal,
    Violated,
}

impl Classification {
    /// `ok < 0.1 <= marginal < 0.5 <= violated`; non-finite ratios are violated.
    pub fn of(ratio: f64) -> Self {
        if !ratio.is_finite() || ratio >= 0.5 {
            Classification::Violated
        } else if ratio >= 0.1 {
            Classification::Marginal
        } else {
            Classification::Ok
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Ok => "ok",
            Classification::Marginal => "marginal",
            Classification::Violated => "violated",
        }
    }
}

/// Finite-`N` sizes of the little-o hypotheses behind the subset limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRatios {
    /// `R^2 / S`
    pub ratio_a: f64,
    /// `N R / (S K)`
    pub ratio_b: f64,
    /// `R S / N`
    pub ratio_c1: f64,
    /// `R K / N`
    pub ratio_c2: f64,
    /// `S K / (R N)`, the mean hits per block over the requirement.
    pub alpha: f64,
    pub class_a: Classification,
    pub class_b: Classification,
    pub class_c1: Classification,
    pub class_c2: Classification,
}

/// The bins-model hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinsRatios {
    /// `r / sqrt(max(n, m))` with `r = R - 1`
    pub r_over_sqrt: f64,
    /// `m / n^2`
    pub m_over_n2: f64,
    /// `n R / m`
    pub nr_over_m: f64,
    pub class_r: Classification,
    pub class_m: Classification,
    pub class_nr: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub subset: Option<SubsetRatios>,
    pub bins: Option<BinsRatios>,
}

impl ValidityReport {
    pub fn worst(&self) -> Classification {
        let mut classes = Vec::new();
        if let Some(s) = &self.subset {
            classes.extend([s.class_a, s.class_b, s.class_c1, s.class_c2]);
        }
        if let Some(b) = &self.bins {
            classes.extend([b.class_r, b.class_m, b.class_nr]);
        }
        classes
            .into_iter()
            .max_by_key(|c| *c as u8)
            .unwrap_or(Classification::Ok)
    }
}

fn div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

pub fn validity(model: &Model) -> ValidityReport {
    match model {
        Model::Subset(p) => {
            let (n, s, k, r) = (
                p.universe as f64,
                p.block_len as f64,
                p.subset_size as f64,
                p.min_hits as f64,
            );
            let ratio_a = r * r / s;
            let ratio_b = div(n * r, s * k);
            let ratio_c1 = r * s / n;
            let ratio_c2 = r * k / n;
            ValidityReport {
                subset: Some(SubsetRatios {
                    ratio_a,
                    ratio_b,
                    ratio_c1,
                    ratio_c2,
                    alpha: div(s * k, r * n),
                    class_a: Classification::of(ratio_a),
                    class_b: Classification::of(ratio_b),
                    class_c1: Classification::of(ratio_c1),
                    class_c2: Classification::of(ratio_c2),
                }),
                bins: None,
            }
        }
        Model::Bins(p) => {
            let (m, n) = (p.balls as f64, p.bins as f64);
            let r_over_sqrt = p.r() as f64 / n.max(m).sqrt();
            let m_over_n2 = m / (n * n);
            let nr_over_m = div(n * p.min_load as f64, m);
            ValidityReport {
                subset: None,
                bins: Some(BinsRatios {
                    r_over_sqrt,
                    m_over_n2,
                    nr_over_m,
                    class_r: Classification::of(r_over_sqrt),
                    class_m: Classification::of(m_over_n2),
                    class_nr: Classification::of(nr_over_m),
                }),
            }
        }
    }
}

/// Smallest `K` on the decreasing branch (`SK/N >= R-1`) with
/// `c_subset(K) <= target_c`.
pub fn threshold_k(universe: u64, block_len: u64, min_hits: u64, target_c: f64) -> Result<u64> {
    if !(target_c > 0.0) || !target_c.is_finite() {
        return Err(Error::InvalidParams(format!(
            "target c must be positive and finite, got {target_c}"
        )));
    }
    SubsetModelParams::new(universe, block_len, 0, min_hits)?;
    let j = min_hits - 1;
    let ratio = universe as f64 / block_len as f64;
    let arg = target_c * ln_factorial(j).exp() / ratio;
    let x = T_inverse(j, arg)?;
    let seed = ratio * x;

    let c_at = |k: u64| {
        let (l, _) = log_c(ratio, j, k as f64 / ratio);
        l.exp()
    };
    let branch_start = (j as f64 * ratio).ceil() as u64;
    if c_at(branch_start) <= target_c {
        return Ok(branch_start);
    }
    // invariant: c(lo) > target >= c(hi)
    let mut lo = branch_start;
    let mut hi = (seed.ceil() as u64).max(branch_start + 1);
    let mut step = 1u64;
    while c_at(hi) > target_c {
        lo = hi;
        hi = hi.saturating_add(step);
        step = step.saturating_mul(2);
    }
    let mut step = 1u64;
    loop {
        let probe = hi.saturating_sub(step).max(lo);
        if probe == lo || c_at(probe) > target_c {
            lo = lo.max(probe);
            break;
        }
        hi = probe;
        step = step.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if c_at(mid) > target_c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi > universe {
        return Err(Error::Domain {
            j,
            value: arg,
            reason: format!("threshold K = {hi} exceeds N = {universe}"),
        });
    }
    Ok(hi)
}

/// Real-valued `K0` solving `c = 1`.
pub fn k0(universe: u64, block_len: u64, min_hits: u64) -> Result<f64> {
    SubsetModelParams::new(universe, block_len, 0, min_hits)?;
    let ratio = universe as f64 / block_len as f64;
    let j = min_hits - 1;
    Ok(ratio * T_inverse(j, ln_factorial(j).exp() / ratio)?)
}

/// `c` after shifting `K0` by `a N / S`: `(1 + a/x0)^{R-1} e^{-a}` with
/// `x0 = S K0 / N`.
pub fn perturbation_c(universe: u64, block_len: u64, min_hits: u64, a: f64) -> Result<f64> {
    let ratio = universe as f64 / block_len as f64;
    let x0 = k0(universe, block_len, min_hits)? / ratio;
    if x0 + a < 0.0 {
        return Err(Error::InvalidParams(format!(
            "shift a = {a} makes K negative (S K0 / N = {x0})"
        )));
    }
    let j = (min_hits - 1) as f64;
    let ln_c = if j == 0.0 { -a } else { j * (a / x0).ln_1p() - a };
    Ok(ln_c.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ProbZero,
    ProbPositive,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtNRegime {
    pub regime: Regime,
    /// `ln f(N) = ln N / 2 + r (ln g - g) + r - ln(2 pi r) / 2`.
    pub ln_f: f64,
    pub rg_over_ln_n: f64,
}

/// Classifier for `S = sqrt(N)`, `K = g r sqrt(N)`, where `r` is the index
/// of `G_r` in `c` (so `r = R - 1`).
///
/// `r g < ln N / 2` sends `c` to infinity (probability zero);
/// `r g >= (1/2 + eta) ln N` sends `ln f` to minus infinity (probability one).
pub fn sqrt_n_regime(r: f64, g: f64, n: f64, eta: f64) -> SqrtNRegime {
    let ln_n = n.ln();
    let rg = r * g;
    let half = 0.5 * ln_n;
    let regime = if rg < half * (1.0 - 1e-12) {
        Regime::ProbZero
    } else if rg >= (0.5 + eta) * ln_n {
        Regime::ProbPositive
    } else {
        Regime::Indeterminate
    };
    SqrtNRegime {
        regime,
        ln_f: half + r * (g.ln() - g) + r - 0.5 * (2.0 * PI * r).ln(),
        rg_over_ln_n: rg / ln_n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_values() {
        assert_eq!(G(0.0, 0.0), 1.0);
        assert!((G(2.0, 2.0) - 4.0 * (-2f64).exp()).abs() < 1e-15);
        assert!((G(1.0, 3.5772) - 0.1).abs() < 1e-4);
        assert_eq!(G(3.0, 0.0), 0.0);
    }

    #[test]
    fn t_inverse_examples() {
        assert!((T_inverse(0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        // bisection oracle on t e^{-t} = 0.1 over (1, 50)
        let (mut lo, mut hi) = (1.0f64, 50.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * (-mid).exp() > 0.1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = T_inverse(1, 0.1).unwrap();
        assert!((t - lo).abs() < 1e-12, "{t} vs {lo}");
        assert!((t - 3.5772).abs() < 1e-4);
        assert!(matches!(T_inverse(1, 0.5), Err(Error::Domain { .. })));
        assert!(T_inverse(0, 1.0).is_err());
        assert!(T_inverse(3, 0.0).is_err());
        assert!(T_inverse(3, -1.0).is_err());
    }

    #[test]
    fn asymptotic_expansion_values() {
        assert!((T_inverse_asymptotic(0, 1e-6) - 13.815510557964274).abs() < 1e-12);
        let want = 13.815510557964274 + 2.0 * 13.815510557964274f64.ln();
        assert!((T_inverse_asymptotic(2, 1e-6) - want).abs() < 1e-12);
        assert!((T_inverse_asymptotic(2, 1e-6) - 19.067).abs() < 1e-3);
    }

    #[test]
    fn c_examples() {
        let c = c_subset(&SubsetModelParams::new(1_000_000, 1000, 6908, 1).unwrap());
        assert!((c.c - 0.99975).abs() < 1e-4, "{}", c.c);
        let c = c_subset(&SubsetModelParams::new(1000, 10, 0, 1).unwrap());
        assert!((c.c - 100.0).abs() < 1e-10);
        assert!((c.prob - (-100f64).exp()).abs() < 1e-50);
        let c = c_subset(&SubsetModelParams::new(1000, 10, 5, 3).unwrap());
        assert_eq!(c.warnings.len(), 1);

        let c = c_bins(&BinsModelParams::new(6908, 1000, 1).unwrap());
        assert!((c.c - 1.0).abs() < 1e-3);
        let c = c_bins(&BinsModelParams::new(0, 7, 1).unwrap());
        assert!((c.c - 7.0).abs() < 1e-12);
        let c = c_bins(&BinsModelParams::new(10_000, 100, 3).unwrap());
        let want = 100.0 * (100f64 * 100.0) * (-100f64).exp() / 2.0;
        assert!((c.c / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validity_examples() {
        let v = validity(&SubsetModelParams::new(1_000_000, 1000, 6908, 1).unwrap().into());
        let s = v.subset.unwrap();
        assert!((s.ratio_a - 0.001).abs() < 1e-15);
        assert!((s.ratio_b - 0.144759).abs() < 1e-6);
        assert!((s.ratio_c1 - 0.001).abs() < 1e-15);
        assert!((s.ratio_c2 - 0.006908).abs() < 1e-12);
        assert!((s.alpha * s.ratio_b - 1.0).abs() < 1e-15);

        let v = validity(&SubsetModelParams::new(10_000, 10, 20, 5).unwrap().into());
        let s = v.subset.unwrap();
        assert!((s.ratio_b - 250.0).abs() < 1e-12);
        assert_eq!(s.class_b, Classification::Violated);

        let v = validity(&SubsetModelParams::new(500, 500, 10, 1).unwrap().into());
        assert_eq!(v.subset.unwrap().class_c1, Classification::Violated);

        let v = validity(&SubsetModelParams::new(500, 50, 0, 1).unwrap().into());
        assert!(v.subset.unwrap().ratio_b.is_infinite());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_k(1_000_000, 1000, 1, 1.0).unwrap(), 6908);
        assert_eq!(threshold_k(10_000, 100, 1, 1.0).unwrap(), 461);
        let k2 = threshold_k(1_000_000, 1000, 2, 1.0).unwrap();
        assert!(k2 > 6908);
        // second-order term: roughly (N/S) ln ln (N/S) above the R = 1 value
        let extra = 1000.0 * (1000f64.ln()).ln();
        assert!((k2 as f64 - 6908.0) > 0.5 * extra && (k2 as f64 - 6908.0) < 2.0 * extra);
        assert!(matches!(
            threshold_k(1000, 10, 3, 1e6),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn perturbation_examples() {
        assert_eq!(perturbation_c(1_000_000, 1000, 2, 0.0).unwrap(), 1.0);
        let c = perturbation_c(1_000_000, 1000, 2, 1.0).unwrap();
        assert!(c > (-1f64).exp() && c < 1.2 * (-1f64).exp());
        let c = perturbation_c(1_000_000, 1000, 1, -3.0).unwrap();
        let prob = (-c).exp();
        assert!((prob / (-(3f64.exp())).exp() - 1.0).abs() < 1e-9);
        assert!(prob > 1.8e-9 && prob < 2.0e-9);
    }

    #[test]
    fn regime_examples() {
        let n = 1e8f64;
        let ln_n = n.ln();
        let at = |frac: f64| sqrt_n_regime(4.0, frac * ln_n / 4.0, n, 0.2).regime;
        assert_eq!(at(0.4), Regime::ProbZero);
        assert_eq!(at(0.7), Regime::ProbPositive);
        assert_eq!(at(0.5), Regime::Indeterminate);
        let r = sqrt_n_regime(4.0, 0.4 * ln_n / 4.0, n, 0.2);
        assert!(r.ln_f > 0.0);
    }
}
