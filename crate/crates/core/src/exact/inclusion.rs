//! Inclusion/exclusion terms and Bonferroni bounds.
//!
//! For the subset model the `m`-th term is
//!
//! ```text
//! beta_m = C(nb, m) * sum_{s <= m(R-1)} C(N - mS, K - s) * w_m(s) / C(N, K)
//! ```
//!
//! with `w_m(s)` the coefficient of `x^s` in `(sum_{i<R} C(S,i) x^i)^m`. For
//! the bins model the `l`-th term is `C(n,l) * sum_{s <= (R-1)l} q(s)` where
//! `q(s)` is the probability that `l` given bins hold `s` balls in total, none
//! of them more than `R-1`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{bins_cost, rational, rational_to_f64, subset_cost, Arithmetic, Budget};
use crate::combinatorics::{
    binomial_exact, egf_mul_exact, ln_factorial, log_binomial, pascal_rows,
    truncated_binomial_poly, truncated_binomial_poly_exact, LogReal, TruncatedPoly,
};
use crate::model::{BinsModelParams, Method, Model, ProbEstimate, SubsetModelParams};

/// Alternating partial sums `P_T = 1 - sum_{i<=T} (-1)^{i+1} beta_i` and the
/// sandwich they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct BonferroniBounds {
    pub terms: Vec<f64>,
    /// `P_1, P_2, ..., P_T`.
    pub partial_sums: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub terms_used: usize,
    /// Every nonzero term was included, so the last partial sum is the
    /// probability itself.
    pub complete: bool,
    pub exact_partial_sums: Option<Vec<BigRational>>,
    /// The probability, when `complete` and computed in exact arithmetic.
    pub exact: Option<BigRational>,
    /// Floating-point error allowance already folded into `lower`/`upper`.
    pub abs_error_bound: f64,
}

impl BonferroniBounds {
    pub fn estimate(&self) -> ProbEstimate {
        let last = self.partial_sums.last().copied().unwrap_or(1.0);
        let mut est = ProbEstimate::point(last.clamp(self.lower, self.upper), Method::Bonferroni);
        est.lower = Some(self.lower);
        est.upper = Some(self.upper);
        est.rational = self.exact.clone();
        est.with_meta("terms_used", self.terms_used)
            .with_meta("complete", self.complete)
            .with_meta("abs_error_bound", format!("{:.3e}", self.abs_error_bound))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IeOptions {
    pub max_terms: Option<usize>,
    /// Log-space evaluation stops once a term drops below this.
    pub negligible: f64,
    pub arithmetic: Arithmetic,
    pub budget: Budget,
}

impl Default for IeOptions {
    fn default() -> Self {
        IeOptions {
            max_terms: None,
            negligible: 1e-15,
            arithmetic: Arithmetic::Auto,
            budget: Budget::default(),
        }
    }
}

// ---- subset model -------------------------------------------------------

/// `C(a, b)` for `b = hi, hi-1, ..., lo`, stepping `C(a, b) = C(a, b+1) (b+1) / (a-b)`.
fn binomial_run_down(a: u64, hi: i64, lo: i64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity((hi - lo + 1).max(0) as usize);
    let mut prev: Option<BigUint> = None;
    for b in (lo..=hi).rev() {
        if b < 0 || b as u64 > a {
            prev = None;
            out.push(BigUint::zero());
            continue;
        }
        let c = match prev.take() {
            Some(up) => up * (b as u64 + 1) / (a - b as u64),
            None => binomial_exact(a, b),
        };
        out.push(c.clone());
        prev = Some(c);
    }
    out
}

fn subset_numerator(p: &SubsetModelParams, m: u64, w: &TruncatedPoly<BigUint>) -> BigUint {
    let k = p.subset_size as i64;
    let top = w.coeffs().len().saturating_sub(1).min(k as usize);
    let rest = p.universe - m * p.block_len;
    // C(rest, K - s) for s = 0..=top
    let binoms = binomial_run_down(rest, k, k - top as i64);
    let mut acc = BigUint::zero();
    for (s, c) in binoms.iter().enumerate().take(top + 1) {
        let ws = &w.coeffs()[s];
        if !c.is_zero() && !ws.is_zero() {
            acc += c * ws;
        }
    }
    acc * binomial_exact(p.n_blocks(), m as i64)
}

fn subset_log_term(p: &SubsetModelParams, m: u64, w: &TruncatedPoly<LogReal>) -> LogReal {
    let rest = p.universe - m * p.block_len;
    let k = p.subset_size as i64;
    let inner = LogReal::sum(
        w.coeffs()
            .iter()
            .enumerate()
            .map(|(s, &ws)| ws * log_binomial(rest, k - s as i64)),
    );
    inner * log_binomial(p.n_blocks(), m as i64) / log_binomial(p.universe, k)
}

fn check_subset_index(p: &SubsetModelParams, m: u64) {
    assert!(
        m >= 1 && m <= p.n_blocks(),
        "term index {m} outside 1..={}",
        p.n_blocks()
    );
}

/// The `m`-th inclusion/exclusion term for the subset model, exactly.
pub fn beta_m_subset_exact(p: &SubsetModelParams, m: u64) -> BigRational {
    check_subset_index(p, m);
    let poly = truncated_binomial_poly_exact(p.block_len, p.min_hits);
    let w = poly.pow_capped(m, (m * (p.min_hits - 1)) as usize);
    rational(
        subset_numerator(p, m, &w),
        binomial_exact(p.universe, p.subset_size as i64),
    )
}

/// The `m`-th inclusion/exclusion term for the subset model, in floating
/// point. May exceed 1.
pub fn beta_m_subset(p: &SubsetModelParams, m: u64) -> f64 {
    check_subset_index(p, m);
    let poly = truncated_binomial_poly(p.block_len, p.min_hits);
    let w = poly.pow_capped(m, (m * (p.min_hits - 1)) as usize);
    subset_log_term(p, m, &w).to_f64()
}

/// `g(s) = C(N - mS, K - s) * w_m(s)` for `s = 0..=m(R-1)`.
pub fn g_sequence(p: &SubsetModelParams, m: u64) -> Vec<LogReal> {
    check_subset_index(p, m);
    let top = (m * (p.min_hits - 1)) as usize;
    let w = truncated_binomial_poly(p.block_len, p.min_hits).pow_capped(m, top);
    let rest = p.universe - m * p.block_len;
    (0..=top)
        .map(|s| w.coeff(s) * log_binomial(rest, p.subset_size as i64 - s as i64))
        .collect()
}

pub fn g_sequence_exact(p: &SubsetModelParams, m: u64) -> Vec<BigUint> {
    check_subset_index(p, m);
    let top = (m * (p.min_hits - 1)) as usize;
    let w = truncated_binomial_poly_exact(p.block_len, p.min_hits).pow_capped(m, top);
    let rest = p.universe - m * p.block_len;
    (0..=top)
        .map(|s| w.coeff(s) * binomial_exact(rest, p.subset_size as i64 - s as i64))
        .collect()
}

// ---- bins model ---------------------------------------------------------

fn check_bins_index(p: &BinsModelParams, l: u64) {
    assert!(l >= 1 && l <= p.bins, "term index {l} outside 1..={}", p.bins);
}

/// `W_l(s)`: assignments of `s` labelled balls to `l` bins with at most
/// `r` in each.
fn bounded_assignments(r: u64, l: u64, cap: usize) -> Vec<BigUint> {
    let weights: Vec<BigUint> = (0..=r.min(cap as u64)).map(|_| BigUint::one()).collect();
    let pascal = pascal_rows(cap);
    let mut acc = vec![BigUint::one()];
    for _ in 0..l {
        acc = egf_mul_exact(&acc, &weights, cap, &pascal);
    }
    acc
}

/// `q(s)` numerators over the common denominator `n^m`:
/// `C(m, s) (n-l)^{m-s} W_l(s)`.
fn q_numerators(p: &BinsModelParams, l: u64, w: &[BigUint]) -> Vec<BigUint> {
    let m = p.balls;
    let free = BigUint::from(p.bins - l);
    w.iter()
        .enumerate()
        .map(|(s, ws)| {
            let s = s as u64;
            if s > m || ws.is_zero() {
                return BigUint::zero();
            }
            binomial_exact(m, s as i64) * free.pow((m - s) as u32) * ws
        })
        .collect()
}

fn bins_denominator(p: &BinsModelParams) -> BigUint {
    BigUint::from(p.bins).pow(p.balls as u32)
}

/// The full `q(0..=(R-1)l)` sequence, exactly.
pub fn q_sequence_exact(p: &BinsModelParams, l: u64) -> Vec<BigRational> {
    check_bins_index(p, l);
    let top = (p.r() * l) as usize;
    let w = bounded_assignments(p.r(), l, top);
    let den = bins_denominator(p);
    let mut nums = q_numerators(p, l, &w);
    nums.resize(top + 1, BigUint::zero());
    nums.into_iter().map(|q| rational(q, den.clone())).collect()
}

/// `E_r(x) = sum_{t<=r} x^t/t!` in log space.
fn truncated_exp_series(r: u64) -> TruncatedPoly<LogReal> {
    TruncatedPoly::new(
        (0..=r).map(|t| LogReal::from_ln(-ln_factorial(t))).collect(),
        r as usize,
    )
}

fn q_log(p: &BinsModelParams, l: u64, e: &TruncatedPoly<LogReal>, top: usize) -> Vec<LogReal> {
    let m = p.balls;
    let free = p.bins - l;
    let ln_n = (p.bins as f64).ln();
    (0..=top)
        .map(|s| {
            let s64 = s as u64;
            let c = e.coeff(s);
            if s64 > m || c.is_zero() || (free == 0 && s64 < m) {
                return LogReal::ZERO;
            }
            let ln_free = if free == 0 { 0.0 } else { (free as f64).ln() };
            LogReal::from_ln(
                ln_factorial(m) - ln_factorial(m - s64) + (m - s64) as f64 * ln_free + c.ln()
                    - m as f64 * ln_n,
            )
        })
        .collect()
}

/// The full `q(0..=(R-1)l)` sequence in log space.
pub fn q_sequence(p: &BinsModelParams, l: u64) -> Vec<LogReal> {
    check_bins_index(p, l);
    let top = (p.r() * l) as usize;
    let e = truncated_exp_series(p.r()).pow_capped(l, top);
    q_log(p, l, &e, top)
}

pub fn beta_l_bins_exact(p: &BinsModelParams, l: u64) -> BigRational {
    check_bins_index(p, l);
    let top = (p.r() * l).min(p.balls) as usize;
    let w = bounded_assignments(p.r(), l, top);
    let num: BigUint = q_numerators(p, l, &w).into_iter().sum();
    rational(
        num * binomial_exact(p.bins, l as i64),
        bins_denominator(p),
    )
}

/// The `l`-th inclusion/exclusion term for the bins model, in floating point.
pub fn beta_l_bins(p: &BinsModelParams, l: u64) -> f64 {
    check_bins_index(p, l);
    let top = (p.r() * l).min(p.balls) as usize;
    let e = truncated_exp_series(p.r()).pow_capped(l, top);
    (LogReal::sum(q_log(p, l, &e, top)) * log_binomial(p.bins, l as i64)).to_f64()
}

// ---- the alternating sum -------------------------------------------------

/// Runs inclusion/exclusion for either model and brackets the success
/// probability between consecutive truncations.
pub fn inclusion_exclusion_prob(model: &Model, opts: &IeOptions) -> BonferroniBounds {
    let (limit, cost) = match model {
        Model::Subset(p) => (p.n_blocks(), subset_cost(p)),
        Model::Bins(p) => (p.bins, bins_cost(p)),
    };
    let limit = opts
        .max_terms
        .map_or(limit, |t| (t as u64).min(limit));
    if opts.arithmetic.use_exact(cost, &opts.budget) {
        exact_sum(model, limit)
    } else {
        float_sum(model, limit, opts.negligible)
    }
}

fn full_limit(model: &Model) -> u64 {
    match model {
        Model::Subset(p) => p.n_blocks(),
        Model::Bins(p) => p.bins,
    }
}

// Once a subset term vanishes with S >= R, every later one does too: the
// admissible window for s shrinks by S - R + 1 per step.
fn vanishing_is_final(model: &Model) -> bool {
    match model {
        Model::Subset(p) => p.block_len >= p.min_hits,
        Model::Bins(_) => true,
    }
}

fn exact_sum(model: &Model, limit: u64) -> BonferroniBounds {
    let (den, numerators): (BigUint, Vec<BigUint>) = match model {
        Model::Subset(p) => {
            let poly = truncated_binomial_poly_exact(p.block_len, p.min_hits);
            let mut w = TruncatedPoly::one(0);
            let mut nums = Vec::new();
            for m in 1..=limit {
                w = w.mul_capped(&poly, (m * (p.min_hits - 1)) as usize);
                let num = subset_numerator(p, m, &w);
                let stop = num.is_zero() && vanishing_is_final(model);
                nums.push(num);
                if stop {
                    break;
                }
            }
            (binomial_exact(p.universe, p.subset_size as i64), nums)
        }
        Model::Bins(p) => {
            let cap = (p.r() * limit).min(p.balls) as usize;
            let pascal = pascal_rows(cap);
            let weights: Vec<BigUint> = (0..=p.r().min(cap as u64)).map(|_| BigUint::one()).collect();
            let mut w = vec![BigUint::one()];
            let mut nums = Vec::new();
            for l in 1..=limit {
                w = egf_mul_exact(&w, &weights, cap, &pascal);
                let top = (p.r() * l).min(p.balls) as usize;
                let num: BigUint = q_numerators(p, l, &w[..w.len().min(top + 1)])
                    .into_iter()
                    .sum();
                nums.push(num * binomial_exact(p.bins, l as i64));
            }
            (bins_denominator(p), nums)
        }
    };

    let used = numerators.len();
    let complete = used as u64 == full_limit(model)
        || (numerators.last().is_some_and(|n| n.is_zero()) && vanishing_is_final(model));

    let den_i = BigInt::from(den);
    let mut running = den_i.clone();
    let mut partial = Vec::with_capacity(used);
    let mut terms = Vec::with_capacity(used);
    let mut best_lower = BigRational::zero();
    let mut best_upper = BigRational::one();
    for (i, num) in numerators.into_iter().enumerate() {
        let num = BigInt::from(num);
        terms.push(rational_to_f64(&BigRational::new(num.clone(), den_i.clone())));
        if i % 2 == 0 {
            running -= num;
        } else {
            running += num;
        }
        let p_t = BigRational::new(running.clone(), den_i.clone());
        // odd truncations (T = i + 1 odd) are lower bounds
        if i % 2 == 0 {
            if p_t > best_lower {
                best_lower = p_t.clone();
            }
        } else if p_t < best_upper {
            best_upper = p_t.clone();
        }
        partial.push(p_t);
    }
    let exact = complete.then(|| partial.last().cloned().unwrap_or_else(BigRational::one));
    if let Some(e) = &exact {
        best_lower = e.clone();
        best_upper = e.clone();
    }
    BonferroniBounds {
        partial_sums: partial.iter().map(rational_to_f64).collect(),
        lower: rational_to_f64(&best_lower).clamp(0.0, 1.0),
        upper: rational_to_f64(&best_upper).clamp(0.0, 1.0),
        terms,
        terms_used: used,
        complete,
        exact_partial_sums: Some(partial),
        exact,
        abs_error_bound: 0.0,
    }
}

fn float_sum(model: &Model, limit: u64, negligible: f64) -> BonferroniBounds {
    let mut terms = Vec::new();
    let mut complete = false;
    let scale;
    match model {
        Model::Subset(p) => {
            scale = log_binomial(p.universe, p.subset_size as i64).ln();
            let poly = truncated_binomial_poly(p.block_len, p.min_hits);
            let mut w = TruncatedPoly::one(0);
            for m in 1..=limit {
                w = w.mul_capped(&poly, (m * (p.min_hits - 1)) as usize);
                let t = subset_log_term(p, m, &w);
                terms.push(t.to_f64());
                if t.is_zero() && vanishing_is_final(model) {
                    complete = true;
                    break;
                }
                if t.to_f64() < negligible {
                    break;
                }
            }
        }
        Model::Bins(p) => {
            scale = ln_factorial(p.balls) + p.balls as f64 * (p.bins as f64).ln();
            let series = truncated_exp_series(p.r());
            let mut e = TruncatedPoly::one(0);
            for l in 1..=limit {
                let top = (p.r() * l).min(p.balls) as usize;
                e = e.mul_capped(&series, top);
                let t = LogReal::sum(q_log(p, l, &e, top)) * log_binomial(p.bins, l as i64);
                terms.push(t.to_f64());
                if t.is_zero() && l == p.bins {
                    complete = true;
                    break;
                }
                if t.to_f64() < negligible {
                    break;
                }
            }
        }
    }
    if terms.len() as u64 == full_limit(model) {
        complete = true;
    }

    // Neumaier-compensated alternating sum
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut partial = Vec::with_capacity(terms.len());
    for (i, &t) in terms.iter().enumerate() {
        let x = if i % 2 == 0 { -t } else { t };
        let s = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - s) + x
        } else {
            (x - s) + sum
        };
        sum = s;
        partial.push(sum + comp);
    }
    let mass: f64 = terms.iter().map(|t| t.abs()).sum();
    let per_term = 32.0 * f64::EPSILON * (1.0 + scale.abs());
    let err = mass * (per_term + 4.0 * f64::EPSILON * (terms.len() as f64 + 1.0));

    let (lower, upper) = if complete {
        let v = partial.last().copied().unwrap_or(1.0);
        (v - err, v + err)
    } else {
        let lower = partial
            .iter()
            .step_by(2)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = partial
            .iter()
            .skip(1)
            .step_by(2)
            .copied()
            .fold(1.0, f64::min);
        (lower - err, upper + err)
    };
    BonferroniBounds {
        terms_used: terms.len(),
        terms,
        partial_sums: partial,
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
        complete,
        exact_partial_sums: None,
        exact: None,
        abs_error_bound: err,
    }
}
