//! Exact occupancy probabilities and the inclusion/exclusion expansion.
//!
//! Both models reduce to coefficient extraction:
//!
//! * subset: `[x^K] (sum_{j>=R} C(S,j) x^j)^{floor(N/S)} (1+x)^{rem} / C(N,K)`;
//! * bins: `m! [x^m] (sum_{j>=R} x^j/j!)^n / n^m`.
//!
//! Small instances run in exact rational arithmetic; larger ones run the same
//! convolutions in log space, which is safe because every coefficient is a
//! sum of positive terms.

mod inclusion;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{
    binomial_exact, egf_pow_exact, ln_factorial, log_binomial, LogReal, TruncatedPoly,
};
use crate::error::{Error, Result};
use crate::model::{BinsModelParams, Method, ProbEstimate, SubsetModelParams};

pub use inclusion::{
    beta_l_bins, beta_l_bins_exact, beta_m_subset, beta_m_subset_exact, g_sequence,
    g_sequence_exact, inclusion_exclusion_prob, q_sequence, q_sequence_exact, BonferroniBounds,
    IeOptions,
};

/// Cost limits for the coefficient-extraction solvers.
///
/// Costs are the operation-count proxies `floor(N/S) * K * min(S, K)` and
/// `n * m * min(m, n R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Up to this cost, [`Arithmetic::Auto`] uses exact rationals.
    pub exact_limit: u128,
    /// Above this cost the solver refuses with [`Error::BudgetExceeded`].
    pub limit: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            exact_limit: 50_000_000,
            limit: 2_000_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Auto,
    Exact,
    LogSpace,
}

impl Arithmetic {
    fn use_exact(self, cost: u128, budget: &Budget) -> bool {
        match self {
            Arithmetic::Auto => cost <= budget.exact_limit,
            Arithmetic::Exact => true,
            Arithmetic::LogSpace => false,
        }
    }
}

pub fn subset_cost(p: &SubsetModelParams) -> u128 {
    p.n_blocks() as u128 * p.subset_size as u128 * p.block_len.min(p.subset_size) as u128
}

pub fn bins_cost(p: &BinsModelParams) -> u128 {
    let nr = p.bins as u128 * p.min_load as u128;
    p.bins as u128 * p.balls as u128 * (p.balls as u128).min(nr)
}

fn guard(cost: u128, budget: &Budget) -> Result<()> {
    if cost > budget.limit {
        Err(Error::BudgetExceeded {
            cost,
            budget: budget.limit,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn rational(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

// Rough count of sequential roundings in a log-space convolution power.
fn log_space_error(convolutions: u64, width: u64, log_magnitude: f64) -> f64 {
    f64::EPSILON * ((convolutions + 2) as f64 * (width + 1) as f64 + 16.0 * (1.0 + log_magnitude))
}

/// Probability that a uniform `K`-subset of `{1..N}` puts at least `R`
/// elements in every full block of length `S`.
pub fn subset_prob_exact(p: &SubsetModelParams) -> Result<ProbEstimate> {
    subset_prob_exact_with(p, &Budget::default(), Arithmetic::Auto)
}

pub fn subset_prob_exact_with(
    p: &SubsetModelParams,
    budget: &Budget,
    arithmetic: Arithmetic,
) -> Result<ProbEstimate> {
    p.validate()?;
    let cost = subset_cost(p);
    guard(cost, budget)?;
    let k = p.subset_size as usize;
    let top = p.block_len.min(p.subset_size);
    let nb = p.n_blocks();
    let rem = p.remainder();
    let convolutions = 2 * (64 - nb.leading_zeros() as u64);

    if arithmetic.use_exact(cost, budget) {
        let block = TruncatedPoly::new(
            (0..=top)
                .map(|j| {
                    if j >= p.min_hits {
                        binomial_exact(p.block_len, j as i64)
                    } else {
                        BigUint::zero()
                    }
                })
                .collect(),
            k,
        );
        let power = block.pow_capped(nb, k);
        let mut total = BigUint::zero();
        for (s, c) in power.coeffs().iter().enumerate() {
            if !c.is_zero() {
                total += c * binomial_exact(rem, (k - s) as i64);
            }
        }
        let q = rational(total, binomial_exact(p.universe, p.subset_size as i64));
        let mut est = ProbEstimate::point(rational_to_f64(&q), Method::Exact)
            .with_meta("arithmetic", "exact")
            .with_meta("cost", cost);
        est.rational = Some(q);
        Ok(est)
    } else {
        let block = TruncatedPoly::new(
            (0..=top)
                .map(|j| {
                    if j >= p.min_hits {
                        log_binomial(p.block_len, j as i64)
                    } else {
                        LogReal::ZERO
                    }
                })
                .collect(),
            k,
        );
        let power = block.pow_capped(nb, k);
        let total = LogReal::sum(
            power
                .coeffs()
                .iter()
                .enumerate()
                .map(|(s, &c)| c * log_binomial(rem, (k - s) as i64)),
        );
        let denom = log_binomial(p.universe, p.subset_size as i64);
        let value = (total / denom).to_f64().min(1.0);
        Ok(ProbEstimate::point(value, Method::Exact)
            .with_meta("arithmetic", "log-space")
            .with_meta("cost", cost)
            .with_meta(
                "rel_err_estimate",
                format!("{:.3e}", log_space_error(convolutions, top, denom.ln())),
            ))
    }
}

/// Probability that `m` uniform balls leave every one of `n` bins with at
/// least `R` balls.
pub fn bins_prob_exact(p: &BinsModelParams) -> Result<ProbEstimate> {
    bins_prob_exact_with(p, &Budget::default(), Arithmetic::Auto)
}

pub fn bins_prob_exact_with(
    p: &BinsModelParams,
    budget: &Budget,
    arithmetic: Arithmetic,
) -> Result<ProbEstimate> {
    p.validate()?;
    let cost = bins_cost(p);
    guard(cost, budget)?;
    let m = p.balls as usize;
    let convolutions = 2 * (64 - p.bins.leading_zeros() as u64);

    if arithmetic.use_exact(cost, budget) {
        let weights: Vec<BigUint> = (0..=m)
            .map(|j| BigUint::from((j as u64 >= p.min_load) as u8))
            .collect();
        let counts = egf_pow_exact(&weights, p.bins, m);
        let favourable = counts.get(m).cloned().unwrap_or_default();
        let q = rational(favourable, BigUint::from(p.bins).pow(p.balls as u32));
        let mut est = ProbEstimate::point(rational_to_f64(&q), Method::Exact)
            .with_meta("arithmetic", "exact")
            .with_meta("cost", cost);
        est.rational = Some(q);
        Ok(est)
    } else {
        let series = TruncatedPoly::new(
            (0..=m)
                .map(|j| {
                    if j as u64 >= p.min_load {
                        LogReal::from_ln(-ln_factorial(j as u64))
                    } else {
                        LogReal::ZERO
                    }
                })
                .collect(),
            m,
        );
        let coeff = series.pow_capped(p.bins, m).coeff(m);
        let ln_total = ln_factorial(p.balls) - p.balls as f64 * (p.bins as f64).ln();
        let value = if coeff.is_zero() {
            0.0
        } else {
            (coeff.ln() + ln_total).exp().min(1.0)
        };
        Ok(ProbEstimate::point(value, Method::Exact)
            .with_meta("arithmetic", "log-space")
            .with_meta("cost", cost)
            .with_meta(
                "rel_err_estimate",
                format!(
                    "{:.3e}",
                    log_space_error(convolutions, p.balls, ln_factorial(p.balls))
                ),
            ))
    }
}
