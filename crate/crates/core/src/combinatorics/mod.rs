//! Exact and log-space combinatorial primitives.

mod binomial;
mod concave;
mod logreal;
mod poly;

pub use binomial::{
    binomial_exact, falling_factorial_approx, ln_factorial, log_binomial, BigCount,
};
pub use concave::{
    check_log_concave, check_log_concave_exact, check_log_concave_tol, UnimodalCheckResult,
};
pub use logreal::LogReal;
pub use poly::{
    egf_mul_exact, egf_pow_exact, pascal_rows, poly_pow_coeff, restricted_composition_weight,
    restricted_composition_weight_exact, truncated_binomial_poly, truncated_binomial_poly_exact,
    Coefficient, TruncatedPoly,
};
