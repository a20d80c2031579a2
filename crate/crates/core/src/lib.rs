//! Occupancy probabilities for random subsets and balls-into-bins.
//!
//! A uniformly random `K`-subset of `{1..N}` is checked against the
//! `floor(N/S)` consecutive blocks of length `S`: does every block receive at
//! least `R` elements? The balls-into-bins analogue throws `m` balls into `n`
//! bins and asks whether every bin ends with at least `R` balls.
//!
//! Four routes are provided and cross-check one another:
//!
//! * [`exact`]: generating-function coefficient extraction, in exact rational
//!   arithmetic when affordable and log space otherwise, plus the
//!   inclusion/exclusion terms with Bonferroni bounds;
//! * [`asymptotics`]: the `e^{-c}` limit with `c = (N/S) G_{R-1}(SK/N)/(R-1)!`,
//!   the inverse `T_j` of `G_j(t) = t^j e^{-t}`, threshold inversion and
//!   regime diagnostics;
//! * [`montecarlo`]: seeded, schedule-independent simulation with Wilson
//!   intervals.

pub mod asymptotics;
pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod model;
pub mod montecarlo;

pub use error::{Error, Result};
pub use model::{BinsModelParams, Method, Model, ProbEstimate, SubsetModelParams};
