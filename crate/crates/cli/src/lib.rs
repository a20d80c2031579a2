//! Front end for the `occupancy` library: argument parsing, evaluation of
//! each requested method, and record output.

pub mod cli;
pub mod record;
pub mod run;
