//! Parameter tuples and the common probability result type.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random `subset_size`-subset of `{1..universe}` against blocks of
/// `block_len`, each needing at least `min_hits` members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetModelParams {
    pub universe: u64,
    pub block_len: u64,
    pub subset_size: u64,
    pub min_hits: u64,
}

impl SubsetModelParams {
    pub fn new(universe: u64, block_len: u64, subset_size: u64, min_hits: u64) -> Result<Self> {
        let p = SubsetModelParams {
            universe,
            block_len,
            subset_size,
            min_hits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_len == 0 || self.block_len > self.universe {
            return Err(Error::InvalidParams(format!(
                "block length must satisfy 1 <= S <= N (S = {}, N = {})",
                self.block_len, self.universe
            )));
        }
        if self.subset_size > self.universe {
            return Err(Error::InvalidParams(format!(
                "subset size K = {} exceeds N = {}",
                self.subset_size, self.universe
            )));
        }
        if self.min_hits == 0 {
            return Err(Error::InvalidParams("R must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of full blocks, `floor(N/S)`.
    pub fn n_blocks(&self) -> u64 {
        self.universe / self.block_len
    }

    /// Elements past the last full block; they can be drawn but carry no
    /// hit requirement.
    pub fn remainder(&self) -> u64 {
        self.universe - self.n_blocks() * self.block_len
    }
}

/// `balls` thrown uniformly into `bins`, each needing at least `min_load`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinsModelParams {
    pub balls: u64,
    pub bins: u64,
    pub min_load: u64,
}

impl BinsModelParams {
    pub fn new(balls: u64, bins: u64, min_load: u64) -> Result<Self> {
        let p = BinsModelParams {
            balls,
            bins,
            min_load,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(Error::InvalidParams("need at least one bin".into()));
        }
        if self.min_load == 0 {
            return Err(Error::InvalidParams("R must be at least 1".into()));
        }
        Ok(())
    }

    /// The largest load that still counts as a failure, `R - 1`.
    pub fn r(&self) -> u64 {
        self.min_load - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Subset(SubsetModelParams),
    Bins(BinsModelParams),
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Subset(p) => p.validate(),
            Model::Bins(p) => p.validate(),
        }
    }
}

impl From<SubsetModelParams> for Model {
    fn from(p: SubsetModelParams) -> Self {
        Model::Subset(p)
    }
}

impl From<BinsModelParams> for Model {
    fn from(p: BinsModelParams) -> Self {
        Model::Bins(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Bonferroni,
    Asymptotic,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Bonferroni => "bonferroni",
            Method::Asymptotic => "asymptotic",
            Method::MonteCarlo => "mc",
        })
    }
}

/// A probability with optional rigorous bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbEstimate {
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub method: Method,
    /// Present when the value was computed in exact rational arithmetic.
    pub rational: Option<BigRational>,
    pub meta: BTreeMap<String, String>,
}

impl ProbEstimate {
    pub fn point(value: f64, method: Method) -> Self {
        ProbEstimate {
            value,
            lower: None,
            upper: None,
            method,
            rational: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }
}
