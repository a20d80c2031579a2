//! Seeded simulation of both models.
//!
//! Trial `i` draws from a ChaCha8 stream keyed by the master seed with stream
//! id `i`, so the outcome of every trial is fixed before scheduling and the
//! success count is identical for any number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::{BinsModelParams, Method, ProbEstimate, SubsetModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub confidence: f64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl TrialConfig {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        TrialConfig {
            trials,
            master_seed,
            confidence: 0.95,
            workers: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParams("need at least one trial".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParams(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

impl McResult {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_upper - self.ci_lower)
    }

    pub fn covers(&self, p: f64) -> bool {
        self.ci_lower <= p && p <= self.ci_upper
    }

    pub fn estimate(&self) -> ProbEstimate {
        let mut est = ProbEstimate::point(self.estimate, Method::MonteCarlo);
        est.lower = Some(self.ci_lower);
        est.upper = Some(self.ci_upper);
        est.with_meta("successes", self.successes)
            .with_meta("trials", self.trials)
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let z = Normal::standard().inverse_cdf(0.5 + 0.5 * confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

fn finish(successes: u64, cfg: &TrialConfig) -> McResult {
    let (ci_lower, ci_upper) = wilson_interval(successes, cfg.trials, cfg.confidence);
    McResult {
        successes,
        trials: cfg.trials,
        estimate: successes as f64 / cfg.trials as f64,
        ci_lower,
        ci_upper,
    }
}

fn base_rng(master_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(master_seed)
}

fn trial_rng(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng.set_word_pos(0);
    rng
}

fn count_successes<S, F>(cfg: &TrialConfig, init: impl Fn() -> S + Sync + Send, trial: F) -> u64
where
    F: Fn(&mut S, &mut ChaCha8Rng) -> bool + Sync + Send,
{
    let base = base_rng(cfg.master_seed);
    let run = || {
        (0..cfg.trials)
            .into_par_iter()
            .map_init(&init, |state, i| {
                let mut rng = trial_rng(&base, i);
                trial(state, &mut rng) as u64
            })
            .sum::<u64>()
    };
    if cfg.workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .expect("thread pool")
            .install(run)
    }
}

/// Per-worker scratch for the subset sampler.
struct SubsetScratch {
    chosen: FxHashSet<u64>,
    hits: Vec<u64>,
}

/// Floyd's algorithm: a uniform `k`-subset of `0..n` in `O(k)` time and
/// memory. Calls `visit` once per chosen element.
fn floyd_sample(
    rng: &mut impl Rng,
    n: u64,
    k: u64,
    chosen: &mut FxHashSet<u64>,
    mut visit: impl FnMut(u64),
) {
    chosen.clear();
    for j in (n - k)..n {
        let t = rng.random_range(0..=j);
        let pick = if chosen.insert(t) {
            t
        } else {
            chosen.insert(j);
            j
        };
        visit(pick);
    }
}

pub fn simulate_subset(p: &SubsetModelParams, cfg: &TrialConfig) -> Result<McResult> {
    p.validate()?;
    cfg.validate()?;
    let nb = p.n_blocks();
    let covered = nb * p.block_len;
    // pigeonhole: never enough elements to go round
    if (p.subset_size as u128) < (p.min_hits as u128) * (nb as u128) {
        return Ok(finish(0, cfg));
    }
    let successes = count_successes(
        cfg,
        || SubsetScratch {
            chosen: FxHashSet::with_capacity_and_hasher(p.subset_size as usize, Default::default()),
            hits: vec![0; nb as usize],
        },
        |scratch, rng| {
            scratch.hits.iter_mut().for_each(|h| *h = 0);
            let hits = &mut scratch.hits;
            floyd_sample(rng, p.universe, p.subset_size, &mut scratch.chosen, |e| {
                if e < covered {
                    hits[(e / p.block_len) as usize] += 1;
                }
            });
            hits.iter().all(|&h| h >= p.min_hits)
        },
    );
    Ok(finish(successes, cfg))
}

pub fn simulate_bins(p: &BinsModelParams, cfg: &TrialConfig) -> Result<McResult> {
    p.validate()?;
    cfg.validate()?;
    if (p.balls as u128) < (p.min_load as u128) * (p.bins as u128) {
        return Ok(finish(0, cfg));
    }
    let successes = count_successes(
        cfg,
        || vec![0u64; p.bins as usize],
        |loads, rng| {
            loads.iter_mut().for_each(|l| *l = 0);
            for _ in 0..p.balls {
                loads[rng.random_range(0..p.bins) as usize] += 1;
            }
            loads.iter().all(|&l| l >= p.min_load)
        },
    );
    Ok(finish(successes, cfg))
}

/// Uniform `k`-subset of `0..n` from the subset sampler, for inspection.
pub fn sample_subset(n: u64, k: u64, master_seed: u64, trial: u64) -> Vec<u64> {
    assert!(k <= n);
    let mut rng = trial_rng(&base_rng(master_seed), trial);
    let mut chosen = FxHashSet::default();
    let mut out = Vec::with_capacity(k as usize);
    floyd_sample(&mut rng, n, k, &mut chosen, |e| out.push(e));
    out
}
