use std::time::Instant;

use occupancy::asymptotics::{c_subset, c_bins, perturbation_c, threshold_k, validity};
use occupancy::exact::{
    bins_prob_exact_with, inclusion_exclusion_prob, subset_prob_exact_with, Arithmetic, Budget,
    IeOptions,
};
use occupancy::montecarlo::{simulate_bins, simulate_subset, wilson_interval, TrialConfig};
use occupancy::{BinsModelParams, Error, Model, SubsetModelParams};
use rayon::prelude::*;

use crate::cli::{
    ArithmeticArg, BinsArgs, MethodArg, OutputArgs, RunArgs, SubsetArgs, SweepArgs, SweepVar,
    ThresholdArgs, ValidityArgs,
};
use crate::record::{Num, OutputRecord};

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INVALID: u8 = 2;
    pub const OVER_BUDGET: u8 = 3;
    pub const DOMAIN: u8 = 4;
    pub const DISAGREEMENT: u8 = 5;
}

const MC_CHECK_CONFIDENCE: f64 = 0.999;
const MAX_GRID_POINTS: u64 = 1_000_000;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: exit::INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::Precondition(_) => exit::INVALID,
            Error::BudgetExceeded { .. } => exit::OVER_BUDGET,
            Error::Domain { .. } => exit::DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub struct Report {
    pub records: Vec<OutputRecord>,
    pub output: OutputArgs,
    pub code: u8,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(records: Vec<OutputRecord>, output: &OutputArgs) -> Self {
        let mut records = records;
        if output.no_timing {
            records.iter_mut().for_each(|r| r.runtime_ms = None);
        }
        Report {
            records,
            output: output.clone(),
            code: exit::OK,
            warnings: Vec::new(),
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis() as u64)
}

fn blank(model: &Model, method: &str) -> OutputRecord {
    match model {
        Model::Subset(p) => OutputRecord::subset(p, method),
        Model::Bins(p) => OutputRecord::bins(p, method),
    }
}

fn budget(run: &RunArgs) -> Budget {
    Budget {
        exact_limit: run.exact_budget,
        limit: run.budget,
    }
}

fn arithmetic(run: &RunArgs) -> Arithmetic {
    match run.arithmetic {
        ArithmeticArg::Auto => Arithmetic::Auto,
        ArithmeticArg::Exact => Arithmetic::Exact,
        ArithmeticArg::Log => Arithmetic::LogSpace,
    }
}

/// Records for one parameter point, plus whether the simulation disagreed
/// with the exact answer.
struct Evaluation {
    records: Vec<OutputRecord>,
    disagreement: Option<String>,
}

fn evaluate(model: &Model, run: &RunArgs) -> Result<Evaluation, Failure> {
    model.validate()?;
    let all = run.method.contains(&MethodArg::All);
    let wanted = |m: MethodArg| all || run.method.contains(&m);
    let report = validity(model);
    let mut records = Vec::new();
    let mut reference: Option<(f64, f64)> = None;

    if wanted(MethodArg::Exact) {
        let (res, ms) = timed(|| match model {
            Model::Subset(p) => subset_prob_exact_with(p, &budget(run), arithmetic(run)),
            Model::Bins(p) => bins_prob_exact_with(p, &budget(run), arithmetic(run)),
        });
        match res {
            Ok(est) => {
                reference = Some((est.value, 0.0));
                let mut r = blank(model, "exact").with_estimate(&est);
                r.runtime_ms = Some(ms);
                records.push(r);
            }
            Err(Error::BudgetExceeded { cost, budget }) if all => {
                let mut r = blank(model, "exact");
                r.push_note(&format!("skipped: cost {cost} exceeds budget {budget}"));
                records.push(r);
            }
            Err(e) => return Err(e.into()),
        }
    }

    if wanted(MethodArg::Bonferroni) {
        let opts = IeOptions {
            max_terms: run.max_terms,
            arithmetic: arithmetic(run),
            budget: budget(run),
            ..IeOptions::default()
        };
        let (b, ms) = timed(|| inclusion_exclusion_prob(model, &opts));
        if let Some((v, _)) = reference {
            if !(b.lower <= v && v <= b.upper) {
                return Err(Failure {
                    code: exit::DISAGREEMENT,
                    message: format!("exact value {v} outside Bonferroni bounds [{}, {}]", b.lower, b.upper),
                });
            }
        } else if b.complete {
            reference = Some((0.5 * (b.lower + b.upper), 0.5 * (b.upper - b.lower)));
        }
        let mut r = blank(model, "bonferroni").with_estimate(&b.estimate());
        r.runtime_ms = Some(ms);
        records.push(r);
    }

    if wanted(MethodArg::Asymptotic) {
        let (c, ms) = timed(|| match model {
            Model::Subset(p) => c_subset(p),
            Model::Bins(p) => c_bins(p),
        });
        let mut r = blank(model, "asymptotic").with_c(&c);
        r.value = Some(Num::new(c.prob));
        if let Some((v, _)) = reference {
            r.push_note(&format!("diff_vs_exact={:.6e}", c.prob - v));
        }
        r.runtime_ms = Some(ms);
        records.push(r);
    }

    let mut disagreement = None;
    if wanted(MethodArg::Mc) {
        let cfg = TrialConfig::new(run.trials, run.seed).with_workers(run.workers);
        let (res, ms) = timed(|| match model {
            Model::Subset(p) => simulate_subset(p, &cfg),
            Model::Bins(p) => simulate_bins(p, &cfg),
        });
        let mc = res?;
        let mut r = blank(model, "mc").with_estimate(&mc.estimate());
        r.push_note(&format!("seed={}", run.seed));
        r.runtime_ms = Some(ms);
        if let (true, Some((v, slack))) = (all, reference) {
            let (lo, hi) = wilson_interval(mc.successes, mc.trials, MC_CHECK_CONFIDENCE);
            if v + slack < lo || v - slack > hi {
                disagreement = Some(format!(
                    "simulation interval [{lo}, {hi}] at {MC_CHECK_CONFIDENCE} excludes {v}"
                ));
                r.push_note("disagrees_with_exact");
            }
        }
        records.push(r);
    }

    for r in &mut records {
        *r = std::mem::take(r).with_validity(&report);
    }
    Ok(Evaluation {
        records,
        disagreement,
    })
}

fn subset_model(a: &SubsetArgs) -> Result<Model, Failure> {
    Ok(SubsetModelParams::new(a.universe, a.block_len, a.subset_size, a.min_hits)?.into())
}

fn bins_model(a: &BinsArgs) -> Result<Model, Failure> {
    Ok(BinsModelParams::new(a.balls, a.bins, a.min_load)?.into())
}

fn finish_evaluation(eval: Evaluation, run: &RunArgs) -> Report {
    let mut report = Report::new(eval.records, &run.output);
    if let Some(msg) = eval.disagreement {
        report.code = exit::DISAGREEMENT;
        report.warnings.push(msg);
    }
    report
}

pub fn prob_subset(params: &SubsetArgs, run: &RunArgs) -> Result<Report, Failure> {
    let model = subset_model(params)?;
    Ok(finish_evaluation(evaluate(&model, run)?, run))
}

pub fn prob_bins(params: &BinsArgs, run: &RunArgs) -> Result<Report, Failure> {
    let model = bins_model(params)?;
    Ok(finish_evaluation(evaluate(&model, run)?, run))
}

pub fn threshold(args: &ThresholdArgs) -> Result<Report, Failure> {
    let p = args.target_prob;
    if !(p > 0.0 && p < 1.0) {
        return Err(Failure::invalid(format!("target probability must lie in (0, 1), got {p}")));
    }
    let (k, ms) = timed(|| threshold_k(args.universe, args.block_len, args.min_hits, -p.ln()));
    let params = SubsetModelParams::new(args.universe, args.block_len, k?, args.min_hits)?;
    let c = c_subset(&params);
    let mut r = OutputRecord::subset(&params, "threshold")
        .with_c(&c)
        .with_validity(&validity(&params.into()));
    r.target_prob = Some(Num::new(p));
    r.value = Some(Num::new(c.prob));
    r.runtime_ms = Some(ms);
    Ok(Report::new(vec![r], &args.output))
}

pub fn validity_cmd(args: &ValidityArgs) -> Result<Report, Failure> {
    let model: Model = match (args.universe, args.block_len, args.subset_size, args.balls, args.bins) {
        (Some(n), Some(s), Some(k), None, None) => {
            SubsetModelParams::new(n, s, k, args.min_hits)?.into()
        }
        (None, None, None, Some(m), Some(n)) => BinsModelParams::new(m, n, args.min_hits)?.into(),
        _ => {
            return Err(Failure::invalid(
                "give either --N --S --K --R or --m --n --R",
            ))
        }
    };
    let report = validity(&model);
    let mut r = blank(&model, "validity").with_validity(&report);
    if let Some(s) = &report.subset {
        for (name, v, c) in [
            ("ratio_a", s.ratio_a, s.class_a),
            ("ratio_b", s.ratio_b, s.class_b),
            ("ratio_c1", s.ratio_c1, s.class_c1),
            ("ratio_c2", s.ratio_c2, s.class_c2),
        ] {
            r.push_note(&format!("{name}={v:.4e} ({})", c.as_str()));
        }
        r.push_note(&format!("alpha={:.4e}", s.alpha));
    }
    if let Some(b) = &report.bins {
        for (name, v, c) in [
            ("r_over_sqrt", b.r_over_sqrt, b.class_r),
            ("m_over_n2", b.m_over_n2, b.class_m),
            ("nr_over_m", b.nr_over_m, b.class_nr),
        ] {
            r.push_note(&format!("{name}={v:.4e} ({})", c.as_str()));
        }
    }
    Ok(Report::new(vec![r], &args.output))
}

fn grid(args: &SweepArgs) -> Result<Vec<f64>, Failure> {
    let (from, to, step) = (args.from, args.to, args.step);
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 {
        return Err(Failure::invalid("sweep bounds must be finite and the step positive"));
    }
    if from > to {
        return Err(Failure::invalid(format!("empty sweep range {from}..{to}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as u64 + 1;
    if count > MAX_GRID_POINTS {
        return Err(Failure::invalid(format!("sweep has {count} points, limit {MAX_GRID_POINTS}")));
    }
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

fn as_count(x: f64) -> Result<u64, Failure> {
    let r = x.round();
    if r < 0.0 || (x - r).abs() > 1e-9 {
        return Err(Failure::invalid(format!("grid value {x} is not a nonnegative integer")));
    }
    Ok(r as u64)
}

fn need(v: Option<u64>, flag: &str) -> Result<u64, Failure> {
    v.ok_or_else(|| Failure::invalid(format!("sweep needs --{flag}")))
}

fn sweep_point(args: &SweepArgs, x: f64) -> Result<Evaluation, Failure> {
    let bins_mode = matches!(args.vary, SweepVar::Balls | SweepVar::Bins)
        || args.balls.is_some()
        || args.bins.is_some();
    if args.vary == SweepVar::Shift {
        let (n, s, r) = (need(args.universe, "N")?, need(args.block_len, "S")?, need(args.min_hits, "R")?);
        let c1 = perturbation_c(n, s, r, x)?;
        let mut rec = OutputRecord {
            model: "subset".into(),
            method: "perturbation".into(),
            universe: Some(n),
            block_len: Some(s),
            min_hits: Some(r),
            a: Some(Num::new(x)),
            c: Some(Num::new(c1)),
            log_c: Some(Num::new(c1.ln())),
            value: Some(Num::new((-c1).exp())),
            ..Default::default()
        };
        rec.push_note(&format!("exp(-a)={:.6e}", (-x).exp()));
        return Ok(Evaluation {
            records: vec![rec],
            disagreement: None,
        });
    }
    let v = as_count(x)?;
    let pick = |var: SweepVar, fixed: Option<u64>, flag: &str| {
        if args.vary == var {
            Ok(v)
        } else {
            need(fixed, flag)
        }
    };
    let model: Model = if bins_mode {
        BinsModelParams::new(
            pick(SweepVar::Balls, args.balls, "m")?,
            pick(SweepVar::Bins, args.bins, "n")?,
            pick(SweepVar::MinHits, args.min_hits, "R")?,
        )?
        .into()
    } else {
        SubsetModelParams::new(
            pick(SweepVar::Universe, args.universe, "N")?,
            pick(SweepVar::BlockLen, args.block_len, "S")?,
            pick(SweepVar::SubsetSize, args.subset_size, "K")?,
            pick(SweepVar::MinHits, args.min_hits, "R")?,
        )?
        .into()
    };
    evaluate(&model, &args.run)
}

pub fn sweep(args: &SweepArgs) -> Result<Report, Failure> {
    if matches!(args.vary, SweepVar::Universe | SweepVar::BlockLen | SweepVar::SubsetSize)
        && (args.balls.is_some() || args.bins.is_some())
    {
        return Err(Failure::invalid("cannot vary a subset parameter with --m/--n fixed"));
    }
    let points = grid(args)?;
    let results: Vec<Result<Evaluation, Failure>> =
        points.par_iter().map(|&x| sweep_point(args, x)).collect();
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for res in results {
        let eval = res?;
        records.extend(eval.records);
        warnings.extend(eval.disagreement);
    }
    let mut report = Report::new(records, &args.run.output);
    if !warnings.is_empty() {
        report.code = exit::DISAGREEMENT;
        report.warnings = warnings;
    }
    Ok(report)
}
