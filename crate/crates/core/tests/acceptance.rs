//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{enumerate_bins, enumerate_subset, falling_factorial};
use num_traits::ToPrimitive;
use occupancy::asymptotics::{perturbation_c, G, T_inverse};
use occupancy::combinatorics::{check_log_concave, falling_factorial_approx, LogReal};
use occupancy::exact::{
    bins_prob_exact, g_sequence, inclusion_exclusion_prob, q_sequence, subset_prob_exact,
    Arithmetic, IeOptions,
};
use occupancy::montecarlo::{simulate_bins, simulate_subset, TrialConfig};
use occupancy::{BinsModelParams, Model, SubsetModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn subset_grid() -> impl Iterator<Item = SubsetModelParams> {
    (1..=12u64).flat_map(|n| {
        (1..=n).flat_map(move |s| {
            (0..=n).flat_map(move |k| {
                (1..=3u64).map(move |r| SubsetModelParams::new(n, s, k, r).unwrap())
            })
        })
    })
}

fn bins_grid() -> impl Iterator<Item = BinsModelParams> {
    (0..=8u64).flat_map(|m| {
        (1..=4u64)
            .flat_map(move |n| (1..=3u64).map(move |r| BinsModelParams::new(m, n, r).unwrap()))
    })
}

fn subset_oracle() -> Outcome {
    let mut cases = 0;
    for p in subset_grid() {
        let want = enumerate_subset(p.universe, p.block_len, p.subset_size, p.min_hits);
        let got = subset_prob_exact(&p).map_err(|e| e.to_string())?.rational;
        if got.as_ref() != Some(&want) {
            return Err(format!("{p:?}: got {got:?}, enumeration {want}"));
        }
        cases += 1;
    }
    Ok(format!("{cases} parameter sets"))
}

fn bins_oracle() -> Outcome {
    let mut cases = 0;
    for p in bins_grid() {
        let want = enumerate_bins(p.balls, p.bins, p.min_load);
        let got = bins_prob_exact(&p).map_err(|e| e.to_string())?.rational;
        if got.as_ref() != Some(&want) {
            return Err(format!("{p:?}: got {got:?}, enumeration {want}"));
        }
        cases += 1;
    }
    Ok(format!("{cases} parameter sets"))
}

fn inclusion_exclusion() -> Outcome {
    let opts = IeOptions {
        arithmetic: Arithmetic::Exact,
        ..IeOptions::default()
    };
    let models = subset_grid()
        .map(|p| (Model::from(p), subset_prob_exact(&p).unwrap().rational.unwrap()))
        .chain(bins_grid().map(|p| (Model::from(p), bins_prob_exact(&p).unwrap().rational.unwrap())));
    let (mut cases, mut truncations) = (0, 0);
    for (model, truth) in models {
        let full = inclusion_exclusion_prob(&model, &opts);
        if full.exact.as_ref() != Some(&truth) {
            return Err(format!("{model:?}: full sum {:?} != {truth}", full.exact));
        }
        // every prefix of the full expansion is itself a Bonferroni truncation
        for (t, part) in full.exact_partial_sums.unwrap().iter().enumerate() {
            let ok = if t % 2 == 0 { part <= &truth } else { part >= &truth };
            if !ok {
                return Err(format!("{model:?}: truncation {} = {part} vs {truth}", t + 1));
            }
            let b = inclusion_exclusion_prob(
                &model,
                &IeOptions {
                    max_terms: Some(t + 1),
                    ..opts
                },
            );
            let v = truth.to_f64().unwrap();
            if !(b.lower <= v && v <= b.upper) {
                return Err(format!("{model:?}: T={} [{}, {}] misses {v}", t + 1, b.lower, b.upper));
            }
            truncations += 1;
        }
        cases += 1;
    }
    Ok(format!("{cases} models, {truncations} truncations"))
}

fn log_concavity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let big = i % 2 == 1;
        let subset = if big {
            let n = rng.random_range(20..=10_000u64);
            let s = rng.random_range(1..=(n / 4).max(1));
            SubsetModelParams::new(n, s, rng.random_range(0..=n), rng.random_range(1..=8)).unwrap()
        } else {
            let n = rng.random_range(1..=12u64);
            SubsetModelParams::new(n, rng.random_range(1..=n), rng.random_range(0..=n), rng.random_range(1..=3))
                .unwrap()
        };
        let bins = if big {
            BinsModelParams::new(rng.random_range(0..=10_000), rng.random_range(1..=500), rng.random_range(1..=8))
                .unwrap()
        } else {
            BinsModelParams::new(rng.random_range(0..=8), rng.random_range(1..=4), rng.random_range(1..=3)).unwrap()
        };
        let m = rng.random_range(1..=subset.n_blocks().min(10));
        let chk = check_log_concave(&g_sequence(&subset, m));
        if !chk.is_log_concave {
            return Err(format!("g for {subset:?}, m={m}: {chk:?}"));
        }
        let l = rng.random_range(1..=bins.bins.min(10));
        let chk = check_log_concave(&q_sequence(&bins, l));
        if !chk.is_log_concave {
            return Err(format!("q for {bins:?}, l={l}: {chk:?}"));
        }
    }
    Ok("200 randomized parameter sets".into())
}

fn convergence() -> Outcome {
    let target = (-1.0f64).exp();
    let mut gaps = Vec::new();
    for n in [10_000u64, 100_000] {
        let s = n / 100;
        let k = ((n / s) as f64 * ((n / s) as f64).ln()).ceil() as u64;
        let v = subset_prob_exact(&SubsetModelParams::new(n, s, k, 1).unwrap())
            .map_err(|e| e.to_string())?
            .value;
        gaps.push((n, k, v, (v - target).abs()));
    }
    let detail = gaps
        .iter()
        .map(|(n, k, v, g)| format!("N={n} K={k} p={v:.6} gap={g:.6}"))
        .collect::<Vec<_>>()
        .join("; ");
    if gaps.iter().all(|g| g.3 <= 0.05) && gaps[1].3 <= gaps[0].3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn limits_agree() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for r in [1u64, 2] {
        let cfg = TrialConfig::new(100_000, 17 + r);
        let sub = simulate_subset(&SubsetModelParams::new(1_000_000, 1000, 6908, r).unwrap(), &cfg)
            .map_err(|e| e.to_string())?;
        let bins = simulate_bins(&BinsModelParams::new(6908, 1000, r).unwrap(), &cfg)
            .map_err(|e| e.to_string())?;
        let diff = (sub.estimate - bins.estimate).abs();
        let tol = sub.half_width() + bins.half_width();
        ok &= diff < tol;
        lines.push(format!(
            "R={r}: subset {:.5} bins {:.5} |diff| {diff:.5} vs {tol:.5}",
            sub.estimate, bins.estimate
        ));
    }
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn perturbation() -> Outcome {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for a in [-2.0f64, -1.0, 0.0, 1.0, 2.0] {
        let c1 = perturbation_c(1_000_000, 1000, 2, a).map_err(|e| e.to_string())?;
        let rel = (c1 - (-a).exp()).abs() / (-a).exp();
        worst = worst.max(rel);
        lines.push(format!("a={a}: rel {rel:.4}"));
    }
    let detail = format!("{}; worst {worst:.4} vs 0.1", lines.join(", "));
    if worst <= 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for j in 0..=20u64 {
        for i in 1..=200 {
            let t = j as f64 + 50.0 * i as f64 / 200.0;
            let back = T_inverse(j, G(j as f64, t)).map_err(|e| format!("j={j} t={t}: {e}"))?;
            worst = worst.max((back - t).abs());
        }
    }
    let detail = format!("max error {worst:.3e}");
    if worst <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn falling_envelope() -> Outcome {
    let mut points = 0;
    for a in [50u64, 100, 1_000, 10_000] {
        for b in 2..=(a / 4).min(100) {
            let (approx, bound) = falling_factorial_approx(a, b).map_err(|e| e.to_string())?;
            let exact = LogReal::from_biguint(&falling_factorial(a, b));
            let rel = (approx.ln() - exact.ln()).exp_m1().abs();
            if rel > bound {
                return Err(format!("A={a} B={b}: {rel:.3e} > {bound:.3e}"));
            }
            points += 1;
        }
    }
    let (approx, _) = falling_factorial_approx(100, 5).unwrap();
    let rel = (approx.to_f64() / 9_034_502_400.0 - 1.0).abs();
    if (rel - 0.00154).abs() > 5e-5 {
        return Err(format!("A=100 B=5: rel {rel:.5}, expected about 0.00154"));
    }
    Ok(format!("{points} grid points; A=100 B=5 rel {rel:.5}"))
}

fn calibration() -> Outcome {
    let p = SubsetModelParams::new(10, 2, 5, 1).unwrap();
    let b = BinsModelParams::new(7, 3, 2).unwrap();
    let ps = subset_prob_exact(&p).unwrap().value;
    let pb = bins_prob_exact(&b).unwrap().value;
    let (mut cs, mut cb) = (0, 0);
    for seed in 0..100u64 {
        let cfg = TrialConfig::new(5_000, 7_000 + seed);
        cs += simulate_subset(&p, &cfg).unwrap().covers(ps) as u32;
        cb += simulate_bins(&b, &cfg).unwrap().covers(pb) as u32;
    }
    let cfg = TrialConfig::new(50_000, 42);
    let base_s = simulate_subset(&p, &cfg.with_workers(1)).unwrap();
    let base_b = simulate_bins(&b, &cfg.with_workers(1)).unwrap();
    let repro = [4, 16].iter().all(|&w| {
        simulate_subset(&p, &cfg.with_workers(w)).unwrap() == base_s
            && simulate_bins(&b, &cfg.with_workers(w)).unwrap() == base_b
    });
    let detail = format!("coverage subset {cs}/100, bins {cb}/100; reproducible across 1/4/16 workers: {repro}");
    if cs >= 90 && cb >= 90 && repro {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("subset exact equals enumeration", subset_oracle),
        ("bins exact equals enumeration", bins_oracle),
        ("inclusion/exclusion identity and Bonferroni sandwich", inclusion_exclusion),
        ("log-concavity of g and q", log_concavity),
        ("convergence toward 1/e at fixed N/S", convergence),
        ("subset and bins simulations agree", limits_agree),
        ("perturbed c within 10% of exp(-a)", perturbation),
        ("T_j round trip", round_trip),
        ("falling factorial envelope", falling_envelope),
        ("Monte Carlo calibration and reproducibility", calibration),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name} ({d}) [{secs:.2}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({d}) [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
