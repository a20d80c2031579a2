use occupancy::exact::{bins_prob_exact, inclusion_exclusion_prob, subset_prob_exact, IeOptions};
use occupancy::montecarlo::{sample_subset, simulate_bins, simulate_subset, TrialConfig};
use occupancy::{BinsModelParams, SubsetModelParams};

#[test]
fn worker_count_does_not_change_results() {
    let p = SubsetModelParams::new(200, 20, 40, 2).unwrap();
    let b = BinsModelParams::new(30, 6, 3).unwrap();
    let base = TrialConfig::new(20_000, 99);
    let s1 = simulate_subset(&p, &base.with_workers(1)).unwrap();
    let b1 = simulate_bins(&b, &base.with_workers(1)).unwrap();
    for w in [4, 16] {
        assert_eq!(simulate_subset(&p, &base.with_workers(w)).unwrap(), s1);
        assert_eq!(simulate_bins(&b, &base.with_workers(w)).unwrap(), b1);
    }
    assert_eq!(simulate_subset(&p, &base).unwrap(), s1);
}

#[test]
fn intervals_are_calibrated() {
    let p = SubsetModelParams::new(12, 3, 6, 1).unwrap();
    let b = BinsModelParams::new(8, 3, 2).unwrap();
    let ps = subset_prob_exact(&p).unwrap().value;
    let pb = bins_prob_exact(&b).unwrap().value;
    let (mut cs, mut cb) = (0, 0);
    for seed in 0..100 {
        let cfg = TrialConfig::new(2_000, 1_000 + seed);
        cs += simulate_subset(&p, &cfg).unwrap().covers(ps) as u32;
        cb += simulate_bins(&b, &cfg).unwrap().covers(pb) as u32;
    }
    assert!(cs >= 90, "subset coverage {cs}/100");
    assert!(cb >= 90, "bins coverage {cb}/100");
}

#[test]
fn single_draws_are_uniform() {
    let n = 50u64;
    let trials = 200_000u64;
    let mut freq = vec![0u64; n as usize];
    for t in 0..trials {
        freq[sample_subset(n, 1, 5, t)[0] as usize] += 1;
    }
    let mean = trials as f64 / n as f64;
    let sd = (trials as f64 * (1.0 / n as f64) * (1.0 - 1.0 / n as f64)).sqrt();
    for (e, &f) in freq.iter().enumerate() {
        assert!((f as f64 - mean).abs() <= 5.0 * sd, "element {e}: {f}");
    }
}

#[test]
fn pairs_are_uniform() {
    // every 3-subset of 0..6 should be equally likely
    let trials = 400_000u64;
    let mut counts = std::collections::HashMap::new();
    for t in 0..trials {
        let mut s = sample_subset(6, 3, 21, t);
        s.sort_unstable();
        *counts.entry(s).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 20);
    let e = trials as f64 / 20.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
    // 19 degrees of freedom, 99.9th percentile about 43.8
    assert!(chi2 < 43.8, "{chi2}");
}

#[test]
fn simulation_agrees_with_bonferroni() {
    let cfg = TrialConfig::new(50_000, 3);
    for (n, s, k, r) in [(100u64, 10u64, 40u64, 2u64), (60, 6, 30, 1), (500, 50, 150, 2)] {
        let p = SubsetModelParams::new(n, s, k, r).unwrap();
        let b = inclusion_exclusion_prob(&p.into(), &IeOptions::default());
        let mc = simulate_subset(&p, &cfg).unwrap();
        assert!(mc.ci_lower <= b.upper && b.lower <= mc.ci_upper, "{p:?} {mc:?} {b:?}");
    }
    for (m, n, r) in [(40u64, 8u64, 3u64), (100, 20, 2)] {
        let p = BinsModelParams::new(m, n, r).unwrap();
        let b = inclusion_exclusion_prob(&p.into(), &IeOptions::default());
        let mc = simulate_bins(&p, &cfg).unwrap();
        assert!(mc.ci_lower <= b.upper && b.lower <= mc.ci_upper, "{p:?} {mc:?} {b:?}");
    }
}

#[test]
fn result_invariants_hold() {
    for seed in 0..20 {
        let r = simulate_bins(&BinsModelParams::new(10, 4, 2).unwrap(), &TrialConfig::new(777, seed)).unwrap();
        assert!(r.successes <= r.trials);
        assert!(r.ci_lower <= r.estimate && r.estimate <= r.ci_upper);
        assert!(r.ci_lower >= 0.0 && r.ci_upper <= 1.0);
    }
}
