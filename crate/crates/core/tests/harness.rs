use psl::harness::{
    estimate_risk, estimate_sat_probability, sweep, verify_concentration,
    verify_conditional_expectation, verify_pair_lemma, verify_risk_floor, ExperimentConfig,
    GroupPattern, PairRegime, Regime, CSV_HEADER,
};
use psl::Test;

fn cfg(test: Test, k: usize, n: usize, regime: Regime, trials: u64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        k,
        n,
        regime,
        detector: test,
        trials,
        seed,
        limit: 32,
    }
}

fn grid() -> Vec<ExperimentConfig> {
    vec![
        cfg(Test::Coupling, 2, 400, Regime::Sqrt(20.0), 100, 1),
        cfg(Test::Sat, 3, 20, Regime::Linear(4.0), 50, 2),
        cfg(Test::Lr, 3, 18, Regime::Linear(2.0), 50, 3),
        cfg(Test::Lr, 3, 60, Regime::Linear(4.0), 5, 4),
    ]
}

fn sweep_bytes(threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    let mut out = Vec::new();
    pool.install(|| sweep(&grid(), &mut out)).unwrap();
    out
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_thread_counts() {
    let a = sweep_bytes(1);
    let b = sweep_bytes(1);
    let c = sweep_bytes(4);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), grid().len());
}

#[test]
fn coupling_risk_shrinks_as_c_grows() {
    let risks: Vec<f64> = [5.0, 30.0, 120.0]
        .into_iter()
        .map(|c| {
            estimate_risk(&cfg(Test::Coupling, 2, 2500, Regime::Sqrt(c), 300, 7))
                .unwrap()
                .risk
        })
        .collect();
    assert!(risks[0] > risks[2], "{risks:?}");
    for w in risks.windows(2) {
        assert!(w[1] <= w[0] + 0.05, "{risks:?}");
    }
    assert!(risks[2] < 0.05, "{risks:?}");
}

#[test]
fn sat_probability_falls_with_density() {
    let rates: Vec<f64> = [1.0, 3.0, 5.0, 7.0]
        .into_iter()
        .map(|d| {
            let m = Regime::Linear(d).clauses(16).unwrap();
            estimate_sat_probability(3, 16, m, 300, 9, 32).unwrap().rate
        })
        .collect();
    for w in rates.windows(2) {
        assert!(w[1] <= w[0] + 0.03, "{rates:?}");
    }
    assert!(rates[0] > 0.95 && rates[3] < 0.2, "{rates:?}");
}

#[test]
fn sat_test_never_errs_on_planted() {
    let r = estimate_risk(&cfg(Test::Sat, 3, 30, Regime::Linear(6.0), 200, 5)).unwrap();
    assert_eq!(r.type2, 0.0);
    assert!(r.type1 < 0.5);
}

#[test]
fn risk_floor_holds_for_every_builtin_test() {
    let checks = verify_risk_floor(0.05, 10_000, 3, 400, 13, 32).unwrap();
    assert_eq!(checks.len(), 3);
    for c in &checks {
        assert!(c.pass, "{c:?}");
    }
}

#[test]
fn pair_lemma_small_sqrt_regime() {
    let r = verify_pair_lemma(PairRegime::Sqrt { c: 30.0 }, 40_000, 3, 100, 17).unwrap();
    assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
    assert!((r.mean_t - 450.0).abs() < 45.0, "{}", r.mean_t);
}

#[test]
fn concentration_direction_small() {
    let r = verify_concentration(3, Regime::Linear(3.0), &[10, 14, 18], 40, 19, 32, 0.7).unwrap();
    assert_eq!(r.rows.len(), 3);
    assert!(
        r.rows.iter().all(|row| row.median_log_ratio < 0.0),
        "{:?}",
        r.rows
    );
}

#[test]
fn conditional_expectation_small() {
    for (sigma, target) in [(1i8, 5.0), (-1, 4.0)] {
        let p = GroupPattern::single_pair(2, sigma).unwrap();
        let r = verify_conditional_expectation(3, 2, &p, 20_000, 23, 32).unwrap();
        assert_eq!(r.expected, target);
        assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
    }
}
