//! Adaptive segment test: decision rates against exact binomial enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segloc_core::segment_test::{adaptive_test, test_distribution};
use segloc_core::{
    Decision, Gate, GateKind, PrefixDistributions, QuantumProgram, TestMode, TestThresholds,
};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete, Normal};

fn g(kind: GateKind, q: &[usize]) -> Gate {
    Gate::new(kind, q).unwrap()
}

fn run(
    actual: &[f64],
    expected: &[f64],
    mode: TestMode,
    th: &TestThresholds,
    seed: u64,
) -> segloc_core::TestVerdict {
    test_distribution(
        actual,
        expected,
        1,
        7,
        mode,
        th,
        th.shot_limit,
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

/// `P[(Z + √λ)² > c]`, the one-degree noncentral tail.
fn power_dof1(c: f64, lambda: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    let (s, m) = (c.sqrt(), lambda.sqrt());
    (1.0 - n.cdf(s - m)) + n.cdf(-s - m)
}

/// Exact probabilities of (Bug, NoBug) after one look at `m` fair coin flips.
fn single_look_rates(m: u64, mode: TestMode, th: &TestThresholds) -> (f64, f64) {
    let binom = Binomial::new(0.5, m).unwrap();
    let chi1 = ChiSquared::new(1.0).unwrap();
    let crit = chi1.inverse_cdf(1.0 - th.alpha_nominal);
    let (mut bug, mut nobug) = (0.0, 0.0);
    for k in 0..=m {
        let e = m as f64 / 2.0;
        let stat = 2.0 * (k as f64 - e).powi(2) / e;
        let p = chi1.sf(stat);
        let w = binom.pmf(k);
        match mode {
            TestMode::Early => {
                if p < th.p_bug_early {
                    bug += w;
                } else if p >= th.p_nobug_early {
                    nobug += w;
                }
            }
            TestMode::Sufficient => {
                if p < th.p_bug_sufficient && power_dof1(crit, stat) >= th.power_bug_sufficient {
                    bug += w;
                } else if p >= th.p_nobug_sufficient {
                    nobug += w;
                }
            }
        }
    }
    (bug, nobug)
}

#[test]
fn single_look_rates_match_binomial() {
    let fair = [0.5, 0.5];
    for mode in [TestMode::Early, TestMode::Sufficient] {
        let th = TestThresholds {
            shot_limit: 100,
            ..TestThresholds::default()
        };
        let (want_bug, want_nobug) = single_look_rates(100, mode, &th);
        let n = 20_000;
        let (mut bug, mut nobug) = (0, 0);
        for seed in 0..n {
            let v = run(&fair, &fair, mode, &th, seed);
            assert_eq!(v.shots_used, 100);
            match v.decision {
                Decision::Bug => bug += 1,
                Decision::NoBug => nobug += 1,
                Decision::Inconclusive => {}
            }
        }
        for (got, want) in [(bug, want_bug), (nobug, want_nobug)] {
            let rate = got as f64 / n as f64;
            let se = (want * (1.0 - want) / n as f64).sqrt();
            assert!(
                (rate - want).abs() <= 4.0 * se,
                "{mode:?}: {rate} vs {want}"
            );
        }
        if mode == TestMode::Sufficient {
            // the power requirement makes a single look stricter than α
            assert!(want_bug < th.alpha_nominal);
        }
    }
}

#[test]
fn clean_two_outcome_prefix_rarely_alarms() {
    let th = TestThresholds::default();
    let fair = [0.5, 0.5];
    let n = 1000;
    let alarms = (0..n)
        .filter(|&s| run(&fair, &fair, TestMode::Sufficient, &th, s).decision == Decision::Bug)
        .count();
    // sequential looks inflate the single-look rate, the power gate keeps it below α
    assert!(
        (alarms as f64) / (n as f64) < th.alpha_nominal,
        "{alarms}/{n}"
    );
}

#[test]
fn collapsed_superposition_is_caught_in_first_batch() {
    // H replaced by X on one qubit: (0.5, 0.5) expected, |1⟩ observed
    let th = TestThresholds::default();
    for mode in [TestMode::Early, TestMode::Sufficient] {
        for seed in 0..1000 {
            let v = run(&[0.0, 1.0], &[0.5, 0.5], mode, &th, seed);
            assert_eq!(v.decision, Decision::Bug);
            assert_eq!(v.shots_used, 100);
        }
    }
}

#[test]
fn x_for_h_through_programs() {
    let reference = QuantumProgram::new(
        1,
        vec![vec![g(GateKind::H, &[0])], vec![g(GateKind::Z, &[0])]],
    )
    .unwrap();
    let mutant = reference
        .with_gate_replaced(1, 0, g(GateKind::X, &[0]))
        .unwrap();
    let oracle = PrefixDistributions::of(&reference);
    let th = TestThresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for x in 1..=2 {
        let v = adaptive_test(&mutant, &oracle, x, TestMode::Sufficient, &th, &mut rng).unwrap();
        assert_eq!(v.decision, Decision::Bug);
        assert_eq!(v.gates_executed, v.shots_used * x as u64);
        assert!(v.power.unwrap() >= 0.8);
    }
    let v = adaptive_test(&reference, &oracle, 2, TestMode::Early, &th, &mut rng).unwrap();
    assert_ne!(v.decision, Decision::Inconclusive);
    assert_eq!(v.power, None);
}

#[test]
fn impossible_outcome_is_certain_bug() {
    let th = TestThresholds::default();
    let mut expected = vec![0.0; 8];
    expected[0] = 1.0;
    let mut actual = vec![0.0; 8];
    actual[0] = 0.7;
    actual[3] = 0.3;
    for mode in [TestMode::Early, TestMode::Sufficient] {
        let v = run(&actual, &expected, mode, &th, 5);
        assert_eq!(v.decision, Decision::Bug);
        assert_eq!(v.p_value, 0.0);
        assert_eq!(v.power, Some(1.0));
    }
    let v = run(&expected, &expected, TestMode::Sufficient, &th, 5);
    assert_eq!(v.decision, Decision::NoBug);
}

#[test]
fn early_never_uses_more_shots_than_sufficient() {
    let th = TestThresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..300 {
        let n = rng.random_range(2..=8);
        let expected: Vec<f64> = vec![1.0 / n as f64; n];
        let mut actual: Vec<f64> = expected
            .iter()
            .map(|p| p + rng.random_range(0.0..0.05))
            .collect();
        let s: f64 = actual.iter().sum();
        actual.iter_mut().for_each(|a| *a /= s);
        let seed = rng.random();
        let early = run(&actual, &expected, TestMode::Early, &th, seed);
        let sufficient = run(&actual, &expected, TestMode::Sufficient, &th, seed);
        if sufficient.decision != Decision::Inconclusive {
            assert!(early.shots_used <= sufficient.shots_used);
        }
    }
}

#[test]
fn verdicts_are_deterministic_and_accounted() {
    let th = TestThresholds::default();
    let expected = [0.25, 0.25, 0.25, 0.25];
    let actual = [0.3, 0.2, 0.25, 0.25];
    for seed in 0..50 {
        for mode in [TestMode::Early, TestMode::Sufficient] {
            let a = run(&actual, &expected, mode, &th, seed);
            let b = run(&actual, &expected, mode, &th, seed);
            assert_eq!(a, b);
            assert_eq!(a.gates_executed, 7 * a.shots_used);
            assert_eq!(a.mode, mode);
            // batches 100, 200, 400, ... give cumulative 100 (2^k - 1)
            assert!(a.shots_used == th.shot_limit || (a.shots_used / 100 + 1).is_power_of_two());
        }
    }
}

#[test]
fn shot_limit_makes_test_inconclusive() {
    let th = TestThresholds {
        shot_limit: 300,
        ..TestThresholds::default()
    };
    // a tiny deviation cannot be resolved in 300 shots either way
    let expected = [0.5, 0.5];
    let actual = [0.52, 0.48];
    let inconclusive = (0..200)
        .filter(|&s| {
            run(&actual, &expected, TestMode::Sufficient, &th, s).decision == Decision::Inconclusive
        })
        .count();
    assert!(inconclusive > 0);
    for s in 0..200 {
        assert!(run(&actual, &expected, TestMode::Sufficient, &th, s).shots_used <= 300);
    }
}
