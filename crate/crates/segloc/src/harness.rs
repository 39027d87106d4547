//! Generate programs, inject bugs, run every method and aggregate.
//!
//! All randomness comes from ChaCha8 streams of `master_seed`: trial `t` uses
//! stream `4t` for generation and injection, then `4t + 1..=4t + 3` for the
//! three methods. Trials are therefore independent of scheduling, and the
//! report is identical for any degree of parallelism.

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use segloc_core::locator::{locate, locate_linear, locate_naive_binary};
use segloc_core::mutation::{generate_program, inject_bug, InjectedBug};
use segloc_core::{LocateResult, Method, SearchTree};

use crate::config::{ConfigError, ExperimentConfig};

const STREAMS_PER_TRIAL: u64 = 4;

/// The ChaCha8 stream with index `stream` under `master_seed`.
pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

fn method_stream(trial: usize, method: Method) -> u64 {
    let offset = match method {
        Method::CostBinary => 1,
        Method::NaiveBinary => 2,
        Method::Linear => 3,
    };
    trial as u64 * STREAMS_PER_TRIAL + offset
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Stream of `master_seed` used for generation and injection.
    pub stream: u64,
    pub total_gates_per_shot: u64,
    pub bug: Option<InjectedBug>,
    /// Why the trial produced no mutant, if it did not.
    pub skipped: Option<String>,
    /// One result per method, in [`Method::ALL`] order.
    pub results: Vec<LocateResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    /// Trials that produced a mutant.
    pub trials: usize,
    pub successes: usize,
    pub success_prob: f64,
    /// Over successful trials only.
    pub mean_gates: Option<f64>,
    /// Sample standard deviation over successful trials.
    pub std_gates: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub summaries: Vec<MethodSummary>,
    pub trials: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn summary(&self, method: Method) -> &MethodSummary {
        self.summaries
            .iter()
            .find(|s| s.method == method)
            .expect("every method is summarized")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// `method,trials,successes,success_prob,mean_gates,std_gates`
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "method",
            "trials",
            "successes",
            "success_prob",
            "mean_gates",
            "std_gates",
        ])
        .expect("in-memory write");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for s in &self.summaries {
            w.write_record([
                method_name(s.method).to_string(),
                s.trials.to_string(),
                s.successes.to_string(),
                s.success_prob.to_string(),
                opt(s.mean_gates),
                opt(s.std_gates),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::CostBinary => "CostBinary",
        Method::NaiveBinary => "NaiveBinary",
        Method::Linear => "Linear",
    }
}

/// Mean and sample standard deviation; `None` where undefined.
pub fn mean_and_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (Some(mean), None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some(var.sqrt()))
}

pub fn summarize(records: &[TrialRecord]) -> Vec<MethodSummary> {
    Method::ALL
        .iter()
        .enumerate()
        .map(|(i, &method)| {
            let results: Vec<&LocateResult> = records
                .iter()
                .filter(|r| r.bug.is_some())
                .map(|r| &r.results[i])
                .collect();
            let gates: Vec<f64> = results
                .iter()
                .filter(|r| r.success)
                .map(|r| r.trace.total_gates as f64)
                .collect();
            let (mean_gates, std_gates) = mean_and_std(&gates);
            let trials = results.len();
            MethodSummary {
                method,
                trials,
                successes: gates.len(),
                success_prob: if trials == 0 {
                    0.0
                } else {
                    gates.len() as f64 / trials as f64
                },
                mean_gates,
                std_gates,
                failures: trials - gates.len(),
            }
        })
        .collect()
}

pub fn run_trial(config: &ExperimentConfig, trial: usize) -> TrialRecord {
    let stream = trial as u64 * STREAMS_PER_TRIAL;
    let mut rng = trial_rng(config.master_seed, stream);
    let mut record = TrialRecord {
        trial,
        stream,
        total_gates_per_shot: 0,
        bug: None,
        skipped: None,
        results: Vec::new(),
    };
    let program = match generate_program(&config.gen, &mut rng) {
        Ok(p) => p,
        Err(e) => {
            record.skipped = Some(e.to_string());
            return record;
        }
    };
    record.total_gates_per_shot = program.total_gates();
    let (mutant, bug) = match inject_bug(&program, &mut rng, config.delta, config.max_attempts) {
        Ok(found) => found,
        Err(e) => {
            warn!("trial {trial}: skipped, {e}");
            record.skipped = Some(e.to_string());
            return record;
        }
    };

    let truth = bug.ground_truth_segment;
    let tree = SearchTree::cost_balanced(&program.prefix_costs());
    let locator = config.locator_config();
    let rng_for = |m| trial_rng(config.master_seed, method_stream(trial, m));
    let same_shape = "mutant shares the reference segmentation";
    record.results = Method::ALL
        .iter()
        .map(|&m| {
            let mut r = match m {
                Method::CostBinary => locate(&mutant, &program, &tree, &locator, rng_for(m)),
                Method::NaiveBinary => {
                    locate_naive_binary(&mutant, &program, &config.thresholds, rng_for(m))
                }
                Method::Linear => locate_linear(&mutant, &program, &config.thresholds, rng_for(m)),
            }
            .expect(same_shape);
            r.judge(truth);
            r
        })
        .collect();
    record.bug = Some(bug);
    record
}

/// Runs all trials on `parallelism` threads (0 means rayon's default).
pub fn run_experiment(
    config: &ExperimentConfig,
    parallelism: usize,
) -> Result<ExperimentReport, ConfigError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("thread pool");
    let trials: Vec<TrialRecord> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, t))
            .collect()
    });
    let skipped = trials.iter().filter(|t| t.bug.is_none()).count();
    info!(
        "{} trial(s) run, {} skipped without a visible bug",
        trials.len(),
        skipped
    );
    Ok(ExperimentReport {
        config: config.clone(),
        summaries: summarize(&trials),
        trials,
    })
}
