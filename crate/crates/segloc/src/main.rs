use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use segloc::harness::method_name;
use segloc::{parse_program, run_experiment, serialize_program, ExperimentConfig};
use segloc_core::locator::{locate, locate_linear, locate_naive_binary};
use segloc_core::mutation::{generate_program, inject_bug, GenSpec};
use segloc_core::return_analysis::{posterior_return_probability, ReturnRiskQuery};
use segloc_core::{LocatorConfig, QuantumProgram, SearchTree, TestThresholds};

/// Locate the first buggy segment of a segmented quantum program.
///
/// Set RUST_LOG (e.g. RUST_LOG=info) for progress output.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random program, optionally with a bug-injected copy.
    Generate {
        /// JSON generation spec; omitted fields take defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write a mutant with one replaced gate and print the bug as JSON.
        #[arg(long)]
        mutant: Option<PathBuf>,
        /// Visibility threshold for the injected bug.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Search a program under test against its reference.
    Locate {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        mutant: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Cost)]
        method: MethodArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON locator config (thresholds, look-back length, limits).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the full result with its trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the cost-balanced search tree as JSON.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Run all methods over many generated programs.
    Experiment {
        /// JSON experiment config; omitted fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Summary CSV.
        #[arg(long)]
        out: PathBuf,
        /// Full report with per-trial records.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
    },
    /// Tabulate the approximate probability of returning to a node.
    Analyze {
        /// Segment counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<usize>,
        /// Tested segments.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<usize>,
        /// L edges from the node onward.
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.1")]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.2")]
        beta: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Cost,
    Naive,
    Linear,
}

fn read_json<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn read_program(path: &Path) -> Result<QuantumProgram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_program(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn generate(spec: Option<&Path>, out: &Path, mutant: Option<&Path>, delta: f64) -> Result<()> {
    let spec: GenSpec = read_json(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let program = generate_program(&spec, &mut rng)?;
    write(out, &serialize_program(&program))?;
    if let Some(path) = mutant {
        let (m, bug) = inject_bug(&program, &mut rng, delta, 100)?;
        write(path, &serialize_program(&m))?;
        println!("{}", serde_json::to_string_pretty(&bug)?);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn locate_cmd(
    reference: &Path,
    mutant: &Path,
    method: MethodArg,
    seed: u64,
    config: Option<&Path>,
    trace: Option<&Path>,
    tree_out: Option<&Path>,
) -> Result<()> {
    let reference = read_program(reference)?;
    let mutant = read_program(mutant)?;
    let config: LocatorConfig = read_json(config)?;
    config.thresholds.validate()?;
    let th: TestThresholds = config.thresholds;
    let tree = SearchTree::cost_balanced(&reference.prefix_costs());
    let rng = ChaCha8Rng::seed_from_u64(seed);
    let result = match method {
        MethodArg::Cost => locate(&mutant, &reference, &tree, &config, rng),
        MethodArg::Naive => locate_naive_binary(&mutant, &reference, &th, rng),
        MethodArg::Linear => locate_linear(&mutant, &reference, &th, rng),
    }?;
    if let Some(p) = tree_out {
        write(p, &serde_json::to_string_pretty(&tree)?)?;
    }
    if let Some(p) = trace {
        write(p, &serde_json::to_string_pretty(&result)?)?;
    }
    let name = method_name(result.method);
    match (result.located_segment, result.failure) {
        (Some(x), _) => println!(
            "{name}: segment {x} ({} gates, {} tests, {} restarts)",
            result.trace.total_gates,
            result.trace.tests.len(),
            result.trace.restarts
        ),
        (None, Some(f)) => println!(
            "{name}: failed, {f} ({} gates, {} tests)",
            result.trace.total_gates,
            result.trace.tests.len()
        ),
        (None, None) => unreachable!("a result has a segment or a failure"),
    }
    Ok(())
}

fn experiment(
    config: Option<&Path>,
    out: &Path,
    json: Option<&Path>,
    parallelism: usize,
) -> Result<()> {
    let config: ExperimentConfig = read_json(config)?;
    let report = run_experiment(&config, parallelism)?;
    let csv = report.to_csv();
    write(out, &csv)?;
    if let Some(p) = json {
        write(p, &report.to_json())?;
    }
    print!("{csv}");
    Ok(())
}

fn analyze(l: &[usize], x: &[usize], w: &[usize], alpha: &[f64], beta: &[f64]) -> Result<()> {
    println!(
        "{:>4} {:>4} {:>3} {:>8} {:>8} {:>14}",
        "l", "x", "w", "alpha", "beta", "P(B|A)"
    );
    let mut rows = 0;
    for &l in l {
        for &x in x {
            for &w in w {
                for &alpha in alpha {
                    for &beta in beta {
                        let q = ReturnRiskQuery {
                            segment_count: l,
                            tested_segment: x,
                            l_edges: w,
                            alpha,
                            beta,
                            path_length: w,
                        };
                        match posterior_return_probability(&q) {
                            Ok(p) => {
                                println!("{l:>4} {x:>4} {w:>3} {alpha:>8} {beta:>8} {p:>14.6e}");
                                rows += 1;
                            }
                            Err(e) => log::warn!("skipping l={l} x={x} w={w}: {e}"),
                        }
                    }
                }
            }
        }
    }
    if rows == 0 {
        bail!("no valid parameter combination");
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Generate {
            spec,
            out,
            mutant,
            delta,
        } => generate(spec.as_deref(), &out, mutant.as_deref(), delta),
        Command::Locate {
            reference,
            mutant,
            method,
            seed,
            config,
            trace,
            tree,
        } => locate_cmd(
            &reference,
            &mutant,
            method,
            seed,
            config.as_deref(),
            trace.as_deref(),
            tree.as_deref(),
        ),
        Command::Experiment {
            config,
            out,
            json,
            parallelism,
        } => experiment(config.as_deref(), &out, json.as_deref(), parallelism),
        Command::Analyze {
            l,
            x,
            w,
            alpha,
            beta,
        } => analyze(&l, &x, &w, &alpha, &beta),
    }
}
