use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dpbai_core::maxdet::{coordinates_in_basis, max_det_collection, reduce_dimension};
use dpbai_core::schedule::{phase_schedule_with, BranchRule, NominalBranch};
use dpbai_core::Privacy;
use dpbai_sim::audit::{write_audit, AuditSpec};
use dpbai_sim::config::{ExperimentConfig, InstanceSpec};
use dpbai_sim::experiment::run_experiment;
use dpbai_sim::presets::preset;
use dpbai_sim::report::hardness_report;
use dpbai_sim::summary::{summarize, write_summary};

#[derive(Parser)]
#[command(name = "dpbai", version, about = "Differentially private best-arm identification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid from a config file or a preset.
    Run {
        #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_parser = ["fig1", "dpod-sweep"])]
        preset: Option<String>,
        #[arg(long, env = "DPBAI_THREADS", default_value_t = default_threads())]
        threads: usize,
        /// Results file for --config, output directory for --preset.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Success rates and Wilson intervals of a results file.
    Summarize {
        results: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Phase schedule as CSV: p, s_p, branch, pulls_per_arm.
    Schedule {
        arms: usize,
        dim: usize,
        budget: usize,
        /// Schedule of the policy that never uses Max-Det.
        #[arg(long)]
        baseline: bool,
    },
    /// Hardness terms and the DP-BAI error bound for an instance.
    Hardness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Max-Det collection of a JSON list of vectors.
    Maxdet { vectors: PathBuf },
    /// Empirical privacy audit on neighbouring reward tables.
    Audit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "DPBAI_THREADS", default_value_t = default_threads())]
        threads: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, preset: name, threads, output, trials } => {
            let mut configs = match (config, name) {
                (Some(path), None) => {
                    let mut c = ExperimentConfig::load(&path)?;
                    if let Some(out) = output {
                        c.summary_path = None;
                        c.output_path = out;
                    }
                    vec![c]
                }
                (None, Some(name)) => preset(&name, &output.unwrap_or_else(|| PathBuf::from(".")))?,
                _ => bail!("give exactly one of --config and --preset"),
            };
            for c in &mut configs {
                if let Some(t) = trials {
                    c.trials = t;
                }
                let out = run_experiment(c, threads)?;
                eprintln!(
                    "{} rows -> {}, summary -> {}",
                    out.records.len(),
                    c.output_path.display(),
                    c.summary_path().display()
                );
            }
        }
        Command::Summarize { results, output } => {
            let rows = summarize(&results)?;
            let path = output.unwrap_or_else(|| PathBuf::from("/dev/stdout"));
            write_summary(&path, &rows)?;
            for r in rows.iter().filter(|r| r.flagged()) {
                eprintln!("no completed trials: {} T={} epsilon={}", r.policy, r.budget, r.epsilon);
            }
        }
        Command::Schedule { arms, dim, budget, baseline } => {
            let rule = if baseline { BranchRule::AlwaysUniform } else { BranchRule::MaxDetWhenSparse };
            let s = phase_schedule_with(arms, dim, budget, rule)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "p,s_p,branch,pulls_per_arm")?;
            for p in 1..=s.m {
                let branch = match s.nominal_branch(p) {
                    NominalBranch::MaxDet => "max-det",
                    NominalBranch::Uniform => "uniform",
                };
                writeln!(out, "{p},{},{branch},{}", s.size(p), s.nominal_pulls_per_arm(p))?;
            }
            writeln!(out, "{},{},final,0", s.m + 1, s.size(s.m + 1))?;
            eprintln!("lambda={} M1={} M={} T'={} t_alloc={}", s.lambda, s.m1, s.m, s.t_prime, s.t_alloc);
        }
        Command::Hardness { config, budget, epsilon } => {
            let spec = InstanceSpec::load(&config)?;
            let mut instance = spec.build_default()?;
            if let Some(eps) = epsilon {
                instance = instance.with_privacy(Privacy::new(eps, instance.privacy().delta)?);
            }
            println!("{}", hardness_report(&instance, budget)?);
        }
        Command::Maxdet { vectors } => {
            let text = std::fs::read_to_string(&vectors).with_context(|| vectors.display().to_string())?;
            let v: Vec<Vec<f64>> = serde_json::from_str(&text).context("expected a JSON list of vectors")?;
            let reduced = reduce_dimension(&v);
            let c = max_det_collection(&reduced.vectors, reduced.dim)?;
            let labels: Vec<String> = c.indices.iter().map(|i| (i + 1).to_string()).collect();
            println!("rank {}", reduced.dim);
            println!("collection {}", labels.join(","));
            println!("abs_det {}", c.det_abs);
            println!("exact {}", c.certified);
            for (i, x) in reduced.vectors.iter().enumerate() {
                let alpha = coordinates_in_basis(x, &c)?;
                let list: Vec<String> = alpha.iter().map(|a| format!("{a:.6}")).collect();
                println!("alpha {} {}", i + 1, list.join(" "));
            }
        }
        Command::Audit { config, threads, output } => {
            let mut spec = AuditSpec::load(&config)?;
            if let Some(out) = output {
                spec.output_path = out;
            }
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
            let reports = pool.install(|| spec.run())?;
            write_audit(&spec.output_path, &reports)?;
            for r in &reports {
                eprintln!(
                    "{}: epsilon_hat={:.4} lower={:.4} epsilon={} {}",
                    r.event,
                    r.epsilon_hat,
                    r.lower_bound,
                    r.epsilon,
                    if r.violation() { "VIOLATION" } else { "ok" }
                );
            }
        }
    }
    Ok(())
}
