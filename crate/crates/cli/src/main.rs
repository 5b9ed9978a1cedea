use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use mopost::archive::{postprocess, Direction};
use mopost::harness::{self, ExperimentPlan, OUT_ENV};
use mopost::indicators::{delta_p, hypervolume_2d};
use mopost::optim::{self, AlgorithmId, OptimizerConfig};
use mopost::problems::{true_front_points_with_grid, ProblemId, ProblemSpec, WFG1_GRID_PER_PARAMETER};
use mopost::reffront::{read_objectives_csv, FrontOrigin, ReferenceFront};
use mopost::trace::write_solutions_csv;
use mopost::{EvaluationTrace, ObjectiveVector};

#[derive(Parser)]
#[command(name = "mopost", version, about = "Traced multiobjective optimization and Δp archive postprocessing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment plan.
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, env = OUT_ENV)]
        out: PathBuf,
        /// Concurrent runs; defaults to the available cores.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run one optimizer and write its trace and final population.
    Optimize {
        #[arg(long)]
        problem: ProblemId,
        #[arg(long)]
        algorithm: AlgorithmId,
        #[arg(long)]
        mu: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Feed a trace through a bounded Δp archive; prints the archive counters.
    Postprocess {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value = "backward")]
        direction: Direction,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// GD_p, IGD_p and Δp of an approximation against a reference set.
    Indicators {
        #[arg(long)]
        approx: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Hypervolume reference point, e.g. `4,4`.
        #[arg(long, value_delimiter = ',')]
        hv_ref: Option<Vec<f64>>,
    },
    /// Write `k` points spread along a problem's Pareto front.
    Reffront {
        #[arg(long)]
        problem: ProblemId,
        #[arg(long, default_value_t = 1000)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        /// WFG1 decision-space grid resolution per position parameter.
        #[arg(long, default_value_t = WFG1_GRID_PER_PARAMETER)]
        grid: usize,
    },
    /// Rebuild summary tables from an experiment directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { plan, out, workers } => {
            let text = fs::read_to_string(&plan).with_context(|| format!("reading {}", plan.display()))?;
            let plan = ExperimentPlan::from_json(&text)?;
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let outcome = harness::run_experiment(&plan, &out, workers)?;
            println!(
                "{}",
                json!({
                    "runs": plan.runs().len(),
                    "rows": outcome.rows.len(),
                    "errors": outcome.errors.len(),
                    "cells": outcome.report.cells.len(),
                })
            );
            if !outcome.errors.is_empty() {
                bail!("{} runs failed, see {}", outcome.errors.len(), out.join(harness::ERRORS_FILE).display());
            }
        }
        Command::Optimize { problem, algorithm, mu, budget, seed, out } => {
            let spec = ProblemSpec::new(problem);
            let res = optim::run(&spec, &OptimizerConfig::new(algorithm, mu, budget, seed))?;
            fs::create_dir_all(&out)?;
            res.trace.write_csv(BufWriter::new(File::create(out.join("trace.csv"))?))?;
            let meta = Some((res.trace.problem_id.as_str(), seed));
            write_solutions_csv(BufWriter::new(File::create(out.join("population.csv"))?), meta, &res.final_population, None)?;
            println!("{}", json!({ "evaluations": res.trace.len(), "wall_time": res.wall_time }));
        }
        Command::Postprocess { trace, reference, direction, p, out } => {
            let trace = EvaluationTrace::read_csv(File::open(&trace).with_context(|| format!("opening {}", trace.display()))?)?;
            let reference = ReferenceFront::read_csv(File::open(&reference)?, FrontOrigin::LinearInterp)?;
            let archive = postprocess(&trace, &reference, direction, p)?;
            let footer = format!("final_archive size={} direction={direction} p={p}", archive.len());
            let meta = Some((trace.problem_id.as_str(), trace.run_seed));
            write_solutions_csv(BufWriter::new(File::create(&out)?), meta, archive.members(), Some(&footer))?;
            let d = archive.delta_to_reference()?;
            let mut stats = serde_json::to_value(archive.stats())?;
            stats["size"] = json!(archive.len());
            stats["delta_p_to_reference"] = json!(d.value);
            println!("{stats}");
        }
        Command::Indicators { approx, reference, p, hv_ref } => {
            let a = read_objectives_csv(File::open(&approx)?)?;
            let r = read_objectives_csv(File::open(&reference)?)?;
            let d = delta_p(&a, &r, p)?;
            let mut out = json!({ "p": p, "GD_p": d.gd, "IGD_p": d.igd, "Delta_p": d.value });
            if let Some(v) = hv_ref {
                out["HV"] = json!(hypervolume_2d(&a, &ObjectiveVector::new(v)?)?);
            }
            println!("{out}");
        }
        Command::Reffront { problem, k, out, grid } => {
            let points = true_front_points_with_grid(&ProblemSpec::new(problem), k, grid)?;
            ReferenceFront::new(points, FrontOrigin::TrueFront).write_csv(BufWriter::new(File::create(&out)?))?;
        }
        Command::Report { input, out } => {
            let report = harness::report_from_dir(&input, &out)?;
            println!("{}", json!({ "cells": report.cells.len() }));
        }
    }
    Ok(())
}
