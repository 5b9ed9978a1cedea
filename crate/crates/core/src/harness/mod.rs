//! Experiment orchestration: optimizer runs over a problem × algorithm × μ
//! grid, trace postprocessing by each strategy, indicators against the true
//! fronts, and the pairwise rank-sum comparisons.
//!
//! Output layout under the output directory:
//!
//! ```text
//! plan.json
//! reference_fronts/<PROBLEM>_<k>.csv
//! runs/<PROBLEM>/<ALGORITHM>/mu<μ>/rep<r>/
//!     trace.csv  population.csv  meta.json
//!     reference_DP.csv  reference_PSA.csv
//!     archive_<STRATEGY>_p<p>.csv
//! indicators.csv  errors.csv  report.json  summary.csv  comparisons.csv
//! ```
//!
//! Every strategy writes one result file per p; for `NONE` it holds the final
//! population. Result files share the trace schema and end with a
//! `# final_archive size=<K> strategy=<S> p=<p>` line.

mod report;
pub mod stats;

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archive::{postprocess, ArchiveStats, Direction};
use crate::error::{Error, Result};
use crate::indicators::{delta_p, hypervolume_2d};
use crate::optim::{self, AlgorithmId, OperatorParams, OptimizerConfig, RunResult};
use crate::pareto::{nondominated_filter, ObjectiveVector};
use crate::problems::{true_front_points, ProblemId, ProblemSpec};
use crate::reffront::{build_polyline, place_uniform, psa_reference, FrontOrigin, ReferenceFront};
use crate::trace::{write_solutions_csv, Solution};

pub use report::{
    read_rows, summarize, write_rows, CellReport, Comparison, ComparisonReport, ComparisonRow, IndicatorRow,
    StrategySample, SummaryRow, SummaryTables, ALPHA,
};
pub use stats::wilcoxon_rank_sum;

/// Environment variable naming the default output root of the CLI.
pub const OUT_ENV: &str = "MOPOST_OUT";

pub const INDICATORS_FILE: &str = "indicators.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Final population, no postprocessing.
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "fDP")]
    FDp,
    #[serde(rename = "bDP")]
    BDp,
    #[serde(rename = "fPSA")]
    FPsa,
    #[serde(rename = "bPSA")]
    BPsa,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Self::None, Self::FDp, Self::BDp, Self::FPsa, Self::BPsa];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "NONE",
            Self::FDp => "fDP",
            Self::BDp => "bDP",
            Self::FPsa => "fPSA",
            Self::BPsa => "bPSA",
        }
    }

    /// Archive feed order, `None` for the unprocessed population.
    pub fn direction(self) -> Option<Direction> {
        match self {
            Self::None => None,
            Self::FDp | Self::FPsa => Some(Direction::Forward),
            Self::BDp | Self::BPsa => Some(Direction::Backward),
        }
    }

    /// How the archive's reference set is built.
    pub fn reference_origin(self) -> Option<FrontOrigin> {
        match self {
            Self::None => None,
            Self::FDp | Self::BDp => Some(FrontOrigin::LinearInterp),
            Self::FPsa | Self::BPsa => Some(FrontOrigin::Psa),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown(format!("strategy {s}")))
    }
}

fn default_budget() -> usize {
    10_000
}
fn default_repetitions() -> usize {
    10
}
fn default_ps() -> Vec<f64> {
    vec![1.0]
}
fn default_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}
fn default_front_size() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub problems: Vec<ProblemId>,
    pub algorithms: Vec<AlgorithmId>,
    pub mus: Vec<usize>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_ps")]
    pub ps: Vec<f64>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub base_seed: u64,
    /// Size of the true-front point sets the indicators are measured against.
    #[serde(default = "default_front_size")]
    pub true_front_size: usize,
    #[serde(default)]
    pub params: OperatorParams,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.problems.is_empty() || self.algorithms.is_empty() || self.mus.is_empty() {
            return bad("plan needs at least one problem, algorithm and mu".into());
        }
        if self.ps.is_empty() || self.strategies.is_empty() {
            return bad("plan needs at least one p and one strategy".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if let Some(a) = self.algorithms.iter().find(|a| !a.is_implemented()) {
            return Err(Error::NotImplemented(a.to_string()));
        }
        for &mu in &self.mus {
            OptimizerConfig::new(AlgorithmId::Nsga2, mu, self.budget, 0).validate()?;
        }
        if let Some(p) = self.ps.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return bad(format!("p must be positive, got {p}"));
        }
        if self.true_front_size < 2 {
            return bad("true_front_size must be at least 2".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: Self = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    /// Every (problem, algorithm, μ, repetition) in output order.
    pub fn runs(&self) -> Vec<RunKey> {
        let mut out = Vec::new();
        for &problem in &self.problems {
            for &algorithm in &self.algorithms {
                for &mu in &self.mus {
                    for rep in 0..self.repetitions {
                        let seed = run_seed(self.base_seed, problem, algorithm, mu, rep);
                        out.push(RunKey { problem, algorithm, mu, rep, seed });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunKey {
    pub problem: ProblemId,
    pub algorithm: AlgorithmId,
    pub mu: usize,
    pub rep: usize,
    pub seed: u64,
}

impl RunKey {
    pub fn dir(&self, out: &Path) -> PathBuf {
        out.join("runs")
            .join(self.problem.as_str())
            .join(self.algorithm.as_str())
            .join(format!("mu{}", self.mu))
            .join(format!("rep{}", self.rep))
    }

    fn same_cell(&self, other: &RunKey) -> bool {
        (self.problem, self.algorithm, self.mu) == (other.problem, other.algorithm, other.mu)
    }
}

/// Seed of one run: FNV-1a (64 bit) of `"<PROBLEM>|<ALGORITHM>|<mu>|<rep>"`,
/// xored with `base_seed` and passed through the SplitMix64 finalizer.
pub fn run_seed(base_seed: u64, problem: ProblemId, algorithm: AlgorithmId, mu: usize, rep: usize) -> u64 {
    let key = format!("{problem}|{algorithm}|{mu}|{rep}");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(h ^ base_seed)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub problem: String,
    pub algorithm: String,
    pub mu: usize,
    pub rep: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub rows: Vec<IndicatorRow>,
    pub errors: Vec<ErrorRow>,
    pub report: ComparisonReport,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    problem: ProblemId,
    algorithm: AlgorithmId,
    mu: usize,
    rep: usize,
    seed: u64,
    budget: usize,
    evaluations: usize,
    wall_time: f64,
    params: &'a OperatorParams,
}

/// Loads `<out>/reference_fronts/<PROBLEM>_<k>.csv`, computing and caching
/// it first if absent.
pub fn cached_true_front(out: &Path, spec: &ProblemSpec, k: usize) -> Result<Vec<ObjectiveVector>> {
    let dir = out.join("reference_fronts");
    let path = dir.join(format!("{}_{k}.csv", spec.id));
    if path.exists() {
        let front = ReferenceFront::read_csv(File::open(&path)?, FrontOrigin::TrueFront)?;
        if front.len() == k {
            return Ok(front.points);
        }
        log::warn!("{} holds {} points, expected {k}; rebuilding", path.display(), front.len());
    }
    log::info!("building {k}-point true front for {}", spec.id);
    let points = true_front_points(spec, k)?;
    fs::create_dir_all(&dir)?;
    ReferenceFront::new(points.clone(), FrontOrigin::TrueFront).write_csv(BufWriter::new(File::create(&path)?))?;
    Ok(points)
}

/// Runs the whole plan on `workers` threads and writes all artifacts under
/// `out`. A failing run drops its whole cell from the indicators and is
/// recorded in `errors.csv`.
pub fn run_experiment(plan: &ExperimentPlan, out: &Path, workers: usize) -> Result<ExperimentOutcome> {
    plan.validate()?;
    fs::create_dir_all(out)?;
    fs::write(out.join("plan.json"), serde_json::to_string_pretty(plan)? + "\n")?;

    let fronts: Vec<(ProblemId, Vec<ObjectiveVector>)> = plan
        .problems
        .iter()
        .map(|&id| Ok((id, cached_true_front(out, &ProblemSpec::new(id), plan.true_front_size)?)))
        .collect::<Result<_>>()?;

    let keys = plan.runs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<IndicatorRow>>> = pool.install(|| {
        keys.par_iter()
            .map(|key| {
                let front = &fronts.iter().find(|(id, _)| *id == key.problem).expect("front per problem").1;
                execute_run(plan, key, front, out)
            })
            .collect()
    });

    let mut errors = Vec::new();
    for (key, res) in keys.iter().zip(&results) {
        if let Err(e) = res {
            log::error!("{} {} mu={} rep={}: {e}", key.problem, key.algorithm, key.mu, key.rep);
            errors.push(ErrorRow {
                problem: key.problem.to_string(),
                algorithm: key.algorithm.to_string(),
                mu: key.mu,
                rep: key.rep,
                seed: key.seed,
                message: e.to_string(),
            });
        }
    }
    let failed: Vec<&RunKey> = keys.iter().zip(&results).filter(|(_, r)| r.is_err()).map(|(k, _)| k).collect();
    let mut rows = Vec::new();
    for (key, res) in keys.iter().zip(results) {
        if let Ok(r) = res {
            if !failed.iter().any(|f| f.same_cell(key)) {
                rows.extend(r);
            }
        }
    }
    // rows come out run by run; regroup so each cell's strategies sit together
    rows.sort_by(|a, b| {
        let pos = |r: &IndicatorRow| plan.ps.iter().position(|p| *p == r.p);
        let strat = |r: &IndicatorRow| plan.strategies.iter().position(|s| *s == r.strategy);
        let key = |r: &IndicatorRow| {
            keys.iter().position(|k| k.problem.as_str() == r.problem && k.algorithm.as_str() == r.algorithm && k.mu == r.mu)
        };
        (key(a), pos(a), strat(a), a.rep).cmp(&(key(b), pos(b), strat(b), b.rep))
    });

    write_rows(File::create(out.join(INDICATORS_FILE))?, &rows)?;
    write_error_rows(&out.join(ERRORS_FILE), &errors)?;
    let report = ComparisonReport::from_rows(&rows)?;
    fs::write(out.join(REPORT_FILE), serde_json::to_string_pretty(&report)? + "\n")?;
    if !report.cells.is_empty() {
        summarize(&report)?.write(out)?;
    }
    Ok(ExperimentOutcome { rows, errors, report })
}

fn write_error_rows(path: &Path, errors: &[ErrorRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    if errors.is_empty() {
        wtr.write_record(["problem", "algorithm", "mu", "rep", "seed", "message"])?;
    }
    for e in errors {
        wtr.serialize(e)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Rebuilds the report and summary tables from an experiment directory.
pub fn report_from_dir(input: &Path, out: &Path) -> Result<ComparisonReport> {
    let rows: Vec<IndicatorRow> = read_rows(File::open(input.join(INDICATORS_FILE))?)?;
    let report = ComparisonReport::from_rows(&rows)?;
    fs::create_dir_all(out)?;
    fs::write(out.join(REPORT_FILE), serde_json::to_string_pretty(&report)? + "\n")?;
    summarize(&report)?.write(out)?;
    Ok(report)
}

/// Builds the archive reference set of size `m` from the nondominated
/// solutions of a whole run.
pub fn run_reference(nondominated: &[ObjectiveVector], origin: FrontOrigin, m: usize) -> Result<ReferenceFront> {
    match origin {
        FrontOrigin::LinearInterp => place_uniform(&build_polyline(nondominated)?, m),
        FrontOrigin::Psa => psa_reference(nondominated, m),
        FrontOrigin::TrueFront => Err(Error::InvalidParameter("true fronts are not built from runs".into())),
    }
}

fn execute_run(plan: &ExperimentPlan, key: &RunKey, true_front: &[ObjectiveVector], out: &Path) -> Result<Vec<IndicatorRow>> {
    let spec = ProblemSpec::new(key.problem);
    let cfg = OptimizerConfig {
        algorithm: key.algorithm,
        mu: key.mu,
        budget: plan.budget,
        seed: key.seed,
        params: plan.params.clone(),
    };
    let RunResult { trace, final_population, wall_time } = optim::run(&spec, &cfg)?;
    log::debug!("{} {} mu={} rep={} done in {wall_time:.2}s", key.problem, key.algorithm, key.mu, key.rep);

    let dir = key.dir(out);
    fs::create_dir_all(&dir)?;
    trace.write_csv(BufWriter::new(File::create(dir.join("trace.csv"))?))?;
    let meta = Some((trace.problem_id.as_str(), trace.run_seed));
    write_solutions_csv(BufWriter::new(File::create(dir.join("population.csv"))?), meta, &final_population, None)?;
    let run_meta = RunMeta {
        problem: key.problem,
        algorithm: key.algorithm,
        mu: key.mu,
        rep: key.rep,
        seed: key.seed,
        budget: plan.budget,
        evaluations: trace.len(),
        wall_time,
        params: &plan.params,
    };
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&run_meta)? + "\n")?;

    let nondominated = nondominated_filter(&trace.objectives())?;
    let mut references: Vec<(FrontOrigin, ReferenceFront)> = Vec::new();
    for origin in plan.strategies.iter().filter_map(|s| s.reference_origin()) {
        if references.iter().all(|(o, _)| *o != origin) {
            let r = run_reference(&nondominated, origin, key.mu)?;
            let name = match origin {
                FrontOrigin::LinearInterp => "reference_DP.csv",
                _ => "reference_PSA.csv",
            };
            r.write_csv(BufWriter::new(File::create(dir.join(name))?))?;
            references.push((origin, r));
        }
    }

    let population_objs: Vec<&[f64]> = final_population.iter().map(Solution::objectives).collect();
    let hv_population = hypervolume_2d(&population_objs, &spec.hv_ref)?;
    let mut rows = Vec::new();
    for &p in &plan.ps {
        for &strategy in &plan.strategies {
            let (result, stats, degenerate): (Vec<Solution>, ArchiveStats, bool) =
                match (strategy.direction(), strategy.reference_origin()) {
                    (Some(direction), Some(origin)) => {
                        let reference = &references.iter().find(|(o, _)| *o == origin).expect("built above").1;
                        let archive = postprocess(&trace, reference, direction, p)?;
                        let stats = archive.stats();
                        (archive.into_members(), stats, reference.degenerate)
                    }
                    _ => (final_population.clone(), ArchiveStats::default(), false),
                };
            let objs: Vec<&[f64]> = result.iter().map(Solution::objectives).collect();
            let d = delta_p(&objs, true_front, p)?;
            let footer = format!("final_archive size={} strategy={strategy} p={p}", result.len());
            let path = dir.join(format!("archive_{strategy}_p{p}.csv"));
            write_solutions_csv(BufWriter::new(File::create(path)?), meta, &result, Some(&footer))?;
            rows.push(IndicatorRow {
                problem: key.problem.to_string(),
                algorithm: key.algorithm.to_string(),
                mu: key.mu,
                rep: key.rep,
                seed: key.seed,
                p,
                strategy,
                delta_p: d.value,
                gd_p: d.gd,
                igd_p: d.igd,
                hv: hypervolume_2d(&objs, &spec.hv_ref)?,
                hv_population,
                result_size: result.len(),
                insertions: stats.insertions_attempted,
                dominance_rejections: stats.dominance_rejections,
                accepted: stats.accepted,
                prunes: stats.prunes,
                reference_degenerate: degenerate,
            });
        }
    }
    Ok(rows)
}
