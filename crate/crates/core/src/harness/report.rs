//! Per-run indicator rows, their aggregation into per-cell comparisons, and
//! the summary tables written from them.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{median, quantile, wilcoxon_rank_sum};
use super::Strategy;
use crate::error::{Error, Result};

/// Significance level for the pairwise tests.
pub const ALPHA: f64 = 0.05;

/// One (run, p, strategy) outcome. Archive counters are zero for `NONE`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub problem: String,
    pub algorithm: String,
    pub mu: usize,
    pub rep: usize,
    pub seed: u64,
    pub p: f64,
    pub strategy: Strategy,
    pub delta_p: f64,
    pub gd_p: f64,
    pub igd_p: f64,
    /// Hypervolume of the strategy's result set.
    pub hv: f64,
    /// Hypervolume of the optimizer's final population.
    pub hv_population: f64,
    pub result_size: usize,
    pub insertions: u64,
    pub dominance_rejections: u64,
    pub accepted: u64,
    pub prunes: u64,
    pub reference_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySample {
    pub strategy: Strategy,
    pub delta_p: Vec<f64>,
    pub hv: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: Strategy,
    pub b: Strategy,
    /// Two-sided rank-sum p-value on Δ_p.
    pub p_value: f64,
    pub significant: bool,
}

impl Comparison {
    pub fn new(a: Strategy, b: Strategy, p_value: f64) -> Self {
        Self { a, b, p_value, significant: p_value <= ALPHA }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub problem: String,
    pub algorithm: String,
    pub mu: usize,
    pub p: f64,
    pub samples: Vec<StrategySample>,
    pub comparisons: Vec<Comparison>,
}

impl CellReport {
    pub fn sample(&self, strategy: Strategy) -> Option<&StrategySample> {
        self.samples.iter().find(|s| s.strategy == strategy)
    }

    pub fn comparison(&self, a: Strategy, b: Strategy) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| (c.a, c.b) == (a, b) || (c.a, c.b) == (b, a))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub cells: Vec<CellReport>,
}

impl ComparisonReport {
    /// Groups rows by (problem, algorithm, μ, p) in order of first
    /// appearance and tests every strategy pair within each group.
    pub fn from_rows(rows: &[IndicatorRow]) -> Result<Self> {
        let mut cells: Vec<CellReport> = Vec::new();
        for r in rows {
            let pos = cells.iter().position(|c| {
                c.problem == r.problem && c.algorithm == r.algorithm && c.mu == r.mu && c.p == r.p
            });
            let cell = match pos {
                Some(i) => &mut cells[i],
                None => {
                    cells.push(CellReport {
                        problem: r.problem.clone(),
                        algorithm: r.algorithm.clone(),
                        mu: r.mu,
                        p: r.p,
                        samples: Vec::new(),
                        comparisons: Vec::new(),
                    });
                    cells.last_mut().expect("just pushed")
                }
            };
            let sample = match cell.samples.iter().position(|s| s.strategy == r.strategy) {
                Some(i) => &mut cell.samples[i],
                None => {
                    cell.samples.push(StrategySample { strategy: r.strategy, delta_p: Vec::new(), hv: Vec::new() });
                    cell.samples.last_mut().expect("just pushed")
                }
            };
            sample.delta_p.push(r.delta_p);
            sample.hv.push(r.hv);
        }
        for cell in &mut cells {
            for i in 0..cell.samples.len() {
                for j in (i + 1)..cell.samples.len() {
                    let (a, b) = (&cell.samples[i], &cell.samples[j]);
                    let p = wilcoxon_rank_sum(&a.delta_p, &b.delta_p)?;
                    cell.comparisons.push(Comparison::new(a.strategy, b.strategy, p));
                }
            }
        }
        Ok(Self { cells })
    }

    pub fn cell(&self, problem: &str, algorithm: &str, mu: usize, p: f64) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.problem == problem && c.algorithm == algorithm && c.mu == mu && c.p == p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: String,
    pub algorithm: String,
    pub mu: usize,
    pub p: f64,
    pub strategy: Strategy,
    pub n: usize,
    pub delta_p_median: f64,
    pub delta_p_q1: f64,
    pub delta_p_q3: f64,
    pub delta_p_iqr: f64,
    pub hv_median: f64,
    /// Significantly different from `NONE` in the same cell.
    pub star: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub problem: String,
    pub algorithm: String,
    pub mu: usize,
    pub p: f64,
    pub strategy_a: Strategy,
    pub strategy_b: Strategy,
    pub median_a: f64,
    pub median_b: f64,
    pub p_value: f64,
    pub star: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryTables {
    pub strategies: Vec<SummaryRow>,
    pub comparisons: Vec<ComparisonRow>,
}

impl SummaryTables {
    pub const STRATEGIES_FILE: &'static str = "summary.csv";
    pub const COMPARISONS_FILE: &'static str = "comparisons.csv";

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_rows(File::create(dir.join(Self::STRATEGIES_FILE))?, &self.strategies)?;
        write_rows(File::create(dir.join(Self::COMPARISONS_FILE))?, &self.comparisons)?;
        Ok(())
    }
}

pub fn summarize(report: &ComparisonReport) -> Result<SummaryTables> {
    if report.cells.is_empty() {
        return Err(Error::Empty("report"));
    }
    let mut out = SummaryTables::default();
    for cell in &report.cells {
        for s in &cell.samples {
            let q1 = quantile(&s.delta_p, 0.25)?;
            let q3 = quantile(&s.delta_p, 0.75)?;
            let star = s.strategy != Strategy::None
                && cell.comparison(s.strategy, Strategy::None).is_some_and(|c| c.significant);
            out.strategies.push(SummaryRow {
                problem: cell.problem.clone(),
                algorithm: cell.algorithm.clone(),
                mu: cell.mu,
                p: cell.p,
                strategy: s.strategy,
                n: s.delta_p.len(),
                delta_p_median: median(&s.delta_p)?,
                delta_p_q1: q1,
                delta_p_q3: q3,
                delta_p_iqr: q3 - q1,
                hv_median: median(&s.hv)?,
                star,
            });
        }
        for c in &cell.comparisons {
            let med = |st| cell.sample(st).map(|s| median(&s.delta_p)).transpose();
            out.comparisons.push(ComparisonRow {
                problem: cell.problem.clone(),
                algorithm: cell.algorithm.clone(),
                mu: cell.mu,
                p: cell.p,
                strategy_a: c.a,
                strategy_b: c.b,
                median_a: med(c.a)?.unwrap_or(f64::NAN),
                median_b: med(c.b)?.unwrap_or(f64::NAN),
                p_value: c.p_value,
                star: c.significant,
            });
        }
    }
    Ok(out)
}

pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(BufWriter::new(w));
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(r).deserialize().map(|r| r.map_err(Error::from)).collect()
}
