//! Evaluated solutions and the evaluation trace an optimizer leaves behind.
//!
//! Trace CSV layout: an optional `# problem=<id> seed=<n>` comment line, then
//! the header `eval_index,x_0..x_{n-1},f_0..f_{M-1}` and one row per
//! evaluation. Reals are written with 17 significant digits so that a trace
//! survives a write/read cycle bit for bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::ObjectiveVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub f: ObjectiveVector,
    pub eval_index: usize,
}

impl Solution {
    pub fn new(x: Vec<f64>, f: ObjectiveVector, eval_index: usize) -> Self {
        Self { x, f, eval_index }
    }

    pub fn objectives(&self) -> &[f64] {
        self.f.values()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationTrace {
    pub problem_id: String,
    pub run_seed: u64,
    pub solutions: Vec<Solution>,
}

impl EvaluationTrace {
    pub fn new(problem_id: impl Into<String>, run_seed: u64) -> Self {
        Self {
            problem_id: problem_id.into(),
            run_seed,
            solutions: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Appends an evaluation, assigning the next `eval_index`.
    pub fn record(&mut self, x: Vec<f64>, f: ObjectiveVector) -> &Solution {
        let eval_index = self.solutions.len();
        self.solutions.push(Solution::new(x, f, eval_index));
        &self.solutions[eval_index]
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.solutions.iter().map(|s| s.f.clone()).collect()
    }

    /// Checks contiguity of `eval_index` and consistent dimensions.
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.solutions.first() else {
            return Ok(());
        };
        let (n, m) = (first.x.len(), first.f.dim());
        for (i, s) in self.solutions.iter().enumerate() {
            if s.eval_index != i {
                return Err(Error::Trace(format!(
                    "eval_index {} at position {i}; indices must be 0,1,2,...",
                    s.eval_index
                )));
            }
            if s.x.len() != n || s.f.dim() != m {
                return Err(Error::Trace(format!("row {i} has inconsistent dimensions")));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_solutions_csv(w, Some((&self.problem_id, self.run_seed)), &self.solutions, None)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let (meta, solutions) = read_solutions_csv(r)?;
        let (problem_id, run_seed) = meta.unwrap_or_default();
        let trace = Self {
            problem_id,
            run_seed,
            solutions,
        };
        trace.validate()?;
        Ok(trace)
    }
}

pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes solutions in trace schema. `footer` becomes a trailing `# ...` line.
pub fn write_solutions_csv<W: Write>(
    mut w: W,
    meta: Option<(&str, u64)>,
    solutions: &[Solution],
    footer: Option<&str>,
) -> Result<()> {
    if let Some((problem, seed)) = meta {
        writeln!(w, "# problem={problem} seed={seed}")?;
    }
    let (n, m) = solutions
        .first()
        .map(|s| (s.x.len(), s.f.dim()))
        .unwrap_or((0, 0));
    let mut header = vec!["eval_index".to_string()];
    header.extend((0..n).map(|i| format!("x_{i}")));
    header.extend((0..m).map(|j| format!("f_{j}")));
    writeln!(w, "{}", header.join(","))?;
    for s in solutions {
        let mut row = vec![s.eval_index.to_string()];
        row.extend(s.x.iter().map(|&v| fmt_real(v)));
        row.extend(s.f.values().iter().map(|&v| fmt_real(v)));
        writeln!(w, "{}", row.join(","))?;
    }
    if let Some(footer) = footer {
        writeln!(w, "# {footer}")?;
    }
    w.flush()?;
    Ok(())
}

type TraceMeta = Option<(String, u64)>;

pub fn read_solutions_csv<R: Read>(mut r: R) -> Result<(TraceMeta, Vec<Solution>)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let meta = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .and_then(parse_meta);

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("eval_index") {
        return Err(Error::Trace("first column must be eval_index".into()));
    }
    let x_cols: Vec<usize> = column_indices(&headers, "x_");
    let f_cols: Vec<usize> = column_indices(&headers, "f_");
    if f_cols.is_empty() {
        return Err(Error::Trace("no f_ columns".into()));
    }

    let mut solutions = Vec::new();
    for record in reader.records() {
        let record = record?;
        let eval_index: usize = parse_field(&record, 0)?;
        let x = x_cols
            .iter()
            .map(|&c| parse_field::<f64>(&record, c))
            .collect::<Result<Vec<_>>>()?;
        let f = f_cols
            .iter()
            .map(|&c| parse_field::<f64>(&record, c))
            .collect::<Result<Vec<_>>>()?;
        solutions.push(Solution::new(x, ObjectiveVector::new(f)?, eval_index));
    }
    Ok((meta, solutions))
}

pub(crate) fn column_indices(headers: &csv::StringRecord, prefix: &str) -> Vec<usize> {
    headers
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            h.strip_prefix(prefix)
                .is_some_and(|rest| rest.parse::<usize>().is_ok())
        })
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, col: usize) -> Result<T> {
    let raw = record
        .get(col)
        .ok_or_else(|| Error::Trace(format!("missing column {col}")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Trace(format!("cannot parse {raw:?} in column {col}")))
}

fn parse_meta(line: &str) -> TraceMeta {
    let mut problem = None;
    let mut seed = None;
    for tok in line.split_whitespace() {
        if let Some(p) = tok.strip_prefix("problem=") {
            problem = Some(p.to_string());
        } else if let Some(s) = tok.strip_prefix("seed=") {
            seed = s.parse().ok();
        }
    }
    Some((problem?, seed?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_trace() -> EvaluationTrace {
        let mut t = EvaluationTrace::new("SPHERE", 42);
        t.record(vec![0.1, -0.2], ObjectiveVector::new(vec![0.05, 2.65]).unwrap());
        t.record(vec![1.0 / 3.0, 0.5], ObjectiveVector::new(vec![0.3611, 0.6944]).unwrap());
        t
    }

    #[test]
    fn writes_expected_header_and_meta() {
        let mut buf = Vec::new();
        sample_trace().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# problem=SPHERE seed=42"));
        assert_eq!(lines.next(), Some("eval_index,x_0,x_1,f_0,f_1"));
        assert!(lines.next().unwrap().starts_with("0,1.0000000000000001e-1,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn rejects_gaps_in_eval_index() {
        let text = "eval_index,x_0,f_0,f_1\n0,0.0,1.0,2.0\n2,0.0,1.0,2.0\n";
        assert!(matches!(
            EvaluationTrace::read_csv(text.as_bytes()),
            Err(Error::Trace(_))
        ));
    }

    #[test]
    fn reads_trace_without_meta_line() {
        let text = "eval_index,x_0,f_0,f_1\n0,0.5,1.0,2.0\n";
        let t = EvaluationTrace::read_csv(text.as_bytes()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.run_seed, 0);
    }

    proptest! {
        #[test]
        fn csv_roundtrip_is_exact(
            rows in prop::collection::vec(
                (prop::collection::vec(-1e6..1e6f64, 3), prop::collection::vec(-1e6..1e6f64, 2)),
                1..20,
            ),
            seed in any::<u64>(),
        ) {
            let mut t = EvaluationTrace::new("ZDT3", seed);
            for (x, f) in rows {
                t.record(x, ObjectiveVector::new(f).unwrap());
            }
            let mut buf = Vec::new();
            t.write_csv(&mut buf).unwrap();
            prop_assert_eq!(EvaluationTrace::read_csv(buf.as_slice()).unwrap(), t);
        }
    }
}
