//! Evenly spaced reference fronts built from approximation data.
//!
//! Two constructions are provided: arc-length uniform placement along the
//! polygonal line through a bi-objective approximation, and Part-and-Select
//! (PSA) subset selection, which works in any dimension.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::{euclidean, nondominated_filter, ObjectiveVector};
use crate::trace::{column_indices, fmt_real, parse_field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrontOrigin {
    LinearInterp,
    Psa,
    TrueFront,
}

impl FrontOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LinearInterp => "LINEAR_INTERP",
            Self::Psa => "PSA",
            Self::TrueFront => "TRUE_FRONT",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "LINEAR_INTERP" => Ok(Self::LinearInterp),
            "PSA" => Ok(Self::Psa),
            "TRUE_FRONT" => Ok(Self::TrueFront),
            other => Err(Error::Unknown(other.to_string())),
        }
    }
}

impl fmt::Display for FrontOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFront {
    pub points: Vec<ObjectiveVector>,
    pub origin: FrontOrigin,
    /// Set when PSA was asked for more points than the input could supply.
    pub degenerate: bool,
}

impl ReferenceFront {
    pub fn new(points: Vec<ObjectiveVector>, origin: FrontOrigin) -> Self {
        Self { points, origin, degenerate: false }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, ObjectiveVector::dim)
    }

    /// Writes `f_0,...,f_{M-1},origin`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let m = self.dim();
        let mut header: Vec<String> = (0..m).map(|j| format!("f_{j}")).collect();
        header.push("origin".into());
        writeln!(w, "{}", header.join(","))?;
        for p in &self.points {
            let mut row: Vec<String> = p.values().iter().map(|&v| fmt_real(v)).collect();
            row.push(self.origin.to_string());
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `f_0,f_1[,origin]`. Files without an origin column are taken
    /// as `default_origin`.
    pub fn read_csv<R: Read>(r: R, default_origin: FrontOrigin) -> Result<Self> {
        let points_with_origin = read_front_csv(r)?;
        let mut origin = default_origin;
        let mut points = Vec::with_capacity(points_with_origin.len());
        for (p, o) in points_with_origin {
            if let Some(o) = o {
                origin = FrontOrigin::parse(&o)?;
            }
            points.push(p);
        }
        Ok(Self::new(points, origin))
    }
}

/// Reads objective vectors from any CSV whose header has `f_<j>` columns
/// (front files and trace files alike), skipping `#` comment lines.
pub fn read_objectives_csv<R: Read>(r: R) -> Result<Vec<ObjectiveVector>> {
    Ok(read_front_csv(r)?.into_iter().map(|(p, _)| p).collect())
}

fn read_front_csv<R: Read>(r: R) -> Result<Vec<(ObjectiveVector, Option<String>)>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let headers = reader.headers()?.clone();
    let f_cols = column_indices(&headers, "f_");
    if f_cols.is_empty() {
        return Err(Error::Trace("no f_ columns".into()));
    }
    let origin_col = headers.iter().position(|h| h == "origin");
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let f = f_cols
            .iter()
            .map(|&c| parse_field::<f64>(&record, c))
            .collect::<Result<Vec<_>>>()?;
        let origin = origin_col.and_then(|c| record.get(c)).map(str::to_string);
        out.push((ObjectiveVector::new(f)?, origin));
    }
    Ok(out)
}

/// A bi-objective polygonal line with cumulative arc lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<ObjectiveVector>,
    cum_length: Vec<f64>,
}

impl Polyline {
    /// Vertices are used in the given order; consecutive vertices must differ.
    pub fn from_vertices(vertices: Vec<ObjectiveVector>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a polyline needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| v.dim() != 2) {
            return Err(Error::DimensionMismatch { expected: 2, got: v.dim() });
        }
        let mut cum_length = Vec::with_capacity(vertices.len());
        cum_length.push(0.0);
        for w in vertices.windows(2) {
            let seg = w[0].distance(&w[1]);
            if !(seg > 0.0) {
                return Err(Error::InvalidParameter("zero-length polyline segment".into()));
            }
            cum_length.push(cum_length.last().unwrap() + seg);
        }
        Ok(Self { vertices, cum_length })
    }

    pub fn vertices(&self) -> &[ObjectiveVector] {
        &self.vertices
    }

    pub fn cum_length(&self) -> &[f64] {
        &self.cum_length
    }

    pub fn length(&self) -> f64 {
        *self.cum_length.last().unwrap()
    }

    /// Point at arc length `s`, clamped to `[0, L]`.
    pub fn point_at(&self, s: f64) -> ObjectiveVector {
        let s = s.clamp(0.0, self.length());
        let j = self
            .cum_length
            .partition_point(|&c| c <= s)
            .clamp(1, self.vertices.len() - 1)
            - 1;
        let (a, b) = (&self.vertices[j], &self.vertices[j + 1]);
        let t = (s - self.cum_length[j]) / (self.cum_length[j + 1] - self.cum_length[j]);
        let v = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x + t * (y - x))
            .collect();
        ObjectiveVector::new(v).expect("interpolation of finite vertices")
    }
}

/// Polygonal line through the nondominated members of `approx`, ordered by
/// ascending first objective.
pub fn build_polyline(approx: &[ObjectiveVector]) -> Result<Polyline> {
    let mut vertices = nondominated_filter(approx)?;
    if vertices.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 nondominated points, got {}",
            vertices.len()
        )));
    }
    vertices.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Polyline::from_vertices(vertices)
}

/// `m` points spaced `δ = L/m` apart along `line`, the outermost ones `δ/2`
/// in from the ends.
pub fn place_uniform(line: &Polyline, m: usize) -> Result<ReferenceFront> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let delta = line.length() / m as f64;
    let points = (0..m)
        .map(|i| line.point_at((i as f64 + 0.5) * delta))
        .collect();
    Ok(ReferenceFront::new(points, FrontOrigin::LinearInterp))
}

/// Selects `m` well-spread members of the nondominated subset of `approx`
/// with the Part-and-Select algorithm.
///
/// The part with the largest coordinate range is split at the midpoint of
/// that coordinate until `m` parts exist; each part then contributes the
/// member nearest the centre of its bounding box. Ties go to the lowest
/// coordinate index, then the earliest part.
pub fn psa_reference(approx: &[ObjectiveVector], m: usize) -> Result<ReferenceFront> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let nd = nondominated_filter(approx)?;
    let mut front = if nd.len() <= m {
        ReferenceFront {
            degenerate: nd.len() < m,
            points: nd,
            origin: FrontOrigin::Psa,
        }
    } else {
        let idx = psa_select(&nd, m);
        ReferenceFront::new(idx.into_iter().map(|i| nd[i].clone()).collect(), FrontOrigin::Psa)
    };
    front.points.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok(front)
}

/// Partitions `points` into `m` parts (requires `points.len() >= m` and
/// pairwise distinct points) and returns one selected index per part.
pub(crate) fn psa_select<P: AsRef<[f64]>>(points: &[P], m: usize) -> Vec<usize> {
    psa_partition(points, m)
        .iter()
        .map(|part| representative(points, part))
        .collect()
}

pub(crate) fn psa_partition<P: AsRef<[f64]>>(points: &[P], m: usize) -> Vec<Vec<usize>> {
    let mut parts: Vec<Vec<usize>> = vec![(0..points.len()).collect()];
    let mut ranges = vec![coordinate_ranges(points, &parts[0])];

    while parts.len() < m {
        let (target, _) = ranges
            .iter()
            .enumerate()
            .map(|(i, r)| (i, widest(r).1))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        let (coord, width) = widest(&ranges[target]);
        if !(width > 0.0) {
            break;
        }
        let (lo, hi) = ranges[target][coord];
        let mid = 0.5 * (lo + hi);
        let (mut lower, mut upper): (Vec<usize>, Vec<usize>) = parts[target]
            .iter()
            .partition(|&&i| points[i].as_ref()[coord] <= mid);
        if upper.is_empty() {
            // mid rounded onto hi for adjacent floats
            upper = lower
                .iter()
                .copied()
                .filter(|&i| points[i].as_ref()[coord] == hi)
                .collect();
            lower.retain(|&i| points[i].as_ref()[coord] != hi);
        }
        ranges[target] = coordinate_ranges(points, &lower);
        parts[target] = lower;
        ranges.push(coordinate_ranges(points, &upper));
        parts.push(upper);
    }
    parts
}

fn coordinate_ranges<P: AsRef<[f64]>>(points: &[P], part: &[usize]) -> Vec<(f64, f64)> {
    let dim = points[part[0]].as_ref().len();
    (0..dim)
        .map(|c| {
            part.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = points[i].as_ref()[c];
                (lo.min(v), hi.max(v))
            })
        })
        .collect()
}

fn widest(ranges: &[(f64, f64)]) -> (usize, f64) {
    ranges
        .iter()
        .enumerate()
        .map(|(c, (lo, hi))| (c, hi - lo))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

fn representative<P: AsRef<[f64]>>(points: &[P], part: &[usize]) -> usize {
    let center: Vec<f64> = coordinate_ranges(points, part)
        .into_iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let mut best = part[0];
    let mut best_d = f64::INFINITY;
    for &i in part {
        let d = euclidean(points[i].as_ref(), &center);
        if d < best_d || (d == best_d && i < best) {
            best = i;
            best_d = d;
        }
    }
    best
}
