//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mopost::archive::{delta1_removal_oracle, BoundedArchive, InsertOutcome};
use mopost::harness::{self, stats::median, wilcoxon_rank_sum, ExperimentPlan, IndicatorRow, Strategy};
use mopost::indicators::{delta_p, hypervolume_2d};
use mopost::optim::{AlgorithmId, OperatorParams};
use mopost::problems::{true_front_points, ProblemId, ProblemSpec};
use mopost::reffront::{FrontOrigin, ReferenceFront};
use mopost::{ObjectiveVector, Solution};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn ov(v: &[f64]) -> ObjectiveVector {
    ObjectiveVector::new(v.to_vec()).unwrap()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Δ_p from the definition, one double loop per direction.
fn brute_delta(a: &[Vec<f64>], b: &[Vec<f64>], p: f64) -> f64 {
    let one_way = |from: &[Vec<f64>], to: &[Vec<f64>]| {
        let mut acc = 0.0;
        for u in from {
            let mut best = f64::INFINITY;
            for v in to {
                best = best.min(dist(u, v));
            }
            acc += best.powf(p);
        }
        (acc / from.len() as f64).powf(1.0 / p)
    };
    one_way(a, b).max(one_way(b, a))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let m = rng.random_range(2..=3);
        let set = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
            let k = rng.random_range(1..=10);
            (0..k).map(|_| (0..m).map(|_| rng.random_range(-5.0..5.0)).collect()).collect()
        };
        let a = set(&mut rng);
        let b = set(&mut rng);
        for p in [1.0, 2.0] {
            let got = delta_p(&a, &b, p).unwrap().value;
            worst = worst.max((got - brute_delta(&a, &b, p)).abs());
        }
    }
    let t = start.elapsed();
    outcome(worst <= 1e-12 && t < Duration::from_secs(5), format!("max |diff| = {worst:.2e}, {t:.2?}"))
}

/// Removal index by the Δ_1 rule evaluated from scratch: smallest Δ_1 of the
/// remaining set, then smallest GD_1, then earliest member.
fn brute_removal(members: &[Vec<f64>], reference: &[Vec<f64>]) -> usize {
    let mut best = (f64::INFINITY, f64::INFINITY, usize::MAX);
    for skip in 0..members.len() {
        let rest: Vec<Vec<f64>> =
            members.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| v.clone()).collect();
        let d = brute_delta(&rest, reference, 1.0);
        let gd = rest
            .iter()
            .map(|u| reference.iter().map(|v| dist(u, v)).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            / rest.len() as f64;
        if d < best.0 || (d == best.0 && gd < best.1) {
            best = (d, gd, skip);
        }
    }
    best.2
}

fn weakly_dominates(u: &[f64], v: &[f64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

fn dominates(u: &[f64], v: &[f64]) -> bool {
    weakly_dominates(u, v) && u != v
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let reference: Vec<Vec<f64>> = (0..10).map(|i| {
        let t = (i as f64 + 0.5) / 10.0;
        vec![t, 1.0 - t]
    }).collect();
    let rf = ReferenceFront::new(reference.iter().map(|v| ov(v)).collect(), FrontOrigin::LinearInterp);
    let (mut prunes, mut mismatches) = (0usize, 0usize);
    for stream in 0..100 {
        let len = rng.random_range(20..=200);
        // every other stream on a coarse lattice to exercise ties
        let coarse = stream % 2 == 1;
        let mut archive = BoundedArchive::new(rf.clone(), 1.0).unwrap();
        let mut model: Vec<Vec<f64>> = Vec::new();
        for i in 0..len {
            // near the line f1 + f2 = 1 so most candidates are nondominated
            let u: f64 = rng.random_range(0.0..1.0);
            let mut f = [u, 1.0 - u + rng.random_range(0.0..0.2)];
            if coarse {
                f = f.map(|v: f64| (v * 20.0).round() / 20.0);
            }
            let cand = f.to_vec();
            let sol = Solution::new(vec![], ov(&cand), i);
            let got = archive.insert(sol).unwrap();

            if model.iter().any(|m| weakly_dominates(m, &cand)) {
                mismatches += usize::from(got != InsertOutcome::Rejected);
                continue;
            }
            model.retain(|m| !dominates(&cand, m));
            model.push(cand);
            let expected = if model.len() > reference.len() {
                let before: Vec<ObjectiveVector> = model.iter().map(|v| ov(v)).collect();
                let k = brute_removal(&model, &reference);
                mismatches += usize::from(delta1_removal_oracle(&before, &rf, 1.0).unwrap() != k);
                prunes += 1;
                Some(model.remove(k))
            } else {
                None
            };
            match got {
                InsertOutcome::Accepted { pruned, .. } => {
                    let pruned = pruned.map(|s| s.f.values().to_vec());
                    mismatches += usize::from(pruned != expected);
                }
                InsertOutcome::Rejected => mismatches += 1,
            }
        }
        let mut a: Vec<Vec<f64>> = archive.members().iter().map(|s| s.f.values().to_vec()).collect();
        let mut b = model.clone();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        mismatches += usize::from(a != b);
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && prunes > 0 && t < Duration::from_secs(60),
        format!("{prunes} prune decisions, {mismatches} mismatches, {t:.2?}"),
    )
}

/// Arc length of a parametric curve by a fine chord sum.
fn curve_length(curve: impl Fn(f64) -> [f64; 2], a: f64, b: f64) -> f64 {
    let n = 2_000_000;
    let mut prev = curve(a);
    let mut len = 0.0;
    for i in 1..=n {
        let cur = curve(a + (b - a) * i as f64 / n as f64);
        len += dist(&prev, &cur);
        prev = cur;
    }
    len
}

fn criterion_3() -> Outcome {
    let dent = |t: f64| {
        let base = 0.5 * (1.0 + (1.0 + t * t).sqrt());
        let d = 0.85 * (-t * t).exp();
        [base + 0.5 * t + d, base - 0.5 * t + d]
    };
    let cases: [(ProblemId, Box<dyn Fn(f64) -> [f64; 2]>, f64, f64); 2] = [
        (ProblemId::Sphere, Box::new(|s: f64| [2.0 * s * s, 2.0 * (1.0 - s) * (1.0 - s)]), 0.0, 1.0),
        (ProblemId::Dent, Box::new(dent), -4.0, 4.0),
    ];
    let mut worst_gap: f64 = 0.0;
    let mut worst_end: f64 = 0.0;
    for (id, curve, a, b) in &cases {
        let len = curve_length(curve, *a, *b);
        let pts = true_front_points(&ProblemSpec::new(*id), 1000).unwrap();
        let mut pts: Vec<Vec<f64>> = pts.iter().map(|p| p.values().to_vec()).collect();
        let (e0, e1) = (curve(*a), curve(*b));
        if dist(&pts[0], &e0) > dist(&pts[0], &e1) {
            pts.reverse();
        }
        let gap = len / 1000.0;
        for w in pts.windows(2) {
            worst_gap = worst_gap.max((dist(&w[0], &w[1]) - gap).abs() / gap);
        }
        for (p, e) in [(&pts[0], e0), (&pts[999], e1)] {
            worst_end = worst_end.max((dist(p, &e) - gap / 2.0).abs() / (gap / 2.0));
        }
    }
    outcome(
        worst_gap <= 0.005 && worst_end <= 0.005,
        format!("max gap error {:.3}%, max end-offset error {:.3}%", worst_gap * 100.0, worst_end * 100.0),
    )
}

fn desk_plan(problems: Vec<ProblemId>, algorithms: Vec<AlgorithmId>, mu: usize, budget: usize, strategies: Vec<Strategy>) -> ExperimentPlan {
    ExperimentPlan {
        problems,
        algorithms,
        mus: vec![mu],
        budget,
        repetitions: 10,
        ps: vec![1.0],
        strategies,
        base_seed: 2024,
        true_front_size: 1000,
        params: OperatorParams::default(),
    }
}

fn deltas(rows: &[IndicatorRow], problem: ProblemId, algorithm: AlgorithmId, strategy: Strategy) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.problem == problem.as_str() && r.algorithm == algorithm.as_str() && r.strategy == strategy)
        .map(|r| r.delta_p)
        .collect()
}

fn criterion_4(out: &Path) -> (Outcome, Vec<IndicatorRow>) {
    let start = Instant::now();
    let problems = vec![ProblemId::Sphere, ProblemId::Dent];
    let algorithms = vec![AlgorithmId::Nsga2, AlgorithmId::NaiveMidea];
    let plan = desk_plan(problems.clone(), algorithms.clone(), 20, 10_000, vec![Strategy::None, Strategy::FDp, Strategy::BDp]);
    let res = match harness::run_experiment(&plan, out, 1) {
        Ok(r) => r,
        Err(e) => return (outcome(false, format!("experiment failed: {e}")), Vec::new()),
    };
    let mut ok = res.errors.is_empty();
    let mut parts = Vec::new();
    for &pr in &problems {
        for &alg in &algorithms {
            let none = deltas(&res.rows, pr, alg, Strategy::None);
            let bdp = deltas(&res.rows, pr, alg, Strategy::BDp);
            if none.len() != 10 || bdp.len() != 10 {
                ok = false;
                continue;
            }
            let (mn, mb) = (median(&none).unwrap(), median(&bdp).unwrap());
            let p = wilcoxon_rank_sum(&bdp, &none).unwrap();
            ok &= mb < mn && p <= 0.05;
            parts.push(format!("{pr}/{alg}: {mb:.4} vs {mn:.4} (p={p:.2e})"));
        }
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(600);
    (outcome(ok, format!("median bDP vs NONE: {}; {t:.1?}", parts.join("; "))), res.rows)
}

fn criterion_5(out: &Path) -> Outcome {
    let mut notes = Vec::new();
    for budget in [10_000, 50_000] {
        let plan = desk_plan(vec![ProblemId::Zdt3], vec![AlgorithmId::Nsga2], 100, budget, vec![Strategy::BDp, Strategy::BPsa]);
        let res = match harness::run_experiment(&plan, &out.join(format!("b{budget}")), 1) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("experiment failed: {e}")),
        };
        let bdp = deltas(&res.rows, ProblemId::Zdt3, AlgorithmId::Nsga2, Strategy::BDp);
        let bpsa = deltas(&res.rows, ProblemId::Zdt3, AlgorithmId::Nsga2, Strategy::BPsa);
        if bdp.is_empty() || bpsa.is_empty() {
            return outcome(false, format!("missing rows at budget {budget}"));
        }
        let (md, mp) = (median(&bdp).unwrap(), median(&bpsa).unwrap());
        notes.push(format!("budget {budget}: bPSA {mp:.4} vs bDP {md:.4}"));
        if mp < md {
            return outcome(true, notes.join("; "));
        }
    }
    outcome(false, notes.join("; "))
}

fn criterion_6(rows: &[IndicatorRow]) -> Outcome {
    let forward: Vec<&IndicatorRow> = rows.iter().filter(|r| r.strategy == Strategy::FDp).collect();
    let mut runs = 0;
    let mut holds = 0;
    for f in forward {
        if let Some(b) = rows.iter().find(|r| {
            r.strategy == Strategy::BDp && r.problem == f.problem && r.algorithm == f.algorithm && r.rep == f.rep && r.p == f.p
        }) {
            runs += 1;
            holds += usize::from(b.dominance_rejections >= f.dominance_rejections);
        }
    }
    let frac = if runs == 0 { 0.0 } else { holds as f64 / runs as f64 };
    outcome(runs > 0 && frac >= 0.9, format!("{holds}/{runs} runs ({:.0}%)", frac * 100.0))
}

/// Monte-Carlo estimate of the dominated area inside `[lo, r]`.
fn mc_hypervolume(front: &[Vec<f64>], lo: [f64; 2], r: [f64; 2], n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut hit = 0usize;
    for _ in 0..n {
        let q = [rng.random_range(lo[0]..r[0]), rng.random_range(lo[1]..r[1])];
        hit += usize::from(front.iter().any(|p| p[0] <= q[0] && p[1] <= q[1]));
    }
    hit as f64 / n as f64 * (r[0] - lo[0]) * (r[1] - lo[1])
}

fn criterion_7() -> Outcome {
    let example = hypervolume_2d(&[ov(&[1.0, 2.0]), ov(&[2.0, 1.0])], &ov(&[3.0, 3.0])).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let r = [1.2, 1.2];
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut xs: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut ys: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..1.0)).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(|a, b| b.total_cmp(a));
        let front: Vec<Vec<f64>> = xs.into_iter().zip(ys).map(|(x, y)| vec![x, y]).collect();
        let lo = [front[0][0], front[9][1]];
        let exact = hypervolume_2d(&front, &ov(&r)).unwrap();
        let est = mc_hypervolume(&front, lo, r, 1_000_000, &mut rng);
        worst = worst.max((exact - est).abs() / exact);
    }
    outcome(
        example == 3.0 && worst <= 0.01,
        format!("HV example = {example}, max MC relative error {:.3}%", worst * 100.0),
    )
}

/// Two-sided exact p by listing every assignment of ranks to the first sample.
fn enumerate_p(xs: &[f64], ys: &[f64]) -> f64 {
    let mut pooled: Vec<(f64, bool)> = xs.iter().map(|&v| (v, true)).chain(ys.iter().map(|&v| (v, false))).collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = pooled.len();
    let w: usize = pooled.iter().enumerate().filter(|(_, p)| p.1).map(|(i, _)| i + 1).sum();
    let (mut le, mut ge, mut all) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != xs.len() {
            continue;
        }
        let s: usize = (0..total).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).sum();
        all += 1;
        le += u64::from(s <= w);
        ge += u64::from(s >= w);
    }
    (2.0 * le.min(ge) as f64 / all as f64).min(1.0)
}

fn criterion_8() -> Outcome {
    let example = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (mut checked, mut worst) = (0, 0.0f64);
    for total in 2..=10 {
        for n in 1..total {
            for _ in 0..20 {
                let mut vals: Vec<f64> = (0..total).map(|_| rng.random_range(-10.0..10.0)).collect();
                vals.shuffle(&mut rng);
                let (xs, ys) = vals.split_at(n);
                worst = worst.max((wilcoxon_rank_sum(xs, ys).unwrap() - enumerate_p(xs, ys)).abs());
                checked += 1;
            }
        }
    }
    outcome(
        example == 0.1 && worst == 0.0,
        format!("example p = {example}, {checked} samples, max |diff| = {worst:.1e}"),
    )
}

fn criterion_9(out: &Path) -> Outcome {
    let plan = ExperimentPlan {
        problems: vec![ProblemId::Sphere, ProblemId::Dent, ProblemId::Zdt3],
        algorithms: AlgorithmId::ALL.into_iter().filter(|a| a.is_implemented()).collect(),
        mus: vec![10],
        budget: 1000,
        repetitions: 1,
        ps: vec![1.0, 2.0],
        strategies: Strategy::ALL.to_vec(),
        base_seed: 99,
        true_front_size: 1000,
        params: OperatorParams::default(),
    };
    let (a, b) = (out.join("a"), out.join("b"));
    for dir in [&a, &b] {
        if let Err(e) = harness::run_experiment(&plan, dir, 1) {
            return outcome(false, format!("experiment failed: {e}"));
        }
    }
    let mut compared = 0;
    let mut differing = Vec::new();
    for key in plan.runs() {
        let rel = key.dir(Path::new("")).join("trace.csv");
        let (x, y) = (std::fs::read(a.join(&rel)), std::fs::read(b.join(&rel)));
        match (x, y) {
            (Ok(x), Ok(y)) if x == y => compared += 1,
            _ => differing.push(rel.display().to_string()),
        }
    }
    for table in [harness::INDICATORS_FILE, "summary.csv", "comparisons.csv"] {
        if std::fs::read(a.join(table)).ok() != std::fs::read(b.join(table)).ok() {
            differing.push(table.to_string());
        }
    }
    outcome(
        differing.is_empty() && compared == plan.runs().len(),
        format!("{compared} trace files identical; differing: {differing:?}"),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    results.push((1, criterion_1()));
    results.push((2, criterion_2()));
    results.push((3, criterion_3()));
    let (c4, rows) = criterion_4(&tmp.path().join("c4"));
    results.push((4, c4));
    results.push((5, criterion_5(&tmp.path().join("c5"))));
    results.push((6, criterion_6(&rows)));
    results.push((7, criterion_7()));
    results.push((8, criterion_8()));
    results.push((9, criterion_9(&tmp.path().join("c9"))));

    let mut failed = 0;
    for (n, o) in &results {
        println!("criterion {n}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", results.len());
}
