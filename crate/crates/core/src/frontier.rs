//! Reference frontiers by the ε-constraint method.

use serde::{Deserialize, Serialize};

use crate::codec::round_decimals;
use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, Which};
use crate::solver::{minimize_eps_constrained, minimize_single, SolveResult, SolverConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub x: Vec<f64>,
    pub f: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub instance_id: String,
    /// Sorted by ascending `f1`.
    pub points: Vec<FrontierPoint>,
}

impl Frontier {
    pub fn objectives(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| p.f).collect()
    }

    pub fn solutions(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.x.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub num_eps: usize,
    pub k: usize,
    pub decimals: u32,
    pub obj_tol: f64,
    pub feas_tol: f64,
    /// Recorded for provenance; the solver itself is deterministic.
    pub solver_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { num_eps: 100, k: 20, decimals: 4, obj_tol: 1e-4, feas_tol: 1e-4, solver_seed: 42 }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("K must be at least 2, got {}", self.k)));
        }
        if self.num_eps < self.k {
            return Err(Error::InvalidArgument(format!(
                "num_eps ({}) must be at least K ({})",
                self.num_eps, self.k
            )));
        }
        if self.decimals > 12 {
            return Err(Error::InvalidArgument(format!("decimals {} out of range", self.decimals)));
        }
        if !(self.obj_tol >= 0.0) || !(self.feas_tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

/// A frontier together with what the sweeps produced before resampling.
#[derive(Clone, Debug)]
pub struct BuildReport {
    pub frontier: Frontier,
    /// Every solver output of the two sweeps and the anchors, unrounded.
    pub raw_points: Vec<FrontierPoint>,
    /// Non-dominated survivors of post-processing before resampling, sorted by `f1`.
    pub filtered: Vec<FrontierPoint>,
    /// Sweep solves that errored or did not converge.
    pub failed_solves: usize,
}

pub fn build_reference(instance: &ProblemInstance, config: &PipelineConfig) -> Result<Frontier> {
    build_reference_report(instance, "", config).map(|r| r.frontier)
}

pub fn build_reference_report(instance: &ProblemInstance, id: &str, config: &PipelineConfig) -> Result<BuildReport> {
    config.validate()?;
    let solver = SolverConfig::rounding_safe();
    let anchor = |which: Which| -> Result<SolveResult> {
        let r = minimize_single(instance, which, &solver)?;
        if !r.converged {
            return Err(Error::Solver(format!(
                "endpoint {which:?} did not converge (kkt residual {:.3e})",
                r.kkt_residual
            )));
        }
        Ok(r)
    };
    let a1 = anchor(Which::F1)?;
    let a2 = anchor(Which::F2)?;
    let fa1 = instance.objectives(&a1.x)?;
    let fa2 = instance.objectives(&a2.x)?;

    let mut raw = vec![FrontierPoint { x: a1.x.clone(), f: fa1 }, FrontierPoint { x: a2.x.clone(), f: fa2 }];
    let mut failed = 0;
    // sweep 1 caps f2 between its two endpoint values, sweep 2 caps f1
    for (minimize, lo, hi) in [(Which::F1, fa2[1], fa1[1]), (Which::F2, fa1[0], fa2[0])] {
        if !(hi > lo) {
            continue;
        }
        for k in 1..=config.num_eps {
            let eps = lo + (hi - lo) * k as f64 / (config.num_eps + 1) as f64;
            match minimize_eps_constrained(instance, minimize, eps, &solver) {
                Ok(r) if r.converged => {
                    let f = instance.objectives(&r.x)?;
                    raw.push(FrontierPoint { x: r.x, f });
                }
                _ => failed += 1,
            }
        }
    }

    let filtered = filter(instance, &raw, config)?;
    let points = select(&filtered, config.k)?;
    Ok(BuildReport {
        frontier: Frontier { instance_id: id.to_string(), points },
        raw_points: raw,
        filtered,
        failed_solves: failed,
    })
}

/// Rounding, recomputation, dedup, feasibility and dominance filtering;
/// survivors sorted by ascending `f1`.
pub fn filter(instance: &ProblemInstance, points: &[FrontierPoint], config: &PipelineConfig) -> Result<Vec<FrontierPoint>> {
    let mut out: Vec<FrontierPoint> = Vec::with_capacity(points.len());
    for p in points {
        let x: Vec<f64> = p.x.iter().map(|v| round_decimals(*v, config.decimals)).collect();
        if out.iter().any(|q| q.x == x) {
            continue;
        }
        let f = instance.objectives(&x)?;
        out.push(FrontierPoint { x, f });
    }
    let mut dedup: Vec<FrontierPoint> = Vec::with_capacity(out.len());
    for p in out {
        let close = dedup
            .iter()
            .any(|q| (q.f[0] - p.f[0]).abs() <= config.obj_tol && (q.f[1] - p.f[1]).abs() <= config.obj_tol);
        if !close && instance.is_feasible(&p.x, config.feas_tol) {
            dedup.push(p);
        }
    }
    let objs: Vec<[f64; 2]> = dedup.iter().map(|p| p.f).collect();
    let keep = nondominated_indices(&objs);
    let mut front: Vec<FrontierPoint> = keep.into_iter().map(|i| dedup[i].clone()).collect();
    sort_by_f1(&mut front);
    Ok(front)
}

fn select(front: &[FrontierPoint], k: usize) -> Result<Vec<FrontierPoint>> {
    if front.len() < k {
        return Err(Error::InsufficientPoints { survivors: front.len(), required: k });
    }
    let objs: Vec<[f64; 2]> = front.iter().map(|p| p.f).collect();
    let (ideal, nadir) = ideal_nadir(&objs);
    arc_select(front, k, ideal, nadir)
}

/// Filtering followed by resampling to `config.k` points.
pub fn postprocess(instance: &ProblemInstance, points: &[FrontierPoint], config: &PipelineConfig) -> Result<Vec<FrontierPoint>> {
    config.validate()?;
    select(&filter(instance, points, config)?, config.k)
}

pub(crate) fn sort_by_f1(points: &mut [FrontierPoint]) {
    points.sort_by(|a, b| a.f[0].total_cmp(&b.f[0]).then(a.f[1].total_cmp(&b.f[1])));
}

/// Component-wise minimum and maximum.
pub fn ideal_nadir(objs: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut ideal = [f64::INFINITY; 2];
    let mut nadir = [f64::NEG_INFINITY; 2];
    for f in objs {
        for i in 0..2 {
            ideal[i] = ideal[i].min(f[i]);
            nadir[i] = nadir[i].max(f[i]);
        }
    }
    (ideal, nadir)
}

/// Indices of the non-dominated points in input order. Of several identical
/// points only the first is kept.
pub fn nondominated_indices(objs: &[[f64; 2]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..objs.len()).collect();
    order.sort_by(|&a, &b| {
        objs[a][0]
            .total_cmp(&objs[b][0])
            .then(objs[a][1].total_cmp(&objs[b][1]))
            .then(a.cmp(&b))
    });
    let mut best = f64::INFINITY;
    let mut keep = vec![false; objs.len()];
    for i in order {
        if objs[i][1] < best {
            best = objs[i][1];
            keep[i] = true;
        }
    }
    (0..objs.len()).filter(|&i| keep[i]).collect()
}

pub fn nondominated_filter(objs: &[[f64; 2]]) -> Vec<[f64; 2]> {
    nondominated_indices(objs).into_iter().map(|i| objs[i]).collect()
}

/// Picks `k` of `points` (sorted by `f1`) nearest to equally spaced positions
/// along the normalized arc, always keeping both endpoints.
pub fn arc_select(points: &[FrontierPoint], k: usize, ideal: [f64; 2], nadir: [f64; 2]) -> Result<Vec<FrontierPoint>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("K must be at least 2, got {k}")));
    }
    let objs: Vec<[f64; 2]> = points.iter().map(|p| p.f).collect();
    Ok(arc_indices(&objs, k, ideal, nadir).into_iter().map(|i| points[i].clone()).collect())
}

/// Index form of [`arc_select`]; `count = 1` returns the first point.
pub(crate) fn arc_indices(objs: &[[f64; 2]], count: usize, ideal: [f64; 2], nadir: [f64; 2]) -> Vec<usize> {
    let n = objs.len();
    if n <= count {
        return (0..n).collect();
    }
    if count == 0 {
        return vec![];
    }
    if count == 1 {
        return vec![0];
    }
    let span = |i: usize| {
        let d = nadir[i] - ideal[i];
        if d > 0.0 && d.is_finite() {
            d
        } else {
            1.0
        }
    };
    let (s0, s1) = (span(0), span(1));
    let mut arc = vec![0.0; n];
    for i in 1..n {
        let d0 = (objs[i][0] - objs[i - 1][0]) / s0;
        let d1 = (objs[i][1] - objs[i - 1][1]) / s1;
        arc[i] = arc[i - 1] + d0.hypot(d1);
    }
    let total = arc[n - 1];
    let mut picked = Vec::with_capacity(count);
    let mut lo = 0;
    for k in 0..count {
        let target = total * k as f64 / (count - 1) as f64;
        let hi = n - (count - k);
        let mut best = lo;
        for i in lo..=hi {
            if (arc[i] - target).abs() < (arc[best] - target).abs() {
                best = i;
            }
        }
        picked.push(best);
        lo = best + 1;
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::toy::scalar_sbqp;

    fn pts(objs: &[[f64; 2]]) -> Vec<FrontierPoint> {
        objs.iter().map(|f| FrontierPoint { x: vec![f[0]], f: *f }).collect()
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(nondominated_filter(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), vec![[0.0, 0.0]]);
        assert_eq!(nondominated_filter(&[[0.0, 1.0], [1.0, 0.0]]), vec![[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(nondominated_indices(&[[1.0, 1.0], [0.0, 2.0], [1.0, 1.0]]), vec![0, 1]);
    }

    #[test]
    fn arc_examples() {
        let line = pts(&[[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]]);
        let got = arc_select(&line, 2, [0.0, 0.0], [1.0, 1.0]).unwrap();
        assert_eq!(got, vec![line[0].clone(), line[2].clone()]);
        assert_eq!(arc_select(&line, 3, [0.0, 0.0], [1.0, 1.0]).unwrap(), line);
        let five = pts(&[[0.0, 1.0], [0.1, 0.9], [0.5, 0.5], [0.9, 0.1], [1.0, 0.0]]);
        let got = arc_select(&five, 3, [0.0, 0.0], [1.0, 1.0]).unwrap();
        assert_eq!(got.iter().map(|p| p.f[0]).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert!(arc_select(&five, 1, [0.0, 0.0], [1.0, 1.0]).is_err());
    }

    #[test]
    fn arc_indices_increase() {
        // cluster of near-duplicates at one end forces the window constraint
        let objs: Vec<[f64; 2]> = (0..30).map(|i| {
            let t = if i < 25 { i as f64 * 1e-4 } else { (i - 24) as f64 / 5.0 };
            [t, 1.0 - t]
        }).collect();
        let idx = arc_indices(&objs, 10, [0.0, 0.0], [1.0, 1.0]);
        assert_eq!(idx.len(), 10);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((idx[0], idx[9]), (0, 29));
    }

    #[test]
    fn toy_frontier() {
        let inst = scalar_sbqp(-2.0, 2.0);
        let cfg = PipelineConfig::default();
        let fr = build_reference(&inst, &cfg).unwrap();
        assert_eq!(fr.points.len(), 20);
        assert_eq!(fr.points[0].x, vec![0.0]);
        assert_eq!(fr.points[19].x, vec![1.0]);
        for p in &fr.points {
            assert!((0.0..=1.0).contains(&p.x[0]));
            assert!(inst.check_feasible(&p.x, 1e-4).unwrap());
        }
        let again = postprocess(&inst, &fr.points, &cfg).unwrap();
        assert_eq!(again, fr.points);
        let two = build_reference(&inst, &PipelineConfig { k: 2, ..cfg }).unwrap();
        assert_eq!(two.solutions(), vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn too_few_survivors() {
        // a single-point box: every solve rounds to the same vector
        let inst = scalar_sbqp(0.5, 0.5001);
        match build_reference(&inst, &PipelineConfig::default()) {
            Err(Error::InsufficientPoints { survivors, required: 20 }) => assert!(survivors < 20),
            other => panic!("unexpected {other:?}"),
        }
    }
}
