//! Fusion of several candidate solution lists into one `K`-point frontier.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::codec::round_decimals;
use crate::error::{Error, Result};
use crate::frontier::{arc_indices, ideal_nadir, sort_by_f1, Frontier, FrontierPoint};
use crate::problem::ProblemInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub instance_id: String,
    pub passes: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    pub k: usize,
    pub tol: f64,
    pub obj_tol: f64,
    pub decimals: u32,
    /// Select once over the union of the needed fronts instead of front by front.
    pub union_selection: bool,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig { k: 20, tol: 5e-5, obj_tol: 1e-4, decimals: 4, union_selection: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionOutcome {
    pub frontier: Frontier,
    /// Fewer than `K` feasible candidates were available.
    pub shortfall: bool,
    pub pooled: usize,
    pub feasible: usize,
    pub fronts_used: usize,
}

pub fn fuse(instance: &ProblemInstance, pool: &CandidatePool, config: &FusionConfig) -> Result<FusionOutcome> {
    if config.k < 2 {
        return Err(Error::InvalidArgument(format!("K must be at least 2, got {}", config.k)));
    }
    if !(config.tol >= 0.0) || !(config.obj_tol >= 0.0) {
        return Err(Error::InvalidArgument("tolerances must be non-negative".into()));
    }
    let pooled: usize = pool.passes.iter().map(Vec::len).sum();

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut unique: Vec<FrontierPoint> = Vec::new();
    for x in pool.passes.iter().flatten() {
        if x.len() != instance.n {
            return Err(Error::DimensionMismatch { expected: instance.n, found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let x: Vec<f64> = x.iter().map(|v| round_decimals(*v, config.decimals)).collect();
        if !seen.insert(x.iter().map(|v| v.to_bits()).collect()) {
            continue;
        }
        let f = instance.objectives(&x)?;
        unique.push(FrontierPoint { x, f });
    }
    let mut kept: Vec<FrontierPoint> = Vec::with_capacity(unique.len());
    for p in unique {
        if kept.iter().all(|q| (q.f[0] - p.f[0]).hypot(q.f[1] - p.f[1]) > config.obj_tol) {
            kept.push(p);
        }
    }
    let feasible: Vec<FrontierPoint> = kept.into_iter().filter(|p| instance.is_feasible(&p.x, config.tol)).collect();

    let objs: Vec<[f64; 2]> = feasible.iter().map(|p| p.f).collect();
    let fronts = nondominated_fronts(&objs);
    let mut chosen: Vec<FrontierPoint> = Vec::with_capacity(config.k);
    let mut fronts_used = 0;
    if config.union_selection && feasible.len() > config.k {
        let mut union: Vec<FrontierPoint> = Vec::new();
        for front in &fronts {
            union.extend(front.iter().map(|&i| feasible[i].clone()));
            fronts_used += 1;
            if union.len() >= config.k {
                break;
            }
        }
        sort_by_f1(&mut union);
        chosen = select(&union, config.k);
    } else {
        for front in &fronts {
            let need = config.k - chosen.len();
            if need == 0 {
                break;
            }
            let mut pts: Vec<FrontierPoint> = front.iter().map(|&i| feasible[i].clone()).collect();
            sort_by_f1(&mut pts);
            chosen.extend(select(&pts, need));
            fronts_used += 1;
        }
    }
    sort_by_f1(&mut chosen);
    Ok(FusionOutcome {
        shortfall: chosen.len() < config.k,
        frontier: Frontier { instance_id: pool.instance_id.clone(), points: chosen },
        pooled,
        feasible: feasible.len(),
        fronts_used,
    })
}

fn select(points: &[FrontierPoint], count: usize) -> Vec<FrontierPoint> {
    let objs: Vec<[f64; 2]> = points.iter().map(|p| p.f).collect();
    let (ideal, nadir) = ideal_nadir(&objs);
    arc_indices(&objs, count, ideal, nadir).into_iter().map(|i| points[i].clone()).collect()
}

/// Indices grouped into successive non-dominated fronts, each in input order.
pub fn nondominated_fronts(objs: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let dominates = |a: &[f64; 2], b: &[f64; 2]| a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&objs[i], &objs[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

pub fn nondominated_sort(objs: &[[f64; 2]]) -> Vec<Vec<[f64; 2]>> {
    nondominated_fronts(objs).into_iter().map(|f| f.into_iter().map(|i| objs[i]).collect()).collect()
}
