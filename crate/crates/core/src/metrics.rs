//! Frontier quality: feasibility rate, hypervolume ratio and IGD⁺.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::{ideal_nadir, nondominated_filter, Frontier};
use crate::problem::ProblemInstance;

pub const DEFAULT_TOL: f64 = 5e-5;
pub const HV_REF: [f64; 2] = [1.1, 1.1];

/// Area dominated by `points` and bounded by `reference`. Points that do not
/// strictly dominate `reference` contribute nothing.
pub fn hypervolume_2d(points: &[[f64; 2]], reference: [f64; 2]) -> Result<f64> {
    if points.iter().flatten().chain(&reference).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("hypervolume input".into()));
    }
    let inside: Vec<[f64; 2]> = points
        .iter()
        .copied()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    let mut front = nondominated_filter(&inside);
    front.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut area = 0.0;
    for (i, p) in front.iter().enumerate() {
        let right = front.get(i + 1).map_or(reference[0], |q| q[0]);
        area += (right - p[0]) * (reference[1] - p[1]);
    }
    Ok(area)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub feasibility: f64,
    pub hvr: f64,
    /// `None` when no prediction is feasible.
    pub igd_plus: Option<f64>,
    pub n_feasible: usize,
    pub n_parsed: usize,
    pub ideal: [f64; 2],
    pub nadir: [f64; 2],
}

/// Maps objective pairs into the unit square spanned by `ideal` and `nadir`.
pub fn normalize(objs: &[[f64; 2]], ideal: [f64; 2], nadir: [f64; 2]) -> Vec<[f64; 2]> {
    objs.iter()
        .map(|y| [(y[0] - ideal[0]) / (nadir[0] - ideal[0]), (y[1] - ideal[1]) / (nadir[1] - ideal[1])])
        .collect()
}

/// Mean over `reference` of the distance to the nearest prediction, counting
/// only coordinates where the prediction is worse.
pub fn igd_plus(predicted: &[[f64; 2]], reference: &[[f64; 2]]) -> Option<f64> {
    if predicted.is_empty() || reference.is_empty() {
        return None;
    }
    let total: f64 = reference
        .iter()
        .map(|z| {
            predicted
                .iter()
                .map(|y| (y[0] - z[0]).max(0.0).hypot((y[1] - z[1]).max(0.0)))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Some(total / reference.len() as f64)
}

pub fn evaluate_prediction(
    instance: &ProblemInstance,
    predicted: &[Vec<f64>],
    reference: &Frontier,
    tol: f64,
) -> Result<MetricsReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {tol}")));
    }
    let ref_front = nondominated_filter(&reference.objectives());
    let (ideal, nadir) = ideal_nadir(&ref_front);
    for i in 0..2 {
        if !(nadir[i] - ideal[i] > 0.0) {
            return Err(Error::DegenerateNormalization(i));
        }
    }
    let feasible: Vec<[f64; 2]> = predicted
        .iter()
        .filter(|x| x.len() == instance.n && instance.is_feasible(x, tol))
        .map(|x| instance.objectives(x))
        .collect::<Result<_>>()?;
    let n_parsed = predicted.len();
    let n_feasible = feasible.len();
    let feasibility = if n_parsed == 0 { 0.0 } else { n_feasible as f64 / n_parsed as f64 };

    let ref_norm = normalize(&ref_front, ideal, nadir);
    let pred_norm = normalize(&feasible, ideal, nadir);
    let hvr = if n_feasible == 0 {
        0.0
    } else {
        let denom = hypervolume_2d(&ref_norm, HV_REF)?;
        hypervolume_2d(&nondominated_filter(&pred_norm), HV_REF)? / denom
    };
    Ok(MetricsReport {
        feasibility,
        hvr,
        igd_plus: igd_plus(&pred_norm, &ref_norm),
        n_feasible,
        n_parsed,
        ideal,
        nadir,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Stat { mean, std: var.sqrt() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub feasibility: Stat,
    pub hvr: Stat,
    /// Over reports with a defined IGD⁺ only.
    pub igd_plus: Option<Stat>,
    pub igd_plus_undefined: usize,
}

pub fn aggregate(reports: &[MetricsReport]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("nothing to aggregate".into()));
    }
    let fea: Vec<f64> = reports.iter().map(|r| r.feasibility).collect();
    let hvr: Vec<f64> = reports.iter().map(|r| r.hvr).collect();
    let igd: Vec<f64> = reports.iter().filter_map(|r| r.igd_plus).collect();
    Ok(Summary {
        count: reports.len(),
        feasibility: Stat::of(&fea).expect("non-empty"),
        hvr: Stat::of(&hvr).expect("non-empty"),
        igd_plus: Stat::of(&igd),
        igd_plus_undefined: reports.len() - igd.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::FrontierPoint;
    use crate::problem::toy::sbqp;

    #[test]
    fn hypervolume_examples() {
        assert_eq!(hypervolume_2d(&[], HV_REF).unwrap(), 0.0);
        assert!((hypervolume_2d(&[[0.0, 0.5], [0.5, 0.0]], HV_REF).unwrap() - 0.96).abs() < 1e-12);
        assert!((hypervolume_2d(&[[0.0, 0.0]], HV_REF).unwrap() - 1.21).abs() < 1e-12);
        assert_eq!(hypervolume_2d(&[[1.1, 0.0], [2.0, -1.0]], HV_REF).unwrap(), 0.0);
        assert!(hypervolume_2d(&[[f64::NAN, 0.0]], HV_REF).is_err());
        // a dominated point changes nothing
        let a = hypervolume_2d(&[[0.0, 0.5], [0.5, 0.0], [0.6, 0.6]], HV_REF).unwrap();
        assert!((a - 0.96).abs() < 1e-12);
    }

    /// `f ≈ (x0², x1²)` on a box around the origin.
    fn plane() -> ProblemInstance {
        sbqp(vec![-5.0, -5.0], vec![5.0, 5.0], [vec![1.0, 1e-9], vec![1e-9, 1.0]], [vec![0.0, 0.0], vec![0.0, 0.0]])
    }

    #[test]
    fn igd_hand_example() {
        let v = igd_plus(&[[0.5, 0.5]], &[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(igd_plus(&[], &[[0.0, 1.0]]), None);
    }

    #[test]
    fn self_evaluation_and_infeasible() {
        let inst = plane();
        let pts: Vec<FrontierPoint> = (0..5)
            .map(|i| {
                let x = vec![i as f64 * 0.5, 2.0 - i as f64 * 0.5];
                let f = inst.objectives(&x).unwrap();
                FrontierPoint { x, f }
            })
            .collect();
        let fr = Frontier { instance_id: "t".into(), points: pts };
        let r = evaluate_prediction(&inst, &fr.solutions(), &fr, DEFAULT_TOL).unwrap();
        assert_eq!(r.feasibility, 1.0);
        assert!((r.hvr - 1.0).abs() < 1e-12);
        assert!(r.igd_plus.unwrap() < 1e-12);
        let bad: Vec<Vec<f64>> = fr.points.iter().map(|p| vec![p.x[0] + 6.0, p.x[1]]).collect();
        let r = evaluate_prediction(&inst, &bad, &fr, DEFAULT_TOL).unwrap();
        assert_eq!((r.feasibility, r.hvr, r.igd_plus, r.n_feasible), (0.0, 0.0, None, 0));
        let flat = Frontier { instance_id: "t".into(), points: vec![fr.points[0].clone()] };
        assert!(matches!(evaluate_prediction(&inst, &bad, &flat, DEFAULT_TOL), Err(Error::DegenerateNormalization(_))));
    }

    fn report(hvr: f64, igd: Option<f64>) -> MetricsReport {
        MetricsReport { feasibility: 1.0, hvr, igd_plus: igd, n_feasible: 1, n_parsed: 1, ideal: [0.0; 2], nadir: [1.0; 2] }
    }

    #[test]
    fn aggregation() {
        let s = aggregate(&[report(0.7, Some(0.1))]).unwrap();
        assert_eq!(s.hvr, Stat { mean: 0.7, std: 0.0 });
        let s = aggregate(&[report(1.0, Some(0.1)), report(0.0, None), report(0.5, Some(0.3))]).unwrap();
        assert!((s.hvr.mean - 0.5).abs() < 1e-15);
        assert!((s.igd_plus.unwrap().mean - 0.2).abs() < 1e-15);
        assert_eq!(s.igd_plus_undefined, 1);
        assert!(aggregate(&[]).is_err());
    }
}
