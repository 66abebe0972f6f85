//! Random instance generation.
//!
//! Every instance is built the same way: a box, up to two linear rows that
//! leave the box midpoint strictly feasible, and two target points that pull
//! the objectives toward different regions of the box. All stored numbers
//! lie on the four-decimal grid so prompts can carry them without loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::codec::round4;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, Matrix};
use crate::problem::{Family, FamilyParams, ProblemInstance, Which};
use crate::solver::{minimize_single, SolverConfig};

pub const DEFAULT_SEED: u64 = 2024;

/// Largest magnitude allowed for generated bounds.
const BOUND_CLIP: f64 = 99.9;
/// Largest magnitude of generated right-hand sides and linear coefficients.
const COEF_CAP: f64 = 90.0;
/// Residual magnitude of softplus rows at the worst box corner.
const SOFTPLUS_SPAN: f64 = 6.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub num_cons: usize,
    /// Residual rows per objective as a multiple of `n` (residual families only).
    pub m_obj_ratio: f64,
    /// Range of box half-widths.
    pub bound_span: (f64, f64),
}

impl GenConfig {
    pub fn new(family: Family, n: usize) -> Self {
        GenConfig {
            family,
            n,
            seed: DEFAULT_SEED,
            num_cons: 1,
            m_obj_ratio: 1.0,
            bound_span: (5.0, 35.0),
        }
    }

    /// Configuration of instance `index` in a batch: seeds advance by one,
    /// the row count cycles through 0, 1, 2 and the residual ratio through
    /// 0.5, 1, 1.5.
    pub fn batch(family: Family, n: usize, base_seed: u64, index: usize) -> Self {
        GenConfig {
            seed: base_seed.wrapping_add(index as u64),
            num_cons: index % 3,
            m_obj_ratio: [0.5, 1.0, 1.5][(index / 3) % 3],
            ..GenConfig::new(family, n)
        }
    }

    pub fn m_obj(&self) -> usize {
        ((self.m_obj_ratio * self.n as f64).round() as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.num_cons > 2 {
            return bad(format!("num_cons must be 0, 1 or 2, got {}", self.num_cons));
        }
        if !(self.m_obj_ratio > 0.0 && self.m_obj_ratio <= 2.0) {
            return bad(format!("m_obj_ratio must lie in (0, 2], got {}", self.m_obj_ratio));
        }
        let (lo, hi) = self.bound_span;
        if !(lo.is_finite() && hi.is_finite() && lo >= 1e-3 && lo <= hi) {
            return bad(format!("bound_span ({lo}, {hi}) cannot produce representable bounds"));
        }
        Ok(())
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn generate(config: &GenConfig) -> Result<ProblemInstance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n;

    let (lower, upper): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|_| {
            let c = rng.random_range(-60.0..=60.0);
            let h = rng.random_range(config.bound_span.0..=config.bound_span.1);
            (round4((c - h).max(-BOUND_CLIP)), round4((c + h).min(BOUND_CLIP)))
        })
        .unzip();
    let mid: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| 0.5 * (l + u)).collect();

    let mut cons_matrix = Vec::with_capacity(config.num_cons);
    let mut cons_rhs = Vec::with_capacity(config.num_cons);
    for _ in 0..config.num_cons {
        let mut row: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..=3.0)).collect();
        let slack = rng.random_range(0.5..=5.0);
        let ax = dot(&row, &mid);
        if ax.abs() + slack > COEF_CAP {
            let s = (COEF_CAP - slack) / ax.abs();
            row.iter_mut().for_each(|a| *a *= s);
        }
        let row: Vec<f64> = row.into_iter().map(round4).collect();
        cons_rhs.push(round4(dot(&row, &mid) + slack));
        cons_matrix.push(row);
    }

    let diag = lower.iter().zip(&upper).map(|(l, u)| (u - l) * (u - l)).sum::<f64>().sqrt();
    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        lower.iter().zip(&upper).map(|(l, u)| rng.random_range(*l..=*u)).collect()
    };
    let mut targets = [sample(&mut rng), sample(&mut rng)];
    while linalg::dist2(&targets[0], &targets[1]) < 0.25 * diag {
        targets = [sample(&mut rng), sample(&mut rng)];
    }

    let params = match config.family {
        Family::Sbqp => sbqp_params(&mut rng, &targets),
        Family::Boqp => boqp_params(&mut rng, n, &targets)?,
        Family::Ridge => {
            let (design, target) = residual_rows(&mut rng, config.m_obj(), n, &targets);
            let reg = [0, 1].map(|_| round4(rng.random_range(0.05..=0.5)));
            FamilyParams::Ridge { m_obj: config.m_obj(), design, target, reg }
        }
        Family::Huber => {
            let (design, target) = residual_rows(&mut rng, config.m_obj(), n, &targets);
            let reg = [0, 1].map(|_| round4(rng.random_range(0.05..=0.5)));
            let delta = [0, 1].map(|i| {
                let mut r: Vec<f64> = design[i]
                    .iter()
                    .zip(&target[i])
                    .map(|(a, b)| (dot(a, &targets[1 - i]) - b).abs())
                    .collect();
                r.sort_by(f64::total_cmp);
                round4(median_sorted(&r).clamp(1e-3, COEF_CAP))
            });
            FamilyParams::Huber { m_obj: config.m_obj(), design, target, reg, delta }
        }
        Family::Softplus => {
            let m = config.m_obj();
            let (mut design, mut target) = residual_rows(&mut rng, m, n, &targets);
            for i in 0..2 {
                for (row, b) in design[i].iter_mut().zip(target[i].iter_mut()) {
                    let (hi, lo) = corner_range(row, &lower, &upper);
                    let span = (hi - *b).abs().max((lo - *b).abs());
                    if span > 0.0 {
                        let s = SOFTPLUS_SPAN / span;
                        row.iter_mut().for_each(|a| *a = round4(*a * s));
                        *b = round4(*b * s);
                    }
                }
            }
            // weak enough that the common pull toward the origin leaves the
            // data terms in conflict on boxes far from it
            let reg = [0, 1].map(|_| round4(rng.random_range(0.0005..=0.002)));
            FamilyParams::Softplus { m_obj: m, design, target, reg }
        }
    };

    let inst = ProblemInstance { n, lower, upper, cons_matrix, cons_rhs, params };
    inst.validate()?;
    Ok(inst)
}

fn median_sorted(v: &[f64]) -> f64 {
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// `(max, min)` of `aᵀx` over the box corners.
fn corner_range(a: &[f64], lower: &[f64], upper: &[f64]) -> (f64, f64) {
    a.iter().zip(lower.iter().zip(upper)).fold((0.0, 0.0), |(hi, lo), (a, (l, u))| {
        let (p, q) = (a * l, a * u);
        (hi + p.max(q), lo + p.min(q))
    })
}

fn sbqp_params(rng: &mut ChaCha8Rng, t: &[Vec<f64>; 2]) -> FamilyParams {
    let mut quad = [vec![], vec![]];
    let mut lin = [vec![], vec![]];
    for i in 0..2 {
        for &ti in &t[i] {
            let mut a: f64 = rng.random_range(0.2..=1.0);
            if ti.abs() > 0.0 {
                a = a.min(0.5 * COEF_CAP / ti.abs());
            }
            let a = round4(a);
            quad[i].push(a);
            lin[i].push(round4(-2.0 * a * ti));
        }
    }
    FamilyParams::Sbqp { quad, lin }
}

fn boqp_params(rng: &mut ChaCha8Rng, n: usize, t: &[Vec<f64>; 2]) -> Result<FamilyParams> {
    let scale = 1.0 / (n as f64).sqrt();
    let mut quad: [Matrix; 2] = [vec![], vec![]];
    let mut lin = [vec![], vec![]];
    for i in 0..2 {
        loop {
            let r: Matrix = (0..n).map(|_| (0..n).map(|_| scale * normal(rng)).collect()).collect();
            let mut q = linalg::gram(&r, n);
            for (k, row) in q.iter_mut().enumerate() {
                row[k] += 0.1;
            }
            let qt = linalg::matvec(&q, &t[i]);
            let peak = linalg::norm_inf(&qt).max(q.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())));
            let kappa = if peak > COEF_CAP { COEF_CAP / peak } else { 1.0 };
            let mut qr = vec![vec![0.0; n]; n];
            for a in 0..n {
                for b in a..n {
                    let v = round4(kappa * q[a][b]);
                    qr[a][b] = v;
                    qr[b][a] = v;
                }
            }
            if linalg::min_eigenvalue(&qr) <= 0.0 {
                continue;
            }
            lin[i] = linalg::matvec(&qr, &t[i]).into_iter().map(|v| round4(-v)).collect();
            quad[i] = qr;
            break;
        }
    }
    Ok(FamilyParams::Boqp { quad, lin, constant: [0.0, 0.0] })
}

/// Gaussian design rows with targets `b = A t`, each row shrunk so `|b| ≤ 90`.
fn residual_rows(rng: &mut ChaCha8Rng, m: usize, n: usize, t: &[Vec<f64>; 2]) -> ([Matrix; 2], [Vec<f64>; 2]) {
    let scale = 1.0 / (n as f64).sqrt();
    let mut design: [Matrix; 2] = [vec![], vec![]];
    let mut target = [vec![], vec![]];
    for i in 0..2 {
        for _ in 0..m {
            let mut row: Vec<f64> = (0..n).map(|_| scale * normal(rng)).collect();
            let b = dot(&row, &t[i]);
            if b.abs() > COEF_CAP {
                let s = COEF_CAP / b.abs();
                row.iter_mut().for_each(|a| *a *= s);
            }
            let row: Vec<f64> = row.into_iter().map(round4).collect();
            target[i].push(round4(dot(&row, &t[i])));
            design[i].push(row);
        }
    }
    (design, target)
}

/// Minimizers of `f1` and `f2` over the feasible set, rounded to four decimals.
pub fn anchor_solutions(instance: &ProblemInstance) -> Result<(Vec<f64>, Vec<f64>)> {
    let solve = |which: Which| -> Result<Vec<f64>> {
        let r = minimize_single(instance, which, &SolverConfig::rounding_safe())?;
        if !r.converged {
            return Err(Error::Solver(format!(
                "anchor {which:?} did not converge: kkt residual {:.3e} after {} iterations",
                r.kkt_residual, r.iterations
            )));
        }
        Ok(r.x.into_iter().map(round4).collect())
    };
    Ok((solve(Which::F1)?, solve(Which::F2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::toy::scalar_sbqp;

    #[test]
    fn deterministic_and_valid() {
        for fam in Family::ALL {
            for idx in 0..6 {
                let cfg = GenConfig::batch(fam, 6, DEFAULT_SEED, idx);
                let a = generate(&cfg).unwrap();
                assert_eq!(a, generate(&cfg).unwrap());
                assert_eq!(a.num_cons(), idx % 3);
                assert!(a.check_feasible(&a.midpoint(), 0.0).unwrap());
            }
        }
    }

    #[test]
    fn toy_anchors() {
        let (a1, a2) = anchor_solutions(&scalar_sbqp(-2.0, 2.0)).unwrap();
        assert_eq!((a1[0], a2[0]), (0.0, 1.0));
        let (a1, _) = anchor_solutions(&scalar_sbqp(1.0, 2.0)).unwrap();
        assert_eq!(a1[0], 1.0);
    }

    #[test]
    fn bad_configs() {
        let mut c = GenConfig::new(Family::Ridge, 0);
        assert!(generate(&c).is_err());
        c.n = 3;
        c.num_cons = 3;
        assert!(generate(&c).is_err());
        c.num_cons = 0;
        c.bound_span = (0.0, 1.0);
        assert!(generate(&c).is_err());
        c.bound_span = (1.0, 2.0);
        c.m_obj_ratio = 2.5;
        assert!(generate(&c).is_err());
    }

    #[test]
    fn softplus_rows_are_normalized() {
        let inst = generate(&GenConfig::new(Family::Softplus, 5)).unwrap();
        if let FamilyParams::Softplus { design, target, .. } = &inst.params {
            for (row, b) in design.iter().flatten().zip(target.iter().flatten()) {
                let (hi, lo) = corner_range(row, &inst.lower, &inst.upper);
                assert!((hi - b).abs().max((lo - b).abs()) <= SOFTPLUS_SPAN + 0.01);
            }
        } else {
            unreachable!()
        }
    }
}
