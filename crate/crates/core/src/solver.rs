//! Strongly convex minimization over the box, the linear rows and an
//! optional cap `f_j(x) ≤ ε` on one objective.
//!
//! Outer loop: augmented Lagrangian (method of multipliers) on the linear rows
//! and the cap, with a separate penalty per constraint. Inner loop: spectral
//! projected gradient with Barzilai–Borwein steps and a non-monotone Armijo
//! backtracking line search; the box is handled by exact projection.
//!
//! The objective is divided by its strong-convexity modulus and every
//! constraint by its gradient norm (for the cap, measured at the start
//! point). In these units the reported KKT residual is the larger of
//!
//! * the projected-gradient norm `‖x − P(x − ∇ₓL(x, y))‖_∞` of the Lagrangian,
//! * the largest constraint violation,
//!
//! and both bound the decision-space error to first order.

use crate::codec::DELTA;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm1, norm2};
use crate::problem::{ProblemInstance, Which};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub kkt_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub penalty_growth: f64,
    /// Tighten every linear row by `(Δ/2)‖a_j‖₁` so that four-decimal
    /// rounding of a solution cannot violate it.
    pub rounding_safe: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kkt_tol: 1e-8,
            max_outer: 200,
            max_inner: 500,
            penalty_growth: 10.0,
            rounding_safe: false,
        }
    }
}

impl SolverConfig {
    pub fn rounding_safe() -> Self {
        SolverConfig { rounding_safe: true, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.kkt_tol > 0.0) || self.max_outer == 0 || self.max_inner == 0 || !(self.penalty_growth > 1.0) {
            return Err(Error::InvalidArgument(format!("invalid solver configuration {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    /// Unscaled value of the minimized objective.
    pub objective: f64,
    pub kkt_residual: f64,
    pub converged: bool,
    /// Total inner iterations.
    pub iterations: usize,
    /// Scaled multipliers, linear rows first then the cap.
    pub(crate) multipliers: Vec<f64>,
}

/// What is being minimized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Goal {
    /// `λ f1 + (1 − λ) f2`
    Weighted(f64),
    Single(Which),
}

/// Minimizes `λ f1 + (1 − λ) f2` over the feasible set.
pub fn minimize_scalarized(instance: &ProblemInstance, weight: f64, config: &SolverConfig) -> Result<SolveResult> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::InvalidArgument(format!("weight {weight} outside [0, 1]")));
    }
    config.validate()?;
    Subproblem::new(instance, Goal::Weighted(weight), None, config).solve(None)
}

/// Minimizes one objective alone over the feasible set.
pub fn minimize_single(instance: &ProblemInstance, which: Which, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    Subproblem::new(instance, Goal::Single(which), None, config).solve(None)
}

/// Minimizes `minimize` subject to the feasible set and `f_other(x) ≤ eps`.
pub fn minimize_eps_constrained(
    instance: &ProblemInstance,
    minimize: Which,
    eps: f64,
    config: &SolverConfig,
) -> Result<SolveResult> {
    if !eps.is_finite() {
        return Err(Error::NonFinite("epsilon".into()));
    }
    config.validate()?;
    let cap = Cap { which: minimize.other(), eps };
    Subproblem::new(instance, Goal::Single(minimize), Some(cap), config).solve(None)
}

#[derive(Clone, Copy, Debug)]
struct Cap {
    which: Which,
    eps: f64,
}

struct Subproblem<'a> {
    inst: &'a ProblemInstance,
    goal: Goal,
    cap: Option<Cap>,
    config: SolverConfig,
    /// Tightened right-hand sides.
    rhs: Vec<f64>,
    /// `1/‖a_j‖₂` per row.
    row_scale: Vec<f64>,
    obj_scale: f64,
    cap_scale: f64,
    // scratch
    g1: Vec<f64>,
    g2: Vec<f64>,
    gc: Vec<f64>,
}

/// Inner-loop state at one point.
struct Eval {
    value: f64,
    grad: Vec<f64>,
}

const PENALTY_INIT: f64 = 10.0;
const PENALTY_MAX: f64 = 1e12;
const HISTORY: usize = 10;
const ARMIJO: f64 = 1e-4;
const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e12;
const VALUE_NOISE: f64 = 1e-10;

impl<'a> Subproblem<'a> {
    fn new(inst: &'a ProblemInstance, goal: Goal, cap: Option<Cap>, config: &SolverConfig) -> Self {
        let n = inst.n;
        let rhs = inst
            .cons_matrix
            .iter()
            .zip(&inst.cons_rhs)
            .map(|(row, b)| if config.rounding_safe { b - 0.5 * DELTA * norm1(row) } else { *b })
            .collect();
        let row_scale = inst
            .cons_matrix
            .iter()
            .map(|row| {
                let nr = norm2(row);
                if nr > 0.0 {
                    1.0 / nr
                } else {
                    1.0
                }
            })
            .collect();
        let mu = match goal {
            Goal::Weighted(l) => l * inst.strong_convexity(Which::F1) + (1.0 - l) * inst.strong_convexity(Which::F2),
            Goal::Single(w) => inst.strong_convexity(w),
        };
        Subproblem {
            inst,
            goal,
            cap,
            config: *config,
            rhs,
            row_scale,
            obj_scale: 1.0 / mu.max(1e-12),
            cap_scale: 1.0,
            g1: vec![0.0; n],
            g2: vec![0.0; n],
            gc: vec![0.0; n],
        }
    }

    fn num_constraints(&self) -> usize {
        self.rhs.len() + self.cap.is_some() as usize
    }

    fn project(&self, x: &mut [f64]) {
        for ((v, l), u) in x.iter_mut().zip(&self.inst.lower).zip(&self.inst.upper) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Scaled objective value; gradient into `grad`.
    fn objective(&mut self, x: &[f64], grad: &mut [f64]) -> f64 {
        let s = self.obj_scale;
        match self.goal {
            Goal::Single(w) => {
                let v = self.inst.value_grad(x, w, grad);
                grad.iter_mut().for_each(|g| *g *= s);
                s * v
            }
            Goal::Weighted(l) => {
                let v1 = self.inst.value_grad(x, Which::F1, &mut self.g1);
                let v2 = self.inst.value_grad(x, Which::F2, &mut self.g2);
                for ((g, a), b) in grad.iter_mut().zip(&self.g1).zip(&self.g2) {
                    *g = s * (l * a + (1.0 - l) * b);
                }
                s * (l * v1 + (1.0 - l) * v2)
            }
        }
    }

    fn raw_objective(&self, x: &[f64]) -> f64 {
        match self.goal {
            Goal::Single(w) => self.inst.value(x, w),
            Goal::Weighted(l) => l * self.inst.value(x, Which::F1) + (1.0 - l) * self.inst.value(x, Which::F2),
        }
    }

    /// Scaled constraint values `c_k(x)` (feasible when ≤ 0).
    fn constraints(&mut self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for ((row, b), s) in self.inst.cons_matrix.iter().zip(&self.rhs).zip(&self.row_scale) {
            out.push(s * (dot(row, x) - b));
        }
        if let Some(cap) = self.cap {
            let v = self.inst.value(x, cap.which);
            out.push(self.cap_scale * (v - cap.eps));
        }
    }

    /// Augmented Lagrangian value and gradient.
    fn augmented(&mut self, x: &[f64], y: &[f64], rho: &[f64], grad: &mut Vec<f64>) -> f64 {
        grad.resize(x.len(), 0.0);
        let mut val = self.objective(x, grad);
        let m = self.rhs.len();
        for j in 0..m {
            let row = &self.inst.cons_matrix[j];
            let c = self.row_scale[j] * (dot(row, x) - self.rhs[j]);
            let t = (y[j] + rho[j] * c).max(0.0);
            val += (t * t - y[j] * y[j]) / (2.0 * rho[j]);
            if t > 0.0 {
                let k = t * self.row_scale[j];
                for (g, a) in grad.iter_mut().zip(row) {
                    *g += k * a;
                }
            }
        }
        if let Some(cap) = self.cap {
            let mut gc = std::mem::take(&mut self.gc);
            let v = self.inst.value_grad(x, cap.which, &mut gc);
            let c = self.cap_scale * (v - cap.eps);
            let t = (y[m] + rho[m] * c).max(0.0);
            val += (t * t - y[m] * y[m]) / (2.0 * rho[m]);
            if t > 0.0 {
                let k = t * self.cap_scale;
                for (g, a) in grad.iter_mut().zip(&gc) {
                    *g += k * a;
                }
            }
            self.gc = gc;
        }
        val
    }

    /// Gradient of the ordinary Lagrangian `φ + Σ y_k c_k`.
    fn lagrangian_grad(&mut self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; x.len()];
        self.objective(x, &mut grad);
        let m = self.rhs.len();
        for j in 0..m {
            let k = y[j] * self.row_scale[j];
            for (g, a) in grad.iter_mut().zip(&self.inst.cons_matrix[j]) {
                *g += k * a;
            }
        }
        if let Some(cap) = self.cap {
            let mut gc = std::mem::take(&mut self.gc);
            self.inst.value_grad(x, cap.which, &mut gc);
            let k = y[m] * self.cap_scale;
            for (g, a) in grad.iter_mut().zip(&gc) {
                *g += k * a;
            }
            self.gc = gc;
        }
        grad
    }

    fn projected_gradient_norm(&self, x: &[f64], grad: &[f64]) -> f64 {
        x.iter()
            .zip(grad)
            .zip(self.inst.lower.iter().zip(&self.inst.upper))
            .fold(0.0, |m, ((v, g), (l, u))| m.max((v - (v - g).clamp(*l, *u)).abs()))
    }

    /// `(stationarity, violation)` at `x` with multipliers `y`.
    fn kkt(&mut self, x: &[f64], y: &[f64]) -> (f64, f64) {
        let grad = self.lagrangian_grad(x, y);
        let stat = self.projected_gradient_norm(x, &grad);
        let mut c = Vec::new();
        self.constraints(x, &mut c);
        let viol = c.iter().fold(0.0f64, |m, v| m.max(*v));
        (stat, viol)
    }

    /// Spectral projected gradient on the augmented Lagrangian.
    fn inner(&mut self, x: &mut Vec<f64>, y: &[f64], rho: &[f64], tol: f64) -> usize {
        let n = x.len();
        let mut cur = Eval { value: 0.0, grad: vec![0.0; n] };
        cur.value = self.augmented(x, y, rho, &mut cur.grad);
        let pg = self.projected_gradient_norm(x, &cur.grad);
        if pg <= tol {
            return 0;
        }
        let mut step = (1.0 / pg).clamp(STEP_MIN, STEP_MAX);
        let mut history = [f64::NEG_INFINITY; HISTORY];
        history[0] = cur.value;
        let mut trial = vec![0.0; n];
        let mut dir = vec![0.0; n];
        let mut next = Eval { value: 0.0, grad: vec![0.0; n] };
        for it in 1..=self.config.max_inner {
            for i in 0..n {
                let p = (x[i] - step * cur.grad[i]).clamp(self.inst.lower[i], self.inst.upper[i]);
                dir[i] = p - x[i];
            }
            let slope = dot(&cur.grad, &dir);
            if slope >= 0.0 {
                return it;
            }
            let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut lam = 1.0;
            loop {
                for i in 0..n {
                    trial[i] = (x[i] + lam * dir[i]).clamp(self.inst.lower[i], self.inst.upper[i]);
                }
                next.value = self.augmented(&trial, y, rho, &mut next.grad);
                if next.value <= reference + ARMIJO * lam * slope {
                    break;
                }
                // Near the optimum the decrease drowns in rounding noise of the
                // value; fall back to the derivative form of the Armijo test.
                let noise = VALUE_NOISE * (cur.value.abs() + 1.0);
                if next.value <= cur.value + noise && dot(&next.grad, &dir) <= -(1.0 - 2.0 * ARMIJO) * slope {
                    break;
                }
                // safeguarded quadratic interpolation
                let denom = next.value - cur.value - lam * slope;
                let mut cand = if denom > 0.0 { -0.5 * lam * lam * slope / denom } else { 0.5 * lam };
                cand = cand.clamp(0.1 * lam, 0.5 * lam);
                lam = cand;
                if lam < 1e-18 {
                    return it;
                }
            }
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..n {
                let s = trial[i] - x[i];
                let yv = next.grad[i] - cur.grad[i];
                ss += s * s;
                sy += s * yv;
            }
            step = if sy > 0.0 { (ss / sy).clamp(STEP_MIN, STEP_MAX) } else { STEP_MAX };
            std::mem::swap(x, &mut trial);
            std::mem::swap(&mut cur, &mut next);
            history[it % HISTORY] = cur.value;
            if self.projected_gradient_norm(x, &cur.grad) <= tol {
                return it;
            }
            if ss == 0.0 {
                return it;
            }
        }
        self.config.max_inner
    }

    fn solve(mut self, start: Option<&[f64]>) -> Result<SolveResult> {
        let mut x = start.map_or_else(|| self.inst.midpoint(), |s| s.to_vec());
        self.project(&mut x);
        if let Some(cap) = self.cap {
            let gc_norm = {
                let mut g = vec![0.0; x.len()];
                self.inst.value_grad(&x, cap.which, &mut g);
                norm2(&g)
            };
            self.cap_scale = 1.0 / gc_norm.max(1e-8);
        }
        let m = self.num_constraints();
        let mut y = vec![0.0; m];
        let mut rho = vec![PENALTY_INIT; m];
        let mut prev_v = vec![f64::INFINITY; m];
        let tol = self.config.kkt_tol;
        let mut inner_tol = 1e-2f64.max(tol);
        let mut iterations = 0;
        let mut c = Vec::with_capacity(m);
        let mut probed = false;
        let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;

        for _ in 0..self.config.max_outer {
            iterations += self.inner(&mut x, &y, &rho, inner_tol);
            self.constraints(&x, &mut c);
            let mut v = vec![0.0; m];
            for k in 0..m {
                let y_new = (y[k] + rho[k] * c[k]).max(0.0);
                v[k] = (c[k].max(-y_new / rho[k])).abs();
                y[k] = y_new;
            }
            let (stat, viol) = self.kkt(&x, &y);
            let res = stat.max(viol);
            if best.as_ref().is_none_or(|b| res < b.0) {
                best = Some((res, x.clone(), y.clone()));
            }
            if res <= tol {
                return Ok(self.finish(x, y, res, true, iterations));
            }
            for k in 0..m {
                if v[k] > tol && v[k] > 0.25 * prev_v[k] {
                    rho[k] = (rho[k] * self.config.penalty_growth).min(PENALTY_MAX);
                }
                prev_v[k] = v[k];
            }
            inner_tol = (inner_tol * 0.1).max(0.1 * tol);
            if let Some(cap) = self.cap {
                let k = m - 1;
                if !probed && rho[k] >= 1e6 && c[k] > 1e-6 {
                    probed = true;
                    self.probe_cap(cap)?;
                }
            }
        }
        if let Some(cap) = self.cap {
            if !probed {
                self.probe_cap(cap)?;
            }
        }
        let (res, x, y) = best.expect("at least one outer iteration");
        Ok(self.finish(x, y, res, false, iterations))
    }

    /// Errors when the cap lies below the smallest attainable value of the
    /// capped objective.
    fn probe_cap(&self, cap: Cap) -> Result<()> {
        let sub = Subproblem::new(self.inst, Goal::Single(cap.which), None, &self.config);
        let r = sub.solve(None)?;
        let slack = 1e-9 * cap.eps.abs().max(1.0);
        if r.objective > cap.eps + slack {
            return Err(Error::InfeasibleCap { eps: cap.eps, min_attainable: r.objective });
        }
        Ok(())
    }

    fn finish(&self, x: Vec<f64>, y: Vec<f64>, kkt_residual: f64, converged: bool, iterations: usize) -> SolveResult {
        SolveResult {
            objective: self.raw_objective(&x),
            x,
            kkt_residual,
            converged,
            iterations,
            multipliers: y,
        }
    }
}

#[cfg(test)]
/// Recomputes the KKT residual of an ε-constrained or scalarized solve from
/// scratch, with the same scaling conventions.
pub(crate) fn recompute_kkt(
    instance: &ProblemInstance,
    goal: Goal,
    cap: Option<(Which, f64)>,
    start: &[f64],
    config: &SolverConfig,
    result: &SolveResult,
) -> f64 {
    let mut sub = Subproblem::new(instance, goal, cap.map(|(which, eps)| Cap { which, eps }), config);
    if let Some(c) = sub.cap {
        let mut g = vec![0.0; instance.n];
        let mut s = start.to_vec();
        sub.project(&mut s);
        instance.value_grad(&s, c.which, &mut g);
        sub.cap_scale = 1.0 / norm2(&g).max(1e-8);
    }
    let (stat, viol) = sub.kkt(&result.x, &result.multipliers);
    stat.max(viol)
}

/// Largest box violation, used by tests and diagnostics.
pub fn box_violation(instance: &ProblemInstance, x: &[f64]) -> f64 {
    x.iter()
        .zip(instance.lower.iter().zip(&instance.upper))
        .fold(0.0, |m, (v, (l, u))| m.max(l - v).max(v - u))
}

/// Largest violation of the (untightened) linear rows.
pub fn row_violation(instance: &ProblemInstance, x: &[f64]) -> f64 {
    instance
        .cons_matrix
        .iter()
        .zip(&instance.cons_rhs)
        .fold(0.0, |m, (row, b)| m.max(dot(row, x) - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::toy::scalar_sbqp;

    #[test]
    fn scalarized_toy_matches_closed_form() {
        let p = scalar_sbqp(-2.0, 2.0);
        let cfg = SolverConfig::default();
        for k in 0..=10 {
            let l = k as f64 / 10.0;
            let r = minimize_scalarized(&p, l, &cfg).unwrap();
            assert!(r.converged, "λ = {l}: {r:?}");
            assert!((r.x[0] - (1.0 - l)).abs() < 1e-6, "λ = {l}: {}", r.x[0]);
            assert!(r.kkt_residual <= cfg.kkt_tol);
        }
    }

    #[test]
    fn active_bound() {
        let p = scalar_sbqp(1.0, 2.0);
        let r = minimize_scalarized(&p, 1.0, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.x[0], 1.0);
    }

    #[test]
    fn eps_constrained_toy() {
        let p = scalar_sbqp(-2.0, 2.0);
        let cfg = SolverConfig::default();
        let r = minimize_eps_constrained(&p, Which::F1, -0.75, &cfg).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.x[0] - 0.5).abs() < 1e-6, "{}", r.x[0]);
        // cap inactive at f1's minimizer
        let a1 = minimize_single(&p, Which::F1, &cfg).unwrap();
        let cap = p.value(&a1.x, Which::F2);
        let r = minimize_eps_constrained(&p, Which::F1, cap, &cfg).unwrap();
        assert!((r.x[0] - a1.x[0]).abs() < 1e-6);
    }

    #[test]
    fn unattainable_cap_is_an_error() {
        let p = scalar_sbqp(-2.0, 2.0);
        // min f2 = -1 at x = 1
        match minimize_eps_constrained(&p, Which::F1, -2.0, &SolverConfig::default()) {
            Err(Error::InfeasibleCap { min_attainable, .. }) => assert!((min_attainable + 1.0).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_weight() {
        let p = scalar_sbqp(-2.0, 2.0);
        assert!(minimize_scalarized(&p, 1.5, &SolverConfig::default()).is_err());
    }

    #[test]
    fn linear_row_active() {
        // min (x-2)² + (y-2)²-like separable objective with x + y ≤ 1
        let mut p = crate::problem::toy::sbqp(
            vec![-3.0, -3.0],
            vec![3.0, 3.0],
            [vec![1.0, 1.0], vec![1.0, 1.0]],
            [vec![-4.0, -4.0], vec![-4.0, -4.0]],
        );
        p.cons_matrix = vec![vec![1.0, 1.0]];
        p.cons_rhs = vec![1.0];
        let cfg = SolverConfig::default();
        let r = minimize_scalarized(&p, 0.5, &cfg).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.x[0] - 0.5).abs() < 1e-7 && (r.x[1] - 0.5).abs() < 1e-7, "{:?}", r.x);
        let again = recompute_kkt(&p, Goal::Weighted(0.5), None, &p.midpoint(), &cfg, &r);
        assert!((again - r.kkt_residual).abs() <= 1e-12);
        let safe = minimize_scalarized(&p, 0.5, &SolverConfig::rounding_safe()).unwrap();
        let shrink = 0.5 * DELTA * 2.0;
        assert!((safe.x[0] + safe.x[1] - (1.0 - shrink)).abs() < 1e-7);
    }

    #[test]
    fn deterministic() {
        let p = scalar_sbqp(-2.0, 2.0);
        let cfg = SolverConfig::default();
        let a = minimize_eps_constrained(&p, Which::F2, 0.3, &cfg).unwrap();
        let b = minimize_eps_constrained(&p, Which::F2, 0.3, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
