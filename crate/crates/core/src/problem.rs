//! Constrained bi-objective convex problem instances.
//!
//! An instance is a box `lower ≤ x ≤ upper`, optional linear rows
//! `cons_matrix · x ≤ cons_rhs`, and one of five objective families. Every
//! family is strongly convex, so each scalarized subproblem has a unique
//! minimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::MAX_ABS;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "BOQP")]
    Boqp,
    #[serde(rename = "SBQP")]
    Sbqp,
    Ridge,
    Huber,
    Softplus,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Boqp,
        Family::Sbqp,
        Family::Ridge,
        Family::Huber,
        Family::Softplus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Boqp => "BOQP",
            Family::Sbqp => "SBQP",
            Family::Ridge => "Ridge",
            Family::Huber => "Huber",
            Family::Softplus => "Softplus",
        }
    }

    /// Case-insensitive lookup by display name.
    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Selects one of the two objectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Which {
    F1,
    F2,
}

impl Which {
    pub fn index(self) -> usize {
        match self {
            Which::F1 => 0,
            Which::F2 => 1,
        }
    }

    pub fn other(self) -> Which {
        match self {
            Which::F1 => Which::F2,
            Which::F2 => Which::F1,
        }
    }
}

/// Objective parameters. Each array holds `[objective 1, objective 2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FamilyParams {
    /// `½ xᵀQx + qᵀx + c`
    #[serde(rename = "BOQP")]
    Boqp {
        quad: [Matrix; 2],
        lin: [Vec<f64>; 2],
        constant: [f64; 2],
    },
    /// `Σ a_i x_i² + b_i x_i` (and `α`, `β` for the second objective)
    #[serde(rename = "SBQP")]
    Sbqp {
        quad: [Vec<f64>; 2],
        lin: [Vec<f64>; 2],
    },
    /// `½‖Ax − b‖² + λ/2 ‖x‖²`
    Ridge {
        m_obj: usize,
        design: [Matrix; 2],
        target: [Vec<f64>; 2],
        reg: [f64; 2],
    },
    /// `Σ φ_δ((Ax − b)_j) + λ/2 ‖x‖²`
    Huber {
        m_obj: usize,
        design: [Matrix; 2],
        target: [Vec<f64>; 2],
        reg: [f64; 2],
        delta: [f64; 2],
    },
    /// `Σ log(1 + exp(a_jᵀx − b_j)) + λ/2 ‖x‖²`
    Softplus {
        m_obj: usize,
        design: [Matrix; 2],
        target: [Vec<f64>; 2],
        reg: [f64; 2],
    },
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Boqp { .. } => Family::Boqp,
            FamilyParams::Sbqp { .. } => Family::Sbqp,
            FamilyParams::Ridge { .. } => Family::Ridge,
            FamilyParams::Huber { .. } => Family::Huber,
            FamilyParams::Softplus { .. } => Family::Softplus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub n: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cons_matrix: Matrix,
    pub cons_rhs: Vec<f64>,
    pub params: FamilyParams,
}

/// Empirical constants of an instance used by the path and rounding bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryBounds {
    /// Sampled sup of `‖∇f1 − ∇f2‖₂` over the box.
    pub grad_gap: f64,
    /// Strong convexity modulus shared by both objectives.
    pub strong_convexity: f64,
    /// Sampled sup of `‖∇f_i‖_∞`, the Lipschitz constant with respect to `‖·‖₁`.
    pub lipschitz_l1: f64,
    /// Sampled sup of `‖∇f_i‖₂`.
    pub lipschitz_l2: f64,
}

#[inline]
fn huber(r: f64, delta: f64) -> f64 {
    if r.abs() <= delta {
        0.5 * r * r
    } else {
        delta * r.abs() - 0.5 * delta * delta
    }
}

#[inline]
fn huber_slope(r: f64, delta: f64) -> f64 {
    if r.abs() <= delta {
        r
    } else {
        delta * r.signum()
    }
}

#[inline]
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl ProblemInstance {
    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn num_cons(&self) -> usize {
        self.cons_rhs.len()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    /// Checks every structural and family invariant.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if n == 0 {
            return bad("dimension must be positive".into());
        }
        if self.lower.len() != n || self.upper.len() != n {
            return bad(format!("bounds must have length {n}"));
        }
        for i in 0..n {
            let (l, u) = (self.lower[i], self.upper[i]);
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::NonFinite(format!("bounds[{i}]")));
            }
            if l >= u {
                return bad(format!("lower[{i}] = {l} is not below upper[{i}] = {u}"));
            }
            if l.abs() > MAX_ABS || u.abs() > MAX_ABS {
                return bad(format!("bounds[{i}] exceed ±{MAX_ABS}"));
            }
        }
        if self.cons_matrix.len() != self.cons_rhs.len() {
            return bad("constraint rows and right-hand side differ in length".into());
        }
        if self.cons_matrix.iter().any(|r| r.len() != n) {
            return bad(format!("constraint rows must have length {n}"));
        }
        let mid = self.midpoint();
        for (j, (row, b)) in self.cons_matrix.iter().zip(&self.cons_rhs).enumerate() {
            if dot(row, &mid) >= *b {
                return bad(format!("midpoint violates or touches constraint row {j}"));
            }
        }
        self.validate_params()
    }

    fn validate_params(&self) -> Result<()> {
        let n = self.n;
        let bad = |m: String| Err(Error::InvalidInstance(m));
        let check_vec = |v: &[f64], what: &str| -> Result<()> {
            if v.len() != n {
                return Err(Error::InvalidInstance(format!("{what} must have length {n}")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(what.into()));
            }
            Ok(())
        };
        let check_residual = |m_obj: usize, design: &[Matrix; 2], target: &[Vec<f64>; 2], reg: &[f64; 2]| {
            for i in 0..2 {
                if design[i].len() != m_obj || target[i].len() != m_obj {
                    return Err(Error::InvalidInstance(format!(
                        "objective {} must have {m_obj} residual rows",
                        i + 1
                    )));
                }
                if design[i].iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidInstance(format!("design rows must have length {n}")));
                }
                if !(reg[i] > 0.0) {
                    return Err(Error::InvalidInstance("regularization weights must be positive".into()));
                }
            }
            Ok(())
        };
        match &self.params {
            FamilyParams::Boqp { quad, lin, constant } => {
                for i in 0..2 {
                    if quad[i].len() != n || quad[i].iter().any(|r| r.len() != n) {
                        return bad(format!("Q{} must be {n}×{n}", i + 1));
                    }
                    if !linalg::is_symmetric(&quad[i]) {
                        return bad(format!("Q{} is not symmetric", i + 1));
                    }
                    if linalg::min_eigenvalue(&quad[i]) <= 0.0 {
                        return bad(format!("Q{} is not positive definite", i + 1));
                    }
                    check_vec(&lin[i], "q")?;
                    if !constant[i].is_finite() {
                        return Err(Error::NonFinite("c".into()));
                    }
                }
            }
            FamilyParams::Sbqp { quad, lin } => {
                for i in 0..2 {
                    check_vec(&quad[i], "quadratic coefficients")?;
                    check_vec(&lin[i], "linear coefficients")?;
                    if quad[i].iter().any(|a| !(*a > 0.0)) {
                        return bad("separable quadratic coefficients must be positive".into());
                    }
                }
            }
            FamilyParams::Ridge { m_obj, design, target, reg }
            | FamilyParams::Softplus { m_obj, design, target, reg } => {
                check_residual(*m_obj, design, target, reg)?;
            }
            FamilyParams::Huber { m_obj, design, target, reg, delta } => {
                check_residual(*m_obj, design, target, reg)?;
                if delta.iter().any(|d| !(*d > 0.0)) {
                    return bad("Huber thresholds must be positive".into());
                }
            }
        }
        Ok(())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("decision vector".into()));
        }
        Ok(())
    }

    /// Exact objective value.
    pub fn evaluate(&self, x: &[f64], which: Which) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.value(x, which))
    }

    /// Both objective values.
    pub fn objectives(&self, x: &[f64]) -> Result<[f64; 2]> {
        self.check_point(x)?;
        Ok([self.value(x, Which::F1), self.value(x, Which::F2)])
    }

    /// Analytic gradient.
    pub fn gradient(&self, x: &[f64], which: Which) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut g = vec![0.0; self.n];
        self.value_grad(x, which, &mut g);
        Ok(g)
    }

    /// Unchecked objective value; `x` must have length `n`.
    pub(crate) fn value(&self, x: &[f64], which: Which) -> f64 {
        let i = which.index();
        match &self.params {
            FamilyParams::Boqp { quad, lin, constant } => {
                let q = &quad[i];
                let mut s = 0.0;
                for (r, row) in q.iter().enumerate() {
                    s += x[r] * dot(row, x);
                }
                0.5 * s + dot(&lin[i], x) + constant[i]
            }
            FamilyParams::Sbqp { quad, lin } => quad[i]
                .iter()
                .zip(&lin[i])
                .zip(x)
                .map(|((a, b), v)| a * v * v + b * v)
                .sum(),
            FamilyParams::Ridge { design, target, reg, .. } => {
                let res: f64 = design[i]
                    .iter()
                    .zip(&target[i])
                    .map(|(row, b)| {
                        let r = dot(row, x) - b;
                        r * r
                    })
                    .sum();
                0.5 * res + 0.5 * reg[i] * dot(x, x)
            }
            FamilyParams::Huber { design, target, reg, delta, .. } => {
                let res: f64 = design[i]
                    .iter()
                    .zip(&target[i])
                    .map(|(row, b)| huber(dot(row, x) - b, delta[i]))
                    .sum();
                res + 0.5 * reg[i] * dot(x, x)
            }
            FamilyParams::Softplus { design, target, reg, .. } => {
                let res: f64 = design[i]
                    .iter()
                    .zip(&target[i])
                    .map(|(row, b)| softplus(dot(row, x) - b))
                    .sum();
                res + 0.5 * reg[i] * dot(x, x)
            }
        }
    }

    /// Unchecked value and gradient; writes the gradient into `grad`.
    pub(crate) fn value_grad(&self, x: &[f64], which: Which, grad: &mut [f64]) -> f64 {
        let i = which.index();
        match &self.params {
            FamilyParams::Boqp { quad, lin, constant } => {
                let mut s = 0.0;
                for (r, row) in quad[i].iter().enumerate() {
                    let qx = dot(row, x);
                    grad[r] = qx + lin[i][r];
                    s += x[r] * qx;
                }
                0.5 * s + dot(&lin[i], x) + constant[i]
            }
            FamilyParams::Sbqp { quad, lin } => {
                let mut s = 0.0;
                for r in 0..x.len() {
                    let (a, b, v) = (quad[i][r], lin[i][r], x[r]);
                    grad[r] = 2.0 * a * v + b;
                    s += a * v * v + b * v;
                }
                s
            }
            FamilyParams::Ridge { design, target, reg, .. } => {
                residual_value_grad(&design[i], &target[i], reg[i], x, grad, |r| (0.5 * r * r, r))
            }
            FamilyParams::Huber { design, target, reg, delta, .. } => {
                let d = delta[i];
                residual_value_grad(&design[i], &target[i], reg[i], x, grad, |r| {
                    (huber(r, d), huber_slope(r, d))
                })
            }
            FamilyParams::Softplus { design, target, reg, .. } => {
                residual_value_grad(&design[i], &target[i], reg[i], x, grad, |r| {
                    (softplus(r), sigmoid(r))
                })
            }
        }
    }

    /// Strong convexity modulus of one objective: `min eig(Q)` for BOQP,
    /// `2 min a_i` for SBQP and the ridge weight `λ` for the residual families.
    pub fn strong_convexity(&self, which: Which) -> f64 {
        let i = which.index();
        match &self.params {
            FamilyParams::Boqp { quad, .. } => linalg::min_eigenvalue(&quad[i]),
            FamilyParams::Sbqp { quad, .. } => {
                2.0 * quad[i].iter().copied().fold(f64::INFINITY, f64::min)
            }
            FamilyParams::Ridge { reg, .. }
            | FamilyParams::Huber { reg, .. }
            | FamilyParams::Softplus { reg, .. } => reg[i],
        }
    }

    /// Feasibility with tolerance `tol` on both the box and the linear rows.
    pub fn check_feasible(&self, x: &[f64], tol: f64) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        if !(tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {tol}")));
        }
        Ok(self.is_feasible(x, tol))
    }

    pub(crate) fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let in_box = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol);
        in_box
            && self
                .cons_matrix
                .iter()
                .zip(&self.cons_rhs)
                .all(|(row, b)| dot(row, x) <= b + tol)
    }

    /// Uniform sample from the box.
    pub fn sample_box<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| rng.random_range(*l..*u))
            .collect()
    }

    /// Sampled gradient-gap and Lipschitz constants plus the analytic
    /// strong-convexity modulus.
    pub fn estimate_bounds(&self, samples: usize, seed: u64) -> Result<TheoryBounds> {
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g1 = vec![0.0; self.n];
        let mut g2 = vec![0.0; self.n];
        let (mut gap, mut l1, mut l2) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let x = self.sample_box(&mut rng);
            self.value_grad(&x, Which::F1, &mut g1);
            self.value_grad(&x, Which::F2, &mut g2);
            let d: f64 = g1.iter().zip(&g2).map(|(a, b)| (a - b) * (a - b)).sum();
            gap = gap.max(d.sqrt());
            for g in [&g1, &g2] {
                l1 = l1.max(linalg::norm_inf(g));
                l2 = l2.max(linalg::norm2(g));
            }
        }
        let strong_convexity = self
            .strong_convexity(Which::F1)
            .min(self.strong_convexity(Which::F2));
        Ok(TheoryBounds {
            grad_gap: gap,
            strong_convexity,
            lipschitz_l1: l1,
            lipschitz_l2: l2,
        })
    }
}

fn residual_value_grad(
    design: &[Vec<f64>],
    target: &[f64],
    reg: f64,
    x: &[f64],
    grad: &mut [f64],
    kernel: impl Fn(f64) -> (f64, f64),
) -> f64 {
    for (g, v) in grad.iter_mut().zip(x) {
        *g = reg * v;
    }
    let mut s = 0.5 * reg * dot(x, x);
    for (row, b) in design.iter().zip(target) {
        let (phi, slope) = kernel(dot(row, x) - b);
        s += phi;
        if slope != 0.0 {
            for (g, a) in grad.iter_mut().zip(row) {
                *g += slope * a;
            }
        }
    }
    s
}

/// Builders for the small hand-written instances used across the test suites.
pub mod toy {
    use super::*;

    /// Separable quadratic without linear rows.
    pub fn sbqp(lower: Vec<f64>, upper: Vec<f64>, quad: [Vec<f64>; 2], lin: [Vec<f64>; 2]) -> ProblemInstance {
        ProblemInstance {
            n: lower.len(),
            lower,
            upper,
            cons_matrix: vec![],
            cons_rhs: vec![],
            params: FamilyParams::Sbqp { quad, lin },
        }
    }

    /// `f1 = x²`, `f2 = x² − 2x` on `[lo, hi]`; the Pareto set is `[0, 1] ∩ [lo, hi]`.
    pub fn scalar_sbqp(lo: f64, hi: f64) -> ProblemInstance {
        sbqp(vec![lo], vec![hi], [vec![1.0], vec![1.0]], [vec![0.0], vec![-2.0]])
    }
}

#[cfg(test)]
mod tests {
    use super::toy::*;
    use super::*;

    fn residual_instance(family: Family, design: Matrix, target: Vec<f64>, reg: f64, delta: f64) -> ProblemInstance {
        let n = design[0].len();
        let m = design.len();
        let params = match family {
            Family::Ridge => FamilyParams::Ridge {
                m_obj: m,
                design: [design.clone(), design],
                target: [target.clone(), target],
                reg: [reg, reg],
            },
            Family::Huber => FamilyParams::Huber {
                m_obj: m,
                design: [design.clone(), design],
                target: [target.clone(), target],
                reg: [reg, reg],
                delta: [delta, delta],
            },
            Family::Softplus => FamilyParams::Softplus {
                m_obj: m,
                design: [design.clone(), design],
                target: [target.clone(), target],
                reg: [reg, reg],
            },
            _ => unreachable!(),
        };
        ProblemInstance {
            n,
            lower: vec![-5.0; n],
            upper: vec![5.0; n],
            cons_matrix: vec![],
            cons_rhs: vec![],
            params,
        }
    }

    #[test]
    fn sbqp_value_and_gradient() {
        let p = sbqp(vec![-1.0], vec![1.0], [vec![1.0], vec![1.0]], [vec![0.0], vec![0.0]]);
        assert_eq!(p.evaluate(&[0.5], Which::F1).unwrap(), 0.25);
        assert_eq!(p.gradient(&[0.5], Which::F1).unwrap(), vec![1.0]);
    }

    #[test]
    fn huber_linear_branch() {
        // residual r = x - 0 at x = 2 with δ = 1: 2·1 − 0.5
        let p = residual_instance(Family::Huber, vec![vec![1.0]], vec![0.0], 1e-3, 1.0);
        let mut q = p.clone();
        if let FamilyParams::Huber { reg, .. } = &mut q.params {
            *reg = [0.0, 0.0];
        }
        assert!((q.value(&[2.0], Which::F1) - 1.5).abs() < 1e-15);
        let mut g = [0.0];
        q.value_grad(&[2.0], Which::F1, &mut g);
        assert_eq!(g[0], 1.0);
        q.value_grad(&[0.5], Which::F1, &mut g);
        assert_eq!(g[0], 0.5);
    }

    #[test]
    fn softplus_at_zero_is_ln2() {
        let mut p = residual_instance(Family::Softplus, vec![vec![1.0, -1.0]], vec![0.0], 1e-3, 0.0);
        if let FamilyParams::Softplus { reg, .. } = &mut p.params {
            *reg = [0.0, 0.0];
        }
        let v = p.value(&[0.3, 0.3], Which::F2);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn boqp_identity_gradient() {
        let eye = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let p = ProblemInstance {
            n: 2,
            lower: vec![-5.0; 2],
            upper: vec![5.0; 2],
            cons_matrix: vec![],
            cons_rhs: vec![],
            params: FamilyParams::Boqp {
                quad: [eye.clone(), eye],
                lin: [vec![0.0; 2], vec![1.0; 2]],
                constant: [0.0, 3.0],
            },
        };
        assert_eq!(p.gradient(&[1.0, 2.0], Which::F1).unwrap(), vec![1.0, 2.0]);
        assert_eq!(p.evaluate(&[1.0, 2.0], Which::F2).unwrap(), 2.5 + 3.0 + 3.0);
        p.validate().unwrap();
    }

    #[test]
    fn dimension_and_finiteness_errors() {
        let p = scalar_sbqp(-2.0, 2.0);
        assert_eq!(
            p.evaluate(&[0.0, 1.0], Which::F1),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
        assert!(matches!(p.evaluate(&[f64::NAN], Which::F1), Err(Error::NonFinite(_))));
        assert!(p.gradient(&[], Which::F2).is_err());
        assert!(p.check_feasible(&[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn feasibility_tolerance_band() {
        let tol = 5e-5;
        let p = scalar_sbqp(-2.0, 2.0);
        assert!(p.check_feasible(&[2.0 + tol / 2.0], tol).unwrap());
        assert!(!p.check_feasible(&[2.0 + 2.0 * tol], tol).unwrap());
        assert!(p.check_feasible(&p.midpoint(), 0.0).unwrap());
    }

    #[test]
    fn feasibility_linear_rows() {
        let mut p = sbqp(vec![-1.0; 2], vec![1.0; 2], [vec![1.0; 2], vec![1.0; 2]], [vec![0.0; 2], vec![0.0; 2]]);
        p.cons_matrix = vec![vec![1.0, 1.0]];
        p.cons_rhs = vec![0.5];
        assert!(p.check_feasible(&[0.25, 0.25], 0.0).unwrap());
        assert!(!p.check_feasible(&[0.5, 0.5], 0.0).unwrap());
        assert!(p.check_feasible(&[0.25, 0.25 + 4e-5], 5e-5).unwrap());
    }

    #[test]
    fn gradient_gap_of_constant_difference() {
        // ∇f1 − ∇f2 = 2x − (2x − 2) = 2 everywhere
        let p = sbqp(vec![-3.0], vec![3.0], [vec![1.0], vec![1.0]], [vec![0.0], vec![-2.0]]);
        let b = p.estimate_bounds(64, 7).unwrap();
        assert!((b.grad_gap - 2.0).abs() < 1e-12);
        assert_eq!(b, p.estimate_bounds(64, 7).unwrap());
    }

    #[test]
    fn sbqp_strong_convexity_is_twice_smallest_coefficient() {
        let p = sbqp(vec![-1.0; 2], vec![1.0; 2], [vec![1.0, 3.0], vec![2.0, 5.0]], [vec![0.0; 2], vec![0.0; 2]]);
        assert_eq!(p.estimate_bounds(8, 0).unwrap().strong_convexity, 2.0);
    }

    #[test]
    fn estimate_bounds_rejects_zero_samples() {
        assert!(scalar_sbqp(-1.0, 1.0).estimate_bounds(0, 0).is_err());
    }

    #[test]
    fn validate_rejects_bad_instances() {
        let mut p = scalar_sbqp(-2.0, 2.0);
        p.validate().unwrap();
        p.upper = vec![-2.0];
        assert!(p.validate().is_err());
        let mut p = scalar_sbqp(-2.0, 120.0);
        assert!(p.validate().is_err());
        p.upper = vec![2.0];
        p.cons_matrix = vec![vec![1.0]];
        p.cons_rhs = vec![0.0];
        assert!(p.validate().is_err(), "midpoint on the constraint must be rejected");
        let p = sbqp(vec![-1.0], vec![1.0], [vec![0.0], vec![1.0]], [vec![0.0], vec![0.0]]);
        assert!(p.validate().is_err());
    }
}
