//! Small dense helpers. Dimensions in this crate stay below a few dozen, so
//! plain row-major `Vec<Vec<f64>>` storage is enough.

use nalgebra::DMatrix;

pub type Matrix = Vec<Vec<f64>>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `out = m * x`
pub fn matvec_into(m: &[Vec<f64>], x: &[f64], out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(m) {
        *o = dot(row, x);
    }
}

pub fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let dm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    dm.symmetric_eigenvalues().min()
}

/// `AᵀA`, used for curvature estimates of residual objectives.
pub fn gram(a: &[Vec<f64>], n: usize) -> Matrix {
    let mut g = vec![vec![0.0; n]; n];
    for row in a {
        for i in 0..n {
            if row[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    g
}

pub fn is_symmetric(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    (0..n).all(|i| m[i].len() == n && (0..i).all(|j| m[i][j] == m[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_eigenvalue_of_diagonal() {
        let m = vec![vec![3.0, 0.0], vec![0.0, 0.5]];
        assert!((min_eigenvalue(&m) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn min_eigenvalue_of_coupled() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        assert!((min_eigenvalue(&m) - 1.0).abs() < 1e-12);
    }
}
