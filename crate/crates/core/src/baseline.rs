//! Weighted-sum frontiers on a uniform weight grid.

use crate::codec::round4;
use crate::error::{Error, Result};
use crate::frontier::FrontierPoint;
use crate::problem::ProblemInstance;
use crate::solver::{minimize_scalarized, SolverConfig};

/// Solves `λ f1 + (1 − λ) f2` for `k` weights from 1 down to 0 and rounds the
/// minimizers to four decimals. Points come out in weight order, so roughly
/// by ascending `f1`.
pub fn weighted_sum_frontier(instance: &ProblemInstance, k: usize, config: &SolverConfig) -> Result<Vec<FrontierPoint>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("K must be at least 2, got {k}")));
    }
    (0..k)
        .map(|i| {
            let weight = 1.0 - i as f64 / (k - 1) as f64;
            let r = minimize_scalarized(instance, weight, config)?;
            let x: Vec<f64> = r.x.iter().copied().map(round4).collect();
            let f = instance.objectives(&x)?;
            Ok(FrontierPoint { x, f })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::toy::scalar_sbqp;

    #[test]
    fn toy_grid() {
        let pts = weighted_sum_frontier(&scalar_sbqp(-2.0, 2.0), 11, &SolverConfig::default()).unwrap();
        let xs: Vec<f64> = pts.iter().map(|p| p.x[0]).collect();
        let want: Vec<f64> = (0..11).map(|i| round4(i as f64 / 10.0)).collect();
        assert_eq!(xs, want);
    }
}
