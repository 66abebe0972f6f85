//! Curriculum weights and value-distance losses for numerical tokens.

use serde::{Deserialize, Serialize};

use crate::codec::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub r1: f64,
    pub r2: f64,
    pub lambda_min: f64,
    pub beta_max: f64,
    pub gamma_max: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { r1: 0.15, r2: 0.5, lambda_min: 0.4, beta_max: 1.0, gamma_max: 0.5 }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.r1
            && self.r1 < self.r2
            && self.r2 < 1.0
            && (0.0..=1.0).contains(&self.lambda_min)
            && self.beta_max >= 0.0
            && self.gamma_max >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid schedule {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseWeights {
    pub ce: f64,
    pub coarse: f64,
    pub fine: f64,
}

/// Loss weights at training progress `r`.
///
/// Cross-entropy only before `r1`; between `r1` and `r2` the coarse weight
/// ramps to `beta_max` while cross-entropy decays to `lambda_min`; after `r2`
/// the fine weight ramps to `gamma_max`.
pub fn schedule(r: f64, config: &ScheduleConfig) -> Result<PhaseWeights> {
    config.validate()?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("progress {r} outside [0, 1]")));
    }
    let c = config;
    Ok(if r < c.r1 {
        PhaseWeights { ce: 1.0, coarse: 0.0, fine: 0.0 }
    } else if r < c.r2 {
        let tau = (r - c.r1) / (c.r2 - c.r1);
        PhaseWeights { ce: 1.0 - tau * (1.0 - c.lambda_min), coarse: tau * c.beta_max, fine: 0.0 }
    } else {
        let rho = (r - c.r2) / (1.0 - c.r2);
        PhaseWeights { ce: c.lambda_min, coarse: c.beta_max, fine: rho * c.gamma_max }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositionKind {
    /// Integer-prefix token position.
    Int,
    /// Fractional-suffix token position.
    Frac,
    Ignored,
}

/// Predicted distributions over the prefix or suffix vocabulary, one row per position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionBatch {
    pub probs: Vec<Vec<f64>>,
    pub targets: Vec<usize>,
    pub kinds: Vec<PositionKind>,
}

const SUM_TOL: f64 = 1e-6;

impl PositionBatch {
    pub fn validate(&self, vocab: &Vocabulary) -> Result<()> {
        let t = self.probs.len();
        if self.targets.len() != t || self.kinds.len() != t {
            return Err(Error::InvalidArgument("probs, targets and kinds differ in length".into()));
        }
        for (i, ((row, &target), kind)) in self.probs.iter().zip(&self.targets).zip(&self.kinds).enumerate() {
            let width = match kind {
                PositionKind::Int => vocab.coarse.len(),
                PositionKind::Frac => vocab.fine.len(),
                PositionKind::Ignored => continue,
            };
            if row.len() != width {
                return Err(Error::DimensionMismatch { expected: width, found: row.len() });
            }
            if target >= width {
                return Err(Error::InvalidArgument(format!("position {i}: target {target} out of range")));
            }
            if row.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidArgument(format!("position {i}: probabilities must be finite and non-negative")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidArgument(format!("position {i}: probabilities sum to {s}")));
            }
        }
        Ok(())
    }
}

fn value_loss(batch: &PositionBatch, values: &[f64], kind: PositionKind) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for ((row, &target), k) in batch.probs.iter().zip(&batch.targets).zip(&batch.kinds) {
        if *k != kind {
            continue;
        }
        let v = values[target];
        total += row.iter().zip(values).map(|(p, c)| p * (c - v).abs()).sum::<f64>();
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Mean expected distance between predicted and target coarse values over
/// integer-prefix positions; 0 when there are none.
pub fn coarse_loss(batch: &PositionBatch, vocab: &Vocabulary) -> Result<f64> {
    batch.validate(vocab)?;
    Ok(value_loss(batch, &vocab.coarse, PositionKind::Int))
}

/// Fractional-suffix counterpart of [`coarse_loss`].
pub fn fine_loss(batch: &PositionBatch, vocab: &Vocabulary) -> Result<f64> {
    batch.validate(vocab)?;
    Ok(value_loss(batch, &vocab.fine, PositionKind::Frac))
}

pub fn total_loss(ce: f64, batch: &PositionBatch, r: f64, config: &ScheduleConfig, vocab: &Vocabulary) -> Result<f64> {
    if !(ce >= 0.0) || !ce.is_finite() {
        return Err(Error::InvalidArgument(format!("cross-entropy must be finite and non-negative, got {ce}")));
    }
    let w = schedule(r, config)?;
    Ok(w.ce * ce + w.coarse * coarse_loss(batch, vocab)? + w.fine * fine_loss(batch, vocab)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: PhaseWeights, b: [f64; 3]) -> bool {
        (a.ce - b[0]).abs() < 1e-12 && (a.coarse - b[1]).abs() < 1e-12 && (a.fine - b[2]).abs() < 1e-12
    }

    #[test]
    fn schedule_points() {
        let c = ScheduleConfig::default();
        assert_eq!(schedule(0.1, &c).unwrap(), PhaseWeights { ce: 1.0, coarse: 0.0, fine: 0.0 });
        assert!(close(schedule(0.325, &c).unwrap(), [0.7, 0.5, 0.0]));
        assert_eq!(schedule(1.0, &c).unwrap(), PhaseWeights { ce: 0.4, coarse: 1.0, fine: 0.5 });
        assert!(schedule(1.5, &c).is_err());
        assert!(schedule(0.5, &ScheduleConfig { r1: 0.6, ..c }).is_err());
    }

    fn one_position(kind: PositionKind, probs: Vec<f64>, target: usize) -> PositionBatch {
        PositionBatch { probs: vec![probs], targets: vec![target], kinds: vec![kind] }
    }

    #[test]
    fn hand_examples() {
        let v = Vocabulary::from_values(vec![0.0, 1.0, 2.0], vec![0.0]);
        let b = one_position(PositionKind::Int, vec![0.5, 0.25, 0.25], 1);
        assert!((coarse_loss(&b, &v).unwrap() - 0.75).abs() < 1e-15);
        let v = Vocabulary::from_values(vec![0.0], vec![0.0, 0.999]);
        let b = one_position(PositionKind::Frac, vec![0.9, 0.1], 0);
        assert!((fine_loss(&b, &v).unwrap() - 0.0999).abs() < 1e-15);
        // empty mask
        assert_eq!(coarse_loss(&b, &v).unwrap(), 0.0);
    }

    #[test]
    fn total_examples() {
        let v = Vocabulary::from_values(vec![0.0, 1.0, 2.0], vec![0.0, 1.0]);
        let b = PositionBatch {
            probs: vec![vec![0.5, 0.25, 0.25], vec![0.9, 0.1]],
            targets: vec![1, 0],
            kinds: vec![PositionKind::Int, PositionKind::Frac],
        };
        let c = ScheduleConfig::default();
        assert_eq!(total_loss(1.3, &b, 0.1, &c, &v).unwrap(), 1.3);
        assert!((total_loss(1.0, &b, 1.0, &c, &v).unwrap() - 1.2).abs() < 1e-12);
        let dirac = PositionBatch { probs: vec![vec![0.0, 1.0, 0.0]], targets: vec![1], kinds: vec![PositionKind::Int] };
        assert_eq!(total_loss(0.0, &dirac, 0.7, &c, &v).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_rows() {
        let v = Vocabulary::from_values(vec![0.0, 1.0], vec![0.0]);
        let b = one_position(PositionKind::Int, vec![0.5, 0.4], 0);
        assert!(coarse_loss(&b, &v).is_err());
        let b = one_position(PositionKind::Int, vec![0.5, 0.5], 2);
        assert!(coarse_loss(&b, &v).is_err());
    }
}
