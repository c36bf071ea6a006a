//! Norms on a subspace that are close to the Chebyshev norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A norm `Y` together with its declared sandwich constant `c`:
/// `|x|_Y <= |x|_inf <= (1 + c) |x|_Y` on the subspace.
///
/// JSON: `{ "kind": "weighted_linf" | "polytopal", "c": "1/5", "params": {...} }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbedNorm {
    pub c: Rational,
    #[serde(flatten)]
    pub kind: NormKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum NormKind {
    /// `max_i w_i |x_i|`.
    WeightedLinf { weights: Vec<Rational> },
    /// `max_q |v_q . x|`.
    Polytopal { normals: Vec<Vec<Rational>> },
}

impl PerturbedNorm {
    pub fn weighted(weights: Vec<Rational>, c: Rational) -> Self {
        PerturbedNorm {
            c,
            kind: NormKind::WeightedLinf { weights },
        }
    }

    /// The Chebyshev norm itself.
    pub fn linf(n: usize, c: Rational) -> Self {
        Self::weighted(vec![Rational::one(); n], c)
    }

    /// `(1 + c)^{-1} |x|_inf`, the extreme case of the sandwich.
    pub fn scaled_linf(n: usize, c: Rational) -> Self {
        let w = (Rational::one() + &c).recip();
        Self::weighted(vec![w; n], c)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.c.is_negative() {
            return Err(Error::Parameter("sandwich constant c must be >= 0".into()));
        }
        match &self.kind {
            NormKind::WeightedLinf { weights } => {
                if weights.len() != n {
                    return Err(Error::Dimension(format!(
                        "{} weights for dimension {n}",
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !w.is_positive()) {
                    return Err(Error::Parameter("weights must be positive".into()));
                }
            }
            NormKind::Polytopal { normals } => {
                if normals.is_empty() || normals.iter().any(|v| v.len() != n) {
                    return Err(Error::Dimension(format!(
                        "polytopal norm needs normals of length {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn piece_count(&self) -> usize {
        match &self.kind {
            NormKind::WeightedLinf { weights } => weights.len(),
            NormKind::Polytopal { normals } => normals.len(),
        }
    }

    /// `|l_q . x|` for every linear piece `l_q` of the norm.
    pub fn piece_values(&self, x: &[Rational]) -> Vec<Rational> {
        match &self.kind {
            NormKind::WeightedLinf { weights } => {
                weights.iter().zip(x).map(|(w, v)| (w * v).abs()).collect()
            }
            NormKind::Polytopal { normals } => normals
                .iter()
                .map(|u| u.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>().abs())
                .collect(),
        }
    }

    /// Signed piece values `l_q . x` in floating point.
    pub fn signed_pieces_f64(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            NormKind::WeightedLinf { weights } => {
                weights.iter().zip(x).map(|(w, v)| w.to_f64() * v).collect()
            }
            NormKind::Polytopal { normals } => normals
                .iter()
                .map(|u| u.iter().zip(x).map(|(a, b)| a.to_f64() * b).sum())
                .collect(),
        }
    }

    /// Exact norm of a rational vector.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.piece_values(x)
            .into_iter()
            .fold(Rational::zero(), Rational::max)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.signed_pieces_f64(x)
            .into_iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The linear functional of piece `q` as a dense row.
    pub fn piece_row(&self, q: usize, n: usize) -> Vec<Rational> {
        match &self.kind {
            NormKind::WeightedLinf { weights } => {
                let mut row = vec![Rational::zero(); n];
                row[q] = weights[q].clone();
                row
            }
            NormKind::Polytopal { normals } => normals[q].clone(),
        }
    }

    /// For weighted norms the sandwich holds on all of `R^n` exactly when every
    /// weight lies in `[1/(1+c), 1]`. Polytopal norms return `None`.
    pub fn weights_within_sandwich(&self) -> Option<bool> {
        match &self.kind {
            NormKind::WeightedLinf { weights } => {
                let low = (Rational::one() + &self.c).recip();
                Some(weights.iter().all(|w| *w >= low && *w <= Rational::one()))
            }
            NormKind::Polytopal { .. } => None,
        }
    }
}
