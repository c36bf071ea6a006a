use serde::{Deserialize, Serialize};

use crate::norm::PerturbedNorm;
use crate::rational::Rational;

/// Pair counts above this are not given per-pair evidence records.
pub const DEFAULT_EVIDENCE_PAIRS: usize = 1 << 16;

/// The norm an equilateral certificate is stated in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormTag {
    /// `max_i |x_i|`.
    Linf,
    /// `max_q |u_q . x|` for the given facet normals.
    Polytopal { normals: Vec<Vec<Rational>> },
    /// A norm given by a [`PerturbedNorm`]; distances are accepted within `tolerance`.
    Perturbed { norm: PerturbedNorm, tolerance: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// 2-equilateral set from sign vectors split into windows on the tail.
    SignWindows,
    /// 1-equilateral set from `{0, -sigma}` patterns split by orthant.
    OrthantSplit,
    /// 1-equilateral set from half-vector block sums.
    BlockSums,
    /// The vertices of the cube.
    CubeVertices,
    /// Fixed point of the distance-equalising map in a nearby norm.
    FixedPoint,
}

impl Construction {
    /// The 1/2/3 numbering used on the command line, when there is one.
    pub fn bound_number(self) -> Option<u8> {
        match self {
            Construction::SignWindows => Some(1),
            Construction::OrthantSplit => Some(2),
            Construction::BlockSums => Some(3),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub construction: Construction,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    /// The closed-form lower bound this construction promises, unrounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<Rational>,
    /// The promised size (ceiling of `formula`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guaranteed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<bool>,
}

/// One recorded pairwise distance: `points[pair.0]` and `points[pair.1]` are at
/// `distance`, attained first at coordinate (or facet) `witness_coord`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub pair: [usize; 2],
    pub witness_coord: usize,
    pub distance: Rational,
}

/// A determinant comparison `lhs <= rhs` (or `lhs < rhs` when `strict`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub label: String,
    pub lhs: Rational,
    pub rhs: Rational,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub strict: bool,
}

impl StabilityCheck {
    pub fn new(label: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        StabilityCheck {
            label: label.into(),
            lhs,
            rhs,
            strict: false,
        }
    }

    pub fn strict(label: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        StabilityCheck {
            strict: true,
            ..Self::new(label, lhs, rhs)
        }
    }

    pub fn holds(&self) -> bool {
        if self.strict {
            self.lhs < self.rhs
        } else {
            self.lhs <= self.rhs
        }
    }
}

/// The summands of a block-sum point, kept so a failure can be traced to a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRecord {
    pub point: usize,
    pub rank: usize,
    pub w: Vec<Rational>,
    pub z: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilateralCertificate {
    pub source: Source,
    pub norm: NormTag,
    pub distance: Rational,
    pub points: Vec<Vec<Rational>>,
    /// `None` when the set is too large for per-pair records.
    pub evidence: Option<Vec<PairEvidence>>,
    #[serde(default)]
    pub stability_checks: Vec<StabilityCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<PartRecord>,
}

impl EquilateralCertificate {
    /// Builds a certificate and records per-pair evidence when the set is small enough.
    pub fn new(
        source: Source,
        norm: NormTag,
        distance: Rational,
        points: Vec<Vec<Rational>>,
        stability_checks: Vec<StabilityCheck>,
    ) -> Self {
        let evidence = record_evidence(&points, &norm, DEFAULT_EVIDENCE_PAIRS);
        EquilateralCertificate {
            source,
            norm,
            distance,
            points,
            evidence,
            stability_checks,
            parts: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Distance and first maximising coordinate for every pair `s < t`.
pub fn record_evidence(
    points: &[Vec<Rational>],
    norm: &NormTag,
    max_pairs: usize,
) -> Option<Vec<PairEvidence>> {
    let n = points.len();
    if n * n.saturating_sub(1) / 2 > max_pairs {
        return None;
    }
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for s in 0..n {
        for t in s + 1..n {
            let diff: Vec<Rational> = points[s].iter().zip(&points[t]).map(|(a, b)| a - b).collect();
            let values: Vec<Rational> = match norm {
                NormTag::Linf => diff.iter().map(Rational::abs).collect(),
                NormTag::Polytopal { normals } => normals
                    .iter()
                    .map(|u| u.iter().zip(&diff).map(|(a, b)| a * b).sum::<Rational>().abs())
                    .collect(),
                NormTag::Perturbed { norm, .. } => norm.piece_values(&diff),
            };
            let (witness, best) = values
                .iter()
                .enumerate()
                .fold((0, Rational::zero()), |(wi, wv), (i, v)| {
                    if *v > wv {
                        (i, v.clone())
                    } else {
                        (wi, wv)
                    }
                });
            out.push(PairEvidence {
                pair: [s, t],
                witness_coord: witness,
                distance: best,
            });
        }
    }
    Some(out)
}
