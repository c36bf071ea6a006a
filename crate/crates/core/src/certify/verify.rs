//! Independent re-verification of equilateral certificates.
//!
//! Nothing here calls into the constructions or the matrix module: distances,
//! projections and membership are recomputed with plain loops over
//! [`Rational`]. For exact norms the pairwise scan runs on integers after
//! scaling by a common denominator, which keeps large sets cheap without
//! giving up exactness.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::certificate::{EquilateralCertificate, NormTag};
use crate::rational::{common_denominator, Rational};
use crate::subspace::SubspaceSpec;

const MAX_FAILURES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum Failure {
    WrongLength { point: usize, expected: usize, found: usize },
    NonPositiveDistance,
    /// Coordinate (or facet) `coord` separates the pair by more than the distance.
    CoordinateExceeds { pair: [usize; 2], coord: usize, value: Rational },
    /// No coordinate attains the distance; `coord` is where the maximum `found` sits.
    DistanceMismatch { pair: [usize; 2], coord: usize, found: Rational },
    /// Perturbed norms: distance outside the stated tolerance.
    OutsideTolerance { pair: [usize; 2], found: Rational },
    NotInSubspace { point: usize, row: usize, residual: Rational },
    EvidenceMismatch { pair: [usize; 2] },
    StabilityViolated { index: usize, label: String },
}

impl Failure {
    /// The pair a failure is attributed to, if it is a pairwise failure.
    pub fn pair(&self) -> Option<[usize; 2]> {
        match self {
            Failure::CoordinateExceeds { pair, .. }
            | Failure::DistanceMismatch { pair, .. }
            | Failure::OutsideTolerance { pair, .. }
            | Failure::EvidenceMismatch { pair } => Some(*pair),
            _ => None,
        }
    }

    /// Whether the failure involves point `p`.
    pub fn involves(&self, p: usize) -> bool {
        match self {
            Failure::WrongLength { point, .. } | Failure::NotInSubspace { point, .. } => {
                *point == p
            }
            other => other.pair().is_some_and(|pair| pair.contains(&p)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub points: usize,
    pub pairs_checked: u64,
    pub failures: Vec<Failure>,
    /// More failures existed than are listed.
    pub truncated: bool,
}

struct Collector {
    failures: Vec<Failure>,
    truncated: bool,
}

impl Collector {
    fn push(&mut self, f: Failure) {
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(f);
        } else {
            self.truncated = true;
        }
    }
}

/// Exact Chebyshev distance `max_i |x_i - y_i|`.
pub fn linf_distance(x: &[Rational], y: &[Rational]) -> crate::error::Result<Rational> {
    if x.len() != y.len() {
        return Err(crate::error::Error::Dimension(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(Rational::zero(), Rational::max))
}

/// Re-derives every distance and membership claim of `cert`.
///
/// `spec`, when given, is the subspace a Chebyshev-norm or perturbed-norm
/// certificate claims to live in.
pub fn verify_certificate(
    cert: &EquilateralCertificate,
    spec: Option<&SubspaceSpec>,
) -> VerificationReport {
    let mut out = Collector {
        failures: Vec::new(),
        truncated: false,
    };
    let points = &cert.points;
    let dim = expected_dimension(cert, spec);
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            out.push(Failure::WrongLength {
                point: i,
                expected: dim,
                found: p.len(),
            });
        }
    }
    if !out.failures.is_empty() {
        return finish(out, points.len(), 0);
    }
    if points.len() >= 2 && !cert.distance.is_positive() {
        out.push(Failure::NonPositiveDistance);
    }

    let pairs_checked = match &cert.norm {
        NormTag::Linf => {
            let proj: Vec<Vec<Rational>> = points.clone();
            check_exact(&proj, &cert.distance, &mut out)
        }
        NormTag::Polytopal { normals } => {
            let proj: Vec<Vec<Rational>> = points.iter().map(|p| project(normals, p)).collect();
            check_exact(&proj, &cert.distance, &mut out)
        }
        NormTag::Perturbed { norm, tolerance } => {
            let rows: Vec<Vec<Rational>> = (0..norm.piece_count())
                .map(|q| norm.piece_row(q, dim))
                .collect();
            let proj: Vec<Vec<Rational>> = points.iter().map(|p| project(&rows, p)).collect();
            let tol = Rational::from_f64(*tolerance).unwrap_or_else(Rational::zero);
            check_tolerance(&proj, &cert.distance, &tol, &mut out)
        }
    };

    if let (Some(spec), NormTag::Linf | NormTag::Perturbed { .. }) = (spec, &cert.norm) {
        check_membership(spec, points, &mut out);
    }
    if let Some(evidence) = &cert.evidence {
        check_evidence(cert, evidence, &mut out);
    }
    for (i, chk) in cert.stability_checks.iter().enumerate() {
        let ok = if chk.strict {
            chk.lhs < chk.rhs
        } else {
            chk.lhs <= chk.rhs
        };
        if !ok {
            out.push(Failure::StabilityViolated {
                index: i,
                label: chk.label.clone(),
            });
        }
    }
    finish(out, points.len(), pairs_checked)
}

fn finish(out: Collector, points: usize, pairs_checked: u64) -> VerificationReport {
    VerificationReport {
        valid: out.failures.is_empty() && !out.truncated,
        points,
        pairs_checked,
        failures: out.failures,
        truncated: out.truncated,
    }
}

fn expected_dimension(cert: &EquilateralCertificate, spec: Option<&SubspaceSpec>) -> usize {
    match (&cert.norm, spec) {
        (NormTag::Polytopal { normals }, _) => normals.first().map_or(0, Vec::len),
        (_, Some(spec)) => spec.n(),
        _ => cert.points.first().map_or(0, Vec::len),
    }
}

fn project(rows: &[Vec<Rational>], p: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|u| {
            let mut acc = Rational::zero();
            for (a, b) in u.iter().zip(p) {
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            acc
        })
        .collect()
}

trait Exact: Clone + Ord {
    fn abs_diff(&self, other: &Self) -> Self;
}

impl Exact for i128 {
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
}

impl Exact for Rational {
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
}

/// Pairwise check on projected coordinates: every difference at most `c`,
/// and some difference equal to `c`.
fn check_exact(proj: &[Vec<Rational>], c: &Rational, out: &mut Collector) -> u64 {
    let denom = common_denominator(proj.iter().flatten().chain(std::iter::once(c)));
    let limit = BigInt::from(1i128 << 120);
    let scale = |v: &Rational| -> Option<i128> {
        let scaled = v.numer() * (&denom / v.denom());
        if scaled.magnitude() < limit.magnitude() {
            scaled.to_i128()
        } else {
            None
        }
    };
    let ints: Option<Vec<Vec<i128>>> = proj
        .iter()
        .map(|p| p.iter().map(scale).collect::<Option<Vec<_>>>())
        .collect();
    let as_rational = |v: i128| Rational::from_bigint(BigInt::from(v)) / Rational::from_bigint(denom.clone());
    match (ints, scale(c)) {
        (Some(ints), Some(ci)) => pair_scan(&ints, &ci, out, as_rational),
        _ => pair_scan(proj, c, out, |v| v),
    }
}

fn pair_scan<T: Exact>(
    proj: &[Vec<T>],
    c: &T,
    out: &mut Collector,
    to_rational: impl Fn(T) -> Rational,
) -> u64 {
    let mut pairs = 0u64;
    for s in 0..proj.len() {
        for t in s + 1..proj.len() {
            pairs += 1;
            let mut best: Option<(usize, T)> = None;
            let mut exceeded = None;
            for (i, (a, b)) in proj[s].iter().zip(&proj[t]).enumerate() {
                let d = a.abs_diff(b);
                if d > *c {
                    exceeded = Some((i, d));
                    break;
                }
                if best.as_ref().is_none_or(|(_, bv)| d > *bv) {
                    best = Some((i, d));
                }
            }
            if let Some((coord, value)) = exceeded {
                out.push(Failure::CoordinateExceeds {
                    pair: [s, t],
                    coord,
                    value: to_rational(value),
                });
                continue;
            }
            match best {
                Some((_, v)) if v == *c => {}
                Some((coord, v)) => out.push(Failure::DistanceMismatch {
                    pair: [s, t],
                    coord,
                    found: to_rational(v),
                }),
                None => out.push(Failure::DistanceMismatch {
                    pair: [s, t],
                    coord: 0,
                    found: Rational::zero(),
                }),
            }
        }
    }
    pairs
}

fn check_tolerance(
    proj: &[Vec<Rational>],
    c: &Rational,
    tol: &Rational,
    out: &mut Collector,
) -> u64 {
    let mut pairs = 0;
    for s in 0..proj.len() {
        for t in s + 1..proj.len() {
            pairs += 1;
            let d = proj[s]
                .iter()
                .zip(&proj[t])
                .map(|(a, b)| (a - b).abs())
                .fold(Rational::zero(), Rational::max);
            if (&d - c).abs() > *tol {
                out.push(Failure::OutsideTolerance {
                    pair: [s, t],
                    found: d,
                });
            }
        }
    }
    pairs
}

fn check_membership(spec: &SubspaceSpec, points: &[Vec<Rational>], out: &mut Collector) {
    let a = spec.matrix();
    for (i, p) in points.iter().enumerate() {
        for r in 0..a.rows() {
            let mut acc = Rational::zero();
            for (c, x) in p.iter().enumerate() {
                let coef = a.get(r, c);
                if !coef.is_zero() && !x.is_zero() {
                    acc += coef * x;
                }
            }
            if !acc.is_zero() {
                out.push(Failure::NotInSubspace {
                    point: i,
                    row: r,
                    residual: acc,
                });
            }
        }
    }
}

fn check_evidence(
    cert: &EquilateralCertificate,
    evidence: &[super::certificate::PairEvidence],
    out: &mut Collector,
) {
    let recomputed = super::certificate::record_evidence(&cert.points, &cert.norm, usize::MAX)
        .unwrap_or_default();
    for (i, fresh) in recomputed.iter().enumerate() {
        match evidence.get(i) {
            Some(rec) if rec == fresh => {}
            _ => out.push(Failure::EvidenceMismatch { pair: fresh.pair }),
        }
    }
    if evidence.len() > recomputed.len() {
        out.push(Failure::EvidenceMismatch {
            pair: evidence[recomputed.len()].pair,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::certificate::{Construction, Source};
    use crate::rational::{ints, q};

    fn source() -> Source {
        Source {
            construction: Construction::CubeVertices,
            n: 0,
            k: 0,
            ell: None,
            formula: None,
            guaranteed: None,
            degenerate: None,
        }
    }

    fn cube(m: usize) -> Vec<Vec<Rational>> {
        (0..1usize << m)
            .map(|mask| {
                (0..m)
                    .map(|i| if mask >> i & 1 == 1 { q(1, 1) } else { q(-1, 1) })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn linf_distance_examples() {
        let x = ints(&[1, 2, 3]);
        assert_eq!(linf_distance(&x, &x).unwrap(), q(0, 1));
        assert_eq!(linf_distance(&ints(&[1, 1, 1, -3]), &ints(&[1, -1, -1, 1])).unwrap(), q(4, 1));
        let a = vec![q(-1, 1), q(0, 1), q(1, 2), q(1, 2)];
        let b = vec![q(0, 1), q(-1, 1), q(1, 2), q(1, 2)];
        assert_eq!(linf_distance(&a, &b).unwrap(), q(1, 1));
        assert!(linf_distance(&a, &x).is_err());
    }

    #[test]
    fn cube_vertices_verify() {
        for m in 1..=6 {
            let cert = EquilateralCertificate::new(source(), NormTag::Linf, q(2, 1), cube(m), vec![]);
            let report = verify_certificate(&cert, None);
            assert!(report.valid, "{:?}", report.failures);
            assert_eq!(report.points, 1 << m);
        }
    }

    #[test]
    fn trivial_sets_are_valid() {
        let empty = EquilateralCertificate::new(source(), NormTag::Linf, q(1, 1), vec![], vec![]);
        assert!(verify_certificate(&empty, None).valid);
        let single = EquilateralCertificate::new(source(), NormTag::Linf, q(1, 1), vec![ints(&[3, 4])], vec![]);
        assert!(verify_certificate(&single, None).valid);
    }

    #[test]
    fn tampered_coordinate_is_located() {
        let mut cert = EquilateralCertificate::new(source(), NormTag::Linf, q(2, 1), cube(3), vec![]);
        cert.evidence = None;
        cert.points[5][1] = &cert.points[5][1] * &q(1_000_001, 1_000_000);
        let report = verify_certificate(&cert, None);
        assert!(!report.valid);
        assert!(report.failures.iter().all(|f| f.involves(5)));
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, Failure::CoordinateExceeds { coord: 1, .. })));
    }

    #[test]
    fn evidence_is_checked() {
        let mut cert = EquilateralCertificate::new(source(), NormTag::Linf, q(2, 1), cube(2), vec![]);
        cert.evidence.as_mut().unwrap()[0].witness_coord = 1;
        let report = verify_certificate(&cert, None);
        assert_eq!(report.failures, vec![Failure::EvidenceMismatch { pair: [0, 1] }]);
    }

    #[test]
    fn polytopal_norm_distance() {
        // hexagon-ish norm in the plane
        let normals = vec![ints(&[1, 0]), vec![q(1, 2), q(1, 1)], vec![q(-1, 2), q(1, 1)]];
        let pts = vec![ints(&[0, 0]), ints(&[1, 0])];
        let cert = EquilateralCertificate::new(
            source(),
            NormTag::Polytopal { normals },
            q(1, 1),
            pts,
            vec![],
        );
        assert!(verify_certificate(&cert, None).valid);
    }
}
