//! 1-equilateral sets `{y(J)} ∪ {0}` built as sums of half vectors, each
//! solved on its own pivot block.

use crate::blocks::{block_pivot, BlockPivot};
use crate::certify::bounds::ceiled_u64;
use crate::certify::{Bound, Construction, EquilateralCertificate, NormTag, PartRecord, Source};
use crate::combin::{binomial_u128, subsets_up_to};
use crate::error::{Error, Result};
use crate::parallel::{try_map, ConstructOptions};
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YVector {
    pub j: Vec<usize>,
    pub coords: Vec<Rational>,
    /// `(w(J, i), z(J, i))` for each rank `i`.
    pub parts: Vec<(Vec<Rational>, Vec<Rational>)>,
}

pub fn check_block_ell(spec: &SubspaceSpec, ell: usize) -> Result<()> {
    if ell == 0 || ell * (2 * spec.k() + 1) > spec.n() {
        return Err(Error::Parameter(format!(
            "ell = {ell} must satisfy 1 <= ell <= n/(2k+1) = {}/{}",
            spec.n(),
            2 * spec.k() + 1
        )));
    }
    Ok(())
}

/// `-1/2 e_col` plus the tail on block `block` that puts it in `ker A`.
fn half_vector(spec: &SubspaceSpec, pivot: &BlockPivot, block: usize, col: usize) -> Result<Vec<Rational>> {
    let half = Rational::new(1, 2);
    let b = &pivot.blocks[block];
    let rhs: Vec<Rational> = spec.column(col).iter().map(|v| v * &half).collect();
    let tail = b.solve(&rhs)?;
    let mut v = vec![Rational::zero(); spec.n()];
    v[col] = -half.clone();
    for (&c, x) in b.cols.iter().zip(tail) {
        if x.abs() > half {
            return Err(Error::InternalConsistency(format!(
                "block {}: tail entry {x} at column {c} exceeds 1/2",
                block + 1
            )));
        }
        v[c] = x;
    }
    if !spec.contains(&v)? {
        return Err(Error::InternalConsistency(format!(
            "block {}: half vector for column {col} is not in ker A",
            block + 1
        )));
    }
    Ok(v)
}

/// `(w(J, i), z(J, i))` for the `i`-th smallest element of `J` (0-based):
/// `z` is solved on block `2i + 1`, `w` on block `2i + 2`.
pub fn build_parts(
    spec: &SubspaceSpec,
    pivot: &BlockPivot,
    j: &[usize],
    i: usize,
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let col = *j.get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        len: j.len(),
    })?;
    if 2 * i + 1 >= pivot.blocks.len() {
        return Err(Error::Parameter(format!("|J| = {} exceeds the number of block pairs", j.len())));
    }
    let z = half_vector(spec, pivot, 2 * i, col)?;
    let w = half_vector(spec, pivot, 2 * i + 1, col)?;
    Ok((w, z))
}

pub fn build_y(spec: &SubspaceSpec, pivot: &BlockPivot, j: &[usize]) -> Result<YVector> {
    let n = spec.n();
    let mut coords = vec![Rational::zero(); n];
    let mut parts = Vec::with_capacity(j.len());
    for i in 0..j.len() {
        let (w, z) = build_parts(spec, pivot, j, i)?;
        for ((c, a), b) in coords.iter_mut().zip(&w).zip(&z) {
            *c += a + b;
        }
        parts.push((w, z));
    }
    let half = Rational::new(1, 2);
    for (c, v) in coords.iter().enumerate() {
        let ok = if pivot.first_part.contains(&c) {
            if j.contains(&c) {
                *v == -Rational::one()
            } else {
                v.is_zero()
            }
        } else {
            v.abs() <= half
        };
        if !ok {
            return Err(Error::InternalConsistency(format!(
                "y({j:?}) has coordinate {c} = {v}"
            )));
        }
    }
    Ok(YVector {
        j: j.to_vec(),
        coords,
        parts,
    })
}

pub fn construct_bound3(
    spec: &SubspaceSpec,
    ell: usize,
    opts: &ConstructOptions,
) -> Result<EquilateralCertificate> {
    check_block_ell(spec, ell)?;
    let pivot = block_pivot(spec, 2 * ell, opts.exhaustive_cap)?;
    construct_bound3_with(spec, &pivot, ell, opts)
}

pub fn construct_bound3_with(
    spec: &SubspaceSpec,
    pivot: &BlockPivot,
    ell: usize,
    opts: &ConstructOptions,
) -> Result<EquilateralCertificate> {
    check_block_ell(spec, ell)?;
    let (n, k) = (spec.n(), spec.k());
    let n_first = pivot.first_part.len();
    let needed: u128 = (1..=ell)
        .map(|r| binomial_u128(n_first as u64, r as u64))
        .fold(0u128, u128::saturating_add);
    if needed > opts.enumeration_budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: opts.enumeration_budget,
        });
    }
    let subsets = subsets_up_to(&pivot.first_part, ell);
    let ys = try_map(&subsets, opts.workers, |j| build_y(spec, pivot, j))?;

    let mut points = Vec::with_capacity(ys.len() + 1);
    let mut parts = Vec::new();
    for (p, y) in ys.into_iter().enumerate() {
        for (rank, (w, z)) in y.parts.into_iter().enumerate() {
            parts.push(PartRecord {
                point: p,
                rank,
                w,
                z,
            });
        }
        points.push(y.coords);
    }
    points.push(vec![Rational::zero(); n]);

    let formula = Bound::BlockSums.formula(n, k, ell).expect("ell checked");
    let guaranteed = ceiled_u64(&formula.ceil());
    if points.len() as u64 != guaranteed {
        return Err(Error::InternalConsistency(format!(
            "{} points, expected exactly {guaranteed}",
            points.len()
        )));
    }
    let mut cert = EquilateralCertificate::new(
        Source {
            construction: Construction::BlockSums,
            n,
            k,
            ell: Some(ell),
            formula: Some(formula),
            guaranteed: Some(guaranteed),
            degenerate: Some(pivot.degenerate),
        },
        NormTag::Linf,
        Rational::one(),
        points,
        pivot.checks(spec)?,
    );
    cert.parts = parts;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::verify_certificate;
    use crate::rational::{ints, q};

    fn hyperplane() -> SubspaceSpec {
        SubspaceSpec::from_rows(vec![ints(&[1, 1, 1, 1])]).unwrap()
    }

    #[test]
    fn hyperplane_parts_and_set() {
        let s = hyperplane();
        let p = block_pivot(&s, 2, 1000).unwrap();
        let h = q(1, 2);
        let (w, z) = build_parts(&s, &p, &[0], 0).unwrap();
        assert_eq!(w, vec![-h.clone(), q(0, 1), q(0, 1), h.clone()]);
        assert_eq!(z, vec![-h.clone(), q(0, 1), h.clone(), q(0, 1)]);
        let cert = construct_bound3(&s, 1, &ConstructOptions::default()).unwrap();
        assert_eq!(
            cert.points,
            vec![
                vec![q(-1, 1), q(0, 1), h.clone(), h.clone()],
                vec![q(0, 1), q(-1, 1), h.clone(), h.clone()],
                vec![q(0, 1); 4],
            ]
        );
        assert_eq!(cert.parts.len(), 2);
        assert!(verify_certificate(&cert, Some(&s)).valid);
    }

    #[test]
    fn degenerate_single_column() {
        let s = SubspaceSpec::from_rows(vec![ints(&[0, 0, 0, 2, 0])]).unwrap();
        let cert = construct_bound3(&s, 1, &ConstructOptions::default()).unwrap();
        assert_eq!(cert.source.degenerate, Some(true));
        assert_eq!(cert.len(), 4);
        assert!(verify_certificate(&cert, Some(&s)).valid);
    }

    #[test]
    fn ell_range() {
        let s = hyperplane();
        assert!(construct_bound3(&s, 2, &ConstructOptions::default()).is_err());
    }
}
