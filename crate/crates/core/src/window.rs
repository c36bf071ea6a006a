//! 2-equilateral sets from sign vectors on the free coordinates, split into
//! windows by the values they force on the pivot coordinates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::certify::bounds::ceiled_u64;
use crate::certify::{Bound, Construction, EquilateralCertificate, NormTag, Source};
use crate::error::{Error, Result};
use crate::parallel::{try_map, ConstructOptions};
use crate::pivot::{exchange_checks, max_det_columns, ColumnSelection};
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;

/// `w(J)`: `+1` on `J`, `-1` on the other free columns, and the unique pivot
/// values putting the vector in `ker A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WVector1 {
    pub j: Vec<usize>,
    pub coords: Vec<Rational>,
}

fn free_columns(spec: &SubspaceSpec, pivot: &ColumnSelection) -> Vec<usize> {
    (0..spec.n()).filter(|c| !pivot.columns.contains(c)).collect()
}

pub fn build_w1(spec: &SubspaceSpec, pivot: &ColumnSelection, j: &[usize]) -> Result<WVector1> {
    let (n, k) = (spec.n(), spec.k());
    let free = free_columns(spec, pivot);
    if let Some(&bad) = j.iter().find(|c| !free.contains(c)) {
        return Err(Error::Parameter(format!("column {bad} is not a free column")));
    }
    let mut coords = vec![Rational::zero(); n];
    let mut rhs = vec![Rational::zero(); k];
    for &c in &free {
        let inside = j.contains(&c);
        coords[c] = if inside { Rational::one() } else { -Rational::one() };
        for (r, slot) in rhs.iter_mut().enumerate() {
            let v = spec.matrix().get(r, c);
            if inside {
                *slot -= v;
            } else {
                *slot += v;
            }
        }
    }
    let tail = pivot.matrix.cramer_solve(&rhs)?;
    let limit = Rational::from_int((n - k) as i64);
    for (t, x) in pivot.columns.iter().zip(tail) {
        if x.abs() > limit {
            return Err(Error::InternalConsistency(format!(
                "pivot coordinate {t} of w({j:?}) is {x}, beyond n - k = {limit}; pivot is not exchange stable"
            )));
        }
        coords[*t] = x;
    }
    if !spec.contains(&coords)? {
        return Err(Error::InternalConsistency(format!("w({j:?}) is not in ker A")));
    }
    Ok(WVector1 {
        j: j.to_vec(),
        coords,
    })
}

/// Window index of a pivot value `v` in `[-d, d]`: windows are `[s, s + 2]`
/// for `s = -d, -d + 2, ..., d - 2`, and a value on a shared edge goes to the
/// lower window.
pub fn window_index(v: &Rational, d: usize) -> usize {
    let shifted = (v + Rational::from_int(d as i64)) / Rational::from_int(2);
    let idx = shifted.ceil() - BigInt::from(1);
    idx.to_i64().unwrap_or(0).clamp(0, d.saturating_sub(1) as i64) as usize
}

pub fn construct_bound1(spec: &SubspaceSpec, opts: &ConstructOptions) -> Result<EquilateralCertificate> {
    let pivot = max_det_columns(spec, opts.exhaustive_cap)?;
    construct_bound1_with(spec, &pivot, opts)
}

/// Bound (1) for a given exchange-stable pivot.
pub fn construct_bound1_with(
    spec: &SubspaceSpec,
    pivot: &ColumnSelection,
    opts: &ConstructOptions,
) -> Result<EquilateralCertificate> {
    let (n, k) = (spec.n(), spec.k());
    let d = n - k;
    let needed = if d < 127 { 1u128 << d } else { u128::MAX };
    if needed > opts.enumeration_budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: opts.enumeration_budget,
        });
    }
    let free = free_columns(spec, pivot);
    // tail(J) = base - 2 sum_{c in J} g_c with B g_c = b_c
    let mut all = vec![Rational::zero(); k];
    let mut g: Vec<Vec<Rational>> = Vec::with_capacity(d);
    for &c in &free {
        let col = spec.column(c);
        for (slot, v) in all.iter_mut().zip(&col) {
            *slot += v;
        }
        g.push(
            pivot
                .matrix
                .cramer_solve(&col)?
                .into_iter()
                .map(|x| &x + &x)
                .collect(),
        );
    }
    let base = pivot.matrix.cramer_solve(&all)?;

    let masks: Vec<u64> = (0..needed as u64).collect();
    let chunks: Vec<&[u64]> = masks.chunks(4096).collect();
    let keys: Vec<Vec<Vec<usize>>> = try_map(&chunks, opts.workers, |chunk| {
        Ok(chunk
            .iter()
            .map(|&mask| {
                let mut tail = base.clone();
                for (bit, gc) in g.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        for (t, v) in tail.iter_mut().zip(gc) {
                            *t -= v;
                        }
                    }
                }
                tail.iter().map(|v| window_index(v, d)).collect()
            })
            .collect())
    })?;

    let mut classes: BTreeMap<Vec<usize>, Vec<u64>> = BTreeMap::new();
    for (mask, key) in masks.iter().zip(keys.into_iter().flatten()) {
        classes.entry(key).or_default().push(*mask);
    }
    let total: usize = classes.values().map(Vec::len).sum();
    if total as u128 != needed {
        return Err(Error::InternalConsistency("window classes do not partition W".into()));
    }
    let mut best: Option<(&Vec<usize>, &Vec<u64>)> = None;
    for (key, members) in &classes {
        if best.is_none_or(|(_, b)| members.len() > b.len()) {
            best = Some((key, members));
        }
    }
    let (best_key, best) = best.expect("at least one class");

    let points = try_map(best, opts.workers, |&mask| {
        let j: Vec<usize> = free
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let w = build_w1(spec, pivot, &j)?;
        // the enumeration shortcut and the literal Cramer route must agree
        let key: Vec<usize> = pivot
            .columns
            .iter()
            .map(|&t| window_index(&w.coords[t], d))
            .collect();
        if key != *best_key {
            return Err(Error::InternalConsistency(format!("w({j:?}) changed window")));
        }
        Ok(w.coords)
    })?;

    let formula = Bound::SignWindows.formula(n, k, 0).expect("valid codimension");
    let guaranteed = ceiled_u64(&formula.ceil());
    if (points.len() as u64) < guaranteed {
        return Err(Error::InternalConsistency(format!(
            "largest window class has {} points, below the bound {guaranteed}",
            points.len()
        )));
    }
    let all_cols: Vec<usize> = (0..n).collect();
    let checks = exchange_checks(spec.matrix(), pivot, &all_cols, "pivot")?;
    Ok(EquilateralCertificate::new(
        Source {
            construction: Construction::SignWindows,
            n,
            k,
            ell: None,
            formula: Some(formula),
            guaranteed: Some(guaranteed),
            degenerate: None,
        },
        NormTag::Linf,
        Rational::from_int(2),
        points,
        checks,
    ))
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
    fn w1_examples() {
        let s = hyperplane();
        let pivot = ColumnSelection::for_spec(&s, vec![3]).unwrap();
        assert_eq!(build_w1(&s, &pivot, &[0, 1, 2]).unwrap().coords, ints(&[1, 1, 1, -3]));
        assert_eq!(build_w1(&s, &pivot, &[0]).unwrap().coords, ints(&[1, -1, -1, 1]));
        let w = build_w1(&s, &pivot, &[1]).unwrap();
        let recovered: Vec<usize> = (0..3).filter(|&i| w.coords[i] == q(1, 1)).collect();
        assert_eq!(recovered, w.j);
        assert!(build_w1(&s, &pivot, &[3]).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(window_index(&q(-3, 1), 3), 0);
        assert_eq!(window_index(&q(-1, 1), 3), 0);
        assert_eq!(window_index(&q(-1, 2), 3), 1);
        assert_eq!(window_index(&q(1, 1), 3), 1);
        assert_eq!(window_index(&q(3, 1), 3), 2);
    }

    #[test]
    fn hyperplane_four() {
        let s = hyperplane();
        let cert = construct_bound1(&s, &ConstructOptions::default()).unwrap();
        assert!(cert.len() >= 3);
        assert_eq!(cert.source.guaranteed, Some(3));
        assert!(verify_certificate(&cert, Some(&s)).valid);
    }

    #[test]
    fn one_free_coordinate() {
        let s = SubspaceSpec::from_rows(vec![ints(&[1, 2, 0]), ints(&[0, 1, 1])]).unwrap();
        let cert = construct_bound1(&s, &ConstructOptions::default()).unwrap();
        assert_eq!(cert.len(), 2);
        assert!(verify_certificate(&cert, Some(&s)).valid);
    }

    #[test]
    fn budget() {
        let s = hyperplane();
        let opts = ConstructOptions {
            enumeration_budget: 4,
            ..ConstructOptions::default()
        };
        assert!(matches!(
            construct_bound1(&s, &opts),
            Err(Error::BudgetExceeded { needed: 8, budget: 4 })
        ));
    }
}
