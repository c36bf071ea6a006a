//! 1-equilateral sets from `{0, -sigma}` patterns on the free columns, split
//! by the orthant of the group values they induce.

use std::collections::BTreeMap;

use crate::certify::bounds::ceiled_u64;
use crate::certify::{Bound, Construction, EquilateralCertificate, NormTag, Source};
use crate::combin::{binomial_u128, subsets_up_to};
use crate::error::{Error, Result};
use crate::parallel::{try_map, ConstructOptions};
use crate::pivot::{orthant_checks, search_orthant_config, OrthantConfig};
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WVector2 {
    pub j: Vec<usize>,
    pub coords: Vec<Rational>,
    /// `y` with `B y = b_{J,sigma}`; group `g` carries `sigma^i y^g`.
    pub group_values: Vec<Rational>,
}

impl WVector2 {
    /// Orthant key: the signs of `y^1..y^{k-1}`, zero counted as positive.
    pub fn orthant(&self) -> Vec<bool> {
        let k = self.group_values.len();
        self.group_values[..k - 1]
            .iter()
            .map(|v| !v.is_negative())
            .collect()
    }
}

pub fn build_w2(spec: &SubspaceSpec, config: &OrthantConfig, j: &[usize]) -> Result<WVector2> {
    let n = spec.n();
    let k = spec.k();
    let free = config.free();
    if j.is_empty() || j.len() > config.ell {
        return Err(Error::Parameter(format!(
            "J must have between 1 and {} elements",
            config.ell
        )));
    }
    if let Some(&bad) = j.iter().find(|c| !free.contains(c)) {
        return Err(Error::Parameter(format!("column {bad} is not a free column")));
    }
    let sigma = &config.sigma;
    let mut coords = vec![Rational::zero(); n];
    for &c in j {
        coords[c] = -Rational::from_int(sigma.get(c) as i64);
    }
    let y = config
        .matrix
        .cramer_solve(&spec.signed_column_sum(j, sigma))?;
    let one = Rational::one();
    for (g, group) in config.groups.iter().enumerate() {
        if y[g].abs() > one {
            return Err(Error::InternalConsistency(format!(
                "|det B({g}, b_J,sigma)| > det B for J = {j:?}"
            )));
        }
        for &c in group {
            coords[c] = sigma.apply(c, &y[g]);
        }
    }
    if y[k - 1].is_negative() {
        return Err(Error::InternalConsistency(format!(
            "det B(k, b_J,sigma) < 0 for J = {j:?}; sign normalisation failed"
        )));
    }
    if !spec.contains(&coords)? {
        return Err(Error::InternalConsistency(format!("w({j:?}) is not in ker A")));
    }
    Ok(WVector2 {
        j: j.to_vec(),
        coords,
        group_values: y,
    })
}

pub fn construct_bound2(
    spec: &SubspaceSpec,
    ell: usize,
    opts: &ConstructOptions,
) -> Result<EquilateralCertificate> {
    let config = search_orthant_config(spec, ell, opts.exhaustive_cap)?;
    construct_bound2_with(spec, &config, opts)
}

pub fn construct_bound2_with(
    spec: &SubspaceSpec,
    config: &OrthantConfig,
    opts: &ConstructOptions,
) -> Result<EquilateralCertificate> {
    let (n, k, ell) = (spec.n(), spec.k(), config.ell);
    let free = config.free();
    let needed: u128 = (1..=ell)
        .map(|r| binomial_u128(free.len() as u64, r as u64))
        .fold(0u128, u128::saturating_add);
    if needed > opts.enumeration_budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: opts.enumeration_budget,
        });
    }
    let subsets = subsets_up_to(&free, ell);
    let vectors = try_map(&subsets, opts.workers, |j| build_w2(spec, config, j))?;

    let mut classes: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for (i, w) in vectors.iter().enumerate() {
        classes.entry(w.orthant()).or_default().push(i);
    }
    let mut best: Option<&Vec<usize>> = None;
    for members in classes.values() {
        if best.is_none_or(|b| members.len() > b.len()) {
            best = Some(members);
        }
    }
    let mut points: Vec<Vec<Rational>> = best
        .map(|m| m.iter().map(|&i| vectors[i].coords.clone()).collect())
        .unwrap_or_default();
    points.push(vec![Rational::zero(); n]);

    let formula = Bound::OrthantSplit.formula(n, k, ell).expect("ell checked by the search");
    let guaranteed = ceiled_u64(&formula.ceil());
    if (points.len() as u64) < guaranteed {
        return Err(Error::InternalConsistency(format!(
            "largest orthant class gives {} points, below the bound {guaranteed}",
            points.len()
        )));
    }
    Ok(EquilateralCertificate::new(
        Source {
            construction: Construction::OrthantSplit,
            n,
            k,
            ell: Some(ell),
            formula: Some(formula),
            guaranteed: Some(guaranteed),
            degenerate: None,
        },
        NormTag::Linf,
        Rational::one(),
        points,
        orthant_checks(spec, config)?,
    ))
}
