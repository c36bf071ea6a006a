//! Exactly verified equilateral sets in codimension-`k` subspaces of
//! `(R^n, |.|_inf)`, in origin-symmetric polytopes with few facets, and in
//! norms sandwiched close to `l_inf`.
//!
//! All arithmetic that ends up in a certificate is exact rational. Every
//! construction returns an [`EquilateralCertificate`] that
//! [`verify_certificate`] re-checks from scratch.

pub mod block_sum;
pub mod blocks;
pub mod certify;
pub mod combin;
pub mod error;
pub mod gen;
pub mod matrix;
pub mod norm;
pub mod orthant;
pub mod parallel;
pub mod perturb;
pub mod pivot;
pub mod polytope;
pub mod rational;
pub mod subspace;
pub mod window;

pub use block_sum::construct_bound3;
pub use certify::{bounds_table, verify_certificate, Bound, BoundsTable, EquilateralCertificate, VerificationReport};
pub use error::{Error, Result};
pub use matrix::Mat;
pub use norm::{NormKind, PerturbedNorm};
pub use orthant::construct_bound2;
pub use parallel::ConstructOptions;
pub use perturb::{fixed_point_equilateral, ConvergenceReport, FixedPointOptions, FixedPointResult};
pub use polytope::{petty_certificate, PettyResult, PolytopeSpec};
pub use rational::Rational;
pub use subspace::SubspaceSpec;
pub use window::construct_bound1;

/// Runs the construction for `bound` with parameter `ell` (ignored by the
/// sign-window bound).
pub fn construct(
    spec: &SubspaceSpec,
    bound: Bound,
    ell: usize,
    opts: &ConstructOptions,
) -> Result<EquilateralCertificate> {
    match bound {
        Bound::SignWindows => construct_bound1(spec, opts),
        Bound::OrthantSplit => construct_bound2(spec, ell, opts),
        Bound::BlockSums => construct_bound3(spec, ell, opts),
    }
}

/// Tries every bound and `ell` in order of guaranteed size and keeps the
/// largest verified set. Bound-1 runs that exceed the enumeration budget are
/// skipped.
pub fn construct_best(spec: &SubspaceSpec, opts: &ConstructOptions) -> Result<EquilateralCertificate> {
    let table = bounds_table(spec.n(), spec.k())?;
    let mut best: Option<EquilateralCertificate> = None;
    for row in table.ranked() {
        if best.as_ref().is_some_and(|b| {
            b.len() as u64 >= certify::bounds::ceiled_u64(&row.ceiled)
        }) {
            break;
        }
        match construct(spec, row.bound, row.ell.unwrap_or(0), opts) {
            Ok(c) => {
                if best.as_ref().is_none_or(|b| c.len() > b.len()) {
                    best = Some(c);
                }
            }
            Err(Error::BudgetExceeded { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| Error::Parameter("no construction fits the enumeration budget".into()))
}
