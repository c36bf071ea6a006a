//! Origin-symmetric polytopes as cube sections, and the pipeline that turns
//! a subspace construction into an equilateral set for the polytope norm.

use serde::{Deserialize, Serialize};

use crate::block_sum::construct_bound3;
use crate::certify::{
    bounds_table, verify_certificate, Bound, Construction, EquilateralCertificate, NormTag, Source,
};
use crate::error::{Error, Result};
use crate::matrix::{dot, Mat};
use crate::orthant::construct_bound2;
use crate::parallel::ConstructOptions;
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;
use crate::window::construct_bound1;

/// `P = {x in R^d : |u_i . x| <= 1 for all i}`.
///
/// JSON: `{ "d": int, "normals": [[rational, ...], ...] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub d: usize,
    pub normals: Vec<Vec<Rational>>,
}

impl PolytopeSpec {
    pub fn f(&self) -> usize {
        self.normals.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidPolytope("dimension must be positive".into()));
        }
        if let Some(i) = self.normals.iter().position(|u| u.len() != self.d) {
            return Err(Error::InvalidPolytope(format!(
                "normal {i} has length {}, expected {}",
                self.normals[i].len(),
                self.d
            )));
        }
        for (i, u) in self.normals.iter().enumerate() {
            if u.iter().all(Rational::is_zero) {
                return Err(Error::InvalidPolytope(format!("normal {i} is zero")));
            }
            for (j, v) in self.normals[..i].iter().enumerate() {
                let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
                if u == v || *u == neg {
                    return Err(Error::InvalidPolytope(format!(
                        "normals {j} and {i} describe the same facet pair"
                    )));
                }
            }
        }
        if self.f() < self.d {
            return Err(Error::InvalidPolytope(format!(
                "{} facet pairs cannot bound a {}-dimensional polytope",
                self.f(),
                self.d
            )));
        }
        Ok(())
    }

    /// `||x||_P = max_i |u_i . x|`.
    pub fn norm(&self, x: &[Rational]) -> Rational {
        self.normals
            .iter()
            .map(|u| dot(u, x).abs())
            .fold(Rational::zero(), Rational::max)
    }

    pub fn normal_matrix(&self) -> Result<Mat> {
        Mat::from_rows(self.normals.clone())
    }
}

/// `x -> U x` maps `(R^d, ||.||_P)` isometrically onto `(ker A, ||.||_inf)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeSection {
    pub u: Mat,
    pub a: Mat,
    pub back_map: Mat,
}

impl CubeSection {
    pub fn f(&self) -> usize {
        self.u.rows()
    }

    pub fn d(&self) -> usize {
        self.u.cols()
    }

    pub fn codim(&self) -> usize {
        self.a.rows()
    }

    /// `U x`.
    pub fn lift(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.u.mul_vec(x)
    }

    /// The preimage of a point of `ker A`.
    pub fn project(&self, p: &[Rational]) -> Result<Vec<Rational>> {
        let x = self.back_map.mul_vec(p)?;
        if self.u.mul_vec(&x)? != p {
            return Err(Error::InternalConsistency("point is not in the image of U".into()));
        }
        Ok(x)
    }

    /// `None` for the cube itself, where the section is the whole space.
    pub fn subspace(&self) -> Result<Option<SubspaceSpec>> {
        if self.codim() == 0 {
            return Ok(None);
        }
        SubspaceSpec::validate(self.a.clone()).map(Some)
    }
}

pub fn embed(p: &PolytopeSpec) -> Result<CubeSection> {
    p.validate()?;
    let u = p.normal_matrix()?;
    let witness = u.rank_witness();
    if witness.rank < p.d {
        return Err(Error::InvalidPolytope(format!(
            "normals span only {} of {} dimensions; the polytope is unbounded",
            witness.rank, p.d
        )));
    }
    let kernel = u.transpose().kernel_basis();
    let a = if kernel.is_empty() {
        Mat::zeros(0, p.f())
    } else {
        Mat::from_rows(kernel)?
    };
    if !a.mul(&u)?.is_zero() {
        return Err(Error::InternalConsistency("A U != 0".into()));
    }
    let all: Vec<usize> = (0..p.d).collect();
    let inv = u.select(&witness.rows, &all).inverse()?;
    let mut back_map = Mat::zeros(p.d, p.f());
    for (t, &r) in witness.rows.iter().enumerate() {
        for i in 0..p.d {
            back_map.set(i, r, inv.get(i, t).clone());
        }
    }
    if back_map.mul(&u)? != Mat::identity(p.d) {
        return Err(Error::InternalConsistency("back map is not a left inverse".into()));
    }
    Ok(CubeSection { u, a, back_map })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub bound: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    pub guaranteed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PettyResult {
    pub d: usize,
    pub f: usize,
    /// Whether the set has at least `d + 1` points.
    pub petty: bool,
    /// The set in `R^d` under `||.||_P`.
    pub certificate: EquilateralCertificate,
    /// The same set in cube-section coordinates, absent for the cube itself.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section_certificate: Option<EquilateralCertificate>,
    pub section: CubeSection,
    pub attempts: Vec<Attempt>,
}

fn run(spec: &SubspaceSpec, bound: Bound, ell: Option<usize>, opts: &ConstructOptions) -> Result<EquilateralCertificate> {
    match bound {
        Bound::SignWindows => construct_bound1(spec, opts),
        Bound::OrthantSplit => construct_bound2(spec, ell.unwrap_or(1), opts),
        Bound::BlockSums => construct_bound3(spec, ell.unwrap_or(1), opts),
    }
}

pub fn petty_certificate(p: &PolytopeSpec, opts: &ConstructOptions) -> Result<PettyResult> {
    let section = embed(p)?;
    let (d, f) = (p.d, p.f());
    let normals_tag = NormTag::Polytopal {
        normals: p.normals.clone(),
    };

    let Some(spec) = section.subspace()? else {
        let cert = cube_vertices(p, &section, opts)?;
        return finish(p, section, cert, None, Vec::new());
    };

    let table = bounds_table(f, spec.k())?;
    let mut attempts = Vec::new();
    let mut best: Option<EquilateralCertificate> = None;
    for (rank, row) in table.ranked().into_iter().enumerate() {
        if rank > 0 && best.as_ref().is_some_and(|b| b.len() > d) {
            break;
        }
        let guaranteed = crate::certify::bounds::ceiled_u64(&row.ceiled);
        let result = run(&spec, row.bound, row.ell, opts);
        attempts.push(Attempt {
            bound: row.bound,
            ell: row.ell,
            guaranteed,
            size: result.as_ref().ok().map(EquilateralCertificate::len),
            error: result.as_ref().err().map(ToString::to_string),
        });
        match result {
            Ok(cert) => {
                if best.as_ref().is_none_or(|b| cert.len() > b.len()) {
                    best = Some(cert);
                }
            }
            Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let section_cert = best.ok_or_else(|| {
        Error::InternalConsistency("no construction produced a certificate".into())
    })?;
    let points = section_cert
        .points
        .iter()
        .map(|q| section.project(q))
        .collect::<Result<Vec<_>>>()?;
    let cert = EquilateralCertificate::new(
        section_cert.source.clone(),
        normals_tag,
        section_cert.distance.clone(),
        points,
        section_cert.stability_checks.clone(),
    );
    finish(p, section, cert, Some((spec, section_cert)), attempts)
}

fn finish(
    p: &PolytopeSpec,
    section: CubeSection,
    cert: EquilateralCertificate,
    section_cert: Option<(SubspaceSpec, EquilateralCertificate)>,
    attempts: Vec<Attempt>,
) -> Result<PettyResult> {
    let report = verify_certificate(&cert, None);
    if !report.valid {
        return Err(Error::InternalConsistency(format!(
            "set fails under the polytope norm: {:?}",
            report.failures.first()
        )));
    }
    if let Some((spec, sc)) = &section_cert {
        let report = verify_certificate(sc, Some(spec));
        if !report.valid {
            return Err(Error::InternalConsistency(format!(
                "section set fails: {:?}",
                report.failures.first()
            )));
        }
    }
    Ok(PettyResult {
        d: p.d,
        f: p.f(),
        petty: cert.len() > p.d,
        certificate: cert,
        section_certificate: section_cert.map(|(_, c)| c),
        section,
        attempts,
    })
}

/// `U^{-1} s` for every sign vector `s`: a 2-equilateral set of size `2^d`.
fn cube_vertices(p: &PolytopeSpec, section: &CubeSection, opts: &ConstructOptions) -> Result<EquilateralCertificate> {
    let d = p.d;
    let needed = if d < 127 { 1u128 << d } else { u128::MAX };
    if needed > opts.enumeration_budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: opts.enumeration_budget,
        });
    }
    let inv = section.u.inverse()?;
    let points = (0..needed as u64)
        .map(|mask| {
            let s: Vec<Rational> = (0..d)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Rational::one()
                    } else {
                        -Rational::one()
                    }
                })
                .collect();
            inv.mul_vec(&s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilateralCertificate::new(
        Source {
            construction: Construction::CubeVertices,
            n: d,
            k: 0,
            ell: None,
            formula: None,
            guaranteed: Some(needed as u64),
            degenerate: None,
        },
        NormTag::Polytopal {
            normals: p.normals.clone(),
        },
        Rational::from_int(2),
        points,
        Vec::new(),
    ))
}

/// `f <= 4d/3 - (1 + sqrt(8d + 9))/6`, decided exactly.
pub fn within_facet_budget(d: usize, f: usize) -> bool {
    // 6f <= 8d - 1 - sqrt(8d+9)  <=>  sqrt(8d+9) <= 8d - 1 - 6f
    let rhs = 8 * d as i64 - 1 - 6 * f as i64;
    rhs >= 0 && 8 * d as i64 + 9 <= rhs * rhs
}
