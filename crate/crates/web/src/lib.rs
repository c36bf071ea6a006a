//! wasm-bindgen wrappers for the static page in `www/`. Every export takes and
//! returns JSON text; the plain `*_json` functions are the same operations for
//! native callers and tests.

use linf_equilateral::gen::{random_spec, weighted_norm};
use linf_equilateral::subspace::SubspaceFile;
use linf_equilateral::{
    bounds_table, construct, construct_best, fixed_point_equilateral, verify_certificate, Bound,
    ConstructOptions, FixedPointOptions, PerturbedNorm, Rational, SubspaceSpec,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Enumeration budget for the page; larger instances belong on the command line.
const PAGE_BUDGET: u128 = 1 << 16;

fn options() -> ConstructOptions {
    ConstructOptions {
        workers: Some(1),
        enumeration_budget: PAGE_BUDGET,
        ..ConstructOptions::default()
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn bounds_json(n: usize, k: usize) -> Result<String, String> {
    let t = bounds_table(n, k).map_err(err)?;
    serde_json::to_string(&t).map_err(err)
}

#[derive(Serialize)]
struct Constructed {
    spec: SubspaceFile,
    certificate: linf_equilateral::EquilateralCertificate,
    report: linf_equilateral::VerificationReport,
}

/// `spec` is a subspace file, or empty for a random `k x n` one from `seed`.
/// `bound` is `"1"`, `"2"`, `"3"` or `"auto"`; `ell = 0` picks the best.
pub fn construct_json(spec: &str, k: usize, n: usize, seed: u64, bound: &str, ell: usize) -> Result<String, String> {
    let spec = if spec.trim().is_empty() {
        if k == 0 || k >= n || n > 24 {
            return Err("need 1 <= k < n <= 24".into());
        }
        random_spec(k, n, seed)
    } else {
        let file: SubspaceFile = serde_json::from_str(spec).map_err(err)?;
        SubspaceSpec::from_file(file).map_err(err)?
    };
    let cert = match bound {
        "auto" => construct_best(&spec, &options()).map_err(err)?,
        b => {
            let bound = b
                .parse::<u8>()
                .ok()
                .and_then(Bound::from_number)
                .ok_or_else(|| format!("unknown bound {b:?}"))?;
            let ell = if ell == 0 {
                let table = bounds_table(spec.n(), spec.k()).map_err(err)?;
                table
                    .best_for(bound)
                    .ok_or("bound infeasible for this spec")?
                    .ell
                    .unwrap_or(0)
            } else {
                ell
            };
            construct(&spec, bound, ell, &options()).map_err(err)?
        }
    };
    let report = verify_certificate(&cert, Some(&spec));
    serde_json::to_string(&Constructed {
        spec: spec.to_file(),
        certificate: cert,
        report,
    })
    .map_err(err)
}

#[derive(Serialize)]
struct Trajectory {
    n: usize,
    ell: usize,
    norm: PerturbedNorm,
    residuals: Vec<f64>,
    iterations: usize,
    exact: bool,
    final_eps: Vec<f64>,
    points: Vec<Vec<Rational>>,
}

/// Fixed-point run on a random hyperplane of `R^n` with a random weighted
/// norm; `scaled` uses `(1+c)^{-1} l_inf` instead.
pub fn trajectory_json(n: usize, ell: usize, c: &str, seed: u64, scaled: bool) -> Result<String, String> {
    if !(4..=16).contains(&n) {
        return Err("n must lie in 4..=16".into());
    }
    let c: Rational = c.parse().map_err(err)?;
    let spec = random_spec(1, n, seed);
    let norm = if scaled {
        PerturbedNorm::scaled_linf(n, c)
    } else {
        weighted_norm(n, c, seed.wrapping_add(1))
    };
    let r = fixed_point_equilateral(&spec, &norm, ell, &FixedPointOptions::default()).map_err(err)?;
    serde_json::to_string(&Trajectory {
        n,
        ell,
        norm,
        residuals: r.report.residuals,
        iterations: r.report.iterations,
        exact: r.report.exact,
        final_eps: r.report.final_eps,
        points: r.certificate.points,
    })
    .map_err(err)
}

#[wasm_bindgen]
pub fn bounds(n: usize, k: usize) -> Result<String, JsError> {
    bounds_json(n, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = constructSet)]
pub fn construct_set(spec: &str, k: usize, n: usize, seed: u32, bound: &str, ell: usize) -> Result<String, JsError> {
    construct_json(spec, k, n, seed as u64, bound, ell).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fixedPoint)]
pub fn fixed_point(n: usize, ell: usize, c: &str, seed: u32, scaled: bool) -> Result<String, JsError> {
    trajectory_json(n, ell, c, seed as u64, scaled).map_err(|e| JsError::new(&e))
}
