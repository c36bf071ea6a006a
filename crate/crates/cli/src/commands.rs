use std::fmt::Write as _;
use std::path::Path;

use linf_equilateral::certify::bounds::ceiled_u64;
use linf_equilateral::gen::{degenerate_spec, random_polytope, random_spec, weighted_norm};
use linf_equilateral::perturb::{check_sandwich, sandwich_samples, EpsMatrix, FixedPointSystem, SandwichReport};
use linf_equilateral::pivot::DEFAULT_EXHAUSTIVE_CAP;
use linf_equilateral::subspace::SubspaceFile;
use linf_equilateral::{
    bounds_table, construct as run_bound, construct_best, fixed_point_equilateral, petty_certificate,
    verify_certificate, Bound, ConstructOptions, ConvergenceReport, EquilateralCertificate, Error,
    FixedPointOptions, PerturbedNorm, PettyResult, PolytopeSpec, Rational, SubspaceSpec,
};
use serde::{Deserialize, Serialize};

use crate::io::{
    emit, parse, read, to_json, CmdError, CmdResult, NON_CONVERGENCE, SANDWICH_VIOLATION,
    VERIFICATION_FAILED,
};
use crate::{
    BoundArg, BoundsArgs, Budget, ConstructArgs, GenArgs, GenKind, PerturbArgs, PolytopeArgs,
    VerifyArgs,
};

fn options(b: &Budget) -> ConstructOptions {
    let mut o = ConstructOptions::default();
    if let Some(v) = b.budget {
        o.enumeration_budget = v;
    }
    if let Some(v) = b.exhaustive_cap {
        o.exhaustive_cap = v;
    }
    o.workers = b.workers;
    o
}

fn load_spec(path: &Path) -> CmdResult<SubspaceSpec> {
    let file: SubspaceFile = read(path)?;
    Ok(SubspaceSpec::from_file(file)?)
}

/// Writes `text`, then reads the destination back (or reparses `text` for
/// stdout) and hands it to `check`.
fn emit_checked<T, F>(text: &str, output: Option<&Path>, check: F) -> CmdResult
where
    T: for<'de> Deserialize<'de>,
    F: FnOnce(T) -> CmdResult,
{
    emit(text, output)?;
    let written = match output {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CmdError::new(VERIFICATION_FAILED, format!("cannot reread {}: {e}", p.display())))?,
        None => text.to_string(),
    };
    let back: T = parse(&written, "written output")
        .map_err(|e| CmdError::new(VERIFICATION_FAILED, e.message))?;
    check(back)
}

fn recheck(cert: &EquilateralCertificate, spec: Option<&SubspaceSpec>, what: &str) -> CmdResult {
    let report = verify_certificate(cert, spec);
    if !report.valid {
        return Err(CmdError::new(
            VERIFICATION_FAILED,
            format!("{what} failed re-verification: {:?}", report.failures.first()),
        ));
    }
    if let Some(g) = cert.source.guaranteed {
        if (cert.len() as u64) < g {
            return Err(CmdError::new(
                VERIFICATION_FAILED,
                format!("{what} has {} points, fewer than the promised {g}", cert.len()),
            ));
        }
    }
    Ok(())
}

fn parse_ell(text: &str) -> CmdResult<Option<usize>> {
    if text == "auto" {
        return Ok(None);
    }
    text.parse()
        .map(Some)
        .map_err(|_| CmdError::invalid(format!("--ell must be a positive integer or auto, got {text:?}")))
}

pub fn construct(a: ConstructArgs) -> CmdResult {
    let spec = load_spec(&a.input)?;
    let opts = options(&a.budget);
    let ell = parse_ell(&a.ell)?;
    let bound = match a.bound {
        BoundArg::One => Some(Bound::SignWindows),
        BoundArg::Two => Some(Bound::OrthantSplit),
        BoundArg::Three => Some(Bound::BlockSums),
        BoundArg::Auto => None,
    };
    let cert = match (bound, ell) {
        (None, None) => construct_best(&spec, &opts)?,
        (None, Some(_)) => return Err(CmdError::invalid("--ell needs --bound 1, 2 or 3")),
        (Some(b), ell) => {
            let ell = match ell {
                Some(l) => l,
                None => {
                    let table = bounds_table(spec.n(), spec.k())?;
                    table
                        .best_for(b)
                        .ok_or_else(|| CmdError::invalid(format!("bound {} is infeasible for this spec", b.number())))?
                        .ell
                        .unwrap_or(0)
                }
            };
            if b == Bound::SignWindows && ell > 0 && a.ell != "auto" {
                return Err(CmdError::invalid("bound 1 takes no --ell"));
            }
            run_bound(&spec, b, ell, &opts)?
        }
    };
    emit_checked(&to_json(&cert), a.output.as_deref(), |back: EquilateralCertificate| {
        recheck(&back, Some(&spec), "certificate")
    })
}

pub fn polytope(a: PolytopeArgs) -> CmdResult {
    let p: PolytopeSpec = read(&a.input)?;
    p.validate()?;
    let result = petty_certificate(&p, &options(&a.budget))?;
    emit_checked(&to_json(&result), a.output.as_deref(), |back: PettyResult| {
        recheck(&back.certificate, None, "polytope certificate")?;
        if let Some(section) = &back.section_certificate {
            let spec = back.section.subspace()?;
            recheck(section, spec.as_ref(), "section certificate")?;
        }
        if back.petty != (back.certificate.len() > back.d) {
            return Err(CmdError::new(VERIFICATION_FAILED, "petty flag disagrees with the set size"));
        }
        Ok(())
    })
}

#[derive(Serialize, Deserialize)]
struct PerturbOutput {
    sandwich: SandwichReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    convergence: Option<ConvergenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<EquilateralCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<EpsMatrix>,
}

pub fn perturb(a: PerturbArgs) -> CmdResult {
    let spec = load_spec(&a.input)?;
    let norm: PerturbedNorm = read(&a.norm)?;
    norm.validate(spec.n())?;
    if !(a.tol > 0.0 && a.tol.is_finite()) || a.max_iter == 0 {
        return Err(CmdError::invalid("--tol must be positive and --max-iter at least 1"));
    }
    let cap = a.exhaustive_cap.unwrap_or(DEFAULT_EXHAUSTIVE_CAP);
    let sys = FixedPointSystem::new(&spec, a.ell, cap)?;
    let sandwich = check_sandwich(&norm, &sandwich_samples(&spec, Some(&sys), &[]));
    let out = |convergence, certificate, eps| PerturbOutput {
        sandwich: sandwich.clone(),
        convergence,
        certificate,
        eps,
    };
    if !sandwich.ok() {
        emit(&to_json(&out(None, None, None)), a.output.as_deref())?;
        return Err(CmdError::new(
            SANDWICH_VIOLATION,
            format!(
                "|x|_inf / |x|_Y reaches {} on a sample of X, beyond 1 + c",
                sandwich.worst_upper.max(sandwich.worst_lower)
            ),
        ));
    }
    let opts = FixedPointOptions {
        tol: a.tol,
        max_iter: a.max_iter,
        exact_solve: true,
        exhaustive_cap: cap,
    };
    match fixed_point_equilateral(&spec, &norm, a.ell, &opts) {
        Ok(r) => emit_checked(
            &to_json(&out(Some(r.report), Some(r.certificate), r.eps)),
            a.output.as_deref(),
            |back: PerturbOutput| match back.certificate {
                Some(c) => recheck(&c, Some(&spec), "certificate"),
                None => Err(CmdError::new(VERIFICATION_FAILED, "certificate missing from output")),
            },
        ),
        Err(Error::NonConvergence(report)) => {
            let iterations = report.iterations;
            emit(&to_json(&out(Some(*report), None, None)), a.output.as_deref())?;
            Err(CmdError::new(
                NON_CONVERGENCE,
                format!("no fixed point within {iterations} iterations"),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn bounds(a: BoundsArgs) -> CmdResult {
    let table = bounds_table(a.n, a.k)?;
    if a.json {
        return emit(&to_json(&table), None);
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "n = {}, k = {}: dim X = {}, Petty target {}, ceiling 2^{} = {}",
        table.n,
        table.k,
        table.n - table.k,
        table.petty_target,
        table.n - table.k,
        table.ceiling
    );
    let _ = writeln!(s, "{:<6} {:>4} {:>24} {:>10}", "bound", "ell", "raw", "ceiled");
    for (i, row) in table.rows.iter().enumerate() {
        let ell = row.ell.map_or("-".to_string(), |l| l.to_string());
        let mark = if table.best.contains(&i) { " *" } else { "" };
        let _ = writeln!(s, "{:<6} {:>4} {:>24} {:>10}{mark}", row.bound.number(), ell, row.raw.to_string(), row.ceiled);
    }
    let w = table.winner();
    let _ = writeln!(
        s,
        "best: bound {}{} with {} points",
        w.bound.number(),
        w.ell.map_or(String::new(), |l| format!(", ell = {l}")),
        ceiled_u64(&w.ceiled)
    );
    emit(&s, None)
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    let cert: EquilateralCertificate = read(&a.certificate)?;
    let spec = a.spec.as_deref().map(load_spec).transpose()?;
    let report = verify_certificate(&cert, spec.as_ref());
    emit(&to_json(&report), None)?;
    if report.valid {
        Ok(())
    } else {
        Err(CmdError::new(
            VERIFICATION_FAILED,
            format!("{} failure(s); first: {:?}", report.failures.len(), report.failures.first()),
        ))
    }
}

pub fn gen(a: GenArgs) -> CmdResult {
    let text = match a.kind {
        GenKind::Spec | GenKind::Degenerate => {
            if a.k == 0 || a.k >= a.n {
                return Err(CmdError::invalid("need 1 <= k < n"));
            }
            let s = if a.kind == GenKind::Spec {
                random_spec(a.k, a.n, a.seed)
            } else {
                degenerate_spec(a.k, a.n, a.seed)
            };
            to_json(&s.to_file())
        }
        GenKind::Polytope => {
            if a.d == 0 || a.f < a.d {
                return Err(CmdError::invalid("need 1 <= d <= f"));
            }
            to_json(&random_polytope(a.d, a.f, a.seed))
        }
        GenKind::Norm => {
            let c: Rational = a.c.parse().map_err(|e: Error| CmdError::invalid(e))?;
            if c.is_negative() {
                return Err(CmdError::invalid("c must be >= 0"));
            }
            to_json(&weighted_norm(a.n, c, a.seed))
        }
    };
    emit(&text, a.output.as_deref())
}
