//! Equilateral sets in a norm `Y` close to `l_inf` on `X`, found as a fixed
//! point of the distance-equalising map `phi`.
//!
//! Points `p_j(eps)` for `j < N` are affine in `eps`: the first part carries
//! `-1` at `j` and `eps_j^r` at `r < j`, the tail is solved on `2 + ell`
//! pivot blocks. At a fixed point of
//! `phi_j^i(eps) = 1 + eps_j^i - |p_i(eps) - p_j(eps)|_Y` every pairwise
//! `Y`-distance is `1`.

use serde::{Deserialize, Serialize};

use crate::blocks::{block_pivot, first_part_size, BlockPivot};
use crate::certify::{Construction, EquilateralCertificate, NormTag, Source};
use crate::error::{Error, Result};
use crate::matrix::{dot, Mat};
use crate::norm::PerturbedNorm;
use crate::pivot::DEFAULT_EXHAUSTIVE_CAP;
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;

/// `eps_j^i` for `0 <= i < j < size`, stored with `j` major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsMatrix {
    pub size: usize,
    pub values: Vec<Rational>,
}

pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// All pairs `(i, j)`, `i < j < size`, in storage order.
pub fn pairs(size: usize) -> Vec<(usize, usize)> {
    (1..size).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

impl EpsMatrix {
    pub fn zeros(size: usize) -> Self {
        EpsMatrix {
            size,
            values: vec![Rational::zero(); size * size.saturating_sub(1) / 2],
        }
    }

    pub fn constant(size: usize, value: Rational) -> Self {
        EpsMatrix {
            size,
            values: vec![value; size * size.saturating_sub(1) / 2],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[pair_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.values[pair_index(i, j)] = v;
    }

    pub fn within(&self, c: &Rational) -> bool {
        self.values.iter().all(|v| !v.is_negative() && v <= c)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Rational::to_f64).collect()
    }

    pub fn from_f64(size: usize, values: &[f64]) -> Result<Self> {
        let values = values
            .iter()
            .map(|&v| Rational::from_f64(v).ok_or_else(|| Error::Parameter(format!("non-finite eps {v}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(EpsMatrix { size, values })
    }
}

/// `c_max = ell / (2 (N - 1))`.
pub fn max_sandwich_constant(n_points: usize, ell: usize) -> Rational {
    Rational::new(ell as i64, 2 * (n_points as i64 - 1))
}

/// Pivot blocks and the affine description of `p_j(eps)`.
#[derive(Clone, Debug)]
pub struct FixedPointSystem {
    spec: SubspaceSpec,
    pub pivot: BlockPivot,
    pub ell: usize,
    /// `p_j(0)`.
    base: Vec<Vec<Rational>>,
    /// `g_r`: the change of `p_j` per unit of `eps_j^r`.
    g: Vec<Vec<Rational>>,
    base_f: Vec<Vec<f64>>,
    g_f: Vec<Vec<f64>>,
}

impl FixedPointSystem {
    pub fn new(spec: &SubspaceSpec, ell: usize, cap: u64) -> Result<Self> {
        let (n, k) = (spec.n(), spec.k());
        if ell == 0 || ell * k + 2 * k > n {
            return Err(Error::Parameter(format!(
                "ell = {ell} must satisfy 1 <= ell <= (n - 2k)/k = {}/{k}",
                n.saturating_sub(2 * k)
            )));
        }
        let blocks = 2 + ell;
        let n_points = first_part_size(spec, blocks)?;
        if n_points < 2 {
            return Err(Error::Parameter(format!(
                "N = n - k(2 + ell) = {n_points} leaves fewer than two points"
            )));
        }
        let pivot = block_pivot(spec, blocks, cap)?;
        let half = Rational::new(1, 2);
        let inv_ell = Rational::new(1, ell as i64);
        let mut base = Vec::with_capacity(n_points);
        let mut g = Vec::with_capacity(n_points);
        for j in 0..n_points {
            let col = pivot.first_part[j];
            let b = spec.column(col);
            let mut p = vec![Rational::zero(); n];
            p[col] = -Rational::one();
            let rhs: Vec<Rational> = b.iter().map(|v| v * &half).collect();
            for block in &pivot.blocks[..2] {
                add_tail(&mut p, &block.cols, block.solve(&rhs)?);
            }
            base.push(p);

            let mut gr = vec![Rational::zero(); n];
            gr[col] = Rational::one();
            let rhs: Vec<Rational> = b.iter().map(|v| -(v * &inv_ell)).collect();
            for block in &pivot.blocks[2..] {
                add_tail(&mut gr, &block.cols, block.solve(&rhs)?);
            }
            g.push(gr);
        }
        let to_f = |vs: &Vec<Vec<Rational>>| -> Vec<Vec<f64>> {
            vs.iter().map(|v| v.iter().map(Rational::to_f64).collect()).collect()
        };
        Ok(FixedPointSystem {
            spec: spec.clone(),
            base_f: to_f(&base),
            g_f: to_f(&g),
            pivot,
            ell,
            base,
            g,
        })
    }

    /// `N`.
    pub fn size(&self) -> usize {
        self.base.len()
    }

    pub fn spec(&self) -> &SubspaceSpec {
        &self.spec
    }

    pub fn max_c(&self) -> Rational {
        max_sandwich_constant(self.size(), self.ell)
    }

    /// `p_j(eps)` from the affine form.
    pub fn point(&self, eps: &EpsMatrix, j: usize) -> Vec<Rational> {
        let mut p = self.base[j].clone();
        for r in 0..j {
            let e = eps.get(r, j);
            if e.is_zero() {
                continue;
            }
            for (slot, gv) in p.iter_mut().zip(&self.g[r]) {
                if !gv.is_zero() {
                    *slot += e * gv;
                }
            }
        }
        p
    }

    pub fn points(&self, eps: &EpsMatrix) -> Vec<Vec<Rational>> {
        (0..self.size()).map(|j| self.point(eps, j)).collect()
    }

    pub fn point_f64(&self, eps: &[f64], j: usize) -> Vec<f64> {
        let mut p = self.base_f[j].clone();
        for r in 0..j {
            let e = eps[pair_index(r, j)];
            if e != 0.0 {
                for (slot, gv) in p.iter_mut().zip(&self.g_f[r]) {
                    *slot += e * gv;
                }
            }
        }
        p
    }

    /// `p_j(eps)` summed part by part, each part solved by Cramer's rule on
    /// its block, with every coordinate condition checked.
    pub fn build_p(&self, eps: &EpsMatrix, j: usize) -> Result<Vec<Rational>> {
        let spec = &self.spec;
        let n = spec.n();
        let fp = &self.pivot.first_part;
        let half = Rational::new(1, 2);
        let inv_ell = Rational::new(1, self.ell as i64);
        if !eps.within(&self.max_c()) {
            return Err(Error::Parameter("eps outside [0, c]".into()));
        }
        let mut p = vec![Rational::zero(); n];
        let bj = spec.column(fp[j]);
        for block in &self.pivot.blocks[..2] {
            let mut part = vec![Rational::zero(); n];
            part[fp[j]] = -half.clone();
            let rhs: Vec<Rational> = bj.iter().map(|v| v * &half).collect();
            add_tail(&mut part, &block.cols, block.solve(&rhs)?);
            accumulate(&mut p, &part);
        }
        // s(eps, j) = sum_{r<j} (eps_j^r / ell) b_r
        let mut s = vec![Rational::zero(); spec.k()];
        for (r, &col) in fp[..j].iter().enumerate() {
            let w = eps.get(r, j) * &inv_ell;
            for (slot, v) in s.iter_mut().zip(spec.column(col)) {
                *slot += &w * &v;
            }
        }
        let minus_s: Vec<Rational> = s.iter().map(|v| -v).collect();
        for block in &self.pivot.blocks[2..] {
            let mut part = vec![Rational::zero(); n];
            for r in 0..j {
                part[fp[r]] = eps.get(r, j) * &inv_ell;
            }
            add_tail(&mut part, &block.cols, block.solve(&minus_s)?);
            accumulate(&mut p, &part);
        }

        for (pos, &c) in fp.iter().enumerate() {
            let expected = match pos.cmp(&j) {
                std::cmp::Ordering::Less => eps.get(pos, j).clone(),
                std::cmp::Ordering::Equal => -Rational::one(),
                std::cmp::Ordering::Greater => Rational::zero(),
            };
            if p[c] != expected {
                return Err(Error::InternalConsistency(format!(
                    "p_{j} has {} at first-part position {pos}, expected {expected}",
                    p[c]
                )));
            }
        }
        for (c, v) in p.iter().enumerate() {
            if !fp.contains(&c) && v.abs() > half {
                return Err(Error::InternalConsistency(format!(
                    "p_{j} has tail entry {v} at column {c}, beyond 1/2"
                )));
            }
        }
        if !spec.contains(&p)? {
            return Err(Error::InternalConsistency(format!("p_{j} is not in ker A")));
        }
        Ok(p)
    }
}

fn add_tail(p: &mut [Rational], cols: &[usize], tail: Vec<Rational>) {
    for (&c, x) in cols.iter().zip(tail) {
        p[c] += x;
    }
}

fn accumulate(p: &mut [Rational], part: &[Rational]) {
    for (a, b) in p.iter_mut().zip(part) {
        *a += b;
    }
}

/// Slack allowed when comparing floating-point `phi` values with `[0, c]`.
pub const EVALUATOR_SLACK: f64 = 1e-9;

fn diff(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Exact `phi(eps)`. Entries outside `[0, c]` mean the norm breaks its sandwich.
pub fn phi(sys: &FixedPointSystem, norm: &PerturbedNorm, eps: &EpsMatrix) -> Result<EpsMatrix> {
    let points = sys.points(eps);
    let mut out = EpsMatrix::zeros(sys.size());
    for (i, j) in pairs(sys.size()) {
        let v = Rational::one() + eps.get(i, j) - norm.eval(&diff(&points[i], &points[j]));
        if v.is_negative() || v > norm.c {
            return Err(Error::SandwichViolation {
                i,
                j,
                value: v.to_f64(),
                c: norm.c.to_f64(),
            });
        }
        out.set(i, j, v);
    }
    Ok(out)
}

/// Floating-point `phi`, clamped into `[0, c]`; also returns the largest
/// excursion that was clamped away.
pub fn phi_f64(sys: &FixedPointSystem, norm: &PerturbedNorm, eps: &[f64]) -> Result<(Vec<f64>, f64)> {
    let c = norm.c.to_f64();
    let points: Vec<Vec<f64>> = (0..sys.size()).map(|j| sys.point_f64(eps, j)).collect();
    let mut excursion = 0.0f64;
    let mut out = Vec::with_capacity(eps.len());
    for (i, j) in pairs(sys.size()) {
        let d: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| a - b).collect();
        let v = 1.0 + eps[pair_index(i, j)] - norm.eval_f64(&d);
        if v < -EVALUATOR_SLACK || v > c + EVALUATOR_SLACK || !v.is_finite() {
            return Err(Error::SandwichViolation { i, j, value: v, c });
        }
        excursion = excursion.max(-v).max(v - c);
        out.push(v.clamp(0.0, c));
    }
    Ok((out, excursion.max(0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Try to solve the active linear pieces of `phi` exactly at the end.
    pub exact_solve: bool,
    pub exhaustive_cap: u64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: 1e-12,
            max_iter: 10_000,
            exact_solve: true,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Applications of `phi`.
    pub iterations: usize,
    /// `|phi(eps) - eps|_inf` before each step.
    pub residuals: Vec<f64>,
    pub final_eps: Vec<f64>,
    pub converged: bool,
    /// Damping factor in use at the end.
    pub alpha: f64,
    /// Largest clamped excursion of `phi` outside `[0, c]`.
    pub excursion: f64,
    /// Whether the fixed point was confirmed in exact arithmetic.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub certificate: EquilateralCertificate,
    pub report: ConvergenceReport,
    /// The exact fixed point, when one was confirmed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<EpsMatrix>,
}

/// Damped iteration `eps <- (1 - alpha) eps + alpha phi(eps)` from zero.
pub fn iterate(
    sys: &FixedPointSystem,
    norm: &PerturbedNorm,
    opts: &FixedPointOptions,
) -> Result<ConvergenceReport> {
    let c = norm.c.to_f64();
    let mut eps = vec![0.0; pairs(sys.size()).len()];
    let mut alpha = 1.0f64;
    let mut residuals = Vec::new();
    let mut excursion = 0.0f64;
    for it in 1..=opts.max_iter {
        let (next, exc) = phi_f64(sys, norm, &eps)?;
        excursion = excursion.max(exc);
        let r = next
            .iter()
            .zip(&eps)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let grew = residuals.last().is_some_and(|&prev: &f64| r > prev);
        residuals.push(r);
        if r <= opts.tol {
            return Ok(ConvergenceReport {
                iterations: it,
                residuals,
                final_eps: eps,
                converged: true,
                alpha,
                excursion,
                exact: false,
            });
        }
        if grew && alpha > 1.0 / 1024.0 {
            alpha /= 2.0;
        }
        for (e, nv) in eps.iter_mut().zip(&next) {
            *e = ((1.0 - alpha) * *e + alpha * nv).clamp(0.0, c);
        }
    }
    Ok(ConvergenceReport {
        iterations: opts.max_iter,
        residuals,
        final_eps: eps,
        converged: false,
        alpha,
        excursion,
        exact: false,
    })
}

/// Solves `|p_i(eps) - p_j(eps)|_Y = 1` exactly on the linear pieces active at
/// the floating-point fixed point `approx`. `None` if the pieces do not give a
/// nonsingular system or the solution fails exact re-checking.
pub fn exact_fixed_point(
    sys: &FixedPointSystem,
    norm: &PerturbedNorm,
    approx: &[f64],
) -> Result<Option<EpsMatrix>> {
    let size = sys.size();
    let n = sys.spec.n();
    let all_pairs = pairs(size);
    let m = all_pairs.len();
    let rows: Vec<Vec<Rational>> = (0..norm.piece_count()).map(|q| norm.piece_row(q, n)).collect();
    // L_q . p_j(0) and L_q . g_r
    let lb: Vec<Vec<Rational>> = rows.iter().map(|l| sys.base.iter().map(|b| dot(l, b)).collect()).collect();
    let lg: Vec<Vec<Rational>> = rows.iter().map(|l| sys.g.iter().map(|g| dot(l, g)).collect()).collect();
    let lb_f: Vec<Vec<f64>> = lb.iter().map(|r| r.iter().map(Rational::to_f64).collect()).collect();
    let lg_f: Vec<Vec<f64>> = lg.iter().map(|r| r.iter().map(Rational::to_f64).collect()).collect();

    let mut mat = Mat::zeros(m, m);
    let mut rhs = vec![Rational::zero(); m];
    for (row, &(i, j)) in all_pairs.iter().enumerate() {
        // value_q = L_q.(p_i - p_j), affine in eps
        let value = |q: usize| -> f64 {
            let mut v = lb_f[q][i] - lb_f[q][j];
            for r in 0..i {
                v += approx[pair_index(r, i)] * lg_f[q][r];
            }
            for r in 0..j {
                v -= approx[pair_index(r, j)] * lg_f[q][r];
            }
            v
        };
        let values: Vec<f64> = (0..rows.len()).map(value).collect();
        let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let near: Vec<usize> = (0..rows.len())
            .filter(|&q| values[q].abs() >= top - 1e-9)
            .collect();
        // prefer the piece that actually depends on eps_j^i
        let q = *near
            .iter()
            .max_by(|&&a, &&b| {
                lg_f[a][i]
                    .abs()
                    .partial_cmp(&lg_f[b][i].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(b.cmp(&a))
            })
            .expect("norm has pieces");
        let sign = if values[q] < 0.0 { -Rational::one() } else { Rational::one() };
        let mut coeffs = vec![Rational::zero(); m];
        for r in 0..i {
            coeffs[pair_index(r, i)] += &sign * &lg[q][r];
        }
        for r in 0..j {
            coeffs[pair_index(r, j)] -= &sign * &lg[q][r];
        }
        let constant = &sign * &(&lb[q][i] - &lb[q][j]);
        if coeffs.iter().all(Rational::is_zero) {
            // distance does not depend on eps here; pin eps_j^i at its approximation
            coeffs[row] = Rational::one();
            match Rational::from_f64(approx[row]) {
                Some(v) => rhs[row] = v,
                None => return Ok(None),
            }
        } else {
            rhs[row] = Rational::one() - constant;
        }
        for (col, v) in coeffs.into_iter().enumerate() {
            mat.set(row, col, v);
        }
    }
    let values = match mat.solve(&rhs) {
        Ok(v) => v,
        Err(Error::Singular) => return Ok(None),
        Err(e) => return Err(e),
    };
    let eps = EpsMatrix { size, values };
    if !eps.within(&norm.c) {
        return Ok(None);
    }
    let points = sys.points(&eps);
    for &(i, j) in &all_pairs {
        if norm.eval(&diff(&points[i], &points[j])) != Rational::one() {
            return Ok(None);
        }
    }
    Ok(Some(eps))
}

pub fn fixed_point_equilateral(
    spec: &SubspaceSpec,
    norm: &PerturbedNorm,
    ell: usize,
    opts: &FixedPointOptions,
) -> Result<FixedPointResult> {
    norm.validate(spec.n())?;
    let sys = FixedPointSystem::new(spec, ell, opts.exhaustive_cap)?;
    if norm.c > sys.max_c() {
        return Err(Error::Parameter(format!(
            "declared c = {} exceeds ell/(2(N-1)) = {}",
            norm.c,
            sys.max_c()
        )));
    }
    let mut report = iterate(&sys, norm, opts)?;
    if !report.converged {
        return Err(Error::NonConvergence(Box::new(report)));
    }
    let exact = if opts.exact_solve {
        exact_fixed_point(&sys, norm, &report.final_eps)?
    } else {
        None
    };
    let (eps, tolerance) = match exact {
        Some(e) => {
            report.exact = true;
            (e, 0.0)
        }
        None => {
            let e = EpsMatrix::from_f64(sys.size(), &report.final_eps)?;
            // |phi(eps) - eps| <= tol bounds |1 - d_Y| directly; double it for rounding
            (e, 2.0 * opts.tol.max(f64::EPSILON))
        }
    };
    let points = sys.points(&eps);
    for p in &points {
        if !spec.contains(p)? {
            return Err(Error::InternalConsistency("fixed-point set left ker A".into()));
        }
    }
    let n_points = sys.size();
    let mut cert = EquilateralCertificate::new(
        Source {
            construction: Construction::FixedPoint,
            n: spec.n(),
            k: spec.k(),
            ell: Some(ell),
            formula: Some(Rational::from_int(n_points as i64)),
            guaranteed: Some(n_points as u64),
            degenerate: Some(sys.pivot.degenerate),
        },
        NormTag::Perturbed {
            norm: norm.clone(),
            tolerance,
        },
        Rational::one(),
        points,
        sys.pivot.checks(spec)?,
    );
    if !report.exact {
        cert.evidence = None;
    }
    Ok(FixedPointResult {
        certificate: cert,
        report,
        eps: exact_or_none(eps, tolerance),
    })
}

fn exact_or_none(eps: EpsMatrix, tolerance: f64) -> Option<EpsMatrix> {
    (tolerance == 0.0).then_some(eps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichSample {
    pub index: usize,
    /// `|x|_Y / |x|_inf`, at most `1` when the sandwich holds.
    pub lower: f64,
    /// `|x|_inf / |x|_Y`, at most `1 + c` when the sandwich holds.
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub worst_lower: f64,
    pub worst_upper: f64,
    pub violations: Vec<SandwichSample>,
    /// For weighted norms: whether every weight lies in `[1/(1+c), 1]`, which
    /// proves the sandwich on all of `R^n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights_certified: Option<bool>,
}

impl SandwichReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Deterministic samples of `X`: a kernel basis with pairwise sums and
/// differences, the points `p_j(0)` and their differences when a system is
/// given, and `extra`.
pub fn sandwich_samples(
    spec: &SubspaceSpec,
    sys: Option<&FixedPointSystem>,
    extra: &[Vec<Rational>],
) -> Vec<Vec<Rational>> {
    let basis = spec.matrix().kernel_basis();
    let mut out: Vec<Vec<Rational>> = basis.clone();
    for s in 0..basis.len() {
        for t in s + 1..basis.len() {
            out.push(basis[s].iter().zip(&basis[t]).map(|(a, b)| a + b).collect());
            out.push(diff(&basis[s], &basis[t]));
        }
    }
    if let Some(sys) = sys {
        let zero = EpsMatrix::zeros(sys.size());
        let pts = sys.points(&zero);
        for (s, p) in pts.iter().enumerate() {
            out.push(p.clone());
            for q in &pts[s + 1..] {
                out.push(diff(p, q));
            }
        }
    }
    out.extend(extra.iter().cloned());
    out
}

/// Tests `|x|_Y <= |x|_inf <= (1 + c)|x|_Y` exactly on every sample. A
/// falsifier: passing proves nothing beyond the samples.
pub fn check_sandwich(norm: &PerturbedNorm, samples: &[Vec<Rational>]) -> SandwichReport {
    let one_plus_c = Rational::one() + &norm.c;
    let mut report = SandwichReport {
        samples: 0,
        worst_lower: 0.0,
        worst_upper: 0.0,
        violations: Vec::new(),
        weights_certified: norm.weights_within_sandwich(),
    };
    for (index, x) in samples.iter().enumerate() {
        let linf = x.iter().map(Rational::abs).fold(Rational::zero(), Rational::max);
        if linf.is_zero() {
            continue;
        }
        report.samples += 1;
        let y = norm.eval(x);
        let lower = &y / &linf;
        let upper_ok = linf <= &one_plus_c * &y;
        let (lower_f, upper_f) = (
            lower.to_f64(),
            if y.is_zero() { f64::INFINITY } else { (&linf / &y).to_f64() },
        );
        report.worst_lower = report.worst_lower.max(lower_f);
        report.worst_upper = report.worst_upper.max(upper_f);
        if lower > Rational::one() || !upper_ok {
            report.violations.push(SandwichSample {
                index,
                lower: lower_f,
                upper: upper_f,
            });
        }
    }
    report
}
