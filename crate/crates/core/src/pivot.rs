//! Determinant-maximising column searches.
//!
//! The constructions never need a globally maximal determinant, only the
//! specific comparisons `|det B(i, v)| <= |det B|` their bounds consume.
//! Small instances are still searched exhaustively; larger ones fall back to
//! a violation-driven exchange search, where every violated comparison is an
//! improving move and `|det B|` strictly increases until none is left.

use crate::certify::StabilityCheck;
use crate::combin::{binomial_u128, combinations, subsets_up_to};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::rational::Rational;
use crate::subspace::{SignVector, SubspaceSpec};

/// Above this many candidate subsets the searches switch to local exchange.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// Among equal `|det|`, keep the lexicographically smallest column set.
    LexSmallest,
    /// Among equal `|det|`, keep the lexicographically largest column set.
    LexLargest,
}

/// A square submatrix `B(S, T)` of `A`: rows `rows`, columns `columns` (both ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSelection {
    pub columns: Vec<usize>,
    pub rows: Vec<usize>,
    pub matrix: Mat,
    pub det: Rational,
}

impl ColumnSelection {
    pub fn new(a: &Mat, rows: &[usize], mut columns: Vec<usize>) -> Result<Self> {
        if rows.len() != columns.len() {
            return Err(Error::Dimension("selection must be square".into()));
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= a.cols()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: a.cols(),
            });
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= a.rows()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: a.rows(),
            });
        }
        columns.sort_unstable();
        let matrix = a.select(rows, &columns);
        let det = matrix.det()?;
        Ok(ColumnSelection {
            columns,
            rows: rows.to_vec(),
            matrix,
            det,
        })
    }

    /// Selection of `columns` using every row of `A`.
    pub fn for_spec(spec: &SubspaceSpec, columns: Vec<usize>) -> Result<Self> {
        let rows: Vec<usize> = (0..spec.k()).collect();
        Self::new(spec.matrix(), &rows, columns)
    }

    pub fn abs_det(&self) -> Rational {
        self.det.abs()
    }

    pub fn size(&self) -> usize {
        self.columns.len()
    }

    /// Column `j` of `A` restricted to this selection's rows.
    pub fn restricted_column(&self, a: &Mat, j: usize) -> Vec<Rational> {
        a.column_at(j, &self.rows)
    }
}

/// `k` columns of `A` with `|det B| >= |det B(i, b_j)|` for every position `i`
/// and every column `j` outside the selection.
pub fn max_det_columns(spec: &SubspaceSpec, cap: u64) -> Result<ColumnSelection> {
    let rows: Vec<usize> = (0..spec.k()).collect();
    let pool: Vec<usize> = (0..spec.n()).collect();
    select_max_det(spec.matrix(), &rows, &pool, cap, TieBreak::LexSmallest)?.ok_or_else(|| {
        Error::InternalConsistency("full-rank matrix produced no nonsingular selection".into())
    })
}

/// Exchange search on the whole matrix, regardless of instance size.
pub fn local_search_columns(spec: &SubspaceSpec) -> Result<ColumnSelection> {
    let rows: Vec<usize> = (0..spec.k()).collect();
    let pool: Vec<usize> = (0..spec.n()).collect();
    let seed = greedy_seed(spec.matrix(), &rows, &pool)?
        .ok_or_else(|| Error::InternalConsistency("greedy seed found no full-rank start".into()))?;
    exchange_search(spec.matrix(), &rows, &pool, seed)
}

/// Best `rows.len()`-subset of `pool` (restricted to `rows`), or `None` when
/// every such submatrix is singular.
pub fn select_max_det(
    a: &Mat,
    rows: &[usize],
    pool: &[usize],
    cap: u64,
    tie: TieBreak,
) -> Result<Option<ColumnSelection>> {
    let size = rows.len();
    if size == 0 || pool.len() < size {
        return Ok(None);
    }
    let candidates = binomial_u128(pool.len() as u64, size as u64);
    if candidates <= cap as u128 {
        let mut best: Option<ColumnSelection> = None;
        for idx in combinations(pool.len(), size) {
            let cols: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
            let sel = ColumnSelection::new(a, rows, cols)?;
            if sel.det.is_zero() {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => match tie {
                    TieBreak::LexSmallest => sel.abs_det() > b.abs_det(),
                    TieBreak::LexLargest => sel.abs_det() >= b.abs_det(),
                },
            };
            if better {
                best = Some(sel);
            }
        }
        return Ok(best);
    }
    match greedy_seed(a, rows, pool)? {
        None => Ok(None),
        Some(seed) => exchange_search(a, rows, pool, seed).map(Some),
    }
}

/// Greedy volume growth: repeatedly add the column maximising the Gram
/// determinant of the columns chosen so far. `None` if the pool is rank deficient.
pub fn greedy_seed(a: &Mat, rows: &[usize], pool: &[usize]) -> Result<Option<Vec<usize>>> {
    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..rows.len() {
        let mut best: Option<(Rational, usize)> = None;
        for &j in pool {
            if chosen.contains(&j) {
                continue;
            }
            let mut cols = chosen.clone();
            cols.push(j);
            let m = a.select(rows, &cols);
            let gram = m.transpose().mul(&m)?.det()?;
            if best.as_ref().is_none_or(|(g, _)| gram > *g) {
                best = Some((gram, j));
            }
        }
        match best {
            Some((g, j)) if !g.is_zero() => chosen.push(j),
            _ => return Ok(None),
        }
    }
    Ok(Some(chosen))
}

/// Best-improvement single-column exchange from a nonsingular `seed`.
pub fn exchange_search(
    a: &Mat,
    rows: &[usize],
    pool: &[usize],
    seed: Vec<usize>,
) -> Result<ColumnSelection> {
    let mut cols = seed;
    let mut b = a.select(rows, &cols);
    let mut current = b.det()?.abs();
    if current.is_zero() {
        return Err(Error::Singular);
    }
    loop {
        let mut best: Option<(Rational, usize, usize)> = None;
        for pos in 0..cols.len() {
            for &j in pool {
                if cols.contains(&j) {
                    continue;
                }
                let d = b.replace_column(pos, &a.column_at(j, rows))?.det()?.abs();
                if d > current && best.as_ref().is_none_or(|(bd, _, _)| d > *bd) {
                    best = Some((d, pos, j));
                }
            }
        }
        let Some((d, pos, j)) = best else { break };
        cols[pos] = j;
        b = a.select(rows, &cols);
        current = d;
    }
    ColumnSelection::new(a, rows, cols)
}

/// Records `|det B(i, b_j)| <= |det B|` for every position `i` and candidate `j`.
pub fn exchange_checks(
    a: &Mat,
    sel: &ColumnSelection,
    candidates: &[usize],
    label: &str,
) -> Result<Vec<StabilityCheck>> {
    let rhs = sel.abs_det();
    let mut out = Vec::new();
    for pos in 0..sel.size() {
        for &j in candidates {
            if sel.columns.contains(&j) {
                continue;
            }
            let lhs = sel
                .matrix
                .replace_column(pos, &sel.restricted_column(a, j))?
                .det()?
                .abs();
            out.push(StabilityCheck::new(
                format!("{label}: |det B({pos}, b_{j})| <= |det B|"),
                lhs,
                rhs.clone(),
            ));
        }
    }
    Ok(out)
}

/// Disjoint column groups `I_1..I_k` and signs `sigma` such that
/// `B = B(b_{I_1,sigma}, ..., b_{I_k,sigma})` has positive determinant that no
/// single group replacement by a nonempty `J` of at most `ell` free columns
/// (free = outside every group) can exceed in absolute value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthantConfig {
    pub groups: Vec<Vec<usize>>,
    pub sigma: SignVector,
    pub matrix: Mat,
    pub det: Rational,
    pub ell: usize,
}

impl OrthantConfig {
    /// All grouped columns, ascending (`I` in the usual notation; `m = |I|`).
    pub fn used(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.groups.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// Columns outside every group, ascending.
    pub fn free(&self) -> Vec<usize> {
        let used = self.used();
        (0..self.sigma.len()).filter(|c| !used.contains(c)).collect()
    }

    /// Which group a column belongs to.
    pub fn group_of(&self, col: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&col))
    }
}

pub fn check_orthant_ell(spec: &SubspaceSpec, ell: usize) -> Result<()> {
    if ell == 0 || ell * (spec.k() + 1) > spec.n() {
        return Err(Error::Parameter(format!(
            "ell = {ell} must satisfy 1 <= ell <= n/(k+1) = {}/{}",
            spec.n(),
            spec.k() + 1
        )));
    }
    Ok(())
}

/// Violation-driven search for an [`OrthantConfig`], followed by the sign
/// normalisation `det B(k, sigma_j b_j) >= 0` on the free columns.
///
/// The search starts from the best single-column selection (ties resolved
/// towards the largest column indices, so groups sit at the end of the
/// coordinate range) and grows groups by improving moves.
pub fn search_orthant_config(spec: &SubspaceSpec, ell: usize, cap: u64) -> Result<OrthantConfig> {
    check_orthant_ell(spec, ell)?;
    let k = spec.k();
    let a = spec.matrix();
    let rows: Vec<usize> = (0..k).collect();
    let pool: Vec<usize> = (0..spec.n()).collect();
    let seed = select_max_det(a, &rows, &pool, cap, TieBreak::LexLargest)?
        .ok_or_else(|| Error::InternalConsistency("no nonsingular seed".into()))?;

    let mut sigma = SignVector::all_positive(spec.n());
    let mut groups: Vec<Vec<usize>> = seed.columns.iter().map(|&c| vec![c]).collect();
    if seed.det.is_negative() {
        sigma.flip(groups[k - 1][0]);
    }
    let group_matrix = |groups: &[Vec<usize>], sigma: &SignVector| -> Result<Mat> {
        let cols: Vec<Vec<Rational>> =
            groups.iter().map(|g| spec.signed_column_sum(g, sigma)).collect();
        Mat::from_columns(&cols)
    };
    let mut b = group_matrix(&groups, &sigma)?;
    let mut det = b.det()?;
    debug_assert!(det.is_positive());

    loop {
        let used: Vec<usize> = groups.iter().flatten().copied().collect();
        let free: Vec<usize> = pool.iter().copied().filter(|c| !used.contains(c)).collect();
        normalize_free_signs(spec, &b, &free, &mut sigma)?;

        let mut best: Option<(Rational, usize, Vec<usize>)> = None;
        for subset in subsets_up_to(&free, ell) {
            let v = spec.signed_column_sum(&subset, &sigma);
            for pos in 0..k {
                let d = b.replace_column(pos, &v)?.det()?.abs();
                if d > det && best.as_ref().is_none_or(|(bd, _, _)| d > *bd) {
                    best = Some((d, pos, subset.clone()));
                }
            }
        }
        let Some((_, pos, subset)) = best else { break };
        groups[pos] = subset;
        b = group_matrix(&groups, &sigma)?;
        if b.det()?.is_negative() {
            for &c in &groups[pos] {
                sigma.flip(c);
            }
            b = group_matrix(&groups, &sigma)?;
        }
        det = b.det()?;
    }

    for g in &mut groups {
        g.sort_unstable();
    }
    Ok(OrthantConfig {
        groups,
        sigma,
        matrix: b,
        det,
        ell,
    })
}

/// Flips `sigma_j` on free columns until `det B(k, sigma_j b_j) >= 0`.
fn normalize_free_signs(
    spec: &SubspaceSpec,
    b: &Mat,
    free: &[usize],
    sigma: &mut SignVector,
) -> Result<()> {
    let last = spec.k() - 1;
    for &j in free {
        let d = b.replace_column(last, &spec.column(j))?.det()?;
        let signed = if sigma.get(j) > 0 { d } else { -d };
        if signed.is_negative() {
            sigma.flip(j);
        }
    }
    Ok(())
}

/// The comparisons an [`OrthantConfig`] must satisfy, all recomputed:
/// `det B > 0`, `det B(k, sigma_j b_j) >= 0` for free `j`, and
/// `|det B(pos, b_{J,sigma})| <= det B` for every position and admissible `J`.
pub fn orthant_checks(spec: &SubspaceSpec, config: &OrthantConfig) -> Result<Vec<StabilityCheck>> {
    let k = spec.k();
    let det = &config.det;
    let mut out = vec![StabilityCheck::strict("det B > 0", Rational::zero(), det.clone())];
    let free = config.free();
    for &j in &free {
        let v = config.sigma.as_slice()[j];
        let col: Vec<Rational> = spec
            .column(j)
            .iter()
            .map(|x| if v > 0 { x.clone() } else { -x })
            .collect();
        let d = config.matrix.replace_column(k - 1, &col)?.det()?;
        out.push(StabilityCheck::new(
            format!("0 <= det B(k, sigma_{j} b_{j})"),
            Rational::zero(),
            d,
        ));
    }
    for subset in subsets_up_to(&free, config.ell) {
        let v = spec.signed_column_sum(&subset, &config.sigma);
        for pos in 0..k {
            let d = config.matrix.replace_column(pos, &v)?.det()?.abs();
            out.push(StabilityCheck::new(
                format!("|det B({pos}, b_J,sigma)| <= det B for J = {subset:?}"),
                d,
                det.clone(),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ints, q};

    fn spec(rows: &[&[i64]]) -> SubspaceSpec {
        SubspaceSpec::from_rows(rows.iter().map(|r| ints(r)).collect()).unwrap()
    }

    #[test]
    fn max_det_hyperplane_picks_first_column() {
        let s = spec(&[&[1, 1, 1, 1]]);
        let sel = max_det_columns(&s, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(sel.columns, vec![0]);
        assert_eq!(sel.abs_det(), q(1, 1));
    }

    #[test]
    fn max_det_enumerates_pairs() {
        let s = spec(&[&[1, 0, 0], &[0, 1, 2]]);
        let sel = max_det_columns(&s, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(sel.columns, vec![0, 2]);
        assert_eq!(sel.abs_det(), q(2, 1));
    }

    #[test]
    fn local_search_is_exchange_stable() {
        let s = spec(&[&[3, -1, 4, 1, -5, 9, 2], &[-6, 5, 3, 5, 8, -9, 7]]);
        let sel = local_search_columns(&s).unwrap();
        let all: Vec<usize> = (0..7).collect();
        for c in exchange_checks(s.matrix(), &sel, &all, "t").unwrap() {
            assert!(c.holds(), "{}", c.label);
        }
        // capped selection takes the same path
        let capped = max_det_columns(&s, 0).unwrap();
        assert_eq!(capped, sel);
    }

    #[test]
    fn orthant_hyperplane_example() {
        let s = spec(&[&[1, 1, 1, 1]]);
        let c = search_orthant_config(&s, 1, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(c.groups, vec![vec![3]]);
        assert_eq!(c.sigma.as_slice(), &[1, 1, 1, 1]);
        assert_eq!(c.det, q(1, 1));
    }

    #[test]
    fn orthant_config_passes_every_check() {
        let s = spec(&[&[1, 1, 0, 0, 0, 0], &[0, 0, 1, 1, 1, 1]]);
        let c = search_orthant_config(&s, 2, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert!(c.det.is_positive());
        assert!(c.groups.iter().all(|g| !g.is_empty() && g.len() <= 2));
        let checks = orthant_checks(&s, &c).unwrap();
        assert!(checks.len() > 1);
        for chk in checks {
            assert!(chk.holds(), "{} : {} vs {}", chk.label, chk.lhs, chk.rhs);
        }
    }

    #[test]
    fn orthant_rejects_bad_ell() {
        let s = spec(&[&[1, 1, 1, 1]]);
        assert!(matches!(search_orthant_config(&s, 3, 10), Err(Error::Parameter(_))));
        assert!(matches!(search_orthant_config(&s, 0, 10), Err(Error::Parameter(_))));
    }

    #[test]
    fn orthant_normalises_signs_for_negative_entries() {
        let s = spec(&[&[2, -1, 3, -1, 1, -2, 1]]);
        let c = search_orthant_config(&s, 2, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        for chk in orthant_checks(&s, &c).unwrap() {
            assert!(chk.holds(), "{}", chk.label);
        }
    }

    #[test]
    fn singular_pool_gives_none() {
        let a = Mat::from_i64(2, 3, &[1, 2, 3, 2, 4, 6]).unwrap();
        assert!(select_max_det(&a, &[0, 1], &[0, 1, 2], 100, TieBreak::LexSmallest)
            .unwrap()
            .is_none());
        assert!(select_max_det(&a, &[0, 1], &[0, 1, 2], 0, TieBreak::LexSmallest)
            .unwrap()
            .is_none());
    }
}
