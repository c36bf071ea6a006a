//! Block pivoting for the block-sum and fixed-point constructions.
//!
//! `num_blocks` disjoint column blocks are stabilised, last block first, each
//! against every column still to its left. Everything left over forms the
//! first part. When the remaining columns stop having
//! full rank the search restarts in degenerate mode, where block sizes follow
//! the ranks of what is left and each block keeps only the rows that witness
//! that rank.

use serde::{Deserialize, Serialize};

use crate::certify::StabilityCheck;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::pivot::{select_max_det, TieBreak};
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Original column indices in arrangement order (`U_i`).
    pub cols: Vec<usize>,
    /// Row indices of `A` the block is solved on (`S_i`).
    pub rows: Vec<usize>,
    pub det: Rational,
    /// Columns that were still available when the block was chosen, the
    /// block's own columns included.
    pub pool: Vec<usize>,
    #[serde(skip)]
    pub mat: Mat,
}

impl Block {
    fn empty(pool: Vec<usize>) -> Self {
        Block {
            cols: Vec::new(),
            rows: Vec::new(),
            det: Rational::one(),
            pool,
            mat: Mat::zeros(0, 0),
        }
    }

    /// `m_i`.
    pub fn size(&self) -> usize {
        self.cols.len()
    }

    /// The tail `x` on this block's columns with `B x = rhs`, where `rhs` is
    /// indexed by all rows of `A` and restricted to `rows`.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols.is_empty() {
            return Ok(Vec::new());
        }
        let restricted: Vec<Rational> = self.rows.iter().map(|&r| rhs[r].clone()).collect();
        self.mat.cramer_solve(&restricted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPivot {
    /// `blocks[i]` is block `i + 1`.
    pub blocks: Vec<Block>,
    /// The first `N` columns in arrangement order.
    pub first_part: Vec<usize>,
    pub degenerate: bool,
    /// The arrangement the search settled on: `column_order[p]` is the
    /// original column placed at position `p`.
    pub column_order: Vec<usize>,
}

impl BlockPivot {
    /// `M_i`, the cumulative block sizes.
    pub fn cumulative(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                *acc += b.size();
                Some(*acc)
            })
            .collect()
    }

    /// `|det B_i| >= |det B_i(j, b_r)|` for every block, position and
    /// available column, plus `det B_i != 0` for nonempty blocks.
    pub fn checks(&self, spec: &SubspaceSpec) -> Result<Vec<StabilityCheck>> {
        let a = spec.matrix();
        let mut out = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if b.cols.is_empty() {
                continue;
            }
            let abs = b.det.abs();
            out.push(StabilityCheck::strict(
                format!("block {}: |det B| > 0", i + 1),
                Rational::zero(),
                abs.clone(),
            ));
            for pos in 0..b.size() {
                for &r in &b.pool {
                    if b.cols.contains(&r) {
                        continue;
                    }
                    let lhs = b
                        .mat
                        .replace_column(pos, &a.column_at(r, &b.rows))?
                        .det()?
                        .abs();
                    out.push(StabilityCheck::new(
                        format!("block {}: |det B({pos}, b_{r})| <= |det B|", i + 1),
                        lhs,
                        abs.clone(),
                    ));
                }
            }
        }
        Ok(out)
    }
}

/// Checks `num_blocks * k <= n` and returns `N = n - k * num_blocks`.
pub fn first_part_size(spec: &SubspaceSpec, num_blocks: usize) -> Result<usize> {
    spec.n()
        .checked_sub(spec.k() * num_blocks)
        .ok_or_else(|| {
            Error::Parameter(format!(
                "{num_blocks} blocks of size {} do not fit in {} columns",
                spec.k(),
                spec.n()
            ))
        })
}

/// Pivots `num_blocks` blocks of `A`, starting from the natural arrangement:
/// block `i` first sits on positions `N + (i-1)k .. N + ik` and only moves
/// when a column to its left strictly increases `|det|`.
pub fn block_pivot(spec: &SubspaceSpec, num_blocks: usize, cap: u64) -> Result<BlockPivot> {
    let n_first = first_part_size(spec, num_blocks)?;
    match nondegenerate(spec, num_blocks, n_first, cap)? {
        Some(p) => Ok(p),
        None => degenerate(spec, num_blocks, n_first, cap),
    }
}

/// Stabilises the block on positions `start..end` of `order` on `rows`,
/// drawing replacements from positions `0..start`. `None` when every
/// selection from `0..end` is singular.
fn stabilize(
    a: &Mat,
    rows: &[usize],
    order: &mut [usize],
    start: usize,
    end: usize,
    cap: u64,
) -> Result<Option<Block>> {
    let select = |order: &[usize]| a.select(rows, &order[start..end]);
    let mut b = select(order);
    let mut current = b.det()?.abs();
    if current.is_zero() {
        let Some(sel) = select_max_det(a, rows, &order[..end], cap, TieBreak::LexSmallest)? else {
            return Ok(None);
        };
        // move the chosen columns into the block, keeping the others in place
        for &c in &sel.columns {
            let at = order.iter().position(|&x| x == c).expect("column in order");
            if at >= start {
                continue;
            }
            let slot = (start..end)
                .find(|&p| !sel.columns.contains(&order[p]))
                .expect("block has a free slot");
            order.swap(at, slot);
        }
        b = select(order);
        current = b.det()?.abs();
    }
    loop {
        let mut best: Option<(Rational, usize, usize)> = None;
        for pos in 0..end - start {
            for q in 0..start {
                let d = b.replace_column(pos, &a.column_at(order[q], rows))?.det()?.abs();
                if d > current && best.as_ref().is_none_or(|(bd, _, _)| d > *bd) {
                    best = Some((d, pos, q));
                }
            }
        }
        let Some((d, pos, q)) = best else { break };
        order.swap(start + pos, q);
        b = select(order);
        current = d;
    }
    let det = b.det()?;
    Ok(Some(Block {
        cols: order[start..end].to_vec(),
        rows: rows.to_vec(),
        det,
        pool: order[..end].to_vec(),
        mat: b,
    }))
}

fn nondegenerate(
    spec: &SubspaceSpec,
    num_blocks: usize,
    n_first: usize,
    cap: u64,
) -> Result<Option<BlockPivot>> {
    let k = spec.k();
    let rows: Vec<usize> = (0..k).collect();
    let mut order: Vec<usize> = (0..spec.n()).collect();
    let mut blocks: Vec<Option<Block>> = vec![None; num_blocks];
    for i in (0..num_blocks).rev() {
        let start = n_first + i * k;
        match stabilize(spec.matrix(), &rows, &mut order, start, start + k, cap)? {
            Some(b) => blocks[i] = Some(b),
            None => return Ok(None),
        }
    }
    Ok(Some(BlockPivot {
        blocks: blocks.into_iter().map(|b| b.expect("filled")).collect(),
        first_part: order[..n_first].to_vec(),
        degenerate: false,
        column_order: order,
    }))
}

fn degenerate(
    spec: &SubspaceSpec,
    num_blocks: usize,
    n_first: usize,
    cap: u64,
) -> Result<BlockPivot> {
    let a = spec.matrix();
    let n = spec.n();
    let all_rows: Vec<usize> = (0..spec.k()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::with_capacity(num_blocks);
    let mut taken = 0;
    let mut prev = spec.k();
    for i in 0..num_blocks {
        let end = n - taken;
        let (m, rows) = if i == 0 {
            (spec.k(), all_rows.clone())
        } else if prev == 0 {
            (0, Vec::new())
        } else {
            let w = a.select(&all_rows, &order[..end]).rank_witness();
            (w.rank, w.rows)
        };
        prev = m;
        if m == 0 {
            blocks.push(Block::empty(order[..end].to_vec()));
            continue;
        }
        let block = stabilize(a, &rows, &mut order, end - m, end, cap)?.ok_or_else(|| {
            Error::InternalConsistency(format!("block {}: rank witness has no nonsingular minor", i + 1))
        })?;
        blocks.push(block);
        taken += m;
    }
    Ok(BlockPivot {
        blocks,
        first_part: order[..n_first].to_vec(),
        degenerate: true,
        column_order: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ints;

    fn spec(rows: &[&[i64]]) -> SubspaceSpec {
        SubspaceSpec::from_rows(rows.iter().map(|r| ints(r)).collect()).unwrap()
    }

    #[test]
    fn hyperplane_two_blocks() {
        let s = spec(&[&[1, 1, 1, 1]]);
        let p = block_pivot(&s, 2, 1000).unwrap();
        assert!(!p.degenerate);
        assert_eq!(p.blocks[0].cols, vec![2]);
        assert_eq!(p.blocks[1].cols, vec![3]);
        assert_eq!(p.first_part, vec![0, 1]);
        assert!(p.checks(&s).unwrap().iter().all(StabilityCheck::holds));
    }

    #[test]
    fn zero_columns_force_degenerate_mode() {
        // only one nonzero column: after it is taken nothing of rank 1 is left
        let s = spec(&[&[0, 0, 0, 3, 0]]);
        let p = block_pivot(&s, 2, 1000).unwrap();
        assert!(p.degenerate);
        let sizes: Vec<usize> = p.blocks.iter().map(Block::size).collect();
        assert_eq!(sizes, vec![1, 0]);
        assert_eq!(p.cumulative(), vec![1, 1]);
        assert_eq!(p.first_part.len(), 3);
        assert!(p.checks(&s).unwrap().iter().all(StabilityCheck::holds));
    }

    #[test]
    fn rank_drop_in_two_rows() {
        // a single column carries the second row
        let s = spec(&[&[1, 2, 1, 1, 0, 1], &[0, 0, 0, 0, 1, 0]]);
        let p = block_pivot(&s, 2, 1000).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.blocks[0].cols, vec![4, 1]);
        assert_eq!(p.blocks[1].cols, vec![3]);
        assert_eq!(p.blocks[1].rows, vec![0]);
        assert_eq!(p.first_part, vec![0, 5]);
        for chk in p.checks(&s).unwrap() {
            assert!(chk.holds(), "{}", chk.label);
        }
        assert_eq!(p.column_order, vec![0, 5, 2, 3, 4, 1]);
    }

    #[test]
    fn too_many_blocks() {
        let s = spec(&[&[1, 1, 1]]);
        assert!(block_pivot(&s, 4, 10).is_err());
    }
}
