//! Dense exact matrices over [`Rational`].
//!
//! Column and row indices are zero-based throughout the crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// A nonsingular square submatrix certifying the rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankWitness {
    pub rank: usize,
    /// Row indices, ascending.
    pub rows: Vec<usize>,
    /// Column indices, ascending.
    pub cols: Vec<usize>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Mat::zeros(size, size);
        for i in 0..size {
            m.data[i * size + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from row vectors. An empty list gives a 0x`cols` matrix only
    /// through [`Mat::zeros`]; here it is 0x0.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Mat {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// The matrix whose `i`-th column is `columns[i]`.
    pub fn from_columns(columns: &[Vec<Rational>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        let mut m = Mat::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        Mat::new(rows, cols, values.iter().map(|&v| Rational::from_int(v)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Column `c` restricted to `rows`.
    pub fn column_at(&self, c: usize, rows: &[usize]) -> Vec<Rational> {
        rows.iter().map(|&r| self.get(r, c).clone()).collect()
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c).clone());
            }
        }
        Mat {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Rational::zero();
                for t in 0..self.cols {
                    acc += self.get(r, t) * other.get(t, c);
                }
                out.data[r * other.cols + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    ///
    /// Each row is first scaled to integers by the lcm of its denominators, so
    /// the elimination runs entirely in `BigInt` with exact divisions.
    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        let mut scale = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for r in 0..n {
            let row = self.row(r);
            let lcm = common_denominator(row);
            m.push(
                row.iter()
                    .map(|v| v.numer() * (&lcm / v.denom()))
                    .collect(),
            );
            scale *= lcm;
        }
        let det = bareiss(&mut m);
        Ok(Rational::from_bigint(det) / Rational::from_bigint(scale))
    }

    /// `B(i, v)`: a copy with column `i` replaced by `v`.
    pub fn replace_column(&self, i: usize, v: &[Rational]) -> Result<Mat> {
        if i >= self.cols {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.cols,
            });
        }
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "replacement column of length {} for {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = self.clone();
        for (r, value) in v.iter().enumerate() {
            out.data[r * self.cols + i] = value.clone();
        }
        Ok(out)
    }

    /// Solves `B x = rhs` by Cramer's rule: `x_j = det B(j, rhs) / det B`.
    ///
    /// The solution is checked by substitution before it is returned.
    pub fn cramer_solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        if !self.is_square() {
            return Err(Error::Dimension("Cramer's rule needs a square matrix".into()));
        }
        if rhs.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} for {} rows",
                rhs.len(),
                self.rows
            )));
        }
        let det = self.det()?;
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let mut x = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            x.push(self.replace_column(j, rhs)?.det()? / &det);
        }
        if self.mul_vec(&x)? != rhs {
            return Err(Error::InternalConsistency(
                "Cramer solution failed back-substitution".into(),
            ));
        }
        Ok(x)
    }

    /// Solves `B x = rhs` by Gauss-Jordan elimination over the rationals.
    /// Used for the larger systems where Cramer's rule is wasteful.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        if !self.is_square() || rhs.len() != self.rows {
            return Err(Error::Dimension("solve needs a square system".into()));
        }
        let n = self.rows;
        let mut aug: Vec<Vec<Rational>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.push(rhs[r].clone());
                row
            })
            .collect();
        for c in 0..n {
            let pivot = (c..n).find(|&r| !aug[r][c].is_zero()).ok_or(Error::Singular)?;
            aug.swap(c, pivot);
            let inv = aug[c][c].recip();
            for v in aug[c].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = aug[c].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r == c || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &(&factor * p);
                    }
                }
            }
        }
        let x: Vec<Rational> = aug.into_iter().map(|mut row| row.pop().unwrap()).collect();
        if self.mul_vec(&x)? != rhs {
            return Err(Error::InternalConsistency(
                "Gauss-Jordan solution failed back-substitution".into(),
            ));
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        let id = Mat::identity(n);
        for j in 0..n {
            cols.push(self.solve(&id.column(j))?);
        }
        Mat::from_columns(&cols)
    }

    pub fn rank(&self) -> usize {
        self.rank_witness().rank
    }

    /// Rank together with row and column index sets whose submatrix is
    /// nonsingular. Pivot columns are the leftmost possible; pivot rows are
    /// the first rows found with a nonzero entry during elimination.
    pub fn rank_witness(&self) -> RankWitness {
        let mut work: Vec<Vec<Rational>> = self.row_vecs();
        let mut row_ids: Vec<usize> = (0..self.rows).collect();
        let mut pivot_rows = Vec::new();
        let mut pivot_cols = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| !work[r][c].is_zero()) else {
                continue;
            };
            work.swap(next, p);
            row_ids.swap(next, p);
            let pivot_row = work[next].clone();
            for r in next + 1..self.rows {
                if work[r][c].is_zero() {
                    continue;
                }
                let factor = &work[r][c] / &pivot_row[c];
                for (v, pv) in work[r].iter_mut().zip(&pivot_row).skip(c) {
                    if !pv.is_zero() {
                        *v -= &(&factor * pv);
                    }
                }
            }
            pivot_rows.push(row_ids[next]);
            pivot_cols.push(c);
            next += 1;
        }
        pivot_rows.sort_unstable();
        RankWitness {
            rank: pivot_cols.len(),
            rows: pivot_rows,
            cols: pivot_cols,
        }
    }

    /// A basis of the right null space `{x : M x = 0}`, from the reduced row
    /// echelon form (one basis vector per free column).
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let mut work = self.row_vecs();
        let mut pivots: Vec<usize> = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| !work[r][c].is_zero()) else {
                continue;
            };
            work.swap(next, p);
            let inv = work[next][c].recip();
            for v in work[next].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = work[next].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r == next || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &(&factor * pv);
                    }
                }
            }
            pivots.push(c);
            next += 1;
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = -&work[r][f];
                }
                x
            })
            .collect()
    }
}

impl Default for Mat {
    fn default() -> Self {
        Mat::zeros(0, 0)
    }
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries((0..self.rows).map(|r| self.row(r))).finish()
    }
}

/// Fraction-free Gaussian elimination; consumes `m` and returns its determinant.
fn bareiss(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign.is_negative() {
        -det
    } else {
        det
    }
}

/// Dot product of two rational vectors of equal length.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ints, q};
    use proptest::prelude::*;

    fn m(rows: usize, cols: usize, v: &[i64]) -> Mat {
        Mat::from_i64(rows, cols, v).unwrap()
    }

    /// Cofactor expansion, kept independent of the Bareiss path.
    fn cofactor_det(a: &Mat) -> Rational {
        let n = a.rows();
        if n == 0 {
            return Rational::one();
        }
        let mut total = Rational::zero();
        for c in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&j| j != c).collect();
            let minor = cofactor_det(&a.select(&rows, &cols));
            let term = a.get(0, c) * minor;
            if c % 2 == 0 {
                total += term;
            } else {
                total -= &term;
            }
        }
        total
    }

    #[test]
    fn det_examples() {
        let one = Mat::new(1, 1, vec![q(5, 3)]).unwrap();
        assert_eq!(one.det().unwrap(), q(5, 3));
        assert_eq!(Mat::identity(2).det().unwrap(), q(1, 1));
        assert_eq!(m(2, 2, &[1, 2, 3, 4]).det().unwrap(), q(-2, 1));
        assert!(matches!(m(2, 3, &[1, 2, 3, 4, 5, 6]).det(), Err(Error::Dimension(_))));
    }

    #[test]
    fn det_needs_row_swap() {
        let a = m(3, 3, &[0, 1, 2, 1, 0, 3, 4, -3, 8]);
        assert_eq!(a.det().unwrap(), cofactor_det(&a));
    }

    #[test]
    fn replace_column_examples() {
        let id = Mat::identity(2);
        let r = id.replace_column(0, &ints(&[0, 1])).unwrap();
        assert_eq!(r, m(2, 2, &[0, 0, 1, 1]));
        let a = m(2, 2, &[1, 2, 3, 4]);
        assert_eq!(a.replace_column(1, &a.column(1)).unwrap(), a);
        assert!(a.replace_column(2, &ints(&[1, 1])).is_err());
        assert!(a.replace_column(0, &ints(&[1])).is_err());
    }

    #[test]
    fn cramer_examples() {
        let v = vec![q(1, 2), q(-3, 1), q(7, 5)];
        assert_eq!(Mat::identity(3).cramer_solve(&v).unwrap(), v);
        assert_eq!(m(1, 1, &[2]).cramer_solve(&ints(&[3])).unwrap(), vec![q(3, 2)]);
        let b = m(2, 2, &[1, 1, 1, -1]);
        assert_eq!(b.cramer_solve(&ints(&[0, 2])).unwrap(), ints(&[1, -1]));
        assert!(matches!(m(2, 2, &[1, 2, 2, 4]).cramer_solve(&ints(&[1, 1])), Err(Error::Singular)));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::zeros(3, 4).rank(), 0);
        assert_eq!(Mat::identity(3).rank(), 3);
        let a = m(2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(a.rank(), 1);
        // every 2x2 minor vanishes
        for c1 in 0..3 {
            for c2 in c1 + 1..3 {
                assert!(a.select(&[0, 1], &[c1, c2]).det().unwrap().is_zero());
            }
        }
    }

    #[test]
    fn rank_witness_is_nonsingular() {
        let a = m(3, 4, &[0, 0, 1, 2, 0, 0, 2, 4, 1, 0, 0, 1]);
        let w = a.rank_witness();
        assert_eq!(w.rank, 2);
        assert!(!a.select(&w.rows, &w.cols).det().unwrap().is_zero());
    }

    #[test]
    fn kernel_and_inverse() {
        let a = m(2, 4, &[1, 1, 0, 2, 0, 1, 1, -1]);
        let basis = a.kernel_basis();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(a.mul_vec(v).unwrap().iter().all(Rational::is_zero));
        }
        let b = m(3, 3, &[2, 1, 0, 1, 3, 1, 0, 1, 4]);
        let inv = b.inverse().unwrap();
        assert_eq!(b.mul(&inv).unwrap(), Mat::identity(3));
        assert_eq!(b.solve(&ints(&[1, 2, 3])).unwrap(), b.cramer_solve(&ints(&[1, 2, 3])).unwrap());
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=4).prop_map(|(p, d)| q(p, d))
    }

    fn square(n: usize) -> impl Strategy<Value = Mat> {
        proptest::collection::vec(small_rational(), n * n)
            .prop_map(move |v| Mat::new(n, n, v).unwrap())
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(a in (1usize..=4).prop_flat_map(square)) {
            prop_assert_eq!(a.det().unwrap(), cofactor_det(&a));
        }

        #[test]
        fn det_is_multilinear_in_columns(
            b in square(3),
            u in proptest::collection::vec(small_rational(), 3),
            w in proptest::collection::vec(small_rational(), 3),
            s in small_rational(),
            t in small_rational(),
            i in 0usize..3,
        ) {
            let mix: Vec<Rational> = u.iter().zip(&w).map(|(x, y)| &s * x + &t * y).collect();
            let lhs = b.replace_column(i, &mix).unwrap().det().unwrap();
            let rhs = &s * b.replace_column(i, &u).unwrap().det().unwrap()
                + &t * b.replace_column(i, &w).unwrap().det().unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn column_swap_negates(b in square(3)) {
            let swapped = b.select(&[0, 1, 2], &[1, 0, 2]);
            prop_assert_eq!(swapped.det().unwrap(), -b.det().unwrap());
        }

        #[test]
        fn repeated_column_gives_zero(b in square(3)) {
            let rep = b.replace_column(2, &b.column(0)).unwrap();
            prop_assert!(rep.det().unwrap().is_zero());
        }

        #[test]
        fn cramer_satisfies_system(b in square(3), v in proptest::collection::vec(small_rational(), 3)) {
            match b.cramer_solve(&v) {
                Ok(x) => prop_assert_eq!(b.mul_vec(&x).unwrap(), v),
                Err(Error::Singular) => prop_assert!(b.det().unwrap().is_zero()),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }

        #[test]
        fn rank_matches_largest_nonzero_minor(
            (r, c, v) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
                (Just(r), Just(c), proptest::collection::vec(-2i64..=2, r * c))
            })
        ) {
            let a = Mat::from_i64(r, c, &v).unwrap();
            let mut best = 0;
            for size in 1..=r.min(c) {
                for rows in crate::combin::combinations(r, size) {
                    for cols in crate::combin::combinations(c, size) {
                        if !a.select(&rows, &cols).det().unwrap().is_zero() {
                            best = best.max(size);
                        }
                    }
                }
            }
            let w = a.rank_witness();
            prop_assert_eq!(w.rank, best);
            prop_assert!(!a.select(&w.rows, &w.cols).det().unwrap().is_zero());
        }
    }
}
