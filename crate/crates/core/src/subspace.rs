//! The subspace `X = ker A` of the `n`-dimensional Chebyshev space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, Mat};
use crate::rational::Rational;

/// A codimension-`k` subspace given by a full-row-rank `k x n` matrix.
///
/// Constructions never physically permute `A`: pivot searches return index
/// sets into the original columns, and `column_order` only records the
/// arrangement a search settled on. All points are therefore already in the
/// original coordinate order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceSpec {
    a: Mat,
    column_order: Vec<usize>,
}

/// On-disk form: `{ "k": int, "n": int, "A": [[rational, ...], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceFile {
    pub k: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Rational>>,
}

impl SubspaceSpec {
    /// Checks `1 <= k < n` and `rank A = k`.
    pub fn validate(a: Mat) -> Result<Self> {
        let (k, n) = (a.rows(), a.cols());
        if k == 0 || k >= n {
            return Err(Error::InvalidSpec(format!(
                "need 1 <= k < n, got k = {k}, n = {n}"
            )));
        }
        let rank = a.rank();
        if rank < k {
            return Err(Error::InvalidSpec(format!(
                "rank of A is {rank} < k = {k}; drop dependent rows first"
            )));
        }
        Ok(SubspaceSpec {
            a,
            column_order: (0..n).collect(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        Self::validate(Mat::from_rows(rows)?)
    }

    pub fn from_file(file: SubspaceFile) -> Result<Self> {
        if file.a.len() != file.k || file.a.iter().any(|r| r.len() != file.n) {
            return Err(Error::InvalidSpec(format!(
                "declared k = {}, n = {} does not match the shape of A",
                file.k, file.n
            )));
        }
        Self::from_rows(file.a)
    }

    pub fn to_file(&self) -> SubspaceFile {
        SubspaceFile {
            k: self.k(),
            n: self.n(),
            a: self.a.row_vecs(),
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }

    pub fn dim(&self) -> usize {
        self.n() - self.k()
    }

    pub fn column_order(&self) -> &[usize] {
        &self.column_order
    }

    /// A copy with a recorded column arrangement. `order` must be a
    /// permutation of `0..n`.
    pub fn with_column_order(&self, order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; self.n()];
        if order.len() != self.n() {
            return Err(Error::Dimension("column order has wrong length".into()));
        }
        for &c in &order {
            if c >= self.n() || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidSpec("column order is not a permutation".into()));
            }
        }
        Ok(SubspaceSpec {
            a: self.a.clone(),
            column_order: order,
        })
    }

    /// `b_j`: column `j` of `A`.
    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.a.column(j)
    }

    /// `x in X` iff `A x = 0`.
    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        if x.len() != self.n() {
            return Err(Error::Dimension(format!(
                "point of length {} in a space of dimension {}",
                x.len(),
                self.n()
            )));
        }
        Ok((0..self.k()).all(|r| dot(self.a.row(r), x).is_zero()))
    }

    /// `sum_{i in cols} sign_i b_i`, the signed column sum `b_{I,sigma}`.
    pub fn signed_column_sum(&self, cols: &[usize], sigma: &SignVector) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); self.k()];
        for &c in cols {
            for (r, slot) in acc.iter_mut().enumerate() {
                let v = self.a.get(r, c);
                if v.is_zero() {
                    continue;
                }
                if sigma.get(c) > 0 {
                    *slot += v;
                } else {
                    *slot -= v;
                }
            }
        }
        acc
    }
}

/// A vector in `{+1, -1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn all_positive(n: usize) -> Self {
        SignVector(vec![1; n])
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    /// `sign * value`.
    pub fn apply(&self, i: usize, value: &Rational) -> Rational {
        if self.0[i] > 0 {
            value.clone()
        } else {
            -value
        }
    }
}

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        if v.iter().all(|&s| s == 1 || s == -1) {
            Ok(SignVector(v))
        } else {
            Err(Error::InvalidSpec("sign vector entries must be +1 or -1".into()))
        }
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(s: SignVector) -> Vec<i8> {
        s.0
    }
}
