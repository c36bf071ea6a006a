//! Closed-form lower bounds for `e(X)` with `X` of codimension `k` in `l_inf^n`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::combin::binomial_prefix_sum;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bound {
    #[serde(rename = "1")]
    SignWindows,
    #[serde(rename = "2")]
    OrthantSplit,
    #[serde(rename = "3")]
    BlockSums,
}

impl Bound {
    pub const ALL: [Bound; 3] = [Bound::SignWindows, Bound::OrthantSplit, Bound::BlockSums];

    pub fn number(self) -> u8 {
        match self {
            Bound::SignWindows => 1,
            Bound::OrthantSplit => 2,
            Bound::BlockSums => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.number() == n)
    }

    /// Largest admissible `ell` (bound 1 has no `ell`; reported as 0).
    pub fn max_ell(self, n: usize, k: usize) -> usize {
        match self {
            Bound::SignWindows => 0,
            Bound::OrthantSplit => n / (k + 1),
            Bound::BlockSums => n / (2 * k + 1),
        }
    }

    /// The unrounded value of the bound, `None` when `ell` is not admissible.
    pub fn formula(self, n: usize, k: usize, ell: usize) -> Option<Rational> {
        if k == 0 || k >= n {
            return None;
        }
        let big = |v: BigUint| Rational::from_bigint(BigInt::from(v));
        match self {
            Bound::SignWindows => {
                let d = (n - k) as u32;
                let num = BigUint::one() << d;
                let den = BigUint::from(d).pow(k as u32);
                Some(big(num) / big(den))
            }
            Bound::OrthantSplit => {
                if ell == 0 || ell > self.max_ell(n, k) {
                    return None;
                }
                let sum = big(binomial_prefix_sum((n - k * ell) as u64, ell as u64));
                let den = big(BigUint::one() << (k - 1));
                Some(Rational::one() + sum / den)
            }
            Bound::BlockSums => {
                if ell == 0 || ell > self.max_ell(n, k) {
                    return None;
                }
                let sum = big(binomial_prefix_sum((n - 2 * k * ell) as u64, ell as u64));
                Some(Rational::one() + sum)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub bound: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    pub raw: Rational,
    #[serde(with = "big_string")]
    pub ceiled: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsTable {
    pub n: usize,
    pub k: usize,
    pub rows: Vec<BoundRow>,
    /// Index into `rows` of the best row per bound, in bound order.
    pub best: Vec<usize>,
    /// `dim X + 1`.
    pub petty_target: usize,
    /// `2^{dim X}`.
    #[serde(with = "big_string")]
    pub ceiling: BigInt,
}

impl BoundsTable {
    /// The best row over all bounds; ties go to the lower bound number, then the smaller `ell`.
    pub fn winner(&self) -> &BoundRow {
        self.best
            .iter()
            .map(|&i| &self.rows[i])
            .max_by(|a, b| a.ceiled.cmp(&b.ceiled).then(b.bound.cmp(&a.bound)))
            .expect("bound (1) is always present")
    }

    pub fn best_for(&self, bound: Bound) -> Option<&BoundRow> {
        self.best
            .iter()
            .map(|&i| &self.rows[i])
            .find(|r| r.bound == bound)
    }

    /// All rows ordered by ceiled value, best first.
    pub fn ranked(&self) -> Vec<&BoundRow> {
        let mut rows: Vec<&BoundRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| {
            b.ceiled
                .cmp(&a.ceiled)
                .then(a.bound.cmp(&b.bound))
                .then(a.ell.cmp(&b.ell))
        });
        rows
    }
}

pub fn bounds_table(n: usize, k: usize) -> Result<BoundsTable> {
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    let mut rows = Vec::new();
    let mut best = Vec::new();
    for bound in Bound::ALL {
        let ells: Vec<Option<usize>> = match bound {
            Bound::SignWindows => vec![None],
            _ => (1..=bound.max_ell(n, k)).map(Some).collect(),
        };
        let mut best_here: Option<usize> = None;
        for ell in ells {
            let raw = bound
                .formula(n, k, ell.unwrap_or(0))
                .expect("ell enumerated within range");
            let ceiled = raw.ceil();
            rows.push(BoundRow {
                bound,
                ell,
                raw,
                ceiled,
            });
            let idx = rows.len() - 1;
            if best_here.is_none_or(|b| rows[idx].ceiled > rows[b].ceiled) {
                best_here = Some(idx);
            }
        }
        best.extend(best_here);
    }
    Ok(BoundsTable {
        n,
        k,
        rows,
        best,
        petty_target: n - k + 1,
        ceiling: BigInt::one() << (n - k),
    })
}

/// A ceiled bound as a machine integer, saturating.
pub fn ceiled_u64(value: &BigInt) -> u64 {
    value.to_u64().unwrap_or(u64::MAX)
}

/// Integers as decimal strings, like the rationals.
mod big_string {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn row(t: &BoundsTable, bound: Bound, ell: Option<usize>) -> BoundRow {
        t.rows
            .iter()
            .find(|r| r.bound == bound && r.ell == ell)
            .cloned()
            .unwrap()
    }

    #[test]
    fn codim_two_nine() {
        let t = bounds_table(9, 2).unwrap();
        let r = row(&t, Bound::OrthantSplit, Some(2));
        assert_eq!(r.raw, q(17, 2));
        assert_eq!(r.ceiled, BigInt::from(9));
        assert_eq!(t.petty_target, 8);
        let w = t.winner();
        assert_eq!((w.bound, w.ell), (Bound::OrthantSplit, Some(2)));
    }

    #[test]
    fn codim_three_fifteen() {
        let t = bounds_table(15, 3).unwrap();
        let r = row(&t, Bound::OrthantSplit, Some(2));
        assert_eq!(r.raw, q(49, 4));
        assert_eq!(r.ceiled, BigInt::from(13));
        assert_eq!(t.petty_target, 13);
    }

    #[test]
    fn hyperplane_four() {
        let t = bounds_table(4, 1).unwrap();
        let r = row(&t, Bound::SignWindows, None);
        assert_eq!(r.raw, q(8, 3));
        assert_eq!(r.ceiled, BigInt::from(3));
        assert_eq!(t.ceiling, BigInt::from(8));
        // bound 3 admits ell = 1 only: 1 + C(2, 1)
        assert_eq!(row(&t, Bound::BlockSums, Some(1)).raw, q(3, 1));
        assert!(Bound::BlockSums.formula(4, 1, 2).is_none());
    }

    #[test]
    fn rejects_bad_codimension() {
        assert!(bounds_table(3, 3).is_err());
        assert!(bounds_table(3, 0).is_err());
    }
}
