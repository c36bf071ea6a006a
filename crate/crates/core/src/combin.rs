//! Binomial coefficients and subset enumeration.

use num_bigint::BigUint;
use num_traits::One;

/// `C(n, r)` by the multiplicative formula.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, r)` as u128, saturating.
pub fn binomial_u128(n: u64, r: u64) -> u128 {
    u128::try_from(binomial(n, r)).unwrap_or(u128::MAX)
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, r: usize) -> Combinations {
    Combinations {
        n,
        current: if r <= n { Some((0..r).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let r = out.len();
        let mut next = out.clone();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - r + i {
                next[i] += 1;
                for j in i + 1..r {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

/// Nonempty subsets of `items` with at most `max_size` elements: grouped by
/// size, colexicographic within a size. Each subset lists its elements in the
/// order they appear in `items`.
pub fn subsets_up_to<T: Clone>(items: &[T], max_size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for size in 1..=max_size.min(items.len()) {
        let mut group: Vec<Vec<usize>> = combinations(items.len(), size).collect();
        group.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        out.extend(
            group
                .into_iter()
                .map(|idx| idx.into_iter().map(|i| items[i].clone()).collect()),
        );
    }
    out
}

/// `sum_{r=1}^{l} C(n, r)`.
pub fn binomial_prefix_sum(n: u64, l: u64) -> BigUint {
    (1..=l).map(|r| binomial(n, r)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize, r: usize) -> BigUint {
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        row.get(r).cloned().unwrap_or_default()
    }

    #[test]
    fn binomial_agrees_with_pascal() {
        for n in 0..40 {
            for r in 0..=n + 1 {
                assert_eq!(binomial(n as u64, r as u64), pascal(n, r), "C({n},{r})");
            }
        }
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(5, 2).count(), 10);
        assert_eq!(combinations(4, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).count(), 0);
        let lex: Vec<_> = combinations(4, 2).collect();
        assert_eq!(lex[0], vec![0, 1]);
        assert_eq!(lex[5], vec![2, 3]);
    }

    #[test]
    fn subsets_colex_order() {
        let s = subsets_up_to(&[10, 20, 30], 2);
        assert_eq!(
            s,
            vec![
                vec![10],
                vec![20],
                vec![30],
                vec![10, 20],
                vec![10, 30],
                vec![20, 30]
            ]
        );
        assert_eq!(subsets_up_to(&[1, 2, 3, 4, 5, 6], 3).len(), 6 + 15 + 20);
    }
}
