//! Seeded random instances for tests and the `gen` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Mat;
use crate::norm::PerturbedNorm;
use crate::polytope::PolytopeSpec;
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries in `{-4..4}` with occasional halves and thirds.
fn entry(r: &mut ChaCha8Rng) -> Rational {
    let num = r.random_range(-4i64..=4);
    let den = match r.random_range(0..6) {
        0 => 2,
        1 => 3,
        _ => 1,
    };
    Rational::new(num, den)
}

/// A full-row-rank `k x n` spec.
pub fn random_spec(k: usize, n: usize, seed: u64) -> SubspaceSpec {
    assert!(0 < k && k < n, "need 0 < k < n");
    let mut r = rng(seed);
    loop {
        let rows: Vec<Vec<Rational>> = (0..k).map(|_| (0..n).map(|_| entry(&mut r)).collect()).collect();
        if let Ok(s) = SubspaceSpec::from_rows(rows) {
            return s;
        }
    }
}

/// A spec of full rank whose columns are mostly zero or repeated: `k`
/// independent columns at random positions, every other column zero or a
/// small multiple of the first of them (zero only when `k = 1`). Such specs
/// force the block pivot into its rank-dropping recursion.
pub fn degenerate_spec(k: usize, n: usize, seed: u64) -> SubspaceSpec {
    assert!(0 < k && k < n, "need 0 < k < n");
    let mut r = rng(seed);
    loop {
        let mut positions: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            positions.swap(i, r.random_range(0..=i));
        }
        let basis_pos = &positions[..k];
        let basis: Vec<Vec<Rational>> = (0..k).map(|_| (0..k).map(|_| entry(&mut r)).collect()).collect();
        let mut cols = vec![vec![Rational::zero(); k]; n];
        for (b, &p) in basis.iter().zip(basis_pos) {
            cols[p] = b.clone();
        }
        for &p in &positions[k..] {
            let factor = if k == 1 {
                0
            } else {
                [0, 0, 1, -1, 2][r.random_range(0..5)]
            };
            let f = Rational::from_int(factor);
            cols[p] = basis[0].iter().map(|v| v * &f).collect();
        }
        if let Ok(a) = Mat::from_columns(&cols) {
            if let Ok(s) = SubspaceSpec::validate(a) {
                return s;
            }
        }
    }
}

/// `f` facet pairs in `R^d` with small integer normals, spanning `R^d`, no
/// two equal or opposite.
pub fn random_polytope(d: usize, f: usize, seed: u64) -> PolytopeSpec {
    assert!(d >= 1 && f >= d, "need f >= d >= 1");
    let mut r = rng(seed);
    loop {
        let mut normals: Vec<Vec<Rational>> = Vec::with_capacity(f);
        while normals.len() < f {
            let u: Vec<Rational> = (0..d).map(|_| Rational::from_int(r.random_range(-3i64..=3))).collect();
            let neg: Vec<Rational> = u.iter().map(|x| -x).collect();
            if u.iter().all(Rational::is_zero) || normals.iter().any(|v| *v == u || *v == neg) {
                continue;
            }
            normals.push(u);
        }
        let p = PolytopeSpec { d, normals };
        if p.normal_matrix().map(|m| m.rank() == d).unwrap_or(false) && p.validate().is_ok() {
            return p;
        }
    }
}

/// A weighted Chebyshev norm with weights drawn from `[1/(1+c), 1]` on a grid
/// of 64 steps, so the sandwich with constant `c` holds on all of `R^n`.
pub fn weighted_norm(n: usize, c: Rational, seed: u64) -> PerturbedNorm {
    let mut r = rng(seed);
    let low = (Rational::one() + &c).recip();
    let span = Rational::one() - &low;
    let weights = (0..n)
        .map(|_| &low + &span * &Rational::new(r.random_range(0..=64i64), 64))
        .collect();
    PerturbedNorm::weighted(weights, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_valid() {
        assert_eq!(random_spec(2, 7, 3), random_spec(2, 7, 3));
        assert_ne!(random_spec(2, 7, 3), random_spec(2, 7, 4));
        for seed in 0..10 {
            let s = degenerate_spec(2, 8, seed);
            assert_eq!(s.matrix().rank(), 2);
            let p = random_polytope(4, 6, seed);
            assert!(p.validate().is_ok());
            let w = weighted_norm(5, Rational::new(1, 5), seed);
            assert_eq!(w.weights_within_sandwich(), Some(true));
        }
    }
}
