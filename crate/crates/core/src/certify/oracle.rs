//! Brute-force optimum for the pivot searches, written against nothing but
//! [`Rational`] so that it can referee [`crate::pivot`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subspace::SubspaceSpec;

/// Refuse instances with more candidates than this.
pub const ORACLE_LIMIT: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMode {
    /// `k`-subsets of columns.
    Columns,
    /// `k` disjoint nonempty groups of at most `ell` columns, each with signs.
    OrthantSigma { ell: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOptimum {
    pub abs_det: Rational,
    /// First optimal configuration found: one column list per position.
    pub groups: Vec<Vec<usize>>,
    pub candidates: u128,
}

fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    match m.len() {
        0 => Rational::one(),
        1 => m[0][0].clone(),
        size => {
            let mut acc = Rational::zero();
            for c in 0..size {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][c] * &cofactor_det(&minor);
                if c % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

fn choose(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Exhaustive maximum of `|det|` for the given mode.
pub fn exhaustive_pivot_oracle(spec: &SubspaceSpec, mode: OracleMode) -> Result<OracleOptimum> {
    let (k, n) = (spec.k(), spec.n());
    let a = spec.matrix();
    let entry = |r: usize, c: usize| a.get(r, c).clone();
    match mode {
        OracleMode::Columns => {
            let candidates = choose(n as u128, k as u128);
            if candidates > ORACLE_LIMIT {
                return Err(Error::OracleRefused(format!("{candidates} column subsets")));
            }
            let mut best = (Rational::zero(), Vec::new());
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                let m: Vec<Vec<Rational>> = (0..k)
                    .map(|r| idx.iter().map(|&c| entry(r, c)).collect())
                    .collect();
                let d = cofactor_det(&m).abs();
                if d > best.0 {
                    best = (d, idx.clone());
                }
                // next combination in lex order
                let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
                    break;
                };
                idx[p] += 1;
                for q in p + 1..k {
                    idx[q] = idx[q - 1] + 1;
                }
            }
            Ok(OracleOptimum {
                abs_det: best.0,
                groups: best.1.into_iter().map(|c| vec![c]).collect(),
                candidates,
            })
        }
        OracleMode::OrthantSigma { ell } => {
            if ell == 0 {
                return Err(Error::Parameter("ell must be positive".into()));
            }
            let per_group: u128 = (1..=ell.min(n))
                .map(|r| choose(n as u128, r as u128) << r)
                .sum();
            let candidates = per_group.saturating_pow(k as u32);
            if candidates > ORACLE_LIMIT {
                return Err(Error::OracleRefused(format!("{candidates} signed group tuples")));
            }
            // every nonempty subset of size <= ell with every sign pattern, as a signed column sum
            let mut options: Vec<(u64, Vec<usize>, Vec<Rational>)> = Vec::new();
            for mask in 1u64..(1u64 << n) {
                let members: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
                if members.len() > ell {
                    continue;
                }
                for signs in 0u64..(1u64 << members.len()) {
                    let mut v = vec![Rational::zero(); k];
                    for (t, &c) in members.iter().enumerate() {
                        for (r, slot) in v.iter_mut().enumerate() {
                            if signs >> t & 1 == 1 {
                                *slot -= entry(r, c);
                            } else {
                                *slot += entry(r, c);
                            }
                        }
                    }
                    options.push((mask, members.clone(), v));
                }
            }
            let mut best = (Rational::zero(), Vec::new());
            let mut stack: Vec<usize> = Vec::new();
            search(&options, k, 0, &mut stack, &mut best);
            Ok(OracleOptimum {
                abs_det: best.0,
                groups: best.1,
                candidates,
            })
        }
    }
}

fn search(
    options: &[(u64, Vec<usize>, Vec<Rational>)],
    k: usize,
    used: u64,
    stack: &mut Vec<usize>,
    best: &mut (Rational, Vec<Vec<usize>>),
) {
    if stack.len() == k {
        let m: Vec<Vec<Rational>> = (0..k)
            .map(|r| stack.iter().map(|&o| options[o].2[r].clone()).collect())
            .collect();
        let d = cofactor_det(&m).abs();
        if d > best.0 {
            *best = (d, stack.iter().map(|&o| options[o].1.clone()).collect());
        }
        return;
    }
    for (o, (mask, _, _)) in options.iter().enumerate() {
        if mask & used != 0 {
            continue;
        }
        stack.push(o);
        search(options, k, used | mask, stack, best);
        stack.pop();
    }
}
