//! Coherence of a spreading matrix: by exhaustive inner products or from r_min.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadform::{r_min, MatrixFamily};

use super::histogram::{root_table, ExponentHistogram};
use super::spreading::{PhaseMatrix, SpreadingMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoherenceMethod {
    RankFormula,
    BruteForce,
}

/// Two columns, each as (block, c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnPair {
    pub block_i: usize,
    pub col_i: usize,
    pub block_j: usize,
    pub col_j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub mu: f64,
    /// max |<s_i, s_j>|^2 over distinct columns, when it is a rational integer.
    pub max_inner_sq: Option<u64>,
    /// Sequence length M; mu^2 = max_inner_sq / M^2.
    pub rows: usize,
    pub r_min: Option<usize>,
    pub method: CoherenceMethod,
    pub worst_pair: Option<ColumnPair>,
}

impl CoherenceReport {
    /// Exact equality of mu^2 between two reports.
    pub fn same_squared(&self, other: &CoherenceReport) -> bool {
        match (self.max_inner_sq, other.max_inner_sq) {
            (Some(a), Some(b)) => {
                a as u128 * (other.rows as u128).pow(2) == b as u128 * (self.rows as u128).pow(2)
            }
            _ => false,
        }
    }
}

struct Candidate {
    norm_sqr: f64,
    hist: ExponentHistogram,
    pair: ColumnPair,
}

fn best(cands: impl IntoIterator<Item = Candidate>) -> Option<Candidate> {
    let mut top: Option<Candidate> = None;
    for c in cands {
        if top.as_ref().is_none_or(|t| c.norm_sqr > t.norm_sqr + 1e-9) {
            top = Some(c);
        }
    }
    top
}

fn report_from(best: Option<Candidate>, rows: usize, method: CoherenceMethod) -> CoherenceReport {
    match best {
        Some(c) => {
            let exact = c.hist.exact_norm_sqr().as_integer();
            let sq = exact.map_or(c.norm_sqr, |v| v as f64);
            CoherenceReport {
                mu: sq.sqrt() / rows as f64,
                max_inner_sq: exact.map(|v| v as u64),
                rows,
                r_min: None,
                method,
                worst_pair: Some(c.pair),
            }
        }
        None => CoherenceReport {
            mu: 0.0,
            max_inner_sq: Some(0),
            rows,
            r_min: None,
            method,
            worst_pair: None,
        },
    }
}

fn norm_sqr_of(counts: &[u64], roots: &[num_complex::Complex64]) -> f64 {
    counts
        .iter()
        .zip(roots)
        .map(|(&c, &w)| w * c as f64)
        .sum::<num_complex::Complex64>()
        .norm_sqr()
}

/// Exhaustive coherence using the block structure.
///
/// The inner product of columns (i, c1) and (j, c2) depends only on A_i - A_j
/// and on the offset form L_{c1} - L_{c2}, which ranges over all L_c. Each
/// block pair therefore needs p^m sums of length M instead of p^{2m}.
pub fn coherence_bruteforce(phi: &SpreadingMatrix) -> Result<CoherenceReport> {
    if phi.cols() < 2 {
        return Err(Error::Precondition("coherence needs at least 2 columns".into()));
    }
    let l = phi.blocks();
    let rows = phi.rows();
    let q = phi.q();
    let scale = q / phi.p().get();
    let roots = root_table(q);
    let linear: Vec<Vec<u32>> = (0..rows as u64)
        .into_par_iter()
        .map(|c| phi.linear_phases(c))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..l).flat_map(|i| (i..l).map(move |j| (i, j))).collect();
    let per_pair: Vec<Option<Candidate>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let qi = phi.quadratic_phases(i);
            let qj = phi.quadratic_phases(j);
            let p = phi.p().get();
            let diff: Vec<u32> = qi
                .iter()
                .zip(qj)
                .map(|(&a, &b)| scale * ((a as u32 + p - b as u32) % p))
                .collect();
            let mut counts = vec![0u64; q as usize];
            let start = usize::from(i == j);
            let mut top: Option<(f64, usize)> = None;
            for (c, lin) in linear.iter().enumerate().skip(start) {
                counts.iter_mut().for_each(|v| *v = 0);
                for (&d, &lv) in diff.iter().zip(lin) {
                    counts[((d + lv) % q) as usize] += 1;
                }
                let n = norm_sqr_of(&counts, &roots);
                if top.is_none_or(|(t, _)| n > t + 1e-9) {
                    top = Some((n, c));
                }
            }
            top.map(|(n, c)| {
                let mut hist = ExponentHistogram::zero(q).expect("prime-power modulus");
                for (&d, &lv) in diff.iter().zip(&linear[c]) {
                    hist.push(d + lv);
                }
                Candidate {
                    norm_sqr: n,
                    hist,
                    pair: ColumnPair {
                        block_i: i,
                        col_i: c,
                        block_j: j,
                        col_j: 0,
                    },
                }
            })
        })
        .collect();
    Ok(report_from(
        best(per_pair.into_iter().flatten()),
        rows,
        CoherenceMethod::BruteForce,
    ))
}

/// Coherence over every pair of distinct columns, without structural shortcuts.
pub fn coherence_naive(phi: &PhaseMatrix) -> Result<CoherenceReport> {
    let n = phi.cols();
    if n < 2 {
        return Err(Error::Precondition("coherence needs at least 2 columns".into()));
    }
    let q = phi.q;
    let roots = root_table(q);
    let bs = phi.block_size;
    let per_col: Vec<Option<Candidate>> = (0..n - 1)
        .into_par_iter()
        .map(|a| {
            let mut counts = vec![0u64; q as usize];
            let sa = &phi.columns[a].phases;
            let mut top: Option<(f64, usize)> = None;
            for b in a + 1..n {
                counts.iter_mut().for_each(|v| *v = 0);
                for (&x, &y) in sa.iter().zip(&phi.columns[b].phases) {
                    counts[((x + q - y) % q) as usize] += 1;
                }
                let v = norm_sqr_of(&counts, &roots);
                if top.is_none_or(|(t, _)| v > t + 1e-9) {
                    top = Some((v, b));
                }
            }
            top.map(|(v, b)| {
                let mut hist = ExponentHistogram::zero(q).expect("prime-power modulus");
                for (&x, &y) in sa.iter().zip(&phi.columns[b].phases) {
                    hist.push(x + q - y);
                }
                Candidate {
                    norm_sqr: v,
                    hist,
                    pair: ColumnPair {
                        block_i: a / bs,
                        col_i: a % bs,
                        block_j: b / bs,
                        col_j: b % bs,
                    },
                }
            })
        })
        .collect();
    Ok(report_from(
        best(per_col.into_iter().flatten()),
        phi.rows,
        CoherenceMethod::BruteForce,
    ))
}

/// mu = p^(-r_min / 2) for the p-ary set of a family. This is not the
/// coherence of a q-ary lift with h >= 2, whose linear forms are not
/// characters of F_p^m; use [`coherence_bruteforce`] there.
pub fn coherence_by_rank(family: &MatrixFamily) -> Result<CoherenceReport> {
    let r = r_min(family)?;
    let p = family.p().get() as u64;
    let m = family.m();
    let rows = p.checked_pow(m as u32).map(|v| v as usize).unwrap_or(usize::MAX);
    let max_inner_sq = p.checked_pow((2 * m - r) as u32);
    Ok(CoherenceReport {
        mu: (p as f64).powf(-(r as f64) / 2.0),
        max_inner_sq,
        rows,
        r_min: Some(r),
        method: CoherenceMethod::RankFormula,
        worst_pair: None,
    })
}

/// First pair of distinct columns inside one block whose inner product is nonzero.
pub fn find_orthogonality_violation(phi: &PhaseMatrix) -> Option<ColumnPair> {
    let bs = phi.block_size;
    let q = phi.q;
    let tasks: Vec<(usize, usize)> = (0..phi.blocks())
        .flat_map(|k| (0..bs).map(move |a| (k, a)))
        .collect();
    tasks
        .par_iter()
        .find_map_first(|&(k, a)| {
            let block = phi.block(k);
            for b in a + 1..bs {
                let mut hist = ExponentHistogram::zero(q).ok()?;
                for (&x, &y) in block[a].phases.iter().zip(&block[b].phases) {
                    hist.push(x + q - y);
                }
                if !hist.is_zero_sum() {
                    return Some(ColumnPair {
                        block_i: k,
                        col_i: a,
                        block_j: k,
                        col_j: b,
                    });
                }
            }
            None
        })
}
