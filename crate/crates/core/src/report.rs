//! Analysis of a spreading matrix and verification of a materialized one.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    coherence_bruteforce, coherence_by_rank, coherence_naive, cs_check,
    find_orthogonality_violation, mem_budget, overloading_factor, papr_columns, papr_critical_set,
    papr_of_sequences, CoherenceReport, ColumnPair, PhaseMatrix, SpreadingMatrix,
};
use crate::ebf::PhaseSequence;
use crate::error::{Error, Result};
use crate::quadform::{MatrixFamily, Provenance};

/// Slack allowed above the PAPR bound for grid and float error.
pub const PAPR_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub oversample: usize,
    pub brute_force: bool,
    /// Materialize and check block orthogonality and the CS property.
    pub verify: bool,
    pub papr: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            oversample: crate::analysis::DEFAULT_OVERSAMPLE,
            brute_force: false,
            verify: false,
            papr: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaprSummary {
    pub set_max: f64,
    pub per_block: Vec<f64>,
    pub oversample: usize,
    /// Peak over the unrefined grid t = j/M, a lower estimate.
    pub critical_grid_max: f64,
    /// The complementary-set bound p.
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub orthogonal: bool,
    pub violation: Option<ColumnPair>,
    pub complementary_sets: bool,
    /// First column whose complementary set fails, as (block, index).
    pub cs_failure: Option<(usize, usize)>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.orthogonal && self.complementary_sets
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub construction: Provenance,
    pub p: u32,
    pub m: usize,
    pub h: usize,
    pub q: u32,
    /// Number of sequences N.
    pub n: usize,
    /// Sequence length M.
    pub len: usize,
    pub blocks: usize,
    pub overloading: usize,
    pub r_min: Option<usize>,
    pub rank_table: Vec<Vec<usize>>,
    pub coherence_rank: Option<CoherenceReport>,
    pub coherence_brute: Option<CoherenceReport>,
    /// Exact agreement of the two coherence values in squared form. Only
    /// compared for p-ary sets: a lifted set has no rank formula, and
    /// `coherence_rank` then describes its p-ary base.
    pub coherence_agree: Option<bool>,
    pub papr: Option<PaprSummary>,
    pub verification: Option<Verification>,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

impl AnalysisReport {
    /// The coherence from the most exact source available.
    pub fn mu(&self) -> Option<f64> {
        self.coherence_brute
            .as_ref()
            .or(self.coherence_rank.as_ref())
            .map(|c| c.mu)
    }

    pub fn passed(&self) -> bool {
        self.coherence_agree != Some(false)
            && self.papr.as_ref().is_none_or(|p| p.within_bound)
            && self.verification.as_ref().is_none_or(|v| v.passed())
    }
}

fn timed<T>(timings: &mut Vec<(String, Duration)>, name: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let v = f();
    timings.push((name.to_string(), t.elapsed()));
    v
}

pub fn agree(a: &CoherenceReport, b: &CoherenceReport) -> bool {
    match (a.max_inner_sq, b.max_inner_sq) {
        (Some(_), Some(_)) => a.same_squared(b),
        _ => (a.mu - b.mu).abs() < 1e-9,
    }
}

pub fn analyze(phi: &SpreadingMatrix, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let mut timings = Vec::new();
    let family = phi.family();
    let rank_table = timed(&mut timings, "ranks", || family.rank_table());
    let coherence_rank = if family.len() >= 2 {
        Some(timed(&mut timings, "coherence (rank)", || coherence_by_rank(family))?)
    } else {
        None
    };
    let coherence_brute = if opts.brute_force {
        Some(timed(&mut timings, "coherence (brute force)", || coherence_bruteforce(phi))?)
    } else {
        None
    };
    let coherence_agree = match (&coherence_rank, &coherence_brute) {
        (Some(a), Some(b)) if phi.h() == 1 => Some(agree(a, b)),
        _ => None,
    };
    let bound = phi.p().get() as f64;
    let papr = if opts.papr {
        let cols = timed(&mut timings, "papr", || papr_columns(phi, opts.oversample))?;
        let per_block: Vec<f64> = cols
            .chunks(phi.rows())
            .map(|b| b.iter().cloned().fold(0.0, f64::max))
            .collect();
        let set_max = per_block.iter().cloned().fold(0.0, f64::max);
        let critical_grid_max = timed(&mut timings, "papr (critical grid)", || papr_critical_set(phi))?;
        Some(PaprSummary {
            set_max,
            per_block,
            oversample: opts.oversample,
            critical_grid_max,
            bound,
            within_bound: set_max <= bound + PAPR_SLACK,
        })
    } else {
        None
    };
    let verification = if opts.verify {
        let pm = timed(&mut timings, "materialize", || phi.materialize(mem_budget()))?;
        let leads: Vec<usize> = family
            .members()
            .iter()
            .map(|a| a.spec().map_or(0, |s| s.pi.apply(1)))
            .collect();
        let leads = leads.iter().all(|&k| k > 0).then_some(leads);
        Some(timed(&mut timings, "verify", || {
            verify_structure(&pm, phi.p().get(), phi.m(), leads.as_deref())
        })?)
    } else {
        None
    };
    Ok(AnalysisReport {
        construction: family.provenance().clone(),
        p: phi.p().get(),
        m: phi.m(),
        h: phi.h(),
        q: phi.q(),
        n: phi.cols(),
        len: phi.rows(),
        blocks: phi.blocks(),
        overloading: overloading_factor(phi),
        r_min: coherence_rank.as_ref().and_then(|c| c.r_min),
        rank_table,
        coherence_rank,
        coherence_brute,
        coherence_agree,
        papr,
        verification,
        timings,
    })
}

/// The p sequences s + (q/p) n x_k, n = 0..p-1, with x_k the k-th digit of the row index.
pub fn cs_partners(s: &PhaseSequence, p: u32, m: usize, k: usize) -> Result<Vec<PhaseSequence>> {
    if k == 0 || k > m {
        return Err(Error::Range(format!("coordinate {k} is not in 1..={m}")));
    }
    let q = s.q;
    let step = q / p;
    let stride = (p as usize).pow(k as u32 - 1);
    (0..p)
        .map(|n| {
            let v = s
                .phases
                .iter()
                .enumerate()
                .map(|(x, &ph)| (ph + step * n * ((x / stride) as u32 % p)) % q)
                .collect();
            PhaseSequence::new(v, q)
        })
        .collect()
}

/// Block orthogonality and the complementary-set property of every column.
///
/// `leads` gives pi(1) per block. Without it every coordinate is tried and a
/// column passes if any of them completes it to a complementary set.
pub fn verify_structure(
    pm: &PhaseMatrix,
    p: u32,
    m: usize,
    leads: Option<&[usize]>,
) -> Result<Verification> {
    if (p as usize).checked_pow(m as u32) != Some(pm.rows) {
        return Err(Error::Shape(format!(
            "{} rows do not match p^m = {p}^{m}",
            pm.rows
        )));
    }
    if let Some(l) = leads {
        if l.len() != pm.blocks() {
            return Err(Error::Shape(format!(
                "{} leading coordinates for {} blocks",
                l.len(),
                pm.blocks()
            )));
        }
    }
    let violation = find_orthogonality_violation(pm);
    let bs = pm.block_size;
    let failure = (0..pm.cols()).into_par_iter().find_first(|&c| {
        let s = &pm.columns[c];
        let candidates: Vec<usize> = match leads {
            Some(l) => vec![l[c / bs]],
            None => (1..=m).collect(),
        };
        !candidates.into_iter().any(|k| {
            cs_partners(s, p, m, k)
                .map(|fam| cs_check(&fam))
                .unwrap_or(false)
        })
    });
    Ok(Verification {
        orthogonal: violation.is_none(),
        violation,
        complementary_sets: failure.is_none(),
        cs_failure: failure.map(|c| (c / bs, c % bs)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub structure: Verification,
    pub coherence: CoherenceReport,
    /// Rank-formula coherence when the generating matrices are known.
    pub coherence_rank: Option<CoherenceReport>,
    pub coherence_agree: Option<bool>,
    pub papr_max: f64,
    pub papr_bound: f64,
    pub papr_within_bound: bool,
    pub oversample: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.structure.passed() && self.papr_within_bound && self.coherence_agree != Some(false)
    }
}

/// Every check on an exported matrix: orthogonality, complementary sets,
/// exhaustive coherence and the PAPR bound.
pub fn verify_matrix(
    pm: &PhaseMatrix,
    p: u32,
    m: usize,
    leads: Option<&[usize]>,
    family: Option<&MatrixFamily>,
    oversample: usize,
) -> Result<VerifyReport> {
    let structure = verify_structure(pm, p, m, leads)?;
    let coherence = coherence_naive(pm)?;
    let coherence_rank = match family {
        Some(f) if f.len() >= 2 => Some(coherence_by_rank(f)?),
        _ => None,
    };
    let coherence_agree = coherence_rank
        .as_ref()
        .filter(|_| pm.q == p)
        .map(|r| agree(r, &coherence));
    let papr_max = papr_of_sequences(&pm.columns, oversample)?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(VerifyReport {
        structure,
        coherence,
        coherence_rank,
        coherence_agree,
        papr_max,
        papr_bound: p as f64,
        papr_within_bound: papr_max <= p as f64 + PAPR_SLACK,
        oversample,
    })
}
