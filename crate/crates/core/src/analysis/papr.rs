//! Peak-to-average power ratio of the multicarrier signal sum_k s_k e^{i 2 pi k t}.
//!
//! Values use the power ratio max_t |S(t)|^2 / sum_k |s_k|^2. The maximum is
//! taken over an oversampled grid (one inverse FFT) and then refined by
//! ternary search around the highest local maxima of the grid.
//!
//! [`papr_critical`] reports the peak over the M-point DFT grid t = j/M only.
//! It underestimates the continuous maximum.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::ebf::PhaseSequence;
use crate::error::{Error, Result};

use super::histogram::root_table;
use super::spreading::SpreadingMatrix;

pub const DEFAULT_OVERSAMPLE: usize = 128;
pub const MIN_OVERSAMPLE: usize = 4;
const REFINE_ITERS: usize = 40;
const REFINE_PEAKS: usize = 4;

/// A reusable PAPR evaluator for sequences of one length and phase modulus.
pub struct PaprEstimator {
    len: usize,
    oversample: usize,
    roots: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
}

impl PaprEstimator {
    pub fn new(len: usize, q: u32, oversample: usize) -> Result<Self> {
        if oversample < MIN_OVERSAMPLE {
            return Err(Error::Precondition(format!(
                "oversample = {oversample} is below {MIN_OVERSAMPLE}"
            )));
        }
        if len == 0 {
            return Err(Error::Shape("empty sequence".into()));
        }
        Self::build(len, q, oversample)
    }

    /// Samples t = j/M only; [`PaprEstimator::grid`] is then the critical-grid peak.
    pub fn critical(len: usize, q: u32) -> Result<Self> {
        if len == 0 {
            return Err(Error::Shape("empty sequence".into()));
        }
        Self::build(len, q, 1)
    }

    fn build(len: usize, q: u32, oversample: usize) -> Result<Self> {
        let fft = FftPlanner::new().plan_fft_inverse(len * oversample);
        Ok(PaprEstimator {
            len,
            oversample,
            roots: root_table(q),
            fft,
        })
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    fn check(&self, s: &PhaseSequence) -> Result<()> {
        if s.len() != self.len || s.q as usize != self.roots.len() {
            return Err(Error::Shape(format!(
                "estimator built for length {} mod {}, got length {} mod {}",
                self.len,
                self.roots.len(),
                s.len(),
                s.q
            )));
        }
        Ok(())
    }

    fn grid_power(&self, s: &PhaseSequence) -> Vec<f64> {
        let n = self.len * self.oversample;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (b, &ph) in buf.iter_mut().zip(&s.phases) {
            *b = self.roots[ph as usize];
        }
        self.fft.process(&mut buf);
        buf.iter().map(|z| z.norm_sqr()).collect()
    }

    fn power_at(&self, s: &PhaseSequence, t: f64) -> f64 {
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU * t);
        s.phases
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &ph| acc * z + self.roots[ph as usize])
            .norm_sqr()
    }

    /// Grid maximum only, with no refinement.
    pub fn grid(&self, s: &PhaseSequence) -> Result<f64> {
        self.check(s)?;
        let g = self.grid_power(s);
        Ok(g.iter().cloned().fold(0.0, f64::max) / self.len as f64)
    }

    pub fn estimate(&self, s: &PhaseSequence) -> Result<f64> {
        self.check(s)?;
        let g = self.grid_power(s);
        let n = g.len();
        let mut peaks: Vec<usize> = (0..n)
            .filter(|&j| g[j] >= g[(j + n - 1) % n] && g[j] >= g[(j + 1) % n])
            .collect();
        peaks.sort_by(|&a, &b| g[b].total_cmp(&g[a]).then(a.cmp(&b)));
        peaks.truncate(REFINE_PEAKS);
        let step = 1.0 / n as f64;
        let mut best = g.iter().cloned().fold(0.0, f64::max);
        for j in peaks {
            let (mut lo, mut hi) = ((j as f64 - 1.0) * step, (j as f64 + 1.0) * step);
            for _ in 0..REFINE_ITERS {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if self.power_at(s, m1) < self.power_at(s, m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            best = best.max(self.power_at(s, 0.5 * (lo + hi)));
        }
        Ok(best / self.len as f64)
    }
}

pub fn papr_estimate(s: &PhaseSequence, oversample: usize) -> Result<f64> {
    PaprEstimator::new(s.len(), s.q, oversample)?.estimate(s)
}

/// The unrefined grid component of [`papr_estimate`].
pub fn papr_grid(s: &PhaseSequence, oversample: usize) -> Result<f64> {
    PaprEstimator::new(s.len(), s.q, oversample)?.grid(s)
}

/// max_j |S(j/M)|^2 / M over the critically sampled grid.
pub fn papr_critical(s: &PhaseSequence) -> Result<f64> {
    PaprEstimator::critical(s.len(), s.q)?.grid(s)
}

/// [`papr_critical`] maximized over every column.
pub fn papr_critical_set(phi: &SpreadingMatrix) -> Result<f64> {
    let est = PaprEstimator::critical(phi.rows(), phi.q())?;
    let rows = phi.rows();
    let all: Vec<f64> = (0..phi.cols())
        .into_par_iter()
        .map(|k| est.grid(&phi.column(k / rows, (k % rows) as u64)?))
        .collect::<Result<_>>()?;
    Ok(all.into_iter().fold(0.0, f64::max))
}

/// papr_estimate of every column, blocks in order.
pub fn papr_columns(phi: &SpreadingMatrix, oversample: usize) -> Result<Vec<f64>> {
    let est = PaprEstimator::new(phi.rows(), phi.q(), oversample)?;
    let rows = phi.rows();
    (0..phi.cols())
        .into_par_iter()
        .map(|k| est.estimate(&phi.column(k / rows, (k % rows) as u64)?))
        .collect()
}

/// Maximum PAPR inside each block.
pub fn papr_per_block(phi: &SpreadingMatrix, oversample: usize) -> Result<Vec<f64>> {
    let all = papr_columns(phi, oversample)?;
    Ok(all
        .chunks(phi.rows())
        .map(|b| b.iter().cloned().fold(0.0, f64::max))
        .collect())
}

/// PAPR(Phi): the maximum over all columns.
pub fn papr_set(phi: &SpreadingMatrix, oversample: usize) -> Result<f64> {
    Ok(papr_columns(phi, oversample)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// The same maximum for an arbitrary list of equal-shape sequences.
pub fn papr_of_sequences(seqs: &[PhaseSequence], oversample: usize) -> Result<Vec<f64>> {
    let first = seqs
        .first()
        .ok_or_else(|| Error::Shape("no sequences".into()))?;
    let est = PaprEstimator::new(first.len(), first.q, oversample)?;
    seqs.par_iter().map(|s| est.estimate(s)).collect()
}
