//! Spreading matrices Phi = [Phi_{A_1}, ..., Phi_{A_L}] in generator and materialized form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ebf::{phase_modulus, LinearFormQ, PhaseSequence};
use crate::error::{Error, Result};
use crate::fp::{digit_table, PrimeModulus};
use crate::quadform::MatrixFamily;

/// Default cap on materialized phase entries (N * M).
pub const DEFAULT_MEM_BUDGET: usize = 1 << 22;

/// Environment variable overriding [`DEFAULT_MEM_BUDGET`].
pub const MEM_BUDGET_ENV: &str = "SPREADSEQ_MEM_BUDGET";

pub fn mem_budget() -> usize {
    std::env::var(MEM_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MEM_BUDGET)
}

/// Phi in generator form: column c of block k is the sequence of
/// (q/p) x A_k x^T + L_c(x), for c = 0..p^m - 1.
#[derive(Debug, Clone)]
pub struct SpreadingMatrix {
    family: MatrixFamily,
    h: usize,
    q: u32,
    digits: Vec<u8>,
    quad: Vec<Vec<u8>>,
}

impl SpreadingMatrix {
    pub fn new(family: MatrixFamily, h: usize) -> Result<Self> {
        let (p, m) = (family.p(), family.m());
        if h < 1 || h > m {
            return Err(Error::Precondition(format!("h = {h} must lie in 1..={m}")));
        }
        let q = phase_modulus(p, h)?;
        let digits = digit_table(p, m)?;
        let quad = family
            .members()
            .iter()
            .map(|a| {
                digits
                    .chunks_exact(m)
                    .map(|x| a.matrix().quadratic_form(x))
                    .collect()
            })
            .collect();
        Ok(SpreadingMatrix {
            family,
            h,
            q,
            digits,
            quad,
        })
    }

    pub fn pary(family: MatrixFamily) -> Result<Self> {
        Self::new(family, 1)
    }

    pub fn family(&self) -> &MatrixFamily {
        &self.family
    }

    pub fn p(&self) -> PrimeModulus {
        self.family.p()
    }

    pub fn m(&self) -> usize {
        self.family.m()
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of blocks L.
    pub fn blocks(&self) -> usize {
        self.family.len()
    }

    /// M = p^m.
    pub fn rows(&self) -> usize {
        self.quad[0].len()
    }

    /// N = L * p^m.
    pub fn cols(&self) -> usize {
        self.blocks() * self.rows()
    }

    /// x A_k x^T mod p for every x, indexed by the integer value of x.
    pub fn quadratic_phases(&self, block: usize) -> &[u8] {
        &self.quad[block]
    }

    pub(crate) fn digit_rows(&self) -> std::slice::ChunksExact<'_, u8> {
        self.digits.chunks_exact(self.m())
    }

    pub fn linear_form(&self, c: u64) -> Result<LinearFormQ> {
        LinearFormQ::new(c, self.h, self.m(), self.p())
    }

    /// L_c(x) for every x.
    pub(crate) fn linear_phases(&self, c: u64) -> Result<Vec<u32>> {
        let l = self.linear_form(c)?;
        Ok(self.digit_rows().map(|x| l.eval_digits(x)).collect())
    }

    pub fn column(&self, block: usize, c: u64) -> Result<PhaseSequence> {
        if block >= self.blocks() {
            return Err(Error::Range(format!(
                "block {block} out of range for {} blocks",
                self.blocks()
            )));
        }
        let scale = self.q / self.p().get();
        let lin = self.linear_phases(c)?;
        let phases = self.quad[block]
            .iter()
            .zip(lin)
            .map(|(&v, l)| (scale * v as u32 + l) % self.q)
            .collect();
        Ok(PhaseSequence {
            phases,
            q: self.q,
            normalization: None,
        })
    }

    /// Every column, blocks in family order and c = 0..p^m - 1 within a block.
    pub fn materialize(&self, budget: usize) -> Result<PhaseMatrix> {
        let needed = self.cols().saturating_mul(self.rows());
        if needed > budget {
            return Err(Error::Capacity { needed, budget });
        }
        let m_rows = self.rows();
        let columns = (0..self.cols())
            .into_par_iter()
            .map(|k| self.column(k / m_rows, (k % m_rows) as u64))
            .collect::<Result<Vec<_>>>()?;
        Ok(PhaseMatrix {
            q: self.q,
            rows: m_rows,
            block_size: m_rows,
            columns,
        })
    }
}

/// Phi with every column held in memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatrix {
    pub q: u32,
    pub rows: usize,
    /// Columns per orthogonal block.
    pub block_size: usize,
    pub columns: Vec<PhaseSequence>,
}

impl PhaseMatrix {
    pub fn new(q: u32, rows: usize, block_size: usize, columns: Vec<PhaseSequence>) -> Result<Self> {
        if columns.is_empty() || rows == 0 {
            return Err(Error::Shape("phase matrix is empty".into()));
        }
        if block_size == 0 || !columns.len().is_multiple_of(block_size) {
            return Err(Error::Shape(format!(
                "{} columns do not split into blocks of {block_size}",
                columns.len()
            )));
        }
        if let Some(k) = columns.iter().position(|s| s.len() != rows || s.q != q) {
            return Err(Error::Shape(format!(
                "column {k} has length {} mod {}, expected {rows} mod {q}",
                columns[k].len(),
                columns[k].q
            )));
        }
        Ok(PhaseMatrix {
            q,
            rows,
            block_size,
            columns,
        })
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn blocks(&self) -> usize {
        self.columns.len() / self.block_size
    }

    pub fn block(&self, k: usize) -> &[PhaseSequence] {
        &self.columns[k * self.block_size..(k + 1) * self.block_size]
    }

    /// Phase at (row, col).
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.columns[col].phases[row]
    }

    /// Row-major phases.
    pub fn row_major(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.rows * self.cols());
        for r in 0..self.rows {
            out.extend(self.columns.iter().map(|c| c.phases[r]));
        }
        out
    }
}

/// ceil(N / M).
pub fn overloading_factor(phi: &SpreadingMatrix) -> usize {
    phi.cols().div_ceil(phi.rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ebf::{sequence_of, QuadraticEbfSpec};
    use crate::fp::Permutation;
    use crate::quadform::{psi, Provenance, PsiSpec};

    fn f(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn family(p: u32, specs: &[(Vec<usize>, Vec<u8>, Vec<u8>)]) -> MatrixFamily {
        let members = specs
            .iter()
            .map(|(pi, a, d)| {
                psi(
                    &PsiSpec::new(Permutation::new(pi.clone()).unwrap(), a.clone(), d.clone()),
                    f(p),
                )
                .unwrap()
            })
            .collect();
        MatrixFamily::new(members, Provenance::new("test")).unwrap()
    }

    #[test]
    fn columns_match_expanded_functions() {
        let fam = family(
            5,
            &[
                (vec![3, 1, 2], vec![2, 2], vec![0, 3, 4]),
                (vec![3, 1, 2], vec![2, 2], vec![1, 0, 1]),
            ],
        );
        for h in 1..=2 {
            let phi = SpreadingMatrix::new(fam.clone(), h).unwrap();
            for block in 0..2 {
                for c in [0u64, 1, 33, 124] {
                    let spec = QuadraticEbfSpec::new(
                        fam.members()[block].clone(),
                        phi.linear_form(c).unwrap(),
                    )
                    .unwrap();
                    let expected = sequence_of(&spec.to_ebf().unwrap()).unwrap();
                    assert_eq!(phi.column(block, c).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn smallest_case_is_3x3() {
        let fam = family(3, &[(vec![1], vec![], vec![1])]);
        let phi = SpreadingMatrix::pary(fam).unwrap();
        let pm = phi.materialize(DEFAULT_MEM_BUDGET).unwrap();
        assert_eq!((pm.rows, pm.cols()), (3, 3));
        // x^2 + c x
        for c in 0..3u32 {
            for x in 0..3u32 {
                assert_eq!(pm.get(x as usize, c as usize), (x * x + c * x) % 3);
            }
        }
        assert_eq!(overloading_factor(&phi), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let fam = family(3, &[(vec![1, 2], vec![1], vec![0, 0]), (vec![1, 2], vec![1], vec![1, 1])]);
        let phi = SpreadingMatrix::pary(fam).unwrap();
        assert_eq!(
            phi.materialize(100).unwrap_err(),
            Error::Capacity {
                needed: 162,
                budget: 100
            }
        );
        assert_eq!(phi.materialize(162).unwrap().cols(), 18);
        assert_eq!(overloading_factor(&phi), 2);
    }

    #[test]
    fn h_out_of_range() {
        let fam = family(3, &[(vec![1, 2], vec![1], vec![0, 0])]);
        assert!(matches!(
            SpreadingMatrix::new(fam.clone(), 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            SpreadingMatrix::new(fam, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn phase_matrix_validation() {
        let s = PhaseSequence::new(vec![0, 1, 2], 3).unwrap();
        let t = PhaseSequence::new(vec![0, 1], 3).unwrap();
        assert!(PhaseMatrix::new(3, 3, 1, vec![s.clone(), t]).is_err());
        assert!(PhaseMatrix::new(3, 3, 2, vec![s.clone()]).is_err());
        assert!(PhaseMatrix::new(3, 3, 1, vec![]).is_err());
        let pm = PhaseMatrix::new(3, 3, 1, vec![s.clone(), s]).unwrap();
        assert_eq!(pm.row_major(), vec![0, 0, 1, 1, 2, 2]);
    }
}
