//! JSON and CSV exports of a materialized spreading matrix.
//!
//! Phases are exact integers k standing for omega_q^k. JSON carries the
//! generating matrices and is self-describing; CSV holds one column per
//! sequence and needs q supplied by the reader.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::analysis::{mem_budget, PhaseMatrix, SpreadingMatrix};
use crate::ebf::{phase_modulus, PhaseSequence};
use crate::error::{Error, Result};
use crate::fp::{MatrixFp, PrimeModulus};
use crate::quadform::{MatrixFamily, Provenance, QuadMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportBlock {
    pub matrix: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<u8>>,
    /// Half-open range of the linear-form index c.
    pub linear_forms_range: [u64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportDoc {
    pub p: u32,
    pub m: usize,
    pub q: u32,
    pub h: usize,
    pub construction: Provenance,
    pub blocks: Vec<ExportBlock>,
    pub rows: usize,
    pub cols: usize,
    /// Row-major: phases[r * cols + c].
    pub phases: Vec<u32>,
    /// Amplitude applied to every entry: 1 or M^(-1/2).
    pub normalization: f64,
}

fn field(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::parse(format!("field {}", path.into()), msg)
}

impl ExportDoc {
    pub fn from_spreading(phi: &SpreadingMatrix, normalize: bool) -> Result<Self> {
        let pm = phi.materialize(mem_budget())?;
        let size = phi.rows() as u64;
        let blocks = phi
            .family()
            .members()
            .iter()
            .map(|a| ExportBlock {
                matrix: a.matrix().to_rows(),
                pi: a.spec().map(|s| s.pi.as_slice().to_vec()),
                a: a.spec().map(|s| s.a.clone()),
                d: a.spec().map(|s| s.d.clone()),
                linear_forms_range: [0, size],
            })
            .collect();
        Ok(ExportDoc {
            p: phi.p().get(),
            m: phi.m(),
            q: phi.q(),
            h: phi.h(),
            construction: phi.family().provenance().clone(),
            blocks,
            rows: pm.rows,
            cols: pm.cols(),
            phases: pm.row_major(),
            normalization: if normalize {
                1.0 / (pm.rows as f64).sqrt()
            } else {
                1.0
            },
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::parse("json", e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::parse("line 1, column 1", "empty input"));
        }
        let doc: ExportDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn read_json(mut r: impl Read) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)
            .map_err(|e| Error::parse("input", e.to_string()))?;
        Self::from_json(&s)
    }

    fn validate(&self) -> Result<()> {
        let p = PrimeModulus::new(self.p).map_err(|e| field("p", e.to_string()))?;
        let q = phase_modulus(p, self.h).map_err(|e| field("h", e.to_string()))?;
        if q != self.q {
            return Err(field("q", format!("q = {} but p^h = {q}", self.q)));
        }
        if self.h == 0 || self.h > self.m {
            return Err(field("h", format!("h = {} must lie in 1..={}", self.h, self.m)));
        }
        let rows = p.pow(self.m).map_err(|e| field("m", e.to_string()))? as usize;
        if self.rows != rows {
            return Err(field("rows", format!("rows = {} but p^m = {rows}", self.rows)));
        }
        if self.blocks.is_empty() || self.cols != self.blocks.len() * rows {
            return Err(field(
                "cols",
                format!("cols = {} but {} blocks of {rows}", self.cols, self.blocks.len()),
            ));
        }
        for (k, b) in self.blocks.iter().enumerate() {
            if b.matrix.len() != self.m || b.matrix.iter().any(|r| r.len() != self.m) {
                return Err(field(format!("blocks[{k}].matrix"), format!("expected {0}x{0}", self.m)));
            }
            if let Some(pi) = &b.pi {
                let mut s = pi.clone();
                s.sort_unstable();
                if s != (1..=self.m).collect::<Vec<_>>() {
                    return Err(field(format!("blocks[{k}].pi"), "not a permutation of 1..m"));
                }
            }
        }
        if self.phases.len() != rows * self.cols {
            return Err(field(
                "phases",
                format!("{} entries, expected {}", self.phases.len(), rows * self.cols),
            ));
        }
        if let Some(i) = self.phases.iter().position(|&v| v >= q) {
            return Err(field(format!("phases[{i}]"), format!("{} is not below q = {q}", self.phases[i])));
        }
        if !(self.normalization.is_finite() && self.normalization > 0.0) {
            return Err(field("normalization", "must be a positive number"));
        }
        Ok(())
    }

    pub fn phase_matrix(&self) -> Result<PhaseMatrix> {
        let columns = (0..self.cols)
            .map(|c| {
                let v = (0..self.rows).map(|r| self.phases[r * self.cols + c]).collect();
                PhaseSequence::new(v, self.q)
            })
            .collect::<Result<Vec<_>>>()?;
        PhaseMatrix::new(self.q, self.rows, self.rows, columns)
    }

    pub fn family(&self) -> Result<MatrixFamily> {
        let p = PrimeModulus::new(self.p)?;
        let members = self
            .blocks
            .iter()
            .map(|b| {
                let rows: Vec<Vec<i64>> = b
                    .matrix
                    .iter()
                    .map(|r| r.iter().map(|&v| v as i64).collect())
                    .collect();
                QuadMatrix::raw(MatrixFp::from_rows(&rows, p)?)
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixFamily::new(members, self.construction.clone())
    }

    /// pi(1) of every block, when the export records pi.
    pub fn leading_coordinates(&self) -> Option<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.pi.as_ref().map(|pi| pi[0]))
            .collect()
    }
}

fn column_name(block_size: usize, k: usize) -> String {
    format!("b{}c{}", k / block_size + 1, k % block_size)
}

/// One CSV column per sequence, header b<block>c<index>.
pub fn write_csv(pm: &PhaseMatrix, w: impl Write) -> Result<()> {
    let io = |e: csv::Error| Error::parse("csv", e.to_string());
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record((0..pm.cols()).map(|k| column_name(pm.block_size, k)))
        .map_err(io)?;
    for r in 0..pm.rows {
        wr.write_record(pm.columns.iter().map(|c| c.phases[r].to_string()))
            .map_err(io)?;
    }
    wr.flush().map_err(|e| Error::parse("csv", e.to_string()))
}

/// Parse a CSV export. Every column is one block of `block_size` columns
/// apart; pass `None` to take block_size = rows.
pub fn read_csv(r: impl Read, q: u32, block_size: Option<usize>) -> Result<PhaseMatrix> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rd
        .headers()
        .map_err(|e| Error::parse("line 1", e.to_string()))?
        .clone();
    if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::parse("line 1", "empty input"));
    }
    let cols = header.len();
    let mut columns = vec![Vec::new(); cols];
    for rec in rd.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(format!("line {line}"), e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        for (k, v) in rec.iter().enumerate() {
            let x: u32 = v.trim().parse().map_err(|_| {
                Error::parse(
                    format!("line {line}, field {}", k + 1),
                    format!("{v:?} is not a phase"),
                )
            })?;
            if x >= q {
                return Err(Error::parse(
                    format!("line {line}, field {}", k + 1),
                    format!("{x} is not below q = {q}"),
                ));
            }
            columns[k].push(x);
        }
    }
    let rows = columns[0].len();
    if rows == 0 {
        return Err(Error::parse("line 2", "no phase rows"));
    }
    let seqs = columns
        .into_iter()
        .map(|c| PhaseSequence::new(c, q))
        .collect::<Result<Vec<_>>>()?;
    PhaseMatrix::new(q, rows, block_size.unwrap_or(rows), seqs)
        .map_err(|e| Error::parse("csv", e.to_string()))
}
