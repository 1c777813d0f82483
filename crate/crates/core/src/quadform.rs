//! Path-structured quadratic matrices psi(pi, a, d) and their symplectic ranks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{rank_fp, MatrixFp, Permutation, PrimeModulus};

/// Parameters of psi(pi, a, d): a path along pi weighted by `a`, diagonal `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiSpec {
    pub pi: Permutation,
    pub a: Vec<u8>,
    pub d: Vec<u8>,
}

impl PsiSpec {
    pub fn new(pi: Permutation, a: Vec<u8>, d: Vec<u8>) -> Self {
        PsiSpec { pi, a, d }
    }

    pub fn m(&self) -> usize {
        self.pi.len()
    }

    /// Every path coefficient nonzero, i.e. psi lands in A_p.
    pub fn path_nonzero(&self, p: PrimeModulus) -> bool {
        self.a.iter().all(|&v| !(v as u32).is_multiple_of(p.get()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadMatrix {
    matrix: MatrixFp,
    spec: Option<PsiSpec>,
}

impl QuadMatrix {
    /// A raw square matrix with no psi provenance.
    pub fn raw(matrix: MatrixFp) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "quadratic matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(QuadMatrix { matrix, spec: None })
    }

    pub fn matrix(&self) -> &MatrixFp {
        &self.matrix
    }

    pub fn spec(&self) -> Option<&PsiSpec> {
        self.spec.as_ref()
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.matrix.modulus()
    }

    /// Membership in A_p, known only when provenance is present.
    pub fn in_ap(&self) -> bool {
        self.spec
            .as_ref()
            .is_some_and(|s| s.path_nonzero(self.modulus()))
    }
}

pub fn psi(spec: &PsiSpec, p: PrimeModulus) -> Result<QuadMatrix> {
    let m = spec.pi.len();
    if spec.d.len() != m {
        return Err(Error::Shape(format!(
            "d has {} entries, expected m = {m}",
            spec.d.len()
        )));
    }
    if spec.a.len() + 1 != m {
        return Err(Error::Shape(format!(
            "a has {} entries, expected m - 1 = {}",
            spec.a.len(),
            m - 1
        )));
    }
    let mut matrix = MatrixFp::zeros(m, m, p);
    for (i, &d) in spec.d.iter().enumerate() {
        matrix.set(i, i, p.reduce(d as i64));
    }
    for (k, &a) in spec.a.iter().enumerate() {
        let i = spec.pi.apply(k + 1) - 1;
        let j = spec.pi.apply(k + 2) - 1;
        matrix.set(i, j, p.reduce(a as i64));
    }
    let spec = PsiSpec {
        pi: spec.pi.clone(),
        a: spec.a.iter().map(|&v| p.reduce(v as i64)).collect(),
        d: spec.d.iter().map(|&v| p.reduce(v as i64)).collect(),
    };
    Ok(QuadMatrix {
        matrix,
        spec: Some(spec),
    })
}

/// Q = (A_i - A_j) + (A_i - A_j)^T with its F_p-rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticMatrix {
    matrix: MatrixFp,
    rank: usize,
}

impl SymplecticMatrix {
    pub fn matrix(&self) -> &MatrixFp {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

pub fn symplectic_q(ai: &QuadMatrix, aj: &QuadMatrix) -> Result<SymplecticMatrix> {
    let diff = ai.matrix.sub(&aj.matrix)?;
    let matrix = diff.add(&diff.transpose())?;
    let rank = rank_fp(&matrix);
    Ok(SymplecticMatrix { matrix, rank })
}

/// Which construction produced a family, with its parameters echoed as text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub params: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(construction: impl Into<String>) -> Self {
        Provenance {
            construction: construction.into(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }
}

/// An ordered set of quadratic matrices {A_1, ..., A_L}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFamily {
    p: PrimeModulus,
    m: usize,
    members: Vec<QuadMatrix>,
    provenance: Provenance,
}

impl MatrixFamily {
    pub fn new(members: Vec<QuadMatrix>, provenance: Provenance) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Shape("a family needs at least one matrix".into()))?;
        let (p, m) = (first.modulus(), first.m());
        if let Some(k) = members
            .iter()
            .position(|a| a.modulus() != p || a.m() != m)
        {
            return Err(Error::Shape(format!(
                "member {} is {}x{} over F_{}, expected {m}x{m} over F_{p}",
                k + 1,
                members[k].m(),
                members[k].m(),
                members[k].modulus()
            )));
        }
        Ok(MatrixFamily {
            p,
            m,
            members,
            provenance,
        })
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[QuadMatrix] {
        &self.members
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Symmetric L x L table of rank_p(Q_{i,j}); the diagonal is 0.
    pub fn rank_table(&self) -> Vec<Vec<usize>> {
        let l = self.len();
        let pairs: Vec<(usize, usize)> = (0..l)
            .flat_map(|i| (i + 1..l).map(move |j| (i, j)))
            .collect();
        let ranks: Vec<usize> = pairs
            .par_iter()
            .map(|&(i, j)| {
                symplectic_q(&self.members[i], &self.members[j])
                    .expect("family members share shape")
                    .rank()
            })
            .collect();
        let mut table = vec![vec![0; l]; l];
        for (&(i, j), r) in pairs.iter().zip(ranks) {
            table[i][j] = r;
            table[j][i] = r;
        }
        table
    }
}

/// Minimum pairwise symplectic rank over the family.
pub fn r_min(family: &MatrixFamily) -> Result<usize> {
    if family.len() < 2 {
        return Err(Error::InsufficientFamily(family.len()));
    }
    let table = family.rank_table();
    Ok((0..family.len())
        .flat_map(|i| (i + 1..family.len()).map(move |j| (i, j)))
        .map(|(i, j)| table[i][j])
        .min()
        .expect("at least one pair"))
}

/// rank_p(A + A^T) >= m - 1 for A in A_p.
pub fn verify_rank_lower_bound(a: &QuadMatrix) -> Result<bool> {
    let spec = a
        .spec()
        .ok_or_else(|| Error::Precondition("matrix has no psi provenance".into()))?;
    if let Some(k) = spec.a.iter().position(|&v| v == 0) {
        return Err(Error::Precondition(format!("a[{}] is zero", k + 1)));
    }
    let sym = a.matrix.add(&a.matrix.transpose())?;
    Ok(rank_fp(&sym) + 1 >= a.m())
}
