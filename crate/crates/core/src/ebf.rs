//! Extended Boolean functions and the phase sequences they generate.
//!
//! A function here has the shape
//!
//! ```text
//! f(x) = (q/p) * P(x) + L(x) + c0   (mod q),   q = p^h
//! ```
//!
//! where `P` is a polynomial over F_p with exponents below p, `L` is an optional
//! q-ary linear form and `c0` a constant in Z_q. With h = 1 and no linear form
//! this is the plain p-ary EBF; the lifted shape is the only one the q-ary
//! sequence families need.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{fill_digits, DigitVector, PrimeModulus};
use crate::quadform::QuadMatrix;

/// Upper bound on the phase modulus q = p^h.
pub const MAX_PHASE_MODULUS: u64 = 1 << 31;

/// q = p^h, checked against the largest supported alphabet.
pub fn phase_modulus(p: PrimeModulus, h: usize) -> Result<u32> {
    if h == 0 {
        return Err(Error::Precondition("h must be at least 1".into()));
    }
    match p.pow(h) {
        Ok(q) if q <= MAX_PHASE_MODULUS => Ok(q as u32),
        _ => Err(Error::Range(format!(
            "phase modulus {p}^{h} exceeds {MAX_PHASE_MODULUS}"
        ))),
    }
}

/// The q-ary linear form L_c used by the lifted sequence families.
///
/// With c = d + sum_{i>h} v_i p^(i-1), d in Z_q and v_i in Z_p,
/// L_c(x) = (q/p) * sum_{i>h} v_i x_i + d * sum_{i<=h} x_i p^(i-1)  (mod q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormQ {
    p: PrimeModulus,
    m: usize,
    h: usize,
    q: u32,
    c: u64,
    d_lin: u32,
    v: Vec<u8>,
}

impl LinearFormQ {
    pub fn new(c: u64, h: usize, m: usize, p: PrimeModulus) -> Result<Self> {
        if h < 1 || h > m {
            return Err(Error::Precondition(format!("h = {h} must lie in 1..={m}")));
        }
        let q = phase_modulus(p, h)?;
        let size = p.pow(m)?;
        if c >= size {
            return Err(Error::Range(format!("c = {c} is not below {p}^{m} = {size}")));
        }
        let d_lin = (c % q as u64) as u32;
        let mut digits = vec![0u8; m];
        fill_digits(c, p, &mut digits);
        Ok(LinearFormQ {
            p,
            m,
            h,
            q,
            c,
            d_lin,
            v: digits[h..].to_vec(),
        })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    /// The Z_q part d of the decomposition.
    pub fn d_lin(&self) -> u32 {
        self.d_lin
    }

    /// v_{h+1}, ..., v_m.
    pub fn v(&self) -> &[u8] {
        &self.v
    }

    /// Reassembles c from (d, v).
    pub fn recompose(&self) -> u64 {
        let pp = self.p.get() as u64;
        let mut weight = self.q as u64;
        let mut c = self.d_lin as u64;
        for &vi in &self.v {
            c += vi as u64 * weight;
            weight *= pp;
        }
        c
    }

    #[inline]
    pub(crate) fn eval_digits(&self, x: &[u8]) -> u32 {
        let q = self.q as u64;
        let pp = self.p.get() as u64;
        let mut low = 0u64;
        let mut weight = 1u64;
        for &xi in &x[..self.h] {
            low += xi as u64 * weight;
            weight *= pp;
        }
        let high: u64 = self.v.iter().zip(&x[self.h..]).map(|(&v, &xi)| v as u64 * xi as u64).sum();
        let scale = q / pp;
        ((scale * (high % pp) + self.d_lin as u64 * low) % q) as u32
    }

    pub fn eval(&self, x: &DigitVector) -> Result<u32> {
        if x.len() != self.m {
            return Err(Error::Shape(format!("x has {} digits, expected {}", x.len(), self.m)));
        }
        Ok(self.eval_digits(x.digits()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ebf {
    m: usize,
    p: PrimeModulus,
    h: usize,
    q: u32,
    terms: BTreeMap<Vec<u8>, u8>,
    linear: Option<LinearFormQ>,
    constant: u32,
}

impl Ebf {
    /// The zero function F_p^m -> F_p.
    pub fn new(m: usize, p: PrimeModulus) -> Self {
        Ebf {
            m,
            p,
            h: 1,
            q: p.get(),
            terms: BTreeMap::new(),
            linear: None,
            constant: 0,
        }
    }

    /// The zero function F_p^m -> Z_{p^h}.
    pub fn lifted(m: usize, p: PrimeModulus, h: usize) -> Result<Self> {
        if h < 1 || h > m {
            return Err(Error::Precondition(format!("h = {h} must lie in 1..={m}")));
        }
        let q = phase_modulus(p, h)?;
        Ok(Ebf {
            q,
            h,
            ..Ebf::new(m, p)
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Nonzero monomials: exponent vector -> coefficient in F_p.
    pub fn terms(&self) -> &BTreeMap<Vec<u8>, u8> {
        &self.terms
    }

    pub fn linear(&self) -> Option<&LinearFormQ> {
        self.linear.as_ref()
    }

    pub fn constant(&self) -> u32 {
        self.constant
    }

    /// Adds `coeff * prod x_i^{b_i}` to the polynomial part.
    pub fn add_term(&mut self, exponents: &[u8], coeff: i64) -> Result<&mut Self> {
        if exponents.len() != self.m {
            return Err(Error::Shape(format!(
                "exponent vector has {} entries, expected {}",
                exponents.len(),
                self.m
            )));
        }
        if let Some(k) = exponents.iter().position(|&b| b as u32 >= self.p.get()) {
            return Err(Error::Range(format!(
                "exponent b_{} = {} is not below p = {}",
                k + 1,
                exponents[k],
                self.p
            )));
        }
        let c = self.p.reduce(coeff);
        let entry = self.terms.entry(exponents.to_vec()).or_insert(0);
        *entry = self.p.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(exponents);
        }
        Ok(self)
    }

    /// `coeff * x_i * x_j` (1-indexed, i may equal j).
    pub fn add_product(&mut self, i: usize, j: usize, coeff: i64) -> Result<&mut Self> {
        let mut e = vec![0u8; self.m];
        e[i - 1] += 1;
        e[j - 1] += 1;
        self.add_term(&e, coeff)
    }

    /// `coeff * x_k^t` (1-indexed).
    pub fn add_power(&mut self, k: usize, t: u8, coeff: i64) -> Result<&mut Self> {
        let mut e = vec![0u8; self.m];
        e[k - 1] = t;
        self.add_term(&e, coeff)
    }

    pub fn set_linear_form(&mut self, linear: LinearFormQ) -> Result<&mut Self> {
        if linear.m() != self.m || linear.h() != self.h || linear.p != self.p {
            return Err(Error::Shape(format!(
                "linear form over (m={}, h={}) does not match function over (m={}, h={})",
                linear.m(),
                linear.h(),
                self.m,
                self.h
            )));
        }
        self.linear = Some(linear);
        Ok(self)
    }

    pub fn set_constant(&mut self, c: i64) -> &mut Self {
        self.constant = c.rem_euclid(self.q as i64) as u32;
        self
    }

    /// Highest total degree among the polynomial terms.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&b| b as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn eval_digits(&self, x: &[u8]) -> u32 {
        let p = self.p.get();
        let mut poly = 0u32;
        for (exps, &coeff) in &self.terms {
            let mut mono = coeff as u32;
            for (&xi, &b) in x.iter().zip(exps) {
                for _ in 0..b {
                    mono = mono * xi as u32 % p;
                }
                if mono == 0 {
                    break;
                }
            }
            poly = (poly + mono) % p;
        }
        let q = self.q as u64;
        let mut acc = (q / p as u64) * poly as u64 + self.constant as u64;
        if let Some(l) = &self.linear {
            acc += l.eval_digits(x) as u64;
        }
        (acc % q) as u32
    }

    pub fn eval(&self, x: &DigitVector) -> Result<u32> {
        if x.len() != self.m || x.modulus() != self.p {
            return Err(Error::Shape(format!(
                "x has {} digits over F_{}, expected {} over F_{}",
                x.len(),
                x.modulus(),
                self.m,
                self.p
            )));
        }
        Ok(self.eval_digits(x.digits()))
    }
}

/// A quadratic function (q/p) * x A x^T + L_c(x) + c0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticEbfSpec {
    pub matrix: QuadMatrix,
    pub linear: LinearFormQ,
    pub constant: u32,
}

impl QuadraticEbfSpec {
    pub fn new(matrix: QuadMatrix, linear: LinearFormQ) -> Result<Self> {
        if matrix.m() != linear.m() {
            return Err(Error::Shape(format!(
                "matrix is {}x{} but the linear form has m = {}",
                matrix.m(),
                matrix.m(),
                linear.m()
            )));
        }
        Ok(QuadraticEbfSpec {
            matrix,
            linear,
            constant: 0,
        })
    }

    pub fn q(&self) -> u32 {
        self.linear.q()
    }

    /// Expands into monomial form.
    pub fn to_ebf(&self) -> Result<Ebf> {
        let a = self.matrix.matrix();
        let m = self.matrix.m();
        let mut f = Ebf::lifted(m, a.modulus(), self.linear.h())?;
        for i in 0..m {
            f.add_product(i + 1, i + 1, a.get(i, i) as i64)?;
            for j in i + 1..m {
                f.add_product(i + 1, j + 1, a.get(i, j) as i64 + a.get(j, i) as i64)?;
            }
        }
        f.set_linear_form(self.linear.clone())?;
        f.set_constant(self.constant as i64);
        Ok(f)
    }

    /// Evaluates straight from the matrix, without expanding.
    pub fn eval_direct(&self, x: &[u8]) -> u32 {
        let q = self.q() as u64;
        let p = self.matrix.modulus().get() as u64;
        let quad = self.matrix.matrix().quadratic_form(x) as u64;
        ((q / p) * quad + self.linear.eval_digits(x) as u64 + self.constant as u64) as u32
            % self.q()
    }
}

/// Phases f(0), ..., f(p^m - 1) of a q-ary sequence; entry k stands for omega_q^k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSequence {
    pub phases: Vec<u32>,
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<f64>,
}

impl PhaseSequence {
    pub fn new(phases: Vec<u32>, q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::Range(format!("phase modulus q = {q} must be at least 2")));
        }
        if let Some(k) = phases.iter().position(|&v| v >= q) {
            return Err(Error::Range(format!(
                "phase[{k}] = {} is not below q = {q}",
                phases[k]
            )));
        }
        Ok(PhaseSequence {
            phases,
            q,
            normalization: None,
        })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

pub fn sequence_of(f: &Ebf) -> Result<PhaseSequence> {
    let size = f.p.pow(f.m)? as usize;
    let mut x = vec![0u8; f.m];
    let phases = (0..size)
        .map(|i| {
            fill_digits(i as u64, f.p, &mut x);
            f.eval_digits(&x)
        })
        .collect();
    Ok(PhaseSequence {
        phases,
        q: f.q,
        normalization: None,
    })
}

/// The p functions
/// f_n = sum_i a_i x_{pi(i)} x_{pi(i+1)} + sum_{t,k} c_{t,k} x_k^t + n x_{pi(1)}.
///
/// `c_coeffs[t-1][k-1]` holds c_{t,k} for t = 1..p-1; pass an empty slice for
/// all-zero single-variable terms.
pub fn cs_family_pary(
    p: PrimeModulus,
    pi: &crate::fp::Permutation,
    a: &[u8],
    c_coeffs: &[Vec<u8>],
) -> Result<Vec<Ebf>> {
    let m = pi.len();
    if a.len() + 1 != m {
        return Err(Error::Shape(format!(
            "a has {} entries, expected m - 1 = {}",
            a.len(),
            m - 1
        )));
    }
    if let Some(i) = a.iter().position(|&v| (v as u32).is_multiple_of(p.get())) {
        return Err(Error::Precondition(format!("a[{}] must be nonzero", i + 1)));
    }
    if !c_coeffs.is_empty() && c_coeffs.len() != p.get() as usize - 1 {
        return Err(Error::Shape(format!(
            "expected {} rows of single-variable coefficients, got {}",
            p.get() - 1,
            c_coeffs.len()
        )));
    }
    let mut base = Ebf::new(m, p);
    for (i, &ai) in a.iter().enumerate() {
        base.add_product(pi.apply(i + 1), pi.apply(i + 2), ai as i64)?;
    }
    for (t, row) in c_coeffs.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Shape(format!(
                "coefficient row t = {} has {} entries, expected {m}",
                t + 1,
                row.len()
            )));
        }
        for (k, &c) in row.iter().enumerate() {
            base.add_power(k + 1, (t + 1) as u8, c as i64)?;
        }
    }
    (0..p.get())
        .map(|n| {
            let mut f = base.clone();
            f.add_power(pi.apply(1), 1, n as i64)?;
            Ok(f)
        })
        .collect()
}

/// The p functions f_n = (q/p)(x A x^T + n x_{pi(1)}) + L_c(x) for A in A_p.
pub fn cs_family_qary(a: &QuadMatrix, linear: &LinearFormQ) -> Result<Vec<Ebf>> {
    let spec = a
        .spec()
        .ok_or_else(|| Error::Precondition("matrix has no psi provenance".into()))?;
    if let Some(k) = spec.a.iter().position(|&v| v == 0) {
        return Err(Error::Precondition(format!("a[{}] must be nonzero", k + 1)));
    }
    let base = QuadraticEbfSpec::new(a.clone(), linear.clone())?.to_ebf()?;
    let lead = spec.pi.apply(1);
    (0..a.modulus().get())
        .map(|n| {
            let mut f = base.clone();
            f.add_power(lead, 1, n as i64)?;
            Ok(f)
        })
        .collect()
}
