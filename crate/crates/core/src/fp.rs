//! Arithmetic over the prime field F_p.
//!
//! Digits are stored least-significant first: `digits[k]` is the coefficient of
//! p^k, i.e. the variable x_{k+1} in 1-indexed notation. Permutations keep the
//! 1-indexed convention on every public boundary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported prime; every digit fits in a byte.
pub const MAX_PRIME: u32 = 251;

/// An odd prime p with 3 <= p <= 251.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u32) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(Error::Modulus(format!(
                "p = {p} exceeds the supported maximum {MAX_PRIME}"
            )));
        }
        if p < 3 || p.is_multiple_of(2) {
            return Err(Error::Modulus(format!("p = {p} is not an odd prime")));
        }
        let mut f = 3;
        while f * f <= p {
            if p.is_multiple_of(f) {
                return Err(Error::Modulus(format!("p = {p} is not prime ({f} divides it)")));
            }
            f += 2;
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u8 {
        v.rem_euclid(self.0 as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u32 + b as u32) % self.0) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u32 + self.0 - b as u32) % self.0) as u8
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u32 * b as u32) % self.0) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        ((self.0 - a as u32) % self.0) as u8
    }

    /// Multiplicative inverse via Fermat; `a` must be nonzero mod p.
    pub fn inv(self, a: u8) -> u8 {
        debug_assert!(!(a as u32).is_multiple_of(self.0), "zero has no inverse");
        let mut base = a as u32 % self.0;
        let mut exp = self.0 - 2;
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.0;
            }
            base = base * base % self.0;
            exp >>= 1;
        }
        acc as u8
    }

    /// p^m, or a range error if it does not fit in a u64.
    pub fn pow(self, m: usize) -> Result<u64> {
        let mut acc: u64 = 1;
        for _ in 0..m {
            acc = acc
                .checked_mul(self.0 as u64)
                .ok_or_else(|| Error::Range(format!("{}^{} overflows", self.0, m)))?;
        }
        Ok(acc)
    }
}

impl TryFrom<u32> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u32 {
    fn from(p: PrimeModulus) -> u32 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The p-ary expansion of an integer in [0, p^m), least-significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitVector {
    digits: Vec<u8>,
    modulus: PrimeModulus,
}

impl DigitVector {
    pub fn new(digits: Vec<u8>, modulus: PrimeModulus) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Shape("digit vector must have m >= 1 entries".into()));
        }
        if let Some(k) = digits.iter().position(|&d| d as u32 >= modulus.get()) {
            return Err(Error::Range(format!(
                "digit x_{} = {} is not below p = {}",
                k + 1,
                digits[k],
                modulus
            )));
        }
        Ok(DigitVector { digits, modulus })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    /// x_k in the 1-indexed convention.
    pub fn x(&self, k: usize) -> u8 {
        self.digits[k - 1]
    }

    pub fn to_int(&self) -> u64 {
        int_of_digits(&self.digits, self.modulus)
    }
}

pub fn digits_of(x: u64, m: usize, p: PrimeModulus) -> Result<DigitVector> {
    if m == 0 {
        return Err(Error::Shape("m must be positive".into()));
    }
    let size = p.pow(m)?;
    if x >= size {
        return Err(Error::Range(format!("x = {x} is not below {p}^{m} = {size}")));
    }
    let mut digits = vec![0u8; m];
    fill_digits(x, p, &mut digits);
    Ok(DigitVector { digits, modulus: p })
}

/// Writes the base-p digits of `x` into `out` without range checking.
#[inline]
pub(crate) fn fill_digits(mut x: u64, p: PrimeModulus, out: &mut [u8]) {
    let pp = p.get() as u64;
    for d in out.iter_mut() {
        *d = (x % pp) as u8;
        x /= pp;
    }
}

pub fn int_of_digits(digits: &[u8], p: PrimeModulus) -> u64 {
    digits
        .iter()
        .rev()
        .fold(0u64, |acc, &d| acc * p.get() as u64 + d as u64)
}

/// The digit table of every integer in [0, p^m), row-major, m digits per row.
pub(crate) fn digit_table(p: PrimeModulus, m: usize) -> Result<Vec<u8>> {
    let size = p.pow(m)? as usize;
    let mut table = vec![0u8; size * m];
    for (x, row) in table.chunks_exact_mut(m).enumerate() {
        fill_digits(x as u64, p, row);
    }
    Ok(table)
}

/// `[k]_m`: m when m divides k, otherwise k mod m.
pub fn bracket_mod(k: usize, m: usize) -> usize {
    assert!(m >= 1, "bracket_mod needs m >= 1");
    match k % m {
        0 => m,
        r => r,
    }
}

/// A permutation of {1, ..., m}, stored and exposed 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let m = map.len();
        if m == 0 {
            return Err(Error::Shape("permutation must have m >= 1 entries".into()));
        }
        let mut seen = vec![false; m];
        for (i, &v) in map.iter().enumerate() {
            if v == 0 || v > m {
                return Err(Error::Range(format!(
                    "pi({}) = {v} is outside 1..={m}",
                    i + 1
                )));
            }
            if seen[v - 1] {
                return Err(Error::Range(format!("pi repeats the value {v}")));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(m: usize) -> Self {
        Permutation {
            map: (1..=m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// pi(i) for 1 <= i <= m.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// pi^tau with pi^tau(i) = pi([i + tau]_m).
    pub fn cyclic_shift(&self, tau: usize) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Range("cyclic shift needs tau >= 1".into()));
        }
        let m = self.len();
        let map = (1..=m).map(|i| self.apply(bracket_mod(i + tau, m))).collect();
        Ok(Permutation { map })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { map: inv }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.map
    }
}

pub fn cyclic_shift_perm(pi: &Permutation, tau: usize) -> Result<Permutation> {
    pi.cyclic_shift(tau)
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixFp {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
    modulus: PrimeModulus,
}

impl MatrixFp {
    pub fn zeros(rows: usize, cols: usize, modulus: PrimeModulus) -> Self {
        MatrixFp {
            rows,
            cols,
            entries: vec![0; rows * cols],
            modulus,
        }
    }

    pub fn identity(n: usize, modulus: PrimeModulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from integer rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], modulus: PrimeModulus) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    r.len()
                )));
            }
            entries.extend(r.iter().map(|&v| modulus.reduce(v)));
        }
        Ok(MatrixFp {
            rows: rows.len(),
            cols,
            entries,
            modulus,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// 0-indexed access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.entries[i * self.cols + j] = (v as u32 % self.modulus.get()) as u8;
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.modulus);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols || self.modulus != other.modulus {
            return Err(Error::Shape(format!(
                "{}x{} over F_{} vs {}x{} over F_{}",
                self.rows, self.cols, self.modulus, other.rows, other.cols, other.modulus
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let p = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| p.add(a, b))
            .collect();
        Ok(MatrixFp { entries, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let p = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| p.sub(a, b))
            .collect();
        Ok(MatrixFp { entries, ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.modulus != other.modulus {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.modulus.get();
        let mut out = Self::zeros(self.rows, other.cols, self.modulus);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: u32 = (0..self.cols)
                    .map(|k| self.get(i, k) as u32 * other.get(k, j) as u32 % p)
                    .sum();
                out.entries[i * other.cols + j] = (s % p) as u8;
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn rank(&self) -> usize {
        rank_fp(self)
    }

    /// x A x^T mod p for a digit row vector x of length `rows`.
    pub fn quadratic_form(&self, x: &[u8]) -> u8 {
        let p = self.modulus.get();
        let mut acc = 0u32;
        for i in 0..self.rows {
            if x[i] == 0 {
                continue;
            }
            let row = self.row(i);
            let mut s = 0u32;
            for j in 0..self.cols {
                s += row[j] as u32 * x[j] as u32;
            }
            acc = (acc + (s % p) * x[i] as u32) % p;
        }
        acc as u8
    }
}

impl fmt::Display for MatrixFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Rank over F_p by row reduction.
pub fn rank_fp(m: &MatrixFp) -> usize {
    let p = m.modulus;
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.entries.clone();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let inv = p.inv(a[rank * cols + col]);
        for j in col..cols {
            a[rank * cols + j] = p.mul(a[rank * cols + j], inv);
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = a[r * cols + col];
            if factor == 0 {
                continue;
            }
            for j in col..cols {
                let v = p.mul(factor, a[rank * cols + j]);
                a[r * cols + j] = p.sub(a[r * cols + j], v);
            }
        }
        rank += 1;
    }
    rank
}
