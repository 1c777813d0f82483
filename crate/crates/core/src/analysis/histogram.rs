//! Exact sums of q-th roots of unity, q a prime power.
//!
//! A sum `sum_j counts[j] * omega_q^j` is kept as its exponent histogram. For
//! q = p^h the minimal polynomial of omega_q is `sum_{k<p} x^{k q/p}`, so an
//! integer combination of the q powers vanishes exactly when its coefficients
//! are constant on every residue class mod q/p. That single fact drives both
//! the zero test and the canonical form used for exact |S|^2 comparisons.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest prime factor of q when q is a power of it.
pub(crate) fn prime_power_base(q: u32) -> Option<u32> {
    if q < 2 {
        return None;
    }
    let mut base = q;
    let mut f = 2;
    while f * f <= q {
        if q.is_multiple_of(f) {
            base = f;
            break;
        }
        f += 1;
    }
    let mut r = q;
    while r.is_multiple_of(base) {
        r /= base;
    }
    (r == 1).then_some(base)
}

pub(crate) fn root_table(q: u32) -> Vec<Complex64> {
    (0..q)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / q as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentHistogram {
    counts: Vec<u64>,
    q: u32,
}

impl ExponentHistogram {
    pub fn zero(q: u32) -> Result<Self> {
        if prime_power_base(q).is_none() {
            return Err(Error::Range(format!("q = {q} is not a prime power")));
        }
        Ok(ExponentHistogram {
            counts: vec![0; q as usize],
            q,
        })
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let q = counts.len() as u32;
        let mut h = Self::zero(q)?;
        h.counts = counts;
        Ok(h)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of summed terms.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    #[inline]
    pub fn push(&mut self, exponent: u32) {
        self.counts[(exponent % self.q) as usize] += 1;
    }

    pub fn merge(&mut self, other: &ExponentHistogram) {
        debug_assert_eq!(self.q, other.q);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// The histogram of the complex conjugate sum (j -> -j mod q).
    pub fn conjugate(&self) -> ExponentHistogram {
        let q = self.q as usize;
        let counts = (0..q).map(|j| self.counts[(q - j) % q]).collect();
        ExponentHistogram { counts, q: self.q }
    }

    pub fn value(&self) -> Complex64 {
        let roots = root_table(self.q);
        self.counts
            .iter()
            .zip(&roots)
            .map(|(&c, &w)| w * c as f64)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.value().norm_sqr()
    }

    pub fn is_zero_sum(&self) -> bool {
        is_zero_sum(self)
    }

    /// |S|^2 = S * conj(S) as an exact cyclotomic integer.
    pub fn exact_norm_sqr(&self) -> CycloInt {
        let q = self.q as usize;
        let nz: Vec<(usize, i64)> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c as i64))
            .collect();
        let mut coeffs = vec![0i64; q];
        for &(a, ca) in &nz {
            for &(b, cb) in &nz {
                coeffs[(a + q - b) % q] += ca * cb;
            }
        }
        CycloInt::new(self.q, coeffs)
    }
}

/// Whether `sum_j counts[j] omega_q^j` is exactly zero.
pub fn is_zero_sum(h: &ExponentHistogram) -> bool {
    let p = prime_power_base(h.q).expect("histogram modulus is a prime power");
    let step = (h.q / p) as usize;
    (0..step).all(|r| {
        let first = h.counts[r];
        h.counts[r..].iter().step_by(step).all(|&c| c == first)
    })
}

/// An element of Z[omega_q] held in a canonical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloInt {
    q: u32,
    coeffs: Vec<i64>,
}

impl CycloInt {
    /// Reduces `sum_j coeffs[j] omega_q^j` so that the top (q/p) coefficients vanish.
    pub fn new(q: u32, mut coeffs: Vec<i64>) -> Self {
        let p = prime_power_base(q).expect("prime-power modulus");
        let step = (q / p) as usize;
        let top = (p as usize - 1) * step;
        for r in 0..step {
            let t = coeffs[top + r];
            if t != 0 {
                for k in 0..p as usize {
                    coeffs[r + k * step] -= t;
                }
            }
        }
        CycloInt { q, coeffs }
    }

    pub fn integer(q: u32, n: i64) -> Self {
        let mut coeffs = vec![0; q as usize];
        coeffs[0] = n;
        CycloInt::new(q, coeffs)
    }

    /// Some(n) iff the element is the rational integer n.
    pub fn as_integer(&self) -> Option<i64> {
        self.coeffs[1..]
            .iter()
            .all(|&c| c == 0)
            .then_some(self.coeffs[0])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power_base(3), Some(3));
        assert_eq!(prime_power_base(9), Some(3));
        assert_eq!(prime_power_base(125), Some(5));
        assert_eq!(prime_power_base(6), None);
        assert_eq!(prime_power_base(1), None);
        assert!(ExponentHistogram::zero(12).is_err());
    }

    #[test]
    fn zero_sum_examples() {
        let h = ExponentHistogram::from_counts(vec![4, 4, 4]).unwrap();
        assert!(h.is_zero_sum());
        let h = ExponentHistogram::from_counts(vec![9, 0, 0]).unwrap();
        assert!(!h.is_zero_sum());
        // q = 9 with counts[j] = counts[j+3] = counts[j+6]
        let h = ExponentHistogram::from_counts(vec![2, 5, 1, 2, 5, 1, 2, 5, 1]).unwrap();
        assert!(h.is_zero_sum());
        assert!(h.value().norm() < 1e-9);
        let h = ExponentHistogram::from_counts(vec![2, 5, 1, 2, 5, 1, 2, 5, 0]).unwrap();
        assert!(!h.is_zero_sum());
        assert!(h.value().norm() > 0.5);
    }

    #[test]
    fn zero_test_agrees_with_numeric_value() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for q in [3u32, 5, 9, 25, 27] {
            let p = prime_power_base(q).unwrap() as usize;
            let step = q as usize / p;
            for _ in 0..200 {
                let base: Vec<u64> = (0..step).map(|_| rng.gen_range(0..4)).collect();
                let mut counts: Vec<u64> = (0..q as usize).map(|j| base[j % step]).collect();
                if rng.gen_bool(0.5) {
                    let k = rng.gen_range(0..q as usize);
                    counts[k] += 1;
                }
                let h = ExponentHistogram::from_counts(counts).unwrap();
                assert_eq!(h.is_zero_sum(), h.value().norm() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_norm_matches_float() {
        let h = ExponentHistogram::from_counts(vec![7, 1, 1]).unwrap();
        // 7 + w + w^2 = 6, |6|^2 = 36
        assert_eq!(h.exact_norm_sqr().as_integer(), Some(36));
        let h = ExponentHistogram::from_counts(vec![1, 0, 0, 0, 1, 0, 0, 0, 0]).unwrap();
        // 1 + w9^4 has irrational norm
        assert_eq!(h.exact_norm_sqr().as_integer(), None);
        let n = h.norm_sqr();
        assert!((n - (2.0 + 2.0 * (std::f64::consts::TAU * 4.0 / 9.0).cos())).abs() < 1e-12);
    }

    #[test]
    fn canonical_form_is_unique() {
        // 1 + w + w^2 = 0 over q = 3
        assert!(CycloInt::new(3, vec![1, 1, 1]).is_zero());
        assert_eq!(CycloInt::new(3, vec![2, 1, 1]), CycloInt::integer(3, 1));
        assert_eq!(CycloInt::new(9, vec![0, 0, 0, 3, 0, 0, 3, 0, 0]), CycloInt::integer(9, -3));
    }

    #[test]
    fn conjugate_reverses() {
        let h = ExponentHistogram::from_counts(vec![1, 2, 3, 4, 5]).unwrap();
        assert_eq!(h.conjugate().counts(), &[1, 5, 4, 3, 2]);
        assert!((h.conjugate().value() - h.value().conj()).norm() < 1e-12);
    }
}
