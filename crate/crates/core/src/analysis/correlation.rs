use crate::ebf::PhaseSequence;
use crate::error::{Error, Result};

use super::histogram::ExponentHistogram;

fn check_pair(a: &PhaseSequence, b: &PhaseSequence) -> Result<()> {
    if a.len() != b.len() || a.q != b.q {
        return Err(Error::Shape(format!(
            "sequences differ: length {} mod {} vs length {} mod {}",
            a.len(),
            a.q,
            b.len(),
            b.q
        )));
    }
    Ok(())
}

/// Histogram of s1[k] - s2[k] mod q, i.e. sum_k s1_k conj(s2_k).
pub fn inner_product_exact(s1: &PhaseSequence, s2: &PhaseSequence) -> Result<ExponentHistogram> {
    check_pair(s1, s2)?;
    let q = s1.q;
    let mut h = ExponentHistogram::zero(q)?;
    for (&x, &y) in s1.phases.iter().zip(&s2.phases) {
        h.push(x + q - y);
    }
    Ok(h)
}

/// R_{a,b}(tau) = sum_k a_k conj(b_{k+tau}); the zero histogram once |tau| >= M.
pub fn aperiodic_correlation(
    a: &PhaseSequence,
    b: &PhaseSequence,
    tau: i64,
) -> Result<ExponentHistogram> {
    check_pair(a, b)?;
    let q = a.q;
    let n = a.len();
    let mut h = ExponentHistogram::zero(q)?;
    if tau.unsigned_abs() as usize >= n {
        return Ok(h);
    }
    if tau >= 0 {
        let t = tau as usize;
        for k in 0..n - t {
            h.push(a.phases[k] + q - b.phases[k + t]);
        }
    } else {
        let t = (-tau) as usize;
        for k in 0..n - t {
            h.push(a.phases[k + t] + q - b.phases[k]);
        }
    }
    Ok(h)
}

/// Whether the sequences form a complementary set: the pooled aperiodic
/// autocorrelation vanishes exactly at every nonzero shift.
///
/// Returns false for an empty family or sequences of unequal shape.
pub fn cs_check(family: &[PhaseSequence]) -> bool {
    let Some(first) = family.first() else {
        return false;
    };
    if family.iter().any(|s| s.len() != first.len() || s.q != first.q) {
        return false;
    }
    let q = first.q;
    let n = first.len();
    if ExponentHistogram::zero(q).is_err() {
        return false;
    }
    for tau in 1..n {
        let mut h = ExponentHistogram::zero(q).expect("prime-power modulus");
        for s in family {
            for k in 0..n - tau {
                h.push(s.phases[k] + q - s.phases[k + tau]);
            }
        }
        if !h.is_zero_sum() {
            return false;
        }
    }
    true
}
