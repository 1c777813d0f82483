//! Seeded draws of valid construction parameters.
//!
//! pi is uniform, path weights are drawn from F_p^* and redrawn until the
//! variant's conditions hold, and each coordinate of a d-list is an
//! independent random permutation of F_p.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    compute_index_set_u, shift_condition_index, ConstructionSpec, Variant,
};
use crate::error::{Error, Result};
use crate::fp::{Permutation, PrimeModulus};
use crate::quadform::PsiSpec;

const MAX_ATTEMPTS: usize = 100_000;

/// A drawn spec and how many candidate parameter sets were thrown away.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Draw {
    pub spec: ConstructionSpec,
    pub rejections: usize,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_permutation<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (1..=m).collect();
    v.shuffle(rng);
    Permutation::new(v).expect("shuffled identity is a permutation")
}

pub fn random_nonzero<R: Rng + ?Sized>(len: usize, p: PrimeModulus, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(1..p.get()) as u8).collect()
}

/// p vectors of length m, coordinate-wise distinct.
pub fn random_d_list<R: Rng + ?Sized>(p: PrimeModulus, m: usize, rng: &mut R) -> Vec<Vec<u8>> {
    let n = p.get() as usize;
    let mut d = vec![vec![0u8; m]; n];
    let mut col: Vec<u8> = (0..n as u8).collect();
    for k in 0..m {
        col.shuffle(rng);
        for (i, &v) in col.iter().enumerate() {
            d[i][k] = v;
        }
    }
    d
}

/// A uniform member of A_p: uniform pi and diagonal, nonzero path weights.
pub fn random_psi<R: Rng + ?Sized>(p: PrimeModulus, m: usize, rng: &mut R) -> PsiSpec {
    let pi = random_permutation(m, rng);
    let a = random_nonzero(m - 1, p, rng);
    let d = (0..m).map(|_| rng.gen_range(0..p.get()) as u8).collect();
    PsiSpec::new(pi, a, d)
}

fn redraw<R, T>(rng: &mut R, mut draw: impl FnMut(&mut R) -> Option<T>) -> Result<(T, usize)>
where
    R: Rng + ?Sized,
{
    for rejected in 0..MAX_ATTEMPTS {
        if let Some(v) = draw(rng) {
            return Ok((v, rejected));
        }
    }
    Err(Error::condition(format!(
        "no valid parameters found in {MAX_ATTEMPTS} draws"
    )))
}

/// Draw valid parameters for `variant`. `base` is required for the q-ary lift.
pub fn random_spec<R: Rng + ?Sized>(
    variant: Variant,
    base: Option<Variant>,
    p: u32,
    m: usize,
    h: usize,
    rng: &mut R,
) -> Result<Draw> {
    let pm = PrimeModulus::new(p)?;
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m} must be at least 2")));
    }
    if h == 0 || h > m {
        return Err(Error::Precondition(format!("h = {h} must lie in 1..={m}")));
    }
    let matrix_variant = match variant {
        Variant::CorollaryLift => match base {
            Some(Variant::CorollaryLift) | None => {
                return Err(Error::Precondition("the q-ary lift needs a base variant".into()))
            }
            Some(v) => v,
        },
        v => v,
    };
    if matches!(matrix_variant, Variant::ThmP3Even | Variant::ThmP3Any) && p != 3 {
        return Err(Error::condition(format!("{matrix_variant} requires p = 3, got {p}")));
    }
    if matrix_variant == Variant::ThmP3Even && (!m.is_multiple_of(2) || m < 4 || m % 3 == 2) {
        return Err(Error::condition(format!(
            "m = {m} must be even, at least 4 and not 2 mod 3"
        )));
    }
    if matrix_variant == Variant::Thm2pShift && m < 3 {
        return Err(Error::condition(format!(
            "m = {m}: the shift condition needs an index t outside {{m - tau}}, so m >= 3"
        )));
    }
    let pi = random_permutation(m, rng);
    let mut spec = ConstructionSpec {
        variant,
        p,
        m,
        h,
        pi: pi.as_slice().to_vec(),
        a: Vec::new(),
        b: Vec::new(),
        d: Vec::new(),
        tau: None,
        s: None,
        e: None,
        base: (variant == Variant::CorollaryLift).then_some(matrix_variant),
    };
    let differs = |a: &[u8], b: &[u8]| a.iter().zip(b).all(|(x, y)| x != y);
    let rejections = match matrix_variant {
        Variant::ThmLp => {
            spec.a = random_nonzero(m - 1, pm, rng);
            spec.d = random_d_list(pm, m, rng);
            0
        }
        Variant::Thm2pDiff => {
            let ((a, b), rej) = redraw(rng, |r| {
                let a = random_nonzero(m - 1, pm, r);
                let b = random_nonzero(m - 1, pm, r);
                differs(&a, &b).then_some((a, b))
            })?;
            spec.a = a;
            spec.b = b;
            spec.d = random_d_list(pm, m, rng);
            spec.d.extend(random_d_list(pm, m, rng));
            rej
        }
        Variant::Thm2pShift => {
            let ((a, b, tau), rej) = redraw(rng, |r| {
                let tau = r.gen_range(1..m);
                let a = random_nonzero(m - 1, pm, r);
                let b = random_nonzero(m - 1, pm, r);
                shift_condition_index(&a, &b, tau)
                    .is_ok()
                    .then_some((a, b, tau))
            })?;
            spec.a = a;
            spec.b = b;
            spec.tau = Some(tau);
            spec.d = random_d_list(pm, m, rng);
            spec.d.extend(random_d_list(pm, m, rng));
            rej
        }
        Variant::ThmP3Even | Variant::ThmP3Any => {
            // over F_3^* a_k != b_k forces b_k = 3 - a_k
            spec.a = random_nonzero(m - 1, pm, rng);
            spec.b = spec.a.iter().map(|&x| 3 - x).collect();
            spec.d = vec![(0..m).map(|_| rng.gen_range(0..3u8)).collect()];
            if matrix_variant == Variant::ThmP3Any {
                let u = compute_index_set_u(m);
                spec.s = Some(*u.members.choose(rng).expect("U is never empty for m >= 2"));
                spec.e = Some(rng.gen_range(1..3u8));
            }
            0
        }
        Variant::CorollaryLift => unreachable!("resolved above"),
    };
    Ok(Draw { spec, rejections })
}

pub fn seeded_spec(
    variant: Variant,
    base: Option<Variant>,
    p: u32,
    m: usize,
    h: usize,
    seed: u64,
) -> Result<Draw> {
    random_spec(variant, base, p, m, h, &mut rng_from_seed(seed))
}
