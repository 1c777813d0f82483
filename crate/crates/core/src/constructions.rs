//! Matrix families with guaranteed r_min, and the spreading matrices they generate.
//!
//! Every builder validates its side conditions up front and returns
//! [`Error::ConditionViolation`] naming the failed condition; nothing is
//! constructed silently from bad parameters.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::analysis::{mem_budget, PhaseMatrix, SpreadingMatrix};
use crate::error::{Error, Result};
use crate::fp::{bracket_mod, Permutation, PrimeModulus};
use crate::quadform::{psi, r_min, MatrixFamily, Provenance, PsiSpec, QuadMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// p blocks sharing one path, diagonals distinct in every coordinate.
    ThmLp,
    /// 2p blocks: path weights a and b with a_i != b_i.
    Thm2pDiff,
    /// 2p blocks: second half uses the cyclic shift pi^tau.
    Thm2pShift,
    /// p = 3, six blocks, m even with m mod 3 != 2.
    ThmP3Even,
    /// p = 3, six blocks, any m >= 2, one shifted diagonal coordinate.
    ThmP3Any,
    /// q-ary lift of one of the above.
    CorollaryLift,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::ThmLp,
        Variant::Thm2pDiff,
        Variant::Thm2pShift,
        Variant::ThmP3Even,
        Variant::ThmP3Any,
        Variant::CorollaryLift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::ThmLp => "thm-lp",
            Variant::Thm2pDiff => "thm-2p-diff",
            Variant::Thm2pShift => "thm-2p-shift",
            Variant::ThmP3Even => "thm-p3-even",
            Variant::ThmP3Any => "thm-p3-any",
            Variant::CorollaryLift => "corollary-lift",
        }
    }

    /// Blocks L for prime p.
    pub fn blocks(self, p: u32) -> Option<usize> {
        match self {
            Variant::ThmLp => Some(p as usize),
            Variant::Thm2pDiff | Variant::Thm2pShift => Some(2 * p as usize),
            Variant::ThmP3Even | Variant::ThmP3Any => Some(6),
            Variant::CorollaryLift => None,
        }
    }

    /// The guaranteed lower bound on r_min, as an offset below m.
    pub fn rank_deficit(self) -> Option<usize> {
        match self {
            Variant::ThmLp | Variant::ThmP3Even | Variant::ThmP3Any => Some(0),
            Variant::Thm2pDiff | Variant::Thm2pShift => Some(1),
            Variant::CorollaryLift => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::parse("variant", format!("unknown variant {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

fn check_len(name: &str, v: &[u8], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(Error::Shape(format!(
            "{name} has {} entries, expected {len}",
            v.len()
        )));
    }
    Ok(())
}

fn check_field(name: &str, v: &[u8], p: PrimeModulus) -> Result<()> {
    if let Some(k) = v.iter().position(|&x| x as u32 >= p.get()) {
        return Err(Error::Range(format!(
            "{name}[{}] = {} is not in F_{p}",
            k + 1,
            v[k]
        )));
    }
    Ok(())
}

fn check_path(name: &str, v: &[u8], m: usize, p: PrimeModulus) -> Result<()> {
    check_len(name, v, m - 1)?;
    check_field(name, v, p)?;
    if let Some(k) = v.iter().position(|&x| x == 0) {
        return Err(Error::condition(format!("{name}[{}] must be nonzero", k + 1)));
    }
    Ok(())
}

fn check_differs(a: &[u8], b: &[u8]) -> Result<()> {
    if let Some(k) = a.iter().zip(b).position(|(x, y)| x == y) {
        return Err(Error::condition(format!(
            "a[{i}] - b[{i}] must be nonzero",
            i = k + 1
        )));
    }
    Ok(())
}

/// p vectors whose k-th coordinates are pairwise distinct for every k.
fn check_d_list(name: &str, d: &[Vec<u8>], m: usize, p: PrimeModulus) -> Result<()> {
    if d.len() != p.get() as usize {
        return Err(Error::Shape(format!(
            "{name} has {} vectors, expected p = {p}",
            d.len()
        )));
    }
    for (i, v) in d.iter().enumerate() {
        check_len(&format!("{name}[{}]", i + 1), v, m)?;
        check_field(&format!("{name}[{}]", i + 1), v, p)?;
    }
    for k in 0..m {
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if d[i][k] == d[j][k] {
                    return Err(Error::condition(format!(
                        "{name}: coordinate {} repeats value {} in vectors {} and {}",
                        k + 1,
                        d[i][k],
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

fn check_perm(pi: &Permutation, m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m} must be at least 2")));
    }
    if pi.len() != m {
        return Err(Error::Shape(format!(
            "permutation has length {}, expected m = {m}",
            pi.len()
        )));
    }
    Ok(())
}

fn members(
    p: PrimeModulus,
    pi: &Permutation,
    a: &[u8],
    d: &[Vec<u8>],
) -> Result<Vec<QuadMatrix>> {
    d.iter()
        .map(|di| psi(&PsiSpec::new(pi.clone(), a.to_vec(), di.clone()), p))
        .collect()
}

fn fmt_vec(v: &[u8]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_list(d: &[Vec<u8>]) -> String {
    d.iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(";")
}

fn fmt_perm(pi: &Permutation) -> String {
    pi.as_slice()
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// p matrices psi(pi, a, d_i).
pub fn build_thm_lp(
    p: PrimeModulus,
    pi: &Permutation,
    a: &[u8],
    d: &[Vec<u8>],
) -> Result<MatrixFamily> {
    let m = pi.len();
    check_perm(pi, m)?;
    check_path("a", a, m, p)?;
    check_d_list("d", d, m, p)?;
    let prov = Provenance::new(Variant::ThmLp.name())
        .with("p", p)
        .with("m", m)
        .with("pi", fmt_perm(pi))
        .with("a", fmt_vec(a))
        .with("d", fmt_list(d));
    MatrixFamily::new(members(p, pi, a, d)?, prov)
}

/// psi(pi, a, d_i) for i <= p and psi(pi, b, d_i) for i > p.
pub fn build_thm_2p_diff(
    p: PrimeModulus,
    pi: &Permutation,
    a: &[u8],
    b: &[u8],
    d_a: &[Vec<u8>],
    d_b: &[Vec<u8>],
) -> Result<MatrixFamily> {
    let m = pi.len();
    check_perm(pi, m)?;
    check_path("a", a, m, p)?;
    check_path("b", b, m, p)?;
    check_differs(a, b)?;
    check_d_list("d (first half)", d_a, m, p)?;
    check_d_list("d (second half)", d_b, m, p)?;
    let mut all = members(p, pi, a, d_a)?;
    all.extend(members(p, pi, b, d_b)?);
    let prov = Provenance::new(Variant::Thm2pDiff.name())
        .with("p", p)
        .with("m", m)
        .with("pi", fmt_perm(pi))
        .with("a", fmt_vec(a))
        .with("b", fmt_vec(b))
        .with("d", format!("{};{}", fmt_list(d_a), fmt_list(d_b)));
    MatrixFamily::new(all, prov)
}

/// The index t of the shift condition: b_t = a_[t+tau] for exactly one t,
/// taken over the indices i in 1..m-1 with [i+tau]_m != m.
pub fn shift_condition_index(a: &[u8], b: &[u8], tau: usize) -> Result<usize> {
    let m = a.len() + 1;
    if tau == 0 {
        return Err(Error::condition("tau must be positive"));
    }
    let hits: Vec<usize> = (1..m)
        .filter(|&i| bracket_mod(i + tau, m) != m)
        .filter(|&i| b[i - 1] == a[bracket_mod(i + tau, m) - 1])
        .collect();
    match hits.as_slice() {
        [t] => Ok(*t),
        [] => Err(Error::condition(format!(
            "shift condition: no index t with b[t] = a[[t+{tau}]_{m}]"
        ))),
        many => Err(Error::condition(format!(
            "shift condition: b[i] = a[[i+{tau}]_{m}] at more than one index (i = {})",
            many.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// psi(pi, a, d_i) for i <= p and psi(pi^tau, b, d_i) for i > p.
pub fn build_thm_2p_shift(
    p: PrimeModulus,
    pi: &Permutation,
    tau: usize,
    a: &[u8],
    b: &[u8],
    d_a: &[Vec<u8>],
    d_b: &[Vec<u8>],
) -> Result<MatrixFamily> {
    let m = pi.len();
    check_perm(pi, m)?;
    check_path("a", a, m, p)?;
    check_path("b", b, m, p)?;
    let t = shift_condition_index(a, b, tau)?;
    check_d_list("d (first half)", d_a, m, p)?;
    check_d_list("d (second half)", d_b, m, p)?;
    let shifted = pi.cyclic_shift(tau)?;
    let mut all = members(p, pi, a, d_a)?;
    all.extend(members(p, &shifted, b, d_b)?);
    let prov = Provenance::new(Variant::Thm2pShift.name())
        .with("p", p)
        .with("m", m)
        .with("pi", fmt_perm(pi))
        .with("tau", tau)
        .with("t", t)
        .with("a", fmt_vec(a))
        .with("b", fmt_vec(b))
        .with("d", format!("{};{}", fmt_list(d_a), fmt_list(d_b)));
    MatrixFamily::new(all, prov)
}

fn three() -> PrimeModulus {
    PrimeModulus::new(3).expect("3 is prime")
}

/// d_1, d_1 + 1_m, d_1 + 2 * 1_m over F_3.
fn triple(d1: &[u8]) -> Vec<Vec<u8>> {
    (0..3u8)
        .map(|i| d1.iter().map(|&x| (x + i) % 3).collect())
        .collect()
}

fn check_p3_paths(pi: &Permutation, a: &[u8], b: &[u8], d1: &[u8]) -> Result<usize> {
    let p = three();
    let m = pi.len();
    check_perm(pi, m)?;
    check_path("a", a, m, p)?;
    check_path("b", b, m, p)?;
    check_differs(a, b)?;
    check_len("d_1", d1, m)?;
    check_field("d_1", d1, p)?;
    Ok(m)
}

/// The uniform single-coordinate offset d_b[i] - d_a[i] = delta * e_j, if any.
fn single_coordinate_offset(d_a: &[Vec<u8>], d_b: &[Vec<u8>]) -> Option<(usize, u8)> {
    let diff: Vec<u8> = d_b[0].iter().zip(&d_a[0]).map(|(&y, &x)| (y + 3 - x) % 3).collect();
    let uniform = d_a.iter().zip(d_b).all(|(x, y)| {
        x.iter()
            .zip(y)
            .zip(&diff)
            .all(|((&u, &v), &dd)| (v + 3 - u) % 3 == dd)
    });
    let nz: Vec<usize> = (0..diff.len()).filter(|&k| diff[k] != 0).collect();
    (uniform && nz.len() == 1).then(|| (nz[0], diff[nz[0]]))
}

/// Six matrices over F_3: psi(pi, a, d_i) and psi(pi, b, d_{i-3}).
///
/// `d_b` may replace the second diagonal triple. It is accepted when equal to
/// the first triple, or when it differs by one uniform coordinate offset and
/// the resulting family still has r_min = m.
pub fn build_thm_p3_even(
    pi: &Permutation,
    a: &[u8],
    b: &[u8],
    d1: &[u8],
    d_b: Option<&[Vec<u8>]>,
) -> Result<MatrixFamily> {
    let p = three();
    let m = check_p3_paths(pi, a, b, d1)?;
    if m % 2 != 0 || m < 4 {
        return Err(Error::condition(format!("m = {m} must be even and at least 4")));
    }
    if m % 3 == 2 {
        return Err(Error::condition(format!("m = {m} must not be 2 mod 3")));
    }
    let d_a = triple(d1);
    let (second, offset) = match d_b {
        None => (d_a.clone(), None),
        Some(d_b) => {
            if d_b.len() != 3 {
                return Err(Error::Shape(format!(
                    "second diagonal triple has {} vectors, expected 3",
                    d_b.len()
                )));
            }
            for (i, v) in d_b.iter().enumerate() {
                check_len(&format!("d_{}", i + 4), v, m)?;
                check_field(&format!("d_{}", i + 4), v, p)?;
            }
            if d_b == d_a.as_slice() {
                (d_a.clone(), None)
            } else {
                let off = single_coordinate_offset(&d_a, d_b).ok_or_else(|| {
                    Error::condition(
                        "second diagonal triple must equal the first or differ from it by one uniform coordinate offset",
                    )
                })?;
                (d_b.to_vec(), Some(off))
            }
        }
    };
    let mut all = members(p, pi, a, &d_a)?;
    all.extend(members(p, pi, b, &second)?);
    let mut prov = Provenance::new(Variant::ThmP3Even.name())
        .with("p", 3)
        .with("m", m)
        .with("pi", fmt_perm(pi))
        .with("a", fmt_vec(a))
        .with("b", fmt_vec(b))
        .with("d", format!("{};{}", fmt_list(&d_a), fmt_list(&second)));
    if let Some((k, delta)) = offset {
        prov = prov.with("offset", format!("{}*e_{}", delta, k + 1));
    }
    let fam = MatrixFamily::new(all, prov)?;
    if offset.is_some() {
        let r = r_min(&fam)?;
        if r != m {
            return Err(Error::condition(format!(
                "shifted second diagonal triple gives r_min = {r}, expected {m}"
            )));
        }
    }
    Ok(fam)
}

/// The admissible shift positions for the p = 3, any-m family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSetU {
    pub members: Vec<usize>,
    /// m mod 3.
    pub u: usize,
    /// Whether the even-m branch (no parity filter) was used.
    pub even_branch: bool,
}

impl IndexSetU {
    pub fn contains(&self, s: usize) -> bool {
        self.members.contains(&s)
    }
}

pub fn compute_index_set_u(m: usize) -> IndexSetU {
    let u = m % 3;
    let even = m.is_multiple_of(2);
    let residues: [usize; 2] = match u {
        0 => [0, 1],
        1 => [0, 2],
        _ => [1, 2],
    };
    let members = (1..=m)
        .filter(|&l| residues.contains(&(l % 3)))
        .filter(|&l| even || l % 2 == 1)
        .collect();
    IndexSetU {
        members,
        u,
        even_branch: even,
    }
}

/// Six matrices over F_3; the second triple shifts coordinate pi(s) by e.
pub fn build_thm_p3_any(
    pi: &Permutation,
    a: &[u8],
    b: &[u8],
    d1: &[u8],
    s: usize,
    e: u8,
) -> Result<MatrixFamily> {
    let p = three();
    let m = check_p3_paths(pi, a, b, d1)?;
    let u = compute_index_set_u(m);
    if !u.contains(s) {
        return Err(Error::condition(format!(
            "s = {s} is not in U = {{{}}}",
            u.members
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )));
    }
    if e.is_multiple_of(3) {
        return Err(Error::condition("e must be nonzero"));
    }
    let d_a = triple(d1);
    let coord = pi.apply(s) - 1;
    let d_b: Vec<Vec<u8>> = d_a
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w[coord] = (w[coord] + e) % 3;
            w
        })
        .collect();
    let mut all = members(p, pi, a, &d_a)?;
    all.extend(members(p, pi, b, &d_b)?);
    let prov = Provenance::new(Variant::ThmP3Any.name())
        .with("p", 3)
        .with("m", m)
        .with("pi", fmt_perm(pi))
        .with("a", fmt_vec(a))
        .with("b", fmt_vec(b))
        .with("d_1", fmt_vec(d1))
        .with("s", s)
        .with("e", e % 3);
    MatrixFamily::new(all, prov)
}

/// The q-ary spreading matrix of a family, q = p^h. Blocks stay orthogonal
/// and every column stays in a q-ary complementary set, but for h >= 2 the
/// cross-block coherence exceeds the p-ary value p^(-r_min/2).
pub fn lift_family_q(base: MatrixFamily, h: usize) -> Result<SpreadingMatrix> {
    SpreadingMatrix::new(base, h)
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

/// Number of admissible diagonal choices for fixed pi, a (and b).
pub fn count_configs(variant: Variant, p: PrimeModulus, m: usize) -> Result<BigUint> {
    let f = factorial(p.get());
    match variant {
        Variant::ThmLp => Ok(f.pow(m as u32 - 1)),
        Variant::Thm2pDiff | Variant::Thm2pShift => Ok(f.pow(2 * (m as u32 - 1))),
        other => Err(Error::Unsupported(format!(
            "configuration count is not defined for {other}"
        ))),
    }
}

/// Every column of Phi, within the budget from the environment.
pub fn materialize_phi(phi: &SpreadingMatrix) -> Result<PhaseMatrix> {
    phi.materialize(mem_budget())
}

/// Parameters for any variant, as read from a command line or a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub variant: Variant,
    pub p: u32,
    pub m: usize,
    #[serde(default = "one")]
    pub h: usize,
    pub pi: Vec<usize>,
    pub a: Vec<u8>,
    #[serde(default)]
    pub b: Vec<u8>,
    #[serde(default)]
    pub d: Vec<Vec<u8>>,
    #[serde(default)]
    pub tau: Option<usize>,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub e: Option<u8>,
    /// Underlying variant when `variant` is the q-ary lift.
    #[serde(default)]
    pub base: Option<Variant>,
}

fn one() -> usize {
    1
}

impl ConstructionSpec {
    /// The variant whose matrices are built (the base one for a lift).
    pub fn matrix_variant(&self) -> Result<Variant> {
        match self.variant {
            Variant::CorollaryLift => match self.base {
                Some(Variant::CorollaryLift) | None => Err(Error::Precondition(
                    "the q-ary lift needs a base variant".into(),
                )),
                Some(v) => Ok(v),
            },
            v => Ok(v),
        }
    }

    fn split_d(&self, p: usize) -> Result<(&[Vec<u8>], &[Vec<u8>])> {
        if self.d.len() != 2 * p {
            return Err(Error::Shape(format!(
                "expected {} diagonal vectors, got {}",
                2 * p,
                self.d.len()
            )));
        }
        Ok(self.d.split_at(p))
    }

    pub fn build_family(&self) -> Result<MatrixFamily> {
        let p = PrimeModulus::new(self.p)?;
        let pi = Permutation::new(self.pi.clone())?;
        if pi.len() != self.m {
            return Err(Error::Shape(format!(
                "permutation has length {}, expected m = {}",
                pi.len(),
                self.m
            )));
        }
        let need_p3 = |v: Variant| -> Result<()> {
            if self.p != 3 {
                return Err(Error::condition(format!("{v} requires p = 3, got {}", self.p)));
            }
            Ok(())
        };
        let first_d = || -> Result<&[u8]> {
            self.d
                .first()
                .map(|v| v.as_slice())
                .ok_or_else(|| Error::Shape("missing d_1".into()))
        };
        match self.matrix_variant()? {
            Variant::ThmLp => build_thm_lp(p, &pi, &self.a, &self.d),
            Variant::Thm2pDiff => {
                let (da, db) = self.split_d(p.get() as usize)?;
                build_thm_2p_diff(p, &pi, &self.a, &self.b, da, db)
            }
            Variant::Thm2pShift => {
                let (da, db) = self.split_d(p.get() as usize)?;
                let tau = self
                    .tau
                    .ok_or_else(|| Error::Precondition("tau is required".into()))?;
                build_thm_2p_shift(p, &pi, tau, &self.a, &self.b, da, db)
            }
            Variant::ThmP3Even => {
                need_p3(Variant::ThmP3Even)?;
                let d1 = first_d()?;
                match self.d.len() {
                    1 => build_thm_p3_even(&pi, &self.a, &self.b, d1, None),
                    6 => {
                        if self.d[..3] != triple(d1)[..] {
                            return Err(Error::condition(
                                "d_2 and d_3 must equal d_1 + 1 and d_1 + 2",
                            ));
                        }
                        build_thm_p3_even(&pi, &self.a, &self.b, d1, Some(&self.d[3..]))
                    }
                    n => Err(Error::Shape(format!(
                        "expected 1 or 6 diagonal vectors, got {n}"
                    ))),
                }
            }
            Variant::ThmP3Any => {
                need_p3(Variant::ThmP3Any)?;
                let s = self
                    .s
                    .ok_or_else(|| Error::Precondition("s is required".into()))?;
                let e = self
                    .e
                    .ok_or_else(|| Error::Precondition("e is required".into()))?;
                build_thm_p3_any(&pi, &self.a, &self.b, first_d()?, s, e)
            }
            Variant::CorollaryLift => unreachable!("resolved by matrix_variant"),
        }
    }

    pub fn build(&self) -> Result<SpreadingMatrix> {
        lift_family_q(self.build_family()?, self.h)
    }
}
