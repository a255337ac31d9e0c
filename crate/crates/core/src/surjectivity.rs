//! Certifying that the mod-l image of a curve is all of GL2(F_l).
//!
//! A proper subgroup with surjective determinant lies in a Borel subgroup, the
//! normalizer of a split or non-split Cartan subgroup, or an exceptional
//! subgroup whose projective image is A4, S4 or A5. Each Frobenius class with
//! trace `a_p` and determinant `p` carries invariants that rule some of these
//! out:
//!
//! | witness | predicate on the Frobenius class                    | excludes                 |
//! |---------|-----------------------------------------------------|--------------------------|
//! | W1      | `a_p^2 - 4p` a nonzero square, `a_p != 0`           | non-split normalizer     |
//! | W2      | `a_p^2 - 4p` a nonsquare, `a_p != 0`                | Borel, split normalizer  |
//! | W3      | `u = a_p^2/p` not in `{0,1,2,4}`, `u^2-3u+1 != 0`   | exceptional              |
//! | W4      | residues `p mod l` generate `(Z/l)^*`               | non-surjective det       |
//!
//! The test is sound but, at a finite prime budget, not complete.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{self, primes_up_to};
use crate::curves::WeierstrassCurve;
use crate::field::{DiscClass, PrimeEll};
use crate::gl2::ElementInvariants;
use crate::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 1_000;

/// W1: rules out the normalizer of a non-split Cartan subgroup.
pub fn is_w1(inv: &ElementInvariants) -> bool {
    inv.disc_class == DiscClass::NonzeroSquare && inv.trace != 0
}

/// W2: rules out Borel subgroups and split Cartan normalizers.
pub fn is_w2(inv: &ElementInvariants) -> bool {
    inv.disc_class == DiscClass::Nonsquare && inv.trace != 0
}

/// W3: projective order outside `{1, 2, 3, 4, 5, l}`, so no exceptional
/// subgroup contains the element.
pub fn is_w3(ell: PrimeEll, inv: &ElementInvariants) -> bool {
    let u = inv.u;
    let golden = ell.add(
        ell.sub(ell.mul(u, u), ell.mul(3 % ell.value(), u)),
        1 % ell.value(),
    );
    ![0, 1, 2, 4].iter().any(|&x| x % ell.value() == u) && golden != 0
}

/// Point count and trace of Frobenius at a prime of good reduction `p >= 5`.
///
/// `#E(F_p) = 1 + sum_x (1 + chi(x^3 + Ax + B))`.
pub fn count_points(curve: &WeierstrassCurve, p: u64) -> Result<(u64, i64)> {
    if p == 2 || p == 3 {
        return Err(Error::UnsupportedPrime(p));
    }
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let pb = BigInt::from(p);
    if curve.delta_f().mod_floor(&pb).is_zero() {
        return Err(Error::BadReduction(p));
    }
    let a = curve.a().mod_floor(&pb).to_u64().expect("reduced");
    let b = curve.b().mod_floor(&pb).to_u64().expect("reduced");
    let mut is_square = vec![false; p as usize];
    for x in 1..=(p - 1) / 2 {
        is_square[(x * x % p) as usize] = true;
    }
    let mut count = 1u64;
    for x in 0..p {
        let v = ((x * x % p + a) % p * x % p + b) % p;
        count += if v == 0 {
            1
        } else if is_square[v as usize] {
            2
        } else {
            0
        };
    }
    let a_p = p as i64 + 1 - count as i64;
    debug_assert!((a_p * a_p) as u64 <= 4 * p);
    Ok((count, a_p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusSample {
    pub p: u64,
    pub a_p: i64,
    pub p_mod_ell: u32,
    pub a_p_mod_ell: u32,
    /// `a_p^2 - 4p mod l`.
    pub disc_mod_ell: u32,
    pub disc_class_mod_ell: DiscClass,
    /// `a_p^2 / p mod l`.
    pub u_mod_ell: u32,
}

impl FrobeniusSample {
    pub fn new(ell: PrimeEll, p: u64, a_p: i64) -> Self {
        let t = ell.reduce(a_p);
        let d = (p % ell.value() as u64) as u32;
        let inv = ElementInvariants::from_trace_det(ell, t, d);
        FrobeniusSample {
            p,
            a_p,
            p_mod_ell: d,
            a_p_mod_ell: t,
            disc_mod_ell: inv.disc,
            disc_class_mod_ell: inv.disc_class,
            u_mod_ell: inv.u,
        }
    }

    /// Invariants of the Frobenius class in GL2(F_l).
    pub fn invariants(&self, ell: PrimeEll) -> ElementInvariants {
        ElementInvariants::from_trace_det(ell, self.a_p_mod_ell, self.p_mod_ell)
    }
}

/// Samples at every good prime `5 <= p <= budget`, `p != l`, ascending.
pub fn frobenius_samples(
    curve: &WeierstrassCurve,
    ell: PrimeEll,
    budget: u64,
) -> Vec<FrobeniusSample> {
    let delta = curve.delta_f();
    let primes: Vec<u64> = primes_up_to(budget)
        .into_iter()
        .filter(|&p| p >= 5 && p != ell.value() as u64)
        .filter(|&p| !delta.mod_floor(&BigInt::from(p)).is_zero())
        .collect();
    primes
        .par_iter()
        .map(|&p| {
            let (_, a_p) = count_points(curve, p).expect("good prime");
            FrobeniusSample::new(ell, p, a_p)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    NotCertified,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Witnesses {
    pub w1: Option<u64>,
    pub w2: Option<u64>,
    pub w3: Option<u64>,
    /// Primes whose residues mod l generate `(Z/l)^*`, chosen greedily.
    pub w4: Option<Vec<u64>>,
}

impl Serialize for Witnesses {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("W1", &self.w1)?;
        m.serialize_entry("W2", &self.w2)?;
        m.serialize_entry("W3", &self.w3)?;
        m.serialize_entry("W4", &self.w4)?;
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurjectivityVerdict {
    pub status: Status,
    pub witnesses: Witnesses,
    /// Witness classes not found, e.g. `["W2"]`.
    pub missing: Vec<String>,
    /// Number of samples examined.
    pub budget: usize,
}

impl SurjectivityVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn reason(&self) -> Option<String> {
        (!self.missing.is_empty()).then(|| format!("missing {}", self.missing.join(", ")))
    }
}

/// Greedy generators of `(Z/l)^*` among the residues, or `None`.
fn unit_generators(ell: PrimeEll, samples: &[FrobeniusSample]) -> Option<Vec<u64>> {
    let l = ell.value();
    let mut in_group = vec![false; l as usize];
    in_group[1 % l as usize] = true;
    let mut size = 1;
    let mut chosen = Vec::new();
    for s in samples {
        if size == l - 1 {
            break;
        }
        let g = s.p_mod_ell;
        if g == 0 || in_group[g as usize] {
            continue;
        }
        chosen.push(s.p);
        // close up <H, g>
        let before = in_group.clone();
        let members: Vec<u32> = (1..l).filter(|&x| before[x as usize]).collect();
        let mut power = g;
        while !before[power as usize] {
            for &h in &members {
                in_group[ell.mul(h, power) as usize] = true;
            }
            power = ell.mul(power, g);
        }
        size = in_group.iter().filter(|&&b| b).count() as u32;
    }
    (size == l - 1).then_some(chosen)
}

/// Frobenius witness test for surjectivity of the mod-l representation.
pub fn serre_test(samples: &[FrobeniusSample], ell: PrimeEll) -> Result<SurjectivityVerdict> {
    if ell.value() < 5 {
        return Err(Error::UnsupportedPrime(ell.value() as u64));
    }
    let mut w = Witnesses::default();
    for s in samples {
        let inv = s.invariants(ell);
        if w.w1.is_none() && is_w1(&inv) {
            w.w1 = Some(s.p);
        }
        if w.w2.is_none() && is_w2(&inv) {
            w.w2 = Some(s.p);
        }
        if w.w3.is_none() && is_w3(ell, &inv) {
            w.w3 = Some(s.p);
        }
    }
    w.w4 = unit_generators(ell, samples);
    let mut missing = Vec::new();
    for (name, present) in [
        ("W1", w.w1.is_some()),
        ("W2", w.w2.is_some()),
        ("W3", w.w3.is_some()),
        ("W4", w.w4.is_some()),
    ] {
        if !present {
            missing.push(name.to_string());
        }
    }
    Ok(SurjectivityVerdict {
        status: if missing.is_empty() {
            Status::Certified
        } else {
            Status::NotCertified
        },
        witnesses: w,
        missing,
        budget: samples.len(),
    })
}

/// Sample up to `budget` and run [`serre_test`].
pub fn certify(
    curve: &WeierstrassCurve,
    ell: PrimeEll,
    budget: u64,
) -> Result<SurjectivityVerdict> {
    serre_test(&frobenius_samples(curve, ell, budget), ell)
}

const F13_QUARTIC: [i64; 5] = [6256, -1660, 1211, -235, 1];

/// `-3 (t^2 + t + 7)(t^2 + 4)(t^4 - 235t^3 + 1211t^2 - 1660t + 6256)`.
pub fn f13_eval(t: &BigRational) -> BigRational {
    let horner = |coeffs: &[i64]| {
        coeffs.iter().rev().fold(BigRational::zero(), |acc, &c| {
            acc * t + BigRational::from_integer(c.into())
        })
    };
    BigRational::from_integer((-3).into())
        * horner(&[7, 1, 1])
        * horner(&[4, 0, 1])
        * horner(&F13_QUARTIC)
}

/// `s^8 f13(r/s)` as an integer.
fn f13_homogeneous(r: &BigInt, s: &BigInt) -> BigInt {
    let form = |coeffs: &[i64]| {
        let deg = coeffs.len() as u32 - 1;
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| BigInt::from(c) * r.pow(i as u32) * s.pow(deg - i as u32))
            .sum::<BigInt>()
    };
    BigInt::from(-3) * form(&[7, 1, 1]) * form(&[4, 0, 1]) * form(&F13_QUARTIC)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThirteenHit {
    #[serde(serialize_with = "rational_str")]
    pub t: BigRational,
    /// `f13(t) / A`, a nonzero rational square.
    #[serde(serialize_with = "rational_str")]
    pub delta_sq: BigRational,
}

fn rational_str<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::json::format_rational(q))
}

/// Rationals `t = r/s` in lowest terms with `|r|, |s| <= height_bound` for
/// which `f13(t)/A` is a nonzero rational square, ascending in `t`.
pub fn thirteen_family_scan(a: &BigInt, height_bound: u64) -> Result<Vec<ThirteenHit>> {
    if a.is_zero() {
        return Err(Error::ZeroA);
    }
    let bound = height_bound as i64;
    let mut candidates = BTreeSet::new();
    for s in 1..=bound {
        for r in -bound..=bound {
            if r.gcd(&s) == 1 {
                candidates.insert(BigRational::new(r.into(), s.into()));
            }
        }
    }
    let mut hits = Vec::new();
    for t in candidates {
        // f13(r/s)/A = F(r,s) / (s^8 A), a square iff F(r,s) * A is
        let value = f13_homogeneous(t.numer(), t.denom());
        let prod = &value * a;
        if prod.is_positive() && arith::is_perfect_square(prod.magnitude()) {
            let delta_sq = f13_eval(&t) / BigRational::from_integer(a.clone());
            hits.push(ThirteenHit { t, delta_sq });
        }
    }
    Ok(hits)
}
