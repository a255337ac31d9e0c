//! Short Weierstrass curves `y^2 = x^3 + Ax + B` over the integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, mul_mod, primes_up_to, sqrt_mod_prime};
use crate::{Error, Result};

/// Primes below this bound are sieved out by solving `27B^2 = -4A^3 (mod p^2)`.
pub const SIEVE_PRIME_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    a: BigInt,
    b: BigInt,
}

impl WeierstrassCurve {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let c = WeierstrassCurve {
            a: a.into(),
            b: b.into(),
        };
        if c.delta_f().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// `4A^3 + 27B^2`.
    pub fn delta_f(&self) -> BigInt {
        delta_f(&self.a, &self.b)
    }

    /// `-16 (4A^3 + 27B^2)`.
    pub fn delta_e(&self) -> BigInt {
        self.delta_f() * -16
    }

    /// `max(4|A|^3, 27B^2)`.
    pub fn height(&self) -> BigInt {
        let x: BigInt = self.a.abs().pow(3) * 4;
        let y: BigInt = &self.b * &self.b * 27;
        x.max(y)
    }

    pub fn invariants(&self) -> CurveInvariants {
        let delta_f = self.delta_f();
        let factorization = arith::factor(&delta_f).expect("delta_f is nonzero");
        CurveInvariants {
            delta_e: &delta_f * -16,
            height: self.height(),
            squarefree_delta_f: factorization.iter().all(|&(_, e)| e == 1),
            delta_f,
            factorization,
        }
    }

    /// `v_p(j)` for `j = 2^8 3^3 A^3 / delta_f` (the sign does not matter).
    pub fn j_valuation(&self, p: u64) -> Result<JValuation> {
        if !arith::is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if self.a.is_zero() {
            return Ok(JValuation::Infinite);
        }
        let mut v = 3 * arith::valuation(&self.a, p) as i64;
        v += match p {
            2 => 8,
            3 => 3,
            _ => 0,
        };
        v -= arith::valuation(&self.delta_f(), p) as i64;
        Ok(JValuation::Finite(v))
    }
}

pub fn delta_f(a: &BigInt, b: &BigInt) -> BigInt {
    a.pow(3) * 4 + b * b * 27
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveInvariants {
    #[serde(serialize_with = "crate::json::big_int_str")]
    pub delta_f: BigInt,
    #[serde(serialize_with = "crate::json::big_int_str")]
    pub delta_e: BigInt,
    #[serde(serialize_with = "crate::json::big_int_str")]
    pub height: BigInt,
    pub squarefree_delta_f: bool,
    /// Factorization of `|delta_f|`.
    #[serde(serialize_with = "crate::json::factorization")]
    pub factorization: Vec<(BigUint, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JValuation {
    Finite(i64),
    /// `j = 0`.
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveRecord {
    #[serde(rename = "B")]
    pub b: i64,
    #[serde(serialize_with = "crate::json::big_int_str")]
    pub delta_f: BigInt,
    pub squarefree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveSummary {
    #[serde(rename = "A", serialize_with = "crate::json::big_int_str")]
    pub a: BigInt,
    pub range: [i64; 2],
    pub count: usize,
    pub squarefree_count: usize,
    pub density: f64,
    /// `B = 0` entries skipped.
    pub skipped_zero_b: usize,
    /// Singular `(A, B)` entries skipped.
    pub skipped_singular: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveOutput {
    pub records: Vec<SieveRecord>,
    pub summary: SieveSummary,
}

impl SieveOutput {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("B,delta_f,squarefree\n");
        for r in &self.records {
            s.push_str(&format!("{},{},{}\n", r.b, r.delta_f, r.squarefree as u8));
        }
        s
    }
}

/// Residues `r mod p^2` with `27 r^2 + 4A^3 = 0 (mod p^2)`.
fn square_roots_mod_p2(a: &BigInt, p: u64) -> Vec<u64> {
    let p2 = p * p;
    let a_mod = a.mod_floor(&BigInt::from(p2)).to_u64().expect("reduced");
    let four_a3 = mul_mod(4, mul_mod(a_mod, mul_mod(a_mod, a_mod, p2), p2), p2);
    if p == 2 || p == 3 {
        return (0..p2)
            .filter(|&r| (mul_mod(27, mul_mod(r, r, p2), p2) + four_a3).is_multiple_of(p2))
            .collect();
    }
    if a_mod % p == 0 {
        // p | A: exactly the B divisible by p, since p^3 | 4A^3
        return (0..p).map(|k| k * p).collect();
    }
    // B^2 = c (mod p^2) with c = -4A^3 / 27
    let inv27 = arith::inv_mod(27, p2).expect("p > 3");
    let c = mul_mod(p2 - four_a3, inv27, p2);
    let Some(r) = sqrt_mod_prime(c % p, p) else {
        return Vec::new();
    };
    // Hensel: (r + tp)^2 = c  =>  2rt = (c - r^2)/p (mod p)
    let r2 = mul_mod(r, r, p2);
    let diff = (c + p2 - r2) % p2;
    debug_assert_eq!(diff % p, 0);
    let rhs = diff / p;
    let t = mul_mod(rhs, arith::inv_mod(2 * r % p, p).expect("r != 0"), p);
    let root = r + t * p;
    let mut roots = vec![root % p2, (p2 - root % p2) % p2];
    roots.sort();
    roots.dedup();
    roots
}

/// Sieve `4A^3 + 27B^2` for squarefreeness over `B` in `[b_min, b_max]`.
///
/// `B = 0` and singular entries are skipped and counted in the summary.
pub fn sieve_family(a: &BigInt, b_min: i64, b_max: i64) -> Result<SieveOutput> {
    if a.is_zero() {
        return Err(Error::ZeroA);
    }
    if b_min > b_max {
        return Err(Error::EmptyRange(b_min, b_max));
    }
    let len = (b_max - b_min) as usize + 1;
    let mut marked = vec![false; len];
    for p in primes_up_to(SIEVE_PRIME_BOUND) {
        let p2 = (p * p) as i64;
        for r in square_roots_mod_p2(a, p) {
            let start = b_min + (r as i64 - b_min).rem_euclid(p2);
            let mut b = start;
            while b <= b_max {
                marked[(b - b_min) as usize] = true;
                b += p2;
            }
        }
    }

    let a3: BigInt = a.pow(3) * 4;
    let rows: Vec<Option<SieveRecord>> = (0..len)
        .into_par_iter()
        .map(|i| {
            let b = b_min + i as i64;
            if b == 0 {
                return None;
            }
            let bb = BigInt::from(b);
            let delta: BigInt = &a3 + &bb * &bb * 27;
            if delta.is_zero() {
                return None;
            }
            let squarefree = !marked[i] && arith::is_squarefree(&delta).expect("nonzero");
            Some(SieveRecord {
                b,
                delta_f: delta,
                squarefree,
            })
        })
        .collect();

    let skipped_zero_b = usize::from(b_min <= 0 && 0 <= b_max);
    let skipped_singular = rows.iter().filter(|r| r.is_none()).count() - skipped_zero_b;
    let records: Vec<SieveRecord> = rows.into_iter().flatten().collect();
    let squarefree_count = records.iter().filter(|r| r.squarefree).count();
    let density = if records.is_empty() {
        0.0
    } else {
        squarefree_count as f64 / records.len() as f64
    };
    Ok(SieveOutput {
        summary: SieveSummary {
            a: a.clone(),
            range: [b_min, b_max],
            count: records.len(),
            squarefree_count,
            density,
            skipped_zero_b,
            skipped_singular,
        },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(a: i64, b: i64) -> WeierstrassCurve {
        WeierstrassCurve::new(a, b).unwrap()
    }

    #[test]
    fn invariant_examples() {
        let inv = curve(1, 1).invariants();
        assert_eq!(inv.delta_f, BigInt::from(31));
        assert_eq!(inv.delta_e, BigInt::from(-496));
        assert_eq!(inv.height, BigInt::from(27));
        assert!(inv.squarefree_delta_f);

        let inv = curve(1, 2).invariants();
        assert_eq!(inv.delta_f, BigInt::from(112));
        assert!(!inv.squarefree_delta_f);
        assert_eq!(
            inv.factorization,
            vec![(BigUint::from(2u32), 4), (BigUint::from(7u32), 1)]
        );

        let inv = curve(0, 1).invariants();
        assert_eq!(inv.delta_f, BigInt::from(27));
        assert_eq!(inv.delta_e, BigInt::from(-432));
        assert_eq!(inv.height, BigInt::from(27));
        assert!(!inv.squarefree_delta_f);
    }

    #[test]
    fn singular_curve_rejected() {
        // A = -3, B = 2: 4(-27) + 27*4 = 0
        assert_eq!(WeierstrassCurve::new(-3, 2), Err(Error::SingularCurve));
        assert_eq!(WeierstrassCurve::new(0, 0), Err(Error::SingularCurve));
    }

    #[test]
    fn j_valuation_examples() {
        assert_eq!(curve(1, 1).j_valuation(31), Ok(JValuation::Finite(-1)));
        assert_eq!(curve(1, 1).j_valuation(7), Ok(JValuation::Finite(0)));
        assert_eq!(curve(0, 1).j_valuation(5), Ok(JValuation::Infinite));
        assert_eq!(curve(1, 1).j_valuation(2), Ok(JValuation::Finite(8)));
        assert_eq!(curve(1, 1).j_valuation(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn sieve_examples() {
        let out = sieve_family(&BigInt::from(1), 1, 4).unwrap();
        let flags: Vec<(i64, bool)> = out
            .records
            .iter()
            .map(|r| (r.delta_f.to_i64().unwrap(), r.squarefree))
            .collect();
        assert_eq!(
            flags,
            vec![(31, true), (112, false), (247, true), (436, false)]
        );

        let out = sieve_family(&BigInt::from(-1), 1, 1).unwrap();
        assert_eq!(out.records[0].delta_f, BigInt::from(23));
        assert!(out.records[0].squarefree);

        assert_eq!(
            sieve_family(&BigInt::from(0), 1, 4).unwrap_err(),
            Error::ZeroA
        );
        assert_eq!(
            sieve_family(&BigInt::from(1), 5, 4).unwrap_err(),
            Error::EmptyRange(5, 4)
        );
    }

    #[test]
    fn sieve_skips_zero_and_singular() {
        // A = -3: B = +-2 are singular
        let out = sieve_family(&BigInt::from(-3), -3, 3).unwrap();
        assert_eq!(out.summary.skipped_zero_b, 1);
        assert_eq!(out.summary.skipped_singular, 2);
        let bs: Vec<i64> = out.records.iter().map(|r| r.b).collect();
        assert_eq!(bs, vec![-3, -1, 1, 3]);
    }

    #[test]
    fn hensel_roots_are_roots() {
        for a in [-7i64, -1, 1, 2, 5, 10, 12, 49] {
            let ab = BigInt::from(a);
            for p in primes_up_to(60) {
                let p2 = (p * p) as i64;
                let expected: Vec<u64> = (0..p2)
                    .filter(|&r| (4 * a.pow(3) + 27 * r * r).rem_euclid(p2) == 0)
                    .map(|r| r as u64)
                    .collect();
                assert_eq!(square_roots_mod_p2(&ab, p), expected, "A={a} p={p}");
            }
        }
    }
}
