//! Residue arithmetic modulo a small prime l.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upper bound (exclusive) on l. Products of two residues fit in a `u32`.
pub const MAX_ELL: u64 = 1 << 15;

/// A prime l, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeEll(u32);

impl PrimeEll {
    pub fn new(value: u64) -> Result<Self> {
        if !crate::arith::is_prime_u64(value) {
            return Err(Error::NotPrime(value));
        }
        if value >= MAX_ELL {
            return Err(Error::EllTooLarge(value));
        }
        Ok(PrimeEll(value as u32))
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    /// Canonical residue of an arbitrary signed integer.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, x: u32, y: u32) -> u32 {
        let s = x + y;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, x: u32, y: u32) -> u32 {
        if x >= y {
            x - y
        } else {
            x + self.0 - y
        }
    }

    #[inline]
    pub fn neg(self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.0 - x
        }
    }

    #[inline]
    pub fn mul(self, x: u32, y: u32) -> u32 {
        x * y % self.0
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue.
    pub fn inv(self, x: u32) -> Option<u32> {
        if x.is_multiple_of(self.0) {
            None
        } else {
            Some(self.pow(x, self.0 as u64 - 2))
        }
    }

    /// Classify a residue as zero, a nonzero square or a nonsquare
    /// (Euler's criterion).
    pub fn disc_class(self, x: u32) -> DiscClass {
        if x == 0 {
            DiscClass::Zero
        } else if self.pow(x, (self.0 as u64 - 1) / 2) == 1 {
            DiscClass::NonzeroSquare
        } else {
            DiscClass::Nonsquare
        }
    }

    /// Smallest nonsquare residue; `None` for l = 2.
    pub fn least_nonsquare(self) -> Option<u32> {
        (2..self.0).find(|&x| self.disc_class(x) == DiscClass::Nonsquare)
    }

    /// Smallest generator of the multiplicative group.
    pub fn primitive_root(self) -> u32 {
        if self.0 == 2 {
            return 1;
        }
        let order = self.0 as u64 - 1;
        let factors: Vec<u64> = crate::arith::factor_u64(order)
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        (2..self.0)
            .find(|&g| factors.iter().all(|&q| self.pow(g, order / q) != 1))
            .expect("every prime field has a primitive root")
    }
}

impl fmt::Display for PrimeEll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u64> for PrimeEll {
    type Error = Error;

    fn try_from(value: u64) -> Result<Self> {
        PrimeEll::new(value)
    }
}

/// Quadratic-residue class of a discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscClass {
    Zero,
    NonzeroSquare,
    Nonsquare,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_large_primes() {
        assert_eq!(PrimeEll::new(4), Err(Error::NotPrime(4)));
        assert_eq!(PrimeEll::new(1), Err(Error::NotPrime(1)));
        assert_eq!(PrimeEll::new(0), Err(Error::NotPrime(0)));
        assert_eq!(PrimeEll::new(32771), Err(Error::EllTooLarge(32771)));
        assert_eq!(PrimeEll::new(13).unwrap().value(), 13);
    }

    #[test]
    fn disc_class_matches_squaring_table() {
        for ell in [2u64, 3, 5, 7, 11, 13] {
            let e = PrimeEll::new(ell).unwrap();
            let squares: Vec<u32> = (1..e.value()).map(|x| e.mul(x, x)).collect();
            for x in 0..e.value() {
                let expected = if x == 0 {
                    DiscClass::Zero
                } else if squares.contains(&x) {
                    DiscClass::NonzeroSquare
                } else {
                    DiscClass::Nonsquare
                };
                assert_eq!(e.disc_class(x), expected, "l={ell} x={x}");
            }
        }
    }

    #[test]
    fn inverses_and_primitive_roots() {
        let e = PrimeEll::new(13).unwrap();
        assert_eq!(e.inv(5), Some(8));
        assert_eq!(e.inv(0), None);
        assert_eq!(e.primitive_root(), 2);
        assert_eq!(PrimeEll::new(7).unwrap().primitive_root(), 3);
        assert_eq!(e.least_nonsquare(), Some(2));
        assert_eq!(PrimeEll::new(2).unwrap().least_nonsquare(), None);
    }
}
