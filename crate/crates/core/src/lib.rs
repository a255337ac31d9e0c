//! Malle exponents for permutation representations of GL2(F_l) and PGL2(F_l),
//! together with the elliptic-curve machinery used to build explicit families
//! of number fields with those Galois groups: squarefree discriminant sieving,
//! Frobenius-based surjectivity certification and discriminant bounds.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] and [`gl2`]: arithmetic in F_l and in the group GL2(F_l).
//! * [`perm`]: faithful transitive permutation representations and the
//!   index of a single element.
//! * [`malle`]: Malle index, inertia exponent and exponent reports.
//! * [`arith`]: integer factorization and modular square roots.
//! * [`curves`]: invariants of `y^2 = x^3 + Ax + B` and the B-family sieve.
//! * [`surjectivity`]: point counting, the Frobenius witness test and the
//!   level-13 isogeny scan.
//! * [`harness`]: the fixed-A family run, counting and exponent fitting.

pub mod arith;
pub mod curves;
pub mod field;
pub mod gl2;
pub mod harness;
pub mod json;
pub mod malle;
pub mod perm;
pub mod surjectivity;

mod error;

pub use error::{Error, Result};
pub use field::{DiscClass, PrimeEll};
pub use gl2::{ElementInvariants, Gl2Element};
pub use malle::ExponentReport;
pub use perm::{GroupTag, Perm, PermAction, RepKind};
