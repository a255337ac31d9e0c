//! The group GL2(F_l): elements, invariants, enumeration and conjugacy classes.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::field::{DiscClass, PrimeEll};
use crate::{Error, Result};

/// Order of GL2(F_l), `(l^2 - 1)(l^2 - l)`.
pub fn gl2_order(ell: PrimeEll) -> u64 {
    let l = ell.value() as u64;
    (l * l - 1) * (l * l - l)
}

/// Order of PGL2(F_l), `l(l^2 - 1)`.
pub fn pgl2_order(ell: PrimeEll) -> u64 {
    let l = ell.value() as u64;
    l * (l * l - 1)
}

/// An invertible 2x2 matrix `[[a, b], [c, d]]` over F_l.
///
/// Entries are kept in `[0, l)` so that equality is structural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gl2Element {
    a: u32,
    b: u32,
    c: u32,
    d: u32,
    ell: PrimeEll,
}

impl Gl2Element {
    pub fn new(ell: PrimeEll, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = Gl2Element {
            a: ell.reduce(a),
            b: ell.reduce(b),
            c: ell.reduce(c),
            d: ell.reduce(d),
            ell,
        };
        if m.det() == 0 {
            return Err(Error::SingularMatrix(ell.value()));
        }
        Ok(m)
    }

    /// Caller guarantees reduced entries and nonzero determinant.
    #[inline]
    pub(crate) fn from_reduced(ell: PrimeEll, a: u32, b: u32, c: u32, d: u32) -> Self {
        debug_assert!(a < ell.value() && b < ell.value() && c < ell.value() && d < ell.value());
        Gl2Element { a, b, c, d, ell }
    }

    pub fn identity(ell: PrimeEll) -> Self {
        Self::scalar(ell, 1)
    }

    pub fn scalar(ell: PrimeEll, s: u32) -> Self {
        Self::from_reduced(ell, s % ell.value(), 0, 0, s % ell.value())
    }

    /// The transvection `[[1, 1], [0, 1]]`, generating a Sylow l-subgroup.
    pub fn inertia_generator(ell: PrimeEll) -> Self {
        Self::from_reduced(ell, 1, 1 % ell.value(), 0, 1)
    }

    /// `diag(1, -1)`: fixes a line pointwise and swaps the rest in pairs.
    pub fn reflection(ell: PrimeEll) -> Self {
        Self::from_reduced(ell, 1, 0, 0, ell.neg(1))
    }

    #[inline]
    pub fn ell(&self) -> PrimeEll {
        self.ell
    }

    #[inline]
    pub fn entries(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    #[inline]
    pub fn trace(&self) -> u32 {
        self.ell.add(self.a, self.d)
    }

    #[inline]
    pub fn det(&self) -> u32 {
        let e = self.ell;
        e.sub(e.mul(self.a, self.d), e.mul(self.b, self.c))
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1 && self.b == 0 && self.c == 0 && self.d == 1
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Gl2Element) -> Result<Gl2Element> {
        if self.ell != other.ell {
            return Err(Error::ModulusMismatch(self.ell.value(), other.ell.value()));
        }
        Ok(self.mul_same(other))
    }

    #[inline]
    pub(crate) fn mul_same(&self, o: &Gl2Element) -> Gl2Element {
        let e = self.ell;
        Gl2Element::from_reduced(
            e,
            e.add(e.mul(self.a, o.a), e.mul(self.b, o.c)),
            e.add(e.mul(self.a, o.b), e.mul(self.b, o.d)),
            e.add(e.mul(self.c, o.a), e.mul(self.d, o.c)),
            e.add(e.mul(self.c, o.b), e.mul(self.d, o.d)),
        )
    }

    pub fn inverse(&self) -> Gl2Element {
        let e = self.ell;
        let di = e.inv(self.det()).expect("elements are invertible");
        Gl2Element::from_reduced(
            e,
            e.mul(self.d, di),
            e.mul(e.neg(self.b), di),
            e.mul(e.neg(self.c), di),
            e.mul(self.a, di),
        )
    }

    pub fn pow(&self, mut exp: u64) -> Gl2Element {
        let mut acc = Gl2Element::identity(self.ell);
        let mut base = *self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            base = base.mul_same(&base);
            exp >>= 1;
        }
        acc
    }

    /// `g * self * g^-1`.
    pub fn conjugate_by(&self, g: &Gl2Element) -> Result<Gl2Element> {
        Ok(g.mul(self)?.mul_same(&g.inverse()))
    }

    /// Representative of the class in PGL2: scaled so that the first nonzero
    /// entry (row-major) is 1.
    pub fn projective_canonical(&self) -> Gl2Element {
        let e = self.ell;
        let lead = [self.a, self.b, self.c, self.d]
            .into_iter()
            .find(|&x| x != 0)
            .expect("invertible matrices are nonzero");
        let s = e.inv(lead).expect("nonzero");
        Gl2Element::from_reduced(
            e,
            e.mul(self.a, s),
            e.mul(self.b, s),
            e.mul(self.c, s),
            e.mul(self.d, s),
        )
    }

    /// Order in GL2(F_l).
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut acc = *self;
        while !acc.is_identity() {
            acc = acc.mul_same(self);
            k += 1;
        }
        k
    }

    /// Order of the image in PGL2(F_l).
    pub fn projective_order(&self) -> u64 {
        let mut k = 1;
        let mut acc = *self;
        while !acc.is_scalar() {
            acc = acc.mul_same(self);
            k += 1;
        }
        k
    }

    /// Dense index in `[0, l^4)`, row-major over the entries.
    #[inline]
    pub(crate) fn code(&self) -> usize {
        let l = self.ell.value() as usize;
        ((self.a as usize * l + self.b as usize) * l + self.c as usize) * l + self.d as usize
    }

    pub fn invariants(&self) -> ElementInvariants {
        ElementInvariants::from_trace_det(self.ell, self.trace(), self.det())
    }
}

impl fmt::Display for Gl2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]] mod {}",
            self.a, self.b, self.c, self.d, self.ell
        )
    }
}

impl Serialize for Gl2Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Gl2Element", 4)?;
        s.serialize_field("a", &self.a)?;
        s.serialize_field("b", &self.b)?;
        s.serialize_field("c", &self.c)?;
        s.serialize_field("d", &self.d)?;
        s.end()
    }
}

/// Conjugacy invariants of a matrix, or of a (trace, det) pair such as a
/// Frobenius class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ElementInvariants {
    pub trace: u32,
    pub det: u32,
    /// `trace^2 - 4 det`.
    pub disc: u32,
    /// `trace^2 / det`.
    pub u: u32,
    pub disc_class: DiscClass,
}

impl ElementInvariants {
    pub fn from_trace_det(ell: PrimeEll, trace: u32, det: u32) -> Self {
        let t2 = ell.mul(trace, trace);
        let disc = ell.sub(t2, ell.mul(4 % ell.value(), det));
        let u = ell.mul(t2, ell.inv(det).expect("det is nonzero"));
        ElementInvariants {
            trace,
            det,
            disc,
            u,
            disc_class: ell.disc_class(disc),
        }
    }
}

/// All of GL2(F_l), row-major lexicographic in `(a, b, c, d)`.
pub fn gl2_elements(ell: PrimeEll) -> impl Iterator<Item = Gl2Element> {
    let l = ell.value();
    (0..l).flat_map(move |a| {
        (0..l).flat_map(move |b| {
            (0..l).flat_map(move |c| {
                (0..l).filter_map(move |d| {
                    let m = Gl2Element::from_reduced(ell, a, b, c, d);
                    (m.det() != 0).then_some(m)
                })
            })
        })
    })
}

/// Canonical representatives of PGL2(F_l), in the same order as [`gl2_elements`].
pub fn pgl2_elements(ell: PrimeEll) -> impl Iterator<Item = Gl2Element> {
    gl2_elements(ell).filter(|m| m.projective_canonical() == *m)
}

/// A generating set of GL2(F_l): `diag(g, 1)` for a primitive root `g` and
/// the two elementary transvections.
pub fn generators(ell: PrimeEll) -> Vec<Gl2Element> {
    let l = ell.value();
    vec![
        Gl2Element::from_reduced(ell, ell.primitive_root(), 0, 0, 1),
        Gl2Element::from_reduced(ell, 1, 1 % l, 0, 1),
        Gl2Element::from_reduced(ell, 1, 0, 1 % l, 1),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassFamily {
    /// Scalars `aI`.
    Central,
    /// `[[a, 1], [0, a]]`.
    NonSemisimple,
    /// `diag(a, b)` with `a < b`.
    SplitSemisimple,
    /// Companion matrix of an irreducible `x^2 - tx + n`.
    NonSplitSemisimple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub family: ClassFamily,
    pub rep: Gl2Element,
    pub size: u64,
}

/// One representative per conjugacy class of GL2(F_l), ordered by family and
/// then lexicographically by parameters.
pub fn conjugacy_class_reps(ell: PrimeEll) -> Vec<ConjugacyClass> {
    let l = ell.value();
    let l64 = l as u64;
    let mut out = Vec::new();
    for a in 1..l {
        out.push(ConjugacyClass {
            family: ClassFamily::Central,
            rep: Gl2Element::scalar(ell, a),
            size: 1,
        });
    }
    for a in 1..l {
        out.push(ConjugacyClass {
            family: ClassFamily::NonSemisimple,
            rep: Gl2Element::from_reduced(ell, a, 1 % l, 0, a),
            size: l64 * l64 - 1,
        });
    }
    for a in 1..l {
        for b in a + 1..l {
            out.push(ConjugacyClass {
                family: ClassFamily::SplitSemisimple,
                rep: Gl2Element::from_reduced(ell, a, 0, 0, b),
                size: l64 * (l64 + 1),
            });
        }
    }
    for t in 0..l {
        for n in 1..l {
            let has_root = (0..l).any(|x| {
                let v = ell.add(ell.sub(ell.mul(x, x), ell.mul(t, x)), n);
                v == 0
            });
            if !has_root {
                // companion of x^2 - t x + n
                out.push(ConjugacyClass {
                    family: ClassFamily::NonSplitSemisimple,
                    rep: Gl2Element::from_reduced(ell, 0, ell.neg(n), 1 % l, t),
                    size: l64 * (l64 - 1),
                });
            }
        }
    }
    out
}

/// Upper-triangular matrices.
pub fn borel(ell: PrimeEll) -> Vec<Gl2Element> {
    gl2_elements(ell).filter(|m| m.c == 0).collect()
}

/// Stabilizer of the column vector `(1, 0)`: `[[1, b], [0, d]]`.
pub fn vector_stabilizer(ell: PrimeEll) -> Vec<Gl2Element> {
    gl2_elements(ell).filter(|m| m.a == 1 && m.c == 0).collect()
}

/// Diagonal matrices together with the anti-diagonal coset.
pub fn split_cartan_normalizer(ell: PrimeEll) -> Vec<Gl2Element> {
    gl2_elements(ell)
        .filter(|m| (m.b == 0 && m.c == 0) || (m.a == 0 && m.d == 0))
        .collect()
}

/// `[[a, eb], [b, a]]` (e the least nonsquare) together with its coset by
/// `diag(1, -1)`, whose elements all have trace zero. Requires odd l.
pub fn nonsplit_cartan_normalizer(ell: PrimeEll) -> Result<Vec<Gl2Element>> {
    let eps = ell
        .least_nonsquare()
        .ok_or_else(|| Error::UnsupportedRep("non-split Cartan needs odd l".into()))?;
    let l = ell.value();
    let sigma = Gl2Element::reflection(ell);
    let mut out = Vec::new();
    for a in 0..l {
        for b in 0..l {
            if a == 0 && b == 0 {
                continue;
            }
            let m = Gl2Element::from_reduced(ell, a, ell.mul(eps, b), b, a);
            out.push(m);
            out.push(m.mul_same(&sigma));
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn ell(v: u64) -> PrimeEll {
        PrimeEll::new(v).unwrap()
    }

    // Independent enumeration: all 4-tuples with ad - bc != 0 in plain i64.
    fn brute_count(l: i64) -> u64 {
        let mut n = 0;
        for a in 0..l {
            for b in 0..l {
                for c in 0..l {
                    for d in 0..l {
                        if (a * d - b * c).rem_euclid(l) != 0 {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn group_order_examples() {
        assert_eq!(gl2_order(ell(2)), 6);
        assert_eq!(brute_count(5), 480);
        assert_eq!(gl2_order(ell(5)), 480);
        assert_eq!(brute_count(13), 26208);
        assert_eq!(gl2_order(ell(13)), 26208);
    }

    #[test]
    fn enumeration_cardinality() {
        for l in [2u64, 3, 5, 7] {
            let e = ell(l);
            assert_eq!(gl2_elements(e).count() as u64, gl2_order(e));
            assert_eq!(pgl2_elements(e).count() as u64, pgl2_order(e));
        }
    }

    #[test]
    fn multiplication_examples() {
        let e = ell(13);
        let t = Gl2Element::inertia_generator(e);
        assert_eq!(t.mul(&t).unwrap(), Gl2Element::new(e, 1, 2, 0, 1).unwrap());
        let r = Gl2Element::reflection(e);
        assert!(r.mul(&r.inverse()).unwrap().is_identity());
        assert!(r.mul(&r).unwrap().is_identity());
        assert_eq!(r.mul(&Gl2Element::identity(e)).unwrap(), r);
        let other = Gl2Element::identity(ell(5));
        assert_eq!(r.mul(&other), Err(Error::ModulusMismatch(13, 5)));
        assert_eq!(
            Gl2Element::new(e, 1, 2, 2, 4),
            Err(Error::SingularMatrix(13))
        );
    }

    #[test]
    fn invariant_examples() {
        let e = ell(13);
        let t = Gl2Element::inertia_generator(e).invariants();
        assert_eq!((t.trace, t.det, t.disc, t.u), (2, 1, 0, 4));
        assert_eq!(t.disc_class, DiscClass::Zero);
        let id = Gl2Element::identity(e).invariants();
        assert_eq!((id.trace, id.det, id.disc, id.u), (2, 1, 0, 4));
        let r = Gl2Element::reflection(e).invariants();
        assert_eq!((r.trace, r.det, r.disc, r.u), (0, 12, 4, 0));
        assert_eq!(r.disc_class, DiscClass::NonzeroSquare);
    }

    // Partition the whole group into conjugation orbits.
    fn brute_classes(e: PrimeEll) -> Vec<HashSet<Gl2Element>> {
        let all: Vec<_> = gl2_elements(e).collect();
        let mut seen = HashSet::new();
        let mut classes = Vec::new();
        for m in &all {
            if seen.contains(m) {
                continue;
            }
            let orbit: HashSet<_> = all.iter().map(|g| m.conjugate_by(g).unwrap()).collect();
            seen.extend(orbit.iter().copied());
            classes.push(orbit);
        }
        classes
    }

    #[test]
    fn class_reps_match_brute_force_partition() {
        for l in [2u64, 3, 5] {
            let e = ell(l);
            let reps = conjugacy_class_reps(e);
            let brute = brute_classes(e);
            assert_eq!(reps.len(), brute.len(), "l={l}");
            let total: u64 = reps.iter().map(|c| c.size).sum();
            assert_eq!(total, gl2_order(e));
            for class in &reps {
                let orbit = brute.iter().find(|o| o.contains(&class.rep)).unwrap();
                assert_eq!(orbit.len() as u64, class.size, "rep {}", class.rep);
            }
            // distinct reps lie in distinct classes
            let mut hit = HashSet::new();
            for class in &reps {
                let idx = brute.iter().position(|o| o.contains(&class.rep)).unwrap();
                assert!(hit.insert(idx));
            }
        }
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        for l in [7u64, 11, 13, 31] {
            let e = ell(l);
            let reps = conjugacy_class_reps(e);
            assert_eq!(reps.iter().map(|c| c.size).sum::<u64>(), gl2_order(e));
            let central = reps
                .iter()
                .filter(|c| c.family == ClassFamily::Central && c.size == 1)
                .count();
            assert_eq!(central as u32, e.value() - 1);
        }
    }

    #[test]
    fn explicit_subgroups_have_expected_orders() {
        for l in [5u64, 7, 13] {
            let e = ell(l);
            let n = l as usize;
            assert_eq!(borel(e).len(), (n - 1) * (n - 1) * n);
            assert_eq!(split_cartan_normalizer(e).len(), 2 * (n - 1) * (n - 1));
            assert_eq!(
                nonsplit_cartan_normalizer(e).unwrap().len(),
                2 * (n * n - 1)
            );
            assert_eq!(vector_stabilizer(e).len(), n * (n - 1));
        }
    }

    #[test]
    fn projective_canonical_form() {
        let e = ell(7);
        let m = Gl2Element::new(e, 0, 3, 2, 5).unwrap();
        let c = m.projective_canonical();
        assert_eq!(c.entries()[1], 1);
        assert_eq!(c.projective_canonical(), c);
        assert_eq!(
            Gl2Element::scalar(e, 3).projective_canonical(),
            Gl2Element::identity(e)
        );
    }

    #[test]
    fn generators_generate() {
        for l in [2u64, 3, 5] {
            let e = ell(l);
            let gens = generators(e);
            let mut seen: HashSet<Gl2Element> = HashSet::from([Gl2Element::identity(e)]);
            let mut frontier = vec![Gl2Element::identity(e)];
            while let Some(x) = frontier.pop() {
                for g in &gens {
                    let y = g.mul_same(&x);
                    if seen.insert(y) {
                        frontier.push(y);
                    }
                }
            }
            assert_eq!(seen.len() as u64, gl2_order(e));
        }
    }
}
