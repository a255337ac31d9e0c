//! Faithful transitive permutation representations of GL2(F_l) and PGL2(F_l).

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::field::PrimeEll;
use crate::gl2::{self, conjugacy_class_reps, Gl2Element};
use crate::{Error, Result};

/// Above this degree the regular representation's orbit counts come from
/// element orders (the action is free) instead of materialized permutations.
pub const REGULAR_SHORTCUT_DEGREE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GroupTag {
    #[serde(rename = "GL2")]
    Gl2,
    #[serde(rename = "PGL2")]
    Pgl2,
}

impl GroupTag {
    pub fn name(self) -> &'static str {
        match self {
            GroupTag::Gl2 => "GL2",
            GroupTag::Pgl2 => "PGL2",
        }
    }

    /// Canonical representative of `m` in this group.
    #[inline]
    pub fn canonical(self, m: &Gl2Element) -> Gl2Element {
        match self {
            GroupTag::Gl2 => *m,
            GroupTag::Pgl2 => m.projective_canonical(),
        }
    }

    #[inline]
    pub fn is_identity(self, m: &Gl2Element) -> bool {
        match self {
            GroupTag::Gl2 => m.is_identity(),
            GroupTag::Pgl2 => m.is_scalar(),
        }
    }

    pub fn element_order(self, m: &Gl2Element) -> u64 {
        match self {
            GroupTag::Gl2 => m.order(),
            GroupTag::Pgl2 => m.projective_order(),
        }
    }

    pub fn order(self, ell: PrimeEll) -> u64 {
        match self {
            GroupTag::Gl2 => gl2::gl2_order(ell),
            GroupTag::Pgl2 => gl2::pgl2_order(ell),
        }
    }
}

impl std::str::FromStr for GroupTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GL2" => Ok(GroupTag::Gl2),
            "PGL2" => Ok(GroupTag::Pgl2),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// The whole group in enumeration order with an inverse lookup.
#[derive(Debug)]
pub struct GroupTable {
    tag: GroupTag,
    elements: Vec<Gl2Element>,
    index: Vec<u32>,
}

impl GroupTable {
    pub fn new(ell: PrimeEll, tag: GroupTag) -> Self {
        let elements: Vec<Gl2Element> = match tag {
            GroupTag::Gl2 => gl2::gl2_elements(ell).collect(),
            GroupTag::Pgl2 => gl2::pgl2_elements(ell).collect(),
        };
        let l = ell.value() as usize;
        let mut index = vec![u32::MAX; l * l * l * l];
        for (i, m) in elements.iter().enumerate() {
            index[m.code()] = i as u32;
        }
        GroupTable {
            tag,
            elements,
            index,
        }
    }

    pub fn elements(&self) -> &[Gl2Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn index_of(&self, m: &Gl2Element) -> usize {
        let i = self.index[self.tag.canonical(m).code()];
        debug_assert!(i != u32::MAX);
        i as usize
    }
}

/// Which set the group acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepKind {
    /// Nonzero column vectors of F_l^2 (GL2 only), degree `l^2 - 1`.
    Natural,
    /// The projective line, degree `l + 1`.
    Projective,
    /// Left multiplication on the group itself.
    Regular,
    /// Left multiplication on the left cosets of the given subgroup.
    Coset(Vec<Gl2Element>),
}

impl RepKind {
    pub fn name(&self) -> &'static str {
        match self {
            RepKind::Natural => "natural",
            RepKind::Projective => "projective",
            RepKind::Regular => "regular",
            RepKind::Coset(_) => "coset",
        }
    }
}

/// A point of the acted-on set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLabel {
    Vector(u32, u32),
    /// `[x : y]`.
    Projective(u32, u32),
    Element(Gl2Element),
    /// A coset, named by its first element in enumeration order.
    Coset(Gl2Element),
}

#[derive(Debug, Clone)]
enum Points {
    Vectors,
    ProjectiveLine,
    Elements(Arc<GroupTable>),
    Cosets {
        table: Arc<GroupTable>,
        coset_of: Arc<Vec<u32>>,
        reps: Arc<Vec<Gl2Element>>,
    },
}

/// A transitive, faithful action of GL2(F_l) or PGL2(F_l) on `degree` points.
#[derive(Debug, Clone)]
pub struct PermAction {
    ell: PrimeEll,
    kind: RepKind,
    group: GroupTag,
    degree: usize,
    points: Points,
}

/// Shorthand for [`PermAction::build`].
pub fn build_rep(ell: PrimeEll, kind: RepKind, group: GroupTag) -> Result<PermAction> {
    PermAction::build(ell, kind, group)
}

impl PermAction {
    /// Build the action and verify transitivity and faithfulness.
    ///
    /// Point labels: natural vectors `(x, y) != 0` row-major; projective
    /// points `[1 : t]` for `t = 0..l` then `[0 : 1]`; regular points in
    /// group enumeration order; cosets with the subgroup itself first, then
    /// in order of first appearance.
    pub fn build(ell: PrimeEll, kind: RepKind, group: GroupTag) -> Result<Self> {
        let l = ell.value() as usize;
        let (degree, points) = match (&kind, group) {
            (RepKind::Natural, GroupTag::Gl2) => (l * l - 1, Points::Vectors),
            (RepKind::Natural, GroupTag::Pgl2) => {
                return Err(Error::UnsupportedRep(
                    "PGL2 does not act on nonzero vectors".into(),
                ))
            }
            (RepKind::Projective, _) => (l + 1, Points::ProjectiveLine),
            (RepKind::Regular, _) => {
                let table = Arc::new(GroupTable::new(ell, group));
                (table.len(), Points::Elements(table))
            }
            (RepKind::Coset(subgroup), _) => {
                let table = Arc::new(GroupTable::new(ell, group));
                let (coset_of, reps) = cosets(&table, ell, subgroup)?;
                (
                    reps.len(),
                    Points::Cosets {
                        table,
                        coset_of: Arc::new(coset_of),
                        reps: Arc::new(reps),
                    },
                )
            }
        };
        let rep = PermAction {
            ell,
            kind,
            group,
            degree,
            points,
        };
        rep.check_transitive()?;
        // g * 1 = g, so left multiplication on the group is always faithful
        if !matches!(rep.points, Points::Elements(_)) {
            rep.check_faithful()?;
        }
        Ok(rep)
    }

    pub fn ell(&self) -> PrimeEll {
        self.ell
    }

    pub fn kind(&self) -> &RepKind {
        &self.kind
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn point_label(&self, i: usize) -> PointLabel {
        assert!(i < self.degree);
        let l = self.ell.value();
        match &self.points {
            Points::Vectors => {
                let k = i as u32 + 1;
                PointLabel::Vector(k / l, k % l)
            }
            Points::ProjectiveLine => {
                if i < l as usize {
                    PointLabel::Projective(1, i as u32)
                } else {
                    PointLabel::Projective(0, 1)
                }
            }
            Points::Elements(t) => PointLabel::Element(t.elements()[i]),
            Points::Cosets { reps, .. } => PointLabel::Coset(reps[i]),
        }
    }

    /// The permutation induced by `m`.
    pub fn act(&self, m: &Gl2Element) -> Result<Perm> {
        if m.ell() != self.ell {
            return Err(Error::ModulusMismatch(self.ell.value(), m.ell().value()));
        }
        let e = self.ell;
        let l = e.value();
        let [a, b, c, d] = m.entries();
        let apply = |x: u32, y: u32| {
            (
                e.add(e.mul(a, x), e.mul(b, y)),
                e.add(e.mul(c, x), e.mul(d, y)),
            )
        };
        let images: Vec<u32> = match &self.points {
            Points::Vectors => (1..=l * l - 1)
                .map(|k| {
                    let (x, y) = apply(k / l, k % l);
                    x * l + y - 1
                })
                .collect(),
            Points::ProjectiveLine => (0..=l)
                .map(|i| {
                    let (x, y) = if i < l { apply(1, i) } else { apply(0, 1) };
                    if x == 0 {
                        l
                    } else {
                        e.mul(y, e.inv(x).expect("nonzero"))
                    }
                })
                .collect(),
            Points::Elements(t) => t
                .elements()
                .iter()
                .map(|g| t.index_of(&m.mul_same(g)) as u32)
                .collect(),
            Points::Cosets {
                table,
                coset_of,
                reps,
            } => reps
                .iter()
                .map(|g| coset_of[table.index_of(&m.mul_same(g))])
                .collect(),
        };
        Ok(Perm { images })
    }

    /// `ind(m) = degree - #orbits of m`.
    pub fn element_index(&self, m: &Gl2Element) -> Result<usize> {
        if matches!(self.points, Points::Elements(_)) && self.degree > REGULAR_SHORTCUT_DEGREE {
            if m.ell() != self.ell {
                return Err(Error::ModulusMismatch(self.ell.value(), m.ell().value()));
            }
            let order = self.group.element_order(m) as usize;
            return Ok(self.degree - self.degree / order);
        }
        Ok(self.degree - self.act(m)?.orbit_count())
    }

    fn check_transitive(&self) -> Result<()> {
        let gens: Vec<Perm> = gl2::generators(self.ell)
            .iter()
            .map(|g| self.act(g))
            .collect::<Result<_>>()?;
        let mut seen = vec![false; self.degree];
        seen[0] = true;
        let mut stack = vec![0u32];
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for g in &gens {
                let j = g.images[i as usize];
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        if count != self.degree {
            return Err(Error::NotTransitive {
                orbit: count,
                degree: self.degree,
            });
        }
        Ok(())
    }

    // The kernel is normal, so it is trivial iff no nonidentity class
    // representative acts trivially.
    fn check_faithful(&self) -> Result<()> {
        for class in conjugacy_class_reps(self.ell) {
            if self.group.is_identity(&class.rep) {
                continue;
            }
            if self.act(&class.rep)?.is_identity() {
                return Err(Error::NotFaithful(class.rep.to_string()));
            }
        }
        Ok(())
    }
}

/// Validate the subgroup and label its left cosets.
fn cosets(
    table: &GroupTable,
    ell: PrimeEll,
    subgroup: &[Gl2Element],
) -> Result<(Vec<u32>, Vec<Gl2Element>)> {
    let n = table.len();
    let mut member = vec![false; n];
    let mut h: Vec<usize> = Vec::new();
    for m in subgroup {
        if m.ell() != ell {
            return Err(Error::ModulusMismatch(ell.value(), m.ell().value()));
        }
        let i = table.index_of(m);
        if !member[i] {
            member[i] = true;
            h.push(i);
        }
    }
    if h.is_empty() {
        return Err(Error::ClosureViolation("empty subgroup".into()));
    }
    let els = table.elements();
    for &i in &h {
        let inv = table.index_of(&els[i].inverse());
        if !member[inv] {
            return Err(Error::ClosureViolation(format!(
                "inverse of {} missing",
                els[i]
            )));
        }
        for &j in &h {
            let k = table.index_of(&els[i].mul_same(&els[j]));
            if !member[k] {
                return Err(Error::ClosureViolation(format!(
                    "{} * {} missing",
                    els[i], els[j]
                )));
            }
        }
    }
    if !n.is_multiple_of(h.len()) {
        return Err(Error::ClosureViolation(
            "order does not divide the group order".into(),
        ));
    }

    let mut coset_of = vec![u32::MAX; n];
    let mut reps = Vec::with_capacity(n / h.len());
    let identity = Gl2Element::identity(ell);
    let starts = std::iter::once(identity).chain(els.iter().copied());
    for g in starts {
        if coset_of[table.index_of(&g)] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        for &j in &h {
            coset_of[table.index_of(&g.mul_same(&els[j]))] = id;
        }
        reps.push(table.elements()[table.index_of(&g)]);
    }
    Ok((coset_of, reps))
}

/// A permutation of `{0, .., d-1}`; `images[i]` is where `i` goes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// `None` unless `images` is a bijection on `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen.get_mut(i as usize)?;
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(Perm { images })
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm {
            images: other
                .images
                .iter()
                .map(|&j| self.images[j as usize])
                .collect(),
        }
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i as u32 == j)
            .count()
    }

    /// Cycle lengths in ascending order, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize;
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    /// Number of cycles, counting fixed points.
    pub fn orbit_count(&self) -> usize {
        let mut seen = vec![false; self.images.len()];
        let mut count = 0;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize;
            }
        }
        count
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}
