//! Malle index, inertia exponent and the resulting exponent reports.
//!
//! `ind(g) = d - #orbits(g)`, `ind(G)` is its minimum over nonidentity `g`
//! and `a(G) = 1/ind(G)`. For a tamely ramified prime whose inertia is
//! generated by the transvection `[[1, 1], [0, 1]]`, the exponent of that prime
//! in the discriminant of the degree-d field is `ind` of the transvection;
//! a family with squarefree `delta_f` then yields fields counted with exponent
//! `1 / (2 ind(transvection))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::field::PrimeEll;
use crate::gl2::{conjugacy_class_reps, gl2_order, Gl2Element};
use crate::perm::{build_rep, GroupTag, PermAction, RepKind};
use crate::Result;

/// Minimum index over nonidentity elements, with a minimizing class
/// representative (first in canonical class order on ties).
pub fn malle_index(rep: &PermAction) -> Result<(usize, Gl2Element)> {
    let classes: Vec<Gl2Element> = conjugacy_class_reps(rep.ell())
        .into_iter()
        .map(|c| c.rep)
        .filter(|m| !rep.group().is_identity(m))
        .collect();
    let indices: Vec<usize> = classes
        .par_iter()
        .map(|m| rep.element_index(m))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &ind) in indices.iter().enumerate() {
        if ind < indices[best] {
            best = i;
        }
    }
    Ok((indices[best], classes[best]))
}

/// Index of the transvection `[[1, 1], [0, 1]]`.
pub fn inertia_exponent(rep: &PermAction) -> Result<usize> {
    rep.element_index(&Gl2Element::inertia_generator(rep.ell()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub ell: PrimeEll,
    pub kind: String,
    pub group: GroupTag,
    pub degree: usize,
    pub malle_ind: usize,
    #[serde(serialize_with = "crate::json::rational")]
    pub malle_a: BigRational,
    pub inertia_ind: usize,
    #[serde(serialize_with = "crate::json::rational")]
    pub lower_exponent: BigRational,
    pub witness: Gl2Element,
}

pub fn report_for(rep: &PermAction) -> Result<ExponentReport> {
    let (malle_ind, witness) = malle_index(rep)?;
    let inertia_ind = inertia_exponent(rep)?;
    Ok(ExponentReport {
        ell: rep.ell(),
        kind: rep.kind().name().to_string(),
        group: rep.group(),
        degree: rep.degree(),
        malle_ind,
        malle_a: BigRational::new(BigInt::from(1), BigInt::from(malle_ind)),
        inertia_ind,
        lower_exponent: BigRational::new(BigInt::from(1), BigInt::from(2 * inertia_ind)),
        witness,
    })
}

pub fn exponent_report(ell: PrimeEll, kind: RepKind, group: GroupTag) -> Result<ExponentReport> {
    report_for(&build_rep(ell, kind, group)?)
}

impl ExponentReport {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},\"{}\"",
            self.ell,
            self.kind,
            self.group.name(),
            self.degree,
            self.malle_ind,
            crate::json::format_rational(&self.malle_a),
            self.inertia_ind,
            crate::json::format_rational(&self.lower_exponent),
            self.witness
        )
    }

    pub const CSV_HEADER: &'static str =
        "ell,kind,group,degree,malle_ind,malle_a,inertia_ind,lower_exponent,witness";
}

/// One line of the closed-form self check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormCheck {
    pub ell: u32,
    pub rep: String,
    pub quantity: String,
    pub expected: u64,
    pub computed: u64,
    pub pass: bool,
}

/// Closed forms: `ind(natural) = l(l-1)/2`, `ind(projective) = (l-1)/2`,
/// inertia `(l-1)^2` and `l-1`, and regular inertia `(l+1)(l-1)^3`.
pub fn closed_form_checks() -> Result<Vec<ClosedFormCheck>> {
    let mut out = Vec::new();
    let mut push = |ell: u64, rep: &str, quantity: &str, expected: u64, computed: u64| {
        out.push(ClosedFormCheck {
            ell: ell as u32,
            rep: rep.into(),
            quantity: quantity.into(),
            expected,
            computed,
            pass: expected == computed,
        })
    };
    for l in [3u64, 5, 7, 11, 13] {
        let ell = PrimeEll::new(l)?;
        let natural = build_rep(ell, RepKind::Natural, GroupTag::Gl2)?;
        let projective = build_rep(ell, RepKind::Projective, GroupTag::Pgl2)?;
        push(
            l,
            "natural",
            "malle_ind",
            l * (l - 1) / 2,
            malle_index(&natural)?.0 as u64,
        );
        push(
            l,
            "projective",
            "malle_ind",
            (l - 1) / 2,
            malle_index(&projective)?.0 as u64,
        );
        push(
            l,
            "natural",
            "inertia_ind",
            (l - 1) * (l - 1),
            inertia_exponent(&natural)? as u64,
        );
        push(
            l,
            "projective",
            "inertia_ind",
            l - 1,
            inertia_exponent(&projective)? as u64,
        );
    }
    for l in [3u64, 5, 7] {
        let ell = PrimeEll::new(l)?;
        let regular = build_rep(ell, RepKind::Regular, GroupTag::Gl2)?;
        let order = gl2_order(ell);
        push(
            l,
            "regular",
            "inertia_ind",
            (l + 1) * (l - 1).pow(3),
            inertia_exponent(&regular)? as u64,
        );
        push(
            l,
            "regular",
            "inertia_ind_coset_count",
            order - order / l,
            inertia_exponent(&regular)? as u64,
        );
    }
    Ok(out)
}
