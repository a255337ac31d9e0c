//! Fixed-A family runs: sieve `B`, certify surjectivity, bound discriminants,
//! count below `X` and fit the growth exponent.
//!
//! For a squarefree `delta_f = 4A^3 + 27B^2` every prime `p | delta_f` with
//! `p > 3` has inertia of order l, generated up to conjugacy by the
//! transvection, so the degree-d field attached to the curve has discriminant
//! at most `c_l * |delta_f|^k` with `k` the transvection's index.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::curves::{delta_f, WeierstrassCurve};
use crate::field::PrimeEll;
use crate::malle::inertia_exponent;
use crate::perm::{build_rep, GroupTag, RepKind};
use crate::surjectivity::{certify, SurjectivityVerdict};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CPolicy {
    /// `c_l = 1`.
    Unit,
    /// `prod_{p | 6l} p^(d - 1 + d * floor(log_p d))`.
    WildBound,
}

impl std::str::FromStr for CPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(CPolicy::Unit),
            "wild-bound" => Ok(CPolicy::WildBound),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// Constant absorbing the wildly ramified primes for a degree-d field.
pub fn c_ell(policy: CPolicy, ell: PrimeEll, degree: usize) -> BigUint {
    match policy {
        CPolicy::Unit => BigUint::one(),
        CPolicy::WildBound => {
            let mut primes = vec![2u64, 3];
            if ell.value() > 3 {
                primes.push(ell.value() as u64);
            }
            let d = degree as u64;
            primes
                .into_iter()
                .map(|p| {
                    let mut log = 0u64;
                    let mut acc = p;
                    while acc <= d {
                        log += 1;
                        acc *= p;
                    }
                    BigUint::from(p).pow((d - 1 + d * log) as u32)
                })
                .product()
        }
    }
}

/// Parse `X` given as a decimal integer, `10^k` or `n^k`.
pub fn parse_x(s: &str) -> Result<BigUint> {
    let err = || Error::Parse(s.to_string());
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let base: BigUint = base.trim().parse().map_err(|_| err())?;
        let exp: u32 = exp.trim().parse().map_err(|_| err())?;
        Ok(base.pow(exp))
    } else {
        s.parse().map_err(|_| err())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyConfig {
    pub ell: PrimeEll,
    pub a: BigInt,
    pub rep: RepKind,
    pub group: GroupTag,
    pub b_min: i64,
    pub b_max: i64,
    pub budget: u64,
    pub c_policy: CPolicy,
    pub x_grid: Vec<BigUint>,
}

impl FamilyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.a.is_zero() {
            return Err(Error::ZeroA);
        }
        if self.b_min < 1 {
            return Err(Error::InvalidConfig("B must be positive".into()));
        }
        if self.b_min > self.b_max {
            return Err(Error::EmptyRange(self.b_min, self.b_max));
        }
        if self.x_grid.iter().any(|x| x.is_zero()) {
            return Err(Error::InvalidConfig("X must be positive".into()));
        }
        if self.x_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "X grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

impl Serialize for FamilyConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(8))?;
        m.serialize_entry("ell", &self.ell)?;
        m.serialize_entry("A", &self.a.to_string())?;
        m.serialize_entry("rep", self.rep.name())?;
        m.serialize_entry("group", &self.group)?;
        m.serialize_entry("B_range", &[self.b_min, self.b_max])?;
        m.serialize_entry("budget", &self.budget)?;
        m.serialize_entry("c_policy", &self.c_policy)?;
        let grid: Vec<String> = self.x_grid.iter().map(|x| x.to_string()).collect();
        m.serialize_entry("x_grid", &grid)?;
        m.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExcludedReason {
    Singular,
    NonSquarefree,
    NotCertified,
}

impl ExcludedReason {
    pub fn name(self) -> &'static str {
        match self {
            ExcludedReason::Singular => "singular",
            ExcludedReason::NonSquarefree => "non-squarefree",
            ExcludedReason::NotCertified => "not-certified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRecord {
    #[serde(rename = "B")]
    pub b: i64,
    #[serde(serialize_with = "crate::json::big_int_str")]
    pub delta_f: BigInt,
    pub squarefree: bool,
    /// Only computed for squarefree records.
    pub verdict: Option<SurjectivityVerdict>,
    /// `c_l * |delta_f|^k` when squarefree and certified.
    #[serde(serialize_with = "crate::json::opt_big_uint_str")]
    pub disc_bound: Option<BigUint>,
    pub excluded_reason: Option<ExcludedReason>,
    /// Primes dividing `delta_f`.
    #[serde(serialize_with = "crate::json::big_uint_seq")]
    pub support: Vec<BigUint>,
}

impl FamilyRecord {
    pub fn is_counted(&self) -> bool {
        self.disc_bound.is_some()
    }

    pub fn certified(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.is_certified())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountPoint {
    #[serde(rename = "X", serialize_with = "crate::json::big_uint_str")]
    pub x: BigUint,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slope {
    #[serde(serialize_with = "sig12")]
    pub value: f64,
    #[serde(serialize_with = "sig12")]
    pub stderr: f64,
}

fn sig12<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(crate::json::round_sig12(*x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Distinctness {
    pub pass: bool,
    /// Pairs of `B` whose counted records share `delta_f` or prime support.
    pub offending_pairs: Vec<[i64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub config: FamilyConfig,
    pub degree: usize,
    pub inertia_ind: usize,
    #[serde(serialize_with = "crate::json::big_uint_str")]
    pub c_ell: BigUint,
    pub records: Vec<FamilyRecord>,
    pub counts: Vec<CountPoint>,
    pub slope: Option<Slope>,
    pub distinctness: Distinctness,
}

impl FamilyReport {
    pub fn counted(&self) -> impl Iterator<Item = &FamilyRecord> {
        self.records.iter().filter(|r| r.is_counted())
    }

    pub fn certified_fraction(&self) -> f64 {
        let sqf: Vec<_> = self.records.iter().filter(|r| r.squarefree).collect();
        if sqf.is_empty() {
            return 0.0;
        }
        sqf.iter().filter(|r| r.certified()).count() as f64 / sqf.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("B,delta_f,squarefree,certified,disc_bound,excluded_reason\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.b,
                r.delta_f,
                r.squarefree as u8,
                r.certified() as u8,
                r.disc_bound
                    .as_ref()
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
                r.excluded_reason.map(|e| e.name()).unwrap_or(""),
            ));
        }
        s
    }
}

fn record_for(cfg: &FamilyConfig, b: i64, k: usize, c: &BigUint) -> FamilyRecord {
    let delta = delta_f(&cfg.a, &BigInt::from(b));
    if delta.is_zero() {
        return FamilyRecord {
            b,
            delta_f: delta,
            squarefree: false,
            verdict: None,
            disc_bound: None,
            excluded_reason: Some(ExcludedReason::Singular),
            support: Vec::new(),
        };
    }
    let factors = arith::factor(&delta).expect("nonzero");
    let squarefree = factors.iter().all(|&(_, e)| e == 1);
    let support = factors.into_iter().map(|(p, _)| p).collect();
    let verdict = squarefree.then(|| {
        let curve = WeierstrassCurve::new(cfg.a.clone(), b).expect("nonsingular");
        certify(&curve, cfg.ell, cfg.budget).expect("l >= 5 checked by run_family")
    });
    let certified = verdict.as_ref().is_some_and(|v| v.is_certified());
    let disc_bound = (squarefree && certified).then(|| c * delta.abs().magnitude().pow(k as u32));
    let excluded_reason = if !squarefree {
        Some(ExcludedReason::NonSquarefree)
    } else if !certified {
        Some(ExcludedReason::NotCertified)
    } else {
        None
    };
    FamilyRecord {
        b,
        delta_f: delta,
        squarefree,
        verdict,
        disc_bound,
        excluded_reason,
        support,
    }
}

/// Run the family construction on the current rayon pool.
pub fn run_family(cfg: &FamilyConfig) -> Result<FamilyReport> {
    cfg.validate()?;
    if cfg.ell.value() < 5 {
        return Err(Error::UnsupportedPrime(cfg.ell.value() as u64));
    }
    let rep = build_rep(cfg.ell, cfg.rep.clone(), cfg.group)?;
    let k = inertia_exponent(&rep)?;
    let c = c_ell(cfg.c_policy, cfg.ell, rep.degree());

    let records: Vec<FamilyRecord> = (cfg.b_min..=cfg.b_max)
        .into_par_iter()
        .map(|b| record_for(cfg, b, k, &c))
        .collect();

    let mut report = FamilyReport {
        config: cfg.clone(),
        degree: rep.degree(),
        inertia_ind: k,
        c_ell: c,
        records,
        counts: Vec::new(),
        slope: None,
        distinctness: Distinctness {
            pass: true,
            offending_pairs: Vec::new(),
        },
    };
    report.counts = cfg
        .x_grid
        .iter()
        .map(|x| CountPoint {
            x: x.clone(),
            count: count_below(&report, x),
        })
        .collect();
    let points: Vec<(BigUint, usize)> = report
        .counts
        .iter()
        .filter(|p| p.count > 0)
        .map(|p| (p.x.clone(), p.count))
        .collect();
    if points.len() >= 3 {
        report.slope = Some(fit_exponent(&points)?);
    }
    report.distinctness = distinctness_check(&report);
    Ok(report)
}

/// [`run_family`] on a dedicated pool of `threads` workers.
pub fn run_family_with_threads(cfg: &FamilyConfig, threads: usize) -> Result<FamilyReport> {
    with_thread_cap(Some(threads), || run_family(cfg))?
}

/// Run `f` on a pool of at most `threads` workers (default: all cores).
pub fn with_thread_cap<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidConfig("thread count must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(pool.install(f))
}

/// Number of records with `disc_bound <= x`.
pub fn count_below(report: &FamilyReport, x: &BigUint) -> usize {
    report
        .records
        .iter()
        .filter(|r| r.disc_bound.as_ref().is_some_and(|d| d <= x))
        .count()
}

fn ln_big(x: &BigUint) -> f64 {
    let shift = x.bits().saturating_sub(64);
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Least-squares slope of `ln(count)` against `ln(X)`, with its standard
/// error (zero for two points).
pub fn fit_exponent(points: &[(BigUint, usize)]) -> Result<Slope> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, c)| *c > 0 && !x.is_zero())
        .map(|(x, c)| (ln_big(x), (*c as f64).ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable points, need at least 2",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all X values coincide".into()));
    }
    let value = sxy / sxx;
    let stderr = if usable.len() > 2 {
        let ssr: f64 = usable
            .iter()
            .map(|p| (p.1 - my - value * (p.0 - mx)).powi(2))
            .sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(Slope { value, stderr })
}

/// Counted records must have pairwise distinct `delta_f` and prime support.
pub fn distinctness_check(report: &FamilyReport) -> Distinctness {
    distinct_records(report.counted())
}

pub fn distinct_records<'a>(records: impl Iterator<Item = &'a FamilyRecord>) -> Distinctness {
    let mut by_delta: HashMap<&BigInt, i64> = HashMap::new();
    let mut by_support: HashMap<&[BigUint], i64> = HashMap::new();
    let mut offending_pairs = Vec::new();
    for r in records {
        let first_delta = by_delta.get(&r.delta_f).copied();
        let first_support = by_support.get(r.support.as_slice()).copied();
        if let Some(b) = first_delta.or(first_support) {
            offending_pairs.push([b, r.b]);
        }
        by_delta.entry(&r.delta_f).or_insert(r.b);
        by_support.entry(r.support.as_slice()).or_insert(r.b);
    }
    Distinctness {
        pass: offending_pairs.is_empty(),
        offending_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ell(v: u64) -> PrimeEll {
        PrimeEll::new(v).unwrap()
    }

    fn config(
        rep: RepKind,
        group: GroupTag,
        b_max: i64,
        budget: u64,
        grid: &[&str],
    ) -> FamilyConfig {
        FamilyConfig {
            ell: ell(13),
            a: BigInt::from(1),
            rep,
            group,
            b_min: 1,
            b_max,
            budget,
            c_policy: CPolicy::Unit,
            x_grid: grid.iter().map(|s| parse_x(s).unwrap()).collect(),
        }
    }

    fn record(b: i64, delta: i64, support: &[u64]) -> FamilyRecord {
        FamilyRecord {
            b,
            delta_f: BigInt::from(delta),
            squarefree: true,
            verdict: None,
            disc_bound: Some(BigUint::from(delta as u64)),
            excluded_reason: None,
            support: support.iter().map(|&p| BigUint::from(p)).collect(),
        }
    }

    #[test]
    fn parse_x_forms() {
        assert_eq!(parse_x("10^3").unwrap(), BigUint::from(1000u32));
        assert_eq!(parse_x("31^2").unwrap(), BigUint::from(961u32));
        assert_eq!(parse_x("12345").unwrap(), BigUint::from(12345u32));
        assert!(parse_x("ten").is_err());
        assert!(parse_x("10^x").is_err());
    }

    #[test]
    fn small_projective_run() {
        let cfg = config(
            RepKind::Projective,
            GroupTag::Pgl2,
            4,
            1000,
            &["31^12", "247^12"],
        );
        let report = run_family(&cfg).unwrap();
        assert_eq!(report.inertia_ind, 12);
        let excluded: Vec<_> = report.records.iter().map(|r| r.excluded_reason).collect();
        assert_eq!(excluded[1], Some(ExcludedReason::NonSquarefree));
        assert_eq!(excluded[3], Some(ExcludedReason::NonSquarefree));
        assert!(report.records[0].certified() && report.records[2].certified());
        assert_eq!(report.counts[0].count, 1);
        assert_eq!(report.counts[1].count, 2);
        assert_eq!(
            report.records[0].disc_bound,
            Some(BigUint::from(31u32).pow(12u32))
        );
        assert!(report.distinctness.pass);
        assert!(report.slope.is_none());

        // X exactly at the largest bound is inclusive, just below is not
        let top = BigUint::from(247u32).pow(12u32);
        assert_eq!(count_below(&report, &top), 2);
        assert_eq!(count_below(&report, &(&top - 1u32)), 1);
        assert_eq!(count_below(&report, &BigUint::from(30u32)), 0);
    }

    #[test]
    fn empty_budget_cannot_certify() {
        let cfg = config(RepKind::Projective, GroupTag::Pgl2, 1, 3, &["10^48"]);
        let report = run_family(&cfg).unwrap();
        assert_eq!(
            report.records[0].excluded_reason,
            Some(ExcludedReason::NotCertified)
        );
        assert_eq!(report.counts[0].count, 0);
    }

    #[test]
    fn natural_counted_subset_of_projective() {
        let grid = ["10^400"];
        let nat = run_family(&config(RepKind::Natural, GroupTag::Gl2, 50, 500, &grid)).unwrap();
        let proj =
            run_family(&config(RepKind::Projective, GroupTag::Pgl2, 50, 500, &grid)).unwrap();
        let nat_b: Vec<i64> = nat.counted().map(|r| r.b).collect();
        let proj_b: Vec<i64> = proj.counted().map(|r| r.b).collect();
        assert!(nat_b.iter().all(|b| proj_b.contains(b)));
        assert_eq!(nat.inertia_ind, 144);
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(RepKind::Projective, GroupTag::Pgl2, 4, 100, &["10", "5"]);
        assert!(matches!(run_family(&cfg), Err(Error::InvalidConfig(_))));
        cfg.x_grid = vec![BigUint::from(10u32)];
        cfg.a = BigInt::zero();
        assert_eq!(run_family(&cfg).unwrap_err(), Error::ZeroA);
        cfg.a = BigInt::one();
        cfg.b_min = 0;
        assert!(matches!(run_family(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn fit_examples() {
        let p = |x: &str, c: usize| (parse_x(x).unwrap(), c);
        let s = fit_exponent(&[p("10^24", 10), p("10^48", 100)]).unwrap();
        assert!((s.value - 1.0 / 24.0).abs() < 1e-14);
        let s = fit_exponent(&[p("10^24", 7), p("10^48", 7), p("10^96", 7)]).unwrap();
        assert_eq!(s.value, 0.0);
        let s = fit_exponent(&[p("2^288", 2), p("2^576", 4), p("2^1152", 16)]).unwrap();
        assert!((s.value - 1.0 / 288.0).abs() < 1e-12);
        assert!(s.stderr < 1e-12);
        assert!(matches!(
            fit_exponent(&[p("10", 3), p("100", 0)]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn distinctness_examples() {
        let ok = distinct_records([record(1, 31, &[31]), record(3, 247, &[13, 19])].iter());
        assert!(ok.pass);
        let dup = distinct_records([record(1, 31, &[31]), record(5, 31, &[31])].iter());
        assert!(!dup.pass);
        assert_eq!(dup.offending_pairs, vec![[1, 5]]);
        assert!(distinct_records(std::iter::empty()).pass);
    }

    #[test]
    fn wild_bound_constant() {
        // d = 14: 2^(13 + 14*3) 3^(13 + 14*2) 13^(13 + 14*1)
        let c = c_ell(CPolicy::WildBound, ell(13), 14);
        let expected = BigUint::from(2u32).pow(55u32)
            * BigUint::from(3u32).pow(41u32)
            * BigUint::from(13u32).pow(27u32);
        assert_eq!(c, expected);
        assert_eq!(c_ell(CPolicy::Unit, ell(13), 14), BigUint::one());
    }
}
