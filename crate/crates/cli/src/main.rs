use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use malle_core::curves::{sieve_family, WeierstrassCurve};
use malle_core::gl2;
use malle_core::harness::{self, CPolicy, FamilyConfig};
use malle_core::json::to_canonical_json;
use malle_core::malle::{closed_form_checks, exponent_report, ExponentReport};
use malle_core::surjectivity::{certify, frobenius_samples};
use malle_core::{GroupTag, PrimeEll, RepKind};

#[derive(Parser, Debug)]
#[command(
    name = "malle",
    version,
    about = "Malle exponents for GL2/PGL2 permutation representations and elliptic-curve field families",
    allow_negative_numbers = true
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Malle index, inertia index and exponents for one representation.
    Index(IndexArgs),
    /// Same as `index --all-reps`.
    Exponent(ExponentArgs),
    /// Squarefree sieve of 4A^3 + 27B^2 over a range of B.
    Sieve(SieveArgs),
    /// Frobenius traces and their mod-l classes.
    Frobenius(CurveArgs),
    /// Certify surjectivity of the mod-l representation.
    Surjective(CurveArgs),
    /// Full fixed-A family run with counts and slope fit.
    Family(FamilyArgs),
    /// Replay every closed form.
    Selfcheck,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct IndexArgs {
    #[arg(long, value_parser = parse_ell)]
    ell: PrimeEll,
    /// natural | projective | regular | coset:<borel|vector-stabilizer|split-normalizer|nonsplit-normalizer>
    #[arg(long, value_parser = parse_rep, required_unless_present = "all_reps")]
    rep: Option<RepSpec>,
    /// GL2 | PGL2 (default depends on the representation).
    #[arg(long, value_parser = parse_group)]
    group: Option<GroupTag>,
    /// Report the natural, projective and regular representations.
    #[arg(long, conflicts_with_all = ["rep", "group"])]
    all_reps: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ExponentArgs {
    #[arg(long, value_parser = parse_ell)]
    ell: PrimeEll,
    /// Accepted for symmetry with `index`; always on.
    #[arg(long)]
    all_reps: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SieveArgs {
    #[arg(long = "A", value_parser = parse_bigint)]
    a: BigInt,
    #[arg(long)]
    b_min: i64,
    #[arg(long)]
    b_max: i64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct CurveArgs {
    #[arg(long = "A", value_parser = parse_bigint)]
    a: BigInt,
    #[arg(long = "B", value_parser = parse_bigint)]
    b: BigInt,
    #[arg(long, value_parser = parse_ell)]
    ell: PrimeEll,
    /// Frobenius prime bound.
    #[arg(long, default_value_t = 1000)]
    budget: u64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct FamilyArgs {
    #[arg(long, value_parser = parse_ell)]
    ell: PrimeEll,
    #[arg(long = "A", value_parser = parse_bigint)]
    a: BigInt,
    #[arg(long, value_parser = parse_rep, default_value = "projective")]
    rep: RepSpec,
    #[arg(long)]
    b_max: i64,
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    /// Comma-separated X values, e.g. `10^48,10^72,10^96`.
    #[arg(long, value_delimiter = ',', value_parser = parse_x, required = true)]
    x_grid: Vec<num_bigint::BigUint>,
    #[arg(long, value_parser = parse_policy, default_value = "unit")]
    c_policy: CPolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Subgroup {
    Borel,
    VectorStabilizer,
    SplitNormalizer,
    NonsplitNormalizer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RepSpec {
    Natural,
    Projective,
    Regular,
    Coset(Subgroup),
}

impl RepSpec {
    fn default_group(self) -> GroupTag {
        match self {
            RepSpec::Natural | RepSpec::Regular | RepSpec::Coset(Subgroup::VectorStabilizer) => {
                GroupTag::Gl2
            }
            _ => GroupTag::Pgl2,
        }
    }

    fn kind(self, ell: PrimeEll) -> malle_core::Result<RepKind> {
        Ok(match self {
            RepSpec::Natural => RepKind::Natural,
            RepSpec::Projective => RepKind::Projective,
            RepSpec::Regular => RepKind::Regular,
            RepSpec::Coset(h) => RepKind::Coset(match h {
                Subgroup::Borel => gl2::borel(ell),
                Subgroup::VectorStabilizer => gl2::vector_stabilizer(ell),
                Subgroup::SplitNormalizer => gl2::split_cartan_normalizer(ell),
                Subgroup::NonsplitNormalizer => gl2::nonsplit_cartan_normalizer(ell)?,
            }),
        })
    }
}

fn parse_ell(s: &str) -> Result<PrimeEll, String> {
    let v: u64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a nonnegative integer"))?;
    PrimeEll::new(v).map_err(|e| e.to_string())
}

fn parse_bigint(s: &str) -> Result<BigInt, String> {
    s.parse().map_err(|_| format!("`{s}` is not an integer"))
}

fn parse_group(s: &str) -> Result<GroupTag, String> {
    s.parse().map_err(|_| format!("`{s}` is not GL2 or PGL2"))
}

fn parse_x(s: &str) -> Result<num_bigint::BigUint, String> {
    harness::parse_x(s).map_err(|_| format!("`{s}` is not a positive integer or n^k"))
}

fn parse_policy(s: &str) -> Result<CPolicy, String> {
    s.parse()
        .map_err(|_| format!("`{s}` is not unit or wild-bound"))
}

fn parse_rep(s: &str) -> Result<RepSpec, String> {
    Ok(match s {
        "natural" => RepSpec::Natural,
        "projective" => RepSpec::Projective,
        "regular" => RepSpec::Regular,
        "coset:borel" => RepSpec::Coset(Subgroup::Borel),
        "coset:vector-stabilizer" => RepSpec::Coset(Subgroup::VectorStabilizer),
        "coset:split-normalizer" => RepSpec::Coset(Subgroup::SplitNormalizer),
        "coset:nonsplit-normalizer" => RepSpec::Coset(Subgroup::NonsplitNormalizer),
        _ => return Err(format!("unknown representation `{s}`")),
    })
}

fn table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().fold(String::new(), |mut out, (k, v)| {
        let _ = writeln!(out, "{k:<width$}  {v}");
        out
    })
}

fn row(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn emit_reports(reports: &[ExponentReport], format: Format, single: bool) -> String {
    match format {
        Format::Json if single => to_canonical_json(&reports[0]),
        Format::Json => to_canonical_json(reports),
        Format::Csv => {
            let mut out = format!("{}\n", ExponentReport::CSV_HEADER);
            for r in reports {
                out.push_str(&r.to_csv_row());
                out.push('\n');
            }
            out
        }
        Format::Table => reports
            .iter()
            .map(|r| {
                table(&[
                    row("ell", r.ell),
                    row("rep", &r.kind),
                    row("group", r.group.name()),
                    row("degree", r.degree),
                    row("malle_ind", r.malle_ind),
                    row("malle_a", malle_core::json::format_rational(&r.malle_a)),
                    row("inertia_ind", r.inertia_ind),
                    row(
                        "lower_exponent",
                        malle_core::json::format_rational(&r.lower_exponent),
                    ),
                    row("witness", r.witness),
                ])
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<malle_core::Error> for Failure {
    fn from(e: malle_core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(String, bool), Failure> {
    let format = cli.format;
    let mut ok = true;
    let out = match cli.command {
        Command::Index(args) if args.all_reps => all_reps(args.ell, format)?,
        Command::Index(args) => {
            let rep = args
                .rep
                .ok_or_else(|| Failure::Usage("--rep is required".into()))?;
            let group = args.group.unwrap_or(rep.default_group());
            let report = exponent_report(args.ell, rep.kind(args.ell)?, group)?;
            emit_reports(&[report], format, true)
        }
        Command::Exponent(args) => all_reps(args.ell, format)?,
        Command::Sieve(args) => {
            let out = sieve_family(&args.a, args.b_min, args.b_max)?;
            match format {
                Format::Json => to_canonical_json(&out),
                Format::Csv => out.to_csv(),
                Format::Table => {
                    let s = &out.summary;
                    table(&[
                        row("A", &s.a),
                        row("B_range", format!("{}..={}", s.range[0], s.range[1])),
                        row("count", s.count),
                        row("squarefree", s.squarefree_count),
                        row("density", s.density),
                        row("skipped_zero_b", s.skipped_zero_b),
                        row("skipped_singular", s.skipped_singular),
                    ])
                }
            }
        }
        Command::Frobenius(args) => {
            let curve = WeierstrassCurve::new(args.a, args.b)?;
            let samples = frobenius_samples(&curve, args.ell, args.budget);
            match format {
                Format::Json => to_canonical_json(&samples),
                Format::Csv | Format::Table => {
                    let sep = if format == Format::Csv { "," } else { "\t" };
                    let mut out = [
                        "p",
                        "a_p",
                        "p_mod_ell",
                        "a_p_mod_ell",
                        "disc_mod_ell",
                        "disc_class",
                        "u_mod_ell",
                    ]
                    .join(sep);
                    out.push('\n');
                    for s in &samples {
                        let class = serde_json::to_value(s.disc_class_mod_ell)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_owned))
                            .unwrap_or_default();
                        let fields = [
                            s.p.to_string(),
                            s.a_p.to_string(),
                            s.p_mod_ell.to_string(),
                            s.a_p_mod_ell.to_string(),
                            s.disc_mod_ell.to_string(),
                            class,
                            s.u_mod_ell.to_string(),
                        ];
                        out.push_str(&fields.join(sep));
                        out.push('\n');
                    }
                    out
                }
            }
        }
        Command::Surjective(args) => {
            let curve = WeierstrassCurve::new(args.a, args.b)?;
            let verdict = certify(&curve, args.ell, args.budget)?;
            let show = |w: &Option<u64>| w.map_or("-".to_string(), |p| p.to_string());
            let w4 = verdict.witnesses.w4.as_ref().map_or("-".to_string(), |v| {
                v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
            });
            match format {
                Format::Json => to_canonical_json(&verdict),
                Format::Csv => format!(
                    "status,W1,W2,W3,W4,missing,budget\n{},{},{},{},{},{},{}\n",
                    status_name(verdict.is_certified()),
                    show(&verdict.witnesses.w1),
                    show(&verdict.witnesses.w2),
                    show(&verdict.witnesses.w3),
                    w4,
                    verdict.missing.join(" "),
                    verdict.budget
                ),
                Format::Table => table(&[
                    row("status", status_name(verdict.is_certified())),
                    row("W1", show(&verdict.witnesses.w1)),
                    row("W2", show(&verdict.witnesses.w2)),
                    row("W3", show(&verdict.witnesses.w3)),
                    row("W4", w4),
                    row("missing", verdict.missing.join(" ")),
                    row("budget", verdict.budget),
                ]),
            }
        }
        Command::Family(args) => {
            let cfg = FamilyConfig {
                ell: args.ell,
                a: args.a,
                rep: args.rep.kind(args.ell)?,
                group: args.rep.default_group(),
                b_min: 1,
                b_max: args.b_max,
                budget: args.budget,
                c_policy: args.c_policy,
                x_grid: args.x_grid,
            };
            let report = harness::run_family(&cfg)?;
            match format {
                Format::Json => to_canonical_json(&report),
                Format::Csv => report.to_csv(),
                Format::Table => {
                    let mut rows = vec![
                        row("ell", cfg.ell),
                        row("A", &cfg.a),
                        row("rep", cfg.rep.name()),
                        row("degree", report.degree),
                        row("inertia_ind", report.inertia_ind),
                        row("records", report.records.len()),
                        row("counted", report.counted().count()),
                        row("certified_fraction", report.certified_fraction()),
                    ];
                    for c in &report.counts {
                        rows.push(row(&format!("N(X={})", c.x), c.count));
                    }
                    if let Some(s) = report.slope {
                        rows.push(row("slope", format!("{} +- {}", s.value, s.stderr)));
                    }
                    rows.push(row("distinct", report.distinctness.pass));
                    table(&rows)
                }
            }
        }
        Command::Selfcheck => {
            let checks = closed_form_checks()?;
            ok = checks.iter().all(|c| c.pass);
            match format {
                Format::Json => to_canonical_json(&checks),
                Format::Csv | Format::Table => {
                    let mut out = String::from("ell,rep,quantity,expected,computed,pass\n");
                    for c in &checks {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            c.ell, c.rep, c.quantity, c.expected, c.computed, c.pass
                        );
                    }
                    if format == Format::Table {
                        out = out.replace(',', "\t");
                    }
                    out
                }
            }
        }
    };
    Ok((out, ok))
}

fn status_name(certified: bool) -> &'static str {
    if certified {
        "certified"
    } else {
        "not_certified"
    }
}

fn all_reps(ell: PrimeEll, format: Format) -> Result<String, Failure> {
    let reports = [
        (RepKind::Natural, GroupTag::Gl2),
        (RepKind::Projective, GroupTag::Pgl2),
        (RepKind::Regular, GroupTag::Gl2),
    ]
    .into_iter()
    .map(|(kind, group)| exponent_report(ell, kind, group))
    .collect::<malle_core::Result<Vec<_>>>()?;
    Ok(emit_reports(&reports, format, false))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.map(|n| n as usize);
    let result = match harness::with_thread_cap(threads, || run(cli)) {
        Ok(r) => r,
        Err(e) => Err(Failure::Domain(e.to_string())),
    };
    match result {
        Ok((out, ok)) => {
            print!("{out}");
            if !out.ends_with('\n') {
                println!();
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: closed-form mismatch");
                ExitCode::from(1)
            }
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
