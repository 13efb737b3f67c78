//! Command-line driver: identity grids, theorem verification sweeps,
//! the antisymmetrization-relation family, and ad-hoc coefficient
//! extraction, with text, line-delimited JSON, and CSV output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error. Output
//! ordering is deterministic for fixed seeds regardless of the worker
//! pool size (set `RAYON_NUM_THREADS` to control it).

pub mod expr;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::morris::{
    antisymmetrize_check, elementary_symmetric_2, grid_check, power_sum_2, IdentityKind,
    IdentityReport,
};
use crate::polyring::{sum_of_vars, ExponentCap, Monomial, RingTag, SparsePoly};
use crate::sumsets::{
    gen_instance, smallest_admissible_prime, verify, SumsetInstance, TheoremId, VerifyReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Inclusive integer range, written `a` or `a..b` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeArg {
    pub lo: u32,
    pub hi: u32,
}

impl RangeArg {
    pub fn values(&self) -> Vec<u32> {
        (self.lo..=self.hi).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad range bound {t:?}: {e}"))
        };
        if let Some((lo, hi)) = s.split_once("..") {
            Ok(RangeArg { lo: parse(lo)?, hi: parse(hi)? })
        } else {
            let v = parse(s)?;
            Ok(RangeArg { lo: v, hi: v })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "sumset-cn",
    version,
    about = "Exact verification of Morris-type coefficient identities and \
             restricted-sumset lower bounds over prime fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check coefficient identities (closed form vs. expansion) over a grid.
    Identities(IdentitiesArgs),
    /// Check the antisymmetrization relation over a family of symmetric factors.
    Lemma21(Lemma21Args),
    /// Verify theorem lower bounds on seeded random instances.
    Theorems(TheoremsArgs),
    /// Extract one exact coefficient from a polynomial expression.
    Coeff(CoeffArgs),
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    /// Comma-separated identity names (default: all seven).
    #[arg(long, value_delimiter = ',')]
    pub ids: Vec<String>,
    /// Range of n, e.g. `2` or `1..4`.
    #[arg(long, default_value = "1..4")]
    pub n: RangeArg,
    /// Range of m.
    #[arg(long, default_value = "0..2")]
    pub m: RangeArg,
    /// Range of b.
    #[arg(long, default_value = "0..4")]
    pub b: RangeArg,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fail the run on per-index inequalities of the shifted family.
    #[arg(long)]
    pub strict_shifted: bool,
}

#[derive(Debug, Args)]
pub struct Lemma21Args {
    #[arg(long, default_value = "2..3")]
    pub n: RangeArg,
    #[arg(long, default_value = "1..2")]
    pub m: RangeArg,
    /// Largest power d for the `(sum)^d` factor family.
    #[arg(long, default_value_t = 4)]
    pub d_max: u32,
    /// Explicit target k (default: smallest k matching each factor's degree).
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoremsArgs {
    /// Comma-separated theorem ids (t1_3, t1_4, t1_5, t1_5p, t1_6, t1_6p,
    /// t1_7, t1_7p) or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub thm: Vec<String>,
    #[arg(long, default_value = "2..3")]
    pub n: RangeArg,
    #[arg(long, default_value = "2..5")]
    pub k: RangeArg,
    #[arg(long, default_value = "0..1")]
    pub m: RangeArg,
    /// Explicit prime (default: smallest prime above each point's threshold).
    #[arg(long)]
    pub p: Option<u64>,
    /// Seeded instances per parameter point.
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
    /// Base seed; trial t uses seed + t.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Verify a single instance from a JSON file instead of generating.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Enumerate even when the bound is trivially nonpositive.
    #[arg(long)]
    pub force_enumeration: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    /// Number of variables.
    #[arg(long)]
    pub n: u32,
    /// Expression, e.g. `x1*(sum)^3*vdm(2,2)`.
    #[arg(long)]
    pub expr: String,
    /// Target exponents, comma separated, one per variable.
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<u32>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Identities(args) => cmd_identities(&args),
        Command::Lemma21(args) => cmd_lemma21(&args),
        Command::Theorems(args) => cmd_theorems(&args),
        Command::Coeff(args) => cmd_coeff(&args),
    }
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn open_sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    match out {
        Some(path) => Ok(Box::new(fs::File::create(path)?)),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn json_to_csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => csv_escape(s),
        other => csv_escape(&other.to_string()),
    }
}

const IDENTITY_CSV_COLUMNS: [&str; 11] =
    ["id", "n", "m", "b", "k", "L", "indices", "lhs", "rhs", "equal", "skipped"];

fn write_identity_reports(
    reports: &[IdentityReport],
    format: OutputFormat,
    out: &Option<PathBuf>,
) -> io::Result<()> {
    let mut sink = open_sink(out)?;
    match format {
        OutputFormat::Json => {
            for report in reports {
                for line in report.to_json_lines() {
                    writeln!(sink, "{line}")?;
                }
            }
        }
        OutputFormat::Csv => {
            writeln!(sink, "{},reason,ms", IDENTITY_CSV_COLUMNS.join(","))?;
            for report in reports {
                for line in report.to_json_lines() {
                    let mut fields: Vec<String> = IDENTITY_CSV_COLUMNS
                        .iter()
                        .map(|c| json_to_csv_field(&line[*c]))
                        .collect();
                    fields.push(json_to_csv_field(&line["reason"]));
                    fields.push(json_to_csv_field(&line["ms"]));
                    writeln!(sink, "{}", fields.join(","))?;
                }
            }
        }
        OutputFormat::Text => {
            for report in reports {
                for line in report.to_json_lines() {
                    if line["skipped"].as_bool() == Some(true) {
                        writeln!(
                            sink,
                            "{} n={} m={} b={}: skipped ({})",
                            line["id"].as_str().unwrap_or(""),
                            line["n"],
                            line["m"],
                            line["b"],
                            line["reason"].as_str().unwrap_or("")
                        )?;
                        continue;
                    }
                    let idx = match &line["indices"] {
                        Value::Null => "-".to_string(),
                        other => other.to_string(),
                    };
                    let verdict = if line["equal"].as_bool() == Some(true) {
                        "equal"
                    } else {
                        "MISMATCH"
                    };
                    let extra = line
                        .get("k")
                        .and_then(Value::as_u64)
                        .map(|k| format!(" k={k} L={}", line["L"].as_str().unwrap_or("?")))
                        .unwrap_or_default();
                    writeln!(
                        sink,
                        "{} n={} m={} b={}{extra} idx={idx}: lhs={} rhs={} {verdict}",
                        line["id"].as_str().unwrap_or(""),
                        line["n"],
                        line["m"],
                        line["b"],
                        line["lhs"].as_str().unwrap_or("?"),
                        line["rhs"].as_str().unwrap_or("?"),
                    )?;
                }
            }
        }
    }
    sink.flush()
}

/// Grid check over the identity registry, including the antisymmetrization
/// relation (over its default factor family) when selected. Exit 0 when
/// every non-skipped unshifted identity holds, every shifted symmetrized
/// sum holds, and every relation check holds; per-index shifted mismatches
/// only fail under `--strict-shifted`.
pub fn cmd_identities(args: &IdentitiesArgs) -> i32 {
    if args.n.is_empty() || args.m.is_empty() || args.b.is_empty() {
        return usage_error("empty parameter range");
    }
    let mut ids: Vec<IdentityKind> = Vec::new();
    let mut with_relation = args.ids.is_empty();
    if args.ids.is_empty() {
        ids = IdentityKind::ALL.to_vec();
    } else {
        for name in &args.ids {
            match IdentityKind::parse(name) {
                Some(IdentityKind::Lemma21Relation) => with_relation = true,
                Some(kind) => ids.push(kind),
                None => return usage_error(&format!("unknown identity {name:?}")),
            }
        }
    }
    let mut reports = grid_check(&ids, &args.n.values(), &args.m.values(), &args.b.values());
    if with_relation {
        for n in args.n.values().into_iter().filter(|&n| n >= 2) {
            for m in args.m.values().into_iter().filter(|&m| m >= 1) {
                for (name, factor) in lemma21_family(n as usize, 4) {
                    let k = suitable_k(n, m, factor.total_degree().unwrap_or(0));
                    let mut report = antisymmetrize_check(m, k, n, &factor)
                        .expect("family factors are symmetric");
                    report.factor = Some(name);
                    reports.push(report);
                }
            }
        }
    }
    if let Err(e) = write_identity_reports(&reports, args.format, &args.out) {
        return usage_error(&format!("cannot write output: {e}"));
    }
    let mut failed = false;
    for report in &reports {
        if report.skipped {
            continue;
        }
        if report.id.is_shifted() {
            if let Some(sym) = &report.symmetrized {
                if !sym.equal {
                    failed = true;
                }
            }
            if args.strict_shifted && !report.equal {
                failed = true;
            }
        } else if !report.equal {
            failed = true;
        }
    }
    if failed {
        EXIT_VERIFY_FAILURE
    } else {
        EXIT_OK
    }
}

/// The factor family for the antisymmetrization check: the constant 1,
/// `(sum x)^d` up to `d_max`, the degree-2 elementary symmetric
/// polynomial, and the degree-2 power sum.
fn lemma21_family(n: usize, d_max: u32) -> Vec<(String, SparsePoly)> {
    let ring = RingTag::Integers;
    let mut family = vec![("1".to_string(), SparsePoly::one(n, ring))];
    for d in 1..=d_max {
        let poly = sum_of_vars(n, ring)
            .pow(d, &ExponentCap::unbounded(n))
            .expect("arity matches");
        family.push((format!("(sum)^{d}"), poly));
    }
    family.push(("e2".to_string(), elementary_symmetric_2(n, ring)));
    family.push(("p2".to_string(), power_sum_2(n, ring)));
    family
}

/// Smallest k whose symmetric target can carry the factor's top-degree
/// slice: `k = max(n, m(n-1) + ceil(deg L / n) + 1)`.
fn suitable_k(n: u32, m: u32, factor_degree: u64) -> u32 {
    let ceil_div = factor_degree.div_ceil(n as u64) as u32;
    n.max(m * (n - 1) + ceil_div + 1)
}

pub fn cmd_lemma21(args: &Lemma21Args) -> i32 {
    if args.n.is_empty() || args.m.is_empty() {
        return usage_error("empty parameter range");
    }
    if args.n.lo < 2 {
        return usage_error("the relation needs n >= 2");
    }
    if args.m.lo < 1 {
        return usage_error("the relation needs m >= 1");
    }
    let mut reports = Vec::new();
    for n in args.n.values() {
        for m in args.m.values() {
            for (name, factor) in lemma21_family(n as usize, args.d_max) {
                let k = args
                    .k
                    .unwrap_or_else(|| suitable_k(n, m, factor.total_degree().unwrap_or(0)));
                if k < n {
                    return usage_error(&format!("k = {k} must be at least n = {n}"));
                }
                match antisymmetrize_check(m, k, n, &factor) {
                    Ok(mut report) => {
                        report.factor = Some(name);
                        reports.push(report);
                    }
                    Err(e) => return usage_error(&format!("n={n} m={m} L={name}: {e}")),
                }
            }
        }
    }
    if let Err(e) = write_identity_reports(&reports, args.format, &args.out) {
        return usage_error(&format!("cannot write output: {e}"));
    }
    if reports.iter().all(|r| r.equal) {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILURE
    }
}

struct PointSummary {
    theorem: TheoremId,
    p: u64,
    n: u32,
    k: u32,
    m: u32,
    infeasible: Option<String>,
    reports: Vec<VerifyReport>,
}

impl PointSummary {
    fn min_cardinality(&self) -> Option<usize> {
        self.reports.iter().filter_map(|r| r.cardinality).min()
    }

    fn hypothesis_satisfying(&self) -> usize {
        self.reports.iter().filter(|r| r.hypotheses_ok).count()
    }

    fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.hypotheses_ok && r.passed).count()
    }

    fn summary_json(&self) -> Value {
        json!({
            "summary": true,
            "theorem": self.theorem.name(),
            "p": self.p,
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "infeasible": self.infeasible,
            "trials": self.reports.len(),
            "hypothesis_satisfying": self.hypothesis_satisfying(),
            "passed": self.passed(),
            "min_cardinality": self.min_cardinality(),
        })
    }
}

fn write_theorem_reports(
    points: &[PointSummary],
    format: OutputFormat,
    out: &Option<PathBuf>,
) -> io::Result<()> {
    let mut sink = open_sink(out)?;
    match format {
        OutputFormat::Json => {
            for point in points {
                for report in &point.reports {
                    writeln!(sink, "{}", report.to_json())?;
                }
                writeln!(sink, "{}", point.summary_json())?;
            }
        }
        OutputFormat::Csv => {
            writeln!(
                sink,
                "theorem,p,n,k,m,condition,seed,hypotheses_ok,trivial,cardinality,bound,\
                 passed,cert_bound,h,h_mod_p,ms,reasons"
            )?;
            for point in points {
                for r in &point.reports {
                    let fields = [
                        r.theorem.name().to_string(),
                        r.p.to_string(),
                        r.n.to_string(),
                        r.k.to_string(),
                        r.m.to_string(),
                        r.condition.to_string(),
                        r.seed.map(|s| s.to_string()).unwrap_or_default(),
                        r.hypotheses_ok.to_string(),
                        r.trivial.to_string(),
                        r.cardinality.map(|c| c.to_string()).unwrap_or_default(),
                        r.bound.to_string(),
                        r.passed.to_string(),
                        r.certificate
                            .as_ref()
                            .map(|c| c.bound.to_string())
                            .unwrap_or_default(),
                        r.h.clone().unwrap_or_default(),
                        r.h_mod_p.map(|h| h.to_string()).unwrap_or_default(),
                        r.ms.to_string(),
                        csv_escape(&r.reasons.join("; ")),
                    ];
                    writeln!(sink, "{}", fields.join(","))?;
                }
            }
        }
        OutputFormat::Text => {
            for point in points {
                if let Some(reason) = &point.infeasible {
                    writeln!(
                        sink,
                        "{} p={} n={} k={} m={}: infeasible ({reason})",
                        point.theorem.name(),
                        point.p,
                        point.n,
                        point.k,
                        point.m
                    )?;
                    continue;
                }
                for r in &point.reports {
                    let card = r
                        .cardinality
                        .map(|c| c.to_string())
                        .unwrap_or_else(|| "-".to_string());
                    let h = r.h.as_deref().unwrap_or("-");
                    let h_mod = r
                        .h_mod_p
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| "-".to_string());
                    let cert = r
                        .certificate
                        .as_ref()
                        .map(|c| format!("cert_bound={}", c.bound))
                        .unwrap_or_else(|| "cert=none".to_string());
                    let status = if !r.hypotheses_ok {
                        "hypotheses-violated"
                    } else if r.passed {
                        "passed"
                    } else {
                        "FAILED"
                    };
                    writeln!(
                        sink,
                        "{} p={} n={} k={} m={} seed={}: |C|={card} bound={} {cert} \
                         h={h} h%p={h_mod} {status}",
                        r.theorem.name(),
                        r.p,
                        r.n,
                        r.k,
                        r.m,
                        r.seed.map(|s| s.to_string()).unwrap_or_default(),
                        r.bound,
                    )?;
                }
                writeln!(
                    sink,
                    "# summary {} p={} n={} k={} m={}: min|C|={} passed {}/{} \
                     hypothesis-satisfying trials",
                    point.theorem.name(),
                    point.p,
                    point.n,
                    point.k,
                    point.m,
                    point
                        .min_cardinality()
                        .map(|c| c.to_string())
                        .unwrap_or_else(|| "-".to_string()),
                    point.passed(),
                    point.hypothesis_satisfying(),
                )?;
            }
        }
    }
    sink.flush()
}

pub fn cmd_theorems(args: &TheoremsArgs) -> i32 {
    if args.trials == 0 {
        return usage_error("--trials must be at least 1");
    }
    if args.n.is_empty() || args.k.is_empty() || args.m.is_empty() {
        return usage_error("empty parameter range");
    }
    let theorems: Vec<TheoremId> = if args.thm.iter().any(|t| t == "all") {
        TheoremId::ALL.to_vec()
    } else {
        let mut parsed = Vec::new();
        for name in &args.thm {
            match TheoremId::parse(name) {
                Some(t) => parsed.push(t),
                None => return usage_error(&format!("unknown theorem {name:?}")),
            }
        }
        parsed
    };

    if let Some(path) = &args.instance {
        if theorems.len() != 1 {
            return usage_error("--instance needs exactly one --thm");
        }
        return run_single_instance(path, theorems[0], args);
    }

    let mut points = Vec::new();
    for &theorem in &theorems {
        for n in args.n.values() {
            for k in args.k.values() {
                for m in args.m.values() {
                    let p = args
                        .p
                        .unwrap_or_else(|| smallest_admissible_prime(theorem, n, k, m));
                    points.push((theorem, p, n, k, m));
                }
            }
        }
    }

    let summaries: Vec<PointSummary> = points
        .par_iter()
        .map(|&(theorem, p, n, k, m)| {
            let mut reports = Vec::new();
            let mut infeasible = None;
            for trial in 0..args.trials {
                let seed = args.seed + trial;
                match gen_instance(seed, theorem, p, n, k, m) {
                    Ok(inst) => match verify(&inst, theorem, args.force_enumeration) {
                        Ok(report) => reports.push(report),
                        Err(e) => {
                            infeasible = Some(e.to_string());
                            break;
                        }
                    },
                    Err(e) => {
                        infeasible = Some(e.to_string());
                        break;
                    }
                }
            }
            PointSummary { theorem, p, n, k, m, infeasible, reports }
        })
        .collect();

    if let Err(e) = write_theorem_reports(&summaries, args.format, &args.out) {
        return usage_error(&format!("cannot write output: {e}"));
    }
    let all_passed = summaries
        .iter()
        .flat_map(|s| &s.reports)
        .filter(|r| r.hypotheses_ok)
        .all(|r| r.passed);
    if all_passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILURE
    }
}

fn run_single_instance(path: &PathBuf, theorem: TheoremId, args: &TheoremsArgs) -> i32 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("cannot read {}: {e}", path.display())),
    };
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return usage_error(&format!("bad instance JSON: {e}")),
    };
    let inst = match SumsetInstance::from_json(&value) {
        Ok(i) => i,
        Err(e) => return usage_error(&format!("bad instance: {e}")),
    };
    let report = match verify(&inst, theorem, args.force_enumeration) {
        Ok(r) => r,
        Err(e) => return usage_error(&format!("verification error: {e}")),
    };
    let ok = !report.hypotheses_ok || report.passed;
    let summary = PointSummary {
        theorem,
        p: inst.p,
        n: inst.n,
        k: inst.k,
        m: inst.m,
        infeasible: None,
        reports: vec![report],
    };
    if let Err(e) = write_theorem_reports(&[summary], args.format, &args.out) {
        return usage_error(&format!("cannot write output: {e}"));
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILURE
    }
}

pub fn cmd_coeff(args: &CoeffArgs) -> i32 {
    if args.n < 1 {
        return usage_error("--n must be at least 1");
    }
    if args.target.len() != args.n as usize {
        return usage_error(&format!(
            "--target has {} entries but --n is {}",
            args.target.len(),
            args.n
        ));
    }
    let target = Monomial(args.target.clone());
    let cap = ExponentCap::at(&target);
    let poly = match expr::eval_expr(&args.expr, args.n as usize, &cap) {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    let coeff = poly.coeff(&target).expect("target arity checked");
    let result = match args.format {
        OutputFormat::Json => json!({
            "expr": args.expr,
            "target": args.target,
            "coeff": coeff.to_string(),
        })
        .to_string(),
        _ => coeff.to_string(),
    };
    match open_sink(&args.out).and_then(|mut sink| writeln!(sink, "{result}")) {
        Ok(()) => EXIT_OK,
        Err(e) => usage_error(&format!("cannot write output: {e}")),
    }
}
