//! Command-line driver: parses arguments, runs one pipeline and maps the
//! outcome to an exit code.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use crate::branches::{branch_report, multiplicity, puiseux_expand, PuiseuxBranch};
use crate::counter::{count_points_with_progress, CountOptions, Progress, DEFAULT_BUDGET};
use crate::error::Error;
use crate::homsys::EquationSystem;
use crate::jetalg::{build_jet_algebra, hilbert_samuel, shift_to_origin, BaseField};
use crate::symbolics::{parse_curve, parse_lt_expr, MPoly};
use crate::zeta::{
    level_system, pole_candidates, smoothness_test, theta_truncation, verify_decomposition,
    zeta_truncation, Mode, Space, ZetaReport, DEFAULT_POLE_A,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "zetalab", version, about = "Jet algebras, auto-arc spaces and their zeta functions at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lengths of the jet algebras and their Hilbert-Samuel fit.
    Jets(JetsArgs),
    /// Point counts of one level over the given primes.
    Count(CountArgs),
    /// Truncation of the auto Igusa-zeta function.
    Zeta(ZetaArgs),
    /// Truncation of the generalized zeta function with curve or classical jets as source.
    Theta(ZetaArgs),
    /// Count-level check of the decomposition into curve points and auto-arcs.
    Decompose(DecomposeArgs),
    /// Puiseux branches, multiplicities and the semigroup conductor.
    Branches(BranchesArgs),
    /// Candidate poles of a closed form.
    Poles(PolesArgs),
}

#[derive(Args, Debug, Clone)]
struct CurveArgs {
    /// Plane curve f(x, y) in the symbolics grammar.
    #[arg(long)]
    curve: String,
    /// Translate the point (a, b) to the origin first.
    #[arg(long, value_name = "A,B")]
    at: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Worker threads for counting.
    #[arg(long)]
    workers: Option<usize>,
    /// Node budget per count.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this path.
    #[arg(long, value_name = "PATH")]
    output: Option<std::path::PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Auto,
    Nabla,
    Classical,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Auto => Space::Auto,
            SpaceArg::Nabla => Space::CurveJets,
            SpaceArg::Classical => Space::ClassicalJets,
        }
    }
}

#[derive(Args, Debug)]
struct JetsArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, default_value_t = 4)]
    nmax: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    curve: Option<CurveArgs>,
    /// Count the system in this JSON file instead of a level system.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["curve", "at", "n", "space"])]
    system: Option<std::path::PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    primes: Vec<u64>,
    #[arg(long, value_enum, default_value_t = SpaceArg::Auto)]
    space: SpaceArg,
    /// Print the equation system as JSON and exit.
    #[arg(long)]
    emit_system: bool,
    /// Report progress on the diagnostic stream.
    #[arg(long)]
    progress: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct ZetaArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, default_value_t = 4)]
    nmax: u32,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    primes: Vec<u64>,
    /// Source space; `theta` accepts nabla or classical.
    #[arg(long, value_enum)]
    space: Option<SpaceArg>,
    /// Closed form to verify against.
    #[arg(long, value_name = "EXPR", conflicts_with = "fit")]
    verify: Option<String>,
    /// Interpolate each coefficient from the counts.
    #[arg(long)]
    fit: bool,
    /// Rational reconstruction with these numerator and denominator degrees.
    #[arg(long, value_name = "D1,D2", value_delimiter = ',', num_args = 1)]
    pade: Option<Vec<usize>>,
    /// Extract the subseries t^(r*k + offset).
    #[arg(long, value_name = "R,OFFSET", value_delimiter = ',', num_args = 1)]
    subseries: Option<Vec<usize>>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, default_value_t = 3)]
    nmax: u32,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    primes: Vec<u64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct BranchesArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Truncation order of the parametrizations.
    #[arg(long, default_value_t = 20)]
    n: u32,
    /// Bound for the semigroup saturation.
    #[arg(long, default_value_t = 60)]
    bound: u32,
    /// Primes intended for counting, checked against branch multiplicities.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct PolesArgs {
    /// Rational function in L and t.
    #[arg(long, value_name = "EXPR")]
    expr: String,
    /// Largest power of L tried.
    #[arg(long, default_value_t = DEFAULT_POLE_A)]
    a_max: i32,
    /// Largest power of t tried.
    #[arg(long, default_value_t = 8)]
    b_max: u32,
    #[arg(long)]
    json: bool,
}

/// Failure of a run, already classified by exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::BudgetExceeded(_)) { EXIT_BUDGET } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type Outcome = std::result::Result<i32, Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, text: &str) -> std::result::Result<(), Failure> {
        self.out.write_all(text.as_bytes()).map_err(|e| usage(format!("cannot write output: {e}")))
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }
}

/// Run the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    let outcome = match cli.command {
        Command::Jets(a) => jets(a, &mut io),
        Command::Count(a) => count(a, &mut io),
        Command::Zeta(a) => zeta(a, false, &mut io),
        Command::Theta(a) => zeta(a, true, &mut io),
        Command::Decompose(a) => decompose(a, &mut io),
        Command::Branches(a) => branches(a, &mut io),
        Command::Poles(a) => poles(a, &mut io),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    }
}

/// Process entry point.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn load_curve(c: &CurveArgs) -> std::result::Result<MPoly, Failure> {
    let f = parse_curve(&c.curve)?;
    let Some(at) = &c.at else {
        return Ok(f);
    };
    let parts: Vec<&str> = at.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(usage(format!("--at expects two rationals a,b, got `{at}`")));
    };
    let parse = |s: &str| BigRational::from_str(s).map_err(|_| usage(format!("`{s}` is not a rational number")));
    Ok(shift_to_origin(&f, &parse(a)?, &parse(b)?)?)
}

fn options(run: &RunArgs) -> std::result::Result<CountOptions, Failure> {
    let mut opts = CountOptions { budget: run.budget, ..CountOptions::default() };
    if let Some(w) = run.workers {
        if w == 0 {
            return Err(usage("--workers must be at least 1"));
        }
        opts.workers = w;
    }
    Ok(opts)
}

fn check_primes(primes: &[u64]) -> std::result::Result<(), Failure> {
    for (i, p) in primes.iter().enumerate() {
        if primes[..i].contains(p) {
            return Err(usage(format!("prime {p} listed twice")));
        }
    }
    Ok(())
}

/// Warn about counting primes dividing a branch multiplicity.
fn warn_multiplicity_primes(f: &MPoly, primes: &[u64], io: &mut Io) {
    let Ok(m) = multiplicity(f) else {
        return;
    };
    let rs: Vec<u32> = match puiseux_expand(f, m.max(1)) {
        Ok(bs) => bs.iter().map(PuiseuxBranch::multiplicity).collect(),
        Err(_) => vec![m],
    };
    for &p in primes {
        if rs.iter().any(|&r| (r as u64).is_multiple_of(p)) {
            io.warn(&format!("prime {p} divides a branch multiplicity in {rs:?}; counts there may misbehave"));
        }
    }
}

fn emit_json(json: &str, run: &RunArgs, io: &mut Io) -> std::result::Result<(), Failure> {
    if let Some(path) = &run.output {
        std::fs::write(path, format!("{json}\n"))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if run.json {
        io.print(&format!("{json}\n"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JetsDoc {
    curve: String,
    levels: Vec<JetsLevel>,
    e0: Option<i64>,
    e1: Option<i64>,
    n0: Option<u32>,
}

#[derive(Serialize)]
struct JetsLevel {
    n: u32,
    length: usize,
    bad_primes: Vec<u64>,
}

fn jets(a: JetsArgs, io: &mut Io) -> Outcome {
    let f = load_curve(&a.curve)?;
    if a.nmax == 0 {
        return Err(usage("--nmax must be at least 1"));
    }
    let levels = (1..=a.nmax)
        .map(|n| {
            build_jet_algebra(&f, n, BaseField::Rational)
                .map(|alg| JetsLevel { n, length: alg.length(), bad_primes: alg.bad_primes().to_vec() })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let fit = match hilbert_samuel(&f, a.nmax) {
        Ok(fit) => Some(fit),
        Err(Error::NoLinearTail { .. } | Error::InvalidArgument(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let doc = JetsDoc {
        curve: f.to_string(),
        levels,
        e0: fit.as_ref().map(|h| h.e0),
        e1: fit.as_ref().map(|h| h.e1),
        n0: fit.as_ref().map(|h| h.n0),
    };
    if a.json {
        io.print(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain data")))?;
        return Ok(EXIT_OK);
    }
    let mut s = format!("curve: {}\n{:>4}  {:>6}  bad primes\n", doc.curve, "n", "l(n)");
    for l in &doc.levels {
        let bad: Vec<String> = l.bad_primes.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "{:>4}  {:>6}  {}", l.n, l.length, if bad.is_empty() { "-".into() } else { bad.join(",") });
    }
    match &fit {
        Some(h) => {
            let _ = writeln!(s, "Hilbert-Samuel: l(n) = {}*n + ({}) for n >= {}; e0={}, e1={}", h.e0, h.e1, h.n0, h.e0, h.e1);
        }
        None => s.push_str("Hilbert-Samuel: no linear tail certified within nmax\n"),
    }
    io.print(&s)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CountDoc {
    source: String,
    target: String,
    n: u32,
    length: usize,
    unknowns: usize,
    equations: usize,
    counts: Vec<CountCell>,
}

#[derive(Serialize)]
struct CountCell {
    q: u64,
    count: String,
    nodes: u64,
    elapsed_ms: f64,
}

fn count(a: CountArgs, io: &mut Io) -> Outcome {
    check_primes(&a.primes)?;
    let opts = options(&a.run)?;
    let (f, file_system) = match (&a.curve, &a.system) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            (None, Some(EquationSystem::from_json(&text)?))
        }
        (Some(c), None) => (Some(load_curve(c)?), None),
        (None, None) => return Err(usage("either --curve or --system is required")),
    };
    let n = match (&f, a.n) {
        (Some(_), Some(n)) if n >= 1 => n,
        (Some(_), _) => return Err(usage("--n must be given and at least 1")),
        (None, _) => 0,
    };
    if let Some(f) = &f {
        warn_multiplicity_primes(f, &a.primes, io);
    }
    let system_at = |q: u64| -> crate::Result<EquationSystem> {
        match (&f, &file_system) {
            (_, Some(s)) => Ok(s.clone()),
            (Some(f), None) => level_system(f, a.space.into(), n, q).map(|(s, _)| s),
            (None, None) => unreachable!(),
        }
    };
    if a.emit_system {
        let q = a.primes.first().copied().unwrap_or(2);
        io.print(&format!("{}\n", system_at(q)?.to_json()))?;
        return Ok(EXIT_OK);
    }
    let mut cells = Vec::new();
    let mut first: Option<EquationSystem> = None;
    for &q in &a.primes {
        let s = system_at(q)?;
        let progress = |p: Progress| {
            if a.progress {
                eprintln!("q={q}: {}/{} partitions, {} nodes", p.partitions_done, p.partitions, p.nodes);
            }
        };
        let r = count_points_with_progress(&s, q, &opts, &progress)?;
        cells.push(CountCell {
            q,
            count: r.count.to_string(),
            nodes: r.nodes,
            elapsed_ms: r.elapsed.as_secs_f64() * 1e3,
        });
        first.get_or_insert(s);
    }
    let s = first.ok_or_else(|| usage("at least one prime is required"))?;
    let meta = s.meta();
    let doc = CountDoc {
        source: meta.source.clone(),
        target: meta.target.clone(),
        n: meta.n,
        length: meta.length,
        unknowns: s.unknowns().len(),
        equations: s.equations().len(),
        counts: cells,
    };
    let json = serde_json::to_string_pretty(&doc).expect("plain data");
    emit_json(&json, &a.run, io)?;
    if !a.run.json {
        let mut t = format!(
            "Hom({} -> {}), n={}, length={}: {} unknowns, {} equations\n{:>8}  {:>24}  {:>12}  {:>10}\n",
            doc.source, doc.target, doc.n, doc.length, doc.unknowns, doc.equations, "q", "count", "nodes", "ms"
        );
        for c in &doc.counts {
            let _ = writeln!(t, "{:>8}  {:>24}  {:>12}  {:>10.1}", c.q, c.count, c.nodes, c.elapsed_ms);
        }
        io.print(&t)?;
    }
    Ok(EXIT_OK)
}

fn zeta_table(r: &ZetaReport) -> String {
    let mut s = format!("curve: {}\nspace: {:?}, normalization c_(n-1) = [A_n] L^(-l(n))\n", r.curve, r.space);
    for row in &r.rows {
        let counts: Vec<String> = row.counts.iter().map(|(q, c)| format!("{q}:{c}")).collect();
        let show = |c: &Option<crate::symbolics::ClassPoly>| c.as_ref().map_or("?".to_string(), ToString::to_string);
        let _ = writeln!(
            s,
            "n={:<2} l={:<3} counts [{}] class {} coeff {} {}{}",
            row.n,
            row.length,
            counts.join(", "),
            show(&row.class),
            show(&row.coeff),
            if row.verified { "ok" } else { "FAIL" },
            if row.certain { "" } else { " (uncertain)" },
        );
        for m in &row.mismatches {
            let _ = writeln!(s, "    q={}: expected {}, counted {}", m.q, m.expected, m.actual);
        }
        if !row.skipped_primes.is_empty() {
            let _ = writeln!(s, "    skipped (budget): {:?}", row.skipped_primes);
        }
        if !row.excluded_primes.is_empty() {
            let _ = writeln!(s, "    excluded from fit: {:?}", row.excluded_primes);
        }
        if let Some(finding) = &row.finding {
            let _ = writeln!(s, "    finding: {finding}");
        }
    }
    if let Some(c) = &r.closed_form {
        let _ = writeln!(s, "closed form: {c}");
    }
    if let Some(p) = &r.pade {
        let _ = writeln!(s, "reconstructed: {p}");
    }
    if let Some(p) = &r.poles {
        let f: Vec<String> = p.factors.iter().map(|&(a, b)| format!("({})", pole_factor(a, b))).collect();
        let _ = writeln!(s, "pole candidates: {}", if f.is_empty() { "none".into() } else { f.join(" ") });
    }
    if let Some((k, off, sub)) = &r.subseries {
        let c: Vec<String> = sub.coeffs().iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "subseries r={k}, offset={off}: [{}]", c.join(", "));
    }
    s
}

/// `1 - L^a t^b` in the symbolics grammar.
fn pole_factor(a: i32, b: u32) -> String {
    let l = match a {
        0 => String::new(),
        1 => "L*".into(),
        a => format!("L^{a}*"),
    };
    let t = if b == 1 { "t".into() } else { format!("t^{b}") };
    format!("1 - {l}{t}")
}

fn pair(v: &Option<Vec<usize>>, flag: &str) -> std::result::Result<Option<(usize, usize)>, Failure> {
    match v.as_deref() {
        None => Ok(None),
        Some([a, b]) => Ok(Some((*a, *b))),
        Some(_) => Err(usage(format!("--{flag} expects two integers"))),
    }
}

fn zeta(a: ZetaArgs, theta: bool, io: &mut Io) -> Outcome {
    let f = load_curve(&a.curve)?;
    check_primes(&a.primes)?;
    let opts = options(&a.run)?;
    let pade = pair(&a.pade, "pade")?;
    let subseries = pair(&a.subseries, "subseries")?;
    let mode = match &a.verify {
        Some(expr) => Mode::Verify(parse_lt_expr(expr)?),
        None => Mode::Fit,
    };
    warn_multiplicity_primes(&f, &a.primes, io);
    let mut report = if theta {
        let source = match a.space.unwrap_or(SpaceArg::Nabla) {
            SpaceArg::Auto => return Err(usage("theta takes --space nabla or classical")),
            s => s.into(),
        };
        theta_truncation(&f, source, a.nmax, &a.primes, &mode, &opts)?
    } else {
        if a.space.is_some_and(|s| s != SpaceArg::Auto) {
            return Err(usage("zeta counts auto-arcs; use theta for other sources"));
        }
        zeta_truncation(&f, a.nmax, &a.primes, &mode, &opts)?
    };
    let mut notes = Vec::new();
    if let Some((d1, d2)) = pade {
        if let Err(e) = report.reconstruct(d1, d2) {
            notes.push(format!("reconstruction: {e}"));
        }
    }
    if let Some((r, off)) = subseries {
        if let Err(e) = report.extract_subseries(r, off) {
            notes.push(format!("subseries: {e}"));
        }
    }
    emit_json(&report.to_json(), &a.run, io)?;
    let verifying = matches!(mode, Mode::Verify(_));
    if !a.run.json {
        let mut s = zeta_table(&report);
        if verifying {
            match report.first_failure() {
                None => s.push_str("verified: all coefficients match\n"),
                Some(row) => {
                    let _ = writeln!(s, "verification failed: first witness at n={}", row.n);
                }
            }
        } else if !theta {
            match smoothness_test(&report) {
                Ok(v) if v.smooth => s.push_str("smoothness: every coefficient is L^-1\n"),
                Ok(v) => {
                    let (i, c) = v.witness.expect("non-smooth verdict has a witness");
                    let _ = writeln!(s, "smoothness: not smooth, witness c_{i} = {c}");
                }
                Err(e) => {
                    let _ = writeln!(s, "smoothness: {e}");
                }
            }
        }
        for n in &notes {
            let _ = writeln!(s, "{n}");
        }
        io.print(&s)?;
    } else {
        for n in &notes {
            io.warn(n);
        }
    }
    Ok(if verifying && !report.all_verified() { EXIT_VERIFY_FAILED } else { EXIT_OK })
}

fn decompose(a: DecomposeArgs, io: &mut Io) -> Outcome {
    let f = load_curve(&a.curve)?;
    check_primes(&a.primes)?;
    let opts = options(&a.run)?;
    let cells = verify_decomposition(&f, a.nmax, &a.primes, &opts)?;
    let all = cells.iter().all(|c| c.holds);
    emit_json(&serde_json::to_string_pretty(&cells).expect("plain data"), &a.run, io)?;
    if !a.run.json {
        let mut s = format!("curve: {f}\n#nabla = (#C - 1) q^(l-1) + #auto\n");
        for c in &cells {
            let _ = writeln!(
                s,
                "n={} q={} l={}: {} = ({} - 1)*{}^{} + {}  {}{}",
                c.n,
                c.q,
                c.length,
                c.nabla,
                c.curve_points,
                c.q,
                c.length - 1,
                c.auto,
                if c.holds { "ok" } else { "FAIL" },
                if c.other_singular > 0 { format!(" ({} other singular points)", c.other_singular) } else { String::new() },
            );
        }
        io.print(&s)?;
    }
    Ok(if all { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn branches(a: BranchesArgs, io: &mut Io) -> Outcome {
    let f = load_curve(&a.curve)?;
    check_primes(&a.primes)?;
    let report = match branch_report(&f, a.n, a.bound) {
        Ok(r) => r,
        // Multibranched germs are handled inside; a failed certification
        // still leaves the branches worth printing.
        Err(Error::BoundTooSmall { .. } | Error::InvalidArgument(_)) if a.n >= multiplicity(&f)? => {
            let branches = puiseux_expand(&f, a.n)?;
            io.warn("semigroup conductor not certified at this bound");
            crate::branches::BranchReport {
                multiplicity: multiplicity(&f)?,
                multiplicity_sum: crate::branches::branch_multiplicity_sum(&branches),
                branches,
                semigroup: None,
            }
        }
        Err(e) => return Err(e.into()),
    };
    for &p in &a.primes {
        let rs: Vec<u32> = report.branches.iter().map(PuiseuxBranch::multiplicity).collect();
        if rs.iter().any(|&r| (r as u64).is_multiple_of(p)) {
            io.warn(&format!("prime {p} divides a branch multiplicity in {rs:?}"));
        }
    }
    if a.json {
        io.print(&format!("{}\n", report.to_json()))?;
        return Ok(EXIT_OK);
    }
    let mut s = format!("curve: {f}\nmultiplicity: {}\n", report.multiplicity);
    for (i, b) in report.branches.iter().enumerate() {
        let _ = writeln!(
            s,
            "branch {}: r={} x = {}, y = {}  (verified to t^{})",
            i + 1,
            b.multiplicity(),
            b.x_string(),
            b.y_string(),
            b.order
        );
    }
    let _ = writeln!(s, "sum of branch multiplicities: {}", report.multiplicity_sum);
    if let Some(sg) = &report.semigroup {
        let _ = writeln!(
            s,
            "semigroup <{}>, conductor {}{}",
            sg.generators.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            sg.conductor,
            if sg.bound_limited { " (bound-limited)" } else { "" }
        );
    }
    io.print(&s)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PolesDoc {
    expr: String,
    poles: Vec<[i64; 2]>,
    remainder: String,
}

fn poles(a: PolesArgs, io: &mut Io) -> Outcome {
    let r = parse_lt_expr(&a.expr)?;
    let p = pole_candidates(&r, a.a_max, a.b_max);
    let doc = PolesDoc {
        expr: r.to_string(),
        poles: p.factors.iter().map(|&(x, y)| [x as i64, y as i64]).collect(),
        remainder: crate::symbolics::series::render_tpoly(&p.remainder),
    };
    if a.json {
        io.print(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain data")))?;
    } else {
        let mut s = format!("{}\n", doc.expr);
        for [x, y] in &doc.poles {
            let _ = writeln!(s, "pole candidate: {}", pole_factor(*x as i32, *y as u32));
        }
        let _ = writeln!(s, "remaining denominator: {}", doc.remainder);
        io.print(&s)?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("zetalab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn jets_table() {
        let (code, out, _) = run_str(&["jets", "--curve", "y^2-x^3", "--nmax", "4", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let ls: Vec<u64> = v["levels"].as_array().unwrap().iter().map(|l| l["length"].as_u64().unwrap()).collect();
        assert_eq!(ls, [1, 3, 5, 7]);
        assert_eq!((v["e0"].as_i64(), v["e1"].as_i64()), (Some(2), Some(-1)));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["zeta"]).0, 2);
        assert_eq!(run_str(&["zeta", "--curve", "y^2-x^"]).0, 2);
        assert_eq!(run_str(&["count", "--curve", "y-x^2", "--n", "2", "--primes", "2,2"]).0, 2);
        assert_eq!(run_str(&["jets", "--curve", "y-x^2", "--at", "1"]).0, 2);
    }

    #[test]
    fn budget_exits_3() {
        let (code, _, err) = run_str(&["count", "--curve", "y^2-x^3", "--n", "3", "--primes", "17", "--budget", "1"]);
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn smooth_verify_passes_and_cusp_fails() {
        let ok = run_str(&["zeta", "--curve", "y-x^2", "--nmax", "3", "--verify", "L^-1/(1-t)"]);
        assert_eq!(ok.0, 0, "{}", ok.2);
        let bad = run_str(&["zeta", "--curve", "y^2-x^3", "--nmax", "3", "--verify", "L^-1/(1-t)"]);
        assert_eq!(bad.0, 1);
        assert!(bad.1.contains("first witness at n=2"), "{}", bad.1);
    }

    #[test]
    fn shifted_curve() {
        let (code, out, _) = run_str(&["branches", "--curve", "(y-1)^2 - (x-1)^3", "--at", "1,1", "--json"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"conductor\": 2"), "{out}");
    }

    #[test]
    fn poles_of_cusp_form() {
        let (code, out, _) =
            run_str(&["poles", "--expr", "((L^7-L^6)*t^3+L^7*t^4+L^7*t^7)/((1-L*t^3)*(1-t))", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["poles"], serde_json::json!([[1, 3], [0, 1]]));
    }
}
