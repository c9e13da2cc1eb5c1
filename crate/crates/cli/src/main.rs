use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nf_core::exotica::{
    self, build_data_set, certify_family, check_certificate_json, gen_knot_sequence, gen_p_sequence,
    nonstein_obstruction, stein_nonstein_pipeline, w_plus_exotica_pipeline, ExoticaCertificate, ExoticaError,
    FamilyParameters, FamilySequence, GenusLedger, LedgerPolicy, ObstructedOp,
};
use nf_core::handlebody::{
    boundary_sum, cusp_neighborhood, gompf_nucleus, homology, intersection_form, knot_handle, verify_nucleus,
    CorkSign, Handlebody, HandlebodyError, StandardKnot,
};
use nf_core::legendrian::{stein_check, steinify, zigzag_plan, LegendrianError};
use nf_core::surgery::{cork_twist, knot_surgery, log_transform, strip_corks, w_modify};
use nf_core::swadj::KnotSpec;
use serde_json::Value;

const EXIT_OK: u8 = 0;
const EXIT_REJECT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser)]
#[command(name = "nf", version, about = "Handlebody constructions and exotica certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a standard handlebody.
    Build(BuildArgs),
    /// Homology, intersection form and boundary of a manifest.
    Homology(Input),
    /// Check the nucleus conditions of a marker.
    VerifyNucleus(MarkerInput),
    /// Log transform of multiplicity p along a marked nucleus.
    LogTransform(LogArgs),
    /// Knot surgery along the fiber torus of a marked nucleus.
    KnotSurgery(KnotArgs),
    /// Attach a W⁺ or W⁻ cork to a 2-handle.
    WModify(WModifyArgs),
    /// Twist a registered cork.
    CorkTwist(CorkArgs),
    /// Remove corks (all of them when no id is given).
    Strip(StripArgs),
    /// Add zig-zags until every 2-handle has framing tb − 1.
    Steinify(Output),
    /// List 2-handles whose framing exceeds tb − 1.
    SteinCheck(Input),
    /// Generate a family with least parameters and certify it.
    GenFamily(GenFamilyArgs),
    /// Certify a family with given parameters.
    Certify(CertifyArgs),
    /// Re-derive and check a certificate.
    CheckCert(CheckArgs),
    /// Non-Stein record for a log transform or knot surgery.
    ObstructStein(ObstructArgs),
    /// Stein and non-Stein members from W-modifications and cork twists.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct Input {
    manifest: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    manifest: PathBuf,
    /// Manifest output; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MarkerInput {
    manifest: PathBuf,
    #[arg(long)]
    marker: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Gompf,
    Cusp,
    Trefoil,
    Unknot,
}

#[derive(Args)]
struct BuildArgs {
    kind: BuildKind,
    #[arg(long, default_value_t = 2)]
    n: i64,
    /// Framing of a single knot handle.
    #[arg(long, default_value_t = 0)]
    framing: i64,
    /// Handle name of a single knot handle.
    #[arg(long, default_value = "u")]
    name: String,
    /// Boundary-sum these manifests onto the result, in order.
    #[arg(long)]
    sum: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LogArgs {
    manifest: PathBuf,
    #[arg(long)]
    p: i64,
    #[arg(long)]
    marker: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KnotArgs {
    manifest: PathBuf,
    /// `unknot`, `trefoil`, `T(2,q)` with q odd, or `twist:k`.
    #[arg(long, value_parser = parse_knot)]
    knot: KnotSpec,
    #[arg(long)]
    marker: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WModifyArgs {
    manifest: PathBuf,
    #[arg(long)]
    handle: String,
    /// `+` or `-`.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: CorkSign,
    #[arg(long)]
    p: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorkArgs {
    manifest: PathBuf,
    #[arg(long)]
    id: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StripArgs {
    manifest: PathBuf,
    #[arg(long)]
    id: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Log,
    Knot,
}

#[derive(Args)]
struct FamilyOptions {
    #[arg(long, value_enum, default_value_t = FamilyKind::Log)]
    kind: FamilyKind,
    /// Genus ledger JSON: `{"S_5": 5}` or entries with provenance.
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[arg(long)]
    marker: Option<String>,
    /// Add the conditions that also rule out orientation reversal.
    #[arg(long)]
    strengthened: bool,
    /// Record the current time in the certificate.
    #[arg(long)]
    stamp: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenFamilyArgs {
    manifest: PathBuf,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[command(flatten)]
    family: FamilyOptions,
}

#[derive(Args)]
struct CertifyArgs {
    manifest: PathBuf,
    /// Comma-separated p values, or knots for `--kind knot`.
    #[arg(long)]
    params: String,
    #[command(flatten)]
    family: FamilyOptions,
}

#[derive(Args)]
struct CheckArgs {
    certificate: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ObstructArgs {
    manifest: PathBuf,
    #[arg(long, conflicts_with = "knot", required_unless_present = "knot")]
    p: Option<i64>,
    #[arg(long, value_parser = parse_knot)]
    knot: Option<KnotSpec>,
    /// Lower bound for [S]·[T_p].
    #[arg(long, default_value_t = exotica::DEFAULT_INTERSECTION_BOUND)]
    m: i64,
    #[arg(long)]
    marker: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    manifest: PathBuf,
    /// Stein members, or family length with `--w-plus`.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Log-transform members after X~_n.
    #[arg(long, default_value_t = 2)]
    tail: usize,
    /// Run the W⁺ construction instead.
    #[arg(long)]
    w_plus: bool,
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[arg(long)]
    marker: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Precondition { name: String, message: String },
}

impl<E: std::error::Error + std::fmt::Debug> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Precondition { name: variant_name(&e), message: e.to_string() }
    }
}

/// Innermost variant name of a nested error, from its `Debug` form.
fn variant_name(e: &impl std::fmt::Debug) -> String {
    let dbg = format!("{e:?}");
    let mut name = "Error";
    for chunk in dbg.split('(') {
        let ident = chunk.split(|c: char| !c.is_ascii_alphanumeric()).next().unwrap_or("");
        if ident.is_empty() {
            break;
        }
        name = ident;
        if ident.len() != chunk.len() {
            break;
        }
    }
    name.to_string()
}

type CmdResult = Result<u8, Failure>;

fn parse_knot(s: &str) -> Result<KnotSpec, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    match t.as_str() {
        "unknot" => return Ok(KnotSpec::unknot()),
        "trefoil" => return Ok(KnotSpec::trefoil()),
        _ => {}
    }
    if let Some(k) = t.strip_prefix("twist:") {
        return k.parse().map(KnotSpec::Twist).map_err(|e| format!("twist count: {e}"));
    }
    if let Some(q) = t.strip_prefix("t(2,").and_then(|r| r.strip_suffix(')')) {
        let q: u32 = q.parse().map_err(|e| format!("torus knot: {e}"))?;
        if q % 2 == 1 {
            return Ok(KnotSpec::Torus(q / 2));
        }
        return Err(format!("T(2,{q}) is a link; q must be odd"));
    }
    Err(format!("unknown knot {s:?}; use unknot, trefoil, T(2,q) or twist:k"))
}

fn parse_sign(s: &str) -> Result<CorkSign, String> {
    match s {
        "+" | "plus" => Ok(CorkSign::Plus),
        "-" | "minus" => Ok(CorkSign::Minus),
        _ => Err(format!("sign must be + or -, got {s:?}")),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_manifest(path: &Path) -> Result<Handlebody, Failure> {
    Handlebody::from_manifest(&read_text(path)?).map_err(|e| match e {
        HandlebodyError::Manifest(m) => Failure::Usage(format!("{}: {m}", path.display())),
        other => other.into(),
    })
}

fn load_ledger(path: Option<&PathBuf>) -> Result<GenusLedger, Failure> {
    match path {
        None => Ok(GenusLedger::new()),
        Some(p) => GenusLedger::from_json(&read_text(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// Writes a document to `out`, or prints it when there is no `out`.
fn emit_document(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_manifold(x: &Handlebody, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => {
            write_text(p, &x.to_manifest())?;
            println!("wrote {} (sha256 {})", p.display(), x.content_hash());
            Ok(())
        }
        None => {
            println!("{}", x.to_manifest());
            Ok(())
        }
    }
}

fn write_report<T: serde::Serialize>(out: Option<&PathBuf>, value: &T) -> Result<(), Failure> {
    if let Some(p) = out {
        write_text(p, &to_json(value))?;
    }
    Ok(())
}

fn marker_of(x: &Handlebody, marker: Option<&String>) -> Result<String, Failure> {
    match marker {
        Some(m) => Ok(m.clone()),
        None => Ok(x.sole_marker()?.to_string()),
    }
}

/// Splits on commas outside parentheses, so `unknot,T(2,5)` has two items.
fn split_params(text: &str) -> Vec<&str> {
    let mut items = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                items.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&text[start..]);
    items.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_params(kind: FamilyKind, text: &str) -> Result<FamilyParameters, Failure> {
    let items = split_params(text).into_iter();
    match kind {
        FamilyKind::Log => items
            .map(|s| s.parse::<i64>().map_err(|e| Failure::Usage(format!("parameter {s:?}: {e}"))))
            .collect::<Result<_, _>>()
            .map(FamilyParameters::Log),
        FamilyKind::Knot => items.map(|s| parse_knot(s).map_err(Failure::Usage)).collect::<Result<_, _>>().map(FamilyParameters::Knot),
    }
}

fn stamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("unix:{secs}")
}

fn line(label: &str, value: impl Display) {
    println!("{label:<14} {value}");
}

fn run_build(a: &BuildArgs) -> CmdResult {
    let mut x = match a.kind {
        BuildKind::Gompf => gompf_nucleus(a.n)?,
        BuildKind::Cusp => cusp_neighborhood(),
        BuildKind::Trefoil => knot_handle(&a.name, StandardKnot::Trefoil, a.framing),
        BuildKind::Unknot => knot_handle(&a.name, StandardKnot::Unknot, a.framing),
    };
    for p in &a.sum {
        x = boundary_sum(&x, &load_manifest(p)?);
    }
    x.validate()?;
    emit_manifold(&x, a.out.as_ref())?;
    Ok(EXIT_OK)
}

fn run_homology(a: &Input) -> CmdResult {
    let x = load_manifest(&a.manifest)?;
    let r = homology(&x)?;
    line("H1", &r.h1);
    line("H2", if r.h2_free_rank == 0 { "0".to_string() } else if r.h2_free_rank == 1 { "Z".into() } else { format!("Z^{}", r.h2_free_rank) });
    line("H2 torsion", &r.h2_torsion);
    line("form", &r.form);
    line("Q", intersection_form(&x).1);
    line("boundary H1", &r.boundary_h1);
    line("homology S^3", if r.boundary_h1.is_trivial() { "yes" } else { "no" });
    write_report(a.out.as_ref(), &r)?;
    Ok(EXIT_OK)
}

fn run_verify(a: &MarkerInput) -> CmdResult {
    let x = load_manifest(&a.manifest)?;
    let marker = marker_of(&x, a.marker.as_ref())?;
    let r = verify_nucleus(&x, &marker)?;
    line("marker", &r.marker);
    line("divisor", r.divisor);
    line("pi1", format!("{:?}", r.pi1).to_lowercase());
    for c in &r.conditions {
        println!("  {:<6} {:<8} {}", format!("({})", c.id), c.status.to_string(), c.detail);
    }
    line("nucleus", if r.is_nucleus() { "yes" } else { "no" });
    write_report(a.out.as_ref(), &r)?;
    Ok(if r.is_nucleus() { EXIT_OK } else { EXIT_REJECT })
}

fn run_log(a: &LogArgs) -> CmdResult {
    let x = load_manifest(&a.manifest)?;
    let marker = marker_of(&x, a.marker.as_ref())?;
    let r = log_transform(&x, &marker, a.p)?;
    eprintln!("S·S {} -> {} (p = {})", r.s, r.s_prime, r.p);
    emit_manifold(&r.manifold, a.out.as_ref())?;
    Ok(EXIT_OK)
}

fn run_knot(a: &KnotArgs) -> CmdResult {
    let x = load_manifest(&a.manifest)?;
    let marker = marker_of(&x, a.marker.as_ref())?;
    let r = knot_surgery(&x, &marker, &a.knot)?;
    eprintln!("Δ_{} = {}", r.knot, r.alexander);
    emit_manifold(&r.manifold, a.out.as_ref())?;
    Ok(EXIT_OK)
}

fn run_stein_check(a: &Input) -> CmdResult {
    let x = load_manifest(&a.manifest)?;
    let r = stein_check(&x)?;
    for v in &r.violations {
        println!("{}: framing {} ≠ tb − 1 = {}", v.handle, v.framing, v.tb - 1);
    }
    if let Err(LegendrianError::FramingTooHigh(ds)) = zigzag_plan(&x) {
        for d in ds {
            println!("{d}");
        }
    }
    println!("{}", if r.is_ok() { "stein" } else { "not stein" });
    write_report(a.out.as_ref(), &r)?;
    Ok(if r.is_ok() { EXIT_OK } else { EXIT_REJECT })
}

fn emit_certificate(mut c: ExoticaCertificate, opts: &FamilyOptions) -> CmdResult {
    if opts.stamp {
        c.stamp = Some(stamp());
    }
    let params = match &c.parameters {
        FamilyParameters::Log(ps) => ps.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        FamilyParameters::Knot(ks) => ks.iter().map(|k| k.label()).collect(),
    };
    eprintln!("parameters ({})", params.join(", "));
    for o in c.failed_obligations() {
        eprintln!("FAIL {o}");
    }
    eprintln!("verdict {}", if c.verdict == exotica::Verdict::Accept { "accept" } else { "reject" });
    emit_document(opts.out.as_ref(), &c.to_json())?;
    Ok(if c.verdict == exotica::Verdict::Accept { EXIT_OK } else { EXIT_REJECT })
}

fn family_inputs(path: &Path, opts: &FamilyOptions) -> Result<(Handlebody, exotica::DataSet, GenusLedger), Failure> {
    let x = load_manifest(path)?;
    let ledger = load_ledger(opts.ledger.as_ref())?;
    let marker = marker_of(&x, opts.marker.as_ref())?;
    let ds = build_data_set(&x, &marker, None, true, &ledger)?;
    Ok((x, ds, ledger))
}

fn run_gen_family(a: &GenFamilyArgs) -> CmdResult {
    let (x, ds, ledger) = family_inputs(&a.manifest, &a.family)?;
    let f = &a.family;
    let seq = match f.kind {
        FamilyKind::Log => gen_p_sequence(&ds, a.n, f.strengthened, &ledger, LedgerPolicy::DeclaredOnly)?,
        FamilyKind::Knot => gen_knot_sequence(&ds, a.n, f.strengthened, &ledger, LedgerPolicy::DeclaredOnly)?,
    };
    emit_certificate(certify_family(&x, &ds, &seq)?, f)
}

fn run_certify(a: &CertifyArgs) -> CmdResult {
    let (x, ds, ledger) = family_inputs(&a.manifest, &a.family)?;
    let params = parse_params(a.family.kind, &a.params)?;
    let seq = FamilySequence::with_parameters(&ds, params, a.family.strengthened, &ledger)?;
    emit_certificate(certify_family(&x, &ds, &seq)?, &a.family)
}

fn run_check(a: &CheckArgs) -> CmdResult {
    let text = read_text(&a.certificate)?;
    let r = check_certificate_json(&text).map_err(|e| match e {
        ExoticaError::MalformedCertificate(m) => Failure::Usage(format!("{}: {m}", a.certificate.display())),
        other => other.into(),
    })?;
    for f in &r.failures {
        println!("FAIL {}: {}", f.id, f.reason);
    }
    println!("{}", if r.accepted() { "accept" } else { "reject" });
    write_report(a.out.as_ref(), &r)?;
    Ok(if r.accepted() { EXIT_OK } else { EXIT_REJECT })
}

fn run_obstruct(a: &ObstructArgs) -> CmdResult {
    let x = load_manifest(&a.manifest)?;
    let marker = marker_of(&x, a.marker.as_ref())?;
    let op = match (&a.knot, a.p) {
        (Some(k), _) => ObstructedOp::Knot { knot: k.clone() },
        (None, Some(p)) => ObstructedOp::Log { p },
        (None, None) => return Err(Failure::Usage("give --p or --knot".into())),
    };
    let r = nonstein_obstruction(&x, &marker, &op, a.m)?;
    line("q", r.q);
    line("m", r.m);
    for o in &r.obligations {
        println!("  {o}");
    }
    line("obstructed", if r.accepted { "yes" } else { "no" });
    write_report(a.out.as_ref(), &r)?;
    Ok(if r.accepted { EXIT_OK } else { EXIT_REJECT })
}

fn run_pipeline(a: &PipelineArgs) -> CmdResult {
    let x = load_manifest(&a.manifest)?;
    let marker = marker_of(&x, a.marker.as_ref())?;
    let ledger = load_ledger(a.ledger.as_ref())?;
    let (doc, ok): (Value, bool) = if a.w_plus {
        let f = w_plus_exotica_pipeline(&x, &marker, a.n, &ledger, LedgerPolicy::DeclaredOnly)?;
        for (h, p, id) in &f.modifications {
            println!("W+({p}) on {h} as {id}");
        }
        let ok = f.ledgers_equal && f.certificate.verdict == exotica::Verdict::Accept;
        (serde_json::to_value(&f).expect("serialisable"), ok)
    } else {
        let f = stein_nonstein_pipeline(&x, &marker, a.n, a.tail, &ledger, LedgerPolicy::DeclaredOnly)?;
        line("K0", &f.k0);
        for s in &f.stein_members {
            line(&s.label, if s.stein == Some(true) { "stein" } else { "not stein" });
        }
        for t in &f.tail {
            line(&format!("tail p={}", t.p), if t.obstruction.accepted { "non-stein" } else { "unobstructed" });
        }
        line("ledgers", if f.ledgers_equal { "equal" } else { "differ" });
        let ok = f.ledgers_equal
            && f.certificate.verdict == exotica::Verdict::Accept
            && f.tail.iter().all(|t| t.obstruction.accepted);
        (serde_json::to_value(&f).expect("serialisable"), ok)
    };
    println!("{}", if ok { "accept" } else { "reject" });
    if let Some(p) = &a.out {
        write_text(p, &to_json(&doc))?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_REJECT })
}

fn run(cmd: &Command) -> CmdResult {
    match cmd {
        Command::Build(a) => run_build(a),
        Command::Homology(a) => run_homology(a),
        Command::VerifyNucleus(a) => run_verify(a),
        Command::LogTransform(a) => run_log(a),
        Command::KnotSurgery(a) => run_knot(a),
        Command::WModify(a) => {
            let x = load_manifest(&a.manifest)?;
            emit_manifold(&w_modify(&x, &a.handle, a.sign, a.p)?, a.out.as_ref())?;
            Ok(EXIT_OK)
        }
        Command::CorkTwist(a) => {
            let x = load_manifest(&a.manifest)?;
            emit_manifold(&cork_twist(&x, &a.id)?, a.out.as_ref())?;
            Ok(EXIT_OK)
        }
        Command::Strip(a) => {
            let x = load_manifest(&a.manifest)?;
            let ids = if a.id.is_empty() { x.cork_registry.iter().map(|c| c.id.clone()).collect() } else { a.id.clone() };
            emit_manifold(&strip_corks(&x, &ids)?, a.out.as_ref())?;
            Ok(EXIT_OK)
        }
        Command::Steinify(a) => {
            let x = load_manifest(&a.manifest)?;
            emit_manifold(&steinify(&x)?, a.out.as_ref())?;
            Ok(EXIT_OK)
        }
        Command::SteinCheck(a) => run_stein_check(a),
        Command::GenFamily(a) => run_gen_family(a),
        Command::Certify(a) => run_certify(a),
        Command::CheckCert(a) => run_check(a),
        Command::ObstructStein(a) => run_obstruct(a),
        Command::Pipeline(a) => run_pipeline(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Precondition { name, message }) => {
            eprintln!("error[{name}]: {message}");
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}
