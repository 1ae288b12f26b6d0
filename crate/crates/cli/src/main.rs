//! `polyseq`: build structures, count, interpret, detect polynomial
//! sequences and run the construction gallery.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyseq::counting::{count_value, CountMode};
use polyseq::gallery::{
    self, bounded_decompose, canonical_form_with_cap, entry, gallery_check, paley_experiment, paley_graph,
    GalleryError, GalleryParams, GALLERY_CANON_CAP,
};
use polyseq::interp::{parse_scheme, InterpError};
use polyseq::logic::{parse_formula, satisfying_tuples, LogicError};
use polyseq::sequences::{detect_polynomial, Query, SequenceError, SequenceSpec, Verdict};
use polyseq::structures::{build_basic, build_transitive_tournament, graphs, BasicStructureSpec, Structure};
use serde_json::json;

#[derive(Parser)]
#[command(name = "polyseq", version, about = "Strongly polynomial sequences of relational structures")]
struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect structures.
    #[command(subcommand)]
    Structure(StructureCmd),
    /// Count the tuples satisfying a formula.
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated free variables, in order.
        #[arg(long)]
        vars: Option<String>,
        /// Also list the satisfying tuples.
        #[arg(long)]
        tuples: bool,
    },
    /// Count homomorphisms, injective or induced copies.
    Count {
        #[arg(long, value_enum, default_value = "hom")]
        mode: Mode,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Apply an interpretation scheme.
    Interpret {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Index passed to class-size certificates.
        #[arg(long)]
        index: Option<u64>,
    },
    /// Decide whether a count along a sequence is polynomial.
    Detect(DetectArgs),
    /// Named constructions.
    #[command(subcommand)]
    Gallery(GalleryCmd),
    /// Split a bounded-degree sequence into components with polynomial multiplicities.
    Decompose {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        cap: usize,
    },
    /// Homomorphism counts into Paley graphs.
    Paley {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        /// Number of primes used for the fit; the rest verify it.
        #[arg(long)]
        fit: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hom,
    Inj,
    Ind,
}

impl From<Mode> for CountMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Hom => CountMode::Hom,
            Mode::Inj => CountMode::Inj,
            Mode::Ind => CountMode::Ind,
        }
    }
}

#[derive(Subcommand)]
enum StructureCmd {
    /// Print a structure as canonical JSON.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Summarise a structure file.
    Show {
        #[arg(long = "in")]
        input: PathBuf,
        /// Print the canonical JSON instead of the summary.
        #[arg(long)]
        canonical: bool,
    },
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Basic structure with `k` tournaments and `l` marked vertices.
    Basic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
    },
    /// Transitive tournament on `n` marked vertices.
    Tournament { n: usize },
    /// A graph family: complete, cycle, path, empty, star.
    Graph { family: String, n: usize },
    /// Paley graph on a prime `q ≡ 1 (mod 4)`.
    Paley { q: u64 },
    /// Direct construction of a gallery entry.
    Gallery {
        name: String,
        n: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Entry parameters as JSON.
    #[arg(long)]
    params: Option<String>,
}

impl ParamArgs {
    fn parse(&self) -> Result<GalleryParams, CliError> {
        match &self.params {
            None => Ok(GalleryParams::default()),
            Some(text) => serde_json::from_str(text).map_err(|e| CliError::usage("params", e)),
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, required_unless_present = "formula", conflicts_with = "formula")]
    pattern: Option<PathBuf>,
    /// File holding a quantifier-free formula.
    #[arg(long)]
    formula: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "hom")]
    mode: Mode,
    #[arg(long, default_value_t = polyseq::sequences::DEFAULT_VERIFY_COUNT)]
    verify: usize,
    /// Also write `n,value,phase,match` rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GalleryCmd {
    /// List entries with their parameters and defaults.
    List,
    /// Build an entry through its scheme, or check it against its oracle.
    Run {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Index to build; ignored with `--check`.
        #[arg(long, default_value_t = 3)]
        n: u64,
        /// Compare with the direct construction over a range.
        #[arg(long)]
        check: bool,
        /// Check range as `FROM..TO`, inclusive; defaults to the entry's range.
        #[arg(long)]
        range: Option<String>,
        /// Also run the detector on K1, K2, P3 and K3.
        #[arg(long)]
        detect: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

struct CliError {
    code: &'static str,
    message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl Display) -> Self {
        CliError {
            code,
            message: message.to_string(),
        }
    }

    fn usage(what: &str, e: impl Display) -> Self {
        CliError::new("usage", format!("{what}: {e}"))
    }
}

fn logic_code(e: &LogicError) -> &'static str {
    match e {
        LogicError::Syntax { .. } => "formula-syntax",
        _ => "formula",
    }
}

impl From<InterpError> for CliError {
    fn from(e: InterpError) -> Self {
        let code = match &e {
            InterpError::Parse { .. } => "scheme-parse",
            InterpError::Logic(l) => logic_code(l),
            InterpError::BudgetExceeded { .. } => "budget",
            _ => "interp",
        };
        CliError::new(code, e)
    }
}

impl From<LogicError> for CliError {
    fn from(e: LogicError) -> Self {
        CliError::new(logic_code(&e), e)
    }
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        let code = if e.is_budget() { "budget" } else { "sequence" };
        CliError::new(code, e)
    }
}

impl From<GalleryError> for CliError {
    fn from(e: GalleryError) -> Self {
        match e {
            GalleryError::Sequence(s) => s.into(),
            GalleryError::UnknownEntry(_) | GalleryError::Param { .. } => CliError::new("gallery-params", e),
            other => CliError::new("gallery", other),
        }
    }
}

/// Successful run: stdout payload and whether every check passed.
struct Output {
    stdout: String,
    passed: bool,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, passed: true }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Structure, CliError> {
    Structure::from_json(&read(path)?).map_err(|e| CliError::new("structure", format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<SequenceSpec, CliError> {
    SequenceSpec::from_json(&read(path)?).map_err(|e| CliError::new("spec", format!("{}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn structure_cmd(cmd: StructureCmd) -> Result<Output, CliError> {
    let s = match cmd {
        StructureCmd::Show { input, canonical } => {
            let s = load_structure(&input)?;
            if canonical {
                return Ok(Output::ok(s.to_json()));
            }
            let counts: serde_json::Map<String, serde_json::Value> = s
                .signature()
                .symbols()
                .iter()
                .zip(s.relations())
                .map(|(sym, rel)| (sym.name.clone(), json!(rel.len())))
                .collect();
            let key = canonical_form_with_cap(&s, GALLERY_CANON_CAP).ok().map(|k| k.to_string());
            return Ok(Output::ok(pretty(&json!({
                "schemaVersion": 1,
                "signature": s.signature(),
                "domain": s.domain_size(),
                "tupleCounts": counts,
                "components": s.components().len(),
                "maxDegree": s.max_degree(),
                "canonicalKey": key,
            }))));
        }
        StructureCmd::Build(b) => match b {
            BuildCmd::Basic { k, l, orders } => {
                if orders.len() != k {
                    return Err(CliError::usage("orders", format!("expected {k} orders, got {}", orders.len())));
                }
                build_basic(&BasicStructureSpec::new(k, l, orders))
            }
            BuildCmd::Tournament { n } => build_transitive_tournament(n),
            BuildCmd::Graph { family, n } => match family.as_str() {
                "complete" => graphs::complete(n),
                "cycle" => graphs::cycle(n),
                "path" => graphs::path(n),
                "empty" => graphs::empty(n),
                "star" => graphs::star(n),
                other => return Err(CliError::usage("family", format!("unknown graph family `{other}`"))),
            },
            BuildCmd::Paley { q } => paley_graph(q)?,
            BuildCmd::Gallery { name, n, params } => gallery::oracle(&name, &params.parse()?, n)?,
        },
    };
    Ok(Output::ok(s.to_json()))
}

fn eval_cmd(formula: &str, input: &Path, vars: Option<String>, list: bool) -> Result<Output, CliError> {
    let a = load_structure(input)?;
    let declared: Option<Vec<String>> = vars.map(|v| v.split(',').map(|s| s.trim().to_string()).collect());
    let names: Option<Vec<&str>> = declared.as_ref().map(|d| d.iter().map(String::as_str).collect());
    let phi = parse_formula(formula, a.signature(), names.as_deref())?;
    let tuples = satisfying_tuples(&phi, &a)?;
    let mut out = json!({
        "schemaVersion": 1,
        "variables": phi.free_var_names(),
        "count": tuples.len(),
    });
    if list {
        out["tuples"] = json!(tuples);
    }
    Ok(Output::ok(pretty(&out)))
}

fn count_cmd(mode: Mode, pattern: &Path, target: &Path, as_json: bool) -> Result<Output, CliError> {
    let f = load_structure(pattern)?;
    let a = load_structure(target)?;
    let mode = CountMode::from(mode);
    let value = count_value(mode, &f, &a).map_err(|e| CliError::new("count", e))?;
    Ok(Output::ok(if as_json {
        pretty(&json!({ "schemaVersion": 1, "mode": mode.to_string(), "value": value.to_string() }))
    } else {
        value.to_string()
    }))
}

fn interpret_cmd(scheme: &Path, input: &Path, out: Option<PathBuf>, index: Option<u64>, seed: u64) -> Result<Output, CliError> {
    let text = read(scheme)?;
    let scheme = parse_scheme(&text).map_err(|e| {
        let mut e = CliError::from(e);
        e.message = format!("{}: {}", scheme.display(), e.message);
        e
    })?;
    let a = load_structure(input)?;
    let b = scheme.apply(&a, index, seed)?;
    match out {
        Some(path) => {
            write(&path, &b.to_json())?;
            Ok(Output::ok(pretty(&json!({
                "schemaVersion": 1,
                "scheme": scheme.name(),
                "domain": b.domain_size(),
                "out": path.display().to_string(),
            }))))
        }
        None => Ok(Output::ok(b.to_json())),
    }
}

fn detect_cmd(args: DetectArgs) -> Result<Output, CliError> {
    let spec = load_spec(&args.spec)?;
    let query = match (&args.pattern, &args.formula) {
        (Some(p), _) => Query::Pattern {
            pattern: load_structure(p)?,
            mode: args.mode.into(),
        },
        (None, Some(f)) => Query::Formula(parse_formula(read(f)?.trim(), &spec.signature()?, None)?),
        (None, None) => return Err(CliError::usage("detect", "give --pattern or --formula")),
    };
    let fit = detect_polynomial(&spec, &query, args.verify)?;
    if let Some(path) = &args.csv {
        write(path, &fit.to_csv())?;
    }
    Ok(Output {
        stdout: fit.to_json(),
        passed: fit.verdict == Verdict::Polynomial,
    })
}

fn parse_range(text: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::usage("range", format!("expected FROM..TO, got `{text}`"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn gallery_cmd(cmd: GalleryCmd) -> Result<Output, CliError> {
    match cmd {
        GalleryCmd::List => Ok(Output::ok(gallery::list_json())),
        GalleryCmd::Run {
            name,
            params,
            n,
            check,
            range,
            detect,
            format,
        } => {
            let params = params.parse()?;
            if !check {
                let spec = gallery::scheme_spec(&name, &params)?;
                return Ok(Output::ok(spec.term(n)?.to_json()));
            }
            let (from, to) = match range {
                Some(r) => parse_range(&r)?,
                None => entry(&name)?.range,
            };
            let report = gallery_check(&name, &params, from..=to, detect)?;
            Ok(Output {
                stdout: match format {
                    Format::Json => report.to_json(),
                    Format::Csv => report.to_csv(),
                },
                passed: report.passed(),
            })
        }
    }
}

fn decompose_cmd(spec: &Path, cap: usize) -> Result<Output, CliError> {
    let spec = load_spec(spec)?;
    match bounded_decompose(&spec, cap) {
        Ok(d) => Ok(Output::ok(d.to_json())),
        Err(e @ (GalleryError::UnboundedDegree { .. } | GalleryError::Verification { .. })) => {
            let kind = match e {
                GalleryError::UnboundedDegree { .. } => "unboundedDegree",
                _ => "verification",
            };
            Ok(Output {
                stdout: pretty(&json!({
                    "schemaVersion": 1,
                    "rejected": { "kind": kind, "message": e.to_string() },
                })),
                passed: false,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn paley_cmd(pattern: &Path, primes: &[u64], fit: Option<usize>) -> Result<Output, CliError> {
    let f = load_structure(pattern)?;
    let fit = fit.unwrap_or(primes.len().saturating_sub(1).max(1));
    let report = paley_experiment(&f, primes, fit)?;
    Ok(Output {
        stdout: report.to_json(),
        passed: report.verified,
    })
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Structure(cmd) => structure_cmd(cmd),
        Command::Eval {
            formula,
            input,
            vars,
            tuples,
        } => eval_cmd(&formula, &input, vars, tuples),
        Command::Count {
            mode,
            pattern,
            target,
            json,
        } => count_cmd(mode, &pattern, &target, json),
        Command::Interpret {
            scheme,
            input,
            out,
            index,
        } => interpret_cmd(&scheme, &input, out, index, cli.seed),
        Command::Detect(args) => detect_cmd(args),
        Command::Gallery(cmd) => gallery_cmd(cmd),
        Command::Decompose { spec, cap } => decompose_cmd(&spec, cap),
        Command::Paley { pattern, primes, fit } => paley_cmd(&pattern, &primes, fit),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.stdout.trim_end());
            if out.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.code, e.message);
            ExitCode::from(2)
        }
    }
}
