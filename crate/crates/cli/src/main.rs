mod policy;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use pvc_core::confluence::{self, CascadeGraph};
use pvc_core::dynamics::{self, PolyMap};
use pvc_core::suites::{self, Job};
use pvc_core::{catalog, quantise, shear, DynkinLabel, EngineError, Status, Suite, VerificationReport};

use policy::{Policy, DEFAULT_POLICY};

const EXIT_POLICY: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "pvc", version, about = "Exact verification of Painlevé monodromy cubics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites and check the outcome against the acceptance policy.
    Verify(VerifyArgs),
    /// Print stored data for one family.
    Show(ShowArgs),
    /// Apply a word of braid mutations; for D4 also run the Laurent exploration.
    Mutate(MutateArgs),
    /// Verify one confluence edge.
    Confluence(ConfluenceArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Catalog,
    Shear,
    Dynamics,
    Confluence,
    Quantum,
    Unfolding,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::All => Suite::ALL.to_vec(),
            SuiteArg::Catalog => vec![Suite::Catalog],
            SuiteArg::Shear => vec![Suite::Shear],
            SuiteArg::Dynamics => vec![Suite::Dynamics],
            SuiteArg::Confluence => vec![Suite::Confluence],
            SuiteArg::Quantum => vec![Suite::Quantum],
            SuiteArg::Unfolding => vec![Suite::Unfolding],
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Restrict to one family (D4, D5, ..., E7star, E7starstar, E8).
    #[arg(long)]
    label: Option<DynkinLabel>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    /// Policy file to use instead of the bundled one.
    #[arg(long)]
    policy: Option<std::path::PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum What {
    All,
    Omega,
    Epsilon,
    Cubic,
    Gtable,
    Shear,
    Quantum,
    Singularity,
}

#[derive(Args, Debug)]
struct ShowArgs {
    #[arg(long)]
    label: DynkinLabel,
    #[arg(long, value_enum, default_value = "all")]
    what: What,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct MutateArgs {
    #[arg(long)]
    label: DynkinLabel,
    /// Comma-separated indices, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',', required = true)]
    word: Vec<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct ConfluenceArgs {
    /// Edge as SRC:DST, e.g. `D4:D5`.
    #[arg(long)]
    edge: String,
    #[arg(long)]
    show_dropped: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn seed_from_env() -> Result<u64, String> {
    let Ok(raw) = std::env::var("PVC_SEED") else {
        return Ok(pvc_core::DEFAULT_SEED);
    };
    let s = raw.trim();
    let parsed = match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("PVC_SEED must be an unsigned integer, got `{raw}`"))
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn engine_failure(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_POLICY)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match seed_from_env() {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    match cli.command {
        Command::Verify(a) => verify(a, seed),
        Command::Show(a) => show(a),
        Command::Mutate(a) => mutate(a, seed),
        Command::Confluence(a) => confluence_edge(a),
    }
}

fn run_jobs(jobs: &[Job], labels: &[DynkinLabel], seed: u64, threads: usize) -> Result<Vec<VerificationReport>, EngineError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    let chunks: Vec<Result<Vec<VerificationReport>, EngineError>> =
        pool.install(|| jobs.par_iter().map(|&j| suites::run_job(j, labels, seed)).collect());
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    suites::sort_reports(&mut out);
    Ok(out)
}

fn summary(reports: &[VerificationReport]) -> Value {
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    json!({
        "total": reports.len(),
        "pass": count(Status::Pass),
        "fail": count(Status::Fail),
        "calibrated": count(Status::Calibrated),
        "reported": count(Status::Reported),
    })
}

fn verify(a: VerifyArgs, seed: u64) -> ExitCode {
    let policy_src = match &a.policy {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => return usage(format!("cannot read policy {}: {e}", path.display())),
        },
        None => DEFAULT_POLICY.to_string(),
    };
    let policy = match Policy::parse(&policy_src) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let suites = a.suite.suites();
    let labels: Vec<DynkinLabel> = match a.label {
        Some(l) => vec![l],
        None => DynkinLabel::ALL.to_vec(),
    };
    let started = Instant::now();
    let reports = match run_jobs(&suites::jobs(&suites, &labels), &labels, seed, a.parallel) {
        Ok(r) => r,
        Err(e) => return engine_failure(e),
    };
    let elapsed = started.elapsed();
    let violations = policy.violations(&reports);
    match a.format {
        Format::Json => print_json(&json!({
            "seed": seed,
            "suites": suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "labels": labels.iter().map(|l| l.name()).collect::<Vec<_>>(),
            "reports": reports.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
            "summary": summary(&reports),
            "policy_violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })),
        Format::Text => {
            for r in &reports {
                println!("{}", r.text_line());
            }
            let s = summary(&reports);
            println!(
                "{} checks: {} pass, {} fail, {} calibrated, {} reported ({:.2}s, seed {seed})",
                s["total"], s["pass"], s["fail"], s["calibrated"], s["reported"],
                elapsed.as_secs_f64()
            );
            for v in &violations {
                println!("policy violation: {v}");
            }
        }
    }
    if violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_POLICY)
    }
}

fn show(a: ShowArgs) -> ExitCode {
    let spec = catalog::build(a.label);
    let mut fields: Vec<(String, Value)> = Vec::new();
    let want = |w: What| a.what == What::All || a.what == w;
    if want(What::Singularity) {
        fields.push(("painleve".into(), a.label.painleve().into()));
        fields.push(("singularity".into(), a.label.singularity().into()));
    }
    if want(What::Epsilon) {
        fields.push(("epsilon".into(), json!(spec.eps)));
    }
    if want(What::Omega) {
        for (i, w) in spec.omega_display().iter().enumerate() {
            fields.push((format!("omega{}", i + 1), w.to_string().into()));
        }
    }
    if want(What::Gtable) {
        for (s, v) in &spec.gtable {
            fields.push((format!("{} ->", pvc_core::SymbolTable::standard().name(*s)), v.to_string().into()));
        }
    }
    if want(What::Cubic) {
        fields.push(("cubic".into(), catalog::cubic(&spec).to_string().into()));
    }
    if want(What::Shear) {
        for (i, x) in shear::param(a.label).x.iter().enumerate() {
            fields.push((format!("x{}", i + 1), x.to_string().into()));
        }
    }
    if want(What::Quantum) {
        match quantise::quantize(a.label) {
            Ok(q) => {
                for (i, x) in q.x.iter().enumerate() {
                    fields.push((format!("X{}", i + 1), x.to_string().into()));
                }
            }
            Err(e) => return engine_failure(e),
        }
    }
    match a.format {
        Format::Json => {
            print_json(&json!({ "label": a.label.name(), "fields": fields.into_iter().collect::<serde_json::Map<_, _>>() }))
        }
        Format::Text => {
            for (k, v) in fields {
                match v {
                    Value::String(s) => println!("{k} = {s}"),
                    other => println!("{k} = {other}"),
                }
            }
        }
    }
    ExitCode::SUCCESS
}

fn mutate(a: MutateArgs, seed: u64) -> ExitCode {
    let mut map = PolyMap::identity();
    for &i in &a.word {
        match dynamics::braid_generic(i, a.label) {
            Ok(b) => map = map.then(&b).expect("same symbol table"),
            Err(e) => return usage(e),
        }
    }
    let cubic = dynamics::generic_cubic(a.label);
    let invariant = match map.apply(&cubic) {
        Ok(c) => c == cubic,
        Err(e) => return engine_failure(e),
    };
    let laurent = if a.label == DynkinLabel::D4 {
        match dynamics::laurent_report(&a.word, seed) {
            Ok(r) => Some(r),
            Err(e) => return engine_failure(e),
        }
    } else {
        None
    };
    let images: Vec<String> = map.images.iter().map(|p| p.to_string()).collect();
    match a.format {
        Format::Json => print_json(&json!({
            "label": a.label.name(),
            "word": a.word,
            "images": images,
            "cubic_invariant": invariant,
            "laurent": laurent.as_ref().map(VerificationReport::to_json),
        })),
        Format::Text => {
            for (i, img) in images.iter().enumerate() {
                println!("x{} -> {img}", i + 1);
            }
            println!("cubic invariant: {invariant}");
            if let Some(r) = &laurent {
                println!("{}", r.text_line());
                for k in ["all_exact", "final_terms", "on_shifted_cubic"] {
                    if let Some(v) = r.payload.get(k) {
                        println!("  {k}: {v}");
                    }
                }
            }
        }
    }
    if invariant {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_POLICY)
    }
}

fn confluence_edge(a: ConfluenceArgs) -> ExitCode {
    let graph = CascadeGraph::standard();
    let step = match graph.parse_edge(&a.edge) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let report = match confluence::verify_edge(step) {
        Ok(r) => r,
        Err(e) => return engine_failure(e),
    };
    let dropped = if a.show_dropped {
        let x = match shear::param(step.source).free_x() {
            Ok(x) => x,
            Err(e) => return engine_failure(e),
        };
        match confluence::limit_triple(&x, step) {
            Ok(l) => Some(l.iter().map(|l| l.dropped.to_string()).collect::<Vec<_>>()),
            Err(e) => return engine_failure(e),
        }
    } else {
        None
    };
    match a.format {
        Format::Json => print_json(&json!({
            "edge": step.name(),
            "substitution": step.images_json(),
            "report": report.to_json(),
            "dropped": dropped,
        })),
        Format::Text => {
            println!("{step}");
            println!("{}", report.text_line());
            if let Some(d) = &dropped {
                for (i, t) in d.iter().enumerate() {
                    println!("dropped x{}: {t}", i + 1);
                }
            }
        }
    }
    let policy = Policy::parse(DEFAULT_POLICY).expect("bundled policy parses");
    if policy.violations(std::slice::from_ref(&report)).is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_POLICY)
    }
}
