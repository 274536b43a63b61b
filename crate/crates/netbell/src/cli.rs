//! Command-line interface.
//!
//! Exit codes: 0 ok, 2 usage or malformed input, 3 size guard, 4 bound
//! mismatch, 5 certificate failure, 6 correspondence violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use netbell_core::certify::{sos_certificate, Family, ScanSettings};
use netbell_core::functional::{binomial, Functional, Kind};
use netbell_core::optimize::{vector_model_optimize, SeesawConfig};
use netbell_core::states::QuantumState;
use netbell_core::Error;
use serde_json::json;

use crate::drivers;
use crate::io::{correspondence_csv, write_atomic};
use crate::json::{
    check_settings, parse_settings, CorrespondenceJson, OptimizationJson, RunRecord, SosJson, StrategyJson,
    VectorModelJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_BOUND_MISMATCH: i32 = 4;
pub const EXIT_CERTIFICATE: i32 = 5;
pub const EXIT_CORRESPONDENCE: i32 = 6;
const EXIT_IO: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "netbell", version, about = "Bell and network-nonlocality functionals: bounds, optimization, certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximize a functional over quantum strategies.
    Optimize(OptimizeArgs),
    /// Classical bound by closed form, exhaustive enumeration or sampling.
    Bound(BoundArgs),
    /// Sum-of-squares certificate at given settings or at a seesaw optimum.
    Certify(CertifyArgs),
    /// Compare network maxima with per-edge maxima on random sources.
    Correspondence(CorrespondenceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expr {
    Chsh,
    Chained,
    Gm,
    Bilocal,
    Star,
    Delta,
    Xi,
}

impl Expr {
    fn kind(self) -> Kind {
        match self {
            Expr::Chsh => Kind::Chsh,
            Expr::Chained => Kind::Chained,
            Expr::Gm => Kind::Gm,
            Expr::Bilocal => Kind::BilocalS,
            Expr::Star => Kind::StarSn,
            Expr::Delta => Kind::DeltaNm,
            Expr::Xi => Kind::XiM,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Seesaw,
    Vector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Formula,
    Enumerate,
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Bilocal,
    Star,
    Xi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Pretty,
}

#[derive(Debug, Args)]
pub struct Scenario {
    #[arg(long, value_enum)]
    pub expr: Expr,
    /// Settings per edge party (defaults depend on --expr).
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of sources (defaults depend on --expr).
    #[arg(long)]
    pub n: Option<usize>,
}

impl Scenario {
    fn build(&self) -> Result<Functional, Error> {
        let kind = self.expr.kind();
        let (dm, dn) = kind.default_scenario();
        let n = match kind {
            Kind::Chsh | Kind::Chained | Kind::Gm => self.n.unwrap_or(1),
            _ => self.n.unwrap_or(dn),
        };
        Functional::build(kind, self.m.unwrap_or(dm), n)
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub scenario: Scenario,
    /// Local dimension of every party slot.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Maximum seesaw sweeps per restart.
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    #[arg(long, value_enum, default_value_t = Model::Seesaw)]
    pub model: Model,
    /// Ambient dimension for --model vector (defaults to m).
    #[arg(long)]
    pub ambient: Option<usize>,
    /// Also write the output to this file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub scenario: Scenario,
    #[arg(long, value_enum, default_value_t = Method::Formula)]
    pub method: Method,
    /// Random models drawn by --method sample.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Hidden-variable support size per source for --method sample.
    #[arg(long, default_value_t = 3)]
    pub support: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["settings", "at_optimum"])))]
pub struct CertifyArgs {
    #[command(flatten)]
    pub scenario: Scenario,
    /// JSON file with `state` and `observables`.
    #[arg(long)]
    pub settings: Option<PathBuf>,
    /// Run the seesaw first and certify its optimum.
    #[arg(long)]
    pub at_optimum: bool,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrespondenceArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Settings per edge party (xi only).
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Number of sources (star and xi).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV file with one row per trial.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use singlets for every source instead of random states.
    #[arg(long)]
    pub singlet: bool,
    /// Seesaw restarts for star and xi maxima.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    /// Also write the record to this file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionGuard { .. } | Error::SearchSpaceTooLarge { .. } => EXIT_GUARD,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

struct Outcome {
    record: RunRecord,
    format: Format,
    file: Option<PathBuf>,
    code: i32,
}

fn record(command: &str, f: &Functional, seed: Option<u64>, value: f64, start: Instant) -> RunRecord {
    RunRecord {
        command: command.to_string(),
        scenario: f.into(),
        seed,
        value,
        classical_bound: f.classical_bound(),
        quantum_bound: f.quantum_bound(),
        artifacts: None,
        note: None,
        wall_time_ms: start.elapsed().as_millis() as u64,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Explains the sign-table bound when the alternative binomial form differs.
fn sign_table_note(f: &Functional) -> Option<String> {
    if !matches!(f.kind, Kind::Gm | Kind::DeltaNm) {
        return None;
    }
    let m = f.m as u64;
    let alt = m * binomial(m, (m - 1) / 2);
    let used = f.classical_bound();
    (alt as f64 != used).then(|| {
        format!(
            "bound m*C(m-1,floor((m-1)/2)) = {used}; the form m*C(m,floor((m-1)/2)) = {alt} disagrees with exhaustive enumeration and is not used"
        )
    })
}

fn optimize(a: &OptimizeArgs) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let f = a.scenario.build()?;
    let mut rec;
    match a.model {
        Model::Seesaw => {
            let cfg = SeesawConfig {
                edge_dim: a.dim,
                central_dim: a.dim,
                max_iters: a.iters,
                tol: a.tol,
                restarts: a.restarts,
                seed: a.seed,
            };
            let r = drivers::seesaw_best(&f, &cfg)?;
            rec = record("optimize", &f, Some(a.seed), r.value, start);
            rec.artifacts = Some(json!({ "model": "seesaw", "dim": a.dim, "restarts": a.restarts, "optimization": OptimizationJson::from(&r) }));
            if !r.converged {
                rec.note = Some(format!("best restart stopped after {} sweeps without converging", r.iterations));
            }
        }
        Model::Vector => {
            let ambient = a.ambient.unwrap_or(f.m);
            let (v, model) = vector_model_optimize(&f, ambient, a.seed);
            rec = record("optimize", &f, Some(a.seed), v, start);
            rec.artifacts = Some(json!({ "model": "vector", "vector_model": VectorModelJson::from(&model) }));
        }
    }
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(Outcome {
        record: rec,
        format: a.out,
        file: a.file.clone(),
        code: EXIT_OK,
    })
}

fn bound(a: &BoundArgs) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let f = a.scenario.build()?;
    let formula = f.classical_bound();
    let mut note = sign_table_note(&f);
    let mut code = EXIT_OK;
    let mut rec = match a.method {
        Method::Formula => {
            let mut r = record("bound", &f, None, formula, start);
            r.artifacts = Some(json!({ "method": "formula" }));
            r
        }
        Method::Enumerate => {
            let (v, witness) = drivers::enumerate_max(&f)?;
            if v != formula {
                code = EXIT_BOUND_MISMATCH;
                note = Some(format!("enumeration gives {v} but the closed form gives {formula}"));
            }
            let mut r = record("bound", &f, None, v, start);
            r.artifacts = Some(json!({ "method": "enumerate", "witness": StrategyJson::from(&witness) }));
            r
        }
        Method::Sample => {
            if a.trials == 0 || a.support == 0 {
                return Err(usage("--trials and --support must be positive"));
            }
            let (v, at) = drivers::sample_max(&f, a.trials, a.support, a.seed)?;
            if v > formula + 1e-12 {
                code = EXIT_BOUND_MISMATCH;
                note = Some(format!("sampled model {at} reaches {v}, above the closed form {formula}"));
            }
            let mut r = record("bound", &f, Some(a.seed), v, start);
            r.artifacts = Some(json!({ "method": "sample", "trials": a.trials, "support": a.support, "argmax_trial": at }));
            r
        }
    };
    rec.note = note;
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(Outcome {
        record: rec,
        format: a.out,
        file: a.file.clone(),
        code,
    })
}

fn certify(a: &CertifyArgs) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let f = a.scenario.build()?;
    let (state, assignment, optimization, seed) = match &a.settings {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: malformed JSON: {e}", path.display())))?;
            let (state, assignment) = parse_settings(&value).map_err(|e| usage(e.to_string()))?;
            check_settings(&f, &state, &assignment).map_err(|e| usage(e.to_string()))?;
            (state, assignment, None, None)
        }
        None => {
            let cfg = SeesawConfig::new(a.dim)
                .with_restarts(a.restarts)
                .with_iters(a.iters)
                .with_seed(a.seed);
            let r = drivers::seesaw_best(&f, &cfg)?;
            let json = OptimizationJson::from(&r);
            (r.state, r.observables, Some(json), Some(a.seed))
        }
    };
    let report = sos_certificate(&f, &state, &assignment).map_err(|e| match e {
        Error::ZeroNorm { .. } => Failure {
            code: EXIT_CERTIFICATE,
            message: e.to_string(),
        },
        e => e.into(),
    })?;
    let mut rec = record("certify", &f, seed, report.value, start);
    let passed = report.passes();
    rec.artifacts = Some(json!({ "sos": SosJson::from(&report), "optimization": optimization }));
    if !passed {
        rec.note = Some("certificate failed: negative gap or indefinite gamma".into());
    }
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(Outcome {
        record: rec,
        format: a.out,
        file: a.file.clone(),
        code: if passed { EXIT_OK } else { EXIT_CERTIFICATE },
    })
}

fn correspondence(a: &CorrespondenceArgs) -> Result<Outcome, Failure> {
    let start = Instant::now();
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let family = match a.family {
        FamilyArg::Bilocal => Family::Bilocal,
        FamilyArg::Star => Family::Star { n: a.n },
        FamilyArg::Xi => Family::Xi { m: a.m, n: a.n },
    };
    let f = family.functional()?;
    let settings = ScanSettings {
        restarts: a.restarts.max(1),
        ..ScanSettings::default()
    };
    let singlets: Vec<QuantumState> = vec![QuantumState::singlet(); family.sources()];
    let fixed = a.singlet.then_some(singlets.as_slice());
    let report = drivers::correspondence(family, a.trials, a.seed, &settings, fixed)?;
    if let Some(path) = &a.out {
        let bytes = correspondence_csv(&report).map_err(|e| Failure {
            code: EXIT_IO,
            message: e.to_string(),
        })?;
        write_atomic(path, &bytes).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        })?;
    }
    let summary = CorrespondenceJson::from(&report);
    let mut rec = record("correspondence", &f, Some(a.seed), summary.max_network_value, start);
    rec.note = Some(format!(
        "{} of {} trials exceed the edge bound; {} trials have every edge above its local bound, of which {} leave the network at or below its own",
        report.violations,
        a.trials,
        report.implication_checked,
        report.implication_failures
    ));
    rec.artifacts = Some(json!({ "correspondence": summary, "singlet": a.singlet }));
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(Outcome {
        record: rec,
        format: match a.format {
            ReportFormat::Json => Format::Json,
            ReportFormat::Pretty => Format::Pretty,
        },
        file: a.file.clone(),
        code: if report.violations == 0 { EXIT_OK } else { EXIT_CORRESPONDENCE },
    })
}

fn csv_line(r: &RunRecord) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["command", "kind", "m", "n", "seed", "value", "classical_bound", "quantum_bound"])
        .expect("in-memory write");
    w.write_record([
        r.command.clone(),
        r.scenario.kind.clone(),
        r.scenario.m.to_string(),
        r.scenario.n.to_string(),
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        r.value.to_string(),
        r.classical_bound.to_string(),
        r.quantum_bound.to_string(),
    ])
    .expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn pretty(r: &RunRecord) -> String {
    let mut s = format!(
        "{} {} m={} n={}",
        r.command, r.scenario.kind, r.scenario.m, r.scenario.n
    );
    if let Some(seed) = r.seed {
        s.push_str(&format!(" seed={seed}"));
    }
    s.push('\n');
    s.push_str(&format!("value            {:.9}\n", r.value));
    s.push_str(&format!("classical bound  {:.9}\n", r.classical_bound));
    s.push_str(&format!("quantum bound    {:.9}\n", r.quantum_bound));
    if let Some(note) = &r.note {
        s.push_str(&format!("note             {note}\n"));
    }
    s
}

pub fn render(r: &RunRecord, format: Format) -> String {
    match format {
        Format::Json => r.to_json() + "\n",
        Format::Csv => csv_line(r),
        Format::Pretty => pretty(r),
    }
}

/// Runs the CLI on `args`, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Optimize(a) => optimize(a),
        Command::Bound(a) => bound(a),
        Command::Certify(a) => certify(a),
        Command::Correspondence(a) => correspondence(a),
    };
    match outcome {
        Ok(o) => {
            let text = render(&o.record, o.format);
            if let Some(path) = &o.file {
                if let Err(e) = write_atomic(path, text.as_bytes()) {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    return EXIT_IO;
                }
            }
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_IO;
            }
            if let Some(note) = o.record.note.as_ref().filter(|_| o.code != EXIT_OK) {
                let _ = writeln!(err, "error: {note}");
            }
            o.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
