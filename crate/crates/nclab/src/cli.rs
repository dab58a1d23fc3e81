//! `nclab` command line: one subcommand per suite plus `all`.
//!
//! Exit status 0 when no verdict failed (flagged is not failed), 1 on a
//! failed verdict or a numerical error, 2 on a bad config or an unmet
//! precondition.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nclab_core::Error;
use serde_json::Value;

use crate::config::{ConfigError, LoadedConfig};
use crate::report::{profile_csv, to_json, VerificationReport};
use crate::suites::{self, Context, Profile};

#[derive(Parser, Debug)]
#[command(name = "nclab", version, about = "Numerical checks for noncommutative L_p semigroup inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditions on the regularly related pair
    VerifyPair(Common),
    /// |||T_t|||_{1→∞} on the t-grid
    Profile {
        #[command(flatten)]
        common: Common,
        /// Also write the profile CSV here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    Multiplier(Common),
    Maximal(Common),
    Subordinate(Common),
    /// Dirichlet-form regularity, derivative lemmas, log-Sobolev equivalence
    Logsobolev(Common),
    /// Ultracontractivity/Sobolev constants and the weak-type splitting
    Theorem11(Common),
    LocalSobolev(Common),
    All(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports
    #[arg(long, default_value = "nclab-reports")]
    out: PathBuf,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Suite(Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Suite(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Suite(e) => error_code(e),
        }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) | Error::Validation(_) | Error::Specification(_) | Error::Parse(_) => 2,
        _ => 1,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Suite(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Applies `NCLAB_THREADS` to the global rayon pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NCLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Io(format!("NCLAB_THREADS must be a positive integer, got `{v}`")))?;
    // a second call in the same process keeps the first pool; that is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

struct Outcome {
    reports: Vec<VerificationReport>,
    errors: Vec<(String, Error)>,
}

fn write_report(out: &Path, r: &VerificationReport) -> Result<(), CliError> {
    let json = out.join(format!("{}.json", r.suite));
    std::fs::write(&json, r.to_json()).map_err(|e| io_err(&json, e))?;
    let md = out.join(format!("{}.md", r.suite));
    std::fs::write(&md, r.to_markdown()).map_err(|e| io_err(&md, e))?;
    Ok(())
}

/// Rebuilds the profile CSV from the report data, so both carry the same numbers.
fn csv_from_report(r: &VerificationReport) -> Result<String, CliError> {
    let floats = |k: &str| -> Vec<f64> {
        r.data[k].as_array().map(|a| a.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect()).unwrap_or_default()
    };
    let certs: Vec<&str> = r.data["certificate"]
        .as_array()
        .map(|a| a.iter().map(|v| v.as_str().unwrap_or("")).collect())
        .unwrap_or_default();
    profile_csv(&floats("t"), &floats("norm"), &certs).map_err(|e| CliError::Io(format!("profile CSV: {e}")))
}

type Suite = fn(&Context) -> nclab_core::Result<Vec<VerificationReport>>;

fn one(r: nclab_core::Result<VerificationReport>) -> nclab_core::Result<Vec<VerificationReport>> {
    r.map(|r| vec![r])
}

fn suite_list(name: &str) -> Vec<(&'static str, Suite)> {
    let pair: (&str, Suite) = ("verify-pair", |c| one(suites::pair::verify_pair(c)));
    let profile: (&str, Suite) = ("profile", |c| one(suites::profile::verify_profile(c)));
    let multiplier: (&str, Suite) = ("multiplier", |c| one(suites::multiplier::verify_multiplier(c)));
    let maximal: (&str, Suite) = ("maximal", |c| one(suites::multiplier::verify_maximal(c)));
    let subordinate: (&str, Suite) = ("subordinate", |c| one(suites::subordinate::verify_subordinate(c)));
    let logsobolev: (&str, Suite) = ("logsobolev", |c| {
        let profile = Profile::for_context(c)?;
        Ok(vec![
            suites::verify_prop_4_4(c)?,
            suites::verify_derivative_lemmas(c)?,
            suites::verify_log_sobolev(c, &profile)?,
        ])
    });
    let theorem11: (&str, Suite) = ("theorem11", |c| Ok(vec![suites::verify_theorem_1_1(c)?, suites::verify_lemma_2_1(c)?]));
    let local: (&str, Suite) = ("local-sobolev", |c| one(suites::verify_local_sobolev(c)));
    match name {
        "verify-pair" => vec![pair],
        "profile" => vec![profile],
        "multiplier" => vec![multiplier],
        "maximal" => vec![maximal],
        "subordinate" => vec![subordinate],
        "logsobolev" => vec![logsobolev],
        "theorem11" => vec![theorem11],
        "local-sobolev" => vec![local],
        _ => vec![pair, profile, theorem11, logsobolev, local, multiplier, maximal, subordinate],
    }
}

fn run_suites(ctx: &Context, name: &str) -> Outcome {
    let mut out = Outcome {
        reports: Vec::new(),
        errors: Vec::new(),
    };
    for (suite, f) in suite_list(name) {
        match f(ctx) {
            Ok(rs) => out.reports.extend(rs),
            Err(e) => out.errors.push((suite.to_string(), e)),
        }
    }
    out
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let (name, common, csv) = match cli.command {
        Command::VerifyPair(c) => ("verify-pair", c, None),
        Command::Profile { common, csv } => ("profile", common, csv),
        Command::Multiplier(c) => ("multiplier", c, None),
        Command::Maximal(c) => ("maximal", c, None),
        Command::Subordinate(c) => ("subordinate", c, None),
        Command::Logsobolev(c) => ("logsobolev", c, None),
        Command::Theorem11(c) => ("theorem11", c, None),
        Command::LocalSobolev(c) => ("local-sobolev", c, None),
        Command::All(c) => ("all", c, None),
    };
    let loaded = LoadedConfig::from_path(&common.config).map_err(CliError::Config)?;
    let ctx = Context::with_seed(&loaded, common.seed.unwrap_or(loaded.config.seed))?;
    std::fs::create_dir_all(&common.out).map_err(|e| io_err(&common.out, e))?;

    let outcome = run_suites(&ctx, name);
    for r in &outcome.reports {
        write_report(&common.out, r)?;
        println!("{:<28} {}", r.suite, r.worst().as_str());
    }
    if let Some(r) = outcome.reports.iter().find(|r| r.suite == "profile") {
        let text = csv_from_report(r)?;
        let path = common.out.join("profile.csv");
        std::fs::write(&path, &text).map_err(|e| io_err(&path, e))?;
        if let Some(extra) = csv {
            std::fs::write(&extra, &text).map_err(|e| io_err(&extra, e))?;
        }
    }
    for (suite, e) in &outcome.errors {
        eprintln!("{suite}: {e}");
    }
    if name == "all" {
        let mut all = serde_json::Map::new();
        all.insert(
            "reports".into(),
            Value::Object(outcome.reports.iter().map(|r| (r.suite.clone(), r.to_value())).collect()),
        );
        all.insert(
            "errors".into(),
            Value::Object(outcome.errors.iter().map(|(s, e)| (s.clone(), Value::String(e.to_string()))).collect()),
        );
        let path = common.out.join("all.json");
        std::fs::write(&path, to_json(&Value::Object(all))).map_err(|e| io_err(&path, e))?;
    }

    let failed = outcome.reports.iter().any(|r| r.failed());
    let err_code = outcome.errors.iter().map(|(_, e)| error_code(e)).max().unwrap_or(0);
    Ok(err_code.max(failed as i32))
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
