mod cache;
mod commands;
mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qmonoidal::{Error, Sign, Tolerances, Variant};

use cache::Cache;
use commands::LinkingAction;
use report::{Outcome, Report};

#[derive(Parser)]
#[command(name = "qmonoidal", version, about = "Free orthogonal and unitary quantum groups: classification, categories, linking algebras and cocycles")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rank: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_check: f64,
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol_kms: f64,
    /// cache directory; falls back to $QMONOIDAL_CACHE, caching is off if neither is set
    #[arg(long, global = true, env = "QMONOIDAL_CACHE")]
    cache_dir: Option<PathBuf>,
    /// worker threads for independent labels, blocks and criteria
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Ao,
    Au,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Ao => Variant::Ao,
            VariantArg::Au => Variant::Au,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sign, trace, quantum dimension and canonical form of an A_o matrix
    ClassifyAo {
        #[arg(long)]
        input: PathBuf,
    },
    /// Balance, quantum dimension and singular values of an A_u matrix
    ClassifyAu {
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide equivalence and monoidal equivalence of two matrices
    MonEquiv {
        #[arg(long, value_enum, default_value_t = VariantArg::Ao)]
        variant: VariantArg,
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
    },
    /// Build a canonical A_o matrix with given sign, trace and size
    ConstructCompanion {
        /// +1 or -1
        #[arg(long, allow_hyphen_values = true)]
        sign: i32,
        #[arg(long)]
        trace: f64,
        #[arg(long)]
        n: usize,
        /// also write the matrix JSON here
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Carrier dimensions, quantum dimensions and fusion rules
    Category {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Ao)]
        variant: VariantArg,
        #[arg(long)]
        level: Option<usize>,
        /// include all 6j matrices
        #[arg(long)]
        sixj: bool,
    },
    /// Linking algebra of two monoidally equivalent matrices
    Linking {
        #[arg(value_enum, default_value_t = LinkingAction::All)]
        action: LinkingAction,
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Ao)]
        variant: VariantArg,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Dual 2-cocycle of two matrices of equal size
    Cocycle {
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Ao)]
        variant: VariantArg,
        #[arg(long, default_value_t = 3)]
        level: usize,
        /// random unitaries u_x from this seed instead of identities
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the acceptance criteria
    VerifyAll {
        /// run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Failure {
        Failure { code: if error.is_numerical() { 1 } else { 3 }, error }
    }
}

struct Run {
    outcome: Outcome,
    hash_parts: Vec<String>,
    cache: &'static str,
}

fn cached(
    cache: &Cache,
    parts: &[String],
    compute: impl FnOnce() -> qmonoidal::Result<Outcome>,
) -> qmonoidal::Result<(Outcome, &'static str)> {
    if !cache.enabled() {
        return Ok((compute()?, "off"));
    }
    let refs: Vec<&str> = parts.iter().map(String::as_str).collect();
    let key = Cache::key(&refs);
    if let Some(o) = cache.load(&key) {
        return Ok((o, "hit"));
    }
    let o = compute()?;
    if let Err(e) = cache.store(&key, &o) {
        eprintln!("warning: cannot write cache entry: {e}");
    }
    Ok((o, "miss"))
}

fn execute(cmd: &Cmd, tol: &Tolerances, cache: &Cache) -> Result<Run, Failure> {
    let tol_key = format!("{:e}/{:e}/{:e}", tol.rank, tol.check, tol.kms);
    let plain = |outcome, hash_parts| Run { outcome, hash_parts, cache: "off" };
    Ok(match cmd {
        Cmd::ClassifyAo { input } => {
            let i = commands::read_input(input)?;
            plain(commands::classify_ao(&i.matrix, tol)?, vec![i.canonical])
        }
        Cmd::ClassifyAu { input } => {
            let i = commands::read_input(input)?;
            plain(commands::classify_au(&i.matrix, tol)?, vec![i.canonical])
        }
        Cmd::MonEquiv { variant, f1, f2 } => {
            let (a, b) = (commands::read_input(f1)?, commands::read_input(f2)?);
            let v: Variant = (*variant).into();
            plain(commands::mon_equiv(v, &a.matrix, &b.matrix, tol)?, vec![v.name().into(), a.canonical, b.canonical])
        }
        Cmd::ConstructCompanion { sign, trace, n, output } => {
            let s = match sign {
                1 => Sign::Plus,
                -1 => Sign::Minus,
                _ => return Err(Error::InvalidInput(format!("sign must be +1 or -1, got {sign}")).into()),
            };
            let (o, m) = commands::construct_companion(s, *trace, *n, tol)?;
            if let Some(path) = output {
                let text = qmonoidal::io::matrix_to_string(&m)?;
                std::fs::write(path, text)
                    .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
            }
            plain(o, vec![sign.to_string(), format!("{trace:e}"), n.to_string()])
        }
        Cmd::Category { input, variant, level, sixj } => {
            let i = commands::read_input(input)?;
            let v: Variant = (*variant).into();
            let parts = vec![
                "category".to_string(),
                v.name().into(),
                i.canonical.clone(),
                format!("{level:?}"),
                sixj.to_string(),
                tol_key,
            ];
            let (o, c) = cached(cache, &parts, || commands::category(v, &i.matrix, *level, *sixj, tol))?;
            Run { outcome: o, hash_parts: parts, cache: c }
        }
        Cmd::Linking { action, f1, f2, variant, level } => {
            let (a, b) = (commands::read_input(f1)?, commands::read_input(f2)?);
            let v: Variant = (*variant).into();
            let parts = vec![
                "linking".to_string(),
                format!("{action:?}"),
                v.name().into(),
                a.canonical.clone(),
                b.canonical.clone(),
                format!("{level:?}"),
                tol_key,
            ];
            let (o, c) = cached(cache, &parts, || commands::linking(v, &a.matrix, &b.matrix, *level, *action, tol))?;
            Run { outcome: o, hash_parts: parts, cache: c }
        }
        Cmd::Cocycle { f1, f2, variant, level, seed } => {
            let (a, b) = (commands::read_input(f1)?, commands::read_input(f2)?);
            let v: Variant = (*variant).into();
            let o = commands::cocycle(v, &a.matrix, &b.matrix, *level, *seed, tol)?;
            plain(o, vec![v.name().into(), a.canonical, b.canonical, level.to_string(), format!("{seed:?}")])
        }
        Cmd::VerifyAll { only } => plain(commands::verify_all(only, tol), vec![format!("{only:?}")]),
    })
}

/// Print to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let g = &cli.global;
    let tol = Tolerances { rank: g.tol_rank, check: g.tol_check, kms: g.tol_kms };
    if let Err(e) = tol.validate() {
        eprintln!("error [{}]: {e}", e.kind());
        return ExitCode::from(2);
    }
    if g.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build_global() {
        eprintln!("warning: cannot configure thread pool: {e}");
    }
    let cache = Cache::new(g.cache_dir.clone());
    let start = Instant::now();
    let run = match execute(&cli.cmd, &tol, &cache) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error [{}]: {}", f.error.kind(), f.error);
            let report = json!({
                "command": argv,
                "error": {"kind": f.error.kind(), "message": f.error.to_string()},
                "exit_code": f.code,
            });
            emit(&serde_json::to_string_pretty(&report).expect("serializes"));
            return ExitCode::from(f.code);
        }
    };
    let refs: Vec<&str> = run.hash_parts.iter().map(String::as_str).collect();
    let passed = run.outcome.checks.iter().all(|c| c.passed);
    let report = Report {
        command: argv,
        inputs_sha256: cache::sha256(&refs),
        result: run.outcome.result,
        residuals: run.outcome.residuals,
        checks: run.outcome.checks,
        passed,
        cache: run.cache,
        timings: BTreeMap::from([("total_seconds".to_string(), start.elapsed().as_secs_f64())]),
    };
    match g.format {
        Format::Json => emit(&report::to_json(&report)),
        Format::Text => emit(&report::to_text(&report)),
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
