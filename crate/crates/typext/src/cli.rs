//! Command-line entry point.
//!
//! Exit codes: 0 when every check passes, 1 for a verified mathematical
//! disagreement, 2 for usage, parameter or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use typext_core::ramprofile::Convention;
use typext_core::tower::{with_precision_retry, Tower};
use typext_core::Error;

use crate::format::{ClassifyInput, Config};
use crate::reports;
use crate::sweep::{sweep, SweepOptions};

#[derive(Parser, Debug)]
#[command(name = "typext", version, about = "Exact laboratory for typical degree-p extensions of local fields")]
struct Cli {
    /// Relative precision of K in coefficients (default depends on the parameters).
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Write the report (or the sweep store) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct the tower and emit valuations, different, relations and trace ideals.
    Build {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Exponents n for the trace-ideal checks, as a..b (default 1..ep+1).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        n_range: Option<(i64, i64)>,
    },
    /// Parameter-level ramification profile.
    Ramify {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long, value_enum, default_value_t = ConventionArg::Serre)]
        convention: ConventionArg,
    },
    /// Psi, its action on powers of x, the power identities and the lemma sweep.
    Hopf {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Primes for the lemma sweep (default: the configured p).
        #[arg(long, value_delimiter = ',')]
        p: Vec<u64>,
    },
    /// Verify the scaffold action on lambda_t.
    Scaffold {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Values of t as a..b (default 0..3p).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        n_range: Option<(i64, i64)>,
    },
    /// Associated orders and freeness verdicts.
    Orders {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Ideal exponents as a..b (default 0..p).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        n_range: Option<(i64, i64)>,
    },
    /// Reconcile freeness over the grid, persisting one record per (params, n).
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = [3u64, 5, 7])]
        p: Vec<u64>,
        /// Random (gamma, mu, beta) per grid point.
        #[arg(long, default_value_t = 2)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        n_range: Option<(i64, i64)>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recover (e, f, t, b, gamma, mu) from alpha, beta and d.
    Classify {
        #[command(flatten)]
        cfg: ConfigArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Serre,
    Artin,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
    if b < a {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    clause: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    body: ErrorBody,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure { code: 2, body: ErrorBody { kind: "usage", message, clause: None } }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure { code: 2, body: ErrorBody { kind: "io", message: format!("{}: {e}", path.display()), clause: None } }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (code, kind, clause) = match &e {
            Error::Param(c) => (2, "parameter", Some(format!("{c:?}"))),
            Error::Precision { .. } => (2, "precision", None),
            Error::Internal(_) => (1, "internal", None),
            Error::Root { .. } | Error::Subfield | Error::Domain(_) | Error::Support => (2, "domain", None),
        };
        Failure { code, body: ErrorBody { kind, message, clause } }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 2,
        body: ErrorBody { kind: "config", message: format!("{}: {e}", path.display()), clause: None },
    })
}

fn emit<T: Serialize>(out: Option<&Path>, report: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn tower_run<T>(
    cfg: &Path,
    precision: Option<usize>,
    f: impl Fn(&Tower) -> typext_core::Result<T>,
) -> Result<T, Failure> {
    let c: Config = read_json(cfg)?;
    let pr = c.extension_params(precision)?;
    Ok(with_precision_retry(&pr, f)?)
}

fn dispatch(cli: Cli) -> Result<bool, Failure> {
    let out = cli.out.as_deref();
    let prec = cli.precision;
    match cli.command {
        Command::Build { cfg, n_range } => {
            let (report, ok) = tower_run(&cfg.config, prec, |tw| {
                let ep = tw.ram_index(typext_core::tower::Level::M);
                let (lo, hi) = n_range.unwrap_or((1, ep + 1));
                reports::build_report(tw, lo..hi)
            })?;
            emit(out, &report)?;
            Ok(ok)
        }
        Command::Ramify { cfg, convention } => {
            let c: Config = read_json(&cfg.config)?;
            let rp = c.ram_params()?;
            let conv = match convention {
                ConventionArg::Serre => Convention::Serre,
                ConventionArg::Artin => Convention::Artin,
            };
            let (report, ok) = reports::ramify_report(&rp, conv)?;
            emit(out, &report)?;
            Ok(ok)
        }
        Command::Hopf { cfg, p } => {
            let (report, ok) = tower_run(&cfg.config, prec, |tw| {
                let primes = if p.is_empty() { vec![tw.p() as u64] } else { p.clone() };
                reports::hopf_report(tw, &primes)
            })?;
            emit(out, &report)?;
            Ok(ok)
        }
        Command::Scaffold { cfg, n_range } => {
            let (report, ok) = tower_run(&cfg.config, prec, |tw| {
                let (lo, hi) = n_range.unwrap_or((0, 3 * tw.p() as i64));
                reports::scaffold_report(tw, lo, hi)
            })?;
            emit(out, &report)?;
            Ok(ok)
        }
        Command::Orders { cfg, n_range } => {
            let (report, ok) = tower_run(&cfg.config, prec, |tw| {
                let (lo, hi) = n_range.unwrap_or((0, tw.p() as i64));
                reports::orders_report(tw, lo, hi)
            })?;
            emit(out, &report)?;
            Ok(ok)
        }
        Command::Sweep { p, samples, seed, n_range, jobs } => {
            let store = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("sweep.jsonl"));
            let opts = SweepOptions { ps: p, samples, seed, n_range, out: store.clone(), precision: prec };
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                pool = pool.num_threads(j);
            }
            let pool = pool.build().map_err(|e| Failure::usage(e.to_string()))?;
            let summary = pool.install(|| sweep(&opts)).map_err(|e| Failure::io(&store, e))?;
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            println!("{text}");
            Ok(summary.ok())
        }
        Command::Classify { cfg } => {
            let input: ClassifyInput = read_json(&cfg.config)?;
            let pr = input.run(prec)?;
            emit(out, &reports::classify_report(&pr))?;
            Ok(true)
        }
    }
}

fn report_failure(f: &Failure) {
    let text = serde_json::to_string(&serde_json::json!({ "error": &f.body })).expect("error serializes");
    eprintln!("{text}");
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            report_failure(&Failure::usage(e.render().to_string().trim().to_string()));
            return 2;
        }
    };
    match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(f) => {
            report_failure(&f);
            f.code
        }
    }
}
