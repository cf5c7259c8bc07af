//! `resist`: seeded experiments on representations of `K^n`.
//!
//! Exit status: 0 on success, 1 on a usage or configuration error, 2 when a
//! checked invariant fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use resist_core::experiment::{emit::emit, parse_config, run, RawConfig};
use resist_core::Error;

#[derive(Parser)]
#[command(
    name = "resist",
    version,
    about = "Seeded experiments on representations of K^n that resist random sampling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Irrep manifest of a base group (dimensions, faithfulness, characters).
    Catalog(Flags),
    /// κ for one irrep (`--rho fixed:<i>`) or every irrep of a base group.
    Kappa(Flags),
    /// Random generator tuples: pattern certificate, X_H and operator norm.
    Resist(Flags),
    /// Exact Plancherel moments of X_H over seeded generator sets.
    Moments(Flags),
    /// Tails of the smallest pattern class against the closed-form bounds.
    Tails(Flags),
    /// Cayley-graph second eigenvalues swept over t.
    Cayley(Flags),
}

#[derive(Args)]
struct Flags {
    /// Base group: Z<m>, D<m>, S3, S4; `S3^60` also sets n.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// First t of a Cayley sweep.
    #[arg(long = "t-from")]
    t_from: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// `fixed:<index>` or `plancherel`.
    #[arg(long)]
    rho: Option<String>,
    /// cert | power | dense | auto
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Threshold ℓ in the `Pr[d < ℓ]` tail bound.
    #[arg(long)]
    ell: Option<String>,
    /// Record per-trial wall time in `runtime_ms`.
    #[arg(long)]
    timing: bool,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination (JSON report written alongside), or the JSON report
    /// itself for `catalog` and `kappa`.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Command {
    fn split(&self) -> (&'static str, &Flags) {
        match self {
            Command::Catalog(f) => ("catalog", f),
            Command::Kappa(f) => ("kappa", f),
            Command::Resist(f) => ("resist", f),
            Command::Moments(f) => ("moments", f),
            Command::Tails(f) => ("tails", f),
            Command::Cayley(f) => ("cayley", f),
        }
    }
}

fn overrides(experiment: &str, f: &Flags) -> Result<RawConfig, Error> {
    let mut raw = RawConfig::default();
    raw.set("experiment", experiment)?;
    let pairs = [
        ("group", &f.group),
        ("n", &f.n),
        ("t", &f.t),
        ("t_from", &f.t_from),
        ("trials", &f.trials),
        ("rho", &f.rho),
        ("method", &f.method),
        ("seed", &f.seed),
        ("alpha", &f.alpha),
        ("ell", &f.ell),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            raw.set(key, v)?;
        }
    }
    if let Some(p) = &f.output {
        raw.set("output", &p.to_string_lossy())?;
    }
    if f.timing {
        raw.set("timing", "true")?;
    }
    Ok(raw)
}

/// Invariant and numerical failures exit with 2; everything else is the
/// caller's input.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResidueTooLarge { .. }
        | Error::InvalidGroup(_)
        | Error::InvalidRepresentation { .. }
        | Error::NotConverged { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (experiment, flags) = cli.command.split();
    let result = (|| {
        let file = flags
            .config
            .as_deref()
            .map(RawConfig::from_file)
            .transpose()?;
        let config = parse_config(file.as_ref(), &overrides(experiment, flags)?)?;
        let outcome = run(&config)?;
        let written = emit(
            &outcome.report,
            outcome.csv.as_deref(),
            config.output.as_deref(),
            &mut std::io::stdout(),
        )?;
        for p in written {
            eprintln!("wrote {}", p.display());
        }
        Ok::<_, Error>(outcome.violations)
    })();
    match result {
        Ok(violations) if violations.is_empty() => ExitCode::SUCCESS,
        Ok(violations) => {
            for v in &violations {
                eprintln!("invariant violated: {v}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
