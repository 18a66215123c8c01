mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use gmnl::Backend;

#[derive(Parser, Debug)]
#[command(name = "gmnl", version, about = "Exact checks for genuine multipartite nonlocality constructions")]
struct Cli {
    /// Arithmetic used for tables and checks.
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Absolute tolerance for float comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory holding `<name>_network.json` fixtures.
    #[arg(long, global = true, env = "GMNL_FIXTURES_DIR")]
    fixtures_dir: Option<PathBuf>,
    /// Record wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rebuild a stored construction and check its target properties.
    Reproduce {
        #[arg(value_enum)]
        target: commands::Target,
    },
    /// Run checks on a behavior file.
    Check {
        file: PathBuf,
        /// Comma-separated: validate, no-signaling, chsh, locality, theorem1, theorem2, rabello, hierarchy.
        #[arg(long, value_delimiter = ',', default_value = "validate,no-signaling")]
        checks: Vec<String>,
    },
    /// Naimark dilation of a POVM file, or of the trine POVM.
    Dilate {
        #[arg(required_unless_present = "trine", conflicts_with = "trine")]
        file: Option<PathBuf>,
        #[arg(long)]
        trine: bool,
    },
    /// Box network tools.
    Boxnet {
        #[command(subcommand)]
        action: commands::BoxnetAction,
    },
    /// Decide local-polytope membership with a checked certificate.
    CertifyLocal { file: PathBuf },
    /// Best conditional CHSH value over mixtures with local vertices.
    MixtureFrontier {
        /// Behavior file; defaults to the stored network target.
        file: Option<PathBuf>,
        /// Conditioning event as party,setting,outcome.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1usize, 1, 0])]
        event: Vec<usize>,
        /// Drop the default A=B agreement constraint at X=0, Y=0.
        #[arg(long)]
        no_agreement: bool,
    },
    /// Validate a quantum strategy (builtin name or JSON file) and its behavior.
    Strategy { source: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let ctx = commands::Ctx::new(cli.backend.into(), cli.tolerance, cli.fixtures_dir.clone(), &cli.command);
    let mut report = match commands::run(ctx, &cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    // A closed pipe on stdout is not an error for a report writer.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
