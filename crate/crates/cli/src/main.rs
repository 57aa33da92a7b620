use clap::{Args, Parser, Subcommand};
use prequant::bundle::{build_example, ExampleKind};
use prequant::config::SuiteConfig;
use prequant::suites::{run_suite, Suite, SuiteError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "prequant", version, about = "Exact verification of higher prequantum structures")]
struct Cli {
    /// List the verification suites and exit.
    #[arg(long)]
    list_suites: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Write an example object bundle.
    Build {
        /// One of poisson-r2, r3-2plectic, string-su2, heisenberg-r2.
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    /// TOML config; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Data file or directory (repeatable).
    #[arg(long, env = "PREQUANT_DATA")]
    data: Vec<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    poly_degree: Option<u32>,
    #[arg(long)]
    truncation: Option<u32>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the wall time in the report.
    #[arg(long)]
    wall_time: bool,
}

fn load_config(args: &VerifyArgs) -> Result<SuiteConfig, String> {
    let mut config = match &args.config {
        None => SuiteConfig::new(&args.suite),
        Some(path) => SuiteConfig::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?,
    };
    config.suite = args.suite.clone();
    if !args.data.is_empty() {
        config.data = args.data.clone();
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(s) = args.samples {
        config.samples = s;
    }
    if let Some(d) = args.poly_degree {
        config.poly_degree = d;
    }
    if let Some(d) = args.truncation {
        config.truncation = d;
    }
    config.wall_time |= args.wall_time;
    Ok(config)
}

fn verify(args: &VerifyArgs) -> Result<u8, String> {
    let config = load_config(args)?;
    let report = run_suite(&config).map_err(|e| match e {
        SuiteError::UnknownSuite(s) => format!("unknown suite '{s}' (see --list-suites)"),
        e => e.to_string(),
    })?;
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{json}"),
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    eprintln!("{}: {passed}/{} checks passed", report.suite, report.checks.len());
    for c in report.failures() {
        eprintln!("FAILED {} [{}]", c.name, c.anchor);
    }
    Ok(if report.passed { 0 } else { EXIT_FAILED })
}

fn build(kind: &str, out: &Path) -> Result<u8, String> {
    let kind: ExampleKind = kind.parse()?;
    let bundle = build_example(kind)?;
    let files = bundle.write(out).map_err(|e| format!("{}: {e}", out.display()))?;
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_suites {
        for s in Suite::ALL {
            println!("{:<16} {}", s.name(), s.description());
        }
        return ExitCode::SUCCESS;
    }
    let result = match &cli.command {
        Some(Command::Verify(args)) => verify(args),
        Some(Command::Build { kind, out }) => build(kind, out),
        None => Err("no command given (try --help)".to_string()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
