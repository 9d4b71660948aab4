use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use spiral3::constructions::Indicatrix;
use spiral3::job::{self, CheckName, Coeffs, Command, JobSpec};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Integrate a profile pair into a curve CSV
    Generate,
    /// Estimate curvature and torsion from a curve CSV
    Estimate,
    /// Classify a profile pair, curve or intrinsics CSV
    Classify,
    /// Run a theorem check on a profile pair
    Check,
    /// Export a ruled surface as OBJ with a developability report
    Surface,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Check {
    Darboux,
    Reciprocal,
    Involute,
    Developable,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Indic {
    Tangent,
    Binormal,
}

/// Spiral curves in Euclidean 3-space from curvature and torsion profiles.
#[derive(Debug, Parser)]
#[command(name = "spiral3", version)]
struct Cli {
    command: Cmd,
    /// Check to run; same as --check
    #[arg(value_enum)]
    name: Option<Check>,
    /// Profile pair JSON
    #[arg(long, value_name = "FILE")]
    profile: Option<PathBuf>,
    /// Curve or intrinsics CSV; repeat to classify several files
    #[arg(long, value_name = "FILE")]
    input: Vec<PathBuf>,
    /// Output file (stdout when omitted), or directory for batch classify
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    check: Option<Check>,
    #[arg(long, value_name = "a,b,c,d[,lambda]", allow_hyphen_values = true, value_parser = job::parse_coeffs)]
    coeffs: Option<Coeffs>,
    /// Indicatrix for the involute check
    #[arg(long, value_enum, default_value = "tangent")]
    indicatrix: Indic,
    #[arg(long, value_name = "lo,hi", allow_hyphen_values = true, value_parser = job::parse_range)]
    v_range: Option<(f64, f64)>,
    #[arg(long, value_name = "ns,nv", value_parser = job::parse_grid)]
    grid: Option<(usize, usize)>,
    /// Also write <PREFIX>.xyz.csv and <PREFIX>.intrinsics.csv (generate)
    #[arg(long, value_name = "PREFIX")]
    plot: Option<PathBuf>,
    /// Worker threads for batch classify
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn check_name(c: Check) -> CheckName {
    match c {
        Check::Darboux => CheckName::Darboux,
        Check::Reciprocal => CheckName::Reciprocal,
        Check::Involute => CheckName::Involute,
        Check::Developable => CheckName::Developable,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(job::EXIT_INPUT_ERROR as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let command = match cli.command {
        Cmd::Generate => Command::Generate,
        Cmd::Estimate => Command::Estimate,
        Cmd::Classify => Command::Classify,
        Cmd::Check => Command::Check,
        Cmd::Surface => Command::Surface,
    };
    let check = match (cli.check, cli.name) {
        (Some(a), Some(b)) if check_name(a) != check_name(b) => {
            eprintln!("error: conflicting check names");
            return ExitCode::from(job::EXIT_INPUT_ERROR as u8);
        }
        (a, b) => a.or(b).map(check_name),
    };
    let spec = JobSpec {
        command,
        profile: cli.profile,
        inputs: cli.input,
        output: cli.output,
        tol: cli.tol,
        step: cli.step,
        check,
        coeffs: cli.coeffs,
        indicatrix: match cli.indicatrix {
            Indic::Tangent => Indicatrix::Tangent,
            Indic::Binormal => Indicatrix::Binormal,
        },
        v_range: cli.v_range,
        grid: cli.grid,
        plot: cli.plot,
        jobs: cli.jobs,
    };
    ExitCode::from(job::run(&spec) as u8)
}
