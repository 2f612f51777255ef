use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gradedfd::cli::{run_job, CliError, JobDescription, Outcome, Task, DEFAULT_HORIZON, DEFAULT_NMAX, DEFAULT_ORDER};

/// Strong gradings, series inversion and finite domination over graded rings.
///
/// Exit status: 0 affirmative verdict, 1 negative verdict, 2 input error.
#[derive(Parser)]
#[command(name = "gradedfd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Ring identifier: laurent, laurent_step2, matrix_laurent:N, leavitt11
    #[arg(long)]
    ring: Option<String>,
    /// Matrix such as "[[t, 1], [0, t]]"
    #[arg(long)]
    matrix: Option<String>,
    /// Path to a complex file
    #[arg(long)]
    complex: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: u32,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: u32,
    #[arg(long, default_value_t = DEFAULT_NMAX)]
    nmax: u32,
    /// Write the certificate here
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the ring is strongly graded
    CheckStrong(Common),
    /// Normal form of an expression
    Nf {
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Invert a square matrix as a series
    InvertSeries {
        /// nonneg or conegative
        #[arg(long, default_value = "nonneg")]
        mode: String,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the routes to R_0-contractibility
    R0Routes(Common),
    /// Mapping cone of the half-torus resolution
    HalfTorus(Common),
    /// Fredholm test for a square matrix over R_+
    Fredholm(Common),
    /// Finite-domination detector
    Findom(Common),
    /// Print the Leavitt-algebra checks
    LeavittExample(Common),
    /// Re-verify a certificate file
    VerifyCert { file: PathBuf },
    /// Run a TOML job description
    Run { job: PathBuf },
}

fn job_from(task: Task, c: Common) -> JobDescription {
    let mut j = JobDescription::new(task);
    j.ring = c.ring;
    j.matrix = c.matrix;
    j.complex_file = c.complex;
    j.order = c.order;
    j.horizon = c.horizon;
    j.nmax = c.nmax;
    j.cert = c.cert;
    j
}

fn execute(cmd: Command) -> Result<Outcome, CliError> {
    let here = Path::new(".");
    let (job, base) = match cmd {
        Command::CheckStrong(c) => (job_from(Task::CheckStrong, c), here.to_path_buf()),
        Command::Nf { expr, common } => {
            let mut j = job_from(Task::Nf, common);
            j.expr = Some(expr);
            (j, here.to_path_buf())
        }
        Command::InvertSeries { mode, common } => {
            let mut j = job_from(Task::InvertSeries, common);
            j.mode = Some(mode);
            (j, here.to_path_buf())
        }
        Command::R0Routes(c) => (job_from(Task::R0Routes, c), here.to_path_buf()),
        Command::HalfTorus(c) => (job_from(Task::HalfTorus, c), here.to_path_buf()),
        Command::Fredholm(c) => (job_from(Task::Fredholm, c), here.to_path_buf()),
        Command::Findom(c) => (job_from(Task::Findom, c), here.to_path_buf()),
        Command::LeavittExample(c) => (job_from(Task::LeavittExample, c), here.to_path_buf()),
        Command::VerifyCert { file } => {
            let mut j = JobDescription::new(Task::VerifyCert);
            j.cert = Some(file);
            (j, here.to_path_buf())
        }
        Command::Run { job } => {
            let src = std::fs::read_to_string(&job).map_err(|e| CliError::Io(format!("{}: {e}", job.display())))?;
            let base = job.parent().map_or_else(|| here.to_path_buf(), Path::to_path_buf);
            (JobDescription::from_toml(&src)?, base)
        }
    };
    run_job(&job, &base)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.summary).expect("summary serialises"));
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
