use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fkcheb_cli::problem::read_problem_file;
use fkcheb_cli::{run, validate, CliError, Mode};

/// Inf-stationarity analysis of free-knot Chebyshev spline approximations.
#[derive(Debug, Parser)]
#[command(name = "fkcheb", version)]
struct Args {
    /// Problem file (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Overrides the mode in the problem file.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Overrides the grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long, env = "FKCHEB_OUT", default_value = "fkcheb-out")]
    out: PathBuf,
    #[arg(long)]
    tol_extreme: Option<f64>,
    #[arg(long)]
    hull_tol: Option<f64>,
    #[arg(long)]
    tau_zero: Option<f64>,
}

fn main_inner(args: Args) -> Result<fkcheb_cli::Report, CliError> {
    let mut file = read_problem_file(&args.problem)?;
    if let Some(m) = args.mode {
        file.mode = m;
    }
    if let Some(g) = args.grid {
        file.grid_n = Some(g);
    }
    let t = &mut file.tolerances;
    t.tol_extreme = args.tol_extreme.or(t.tol_extreme);
    t.hull_tol = args.hull_tol.or(t.hull_tol);
    t.tau_zero = args.tau_zero.or(t.tau_zero);
    let spec = validate(file)?;
    run(&spec, &args.out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out = args.out.clone();
    match main_inner(args) {
        Ok(r) => {
            let s = &r.summary;
            println!(
                "psi = {}  inf-stationary: {}  alternation-stationary: {}  theorem1: {}  -> {}",
                s.psi,
                s.inf_stationary,
                s.alternation_stationary,
                s.theorem1.passes,
                out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fkcheb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
