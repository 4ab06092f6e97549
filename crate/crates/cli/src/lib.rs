//! Command-line front end: problem files in, `report.json` and CSV plot data out.

pub mod problem;
pub mod report;
pub mod run;

pub use problem::{load_problem, parse_problem, validate, Mode, ProblemFile, ProblemSpec};
pub use report::{Report, Summary};
pub use run::{build_report, run};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input: {0}")]
    Input(String),
    #[error("output: {0}")]
    Output(String),
    #[error("solver: {0}")]
    Solver(#[from] fkcheb_core::FkError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Output(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}
