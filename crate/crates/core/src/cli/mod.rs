//! Command-line front end: job descriptions, complex files, certificates.

mod certificate;
mod complex_file;
mod job;
mod run;

use thiserror::Error;

use crate::complexes::ComplexError;
use crate::domination::DominationError;
use crate::expr::ParseError;
use crate::ring::RingError;
use crate::series::SeriesError;

pub use certificate::{
    perturb_certificate, verify_certificate, CertificateFile, CertificateInput, MatrixText, VerifyReport, SCHEMA_VERSION,
};
pub use complex_file::{build_complex, parse_complex_text, print_complex, ComplexSpec};
pub use job::{JobDescription, Task, DEFAULT_HORIZON, DEFAULT_NMAX, DEFAULT_ORDER};
pub use run::{run, run_job, Outcome};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid option: {0}")]
    Option(String),
    #[error("{0}")]
    Io(String),
    #[error("certificate schema error: {0}")]
    Schema(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Domination(#[from] DominationError),
}

impl CliError {
    /// Process exit status for an error: always an input error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
