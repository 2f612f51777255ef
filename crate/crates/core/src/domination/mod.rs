//! Half-torus resolution, the Mather trick, Fredholm matrices and the
//! finite-domination detector.

mod fredholm;
mod findom;
mod leavitt_example;
mod mather;
mod resolution;

use thiserror::Error;

use crate::complexes::ComplexError;
use crate::ring::{Degree, RingError};
use crate::series::SeriesError;

pub use fredholm::{graded_cokernel, is_fredholm, suitable_shift, CokernelReport, FredholmVerdict, STABILIZATION_WINDOW};
pub use findom::{findom_detect, novikov_contractibility, FinDomCertificate, FinDomVerdict};
pub use leavitt_example::{leavitt_findom_example, LeavittReport};
pub use mather::{
    mather_cone, mather_constructed_example, mather_identity_example, MatherData, MatherInput, MatherVerdict, WindowedMap,
    WindowedTerm,
};
pub use resolution::{
    canonical_resolution, half_torus, mu_independent, HalfTorus, IdentityCheck, InducedModuleComplex, ResolutionData,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DominationError {
    #[error("ring {0} is not of finite type")]
    NotFiniteType(String),
    #[error("ring {0} is not strongly graded")]
    NotStronglyGraded(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("shift {m} is not suitable: minimal entry degree is {min}")]
    NotSuitable { m: Degree, min: Degree },
    #[error("unsupported ring {0}")]
    UnsupportedRing(String),
    #[error("certificate construction failed: {0}")]
    CertificateFailure(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}
