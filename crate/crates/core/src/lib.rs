//! Exact computation in strongly ℤ-graded rings.
//!
//! The crate decides, with re-checkable certificates, whether a bounded
//! complex of finitely generated free modules over the non-negative part
//! `R_+` of a graded ring is contractible over `R_0` or finitely dominated
//! over `R_0`.  Built-in rings are Laurent polynomial rings, matrix-Laurent
//! rings, a non-strongly graded control ring and the Leavitt algebra L(1,1).
//!
//! Linear algebra and the finite-type rings are generic over the scalar
//! [`Field`](scalar::Field); the aliases below fix the rational instances
//! used by the command line front end.

pub mod expr;
pub mod linalg;
pub mod poly;
pub mod ring;
pub mod scalar;
pub mod series;
pub mod complexes;
pub mod domination;
pub mod cli;

pub type Q = num_rational::BigRational;
pub type QFunc = poly::RationalFunction<Q>;
pub type QMatrix = linalg::Matrix<Q>;
pub type Laurent = ring::MatrixLaurent<Q>;
pub type Leavitt = ring::WordAlgebra<Q>;
