//! Operator norms, numerical radii and minimal projections on finite-dimensional
//! `ℓᵖ` spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`lpspace`]: exponents, norms, duality maps and sphere sampling.
//! * [`operators`]: operator norm, numerical range, numerical radius and index.
//! * [`projections`]: the affine family of projections (or extensions) onto a
//!   subspace, minimisation under either norm, extremal pairs and the
//!   invariant-subspace certificate.
//! * [`symmetry`]: finite isometry groups, group averaging, the commutant and
//!   the discretised Fourier projection.
//! * [`unicity`]: strong-unicity constant estimates and the built-in instances.
//! * [`cli`]: problem files, reports and the `numrad` command line.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod lpspace;
pub mod operators;
pub mod optimize;
pub mod projections;
pub mod simplex;
pub mod symmetry;
pub mod unicity;
pub mod verify;

pub use error::{Error, Result};
pub use lpspace::{dual_exponent, lp_norm, pair, Exponent, LpSpace};
pub use operators::{
    numerical_index_estimate, numerical_radius, numerical_range_sample, operator_norm, Method,
    Operator, RadiusResult, SearchConfig,
};
pub use projections::{
    extremal_pairs, invariance_certificate, minimal_projection, CertificateOutcome, ExtremalPair,
    NormKind, OptimizerConfig, Parametrization, ProjectionProblem,
};
pub use symmetry::{FourierGrid, IsometryGroup};
pub use unicity::{builtin_instances, dim4_lambda, strong_unicity_estimate, UnicityEstimate};

pub use nalgebra::{DMatrix, DVector};
