//! Exact verification of Hamiltonian circle-action fixed point data.
//!
//! A circle action on a compact symplectic manifold with isolated fixed
//! points leaves a finite trace: for each fixed point, its isotropy weights
//! and its moment value. This crate treats that trace as the object of
//! study. It checks the localization identities any genuine action must
//! satisfy, validates claimed equivariant cohomology models, and runs the
//! unimodality argument for index-increasing moment maps as an exact
//! algorithm: either the even Betti profile is unimodal, or the crate
//! produces a certificate exhibiting a localization integral that is
//! provably zero yet evaluates to a nonzero rational, showing the data is
//! not realizable.
//!
//! All arithmetic is exact over the rationals; there are no tolerances.
//!
//! Module map:
//! - [`exactalg`]: rational scalars, matrices, rank and kernel.
//! - [`fixdata`]: fixed point datasets, Betti profiles, localization checks.
//! - [`eqcalc`]: restriction-vector classes, integration, model validation.
//! - [`certify`]: the unimodality procedure and its certificates.
//! - [`generators`]: genuine data constructors and corruption mutators.
//! - [`synthetic`]: the canonical non-unimodal fixture and randomized peers.
//! - [`cli`]: the command-line surface.

pub mod certify;
pub mod cli;
pub mod eqcalc;
pub mod exactalg;
pub mod fixdata;
pub mod generators;
pub mod synthetic;

pub use certify::{Certificate, CertifyError, Partition, SignLedger, VanishingTarget};
pub use eqcalc::{
    CohomologyModel, EqError, EquivariantClass, FailureList, IntegrationResult, ModelReport,
};
pub use exactalg::{AlgError, Rational, RationalMatrix, SpanBasis};
pub use fixdata::{BettiProfile, DataError, FixedPoint, FixedPointData, LocalizationReport};
