//! Laplace–Beltrami spectra of rotationally symmetric annuli.
//!
//! Separating `f(u, v) = a(v)·cos(mu)` (or `sin`) turns the surface problem
//! into one tridiagonal generalized eigenproblem per angular mode `m`, which
//! is discretized with piecewise-linear elements in `v`.

mod assembly;
mod mesh;
mod spectrum;
mod tridiag;

use thiserror::Error;

pub use assembly::{angular_norm, assemble_block, assemble_from_samples, FourierBlock};
pub use mesh::{Mesh1D, MetricSamples, QuadPoint, GAUSS_XI, MIN_ELEMENTS};
pub use spectrum::{
    cluster_tol_for, eval_eigenfunction, solve_block, spectrum, spectrum_with, EigenPair, Parity,
    Spectrum, SpectrumOptions, DEFAULT_M_MAX_CAP,
};
pub use tridiag::{count_below, lowest_eigenpairs, SymTridiagonal};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("insufficient mesh: {interior} interior nodes, need at least 2")]
    InsufficientMesh { interior: usize },
    #[error("mass matrix is not positive definite (degenerate metric weight)")]
    AssemblyIntegrity,
    #[error("requested {count} eigenpairs from a block of dimension {dim}")]
    Count { count: usize, dim: usize },
    #[error("spectrum incomplete: angular modes beyond the cap m_max = {cap} are still needed")]
    IncompleteSpectrum { cap: usize, partial: Box<Spectrum> },
    #[error("point v = {v} lies outside the domain")]
    OutOfDomain { v: f64 },
    #[error("coefficient vector has {found} entries but the mesh has {expected} nodes")]
    MeshMismatch { expected: usize, found: usize },
    #[error("eigensolver failure: {0}")]
    Solver(String),
}
