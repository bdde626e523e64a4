//! First-order extremality machinery for eigenvalues of conformal and
//! rotationally symmetric metric families.
//!
//! Derivative formulas are validated against finite differences on single
//! eigenvalue branches. The conformal extremality condition `Σ u_i² = 1/μ`
//! and its global analogue `Σ q(u_i) = ĝ` are posed as PSD feasibility
//! problems on an eigenspace; their residuals certify or refute them up to
//! discretization error.

mod certificate;
mod derivative;
mod forms;
mod perturbation;
mod verify;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use certificate::{
    extremal_certificate, global_feasibility_residual, CertificateKind, CertificateOptions,
    CertificateResult, CertificateStatus, Combination, MAX_ITERATIONS,
};
pub use derivative::{
    branch_for_index, conformal_derivative_check, tensor_derivative_check, Branch,
    DerivativeReport, StepResult,
};
pub use forms::{
    conformal_form, p_density, p_psi, q_h, tensor_form, BasisSamples, FormMatrix, SURFACE_DIM,
};
pub use perturbation::{
    ComponentFn, ConformalPerturbation, SampledTensor, TensorPerturbation, SEED_BASE,
};
pub use verify::{
    default_t_grid, extremality_scan, normalized_eigenvalue, verify_conditions, ConditionReport,
    ScanPoint, ScanReport, TraceSample, TRACE_SAMPLES,
};

#[derive(Debug, Error)]
pub enum ExtremalError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("data has {found} entries but the mesh requires {expected}")]
    MeshMismatch { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(
        "branch crossing at step {step}: tracked index {expected} now overlaps most with {found}"
    )]
    Crossing {
        expected: usize,
        found: usize,
        step: f64,
    },
    #[error("eigenvalue index {k} is out of range ({available} available)")]
    IndexOutOfRange { k: usize, available: usize },
    #[error("empty eigenspace")]
    EmptyCluster,
}
