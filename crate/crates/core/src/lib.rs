//! Laplace–Beltrami spectra on rotationally symmetric annuli and numerical
//! extremality certificates for their eigenvalues.
//!
//! The pipeline is: build a surface of revolution ([`revolution`]), cut an
//! annulus out of it and attach a conformal weight, solve the eigenproblem
//! block by block in the angular Fourier modes ([`spectral`]), then test the
//! eigenspaces against the first-order extremality conditions
//! ([`extremal`]). The [`cli`] module wires it into JSON/CSV producing jobs.

pub mod cli;
pub mod elliptic;
pub mod extremal;
pub mod report;
pub mod revolution;
pub mod spectral;

pub use elliptic::{ellint_e, ellint_f, EllipticArgs, EllipticError};
pub use revolution::{
    curvature_zeros, make_domain, profile_sample, unduloid, AnnulusDomain, BoundaryCondition,
    ConformalWeight, Profile, ProfilePoint, RevolutionError, UnduloidSurface,
};
pub use spectral::{
    assemble_block, eval_eigenfunction, solve_block, spectrum, EigenPair, FourierBlock, Mesh1D,
    Parity, SpectralError, Spectrum, SpectrumOptions,
};
