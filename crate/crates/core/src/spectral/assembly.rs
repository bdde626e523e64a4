//! Piecewise-linear Galerkin assembly of the angular Fourier blocks.
//!
//! For `f = a(v)·trig(m u)` on a metric `A du² + B dv²` the Dirichlet
//! energy and the `L²` norm separate into
//!
//! ```text
//! K(a, b) = c_m ∫ [a′b′ √(A/B) + m² a b √(B/A)] dv
//! M(a, b) = c_m ∫ a b √(AB) dv
//! ```
//!
//! with `c_0 = 2π` and `c_m = π` for `m ≥ 1`.

use std::f64::consts::PI;

use super::mesh::{Mesh1D, MetricSamples, GAUSS_XI};
use super::tridiag::SymTridiagonal;
use super::SpectralError;
use crate::revolution::{AnnulusDomain, BoundaryCondition};

/// One angular mode of the separated eigenproblem.
#[derive(Debug, Clone)]
pub struct FourierBlock {
    pub m: usize,
    pub bc: BoundaryCondition,
    pub c_m: f64,
    pub stiffness: SymTridiagonal,
    pub mass: SymTridiagonal,
    /// Nodes of the full mesh, including eliminated Dirichlet nodes.
    pub n_nodes: usize,
}

impl FourierBlock {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// Index of the first unknown in the full nodal vector.
    pub fn offset(&self) -> usize {
        match self.bc {
            BoundaryCondition::Neumann => 0,
            BoundaryCondition::Dirichlet => 1,
        }
    }

    /// Embeds a block vector into a full nodal vector (zeros on eliminated nodes).
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_nodes];
        full[self.offset()..self.offset() + reduced.len()].copy_from_slice(reduced);
        full
    }

    /// Restricts a full nodal vector to the block unknowns.
    pub fn restrict<'a>(&self, full: &'a [f64]) -> &'a [f64] {
        &full[self.offset()..self.offset() + self.dim()]
    }
}

pub fn angular_norm(m: usize) -> f64 {
    if m == 0 {
        2.0 * PI
    } else {
        PI
    }
}

pub fn assemble_block(
    domain: &AnnulusDomain,
    m: usize,
    mesh: &Mesh1D,
) -> Result<FourierBlock, SpectralError> {
    check_span(domain, mesh)?;
    let samples = MetricSamples::new(domain, mesh);
    assemble_from_samples(&samples, mesh, m, domain.bc)
}

pub(crate) fn check_span(domain: &AnnulusDomain, mesh: &Mesh1D) -> Result<(), SpectralError> {
    let tol = 1e-12 * domain.length().max(1.0);
    if (mesh.start() - domain.v_a).abs() > tol || (mesh.end() - domain.v_b).abs() > tol {
        return Err(SpectralError::Mesh(format!(
            "mesh spans [{}, {}] but the domain is [{}, {}]",
            mesh.start(),
            mesh.end(),
            domain.v_a,
            domain.v_b
        )));
    }
    Ok(())
}

pub fn assemble_from_samples(
    samples: &MetricSamples,
    mesh: &Mesh1D,
    m: usize,
    bc: BoundaryCondition,
) -> Result<FourierBlock, SpectralError> {
    let n_nodes = mesh.n_nodes();
    let c_m = angular_norm(m);
    let m2 = (m * m) as f64;
    let mut k = SymTridiagonal::zeros(n_nodes);
    let mut mm = SymTridiagonal::zeros(n_nodes);
    for (q, p) in samples.points.iter().enumerate() {
        let e = p.element;
        let (a, b) = mesh.element_bounds(e);
        let h = b - a;
        let (phi_l, phi_r) = (1.0 - p.xi, p.xi);
        let w = c_m * p.weight;
        let grad = w * samples.stiff_v[q] / (h * h);
        let ang = w * m2 * samples.stiff_u[q];
        let mass = w * samples.mass[q];
        k.diag[e] += grad + ang * phi_l * phi_l;
        k.diag[e + 1] += grad + ang * phi_r * phi_r;
        k.off[e] += -grad + ang * phi_l * phi_r;
        mm.diag[e] += mass * phi_l * phi_l;
        mm.diag[e + 1] += mass * phi_r * phi_r;
        mm.off[e] += mass * phi_l * phi_r;
    }
    debug_assert_eq!(samples.points.len(), 2 * mesh.n_elements());
    debug_assert!(GAUSS_XI.len() == 2);
    let (stiffness, mass) = match bc {
        BoundaryCondition::Neumann => (k, mm),
        BoundaryCondition::Dirichlet => {
            if n_nodes < 4 {
                return Err(SpectralError::InsufficientMesh {
                    interior: n_nodes.saturating_sub(2),
                });
            }
            (interior(&k), interior(&mm))
        }
    };
    Ok(FourierBlock {
        m,
        bc,
        c_m,
        stiffness,
        mass,
        n_nodes,
    })
}

fn interior(t: &SymTridiagonal) -> SymTridiagonal {
    let n = t.dim();
    SymTridiagonal {
        diag: t.diag[1..n - 1].to_vec(),
        off: t.off[1..n - 2].to_vec(),
    }
}
