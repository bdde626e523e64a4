//! The quadratic forms `P_ψ` and `Q_h` on an eigenspace.
//!
//! For `u = Σ c_j φ_j` with `φ_j = a_j(v)·trig(m_j u)` and rotationally
//! symmetric perturbations only pairs with equal `(m, parity)` couple, and
//! the angular integral contributes the factor `c_m`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::perturbation::{ConformalPerturbation, SampledTensor};
use super::ExtremalError;
use crate::spectral::{angular_norm, EigenPair, Mesh1D, MetricSamples};

/// Radial factors and their slopes at the quadrature points.
#[derive(Debug, Clone)]
pub struct BasisSamples {
    pub m: Vec<usize>,
    pub couples: Vec<Vec<bool>>,
    pub vals: Vec<Vec<f64>>,
    pub slopes: Vec<Vec<f64>>,
}

impl BasisSamples {
    pub fn new(
        basis: &[EigenPair],
        mesh: &Mesh1D,
        samples: &MetricSamples,
    ) -> Result<Self, ExtremalError> {
        if basis.is_empty() {
            return Err(ExtremalError::EmptyCluster);
        }
        let mut vals = Vec::with_capacity(basis.len());
        let mut slopes = Vec::with_capacity(basis.len());
        for pair in basis {
            if pair.coeffs.len() != mesh.n_nodes() {
                return Err(ExtremalError::MeshMismatch {
                    expected: mesh.n_nodes(),
                    found: pair.coeffs.len(),
                });
            }
            let (v, s): (Vec<f64>, Vec<f64>) = samples
                .points
                .iter()
                .map(|p| mesh.interpolate(&pair.coeffs, p.element, p.xi))
                .unzip();
            vals.push(v);
            slopes.push(s);
        }
        let couples = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| a.m == b.m && (a.m == 0 || a.parity == b.parity))
                    .collect()
            })
            .collect();
        Ok(Self {
            m: basis.iter().map(|p| p.m).collect(),
            couples,
            vals,
            slopes,
        })
    }

    pub fn dim(&self) -> usize {
        self.vals.len()
    }
}

/// `p(f) = (2−n)/2·|∇f|² + nΛ/2·f²`.
pub fn p_density(n: usize, grad_sq: f64, f_sq: f64, lambda: f64) -> f64 {
    let n = n as f64;
    0.5 * (2.0 - n) * grad_sq + 0.5 * n * lambda * f_sq
}

pub const SURFACE_DIM: usize = 2;

/// Symmetric matrix of a quadratic form on an eigenspace basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    pub entries: DMatrix<f64>,
}

impl FormMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Form value on `u = Σ c_j φ_j`.
    pub fn value(&self, c: &[f64]) -> f64 {
        let c = nalgebra::DVector::from_column_slice(c);
        (c.transpose() * &self.entries * &c)[(0, 0)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// `tr(S·A) = Σ_i Q(u_i)` for `u_i = Σ_j (S^{1/2})_ij φ_j`.
    pub fn trace_with(&self, s: &DMatrix<f64>) -> f64 {
        (s * &self.entries).trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Whether the form takes both signs beyond `tol`.
    pub fn is_indefinite(&self, tol: f64) -> bool {
        let ev = self.eigenvalues();
        ev[0] < -tol && ev[ev.len() - 1] > tol
    }
}

/// Matrix of `u ↦ P_ψ(u) = −∫ p(u) ψ dV_ĝ` at `n = 2`.
pub fn conformal_form(
    basis: &BasisSamples,
    psi: &ConformalPerturbation,
    mesh: &Mesh1D,
    samples: &MetricSamples,
    lambda: f64,
) -> Result<FormMatrix, ExtremalError> {
    let psi_at = psi.at_points(mesh, samples)?;
    let d = basis.dim();
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            if !basis.couples[i][j] {
                continue;
            }
            let m2 = (basis.m[i] * basis.m[i]) as f64;
            let mut acc = 0.0;
            for (q, p) in samples.points.iter().enumerate() {
                let grad = basis.slopes[i][q] * basis.slopes[j][q] / samples.metric_vv[q]
                    + m2 * basis.vals[i][q] * basis.vals[j][q] / samples.metric_uu[q];
                let f2 = basis.vals[i][q] * basis.vals[j][q];
                acc += p.weight
                    * samples.mass[q]
                    * psi_at[q]
                    * p_density(SURFACE_DIM, grad, f2, lambda);
            }
            let value = -angular_norm(basis.m[i]) * acc;
            a[(i, j)] = value;
            a[(j, i)] = value;
        }
    }
    Ok(FormMatrix { entries: a })
}

/// Matrix of `u ↦ Q_h(u) = −∫ ⟨q(u), h⟩ dV_ĝ` with
/// `q(f) = df⊗df − ½(|∇f|² − Λf²)ĝ`.
pub fn tensor_form(
    basis: &BasisSamples,
    h: &SampledTensor,
    samples: &MetricSamples,
    lambda: f64,
) -> Result<FormMatrix, ExtremalError> {
    h.check(samples)?;
    let d = basis.dim();
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            if !basis.couples[i][j] {
                continue;
            }
            let m2 = (basis.m[i] * basis.m[i]) as f64;
            let mut acc = 0.0;
            for (q, p) in samples.points.iter().enumerate() {
                let (e, g) = (samples.metric_uu[q], samples.metric_vv[q]);
                let du2 = m2 * basis.vals[i][q] * basis.vals[j][q];
                let dv2 = basis.slopes[i][q] * basis.slopes[j][q];
                let f2 = basis.vals[i][q] * basis.vals[j][q];
                let trace_h = h.h_uu[q] / e + h.h_vv[q] / g;
                let pairing = du2 * h.h_uu[q] / (e * e) + dv2 * h.h_vv[q] / (g * g)
                    - 0.5 * (du2 / e + dv2 / g - lambda * f2) * trace_h;
                acc += p.weight * samples.mass[q] * pairing;
            }
            let value = -angular_norm(basis.m[i]) * acc;
            a[(i, j)] = value;
            a[(j, i)] = value;
        }
    }
    Ok(FormMatrix { entries: a })
}

/// `P_ψ(u)` for `u = Σ c_j φ_j` over `basis`.
pub fn p_psi(
    basis: &[EigenPair],
    c: &[f64],
    psi: &ConformalPerturbation,
    mesh: &Mesh1D,
    samples: &MetricSamples,
    lambda: f64,
) -> Result<f64, ExtremalError> {
    let b = BasisSamples::new(basis, mesh, samples)?;
    Ok(conformal_form(&b, psi, mesh, samples, lambda)?.value(c))
}

/// `Q_h(u)` for `u = Σ c_j φ_j` over `basis`.
pub fn q_h(
    basis: &[EigenPair],
    c: &[f64],
    h: &SampledTensor,
    mesh: &Mesh1D,
    samples: &MetricSamples,
    lambda: f64,
) -> Result<f64, ExtremalError> {
    let b = BasisSamples::new(basis, mesh, samples)?;
    Ok(tensor_form(&b, h, samples, lambda)?.value(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::perturbation::TensorPerturbation;
    use crate::revolution::{make_domain, BoundaryCondition, ConformalWeight, FlatCylinder};
    use crate::spectral::spectrum;
    use std::sync::Arc;

    fn flat_setup() -> (crate::spectral::Spectrum, Mesh1D, MetricSamples) {
        let d = make_domain(
            Arc::new(FlatCylinder { radius: 1.0 }),
            0.0,
            2.0,
            BoundaryCondition::Neumann,
            ConformalWeight::None,
        )
        .unwrap();
        let mesh = Mesh1D::uniform(0.0, 2.0, 128).unwrap();
        let samples = MetricSamples::new(&d, &mesh);
        (spectrum(&d, &mesh, 6).unwrap(), mesh, samples)
    }

    #[test]
    fn gradient_term_cancels_in_two_dimensions() {
        assert_eq!(p_density(2, 7.5, 0.25, 3.0), 0.75);
        assert_eq!(p_density(3, 2.0, 1.0, 1.0), -1.0 + 1.5);
    }

    #[test]
    fn unit_psi_and_metric_tensor_give_minus_lambda() {
        let (s, mesh, samples) = flat_setup();
        for pair in &s.entries[1..4] {
            let basis = std::slice::from_ref(pair);
            let one = ConformalPerturbation::constant(1.0, &mesh);
            let p = p_psi(basis, &[1.0], &one, &mesh, &samples, pair.value).unwrap();
            assert!((p + pair.value).abs() < 1e-12 * pair.value.max(1.0));
            let g = TensorPerturbation::metric(&samples);
            let q = q_h(basis, &[1.0], &g, &mesh, &samples, pair.value).unwrap();
            assert!((q + pair.value).abs() < 1e-12 * pair.value.max(1.0));
            let zero = TensorPerturbation::zero().sample(&samples);
            assert_eq!(
                q_h(basis, &[1.0], &zero, &mesh, &samples, pair.value).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn parities_do_not_couple() {
        let (s, mesh, samples) = flat_setup();
        let basis = &s.entries[1..3];
        let b = BasisSamples::new(basis, &mesh, &samples).unwrap();
        let psi = ConformalPerturbation::from_fn(|v| v, &mesh, &samples, true).unwrap();
        let a = conformal_form(&b, &psi, &mesh, &samples, 1.0).unwrap();
        assert_eq!(a.entries[(0, 1)], 0.0);
        assert!((a.entries[(0, 0)] - a.entries[(1, 1)]).abs() < 1e-14);
    }
}
