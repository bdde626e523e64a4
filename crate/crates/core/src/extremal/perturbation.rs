//! Rotationally symmetric metric perturbations.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ExtremalError;
use crate::spectral::{Mesh1D, MetricSamples};

pub const SEED_BASE: u64 = 0xE16;

/// Conformal direction ψ(v) for the family `e^{tψ} ĝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalPerturbation {
    /// Nodal values on the mesh the perturbation was built for.
    pub psi: Vec<f64>,
    pub mean_zero: bool,
}

impl ConformalPerturbation {
    /// Takes nodal values; with `mean_zero` the `ĝ`-mean is subtracted.
    pub fn from_nodal(
        psi: Vec<f64>,
        mesh: &Mesh1D,
        samples: &MetricSamples,
        mean_zero: bool,
    ) -> Result<Self, ExtremalError> {
        if psi.len() != mesh.n_nodes() {
            return Err(ExtremalError::MeshMismatch {
                expected: mesh.n_nodes(),
                found: psi.len(),
            });
        }
        let mut out = Self { psi, mean_zero };
        if mean_zero {
            let mean = out.integral(mesh, samples)? / samples.volume();
            out.psi.iter_mut().for_each(|p| *p -= mean);
        }
        Ok(out)
    }

    pub fn from_fn(
        f: impl Fn(f64) -> f64,
        mesh: &Mesh1D,
        samples: &MetricSamples,
        mean_zero: bool,
    ) -> Result<Self, ExtremalError> {
        Self::from_nodal(
            mesh.nodes().iter().map(|&v| f(v)).collect(),
            mesh,
            samples,
            mean_zero,
        )
    }

    pub fn constant(c: f64, mesh: &Mesh1D) -> Self {
        Self {
            psi: vec![c; mesh.n_nodes()],
            mean_zero: false,
        }
    }

    /// Random smooth direction: a cosine/sine series of degree four in
    /// `(v − v_a)/L`, reproducible from `seed`.
    pub fn seeded(
        seed: u64,
        mesh: &Mesh1D,
        samples: &MetricSamples,
    ) -> Result<Self, ExtremalError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<(f64, f64)> = (0..4)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (a, len) = (mesh.start(), mesh.end() - mesh.start());
        Self::from_fn(
            |v| {
                let s = (v - a) / len;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, (c, d))| {
                        let w = (j + 1) as f64 * PI * s;
                        (c * w.cos() + d * w.sin()) / (j + 1) as f64
                    })
                    .sum()
            },
            mesh,
            samples,
            true,
        )
    }

    pub fn at_points(
        &self,
        mesh: &Mesh1D,
        samples: &MetricSamples,
    ) -> Result<Vec<f64>, ExtremalError> {
        if self.psi.len() != mesh.n_nodes() || samples.points.len() != 2 * mesh.n_elements() {
            return Err(ExtremalError::MeshMismatch {
                expected: mesh.n_nodes(),
                found: self.psi.len(),
            });
        }
        Ok(samples.at_points(mesh, &self.psi))
    }

    /// `∫ ψ dV_ĝ`.
    pub fn integral(&self, mesh: &Mesh1D, samples: &MetricSamples) -> Result<f64, ExtremalError> {
        let at = self.at_points(mesh, samples)?;
        Ok(2.0 * PI * weighted_sum(samples, &at))
    }

    /// `‖ψ‖_{L²(ĝ)}`.
    pub fn l2_norm(&self, mesh: &Mesh1D, samples: &MetricSamples) -> Result<f64, ExtremalError> {
        let at = self.at_points(mesh, samples)?;
        let sq: Vec<f64> = at.iter().map(|p| p * p).collect();
        Ok((2.0 * PI * weighted_sum(samples, &sq)).sqrt())
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            psi: self
                .psi
                .iter()
                .zip(&other.psi)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            mean_zero: self.mean_zero && other.mean_zero,
        }
    }
}

fn weighted_sum(samples: &MetricSamples, values: &[f64]) -> f64 {
    samples
        .points
        .iter()
        .zip(&samples.mass)
        .zip(values)
        .map(|((p, m), f)| p.weight * m * f)
        .sum()
}

pub type ComponentFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Diagonal symmetric 2-tensor `h_uu(v) du² + h_vv(v) dv²` for `ĝ + t h`.
#[derive(Clone)]
pub struct TensorPerturbation {
    pub h_uu: ComponentFn,
    pub h_vv: ComponentFn,
    pub label: String,
}

impl fmt::Debug for TensorPerturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorPerturbation")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl TensorPerturbation {
    pub fn new(
        h_uu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h_vv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Self {
        Self {
            h_uu: Arc::new(h_uu),
            h_vv: Arc::new(h_vv),
            label: label.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0, "zero")
    }

    /// `h = ĝ` itself, read from the sampled metric.
    pub fn metric(samples: &MetricSamples) -> SampledTensor {
        SampledTensor {
            h_uu: samples.metric_uu.clone(),
            h_vv: samples.metric_vv.clone(),
        }
    }

    pub fn sample(&self, samples: &MetricSamples) -> SampledTensor {
        SampledTensor {
            h_uu: samples.eval_at_points(&*self.h_uu),
            h_vv: samples.eval_at_points(&*self.h_vv),
        }
    }
}

/// Tensor components at the quadrature points of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTensor {
    pub h_uu: Vec<f64>,
    pub h_vv: Vec<f64>,
}

impl SampledTensor {
    pub fn check(&self, samples: &MetricSamples) -> Result<(), ExtremalError> {
        let n = samples.points.len();
        if self.h_uu.len() != n || self.h_vv.len() != n {
            return Err(ExtremalError::MeshMismatch {
                expected: n,
                found: self.h_uu.len().min(self.h_vv.len()),
            });
        }
        if self.h_uu.iter().chain(&self.h_vv).any(|x| !x.is_finite()) {
            return Err(ExtremalError::Precondition(
                "tensor perturbation is not finite".into(),
            ));
        }
        Ok(())
    }
}
