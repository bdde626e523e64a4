//! One-dimensional meshes and the per-quadrature-point metric data the
//! weak forms are built from.

use super::SpectralError;
use crate::revolution::AnnulusDomain;

/// Two-point Gauss–Legendre abscissae on the reference element `[0, 1]`.
pub const GAUSS_XI: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

pub const MIN_ELEMENTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(v_a: f64, v_b: f64, elements: usize) -> Result<Self, SpectralError> {
        if elements < MIN_ELEMENTS {
            return Err(SpectralError::Mesh(format!(
                "need at least {MIN_ELEMENTS} elements, got {elements}"
            )));
        }
        if !(v_a < v_b) || !v_a.is_finite() || !v_b.is_finite() {
            return Err(SpectralError::Mesh(format!("bad interval [{v_a}, {v_b}]")));
        }
        let h = (v_b - v_a) / elements as f64;
        let mut nodes: Vec<f64> = (0..=elements).map(|i| v_a + i as f64 * h).collect();
        nodes[elements] = v_b;
        Ok(Self { nodes })
    }

    /// Arbitrary strictly increasing nodes (graded meshes).
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, SpectralError> {
        if nodes.len() < MIN_ELEMENTS + 1 {
            return Err(SpectralError::Mesh(format!(
                "need at least {} nodes, got {}",
                MIN_ELEMENTS + 1,
                nodes.len()
            )));
        }
        if nodes.iter().any(|v| !v.is_finite()) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SpectralError::Mesh(
                "nodes must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn max_h(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn element_bounds(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Element containing `v` (the right one at interior nodes) and the
    /// local coordinate in `[0, 1]`.
    pub fn locate(&self, v: f64) -> Option<(usize, f64)> {
        if !(v >= self.start() && v <= self.end()) {
            return None;
        }
        let e = self
            .nodes
            .partition_point(|&n| n <= v)
            .saturating_sub(1)
            .min(self.n_elements() - 1);
        let (a, b) = self.element_bounds(e);
        Some((e, ((v - a) / (b - a)).clamp(0.0, 1.0)))
    }

    /// Linear interpolant of nodal `values` and its slope, on element `e`.
    pub fn interpolate(&self, values: &[f64], e: usize, xi: f64) -> (f64, f64) {
        let (a, b) = self.element_bounds(e);
        let (left, right) = (values[e], values[e + 1]);
        (left + xi * (right - left), (right - left) / (b - a))
    }

    pub fn quadrature(&self) -> Vec<QuadPoint> {
        let mut points = Vec::with_capacity(2 * self.n_elements());
        for e in 0..self.n_elements() {
            let (a, b) = self.element_bounds(e);
            for xi in GAUSS_XI {
                points.push(QuadPoint {
                    element: e,
                    xi,
                    v: a + xi * (b - a),
                    weight: 0.5 * (b - a),
                });
            }
        }
        points
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub element: usize,
    pub xi: f64,
    pub v: f64,
    pub weight: f64,
}

/// Coefficients of a diagonal metric `A du² + B dv²` sampled at the
/// quadrature points of a mesh.
///
/// The weak forms only need `√(A/B)`, `√(B/A)` and `√(AB)`; for conformal
/// rescalings of the induced metric the first two are taken from `x/√G`
/// directly, so they do not depend on the conformal factor at all.
#[derive(Debug, Clone)]
pub struct MetricSamples {
    pub points: Vec<QuadPoint>,
    /// `A`, the `du²` coefficient.
    pub metric_uu: Vec<f64>,
    /// `B`, the `dv²` coefficient.
    pub metric_vv: Vec<f64>,
    pub stiff_v: Vec<f64>,
    pub stiff_u: Vec<f64>,
    pub mass: Vec<f64>,
}

impl MetricSamples {
    pub fn new(domain: &AnnulusDomain, mesh: &Mesh1D) -> Self {
        let points = mesh.quadrature();
        let n = points.len();
        let mut out = Self {
            metric_uu: Vec::with_capacity(n),
            metric_vv: Vec::with_capacity(n),
            stiff_v: Vec::with_capacity(n),
            stiff_u: Vec::with_capacity(n),
            mass: Vec::with_capacity(n),
            points,
        };
        for p in &out.points {
            let x = domain.profile.x(p.v);
            let root_g = domain.big_g(p.v).sqrt();
            let rho = domain.rho(p.v);
            out.metric_uu.push(rho * x * x);
            out.metric_vv.push(rho * root_g * root_g);
            out.stiff_v.push(x / root_g);
            out.stiff_u.push(root_g / x);
            out.mass.push(rho * x * root_g);
        }
        out
    }

    /// Metric `e^{t ψ} ĝ`; `psi_at` holds ψ at the quadrature points.
    pub fn conformal(&self, psi_at: &[f64], t: f64) -> Self {
        let factor: Vec<f64> = psi_at.iter().map(|p| (t * p).exp()).collect();
        let scale = |v: &[f64]| v.iter().zip(&factor).map(|(a, f)| a * f).collect();
        Self {
            points: self.points.clone(),
            metric_uu: scale(&self.metric_uu),
            metric_vv: scale(&self.metric_vv),
            stiff_v: self.stiff_v.clone(),
            stiff_u: self.stiff_u.clone(),
            mass: scale(&self.mass),
        }
    }

    /// Metric `ĝ + t h` for a diagonal `h` sampled at the quadrature points.
    pub fn tensor(&self, h_uu: &[f64], h_vv: &[f64], t: f64) -> Result<Self, SpectralError> {
        let n = self.points.len();
        let mut out = Self {
            points: self.points.clone(),
            metric_uu: Vec::with_capacity(n),
            metric_vv: Vec::with_capacity(n),
            stiff_v: Vec::with_capacity(n),
            stiff_u: Vec::with_capacity(n),
            mass: Vec::with_capacity(n),
        };
        for i in 0..n {
            let a = self.metric_uu[i] + t * h_uu[i];
            let b = self.metric_vv[i] + t * h_vv[i];
            if !(a > 0.0 && b > 0.0) {
                return Err(SpectralError::AssemblyIntegrity);
            }
            out.metric_uu.push(a);
            out.metric_vv.push(b);
            out.stiff_v.push((a / b).sqrt());
            out.stiff_u.push((b / a).sqrt());
            out.mass.push((a * b).sqrt());
        }
        Ok(out)
    }

    /// `Vol = 2π ∫ √(AB) dv`.
    pub fn volume(&self) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .zip(&self.mass)
            .map(|(p, m)| p.weight * m)
            .sum();
        2.0 * std::f64::consts::PI * s
    }

    /// Interpolates nodal values to the quadrature points.
    pub fn at_points(&self, mesh: &Mesh1D, nodal: &[f64]) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| mesh.interpolate(nodal, p.element, p.xi).0)
            .collect()
    }

    pub fn eval_at_points(&self, f: &dyn Fn(f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(p.v)).collect()
    }
}
