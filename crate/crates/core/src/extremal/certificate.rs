//! PSD feasibility certificates over an eigenspace.
//!
//! Both certificates minimize a convex quadratic
//! `f(S) = ⟨S, H[S]⟩ − 2⟨C, S⟩ + g₀` over symmetric positive semidefinite
//! `S` by projected gradient descent. A lower bound on the minimum follows
//! from convexity and an a priori trace bound on minimizers, which is what
//! allows a refutation to be certified rather than merely observed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::ExtremalError;
use crate::spectral::{EigenPair, Mesh1D, MetricSamples};

pub const MAX_ITERATIONS: usize = 100_000;
/// Iterations between evaluations of the duality bound.
const BOUND_EVERY: usize = 8;
const GAP_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    /// `Σ S_ij φ_iφ_j = 1/μ`.
    Function,
    /// `Σ S_ij q(φ_i, φ_j) = ĝ`.
    Global,
}

#[derive(Debug, Clone, Copy)]
pub struct CertificateOptions {
    pub max_iterations: usize,
    /// Defaults to `50·h²` for the mesh width `h`.
    pub certify_tol: Option<f64>,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            max_iterations: MAX_ITERATIONS,
            certify_tol: None,
        }
    }
}

/// `u_i = Σ_j R_ij φ_j` with `R = S^{1/2}`.
#[derive(Debug, Clone)]
pub struct Combination {
    pub weights: DMatrix<f64>,
    pub basis: Vec<EigenPair>,
}

impl Combination {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `S = RᵀR`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.weights.transpose() * &self.weights
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.weights.row(i).iter().copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct CertificateResult {
    pub kind: CertificateKind,
    pub value: f64,
    pub s: DMatrix<f64>,
    /// `√f(S)` divided by the norm of the target.
    pub residual: f64,
    /// Normalized lower bound on the residual over all PSD `S`.
    pub lower_bound: f64,
    pub status: CertificateStatus,
    pub iterations: usize,
    pub converged: bool,
    pub monotone: bool,
    pub min_eigenvalue: f64,
    pub certify_tol: f64,
    pub refute_tol: f64,
    pub combination: Combination,
}

/// Basis data at tensor-product sample points, exact for the angular
/// integrals of products of up to four basis functions.
struct PointSamples {
    weight: Vec<f64>,
    phi: Vec<Vec<f64>>,
    du: Vec<Vec<f64>>,
    dv: Vec<Vec<f64>>,
    metric_uu: Vec<f64>,
    metric_vv: Vec<f64>,
}

impl PointSamples {
    fn new(
        basis: &[EigenPair],
        mesh: &Mesh1D,
        samples: &MetricSamples,
    ) -> Result<Self, ExtremalError> {
        if basis.is_empty() {
            return Err(ExtremalError::EmptyCluster);
        }
        for pair in basis {
            if pair.coeffs.len() != mesh.n_nodes() {
                return Err(ExtremalError::MeshMismatch {
                    expected: mesh.n_nodes(),
                    found: pair.coeffs.len(),
                });
            }
        }
        let m_max = basis.iter().map(|p| p.m).max().unwrap_or(0);
        let n_u = 4 * m_max + 4;
        let du_weight = 2.0 * PI / n_u as f64;
        let n = samples.points.len() * n_u;
        let d = basis.len();
        let mut out = Self {
            weight: Vec::with_capacity(n),
            phi: vec![Vec::with_capacity(n); d],
            du: vec![Vec::with_capacity(n); d],
            dv: vec![Vec::with_capacity(n); d],
            metric_uu: Vec::with_capacity(n),
            metric_vv: Vec::with_capacity(n),
        };
        for (q, p) in samples.points.iter().enumerate() {
            let radial: Vec<(f64, f64)> = basis
                .iter()
                .map(|b| mesh.interpolate(&b.coeffs, p.element, p.xi))
                .collect();
            for l in 0..n_u {
                let u = l as f64 * du_weight;
                out.weight.push(p.weight * samples.mass[q] * du_weight);
                out.metric_uu.push(samples.metric_uu[q]);
                out.metric_vv.push(samples.metric_vv[q]);
                for (i, b) in basis.iter().enumerate() {
                    let (a, ap) = radial[i];
                    let (trig, cotrig) = if b.m == 0 {
                        (1.0, 0.0)
                    } else {
                        b.parity.trig(b.m, u)
                    };
                    out.phi[i].push(a * trig);
                    out.du[i].push(b.m as f64 * a * cotrig);
                    out.dv[i].push(ap * trig);
                }
            }
        }
        Ok(out)
    }

    fn len(&self) -> usize {
        self.weight.len()
    }

    fn dim(&self) -> usize {
        self.phi.len()
    }

    /// Components of the target-relative residual field at point `p` for
    /// the pair `(i, j)`, in an orthonormal frame.
    fn field(&self, kind: CertificateKind, mu: f64, p: usize, i: usize, j: usize) -> [f64; 3] {
        let (pi, pj) = (self.phi[i][p], self.phi[j][p]);
        match kind {
            CertificateKind::Function => [pi * pj, 0.0, 0.0],
            CertificateKind::Global => {
                let (e, g) = (self.metric_uu[p], self.metric_vv[p]);
                let (ui, uj, vi, vj) = (self.du[i][p], self.du[j][p], self.dv[i][p], self.dv[j][p]);
                let trace = 0.5 * (ui * uj / e + vi * vj / g - mu * pi * pj);
                [
                    ui * uj / e - trace,
                    0.5 * (ui * vj + vi * uj) * std::f64::consts::SQRT_2 / (e * g).sqrt(),
                    vi * vj / g - trace,
                ]
            }
        }
    }

    fn target(&self, kind: CertificateKind, mu: f64) -> [f64; 3] {
        match kind {
            CertificateKind::Function => [1.0 / mu, 0.0, 0.0],
            CertificateKind::Global => [1.0, 0.0, 1.0],
        }
    }

    /// `∫ |Σ S_ij X_ij − target|²` evaluated pointwise.
    fn direct_objective(&self, kind: CertificateKind, mu: f64, s: &DMatrix<f64>) -> f64 {
        let d = self.dim();
        let t = self.target(kind, mu);
        let mut total = 0.0;
        for p in 0..self.len() {
            let mut acc = [-t[0], -t[1], -t[2]];
            for i in 0..d {
                for j in 0..d {
                    let x = self.field(kind, mu, p, i, j);
                    for c in 0..3 {
                        acc[c] += s[(i, j)] * x[c];
                    }
                }
            }
            total += self.weight[p] * (acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]);
        }
        total
    }
}

struct Quadratic {
    d: usize,
    h: DMatrix<f64>,
    c: DMatrix<f64>,
    g0: f64,
}

impl Quadratic {
    fn build(points: &PointSamples, kind: CertificateKind, mu: f64) -> Self {
        let d = points.dim();
        let n = d * d;
        let t = points.target(kind, mu);
        let mut h = DMatrix::zeros(n, n);
        let mut c = DMatrix::zeros(d, d);
        let mut g0 = 0.0;
        let mut x = vec![[0.0; 3]; n];
        for p in 0..points.len() {
            let w = points.weight[p];
            for i in 0..d {
                for j in 0..d {
                    x[i * d + j] = points.field(kind, mu, p, i, j);
                }
            }
            for a in 0..n {
                let xa = x[a];
                c[(a / d, a % d)] += w * (xa[0] * t[0] + xa[1] * t[1] + xa[2] * t[2]);
                for b in a..n {
                    let xb = x[b];
                    h[(a, b)] += w * (xa[0] * xb[0] + xa[1] * xb[1] + xa[2] * xb[2]);
                }
            }
            g0 += w * (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
        }
        for a in 0..n {
            for b in 0..a {
                h[(a, b)] = h[(b, a)];
            }
        }
        Self { d, h, c, g0 }
    }

    fn apply(&self, s: &DMatrix<f64>) -> DMatrix<f64> {
        let v = DVector::from_iterator(self.d * self.d, s.transpose().iter().copied());
        let hv = &self.h * v;
        DMatrix::from_row_slice(self.d, self.d, hv.as_slice())
    }

    fn value(&self, s: &DMatrix<f64>, hs: &DMatrix<f64>) -> f64 {
        s.dot(hs) - 2.0 * self.c.dot(s) + self.g0
    }
}

fn sym_eigen(a: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(0.5 * (a + a.transpose()))
}

fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    sym_eigen(a)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn project_psd(a: &DMatrix<f64>) -> DMatrix<f64> {
    let e = sym_eigen(a);
    let clamped = e.eigenvalues.map(|l| l.max(0.0));
    let v = &e.eigenvectors;
    v * DMatrix::from_diagonal(&clamped) * v.transpose()
}

fn psd_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let e = sym_eigen(a);
    let roots = e.eigenvalues.map(|l| l.max(0.0).sqrt());
    let v = &e.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.transpose()
}

/// Certificate for `Σ u_i² = 1/μ` on the eigenspace spanned by `basis`.
pub fn extremal_certificate(
    basis: &[EigenPair],
    value: f64,
    mesh: &Mesh1D,
    samples: &MetricSamples,
    opts: CertificateOptions,
) -> Result<CertificateResult, ExtremalError> {
    certify(CertificateKind::Function, basis, value, mesh, samples, opts)
}

/// Certificate for `Σ q(u_i) = ĝ`, the condition for extremality among all
/// metrics rather than within the conformal class.
pub fn global_feasibility_residual(
    basis: &[EigenPair],
    value: f64,
    mesh: &Mesh1D,
    samples: &MetricSamples,
    opts: CertificateOptions,
) -> Result<CertificateResult, ExtremalError> {
    certify(CertificateKind::Global, basis, value, mesh, samples, opts)
}

fn certify(
    kind: CertificateKind,
    basis: &[EigenPair],
    mu: f64,
    mesh: &Mesh1D,
    samples: &MetricSamples,
    opts: CertificateOptions,
) -> Result<CertificateResult, ExtremalError> {
    if !(mu > 0.0) {
        return Err(ExtremalError::Precondition(format!(
            "certificates need a positive eigenvalue, got {mu}"
        )));
    }
    let points = PointSamples::new(basis, mesh, samples)?;
    let quad = Quadratic::build(&points, kind, mu);
    let d = quad.d;
    let lipschitz = sym_eigen(&quad.h)
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let c_min = min_eigenvalue(&quad.c);
    let trace_bound = (c_min > 0.0).then(|| 2.0 * quad.g0 / c_min);

    let identity = DMatrix::<f64>::identity(d, d);
    let hi = quad.apply(&identity);
    let scale = (quad.c.trace() / identity.dot(&hi)).max(0.0);
    let mut s = if scale.is_finite() {
        identity * scale
    } else {
        DMatrix::zeros(d, d)
    };
    let mut hs = quad.apply(&s);
    let mut f = quad.value(&s, &hs);
    let mut best_lb = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut converged = false;
    let mut min_eig = min_eigenvalue(&s);
    let mut iterations = 0;

    if lipschitz > 0.0 {
        while iterations < opts.max_iterations {
            let half_grad = &hs - &quad.c;
            if iterations % BOUND_EVERY == 0 {
                if let Some(tb) = trace_bound {
                    let grad = 2.0 * &half_grad;
                    let lb = f - grad.dot(&s) + tb * min_eigenvalue(&grad).min(0.0);
                    best_lb = best_lb.max(lb);
                }
                if f - best_lb <= GAP_RTOL * quad.g0 {
                    converged = true;
                    break;
                }
            }
            let next = project_psd(&(&s - half_grad / lipschitz));
            min_eig = min_eig.min(min_eigenvalue(&next));
            let next_hs = quad.apply(&next);
            let next_f = quad.value(&next, &next_hs);
            iterations += 1;
            if next_f > f + 1e-14 * quad.g0 {
                monotone = false;
            }
            let moved = (&next - &s).norm();
            s = next;
            hs = next_hs;
            f = next_f;
            if moved <= 1e-15 * s.norm().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
    } else {
        converged = true;
    }

    let norm = quad.g0.sqrt();
    let residual = points.direct_objective(kind, mu, &s).max(0.0).sqrt() / norm;
    // The quadratic form carries O(eps·g0) cancellation error near f = 0.
    let lower_bound = (best_lb.max(0.0).sqrt() / norm).min(residual);
    let certify_tol = opts
        .certify_tol
        .unwrap_or_else(|| 50.0 * mesh.max_h().powi(2));
    let refute_tol = 10.0 * certify_tol;
    let status = if residual <= certify_tol {
        CertificateStatus::Certified
    } else if lower_bound > refute_tol {
        CertificateStatus::Refuted
    } else {
        CertificateStatus::Inconclusive
    };
    Ok(CertificateResult {
        kind,
        value: mu,
        combination: Combination {
            weights: psd_sqrt(&s),
            basis: basis.to_vec(),
        },
        s,
        residual,
        lower_bound,
        status,
        iterations,
        converged,
        monotone,
        min_eigenvalue: min_eig,
        certify_tol,
        refute_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revolution::{make_domain, BoundaryCondition, ConformalWeight, FlatCylinder};
    use crate::spectral::spectrum;
    use std::sync::Arc;

    fn flat(bc: BoundaryCondition) -> (crate::spectral::Spectrum, Mesh1D, MetricSamples) {
        let d = make_domain(
            Arc::new(FlatCylinder { radius: 1.0 }),
            0.0,
            2.0,
            bc,
            ConformalWeight::None,
        )
        .unwrap();
        let mesh = Mesh1D::uniform(0.0, 2.0, 64).unwrap();
        let samples = MetricSamples::new(&d, &mesh);
        (spectrum(&d, &mesh, 4).unwrap(), mesh, samples)
    }

    #[test]
    fn flat_first_cluster_is_certified_exactly() {
        let (s, mesh, samples) = flat(BoundaryCondition::Neumann);
        let basis = s.cluster_pairs((1, 2));
        let r = extremal_certificate(basis, 1.0, &mesh, &samples, CertificateOptions::default())
            .unwrap();
        assert_eq!(r.status, CertificateStatus::Certified);
        assert!(r.residual < 1e-12, "{}", r.residual);
        let expect = DMatrix::<f64>::identity(2, 2) * (2.0 * PI);
        assert!((&r.s - expect).norm() < 1e-9);
        assert!((r.combination.gram() - &r.s).norm() < 1e-9);
    }

    #[test]
    fn zero_weights_give_metric_norm() {
        let (s, mesh, samples) = flat(BoundaryCondition::Neumann);
        let points = PointSamples::new(s.cluster_pairs((1, 2)), &mesh, &samples).unwrap();
        let zero = DMatrix::zeros(2, 2);
        let f = points.direct_objective(CertificateKind::Global, 1.0, &zero);
        assert!((f - 2.0 * samples.volume()).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_ground_state_is_refuted() {
        let (s, mesh, samples) = flat(BoundaryCondition::Dirichlet);
        let basis = &s.entries[..1];
        let r = extremal_certificate(
            basis,
            basis[0].value,
            &mesh,
            &samples,
            CertificateOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status, CertificateStatus::Refuted);
        assert!(r.monotone && r.min_eigenvalue >= -1e-12);
        assert!(
            (r.residual - 1.0 / 3f64.sqrt()).abs() < 1e-3,
            "{}",
            r.residual
        );
        assert!(r.lower_bound <= r.residual + 1e-9);
    }
}
