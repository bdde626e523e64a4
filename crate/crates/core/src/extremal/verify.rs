//! A posteriori checks of a certified combination and one-sided scans of
//! the normalized eigenvalue along conformal directions.

use rayon::prelude::*;
use serde::Serialize;

use super::certificate::Combination;
use super::forms::{conformal_form, BasisSamples};
use super::perturbation::{ConformalPerturbation, SEED_BASE};
use super::ExtremalError;
use crate::revolution::AnnulusDomain;
use crate::spectral::{spectrum_with, Mesh1D, MetricSamples, SpectrumOptions};

pub const TRACE_SAMPLES: usize = 5;
const ANGULAR_GRID: usize = 64;
const RADIAL_GRID: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct TraceSample {
    pub seed: u64,
    pub trace: f64,
    pub psi_norm: f64,
    /// `|Σ_i P_ψ(u_i)| / (‖ψ‖·Vol^{1/2})`.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// `sup |Σ u_i² − 1/μ|` over the sample grid.
    pub sum_sq_defect: f64,
    /// `sup |Σ |∇u_i|² − 1|` over the sample grid.
    pub grad_sq_defect: f64,
    pub grid_points: usize,
    pub trace_identity: Vec<TraceSample>,
    pub max_trace_normalized: f64,
}

/// Sample positions in `v`: element midpoints, thinned to at most
/// `RADIAL_GRID` values.
fn radial_samples(mesh: &Mesh1D) -> Vec<f64> {
    let n = mesh.n_elements();
    let stride = n.div_ceil(RADIAL_GRID).max(1);
    (0..n)
        .step_by(stride)
        .map(|e| {
            let (a, b) = mesh.element_bounds(e);
            0.5 * (a + b)
        })
        .collect()
}

pub fn verify_conditions(
    combo: &Combination,
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    mu: f64,
) -> Result<ConditionReport, ExtremalError> {
    let samples = MetricSamples::new(domain, mesh);
    let s = combo.gram();
    let d = combo.dim();
    let vs = radial_samples(mesh);
    let mut sum_sq_defect: f64 = 0.0;
    let mut grad_sq_defect: f64 = 0.0;
    for &v in &vs {
        let rho = domain.rho(v);
        let (big_e, big_g) = (rho * domain.big_e(v), rho * domain.big_g(v));
        let (e, xi) = mesh.locate(v).ok_or(ExtremalError::Precondition(format!(
            "sample point {v} outside the mesh"
        )))?;
        let radial: Vec<(f64, f64)> = combo
            .basis
            .iter()
            .map(|p| mesh.interpolate(&p.coeffs, e, xi))
            .collect();
        for l in 0..ANGULAR_GRID {
            let u = 2.0 * std::f64::consts::PI * l as f64 / ANGULAR_GRID as f64;
            let mut phi = vec![0.0; d];
            let mut du = vec![0.0; d];
            let mut dv = vec![0.0; d];
            for (i, p) in combo.basis.iter().enumerate() {
                let (trig, cotrig) = if p.m == 0 {
                    (1.0, 0.0)
                } else {
                    p.parity.trig(p.m, u)
                };
                phi[i] = radial[i].0 * trig;
                du[i] = p.m as f64 * radial[i].0 * cotrig;
                dv[i] = radial[i].1 * trig;
            }
            let mut sum_sq = 0.0;
            let mut grad_sq = 0.0;
            for i in 0..d {
                for j in 0..d {
                    sum_sq += s[(i, j)] * phi[i] * phi[j];
                    grad_sq += s[(i, j)] * (du[i] * du[j] / big_e + dv[i] * dv[j] / big_g);
                }
            }
            sum_sq_defect = sum_sq_defect.max((sum_sq - 1.0 / mu).abs());
            grad_sq_defect = grad_sq_defect.max((grad_sq - 1.0).abs());
        }
    }

    let basis = BasisSamples::new(&combo.basis, mesh, &samples)?;
    let root_vol = samples.volume().sqrt();
    let mut trace_identity = Vec::with_capacity(TRACE_SAMPLES);
    for i in 0..TRACE_SAMPLES as u64 {
        let seed = SEED_BASE + i;
        let psi = ConformalPerturbation::seeded(seed, mesh, &samples)?;
        let form = conformal_form(&basis, &psi, mesh, &samples, mu)?;
        let trace = form.trace_with(&s);
        let psi_norm = psi.l2_norm(mesh, &samples)?;
        trace_identity.push(TraceSample {
            seed,
            trace,
            psi_norm,
            normalized: trace.abs() / (psi_norm * root_vol),
        });
    }
    let max_trace_normalized = trace_identity
        .iter()
        .map(|t| t.normalized)
        .fold(0.0, f64::max);
    Ok(ConditionReport {
        sum_sq_defect,
        grad_sq_defect,
        grid_points: vs.len() * ANGULAR_GRID,
        trace_identity,
        max_trace_normalized,
    })
}

/// `Λ_k · Vol` for a surface.
pub fn normalized_eigenvalue(
    spectrum: &crate::spectral::Spectrum,
    k: usize,
) -> Result<f64, ExtremalError> {
    spectrum
        .entry_for_index(k)
        .map(|e| e.value * spectrum.volume)
        .ok_or(ExtremalError::IndexOutOfRange {
            k,
            available: spectrum.entries.len(),
        })
}

pub fn default_t_grid() -> Vec<f64> {
    [-4e-3, -3e-3, -2e-3, -1e-3, 0.0, 1e-3, 2e-3, 3e-3, 4e-3].to_vec()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub t: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub index: usize,
    pub base: f64,
    pub points: Vec<ScanPoint>,
    pub slope_plus: f64,
    pub slope_minus: f64,
    pub tol_slope: f64,
    pub consistent_max: bool,
    pub consistent_min: bool,
    pub note: &'static str,
}

/// Least-squares `F(t) − F(0) ≈ b·t + c·t²` on one side of zero.
fn one_sided_slope(points: &[(f64, f64)], base: f64) -> f64 {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, f) in points {
        let y = f - base;
        s11 += t * t;
        s12 += t * t * t;
        s22 += t * t * t * t;
        r1 += t * y;
        r2 += t * t * y;
    }
    if points.len() == 1 {
        return r1 / s11;
    }
    let det = s11 * s22 - s12 * s12;
    (r1 * s22 - r2 * s12) / det
}

/// Normalized `k`-th eigenvalue of `e^{tψ}ĝ` over `t_grid`, re-solved in
/// full at every `t`.
pub fn extremality_scan(
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    k: usize,
    psi: &ConformalPerturbation,
    t_grid: &[f64],
) -> Result<ScanReport, ExtremalError> {
    let plus = t_grid.iter().filter(|t| **t > 0.0).count();
    let minus = t_grid.iter().filter(|t| **t < 0.0).count();
    if plus == 0 || minus == 0 {
        return Err(ExtremalError::Precondition(
            "t_grid needs points on both sides of zero".into(),
        ));
    }
    let base_samples = MetricSamples::new(domain, mesh);
    let psi_at = psi.at_points(mesh, &base_samples)?;
    let pos = match domain.bc {
        crate::revolution::BoundaryCondition::Neumann => k,
        crate::revolution::BoundaryCondition::Dirichlet => k
            .checked_sub(1)
            .ok_or(ExtremalError::IndexOutOfRange { k, available: 0 })?,
    };
    let evaluate = |t: f64| -> Result<f64, ExtremalError> {
        let samples = base_samples.conformal(&psi_at, t);
        let s = spectrum_with(
            &samples,
            mesh,
            domain.bc,
            pos + 1,
            SpectrumOptions::default(),
        )?;
        normalized_eigenvalue(&s, k)
    };
    let mut grid: Vec<f64> = t_grid.to_vec();
    if !grid.contains(&0.0) {
        grid.push(0.0);
    }
    grid.sort_by(f64::total_cmp);
    let values: Vec<Result<f64, ExtremalError>> = grid.par_iter().map(|&t| evaluate(t)).collect();
    let mut points = Vec::with_capacity(grid.len());
    for (t, v) in grid.iter().zip(values) {
        points.push(ScanPoint {
            t: *t,
            normalized: v?,
        });
    }
    let base = points
        .iter()
        .find(|p| p.t == 0.0)
        .map(|p| p.normalized)
        .unwrap_or(f64::NAN);
    let side = |positive: bool| -> Vec<(f64, f64)> {
        points
            .iter()
            .filter(|p| if positive { p.t > 0.0 } else { p.t < 0.0 })
            .map(|p| (p.t, p.normalized))
            .collect()
    };
    let slope_plus = one_sided_slope(&side(true), base);
    let slope_minus = one_sided_slope(&side(false), base);
    let tol_slope = 1e-4 * base.abs().max(1.0);
    Ok(ScanReport {
        index: k,
        base,
        points,
        slope_plus,
        slope_minus,
        tol_slope,
        consistent_max: slope_minus >= -tol_slope && slope_plus <= tol_slope,
        consistent_min: slope_minus <= tol_slope && slope_plus >= -tol_slope,
        note:
            "finitely many conformal directions: the scan can refute extremality, never confirm it",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fit_recovers_quadratic() {
        let pts: Vec<(f64, f64)> = [1e-3, 2e-3, 3e-3]
            .iter()
            .map(|&t| (t, 5.0 + 2.0 * t - 7.0 * t * t))
            .collect();
        assert!((one_sided_slope(&pts, 5.0) - 2.0).abs() < 1e-9);
        let neg: Vec<(f64, f64)> = pts.iter().map(|&(t, _)| (-t, 5.0 - 3.0 * t)).collect();
        assert!((one_sided_slope(&neg, 5.0) - 3.0).abs() < 1e-9);
    }
}
