//! Finite-difference validation of the eigenvalue derivative formulas.

use serde::Serialize;

use super::forms::{conformal_form, tensor_form, BasisSamples};
use super::perturbation::{ConformalPerturbation, SampledTensor};
use super::ExtremalError;
use crate::revolution::AnnulusDomain;
use crate::spectral::{
    assemble_from_samples, cluster_tol_for, solve_block, spectrum_with, EigenPair, Mesh1D,
    MetricSamples, Parity, SpectrumOptions,
};

/// A differentiable eigenvalue branch, identified inside its Fourier block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub m: usize,
    pub parity: Parity,
    pub index_in_block: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepResult {
    pub step: f64,
    pub value_plus: f64,
    pub value_minus: f64,
    pub finite_difference: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub kind: &'static str,
    pub index: usize,
    pub branch: Branch,
    pub value: f64,
    pub formula: f64,
    pub steps: Vec<StepResult>,
    /// Extrapolation from the first two steps, eliminating the `O(step²)` term.
    pub richardson: Option<f64>,
    pub richardson_rel_error: Option<f64>,
}

fn rel_error(estimate: f64, formula: f64) -> f64 {
    (estimate - formula).abs() / formula.abs().max(1e-14)
}

/// The branch through the `k`-th eigenvalue (conventional indexing).
pub fn branch_for_index(
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    samples: &MetricSamples,
    k: usize,
) -> Result<Branch, ExtremalError> {
    let pos = match domain.bc {
        crate::revolution::BoundaryCondition::Neumann => k,
        crate::revolution::BoundaryCondition::Dirichlet => k
            .checked_sub(1)
            .ok_or(ExtremalError::IndexOutOfRange { k, available: 0 })?,
    };
    let s = spectrum_with(
        samples,
        mesh,
        domain.bc,
        pos + 1,
        SpectrumOptions::default(),
    )?;
    let e = &s.entries[pos];
    Ok(Branch {
        m: e.m,
        parity: e.parity,
        index_in_block: e.index_in_block,
    })
}

struct Tracked {
    value: f64,
    pair: EigenPair,
}

/// Solves the branch's block for `samples`, returning the tracked pair; with
/// `reference` the branch is matched by mass-weighted overlap.
fn track(
    samples: &MetricSamples,
    reference_samples: &MetricSamples,
    mesh: &Mesh1D,
    domain: &AnnulusDomain,
    branch: Branch,
    reference: Option<&EigenPair>,
    step: f64,
) -> Result<Tracked, ExtremalError> {
    let block = assemble_from_samples(samples, mesh, branch.m, domain.bc)?;
    let wanted = (branch.index_in_block + 2).min(block.dim());
    let pairs = solve_block(&block, wanted)?;
    if branch.index_in_block >= pairs.len() {
        return Err(ExtremalError::IndexOutOfRange {
            k: branch.index_in_block,
            available: pairs.len(),
        });
    }
    if let Some(r) = reference {
        let ref_block = assemble_from_samples(reference_samples, mesh, branch.m, domain.bc)?;
        let rr = ref_block.restrict(&r.coeffs);
        let overlaps: Vec<f64> = pairs
            .iter()
            .map(|p| {
                ref_block
                    .mass
                    .quadratic_form(ref_block.restrict(&p.coeffs), rr)
                    .abs()
            })
            .collect();
        let best = overlaps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if best != branch.index_in_block {
            return Err(ExtremalError::Crossing {
                expected: branch.index_in_block,
                found: best,
                step,
            });
        }
    }
    let pair = pairs[branch.index_in_block].clone();
    Ok(Tracked {
        value: pair.value,
        pair,
    })
}

fn check_isolated(
    samples: &MetricSamples,
    mesh: &Mesh1D,
    domain: &AnnulusDomain,
    branch: Branch,
) -> Result<Tracked, ExtremalError> {
    let block = assemble_from_samples(samples, mesh, branch.m, domain.bc)?;
    let wanted = (branch.index_in_block + 2).min(block.dim());
    let pairs = solve_block(&block, wanted)?;
    let j = branch.index_in_block;
    if j >= pairs.len() {
        return Err(ExtremalError::IndexOutOfRange {
            k: j,
            available: pairs.len(),
        });
    }
    let value = pairs[j].value;
    let gap_tol = 10.0 * cluster_tol_for(mesh, value);
    let neighbours = [j.checked_sub(1), Some(j + 1)];
    for n in neighbours.into_iter().flatten() {
        if n < pairs.len() && (pairs[n].value - value).abs() <= gap_tol {
            return Err(ExtremalError::Precondition(format!(
                "eigenvalue {value} of block m = {} is degenerate with its neighbour {}",
                branch.m, pairs[n].value
            )));
        }
    }
    Ok(Tracked {
        value,
        pair: EigenPair {
            parity: branch.parity,
            ..pairs[j].clone()
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    kind: &'static str,
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    base: &MetricSamples,
    k: usize,
    steps: &[f64],
    perturbed: &dyn Fn(f64) -> Result<MetricSamples, ExtremalError>,
    formula: &dyn Fn(&EigenPair) -> Result<f64, ExtremalError>,
) -> Result<DerivativeReport, ExtremalError> {
    if steps.is_empty() || steps.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(ExtremalError::Precondition(
            "steps must be a nonempty list of positive numbers".into(),
        ));
    }
    let branch = branch_for_index(domain, mesh, base, k)?;
    let centre = check_isolated(base, mesh, domain, branch)?;
    let formula_value = formula(&centre.pair)?;
    let mut results = Vec::with_capacity(steps.len());
    for &step in steps {
        let plus = track(
            &perturbed(step)?,
            base,
            mesh,
            domain,
            branch,
            Some(&centre.pair),
            step,
        )?;
        let minus = track(
            &perturbed(-step)?,
            base,
            mesh,
            domain,
            branch,
            Some(&centre.pair),
            -step,
        )?;
        let fd = (plus.value - minus.value) / (2.0 * step);
        results.push(StepResult {
            step,
            value_plus: plus.value,
            value_minus: minus.value,
            finite_difference: fd,
            rel_error: rel_error(fd, formula_value),
        });
    }
    let richardson = (results.len() >= 2).then(|| {
        let (d1, d2) = (&results[0], &results[1]);
        let r2 = (d1.step / d2.step).powi(2);
        (r2 * d2.finite_difference - d1.finite_difference) / (r2 - 1.0)
    });
    Ok(DerivativeReport {
        kind,
        index: k,
        branch,
        value: centre.value,
        formula: formula_value,
        steps: results,
        richardson,
        richardson_rel_error: richardson.map(|r| rel_error(r, formula_value)),
    })
}

/// Compares `d/dt Λ_k(e^{tψ}ĝ)` at `t = 0` with `P_ψ(u)`.
pub fn conformal_derivative_check(
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    k: usize,
    psi: &ConformalPerturbation,
    steps: &[f64],
) -> Result<DerivativeReport, ExtremalError> {
    let base = MetricSamples::new(domain, mesh);
    let psi_at = psi.at_points(mesh, &base)?;
    run_check(
        "conformal",
        domain,
        mesh,
        &base,
        k,
        steps,
        &|t| Ok(base.conformal(&psi_at, t)),
        &|pair| {
            let b = BasisSamples::new(std::slice::from_ref(pair), mesh, &base)?;
            Ok(conformal_form(&b, psi, mesh, &base, pair.value)?.value(&[1.0]))
        },
    )
}

/// Compares `d/dt Λ_k(ĝ + t h)` at `t = 0` with `Q_h(u)`.
pub fn tensor_derivative_check(
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    k: usize,
    h: &SampledTensor,
    steps: &[f64],
) -> Result<DerivativeReport, ExtremalError> {
    let base = MetricSamples::new(domain, mesh);
    h.check(&base)?;
    run_check(
        "tensor",
        domain,
        mesh,
        &base,
        k,
        steps,
        &|t| Ok(base.tensor(&h.h_uu, &h.h_vv, t)?),
        &|pair| {
            let b = BasisSamples::new(std::slice::from_ref(pair), mesh, &base)?;
            Ok(tensor_form(&b, h, &base, pair.value)?.value(&[1.0]))
        },
    )
}
