//! Block solves and the merged spectrum.

use rayon::prelude::*;
use serde::Serialize;

use super::assembly::{assemble_from_samples, check_span, FourierBlock};
use super::mesh::{Mesh1D, MetricSamples};
use super::tridiag::lowest_eigenpairs;
use super::SpectralError;
use crate::revolution::{AnnulusDomain, BoundaryCondition};

pub const DEFAULT_M_MAX_CAP: usize = 64;

/// Angular modes solved together before the stopping rule is applied.
const MODE_BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn trig(self, m: usize, u: f64) -> (f64, f64) {
        let mu = m as f64 * u;
        match self {
            Parity::Cos => (mu.cos(), -mu.sin()),
            Parity::Sin => (mu.sin(), mu.cos()),
        }
    }
}

/// `f(u, v) = a(v)·trig(m u)` with `a` given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub m: usize,
    pub parity: Parity,
    pub index_in_block: usize,
    /// Full nodal vector, zero at eliminated Dirichlet nodes, normalized so
    /// that `f` has unit `L²` norm.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    pub m_max_cap: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            m_max_cap: DEFAULT_M_MAX_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub entries: Vec<EigenPair>,
    /// Inclusive index ranges of numerically degenerate values.
    pub clusters: Vec<(usize, usize)>,
    pub volume: f64,
    pub bc: BoundaryCondition,
    pub mesh: Mesh1D,
    /// Largest angular mode that was solved.
    pub m_max: usize,
}

impl Spectrum {
    pub fn cluster_tol(&self, value: f64) -> f64 {
        cluster_tol(self.mesh.max_h(), value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Position in `entries` of `μ_k` (Neumann, `k ≥ 0`) or `λ_k`
    /// (Dirichlet, `k ≥ 1`).
    pub fn position(&self, k: usize) -> Option<usize> {
        let pos = match self.bc {
            BoundaryCondition::Neumann => k,
            BoundaryCondition::Dirichlet => k.checked_sub(1)?,
        };
        (pos < self.entries.len()).then_some(pos)
    }

    pub fn entry_for_index(&self, k: usize) -> Option<&EigenPair> {
        self.position(k).map(|p| &self.entries[p])
    }

    /// Conventional eigenvalue index of the entry at position `pos`.
    pub fn index_of_position(&self, pos: usize) -> usize {
        match self.bc {
            BoundaryCondition::Neumann => pos,
            BoundaryCondition::Dirichlet => pos + 1,
        }
    }

    pub fn cluster_containing(&self, pos: usize) -> Option<(usize, usize)> {
        self.clusters
            .iter()
            .copied()
            .find(|&(a, b)| a <= pos && pos <= b)
    }

    /// The cluster whose mean value is closest to `target`.
    pub fn nearest_cluster(&self, target: f64) -> Option<(usize, usize)> {
        let mean = |&(a, b): &(usize, usize)| {
            self.entries[a..=b].iter().map(|e| e.value).sum::<f64>() / (b - a + 1) as f64
        };
        self.clusters.iter().copied().min_by(|x, y| {
            (mean(x) - target)
                .abs()
                .total_cmp(&(mean(y) - target).abs())
        })
    }

    pub fn cluster_pairs(&self, cluster: (usize, usize)) -> &[EigenPair] {
        &self.entries[cluster.0..=cluster.1]
    }
}

pub(crate) fn cluster_tol(h: f64, value: f64) -> f64 {
    (10.0 * h * h * value.abs()).max(1e-8)
}

/// Degeneracy tolerance `max(1e-8, 10·h²·value)` on `mesh`.
pub fn cluster_tol_for(mesh: &Mesh1D, value: f64) -> f64 {
    cluster_tol(mesh.max_h(), value)
}

fn group_clusters(entries: &[EigenPair], h: f64) -> Vec<(usize, usize)> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=entries.len() {
        let split = i == entries.len()
            || entries[i].value - entries[i - 1].value > cluster_tol(h, entries[i].value);
        if split {
            clusters.push((start, i - 1));
            start = i;
        }
    }
    clusters
}

/// The `count` lowest pairs of one block, in the block's own ordering.
pub fn solve_block(block: &FourierBlock, count: usize) -> Result<Vec<EigenPair>, SpectralError> {
    let pairs = lowest_eigenpairs(&block.stiffness, &block.mass, count)?;
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(index, (value, vector))| EigenPair {
            value,
            m: block.m,
            parity: Parity::Cos,
            index_in_block: index,
            coeffs: block.expand(&vector),
        })
        .collect())
}

pub fn spectrum(
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    count: usize,
) -> Result<Spectrum, SpectralError> {
    check_span(domain, mesh)?;
    let samples = MetricSamples::new(domain, mesh);
    spectrum_with(&samples, mesh, domain.bc, count, SpectrumOptions::default())
}

/// Spectrum of the metric described by `samples`.
///
/// Modes are added until `(m+1)²·min(√(B/A)/√(AB))`, a lower bound for
/// every Rayleigh quotient of the next block, exceeds the `count`-th value.
pub fn spectrum_with(
    samples: &MetricSamples,
    mesh: &Mesh1D,
    bc: BoundaryCondition,
    count: usize,
    opts: SpectrumOptions,
) -> Result<Spectrum, SpectralError> {
    if count == 0 {
        return Err(SpectralError::Count { count, dim: 0 });
    }
    let angular_floor = samples
        .stiff_u
        .iter()
        .zip(&samples.mass)
        .map(|(s, m)| s / m)
        .fold(f64::INFINITY, f64::min);
    let solve_mode = |m: usize| -> Result<Vec<EigenPair>, SpectralError> {
        let block = assemble_from_samples(samples, mesh, m, bc)?;
        let wanted = if m == 0 { count } else { count.div_ceil(2) };
        let mut pairs = solve_block(&block, wanted.min(block.dim()))?;
        if m > 0 {
            let sines: Vec<EigenPair> = pairs
                .iter()
                .map(|p| EigenPair {
                    parity: Parity::Sin,
                    ..p.clone()
                })
                .collect();
            pairs.extend(sines);
        }
        Ok(pairs)
    };

    let mut entries: Vec<EigenPair> = Vec::new();
    let mut next = 0usize;
    let mut finished: Option<usize> = None;
    'batches: while next <= opts.m_max_cap {
        let last = (next + MODE_BATCH - 1).min(opts.m_max_cap);
        let blocks: Vec<Result<Vec<EigenPair>, SpectralError>> =
            (next..=last).into_par_iter().map(solve_mode).collect();
        for (offset, block) in blocks.into_iter().enumerate() {
            let m = next + offset;
            entries.extend(block?);
            sort_entries(&mut entries);
            entries.truncate(count);
            if entries.len() >= count {
                let kth = entries[count - 1].value;
                let bound = ((m + 1) * (m + 1)) as f64 * angular_floor;
                if bound > kth {
                    finished = Some(m);
                    break 'batches;
                }
            }
        }
        next = last + 1;
    }

    let h = mesh.max_h();
    let m_max = finished.unwrap_or(opts.m_max_cap);
    entries.truncate(count);
    let out = Spectrum {
        clusters: group_clusters(&entries, h),
        entries,
        volume: samples.volume(),
        bc,
        mesh: mesh.clone(),
        m_max,
    };
    match finished {
        Some(_) => Ok(out),
        None => Err(SpectralError::IncompleteSpectrum {
            cap: opts.m_max_cap,
            partial: Box::new(out),
        }),
    }
}

fn sort_entries(entries: &mut [EigenPair]) {
    entries.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.m.cmp(&b.m))
            .then(a.parity.cmp(&b.parity))
            .then(a.index_in_block.cmp(&b.index_in_block))
    });
}

/// Value and squared `ĝ`-gradient norm of the eigenfunction at `(u, v)`.
pub fn eval_eigenfunction(
    pair: &EigenPair,
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    u: f64,
    v: f64,
) -> Result<(f64, f64), SpectralError> {
    if pair.coeffs.len() != mesh.n_nodes() {
        return Err(SpectralError::MeshMismatch {
            expected: mesh.n_nodes(),
            found: pair.coeffs.len(),
        });
    }
    let (e, xi) = mesh.locate(v).ok_or(SpectralError::OutOfDomain { v })?;
    let (a, ap) = mesh.interpolate(&pair.coeffs, e, xi);
    let (trig, cotrig) = if pair.m == 0 {
        (1.0, 0.0)
    } else {
        pair.parity.trig(pair.m, u)
    };
    let m2 = (pair.m * pair.m) as f64;
    let grad_sq = (ap * ap / domain.big_g(v) * trig * trig
        + m2 * a * a / domain.big_e(v) * cotrig * cotrig)
        / domain.rho(v);
    Ok((a * trig, grad_sq))
}
