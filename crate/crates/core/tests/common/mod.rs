//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use extremal_spectra::revolution::{
    make_domain, unduloid, AnnulusDomain, BoundaryCondition, ConformalWeight, FlatCylinder,
};
use extremal_spectra::{EigenPair, Mesh1D};

pub const ALPHA: f64 = 0.8;
pub const GAMMA: f64 = 2.4;

/// Frozen output of [`exhaustion_lower_bound`] for the flat Dirichlet `λ₁`
/// function certificate at `mesh_n = 256`, rounded down.
pub const FLAT_DIRICHLET_BOUND: f64 = 0.577_350;
/// Frozen output of [`exhaustion_lower_bound`] for the flat `μ₁` global
/// feasibility problem at `mesh_n = 256`, rounded down.
#[allow(clippy::approx_constant)]
pub const FLAT_GLOBAL_BOUND: f64 = 0.707_106;

pub fn flat_domain(bc: BoundaryCondition, length: f64) -> AnnulusDomain {
    make_domain(
        Arc::new(FlatCylinder { radius: 1.0 }),
        0.0,
        length,
        bc,
        ConformalWeight::None,
    )
    .unwrap()
}

/// The Gauss-weighted unduloid annulus between consecutive curvature zeros.
pub fn unduloid_domain() -> AnnulusDomain {
    let s = unduloid(ALPHA, GAMMA).unwrap();
    let (a, b) = (s.curvature_zero(0), s.curvature_zero(1));
    make_domain(
        Arc::new(s),
        a,
        b,
        BoundaryCondition::Neumann,
        ConformalWeight::Gauss,
    )
    .unwrap()
}

pub fn mesh_for(domain: &AnnulusDomain, n: usize) -> Mesh1D {
    Mesh1D::uniform(domain.v_a, domain.v_b, n).unwrap()
}

/// Flat annulus of length `L` and radius 1: `m² + (jπ/L)²`, sorted with
/// multiplicity, `j ≥ 0` for Neumann and `j ≥ 1` for Dirichlet.
pub fn flat_analytic(bc: BoundaryCondition, length: f64, count: usize) -> Vec<f64> {
    let j0 = match bc {
        BoundaryCondition::Neumann => 0,
        BoundaryCondition::Dirichlet => 1,
    };
    let mut v = Vec::new();
    for m in 0..20usize {
        for j in j0..20usize {
            let lam = (m * m) as f64 + (j as f64 * PI / length).powi(2);
            v.push(lam);
            if m > 0 {
                v.push(lam);
            }
        }
    }
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Gauss–Kronrod 7/15 estimate on `[a, b]`: `(kronrod, |kronrod − gauss|, ∫|f|)`.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let (mut k, mut g, mut abs) = (WGK[7] * fc, WG[3] * fc, WGK[7] * fc.abs());
    for i in 0..7 {
        let (f1, f2) = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        k += WGK[i] * (f1 + f2);
        abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

fn adaptive_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err, abs) = gk15(f, a, b);
    if depth == 0 || err <= tol.max(50.0 * f64::EPSILON * abs) {
        return k;
    }
    let m = 0.5 * (a + b);
    adaptive_rec(f, a, m, 0.5 * tol, depth - 1) + adaptive_rec(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod quadrature to absolute tolerance `tol`.
pub fn adaptive_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adaptive_rec(f, a, b, tol, 40)
}

/// `∫₀^φ g(θ) dθ`, composed over quarter periods so every piece is smooth.
fn amplitude_integral(g: &dyn Fn(f64) -> f64, phi: f64) -> f64 {
    let sign = phi.signum();
    let phi = phi.abs();
    let mut total = 0.0;
    let mut a = 0.0;
    while a < phi {
        let b = (a + 0.5 * PI).min(phi);
        total += adaptive_integral(g, a, b, 1e-15 * (b - a));
        a = b;
    }
    sign * total
}

/// 100 `(φ, k²)` pairs, including `κ² = 8/9` of the α = 0.8, γ = 2.4 unduloid.
pub fn elliptic_grid() -> Vec<(f64, f64)> {
    let phis = [-2.7, -0.4, 0.05, 0.3, 0.9, 1.4, 0.5 * PI, 2.2, 4.0, 7.5];
    let k2s = [0.0, 0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 8.0 / 9.0, 0.95, 0.99];
    phis.iter()
        .flat_map(|&p| k2s.iter().map(move |&k| (p, k)))
        .collect()
}

pub fn oracle_f(phi: f64, k2: f64) -> f64 {
    amplitude_integral(&|t: f64| 1.0 / (1.0 - k2 * t.sin().powi(2)).sqrt(), phi)
}

pub fn oracle_e(phi: f64, k2: f64) -> f64 {
    amplitude_integral(&|t: f64| (1.0 - k2 * t.sin().powi(2)).sqrt(), phi)
}

/// Which pointwise condition the exhaustion oracle measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// `Σ S_ij φ_i φ_j = 1/μ`.
    Function,
    /// `Σ S_ij q(φ_i, φ_j) = ĝ` in an orthonormal frame.
    Global,
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];
const ANGULAR: usize = 48;

/// Moments of the quadratic objective `f(S) = ⟨S,H S⟩ − 2⟨C,S⟩ + g0` in the
/// parameters `p` of a symmetric matrix, by 5-point Gauss in `v` and a
/// uniform angular rule, straight from the nodal coefficients.
pub struct Quadratic {
    pub q: Vec<Vec<f64>>,
    pub r: Vec<f64>,
    pub g0: f64,
    /// `(i, j)` pairs, `i ≤ j`, in parameter order.
    pub pairs: Vec<(usize, usize)>,
}

impl Quadratic {
    pub fn value(&self, p: &[f64]) -> f64 {
        let n = p.len();
        let mut f = self.g0;
        for a in 0..n {
            f -= 2.0 * self.r[a] * p[a];
            for b in 0..n {
                f += p[a] * self.q[a][b] * p[b];
            }
        }
        f
    }

    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        (0..p.len())
            .map(|a| 2.0 * (0..p.len()).map(|b| self.q[a][b] * p[b]).sum::<f64>() - 2.0 * self.r[a])
            .collect()
    }
}

fn radial(pair: &EigenPair, nodes: &[f64], e: usize, v: f64) -> (f64, f64) {
    let (a, b) = (nodes[e], nodes[e + 1]);
    let (ca, cb) = (pair.coeffs[e], pair.coeffs[e + 1]);
    let t = (v - a) / (b - a);
    (ca + t * (cb - ca), (cb - ca) / (b - a))
}

pub fn objective(
    kind: OracleKind,
    basis: &[EigenPair],
    mu: f64,
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
) -> Quadratic {
    let d = basis.len();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let np = pairs.len();
    let width = match kind {
        OracleKind::Function => 1,
        OracleKind::Global => 3,
    };
    let target: Vec<f64> = match kind {
        OracleKind::Function => vec![1.0 / mu],
        OracleKind::Global => vec![1.0, 0.0, 1.0],
    };
    let mut q = vec![vec![0.0; np]; np];
    let mut r = vec![0.0; np];
    let mut g0 = 0.0;
    let nodes = mesh.nodes();
    for e in 0..mesh.n_elements() {
        let (a, b) = (nodes[e], nodes[e + 1]);
        for (xi, w) in GL5 {
            let v = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let rho = domain.rho(v);
            let (big_e, big_g) = (rho * domain.big_e(v), rho * domain.big_g(v));
            let rad: Vec<(f64, f64)> = basis.iter().map(|p| radial(p, nodes, e, v)).collect();
            for l in 0..ANGULAR {
                let u = 2.0 * PI * l as f64 / ANGULAR as f64;
                let dv_vol =
                    0.5 * (b - a) * w * (2.0 * PI / ANGULAR as f64) * (big_e * big_g).sqrt();
                let mut f = vec![0.0; d];
                let mut fu = vec![0.0; d];
                let mut fv = vec![0.0; d];
                for (i, p) in basis.iter().enumerate() {
                    let m = p.m as f64;
                    let (c, s) = ((m * u).cos(), (m * u).sin());
                    let (trig, dtrig) = match (p.m, p.parity) {
                        (0, _) => (1.0, 0.0),
                        (_, extremal_spectra::Parity::Cos) => (c, -m * s),
                        (_, extremal_spectra::Parity::Sin) => (s, m * c),
                    };
                    f[i] = rad[i].0 * trig;
                    fu[i] = rad[i].0 * dtrig;
                    fv[i] = rad[i].1 * trig;
                }
                let field = |i: usize, j: usize| -> Vec<f64> {
                    if kind == OracleKind::Function {
                        return vec![f[i] * f[j]];
                    }
                    let uu = fu[i] * fu[j] / big_e;
                    let vv = fv[i] * fv[j] / big_g;
                    let uv = 0.5 * (fu[i] * fv[j] + fv[i] * fu[j]) / (big_e * big_g).sqrt();
                    let tr = 0.5 * (uu + vv - mu * f[i] * f[j]);
                    vec![uu - tr, std::f64::consts::SQRT_2 * uv, vv - tr]
                };
                let fields: Vec<Vec<f64>> = pairs
                    .iter()
                    .map(|&(i, j)| {
                        let mult = if i == j { 1.0 } else { 2.0 };
                        field(i, j).into_iter().map(|x| mult * x).collect()
                    })
                    .collect();
                for x in 0..np {
                    for y in 0..np {
                        q[x][y] +=
                            dv_vol * (0..width).map(|c| fields[x][c] * fields[y][c]).sum::<f64>();
                    }
                    r[x] += dv_vol * (0..width).map(|c| fields[x][c] * target[c]).sum::<f64>();
                }
                g0 += dv_vol * target.iter().map(|t| t * t).sum::<f64>();
            }
        }
    }
    Quadratic { q, r, g0, pairs }
}

#[derive(Clone)]
struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

/// Whether the parameter box contains at least one PSD matrix (d ≤ 2).
fn meets_psd_cone(cell: &Cell, pairs: &[(usize, usize)]) -> bool {
    let mut diag_hi = Vec::new();
    let mut off_min_abs = 0.0;
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if i == j {
            if cell.hi[k] < 0.0 {
                return false;
            }
            diag_hi.push(cell.hi[k]);
        } else {
            let (lo, hi) = (cell.lo[k], cell.hi[k]);
            off_min_abs = if lo <= 0.0 && hi >= 0.0 {
                0.0
            } else {
                lo.abs().min(hi.abs())
            };
        }
    }
    diag_hi.len() < 2 || off_min_abs * off_min_abs <= diag_hi[0] * diag_hi[1]
}

/// Rigorous lower bound on `min_{S ⪰ 0} √(f(S)/g0)` by branch and bound over
/// a box that provably contains the minimizer, for `d ≤ 2`.
///
/// Returns `(lower, upper)` where `upper` is the best grid value found.
pub fn exhaustion_lower_bound(obj: &Quadratic, rel_gap: f64) -> (f64, f64) {
    let np = obj.r.len();
    assert!(np <= 3, "exhaustion oracle supports d ≤ 2");
    // f(p) ≥ λ_min |p|² − 2|r||p| + g0 > g0 = f(0) outside |p| > 2|r|/λ_min.
    let lam_min = min_eigenvalue(&obj.q);
    assert!(lam_min > 0.0, "objective must be strictly convex");
    let r_norm = obj.r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = 2.0 * r_norm / lam_min * 1.0001;
    let mut cells = vec![Cell {
        lo: vec![-radius; np],
        hi: vec![radius; np],
    }];
    let mut best = obj.g0;
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..200 {
        let mut scored = Vec::with_capacity(cells.len());
        for c in &cells {
            if !meets_psd_cone(c, &obj.pairs) {
                continue;
            }
            let centre: Vec<f64> = c.lo.iter().zip(&c.hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let fc = obj.value(&centre);
            let g = obj.gradient(&centre);
            let slack: f64 = g
                .iter()
                .zip(c.lo.iter().zip(&c.hi))
                .map(|(gi, (a, b))| gi.abs() * 0.5 * (b - a))
                .sum();
            if psd_point(&centre, &obj.pairs) {
                best = best.min(fc);
            }
            scored.push((fc - slack, c.clone()));
        }
        lower = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        if best - lower <= rel_gap * obj.g0 {
            break;
        }
        let keep: Vec<Cell> = scored
            .into_iter()
            .filter(|(lb, _)| *lb <= best)
            .map(|(_, c)| c)
            .collect();
        cells = keep.iter().flat_map(split).collect();
        if cells.len() > 400_000 {
            break;
        }
    }
    (
        (lower.max(0.0) / obj.g0).sqrt(),
        (best.max(0.0) / obj.g0).sqrt(),
    )
}

fn psd_point(p: &[f64], pairs: &[(usize, usize)]) -> bool {
    match pairs.len() {
        1 => p[0] >= 0.0,
        3 => p[0] >= 0.0 && p[2] >= 0.0 && p[1] * p[1] <= p[0] * p[2],
        _ => unreachable!(),
    }
}

fn split(c: &Cell) -> Vec<Cell> {
    let n = c.lo.len();
    let mut out = vec![c.clone()];
    for k in 0..n {
        let mid = 0.5 * (c.lo[k] + c.hi[k]);
        out = out
            .into_iter()
            .flat_map(|cell| {
                let mut left = cell.clone();
                let mut right = cell;
                left.hi[k] = mid;
                right.lo[k] = mid;
                [left, right]
            })
            .collect();
    }
    out
}

fn min_eigenvalue(q: &[Vec<f64>]) -> f64 {
    let n = q.len();
    nalgebra::DMatrix::from_fn(n, n, |i, j| q[i][j])
        .symmetric_eigen()
        .eigenvalues
        .min()
}

/// Least-squares slope of `log err` against `log h`.
pub fn observed_order(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

pub const DERIVATIVE_STEPS: [f64; 2] = [1e-3, 5e-4];

/// Six precondition-satisfying (branch, perturbation) cases with nonzero
/// formula value, three conformal and three tensor.
pub fn derivative_cases(
    n: usize,
) -> Vec<(&'static str, extremal_spectra::extremal::DerivativeReport)> {
    use extremal_spectra::extremal::{
        conformal_derivative_check, tensor_derivative_check, ConformalPerturbation,
        TensorPerturbation, SEED_BASE,
    };
    use extremal_spectra::spectral::MetricSamples;
    let flat_n = flat_domain(BoundaryCondition::Neumann, 2.0);
    let flat_d = flat_domain(BoundaryCondition::Dirichlet, 2.0);
    let und = unduloid_domain();
    let conformal = |d: &AnnulusDomain, k: usize, seed: u64| {
        let mesh = mesh_for(d, n);
        let s = MetricSamples::new(d, &mesh);
        let psi = ConformalPerturbation::seeded(seed, &mesh, &s).unwrap();
        conformal_derivative_check(d, &mesh, k, &psi, &DERIVATIVE_STEPS).unwrap()
    };
    let tensor = |d: &AnnulusDomain, k: usize| {
        let mesh = mesh_for(d, n);
        let s = MetricSamples::new(d, &mesh);
        let (a, l) = (d.v_a, d.length());
        let h = TensorPerturbation::new(
            move |v| (3.0 * (v - a) / l).cos(),
            move |v| 0.5 * (v - a) / l,
            "cos-linear",
        )
        .sample(&s);
        tensor_derivative_check(d, &mesh, k, &h, &DERIVATIVE_STEPS).unwrap()
    };
    vec![
        (
            "flat neumann, m=0 j=1, seeded psi",
            conformal(&flat_n, 3, SEED_BASE),
        ),
        (
            "flat dirichlet, lambda_1, seeded psi",
            conformal(&flat_d, 1, SEED_BASE + 1),
        ),
        (
            "unduloid gauss, m=0 branch at 1, seeded psi",
            conformal(&und, 3, SEED_BASE + 2),
        ),
        ("flat neumann, m=1 cos branch, tensor h", tensor(&flat_n, 1)),
        (
            "flat dirichlet, m=1 cos branch, tensor h",
            tensor(&flat_d, 2),
        ),
        (
            "unduloid gauss, m=1 j=1 cos branch, tensor h",
            tensor(&und, 4),
        ),
    ]
}

/// `d/dt Λ(e^{tc}ĝ) = −cΛ` on the unduloid `m=1` branch.
pub fn pure_scaling_case(n: usize) -> extremal_spectra::extremal::DerivativeReport {
    use extremal_spectra::extremal::{conformal_derivative_check, ConformalPerturbation};
    let d = unduloid_domain();
    let mesh = mesh_for(&d, n);
    let psi = ConformalPerturbation::constant(0.7, &mesh);
    conformal_derivative_check(&d, &mesh, 1, &psi, &DERIVATIVE_STEPS).unwrap()
}

/// Best `L²(ĝ)` fit `a ≈ c·f` of a nodal vector, as relative error.
pub fn relative_fit_error(
    domain: &AnnulusDomain,
    mesh: &Mesh1D,
    coeffs: &[f64],
    f: &dyn Fn(f64) -> f64,
) -> f64 {
    let nodes = mesh.nodes();
    let (mut af, mut ff, mut aa) = (0.0, 0.0, 0.0);
    for e in 0..mesh.n_elements() {
        let (a, b) = (nodes[e], nodes[e + 1]);
        for (xi, w) in GL5 {
            let v = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let t = (v - a) / (b - a);
            let val = coeffs[e] + t * (coeffs[e + 1] - coeffs[e]);
            let rho = domain.rho(v);
            let dvol = 0.5 * (b - a) * w * rho * (domain.big_e(v) * domain.big_g(v)).sqrt();
            let fv = f(v);
            af += dvol * val * fv;
            ff += dvol * fv * fv;
            aa += dvol * val * val;
        }
    }
    let c = af / ff;
    ((aa - 2.0 * c * af + c * c * ff).max(0.0) / (c * c * ff)).sqrt()
}
