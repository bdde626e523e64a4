//! Surfaces of revolution and annular domains cut out of them.
//!
//! A profile curve `v ↦ (x(v), z(v))` with `x > 0` is rotated around the
//! `z` axis, giving `φ(u, v) = (x cos u, x sin u, z)` with induced metric
//! `E du² + G dv²`, `E = x²`, `G = x′² + z′²`. The unit normal is
//! `N = (z′ cos u, z′ sin u, −x′)/√G`; its `u`-independent amplitudes are
//! stored as [`ProfilePoint::n_rad`] and [`ProfilePoint::n_axial`].
//!
//! Curvature sign convention: `dN/ds = k T` along principal directions, so
//! the parallel curvature is `z′/(x√G)` and the meridian curvature equals
//! the signed curvature `(x′z″ − x″z′)/G^{3/2}` of the generating curve.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptic::{ellint_e, ellint_f, EllipticArgs};

/// Number of grid cells per period when bracketing curvature zeros.
const ZERO_GRID_PER_PERIOD: usize = 64;
/// Grid cells over the search window for aperiodic profiles.
const ZERO_GRID_APERIODIC: usize = 256;
/// Relative curvature threshold for a Neumann-compatible boundary.
pub const NEUMANN_CURVATURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RevolutionError {
    #[error("degenerate unduloid: need alpha < gamma, got alpha = {alpha}, gamma = {gamma}")]
    Degenerate { alpha: f64, gamma: f64 },
    #[error("invalid surface parameter: {0}")]
    Parameter(String),
    #[error("invalid domain [{v_a}, {v_b}]: {reason}")]
    Domain { v_a: f64, v_b: f64, reason: String },
}

/// Generating curve of a surface of revolution.
pub trait Profile: Send + Sync + fmt::Debug {
    fn x(&self, v: f64) -> f64;
    fn xp(&self, v: f64) -> f64;
    fn z(&self, v: f64) -> f64;
    fn zp(&self, v: f64) -> f64;

    /// Signed curvature of the generating curve (meridian principal curvature).
    fn meridian_curvature(&self, v: f64) -> f64;

    fn parallel_curvature(&self, v: f64) -> f64 {
        let (xp, zp) = (self.xp(v), self.zp(v));
        zp / (self.x(v) * (xp * xp + zp * zp).sqrt())
    }

    fn period(&self) -> Option<f64> {
        None
    }

    /// Zeros of the meridian curvature in `[lo, hi]`, ascending.
    fn curvature_zeros(&self, lo: f64, hi: f64) -> Vec<f64> {
        bracketed_zeros(|v| self.meridian_curvature(v), lo, hi, self.period())
    }

    fn kind(&self) -> &'static str;
}

/// Delaunay unduloid with neck radius `alpha` and bulge radius `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnduloidSurface {
    pub alpha: f64,
    pub gamma: f64,
    pub mu: f64,
    pub kappa2: f64,
    pub beta: f64,
    pub delta: f64,
    pub period: f64,
}

pub fn unduloid(alpha: f64, gamma: f64) -> Result<UnduloidSurface, RevolutionError> {
    if !alpha.is_finite() || !gamma.is_finite() || alpha <= 0.0 || gamma <= 0.0 {
        return Err(RevolutionError::Parameter(format!(
            "alpha and gamma must be positive and finite, got alpha = {alpha}, gamma = {gamma}"
        )));
    }
    if alpha >= gamma {
        return Err(RevolutionError::Degenerate { alpha, gamma });
    }
    let (a2, g2) = (alpha * alpha, gamma * gamma);
    Ok(UnduloidSurface {
        alpha,
        gamma,
        mu: 2.0 / (alpha + gamma),
        kappa2: (g2 - a2) / g2,
        beta: (g2 - a2) / 2.0,
        delta: (g2 + a2) / 2.0,
        period: PI * (alpha + gamma),
    })
}

impl UnduloidSurface {
    fn amplitude(&self, v: f64) -> f64 {
        0.5 * self.mu * v - FRAC_PI_4
    }

    /// `sin(2v/(α+γ))`, the common factor of the curvature formulas.
    fn phase(&self, v: f64) -> f64 {
        (self.mu * v).sin()
    }

    /// The `n`-th curvature zero; `n = 0` is the largest zero `≤ 0` and the
    /// sequence alternates between the two arcsine branches.
    pub fn curvature_zero(&self, n: i64) -> f64 {
        let r = (self.gamma - self.alpha) / (self.gamma + self.alpha);
        let theta = if n.rem_euclid(2) == 0 {
            -r.asin()
        } else {
            PI + r.asin()
        };
        theta / self.mu + n.div_euclid(2) as f64 * self.period
    }
}

impl Profile for UnduloidSurface {
    fn x(&self, v: f64) -> f64 {
        (self.beta * self.phase(v) + self.delta).sqrt()
    }

    fn xp(&self, v: f64) -> f64 {
        self.beta * self.mu * (self.mu * v).cos() / (2.0 * self.x(v))
    }

    fn z(&self, v: f64) -> f64 {
        let args = EllipticArgs {
            phi: self.amplitude(v),
            k2: self.kappa2,
        };
        // kappa2 < 1 strictly, so neither integral can fail.
        let f = ellint_f(args).expect("unduloid modulus is below 1");
        let e = ellint_e(args).expect("unduloid modulus is below 1");
        self.alpha * f + self.gamma * e
    }

    fn zp(&self, v: f64) -> f64 {
        let s = self.amplitude(v).sin();
        let delta = (1.0 - self.kappa2 * s * s).sqrt();
        0.5 * self.mu * (self.alpha / delta + self.gamma * delta)
    }

    fn meridian_curvature(&self, v: f64) -> f64 {
        let (a, g) = (self.alpha, self.gamma);
        let s = self.phase(v);
        (g - a) * (g - a + (a + g) * s) / ((a + g) * (a * a + g * g + (g * g - a * a) * s))
    }

    fn parallel_curvature(&self, v: f64) -> f64 {
        let (a, g) = (self.alpha, self.gamma);
        let s = self.phase(v);
        (a + g + (g - a) * s) / (a * a + g * g + (g * g - a * a) * s)
    }

    fn period(&self) -> Option<f64> {
        Some(self.period)
    }

    fn curvature_zeros(&self, lo: f64, hi: f64) -> Vec<f64> {
        if !(lo <= hi) {
            return Vec::new();
        }
        let mut n = 2 * ((lo - self.curvature_zero(0)) / self.period).floor() as i64 - 2;
        let mut zeros = Vec::new();
        loop {
            let v = self.curvature_zero(n);
            if v > hi {
                break;
            }
            if v >= lo {
                zeros.push(v);
            }
            n += 1;
        }
        zeros
    }

    fn kind(&self) -> &'static str {
        "unduloid"
    }
}

/// Right circular cylinder of the given radius; `v` is the height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatCylinder {
    pub radius: f64,
}

impl Profile for FlatCylinder {
    fn x(&self, _v: f64) -> f64 {
        self.radius
    }
    fn xp(&self, _v: f64) -> f64 {
        0.0
    }
    fn z(&self, v: f64) -> f64 {
        v
    }
    fn zp(&self, _v: f64) -> f64 {
        1.0
    }
    fn meridian_curvature(&self, _v: f64) -> f64 {
        0.0
    }
    fn kind(&self) -> &'static str {
        "flat"
    }
}

/// Round sphere parametrized by arclength from the south pole, `v ∈ (0, πR)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereZone {
    pub radius: f64,
}

impl Profile for SphereZone {
    fn x(&self, v: f64) -> f64 {
        self.radius * (v / self.radius).sin()
    }
    fn xp(&self, v: f64) -> f64 {
        (v / self.radius).cos()
    }
    fn z(&self, v: f64) -> f64 {
        -self.radius * (v / self.radius).cos()
    }
    fn zp(&self, v: f64) -> f64 {
        (v / self.radius).sin()
    }
    fn meridian_curvature(&self, _v: f64) -> f64 {
        1.0 / self.radius
    }
    fn parallel_curvature(&self, _v: f64) -> f64 {
        1.0 / self.radius
    }
    fn kind(&self) -> &'static str {
        "sphere"
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Profile given by user evaluators for `x`, `x′` and `z′`.
///
/// Second derivatives for the curvature come from central differences of
/// the supplied first derivatives; `z` is the quadrature of `z′` from 0.
#[derive(Clone)]
pub struct CustomProfile {
    x: ScalarFn,
    xp: ScalarFn,
    zp: ScalarFn,
    period: Option<f64>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

impl CustomProfile {
    pub fn new(x: ScalarFn, xp: ScalarFn, zp: ScalarFn, period: Option<f64>) -> Self {
        Self { x, xp, zp, period }
    }

    /// Piecewise-linear interpolation of tabulated `(v, x, x′, z′)` samples.
    pub fn from_samples(
        v: Vec<f64>,
        x: Vec<f64>,
        xp: Vec<f64>,
        zp: Vec<f64>,
    ) -> Result<Self, RevolutionError> {
        let n = v.len();
        if n < 2 || x.len() != n || xp.len() != n || zp.len() != n {
            return Err(RevolutionError::Parameter(
                "custom profile needs at least two samples and equal-length columns".into(),
            ));
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(RevolutionError::Parameter(
                "custom profile abscissae must be strictly increasing".into(),
            ));
        }
        if x.iter().any(|&r| !(r > 0.0)) {
            return Err(RevolutionError::Parameter(
                "custom profile radius must be positive".into(),
            ));
        }
        let v = Arc::new(v);
        let table = |col: Vec<f64>| -> ScalarFn {
            let v = Arc::clone(&v);
            Arc::new(move |t| interpolate(&v, &col, t))
        };
        Ok(Self::new(table(x), table(xp), table(zp), None))
    }
}

fn interpolate(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    let last = nodes.len() - 1;
    let i = match nodes.partition_point(|&n| n <= t) {
        0 => 0,
        p if p > last => last - 1,
        p => p - 1,
    };
    let i = i.min(last - 1);
    let w = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
    values[i] + w * (values[i + 1] - values[i])
}

impl Profile for CustomProfile {
    fn x(&self, v: f64) -> f64 {
        (self.x)(v)
    }
    fn xp(&self, v: f64) -> f64 {
        (self.xp)(v)
    }
    fn z(&self, v: f64) -> f64 {
        gauss_integral(&*self.zp, 0.0, v, 32)
    }
    fn zp(&self, v: f64) -> f64 {
        (self.zp)(v)
    }
    fn meridian_curvature(&self, v: f64) -> f64 {
        let h = 1e-5 * (1.0 + v.abs());
        let xpp = ((self.xp)(v + h) - (self.xp)(v - h)) / (2.0 * h);
        let zpp = ((self.zp)(v + h) - (self.zp)(v - h)) / (2.0 * h);
        let (xp, zp) = ((self.xp)(v), (self.zp)(v));
        let g = xp * xp + zp * zp;
        (xp * zpp - xpp * zp) / (g * g.sqrt())
    }
    fn period(&self) -> Option<f64> {
        self.period
    }
    fn kind(&self) -> &'static str {
        "custom-profile"
    }
}

/// Composite 5-point Gauss–Legendre rule on `panels` equal panels.
fn gauss_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        0.538_469_310_105_683_1,
        -0.538_469_310_105_683_1,
        0.906_179_845_938_664,
        -0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
            total += w * f(mid + 0.5 * width * x);
        }
    }
    0.5 * width * total
}

/// Sign-change bracketing on a uniform grid followed by bisection.
pub fn bracketed_zeros<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, period: Option<f64>) -> Vec<f64> {
    if !(lo < hi) {
        return Vec::new();
    }
    let cells = match period {
        Some(t) if t > 0.0 => ((hi - lo) / t * ZERO_GRID_PER_PERIOD as f64).ceil() as usize,
        _ => ZERO_GRID_APERIODIC,
    }
    .max(1);
    let step = (hi - lo) / cells as f64;
    let grid = |i: usize| if i == cells { hi } else { lo + i as f64 * step };
    let mut zeros = Vec::new();
    let mut left = f(lo);
    if left == 0.0 {
        zeros.push(lo);
    }
    for i in 0..cells {
        let (a, b) = (grid(i), grid(i + 1));
        let right = f(b);
        if right == 0.0 {
            zeros.push(b);
        } else if left != 0.0 && (left < 0.0) != (right < 0.0) {
            zeros.push(bisect(&f, a, b, left));
        }
        left = right;
    }
    zeros
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || (b - a) <= 1e-14 * (1.0 + mid.abs()) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// All differential-geometric quantities of a profile at one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub v: f64,
    pub x: f64,
    pub z: f64,
    pub xp: f64,
    pub zp: f64,
    pub big_g: f64,
    pub big_e: f64,
    pub curv: f64,
    pub k1: f64,
    pub k2: f64,
    pub rho: f64,
    pub n_rad: f64,
    pub n_axial: f64,
}

pub fn profile_sample(profile: &dyn Profile, v: f64) -> ProfilePoint {
    let (x, xp, zp) = (profile.x(v), profile.xp(v), profile.zp(v));
    let big_g = xp * xp + zp * zp;
    let root_g = big_g.sqrt();
    let k1 = profile.meridian_curvature(v);
    let k2 = profile.parallel_curvature(v);
    ProfilePoint {
        v,
        x,
        z: profile.z(v),
        xp,
        zp,
        big_g,
        big_e: x * x,
        curv: k1,
        k1,
        k2,
        rho: k1 * k1 + k2 * k2,
        n_rad: zp / root_g,
        n_axial: -xp / root_g,
    }
}

pub fn curvature_zeros(profile: &dyn Profile, v_lo: f64, v_hi: f64) -> Vec<f64> {
    profile.curvature_zeros(v_lo, v_hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

/// Conformal factor applied to the induced metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConformalWeight {
    /// Induced metric itself (`ρ ≡ 1`).
    None,
    /// `ρ = |dN|² = k1² + k2²`.
    Gauss,
}

/// Rotationally symmetric annulus `[0, 2π) × [v_a, v_b]` with metric
/// `ĝ = scale · ρ(v) (E du² + G dv²)`.
#[derive(Debug, Clone)]
pub struct AnnulusDomain {
    pub profile: Arc<dyn Profile>,
    pub v_a: f64,
    pub v_b: f64,
    pub bc: BoundaryCondition,
    pub weight: ConformalWeight,
    pub scale: f64,
    pub neumann_compatible: bool,
}

pub fn make_domain(
    profile: Arc<dyn Profile>,
    v_a: f64,
    v_b: f64,
    bc: BoundaryCondition,
    weight: ConformalWeight,
) -> Result<AnnulusDomain, RevolutionError> {
    let bad = |reason: &str| RevolutionError::Domain {
        v_a,
        v_b,
        reason: reason.to_string(),
    };
    if !v_a.is_finite() || !v_b.is_finite() {
        return Err(bad("bounds must be finite"));
    }
    if v_a >= v_b {
        return Err(bad("need v_a < v_b"));
    }
    const SAMPLES: usize = 512;
    let mut max_curv: f64 = 0.0;
    for i in 0..=SAMPLES {
        let v = v_a + (v_b - v_a) * i as f64 / SAMPLES as f64;
        let x = profile.x(v);
        if !(x > 0.0) || !x.is_finite() {
            return Err(bad("profile radius must stay positive on the domain"));
        }
        let (xp, zp) = (profile.xp(v), profile.zp(v));
        if !(xp * xp + zp * zp > 0.0) {
            return Err(bad("profile must be regular (G > 0) on the domain"));
        }
        max_curv = max_curv.max(profile.meridian_curvature(v).abs());
    }
    let ends = profile
        .meridian_curvature(v_a)
        .abs()
        .max(profile.meridian_curvature(v_b).abs());
    let neumann_compatible = max_curv == 0.0 || ends <= NEUMANN_CURVATURE_TOL * max_curv;
    Ok(AnnulusDomain {
        profile,
        v_a,
        v_b,
        bc,
        weight,
        scale: 1.0,
        neumann_compatible,
    })
}

impl AnnulusDomain {
    pub fn length(&self) -> f64 {
        self.v_b - self.v_a
    }

    /// Conformal factor `ρ(v)` including the global scale.
    pub fn rho(&self, v: f64) -> f64 {
        let base = match self.weight {
            ConformalWeight::None => 1.0,
            ConformalWeight::Gauss => {
                let k1 = self.profile.meridian_curvature(v);
                let k2 = self.profile.parallel_curvature(v);
                k1 * k1 + k2 * k2
            }
        };
        self.scale * base
    }

    pub fn big_e(&self, v: f64) -> f64 {
        let x = self.profile.x(v);
        x * x
    }

    pub fn big_g(&self, v: f64) -> f64 {
        let (xp, zp) = (self.profile.xp(v), self.profile.zp(v));
        xp * xp + zp * zp
    }

    pub fn with_bc(&self, bc: BoundaryCondition) -> Self {
        Self { bc, ..self.clone() }
    }

    /// The same annulus with metric `c·ĝ`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            scale: self.scale * c,
            ..self.clone()
        }
    }

    pub fn sample(&self, v: f64) -> ProfilePoint {
        profile_sample(&*self.profile, v)
    }
}
