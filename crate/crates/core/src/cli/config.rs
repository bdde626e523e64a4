//! Job configuration: one JSON document per run.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::extremal::{
    default_t_grid, ConformalPerturbation, SampledTensor, TensorPerturbation, MAX_ITERATIONS,
    SEED_BASE,
};
use crate::revolution::{
    make_domain, unduloid, AnnulusDomain, BoundaryCondition, ConformalWeight, CustomProfile,
    FlatCylinder, Profile, UnduloidSurface,
};
use crate::spectral::{Mesh1D, MetricSamples, DEFAULT_M_MAX_CAP};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default = "default_bc")]
    pub bc: BoundaryCondition,
    #[serde(default = "default_weight")]
    pub conformal_weight: ConformalWeight,
    #[serde(default = "default_mesh_n")]
    pub mesh_n: usize,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub info: InfoConfig,
    #[serde(default)]
    pub check: CheckConfig,
    #[serde(default)]
    pub certificate: CertificateConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub eigenfunction: EigenfunctionConfig,
}

fn default_bc() -> BoundaryCondition {
    BoundaryCondition::Neumann
}

fn default_weight() -> ConformalWeight {
    ConformalWeight::None
}

fn default_mesh_n() -> usize {
    512
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Unduloid {
        alpha: f64,
        gamma: f64,
    },
    Flat {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "two")]
        flat_length: f64,
    },
    CustomProfile {
        v: Vec<f64>,
        x: Vec<f64>,
        xp: Vec<f64>,
        zp: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default)]
    pub v_a: Option<f64>,
    #[serde(default)]
    pub v_b: Option<f64>,
    /// Indices of consecutive-zero labels; zero 0 is the largest curvature
    /// zero `≤ 0`.
    #[serde(default)]
    pub auto_zeros: Option<[i64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default = "default_cap")]
    pub m_max_cap: usize,
}

fn default_count() -> usize {
    10
}

fn default_cap() -> usize {
    DEFAULT_M_MAX_CAP
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            count: default_count(),
            target: None,
            m_max_cap: default_cap(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoConfig {
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
}

fn default_window() -> [f64; 2] {
    [-5.0, 10.0]
}

fn default_profile_points() -> usize {
    301
}

impl Default for InfoConfig {
    fn default() -> Self {
        Self {
            window: default_window(),
            profile_points: default_profile_points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Conformal,
    Tensor,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PsiConfig {
    Constant {
        value: f64,
    },
    /// `cos(mode·π(v − v_a)/L)`.
    Cosine {
        mode: u32,
        #[serde(default = "yes")]
        mean_zero: bool,
    },
    /// `Σ c_i v^i`.
    Polynomial {
        coeffs: Vec<f64>,
        #[serde(default = "yes")]
        mean_zero: bool,
    },
    Seeded {
        seed: u64,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TensorConfig {
    Zero,
    Metric,
    /// `h_uu = Σ uu_i v^i`, `h_vv = Σ vv_i v^i`.
    Polynomial {
        #[serde(default)]
        uu: Vec<f64>,
        #[serde(default)]
        vv: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "default_check_kind")]
    pub kind: CheckKind,
    #[serde(default = "default_check_k")]
    pub k: usize,
    #[serde(default = "default_psi")]
    pub psi: PsiConfig,
    #[serde(default = "default_h")]
    pub h: TensorConfig,
    #[serde(default = "default_steps")]
    pub steps: Vec<f64>,
}

fn default_check_kind() -> CheckKind {
    CheckKind::Conformal
}

fn default_check_k() -> usize {
    3
}

fn default_psi() -> PsiConfig {
    PsiConfig::Cosine {
        mode: 2,
        mean_zero: true,
    }
}

fn default_h() -> TensorConfig {
    TensorConfig::Polynomial {
        uu: vec![0.0, 1.0],
        vv: Vec::new(),
    }
}

fn default_steps() -> Vec<f64> {
    vec![1e-3, 5e-4]
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            kind: default_check_kind(),
            k: default_check_k(),
            psi: default_psi(),
            h: default_h(),
            steps: default_steps(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    /// Eigenvalue index whose cluster is certified.
    #[serde(default)]
    pub k: Option<usize>,
    /// Alternatively, the cluster nearest this value.
    #[serde(default)]
    pub cluster_value: Option<f64>,
    #[serde(default)]
    pub global: bool,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub certify_tol: Option<f64>,
}

fn default_max_iterations() -> usize {
    MAX_ITERATIONS
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            k: None,
            cluster_value: None,
            global: false,
            max_iterations: default_max_iterations(),
            certify_tol: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_scan_seeds")]
    pub seeds: usize,
}

fn default_scan_seeds() -> usize {
    3
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            t_grid: default_t_grid(),
            seeds: default_scan_seeds(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenfunctionConfig {
    #[serde(default = "default_eigen_k")]
    pub k: usize,
}

fn default_eigen_k() -> usize {
    1
}

impl Default for EigenfunctionConfig {
    fn default() -> Self {
        Self {
            k: default_eigen_k(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Everything derived from a validated configuration.
pub struct ResolvedJob {
    pub config: JobConfig,
    pub unduloid: Option<UnduloidSurface>,
    pub domain: AnnulusDomain,
    pub mesh: Mesh1D,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.mesh_n < crate::spectral::MIN_ELEMENTS {
            return Err(invalid(format!(
                "mesh_n must be at least {}",
                crate::spectral::MIN_ELEMENTS
            )));
        }
        if self.spectrum.count == 0 {
            return Err(invalid("spectrum.count must be at least 1"));
        }
        if let Some(t) = self.spectrum.target {
            if !t.is_finite() {
                return Err(invalid("spectrum.target must be finite"));
            }
        }
        if self.check.steps.is_empty() || self.check.steps.iter().any(|s| !(*s > 0.0)) {
            return Err(invalid("check.steps must be positive"));
        }
        let [lo, hi] = self.info.window;
        if !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("info.window must be finite"));
        }
        if self.info.profile_points < 2 {
            return Err(invalid("info.profile_points must be at least 2"));
        }
        if self.scan.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(invalid("scan.t_grid must be finite"));
        }
        if self.certificate.k.is_some() && self.certificate.cluster_value.is_some() {
            return Err(invalid(
                "certificate.k and certificate.cluster_value are mutually exclusive",
            ));
        }
        Ok(())
    }

    pub fn surface_profile(
        &self,
    ) -> Result<(Arc<dyn Profile>, Option<UnduloidSurface>), ConfigError> {
        match &self.surface {
            SurfaceConfig::Unduloid { alpha, gamma } => {
                let s = unduloid(*alpha, *gamma).map_err(|e| invalid(e.to_string()))?;
                Ok((Arc::new(s), Some(s)))
            }
            SurfaceConfig::Flat {
                radius,
                flat_length,
            } => {
                if !(*radius > 0.0) || !(*flat_length > 0.0) {
                    return Err(invalid("flat radius and flat_length must be positive"));
                }
                Ok((Arc::new(FlatCylinder { radius: *radius }), None))
            }
            SurfaceConfig::CustomProfile { v, x, xp, zp } => {
                let p = CustomProfile::from_samples(v.clone(), x.clone(), xp.clone(), zp.clone())
                    .map_err(|e| invalid(e.to_string()))?;
                Ok((Arc::new(p), None))
            }
        }
    }

    fn default_domain(&self) -> Result<DomainConfig, ConfigError> {
        match &self.surface {
            SurfaceConfig::Unduloid { .. } => Ok(DomainConfig {
                v_a: None,
                v_b: None,
                auto_zeros: Some([0, 1]),
            }),
            SurfaceConfig::Flat { flat_length, .. } => Ok(DomainConfig {
                v_a: Some(0.0),
                v_b: Some(*flat_length),
                auto_zeros: None,
            }),
            SurfaceConfig::CustomProfile { .. } => {
                Err(invalid("custom-profile surfaces need an explicit domain"))
            }
        }
    }

    /// Validates and builds the surface, domain and mesh; the returned
    /// config has the domain default filled in for echoing.
    pub fn resolve(mut self) -> Result<ResolvedJob, ConfigError> {
        self.validate()?;
        let (profile, und) = self.surface_profile()?;
        let domain_cfg = match self.domain.take() {
            Some(d) => d,
            None => self.default_domain()?,
        };
        let (v_a, v_b) = match (&domain_cfg.auto_zeros, domain_cfg.v_a, domain_cfg.v_b) {
            (Some([i, j]), None, None) => {
                let s = und
                    .as_ref()
                    .ok_or_else(|| invalid("domain.auto_zeros requires an unduloid surface"))?;
                if i >= j {
                    return Err(invalid("domain.auto_zeros needs index_a < index_b"));
                }
                (s.curvature_zero(*i), s.curvature_zero(*j))
            }
            (None, Some(a), Some(b)) => (a, b),
            _ => {
                return Err(invalid(
                    "domain needs either v_a and v_b or auto_zeros, not both",
                ))
            }
        };
        self.domain = Some(domain_cfg);
        let domain = make_domain(profile, v_a, v_b, self.bc, self.conformal_weight)
            .map_err(|e| invalid(e.to_string()))?;
        let mesh = Mesh1D::uniform(v_a, v_b, self.mesh_n).map_err(|e| invalid(e.to_string()))?;
        Ok(ResolvedJob {
            config: self,
            unduloid: und,
            domain,
            mesh,
        })
    }
}

impl PsiConfig {
    pub fn build(
        &self,
        mesh: &Mesh1D,
        samples: &MetricSamples,
    ) -> Result<ConformalPerturbation, crate::extremal::ExtremalError> {
        let (a, len) = (mesh.start(), mesh.end() - mesh.start());
        match self {
            PsiConfig::Constant { value } => Ok(ConformalPerturbation::constant(*value, mesh)),
            PsiConfig::Cosine { mode, mean_zero } => {
                let w = f64::from(*mode) * PI / len;
                ConformalPerturbation::from_fn(|v| (w * (v - a)).cos(), mesh, samples, *mean_zero)
            }
            PsiConfig::Polynomial { coeffs, mean_zero } => {
                ConformalPerturbation::from_fn(|v| polynomial(coeffs, v), mesh, samples, *mean_zero)
            }
            PsiConfig::Seeded { seed } => {
                ConformalPerturbation::seeded(SEED_BASE + seed, mesh, samples)
            }
        }
    }
}

impl TensorConfig {
    pub fn build(&self, samples: &MetricSamples) -> SampledTensor {
        match self {
            TensorConfig::Zero => TensorPerturbation::zero().sample(samples),
            TensorConfig::Metric => TensorPerturbation::metric(samples),
            TensorConfig::Polynomial { uu, vv } => {
                let (uu, vv) = (uu.clone(), vv.clone());
                TensorPerturbation::new(
                    move |v| polynomial(&uu, v),
                    move |v| polynomial(&vv, v),
                    "polynomial",
                )
                .sample(samples)
            }
        }
    }
}

fn polynomial(coeffs: &[f64], v: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * v + c)
}
