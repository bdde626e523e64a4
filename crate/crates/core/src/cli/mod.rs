//! Command-line front end.
//!
//! Every command reads one JSON job configuration, writes its report into
//! the output directory and echoes the fully resolved configuration.

pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::extremal::{
    conformal_derivative_check, extremal_certificate, extremality_scan,
    global_feasibility_residual, normalized_eigenvalue, tensor_derivative_check, verify_conditions,
    CertificateOptions, CertificateResult, CertificateStatus, ConditionReport,
    ConformalPerturbation, DerivativeReport, ExtremalError, ScanReport, SEED_BASE,
};
use crate::report::{write_csv, write_json};
use crate::revolution::{profile_sample, BoundaryCondition, ConformalWeight};
use crate::spectral::{
    spectrum_with, MetricSamples, Parity, SpectralError, Spectrum, SpectrumOptions,
};
use config::{CheckKind, JobConfig, ResolvedJob};

pub const THREADS_ENV: &str = "EXTREMAL_SPECTRA_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

const FD_REL_TOL: f64 = 1e-4;
const RICHARDSON_REL_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "extremal-spectra",
    version,
    about = "Spectra and extremality certificates on annuli of revolution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Job configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for reports.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads, 0 for automatic. Overrides EXTREMAL_SPECTRA_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Unduloid parameters, curvature zeros in a window and a profile CSV.
    UnduloidInfo,
    /// Merged Laplace–Beltrami spectrum.
    Spectrum,
    /// Certificate, a posteriori conditions and conformal scans for one cluster.
    VerifyExtremal,
    /// Finite-difference check of an eigenvalue derivative formula.
    DerivativeCheck,
    /// Conformal or global PSD certificate for one cluster.
    Certificate,
    /// Profile samples over the domain as CSV.
    ExportProfile,
    /// Radial factor of one eigenfunction as CSV.
    ExportEigenfunction,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::UnduloidInfo => "unduloid-info",
            Command::Spectrum => "spectrum",
            Command::VerifyExtremal => "verify-extremal",
            Command::DerivativeCheck => "derivative-check",
            Command::Certificate => "certificate",
            Command::ExportProfile => "export-profile",
            Command::ExportEigenfunction => "export-eigenfunction",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("spectrum incomplete: {0}")]
    Incomplete(String),
    #[error("certificate inconclusive")]
    Inconclusive,
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Incomplete(_) => EXIT_INCOMPLETE,
            CliError::Inconclusive => EXIT_INCONCLUSIVE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<ExtremalError> for CliError {
    fn from(e: ExtremalError) -> Self {
        match e {
            ExtremalError::Precondition(_) | ExtremalError::IndexOutOfRange { .. } => {
                CliError::Config(e.to_string())
            }
            ExtremalError::Spectral(s) => s.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Mesh(_)
            | SpectralError::InsufficientMesh { .. }
            | SpectralError::Count { .. } => CliError::Config(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Internal(format!("{}: {e}", path.display()))
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("extremal-spectra: {e}");
            e.exit_code()
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Config(format!(
                "{THREADS_ENV} must be a nonnegative integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config = JobConfig::from_json(&text).map_err(|e| CliError::Config(e.0))?;
    let job = config.resolve().map_err(|e| CliError::Config(e.0))?;
    std::fs::create_dir_all(&cli.out).map_err(|e| io_error(&cli.out, e))?;
    let threads = thread_count(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::UnduloidInfo => cmd_unduloid_info(&job, &cli.out),
        Command::Spectrum => cmd_spectrum(&job, &cli.out),
        Command::VerifyExtremal => cmd_verify_extremal(&job, &cli.out),
        Command::DerivativeCheck => cmd_derivative_check(&job, &cli.out),
        Command::Certificate => cmd_certificate(&job, &cli.out),
        Command::ExportProfile => cmd_export_profile(&job, &cli.out),
        Command::ExportEigenfunction => cmd_export_eigenfunction(&job, &cli.out),
    })
}

#[derive(Debug, Serialize)]
struct DomainReport {
    surface: &'static str,
    v_a: f64,
    v_b: f64,
    length: f64,
    bc: BoundaryCondition,
    conformal_weight: ConformalWeight,
    neumann_compatible: bool,
    mesh_n: usize,
    h: f64,
}

fn domain_report(job: &ResolvedJob) -> DomainReport {
    DomainReport {
        surface: job.domain.profile.kind(),
        v_a: job.domain.v_a,
        v_b: job.domain.v_b,
        length: job.domain.length(),
        bc: job.domain.bc,
        conformal_weight: job.domain.weight,
        neumann_compatible: job.domain.neumann_compatible,
        mesh_n: job.mesh.n_elements(),
        h: job.mesh.max_h(),
    }
}

const PROFILE_HEADER: [&str; 8] = ["v", "x", "z", "k1", "k2", "rho", "n_rad", "n_axial"];

fn profile_rows(job: &ResolvedJob, lo: f64, hi: f64, points: usize) -> Vec<Vec<f64>> {
    if !(lo < hi) {
        return Vec::new();
    }
    (0..points)
        .map(|i| {
            let v = if i + 1 == points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (points - 1) as f64
            };
            let p = profile_sample(&*job.domain.profile, v);
            vec![p.v, p.x, p.z, p.k1, p.k2, p.rho, p.n_rad, p.n_axial]
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct UnduloidInfoReport<'a> {
    command: &'static str,
    config: &'a JobConfig,
    surface: &'a crate::revolution::UnduloidSurface,
    window: [f64; 2],
    /// Zero `0` is the largest curvature zero `≤ 0`; labels increase with `v`.
    zero_labels: Vec<i64>,
    zeros: Vec<f64>,
    profile_csv: String,
}

fn cmd_unduloid_info(job: &ResolvedJob, out: &Path) -> Result<String, CliError> {
    let s = job
        .unduloid
        .as_ref()
        .ok_or_else(|| CliError::Config("unduloid-info needs an unduloid surface".into()))?;
    let [lo, hi] = job.config.info.window;
    let zeros = if lo < hi {
        crate::revolution::curvature_zeros(s, lo, hi)
    } else {
        Vec::new()
    };
    let labels = zeros.iter().map(|&z| zero_label(s, z)).collect();
    let csv_path = out.join("unduloid_profile.csv");
    let rows = profile_rows(job, lo, hi, job.config.info.profile_points);
    write_csv(&csv_path, &PROFILE_HEADER, &rows).map_err(|e| io_error(&csv_path, e))?;
    let report = UnduloidInfoReport {
        command: Command::UnduloidInfo.name(),
        config: &job.config,
        surface: s,
        window: [lo, hi],
        zero_labels: labels,
        zeros,
        profile_csv: "unduloid_profile.csv".into(),
    };
    let path = out.join("unduloid_info.json");
    write_json(&path, &report).map_err(|e| io_error(&path, e))?;
    Ok(format!(
        "wrote {} ({} zeros)",
        path.display(),
        report.zeros.len()
    ))
}

fn zero_label(s: &crate::revolution::UnduloidSurface, z: f64) -> i64 {
    let guess = (2.0 * z / s.period).round() as i64;
    (guess - 3..=guess + 3)
        .min_by(|a, b| {
            (s.curvature_zero(*a) - z)
                .abs()
                .total_cmp(&(s.curvature_zero(*b) - z).abs())
        })
        .unwrap_or(guess)
}

#[derive(Debug, Serialize)]
struct EntryReport {
    position: usize,
    index: usize,
    value: f64,
    m: usize,
    parity: Parity,
    index_in_block: usize,
}

#[derive(Debug, Serialize)]
struct ClusterReport {
    range: [usize; 2],
    indices: Vec<usize>,
    size: usize,
    mean: f64,
    spread: f64,
}

#[derive(Debug, Serialize)]
struct SpectrumSection {
    bc: BoundaryCondition,
    mesh_size: usize,
    m_max: usize,
    volume: f64,
    entries: Vec<EntryReport>,
    clusters: Vec<[usize; 2]>,
}

fn spectrum_section(s: &Spectrum) -> SpectrumSection {
    SpectrumSection {
        bc: s.bc,
        mesh_size: s.mesh.n_elements(),
        m_max: s.m_max,
        volume: s.volume,
        entries: s
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| EntryReport {
                position: i,
                index: s.index_of_position(i),
                value: e.value,
                m: e.m,
                parity: e.parity,
                index_in_block: e.index_in_block,
            })
            .collect(),
        clusters: s.clusters.iter().map(|&(a, b)| [a, b]).collect(),
    }
}

fn cluster_report(s: &Spectrum, c: (usize, usize)) -> ClusterReport {
    let values: Vec<f64> = s.cluster_pairs(c).iter().map(|e| e.value).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().copied().fold(f64::INFINITY, f64::min);
    ClusterReport {
        range: [c.0, c.1],
        indices: (c.0..=c.1).map(|p| s.index_of_position(p)).collect(),
        size: c.1 - c.0 + 1,
        mean,
        spread,
    }
}

#[derive(Debug, Serialize)]
struct SpectrumReport<'a> {
    command: &'static str,
    config: &'a JobConfig,
    domain: DomainReport,
    complete: bool,
    warning: Option<String>,
    spectrum: SpectrumSection,
    target: Option<f64>,
    target_cluster: Option<ClusterReport>,
}

fn options(job: &ResolvedJob) -> SpectrumOptions {
    SpectrumOptions {
        m_max_cap: job.config.spectrum.m_max_cap,
    }
}

fn cmd_spectrum(job: &ResolvedJob, out: &Path) -> Result<String, CliError> {
    let samples = MetricSamples::new(&job.domain, &job.mesh);
    let count = job.config.spectrum.count;
    let (spectrum, warning) =
        match spectrum_with(&samples, &job.mesh, job.domain.bc, count, options(job)) {
            Ok(s) => (s, None),
            Err(SpectralError::IncompleteSpectrum { cap, partial }) => (
                *partial,
                Some(format!(
                    "angular modes above the cap m_max = {cap} may contribute; entries are a partial spectrum"
                )),
            ),
            Err(e) => return Err(e.into()),
        };
    let target = job.config.spectrum.target;
    let report = SpectrumReport {
        command: Command::Spectrum.name(),
        config: &job.config,
        domain: domain_report(job),
        complete: warning.is_none(),
        warning: warning.clone(),
        target_cluster: target
            .and_then(|t| spectrum.nearest_cluster(t))
            .map(|c| cluster_report(&spectrum, c)),
        target,
        spectrum: spectrum_section(&spectrum),
    };
    let path = out.join("spectrum.json");
    write_json(&path, &report).map_err(|e| io_error(&path, e))?;
    match warning {
        Some(w) => Err(CliError::Incomplete(format!(
            "{w} (report: {})",
            path.display()
        ))),
        None => Ok(format!("wrote {}", path.display())),
    }
}

/// Spectrum large enough to contain the whole selected cluster.
fn select_cluster(job: &ResolvedJob) -> Result<(Spectrum, (usize, usize)), CliError> {
    let samples = MetricSamples::new(&job.domain, &job.mesh);
    let cert = &job.config.certificate;
    let k = cert.k.unwrap_or(1);
    let min_pos = match job.domain.bc {
        BoundaryCondition::Neumann => k,
        BoundaryCondition::Dirichlet => k
            .checked_sub(1)
            .ok_or_else(|| CliError::Config("Dirichlet eigenvalues are indexed from 1".into()))?,
    };
    let mut count = job.config.spectrum.count.max(min_pos + 2);
    let max_count = job.mesh.n_nodes();
    loop {
        let s = spectrum_with(&samples, &job.mesh, job.domain.bc, count, options(job))?;
        let cluster = match cert.cluster_value {
            Some(v) => s.nearest_cluster(v),
            None => s.position(k).and_then(|p| s.cluster_containing(p)),
        }
        .ok_or_else(|| CliError::Config("no eigenvalue cluster matches the selection".into()))?;
        if cluster.1 + 1 < s.entries.len() || count >= max_count {
            return Ok((s, cluster));
        }
        count += 4;
    }
}

#[derive(Debug, Serialize)]
struct BasisEntry {
    value: f64,
    m: usize,
    parity: Parity,
    index_in_block: usize,
}

#[derive(Debug, Serialize)]
struct CertificateReport {
    kind: crate::extremal::CertificateKind,
    value: f64,
    dim: usize,
    basis: Vec<BasisEntry>,
    s: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
    residual: f64,
    lower_bound: f64,
    certify_tol: f64,
    refute_tol: f64,
    status: CertificateStatus,
    iterations: usize,
    converged: bool,
    monotone: bool,
    min_eigenvalue: f64,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn certificate_report(r: &CertificateResult) -> CertificateReport {
    CertificateReport {
        kind: r.kind,
        value: r.value,
        dim: r.combination.dim(),
        basis: r
            .combination
            .basis
            .iter()
            .map(|e| BasisEntry {
                value: e.value,
                m: e.m,
                parity: e.parity,
                index_in_block: e.index_in_block,
            })
            .collect(),
        s: rows(&r.s),
        weights: rows(&r.combination.weights),
        residual: r.residual,
        lower_bound: r.lower_bound,
        certify_tol: r.certify_tol,
        refute_tol: r.refute_tol,
        status: r.status,
        iterations: r.iterations,
        converged: r.converged,
        monotone: r.monotone,
        min_eigenvalue: r.min_eigenvalue,
    }
}

fn cert_options(job: &ResolvedJob) -> CertificateOptions {
    CertificateOptions {
        max_iterations: job.config.certificate.max_iterations,
        certify_tol: job.config.certificate.certify_tol,
    }
}

#[derive(Debug, Serialize)]
struct SeededScan {
    seed: u64,
    #[serde(flatten)]
    scan: ScanReport,
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    command: &'static str,
    config: &'a JobConfig,
    domain: DomainReport,
    spectrum: SpectrumSection,
    cluster: ClusterReport,
    normalized_eigenvalue: f64,
    certificate: CertificateReport,
    conditions: Option<ConditionReport>,
    global_feasibility: CertificateReport,
    scans: Vec<SeededScan>,
    scans_consistent_max: bool,
    status: CertificateStatus,
}

fn cmd_verify_extremal(job: &ResolvedJob, out: &Path) -> Result<String, CliError> {
    let (spectrum, cluster) = select_cluster(job)?;
    let basis = spectrum.cluster_pairs(cluster);
    let info = cluster_report(&spectrum, cluster);
    if !(info.mean > 0.0) {
        return Err(CliError::Config(
            "the selected cluster has eigenvalue 0; choose a positive eigenvalue".into(),
        ));
    }
    let samples = MetricSamples::new(&job.domain, &job.mesh);
    let cert = extremal_certificate(basis, info.mean, &job.mesh, &samples, cert_options(job))?;
    let conditions = match cert.status {
        CertificateStatus::Certified => Some(verify_conditions(
            &cert.combination,
            &job.domain,
            &job.mesh,
            info.mean,
        )?),
        _ => None,
    };
    let global =
        global_feasibility_residual(basis, info.mean, &job.mesh, &samples, cert_options(job))?;
    let k_scan = spectrum.index_of_position(cluster.0);
    let mut scans = Vec::with_capacity(job.config.scan.seeds);
    for i in 0..job.config.scan.seeds as u64 {
        let seed = SEED_BASE + i;
        let psi = ConformalPerturbation::seeded(seed, &job.mesh, &samples)?;
        let scan = extremality_scan(
            &job.domain,
            &job.mesh,
            k_scan,
            &psi,
            &job.config.scan.t_grid,
        )?;
        scans.push(SeededScan { seed, scan });
    }
    let status = cert.status;
    let report = VerifyReport {
        command: Command::VerifyExtremal.name(),
        config: &job.config,
        domain: domain_report(job),
        spectrum: spectrum_section(&spectrum),
        normalized_eigenvalue: normalized_eigenvalue(&spectrum, k_scan)?,
        cluster: info,
        certificate: certificate_report(&cert),
        conditions,
        global_feasibility: certificate_report(&global),
        scans_consistent_max: scans.iter().all(|s| s.scan.consistent_max),
        scans,
        status,
    };
    let path = out.join("verify_extremal.json");
    write_json(&path, &report).map_err(|e| io_error(&path, e))?;
    match status {
        CertificateStatus::Inconclusive => Err(CliError::Inconclusive),
        s => Ok(format!(
            "wrote {} (status: {})",
            path.display(),
            status_name(s)
        )),
    }
}

fn status_name(s: CertificateStatus) -> &'static str {
    match s {
        CertificateStatus::Certified => "certified",
        CertificateStatus::Refuted => "refuted",
        CertificateStatus::Inconclusive => "inconclusive",
    }
}

#[derive(Debug, Serialize)]
struct Tolerances {
    fd_rel: f64,
    richardson_rel: f64,
}

#[derive(Debug, Serialize)]
struct DerivativeCheckReport<'a> {
    command: &'static str,
    config: &'a JobConfig,
    domain: DomainReport,
    check: DerivativeReport,
    tolerances: Tolerances,
    pass: bool,
}

fn cmd_derivative_check(job: &ResolvedJob, out: &Path) -> Result<String, CliError> {
    let samples = MetricSamples::new(&job.domain, &job.mesh);
    let c = &job.config.check;
    let check = match c.kind {
        CheckKind::Conformal => {
            let psi = c.psi.build(&job.mesh, &samples)?;
            conformal_derivative_check(&job.domain, &job.mesh, c.k, &psi, &c.steps)?
        }
        CheckKind::Tensor => {
            let h = c.h.build(&samples);
            tensor_derivative_check(&job.domain, &job.mesh, c.k, &h, &c.steps)?
        }
    };
    let pass = check.steps[0].rel_error <= FD_REL_TOL
        && check
            .richardson_rel_error
            .is_none_or(|r| r <= RICHARDSON_REL_TOL);
    let report = DerivativeCheckReport {
        command: Command::DerivativeCheck.name(),
        config: &job.config,
        domain: domain_report(job),
        check,
        tolerances: Tolerances {
            fd_rel: FD_REL_TOL,
            richardson_rel: RICHARDSON_REL_TOL,
        },
        pass,
    };
    let path = out.join("derivative_check.json");
    write_json(&path, &report).map_err(|e| io_error(&path, e))?;
    Ok(format!("wrote {} (pass: {pass})", path.display()))
}

#[derive(Debug, Serialize)]
struct CertificateCommandReport<'a> {
    command: &'static str,
    config: &'a JobConfig,
    domain: DomainReport,
    cluster: ClusterReport,
    certificate: CertificateReport,
}

fn cmd_certificate(job: &ResolvedJob, out: &Path) -> Result<String, CliError> {
    let (spectrum, cluster) = select_cluster(job)?;
    let basis = spectrum.cluster_pairs(cluster);
    let info = cluster_report(&spectrum, cluster);
    let samples = MetricSamples::new(&job.domain, &job.mesh);
    let result = if job.config.certificate.global {
        global_feasibility_residual(basis, info.mean, &job.mesh, &samples, cert_options(job))?
    } else {
        extremal_certificate(basis, info.mean, &job.mesh, &samples, cert_options(job))?
    };
    let report = CertificateCommandReport {
        command: Command::Certificate.name(),
        config: &job.config,
        domain: domain_report(job),
        cluster: info,
        certificate: certificate_report(&result),
    };
    let path = out.join("certificate.json");
    write_json(&path, &report).map_err(|e| io_error(&path, e))?;
    match result.status {
        CertificateStatus::Inconclusive => Err(CliError::Inconclusive),
        s => Ok(format!(
            "wrote {} (status: {})",
            path.display(),
            status_name(s)
        )),
    }
}

fn cmd_export_profile(job: &ResolvedJob, out: &Path) -> Result<String, CliError> {
    let rows = profile_rows(
        job,
        job.domain.v_a,
        job.domain.v_b,
        job.config.info.profile_points,
    );
    let path = out.join("profile.csv");
    write_csv(&path, &PROFILE_HEADER, &rows).map_err(|e| io_error(&path, e))?;
    Ok(format!("wrote {} ({} rows)", path.display(), rows.len()))
}

fn cmd_export_eigenfunction(job: &ResolvedJob, out: &Path) -> Result<String, CliError> {
    let k = job.config.eigenfunction.k;
    let pos = match job.domain.bc {
        BoundaryCondition::Neumann => k,
        BoundaryCondition::Dirichlet => k
            .checked_sub(1)
            .ok_or_else(|| CliError::Config("Dirichlet eigenvalues are indexed from 1".into()))?,
    };
    let samples = MetricSamples::new(&job.domain, &job.mesh);
    let count = job.config.spectrum.count.max(pos + 1);
    let s = spectrum_with(&samples, &job.mesh, job.domain.bc, count, options(job))?;
    let e = s
        .entry_for_index(k)
        .ok_or_else(|| CliError::Config(format!("eigenvalue index {k} out of range")))?;
    let rows: Vec<Vec<f64>> = job
        .mesh
        .nodes()
        .iter()
        .zip(&e.coeffs)
        .map(|(v, a)| vec![*v, *a])
        .collect();
    let path = out.join("eigenfunction.csv");
    write_csv(&path, &["v", "a"], &rows).map_err(|e| io_error(&path, e))?;
    Ok(format!(
        "wrote {} (value {:.10}, m = {}, index in block {})",
        path.display(),
        e.value,
        e.m,
        e.index_in_block
    ))
}
