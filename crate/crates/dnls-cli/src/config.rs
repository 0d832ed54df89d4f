//! Declarative experiment configuration: one TOML file with a table per
//! command plus global keys, command-line flags winning over file values.

use dnls_core::measures::VarianceConvention;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub workers: Option<usize>,
    pub conservation: ConservationConfig,
    pub liouville: LiouvilleConfig,
    pub gauge_suite: GaugeSuiteConfig,
    pub decay_scan: DecayScanConfig,
    pub invariance: InvarianceConfig,
    pub flow_nearness: FlowNearnessConfig,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

fn default_dt_marker() -> f64 {
    0.0 // 0 = use the band-dependent default step
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConservationConfig {
    pub n: usize,
    pub t_final: f64,
    #[serde(default = "default_dt_marker")]
    pub dt: f64,
    pub beta: f64,
    /// Explicit gauge parameter; `None` selects the canonical choice.
    pub alpha: Option<f64>,
    pub k: u32,
    pub mass: f64,
    pub decay: f64,
    /// Number of trajectory sample times used for the drift maxima.
    pub samples: usize,
    /// Extra (α, β) pairs exercised for the mass-drift section.
    pub extra_pairs: Vec<[f64; 2]>,
    /// Optional JSONL trajectory dump (one record per sample time).
    pub dump_trajectory: Option<PathBuf>,
    /// Optional CSV energy table (t, E0..E2, gauged, Q2, tQ2).
    pub dump_energies: Option<PathBuf>,
}

impl Default for ConservationConfig {
    fn default() -> Self {
        Self {
            n: 128,
            t_final: 1.0,
            dt: 0.0,
            beta: 1.0,
            alpha: None,
            k: 2,
            mass: 0.05,
            decay: 0.35,
            samples: 8,
            extra_pairs: vec![[2.0, 2.0], [-2.0, -2.0], [-1.3, 0.8]],
            dump_trajectory: None,
            dump_energies: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiouvilleConfig {
    pub n: usize,
    pub samples: usize,
    pub beta: f64,
    pub alpha: Option<f64>,
    pub k: u32,
    pub mass: f64,
    pub h: f64,
    pub t_simplex: f64,
    pub eps_simplex: f64,
    #[serde(default = "default_dt_marker")]
    pub dt: f64,
}

impl Default for LiouvilleConfig {
    fn default() -> Self {
        Self {
            n: 4,
            samples: 50,
            beta: 1.0,
            alpha: None,
            k: 2,
            mass: 0.7,
            h: 1e-4,
            t_simplex: 0.5,
            eps_simplex: 1e-6,
            dt: 0.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaugeSuiteConfig {
    pub n: usize,
    pub states: usize,
    pub mass: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Bands for the truncated-vs-exact and determinant sweeps.
    pub flow_sweep: Vec<usize>,
    /// Bands for the divergence decay fit.
    pub div_sweep: Vec<usize>,
    pub ode_tol: f64,
    /// Band of the finite-difference Jacobian cross-check (kept tiny).
    pub fd_band: usize,
    pub h1_states: usize,
}

impl Default for GaugeSuiteConfig {
    fn default() -> Self {
        Self {
            n: 16,
            states: 100,
            mass: 1.0,
            alpha1: 0.3,
            alpha2: -0.7,
            flow_sweep: vec![8, 16, 32, 64, 128],
            div_sweep: vec![16, 32, 64, 128, 256, 512, 1024],
            ode_tol: 1e-10,
            fd_band: 3,
            h1_states: 12,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayScanConfig {
    pub k: u32,
    pub beta: f64,
    /// Integer functional indices scanned (subset of {0, 1, 2}).
    pub ells: Vec<u32>,
    pub n_sweep: Vec<usize>,
    pub m_samples: usize,
    /// Mass bound of the restricted sampling measure, calibrated so the
    /// Wick-convention rejection stays above the starvation threshold.
    pub r0_restrict: f64,
    pub convention: VarianceConvention,
}

impl Default for DecayScanConfig {
    fn default() -> Self {
        Self {
            k: 2,
            beta: 1.0,
            ells: vec![0, 1, 2],
            n_sweep: vec![8, 16, 32, 64],
            m_samples: 2000,
            r0_restrict: 0.5,
            convention: VarianceConvention::Wick,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InvarianceConfig {
    pub k: u32,
    pub beta: f64,
    pub n_sweep: Vec<usize>,
    pub m_samples: usize,
    pub t_final: f64,
    /// Fixed step; 0 selects the band-dependent default `0.5/N²` (capped at
    /// 1e-3), which keeps the conserved-functional drift at the integrator
    /// floor for every band in the sweep.
    #[serde(default = "default_dt_marker")]
    pub dt: f64,
    pub r0_restrict: f64,
    pub radii: Vec<f64>,
    /// Optional JSONL dump of the initial ensemble at the largest band.
    pub dump_ensemble: Option<PathBuf>,
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        Self {
            k: 2,
            beta: 1.0,
            n_sweep: vec![16, 32, 64],
            m_samples: 2000,
            t_final: 1.0,
            dt: 0.0,
            r0_restrict: 0.1,
            radii: vec![1.0, 20.0],
            dump_ensemble: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowNearnessConfig {
    pub n_sweep: Vec<usize>,
    pub n_ref: usize,
    pub beta: f64,
    pub alpha: Option<f64>,
    pub k: u32,
    pub t_final: f64,
    #[serde(default = "default_dt_marker")]
    pub dt: f64,
    pub mass: f64,
    pub decay: f64,
}

impl Default for FlowNearnessConfig {
    fn default() -> Self {
        Self {
            n_sweep: vec![8, 16, 32],
            n_ref: 64,
            beta: 1.0,
            alpha: None,
            k: 2,
            t_final: 0.5,
            dt: 0.0,
            mass: 0.05,
            decay: 0.5,
        }
    }
}
