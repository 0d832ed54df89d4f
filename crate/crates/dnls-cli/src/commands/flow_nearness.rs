//! Flow-nearness experiment: the truncated flow at band N against the
//! best-resolved run (band N_ref) as a stand-in for the continuum flow.
//! For β = 0 the difference is exactly the propagated truncation of the
//! initial data.

use crate::config::FlowNearnessConfig;
use crate::tolerances::*;
use dnls_core::flows::{canonical_alpha, default_dt, evolve, ModelParams};
use dnls_core::report::{ExperimentReport, ReportRow, Verdict};
use dnls_core::spectral::{project, SpectralState, TAU};
use dnls_core::states::random_smooth_state;
use dnls_core::{Complex, Result};

pub fn cmd_flow_nearness(cfg: &FlowNearnessConfig, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("flow_nearness", seed);
    let alpha = cfg.alpha.unwrap_or_else(|| canonical_alpha(cfg.k, cfg.beta));
    let base = random_smooth_state(cfg.n_ref, cfg.mass, cfg.decay, seed, 0);

    // Reference: the largest-band run.
    let reference = {
        let params = ModelParams::new(cfg.beta, alpha, cfg.k, cfg.n_ref);
        let dt = if cfg.dt > 0.0 { cfg.dt } else { default_dt(cfg.n_ref) };
        evolve(&base, &params, cfg.t_final, dt)?
    };

    let mut last = f64::INFINITY;
    let mut monotone = true;
    for &n in &cfg.n_sweep {
        let params = ModelParams::new(cfg.beta, alpha, cfg.k, n);
        let dt = if cfg.dt > 0.0 { cfg.dt } else { default_dt(n) };
        let out = evolve(&project(&base, n), &params, cfg.t_final, dt)?;
        let d = out.l2_distance(&reference);
        report.push(ReportRow::info("nearness", "l2_distance", d).with_n(n as u64));
        monotone &= d < last;
        last = d;
    }
    report.push(ReportRow {
        section: "nearness".into(),
        label: "monotone_decay".into(),
        n: None,
        estimate: if monotone { 1.0 } else { 0.0 },
        stderr: None,
        tolerance: None,
        verdict: if monotone { Verdict::Pass } else { Verdict::Fail },
    });

    // β = 0: the difference is exactly the truncated tail of the data.
    {
        let n = cfg.n_sweep.first().copied().unwrap_or(8);
        let params_small = ModelParams::new(0.0, 0.0, cfg.k, n);
        let params_ref = ModelParams::new(0.0, 0.0, cfg.k, cfg.n_ref);
        let dt = if cfg.dt > 0.0 { cfg.dt } else { default_dt(cfg.n_ref) };
        let small = evolve(&project(&base, n), &params_small, cfg.t_final, dt)?;
        let full = evolve(&base, &params_ref, cfg.t_final, dt)?;
        let d = small.l2_distance(&full);
        let tail: f64 = base
            .modes()
            .filter(|(m, _)| m.unsigned_abs() as usize > n)
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>();
        let tail = (TAU * tail).sqrt();
        report.push(ReportRow::bounded(
            "linear",
            "distance_equals_tail",
            (d - tail).abs(),
            NEARNESS_LINEAR_TOL,
        ));
    }

    // A single mode is exact at every band that contains it.
    {
        let n = cfg.n_sweep.first().copied().unwrap_or(8);
        let wave = SpectralState::single_mode(n, 1, Complex::new(cfg.mass.sqrt(), 0.0));
        let params_small = ModelParams::new(cfg.beta, alpha, cfg.k, n);
        let params_ref = ModelParams::new(cfg.beta, alpha, cfg.k, cfg.n_ref);
        let dt = if cfg.dt > 0.0 { cfg.dt } else { default_dt(cfg.n_ref) };
        let a = evolve(&wave, &params_small, cfg.t_final, dt)?;
        let b = evolve(&project(&wave, cfg.n_ref), &params_ref, cfg.t_final, dt)?;
        report.push(ReportRow::bounded(
            "single_mode",
            "band_independence",
            a.l2_distance(&b),
            PLANE_WAVE_TOL,
        ));
    }

    Ok(report)
}
