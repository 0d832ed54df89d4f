//! Gauge experiment suite: group law, modulus/L² preservation, primitive
//! invariance, truncated-vs-exact convergence, divergence decay fit, and
//! the Jacobian determinant cross-checks.

use crate::config::GaugeSuiteConfig;
use crate::tolerances::*;
use dnls_core::fit::loglog_slope;
use dnls_core::gauge::{
    flow_jacobian_fd, gauge_apply, gauge_divergence, gauge_group_compose_check, gauge_logdet,
    gauge_truncated, primitive_i, GaugeFlowConfig,
};
use dnls_core::linalg::determinant;
use dnls_core::report::{ExperimentReport, ReportRow, Verdict};
use dnls_core::spectral::{
    homogeneous_sobolev_norm_sq, mass, project, NormConvention, SpectralState,
};
use dnls_core::states::{random_smooth_state, random_sobolev_state};
use dnls_core::{Complex, Result};
use rayon::prelude::*;

pub fn cmd_gauge_suite(cfg: &GaugeSuiteConfig, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("gauge_suite", seed);

    // Group law over the random suite.
    let residuals: Vec<f64> = (0..cfg.states as u64)
        .into_par_iter()
        .map(|idx| {
            let f = random_smooth_state(cfg.n, cfg.mass, 0.4, seed, idx);
            gauge_group_compose_check(&f, cfg.alpha1, cfg.alpha2)
        })
        .collect();
    let worst = residuals.iter().cloned().fold(0.0f64, f64::max);
    report.push(
        ReportRow::bounded("group_law", "max_residual", worst, GROUP_LAW_TOL)
            .with_n(cfg.states as u64),
    );

    // Modulus preservation and primitive invariance at 8x oversampling.
    let mut worst_modulus = 0.0f64;
    let mut worst_prim = 0.0f64;
    let out_band = 8 * cfg.n;
    for idx in 0..cfg.states.min(25) as u64 {
        let f = random_smooth_state(cfg.n, cfg.mass, 0.4, seed, 10_000 + idx);
        let image = gauge_apply(&f, cfg.alpha1, out_band);
        let m = 4 * out_band + 1;
        let before = f.grid_values(m);
        let after = image.state.grid_values(m);
        let defect = before
            .iter()
            .zip(after.iter())
            .map(|(b, a)| (b.norm() - a.norm()).abs())
            .fold(0.0f64, f64::max);
        worst_modulus = worst_modulus.max(defect);
        worst_prim = worst_prim.max(primitive_i(&f).l2_distance(&primitive_i(&image.state)));
    }
    report.push(ReportRow::bounded("modulus", "max_grid_defect", worst_modulus, MODULUS_TOL));
    report.push(ReportRow::bounded(
        "primitive",
        "max_invariance_defect",
        worst_prim,
        PRIMITIVE_INVARIANCE_TOL,
    ));

    // L² conservation of the truncated flow.
    {
        let f = random_smooth_state(cfg.n, cfg.mass, 0.4, seed, 20_000);
        let flow = GaugeFlowConfig::new(cfg.alpha1 + cfg.alpha2, cfg.n).with_tol(cfg.ode_tol);
        let out = gauge_truncated(&f, &flow)?;
        let defect = (mass(&out) - mass(&f)).abs();
        report.push(ReportRow::bounded(
            "truncated_flow",
            "mass_defect",
            defect,
            10.0 * cfg.ode_tol,
        ));
    }

    // Truncated flow approaches the exact gauge in L².
    {
        let base_band = cfg.flow_sweep.first().copied().unwrap_or(8);
        let f = random_smooth_state(base_band, cfg.mass.min(0.5), 0.5, seed, 30_000);
        let alpha = 0.8;
        let reference = gauge_apply(&f, alpha, 8 * cfg.flow_sweep.last().unwrap_or(&64)).state;
        let mut last = f64::INFINITY;
        let mut monotone = true;
        for &n in &cfg.flow_sweep {
            let flow = GaugeFlowConfig::new(alpha, n).with_tol(cfg.ode_tol);
            let truncated = gauge_truncated(&f, &flow)?;
            let d = truncated.l2_distance(&reference);
            report.push(ReportRow::info("truncated_vs_exact", "l2_distance", d).with_n(n as u64));
            monotone &= d <= last * 1.1;
            last = d;
        }
        report.push(ReportRow {
            section: "truncated_vs_exact".into(),
            label: "decay_monotone".into(),
            n: None,
            estimate: if monotone { 1.0 } else { 0.0 },
            stderr: None,
            tolerance: None,
            verdict: if monotone { Verdict::Pass } else { Verdict::Fail },
        });
    }

    // Divergence: exact single-mode value and the decay fit.
    {
        let e1 = SpectralState::single_mode(1, 1, Complex::new(1.0, 0.0));
        let got = gauge_divergence(&e1, 2);
        report.push(ReportRow::bounded(
            "divergence",
            "single_mode_exact",
            (got + 5.0 / 3.0).abs(),
            DIVERGENCE_EXACT_TOL,
        ));

        let max_band = cfg.div_sweep.last().copied().unwrap_or(1024);
        let f = random_sobolev_state(max_band, 2.0, 1.75, seed, 40_000);
        let mut points = Vec::new();
        for &n in &cfg.div_sweep {
            let d = gauge_divergence(&project(&f, n), n).abs();
            report.push(ReportRow::info("divergence", "abs_value", d).with_n(n as u64));
            points.push((n as f64, d, 0.0));
        }
        let fit = loglog_slope(&points)?;
        report.push(ReportRow::bounded(
            "divergence",
            "loglog_slope",
            fit.slope,
            DIVERGENCE_SLOPE_MAX,
        ));
    }

    // Jacobian determinant against finite differences at a tiny band.
    {
        let n = cfg.fd_band.min(4);
        let f = random_smooth_state(n, 0.4, 0.3, seed, 50_000);
        let flow = GaugeFlowConfig::new(0.6, n).with_tol(1e-12);
        let logdet = gauge_logdet(&f, &flow)?;
        let jac = flow_jacobian_fd(&f, &flow, 1e-5)?;
        let dim = 2 * (2 * n + 1);
        let det_fd = determinant(jac, dim);
        let rel = (logdet.exp() - det_fd).abs() / det_fd.abs().max(1e-300);
        report.push(
            ReportRow::bounded("logdet", "fd_relative_error", rel, LOGDET_FD_REL)
                .with_n(n as u64),
        );
    }

    // det -> 1 monotonically along the band sweep.
    {
        let max_band = cfg.flow_sweep.last().copied().unwrap_or(128);
        let f = random_sobolev_state(max_band, 1.5, 1.75, seed, 60_000);
        let mut last = f64::INFINITY;
        let mut monotone = true;
        for &n in &cfg.flow_sweep {
            let flow = GaugeFlowConfig::new(0.5, n).with_tol(cfg.ode_tol);
            let logdet = gauge_logdet(&project(&f, n), &flow)?;
            let defect = (logdet.exp() - 1.0).abs();
            report.push(ReportRow::info("det_to_one", "abs_det_minus_one", defect).with_n(n as u64));
            monotone &= defect <= last * 1.05;
            last = defect;
        }
        report.push(ReportRow {
            section: "det_to_one".into(),
            label: "decay_monotone".into(),
            n: None,
            estimate: if monotone { 1.0 } else { 0.0 },
            stderr: None,
            tolerance: None,
            verdict: if monotone { Verdict::Pass } else { Verdict::Fail },
        });
    }

    // H¹ growth bound with a single fitted constant.
    {
        let mut worst_ratio = 0.0f64;
        for idx in 0..cfg.h1_states as u64 {
            let f = random_smooth_state(cfg.n, cfg.mass.min(0.8), 0.3, seed, 70_000 + idx);
            let mu = mass(&f);
            let h1_0 = homogeneous_sobolev_norm_sq(&f, 1.0, NormConvention::Physical);
            for &alpha in &[0.5, 1.0, 2.0] {
                let flow = GaugeFlowConfig::new(alpha, cfg.n).with_tol(1e-9);
                let g = gauge_truncated(&f, &flow)?;
                let h1 = homogeneous_sobolev_norm_sq(&g, 1.0, NormConvention::Physical);
                worst_ratio = worst_ratio.max(h1 / ((alpha * mu).exp() * (h1_0 + mu)));
            }
        }
        report.push(ReportRow::bounded(
            "h1_growth",
            "fitted_constant",
            worst_ratio,
            H1_GROWTH_FITTED_C,
        ));
    }

    Ok(report)
}
