//! Liouville experiment: the truncated vector field is divergence-free, so
//! its flow preserves phase-space volume. Checked two ways: the
//! finite-difference Jacobian trace (total and per term group) over random
//! states, and the log-volume drift of an evolved coordinate simplex.

use crate::config::LiouvilleConfig;
use crate::tolerances::*;
use dnls_core::flows::{
    canonical_alpha, default_dt, evolve, liouville_probe, liouville_trace_component, ModelParams,
    RhsTerm,
};
use dnls_core::linalg::determinant;
use dnls_core::report::{ExperimentReport, ReportRow};
use dnls_core::spectral::SpectralState;
use dnls_core::states::random_smooth_state;
use dnls_core::{Error, Result};
use rayon::prelude::*;

pub fn cmd_liouville(cfg: &LiouvilleConfig, seed: u64) -> Result<ExperimentReport> {
    if cfg.n > 8 {
        return Err(Error::InvalidArgument(format!(
            "liouville probes are limited to N <= 8, got {}",
            cfg.n
        )));
    }
    let mut report = ExperimentReport::new("liouville", seed);
    let alpha = cfg.alpha.unwrap_or_else(|| canonical_alpha(cfg.k, cfg.beta));
    let params = ModelParams::new(cfg.beta, alpha, cfg.k, cfg.n);

    // Free field: the trace vanishes up to finite-difference roundoff.
    {
        let free = ModelParams::new(0.0, 0.0, cfg.k, cfg.n);
        let f = random_smooth_state(cfg.n, cfg.mass, 0.2, seed, 1_000);
        let probe = liouville_probe(&f, &free, cfg.h);
        report.push(ReportRow::bounded(
            "linear",
            "scaled_trace",
            probe.trace.abs() / probe.frobenius.max(1.0),
            LIOUVILLE_TRACE_REL,
        ));
    }

    // Full field over random states: total and per-group scaled traces.
    let probes: Vec<(f64, [f64; 5], f64)> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|idx| {
            let f = random_smooth_state(cfg.n, cfg.mass, 0.2, seed, idx);
            let probe = liouville_probe(&f, &params, cfg.h);
            let mut groups = [0.0; 5];
            for (i, term) in RhsTerm::ALL.into_iter().enumerate() {
                groups[i] = liouville_trace_component(&f, &params, cfg.h, term);
            }
            (probe.trace, groups, probe.frobenius)
        })
        .collect();
    let mut worst_total = 0.0f64;
    let mut worst_group = [0.0f64; 5];
    for (trace, groups, frob) in &probes {
        let scale = frob.max(1.0);
        worst_total = worst_total.max(trace.abs() / scale);
        for i in 0..5 {
            worst_group[i] = worst_group[i].max(groups[i].abs() / scale);
        }
    }
    report.push(
        ReportRow::bounded("trace", "max_scaled_trace", worst_total, LIOUVILLE_TRACE_REL)
            .with_n(cfg.n as u64),
    );
    for (i, term) in RhsTerm::ALL.into_iter().enumerate() {
        report.push(ReportRow::bounded(
            "trace_groups",
            &format!("{term:?}"),
            worst_group[i],
            LIOUVILLE_TRACE_REL,
        ));
    }

    // Volume of an evolved coordinate simplex.
    {
        let dt = if cfg.dt > 0.0 { cfg.dt } else { default_dt(cfg.n) };
        let base = random_smooth_state(cfg.n, cfg.mass, 0.2, seed, 7_777);
        let dim = 2 * (2 * cfg.n + 1);
        let eps = cfg.eps_simplex;
        let evolve_one = |s: &SpectralState| evolve(s, &params, cfg.t_simplex, dt);
        let origin = evolve_one(&base)?;
        let columns: Vec<Vec<f64>> = (0..dim)
            .into_par_iter()
            .map(|coord| -> Result<Vec<f64>> {
                let mut vertex = base.clone();
                perturb(&mut vertex, coord, eps);
                let out = evolve_one(&vertex)?;
                Ok((0..dim)
                    .map(|row| (coord_of(&out, row) - coord_of(&origin, row)) / eps)
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut matrix = vec![0.0; dim * dim];
        for (col, column) in columns.iter().enumerate() {
            for row in 0..dim {
                matrix[row * dim + col] = column[row];
            }
        }
        let det = determinant(matrix, dim);
        let drift = det.abs().ln().abs();
        report.push(ReportRow::bounded("simplex", "log_volume_drift", drift, SIMPLEX_LOGVOL_TOL));
    }

    Ok(report)
}

fn perturb(state: &mut SpectralState, coord: usize, delta: f64) {
    let idx = coord / 2;
    let c = &mut state.coeffs_mut()[idx];
    if coord.is_multiple_of(2) {
        c.re += delta;
    } else {
        c.im += delta;
    }
}

fn coord_of(state: &SpectralState, coord: usize) -> f64 {
    let c = state.coeffs()[coord / 2];
    if coord.is_multiple_of(2) {
        c.re
    } else {
        c.im
    }
}
