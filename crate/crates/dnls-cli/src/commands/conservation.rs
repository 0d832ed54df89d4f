//! Conservation experiment: drift of the mass and of the conserved
//! functionals along the truncated flow, for the free case, a plane wave,
//! and smooth random data in both the ungauged and gauged flows.

use crate::config::ConservationConfig;
use crate::observables::{
    write_energy_table_csv, write_trajectory_jsonl, EnergyTableRow, TrajectoryRecord,
};
use crate::tolerances::*;
use dnls_core::flows::{canonical_alpha, default_dt, evolve_observed, ModelParams};
use dnls_core::invariants::{gauged_energy, EnergyIndex};
use dnls_core::report::{ExperimentReport, ReportRow};
use dnls_core::spectral::{mass, SpectralState};
use dnls_core::states::random_smooth_state;
use dnls_core::{Complex, Result};

struct DriftTracker {
    params: ModelParams,
    t_samples: Vec<f64>,
    initial: Option<(f64, [f64; 5])>,
    max_mass_drift: f64,
    max_rel_energy_drift: [f64; 5],
}

impl DriftTracker {
    fn new(params: ModelParams, t_final: f64, samples: usize) -> Self {
        let t_samples = (0..=samples)
            .map(|i| t_final * i as f64 / samples.max(1) as f64)
            .collect();
        Self {
            params,
            t_samples,
            initial: None,
            max_mass_drift: 0.0,
            max_rel_energy_drift: [0.0; 5],
        }
    }

    fn wants(&self, t: f64) -> bool {
        self.t_samples
            .iter()
            .any(|&ts| (t - ts).abs() < 1e-12 * (1.0 + ts.abs()))
    }

    fn observe(&mut self, state: &SpectralState) -> Result<()> {
        let m = mass(state);
        let mut e = [0.0; 5];
        for (i, ell) in EnergyIndex::ALL.into_iter().enumerate() {
            e[i] = gauged_energy(state, ell, self.params.alpha, self.params.beta)?;
        }
        match &self.initial {
            None => self.initial = Some((m, e)),
            Some((m0, e0)) => {
                self.max_mass_drift = self.max_mass_drift.max((m - m0).abs());
                for i in 0..5 {
                    let rel = (e[i] - e0[i]).abs() / (1.0 + e0[i].abs());
                    self.max_rel_energy_drift[i] = self.max_rel_energy_drift[i].max(rel);
                }
            }
        }
        Ok(())
    }
}

struct DriftRun {
    t_final: f64,
    dt: f64,
    samples: usize,
    mass_tol: f64,
    energy_tol: f64,
}

fn run_drift_section(
    report: &mut ExperimentReport,
    section: &str,
    state: &SpectralState,
    params: &ModelParams,
    run: &DriftRun,
) -> Result<()> {
    let mut tracker = DriftTracker::new(*params, run.t_final, run.samples);
    let mut defer: Result<()> = Ok(());
    let outcome = evolve_observed(state, params, run.t_final, run.dt, |t, s| {
        if defer.is_ok() && tracker.wants(t) {
            if let Err(e) = tracker.observe(s) {
                defer = Err(e);
            }
        }
    });
    // A blow-up is a failed row of this section, not a crash of the run.
    if let Err(dnls_core::Error::BlowUp { t, .. }) = &outcome {
        report.push(ReportRow::bounded(section, "blow_up_time", *t, f64::NEG_INFINITY));
        return Ok(());
    }
    outcome?;
    defer?;
    report.push(
        ReportRow::bounded(section, "mass_drift", tracker.max_mass_drift, run.mass_tol)
            .with_n(params.n_modes as u64),
    );
    for (i, ell) in EnergyIndex::ALL.into_iter().enumerate() {
        let label = format!("gauged_{}_rel_drift", ell.label());
        report.push(
            ReportRow::bounded(section, &label, tracker.max_rel_energy_drift[i], run.energy_tol)
                .with_n(params.n_modes as u64),
        );
    }
    Ok(())
}

pub fn cmd_conservation(cfg: &ConservationConfig, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("conservation", seed);
    let n = cfg.n;
    let alpha = cfg.alpha.unwrap_or_else(|| canonical_alpha(cfg.k, cfg.beta));
    let dt = if cfg.dt > 0.0 { cfg.dt } else { default_dt(n) };

    // Free flow: everything is conserved to roundoff.
    let linear_params = ModelParams::new(0.0, 0.0, cfg.k, n);
    let data = random_smooth_state(n, cfg.mass, cfg.decay, seed, 0);
    run_drift_section(
        &mut report,
        "linear",
        &data,
        &linear_params,
        &DriftRun {
            t_final: cfg.t_final,
            dt,
            samples: cfg.samples,
            mass_tol: LINEAR_DRIFT_TOL,
            energy_tol: LINEAR_DRIFT_TOL,
        },
    )?;

    // Plane wave against the dispersion relation.
    {
        let amp = Complex::new((cfg.mass.max(1e-6)).sqrt(), 0.0);
        let mode = 1i64;
        let params = ModelParams::new(cfg.beta, 0.0, cfg.k, n);
        let wave = SpectralState::single_mode(n, mode, amp);
        let out = evolve_observed(&wave, &params, cfg.t_final, dt, |_, _| {})?;
        let omega =
            (mode * mode) as f64 - cfg.beta * mode as f64 * amp.norm_sqr();
        let expect = amp * Complex::from_polar(1.0, -omega * cfg.t_final);
        let err = (out.coeff(mode) - expect).norm();
        report.push(ReportRow::bounded("plane_wave", "phase_error", err, PLANE_WAVE_TOL));
        let mass_drift = (mass(&out) - amp.norm_sqr()).abs();
        report.push(ReportRow::bounded("plane_wave", "mass_drift", mass_drift, PLANE_WAVE_TOL));
    }

    // Smooth random data, ungauged flow (the direct conserved functionals).
    let ungauged = ModelParams::new(cfg.beta, 0.0, cfg.k, n);
    run_drift_section(
        &mut report,
        "random_ungauged",
        &data,
        &ungauged,
        &DriftRun {
            t_final: cfg.t_final,
            dt,
            samples: cfg.samples,
            mass_tol: MASS_DRIFT_TOL,
            energy_tol: ENERGY_DRIFT_REL,
        },
    )?;

    // Smooth random data, gauged flow (the gauged functionals).
    let gauged = ModelParams::new(cfg.beta, alpha, cfg.k, n);
    run_drift_section(
        &mut report,
        "random_gauged",
        &data,
        &gauged,
        &DriftRun {
            t_final: cfg.t_final,
            dt,
            samples: cfg.samples,
            mass_tol: MASS_DRIFT_TOL,
            energy_tol: ENERGY_DRIFT_REL,
        },
    )?;

    // Mass conservation across the requested (α, β) grid.
    for (i, pair) in cfg.extra_pairs.iter().enumerate() {
        let [a, b] = *pair;
        let params = ModelParams::new(b, a, cfg.k, n);
        let m0 = mass(&data);
        let out = evolve_observed(&data, &params, cfg.t_final, dt, |_, _| {})?;
        let drift = (mass(&out) - m0).abs();
        report.push(
            ReportRow::bounded(
                "mass_grid",
                &format!("pair{i}_alpha_{a}_beta_{b}"),
                drift,
                MASS_DRIFT_TOL,
            )
            .with_n(n as u64),
        );
    }

    // Optional dumps ride a separate short evolution at the gauged params.
    if cfg.dump_trajectory.is_some() || cfg.dump_energies.is_some() {
        let mut records = Vec::new();
        let mut table = Vec::new();
        let mut defer: Result<()> = Ok(());
        let stride = (cfg.t_final / (cfg.samples.max(1) as f64)).max(dt);
        let mut next = 0.0;
        evolve_observed(&data, &gauged, cfg.t_final, dt, |t, s| {
            if defer.is_ok() && (t >= next || t == cfg.t_final) {
                next = t + stride;
                match (
                    TrajectoryRecord::capture(t, s, gauged.alpha, gauged.beta),
                    EnergyTableRow::capture(t, s, gauged.alpha, gauged.beta),
                ) {
                    (Ok(r), Ok(row)) => {
                        records.push(r);
                        table.push(row);
                    }
                    (Err(e), _) | (_, Err(e)) => defer = Err(e),
                }
            }
        })?;
        defer?;
        if let Some(path) = &cfg.dump_trajectory {
            write_trajectory_jsonl(&records, std::fs::File::create(path)?)?;
        }
        if let Some(path) = &cfg.dump_energies {
            write_energy_table_csv(&table, std::fs::File::create(path)?)?;
        }
    }

    Ok(report)
}
