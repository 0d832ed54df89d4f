//! The fixed observable panel of the invariance experiment plus the
//! trajectory record types behind the dump interfaces.
//!
//! The panel is versioned in code so regression values stay comparable
//! across runs; changing it is a breaking change of the report format.

use dnls_core::invariants::{energy, gauged_energy, qk, tilde_qk, EnergyIndex};
use dnls_core::spectral::{homogeneous_sobolev_norm_sq, mass, NormConvention, SpectralState};
use dnls_core::{Result, SpectralState as State};
use serde::Serialize;
use std::io::Write;

/// Panel version 1: `mass, ‖f‖²_{Ḣ¹}, E0, ℰ1, ℰ2, |f(1)|², Re f(2)`.
pub const PANEL_LABELS: [&str; 7] =
    ["mass", "h1_sq", "e0", "gauged_e1", "gauged_e2", "mode1_sq", "re_mode2"];

pub fn panel_values(state: &SpectralState, alpha: f64, beta: f64) -> Result<[f64; 7]> {
    Ok([
        mass(state),
        homogeneous_sobolev_norm_sq(state, 1.0, NormConvention::Physical),
        energy(state, EnergyIndex::Zero, beta)?,
        gauged_energy(state, EnergyIndex::One, alpha, beta)?,
        gauged_energy(state, EnergyIndex::Two, alpha, beta)?,
        state.coeff(1).norm_sqr(),
        state.coeff(2).re,
    ])
}

/// One record of a trajectory dump:
/// `{t, state, mass, E0..E2, gauged_E0..E2}` serialized as JSONL.
#[derive(Serialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub state: State,
    pub mass: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub gauged_e0: f64,
    pub gauged_e1: f64,
    pub gauged_e2: f64,
}

impl TrajectoryRecord {
    pub fn capture(t: f64, state: &State, alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            t,
            state: state.clone(),
            mass: mass(state),
            e0: energy(state, EnergyIndex::Zero, beta)?,
            e1: energy(state, EnergyIndex::One, beta)?,
            e2: energy(state, EnergyIndex::Two, beta)?,
            gauged_e0: gauged_energy(state, EnergyIndex::Zero, alpha, beta)?,
            gauged_e1: gauged_energy(state, EnergyIndex::One, alpha, beta)?,
            gauged_e2: gauged_energy(state, EnergyIndex::Two, alpha, beta)?,
        })
    }
}

pub fn write_trajectory_jsonl(records: &[TrajectoryRecord], mut w: impl Write) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| dnls_core::Error::Serialization(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// The full energy table row behind the CSV interface
/// `t, E0, E_half, E1, E_3half, E2, gE0..gE2, Q2, tQ2`.
pub struct EnergyTableRow {
    pub t: f64,
    pub direct: [f64; 5],
    pub gauged: [f64; 5],
    pub q2: f64,
    pub tilde_q2: f64,
}

impl EnergyTableRow {
    pub fn capture(t: f64, state: &State, alpha: f64, beta: f64) -> Result<Self> {
        let mut direct = [0.0; 5];
        let mut gauged = [0.0; 5];
        for (i, ell) in EnergyIndex::ALL.into_iter().enumerate() {
            direct[i] = energy(state, ell, beta)?;
            gauged[i] = gauged_energy(state, ell, alpha, beta)?;
        }
        Ok(Self {
            t,
            direct,
            gauged,
            q2: qk(state, 2, beta)?,
            tilde_q2: tilde_qk(state, 2, alpha, beta)?,
        })
    }
}

pub fn write_energy_table_csv(rows: &[EnergyTableRow], mut w: impl Write) -> Result<()> {
    writeln!(
        w,
        "# columns: t,E0,E_half,E1,E_3half,E2,gE0,gE_half,gE1,gE_3half,gE2,Q2,tQ2"
    )?;
    for r in rows {
        let mut cells = vec![format!("{:.12e}", r.t)];
        cells.extend(r.direct.iter().map(|v| format!("{v:.12e}")));
        cells.extend(r.gauged.iter().map(|v| format!("{v:.12e}")));
        cells.push(format!("{:.12e}", r.q2));
        cells.push(format!("{:.12e}", r.tilde_q2));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
