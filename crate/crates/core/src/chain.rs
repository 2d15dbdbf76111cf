//! Chains of ensembles coupled through a bidirectional waveguide.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::TwaError;
use crate::model::SystemSpec;
use crate::observables::{forward_fraction, ChainProbe};
use crate::twa::{run, TwaConfig, TwaResult};

/// `points` momenta uniformly covering `[−π, π)`.
pub fn p_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| -PI + k as f64 * TAU / points as f64).collect()
}

/// Runs a chain with emission rates, optional per-site data and `S(p)` on
/// `p_grid`.
pub fn run_chain(spec: &SystemSpec, cfg: &TwaConfig, p_grid: &[f64], per_site: bool) -> Result<TwaResult, TwaError> {
    let probe = ChainProbe { ensembles: spec.ensembles, phi: spec.phi_prop, p_grid: p_grid.to_vec(), per_site };
    run(spec, cfg, &probe)
}

/// Largest `S(p)` on each side of `p = 0` at one record, as
/// `(p, value, stderr)` for the negative and positive halves.
pub fn structure_peaks(r: &TwaResult, record: usize, p_grid: &[f64]) -> [(f64, f64, f64); 2] {
    let mut best = [(0.0, f64::NEG_INFINITY, 0.0); 2];
    for (k, &p) in p_grid.iter().enumerate() {
        let name = format!("S_{k}");
        let v = r.mean(record, &name);
        let side = if p < 0.0 {
            0
        } else if p > 0.0 {
            1
        } else {
            continue;
        };
        if v > best[side].1 {
            best[side] = (p, v, r.stderr(record, &name));
        }
    }
    best
}

/// Parameters of a drive sweep at fixed total phase `Mϕ` and cooperativity
/// `Γ N_tot/γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub emitters: usize,
    pub sizes: Vec<usize>,
    /// Drive amplitudes in units of the pump rate.
    pub drive: Vec<f64>,
    pub total_phase: f64,
    pub cooperativity: f64,
    #[serde(default = "unit")]
    pub chain_decay: f64,
    /// Evaluation time; the fraction is read at the last record.
    #[serde(default = "two")]
    pub t_eval: f64,
}

fn unit() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ensembles: usize,
    pub drive_over_pump: f64,
    pub fraction: f64,
    pub stderr: f64,
    pub n_traj: usize,
}

impl SweepSpec {
    /// System for chain size `m` and drive `x` (in units of the pump).
    pub fn system(&self, m: usize, x: f64) -> SystemSpec {
        let mut s = SystemSpec::chain(m, self.emitters, self.chain_decay, self.total_phase / m as f64);
        s.local.pumping = self.chain_decay * (m * self.emitters) as f64 / self.cooperativity;
        s.omega_drive = x * s.local.pumping;
        s
    }
}

/// Forward emission fraction at `t_eval` for every chain size and drive.
/// `cfg_for(m)` supplies the step, trajectory count and initial state; its
/// `t_max` is overridden.
pub fn directionality_sweep<C: Fn(usize) -> TwaConfig>(sweep: &SweepSpec, cfg_for: C) -> Result<Vec<SweepRow>, TwaError> {
    let mut rows = Vec::new();
    for &m in &sweep.sizes {
        for &x in &sweep.drive {
            let spec = sweep.system(m, x);
            let mut cfg = cfg_for(m);
            cfg.t_max = sweep.t_eval;
            cfg.record_every = cfg.steps().max(1);
            let r = run(&spec, &cfg, &ChainProbe::new(m, spec.phi_prop))?;
            let (fraction, stderr) = forward_fraction(&r, r.times.len() - 1);
            rows.push(SweepRow { ensembles: m, drive_over_pump: x, fraction, stderr, n_traj: r.n_traj });
        }
    }
    Ok(rows)
}
