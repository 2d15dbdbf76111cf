//! Stochastic phase-space trajectories and their ensemble averages.

pub mod field;
pub mod sample;
pub mod stats;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::TwaError;
use crate::model::SystemSpec;
use crate::phasespace::PhasePoint;

pub use field::{apply, Field, Increment};
pub use sample::{CoherentSampler, InitialState};
pub use stats::Accumulator;

/// Per-trajectory observable extractor. Components are real.
pub trait Probe: Sync {
    fn names(&self) -> Vec<String>;
    fn eval(&self, z: &[PhasePoint], out: &mut [f64]);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwaConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Steps between records.
    #[serde(default = "default_every")]
    pub record_every: usize,
    pub n_traj: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `None` uses the rayon default.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Trajectories per reduction chunk. Fixed so results do not depend on
    /// the worker count.
    #[serde(default = "default_chunk")]
    pub chunk: usize,
    #[serde(default = "default_low_j")]
    pub low_j_threshold: f64,
    #[serde(default = "default_fail")]
    pub max_failure_fraction: f64,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
}

fn default_every() -> usize {
    1
}
fn default_chunk() -> usize {
    1
}
fn default_low_j() -> f64 {
    1.0
}
fn default_fail() -> f64 {
    0.01
}
fn default_initial() -> InitialState {
    InitialState::excited()
}

impl TwaConfig {
    pub fn new(dt: f64, t_max: f64, record_every: usize, n_traj: usize, seed: u64) -> Self {
        TwaConfig {
            dt,
            t_max,
            record_every,
            n_traj,
            seed,
            workers: None,
            chunk: default_chunk(),
            low_j_threshold: default_low_j(),
            max_failure_fraction: default_fail(),
            initial: default_initial(),
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn record_times(&self) -> Vec<f64> {
        let every = self.record_every.max(1);
        (0..=self.steps()).step_by(every).map(|s| s as f64 * self.dt).collect()
    }

    pub fn validate(&self) -> Result<(), TwaError> {
        let bad = |s: &str| Err(TwaError::Spec(crate::error::SpecError::Invalid(s.into())));
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return bad("dt must be positive and t_max non-negative");
        }
        if self.n_traj == 0 {
            return Err(TwaError::Empty);
        }
        if self.chunk == 0 || self.record_every == 0 {
            return bad("chunk and record_every must be positive");
        }
        if self.workers == Some(0) {
            return bad("workers must be positive");
        }
        Ok(())
    }
}

/// Ensemble averages of a probe on the record grid.
#[derive(Clone, Debug)]
pub struct TwaResult {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    pub total: Accumulator,
    pub groups: Vec<Accumulator>,
    pub failed: usize,
    pub n_traj: usize,
}

/// Name of the low-𝒥 indicator appended to every probe.
pub const LOW_J: &str = "low_j_fraction";

impl TwaResult {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn idx(&self, name: &str) -> usize {
        self.index(name).unwrap_or_else(|| panic!("unknown observable {name}"))
    }

    pub fn mean(&self, record: usize, name: &str) -> f64 {
        self.total.mean(record, self.idx(name))
    }

    pub fn stderr(&self, record: usize, name: &str) -> f64 {
        self.total.stderr(record, self.idx(name))
    }

    pub fn series(&self, name: &str) -> Vec<f64> {
        let c = self.idx(name);
        (0..self.times.len()).map(|r| self.total.mean(r, c)).collect()
    }

    pub fn alive(&self, record: usize) -> u64 {
        self.total.count[record]
    }

    /// Nonlinear function of the means with a grouped-jackknife error.
    pub fn composite<F: Fn(&[f64]) -> f64>(&self, record: usize, f: F) -> (f64, f64) {
        stats::jackknife(&self.total, &self.groups, record, f)
    }
}

/// Integrates one trajectory, calling `record(idx, z)` on the record grid.
/// Returns `false` if the state became non-finite.
pub fn trajectory<R: FnMut(usize, &[PhasePoint])>(
    field: &Field,
    sampler: &CoherentSampler,
    cfg: &TwaConfig,
    index: u64,
    mut record: R,
) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let m = field.ensembles();
    let mut z: Vec<PhasePoint> = (0..m).map(|_| sampler.sample(&cfg.initial, &mut rng)).collect();
    let steps = cfg.steps();
    let every = cfg.record_every.max(1);
    let sq = cfg.dt.sqrt();
    let k = field.noise_len();
    let mut dw = vec![C64::new(0.0, 0.0); k];
    let mut inc0 = vec![Increment::default(); m];
    let mut inc1 = vec![Increment::default(); m];
    let mut z1 = z.clone();
    for s in 0..=steps {
        if s % every == 0 {
            record(s / every, &z);
        }
        if s == steps {
            break;
        }
        for w in dw.iter_mut() {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            *w = C64::new(a, b) * sq;
        }
        heun_step(field, &mut z, &mut z1, &dw, cfg.dt, &mut inc0, &mut inc1);
        if !z.iter().all(|p| p.is_finite()) {
            return false;
        }
    }
    true
}

/// One stochastic Heun step with shared noise in predictor and corrector.
pub fn heun_step(
    field: &Field,
    z: &mut [PhasePoint],
    z1: &mut [PhasePoint],
    dw: &[C64],
    dt: f64,
    inc0: &mut [Increment],
    inc1: &mut [Increment],
) {
    field.increment(z, dw, dt, inc0);
    for i in 0..z.len() {
        z1[i] = apply(&z[i], &inc0[i]);
    }
    field.increment(z1, dw, dt, inc1);
    for i in 0..z.len() {
        let avg = Increment { rot: (inc0[i].rot + inc1[i].rot) * 0.5, dp: 0.5 * (inc0[i].dp + inc1[i].dp) };
        z[i] = apply(&z[i], &avg);
    }
}

/// Runs `cfg.n_traj` trajectories and averages `probe` on the record grid.
pub fn run<P: Probe>(spec: &SystemSpec, cfg: &TwaConfig, probe: &P) -> Result<TwaResult, TwaError> {
    spec.validate()?;
    cfg.validate()?;
    let field = Field::new(spec);
    let sampler = CoherentSampler::new(spec.emitters);
    let mut names = probe.names();
    names.push(LOW_J.to_string());
    let comps = names.len();
    let times = cfg.record_times();
    let records = times.len();
    let n_chunks = cfg.n_traj.div_ceil(cfg.chunk);
    let work = |c: usize| -> (Accumulator, usize) {
        let mut acc = Accumulator::new(records, comps);
        let mut vals = vec![0.0; comps];
        let mut failed = 0;
        let lo = c * cfg.chunk;
        let hi = ((c + 1) * cfg.chunk).min(cfg.n_traj);
        for t in lo..hi {
            let ok = trajectory(&field, &sampler, cfg, t as u64, |r, z| {
                probe.eval(z, &mut vals[..comps - 1]);
                vals[comps - 1] = if z.iter().any(|p| p.jcal() < cfg.low_j_threshold) { 1.0 } else { 0.0 };
                acc.add(r, &vals);
            });
            if !ok {
                failed += 1;
            }
        }
        (acc, failed)
    };
    let chunks: Vec<(Accumulator, usize)> = match cfg.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| TwaError::Spec(crate::error::SpecError::Invalid(e.to_string())))?;
            pool.install(|| (0..n_chunks).into_par_iter().map(work).collect())
        }
        None => (0..n_chunks).into_par_iter().map(work).collect(),
    };
    let failed: usize = chunks.iter().map(|c| c.1).sum();
    if failed as f64 > cfg.max_failure_fraction * cfg.n_traj as f64 {
        return Err(TwaError::Abort { failed, total: cfg.n_traj });
    }
    let accs: Vec<Accumulator> = chunks.into_iter().map(|c| c.0).collect();
    let mut total = Accumulator::new(records, comps);
    for a in &accs {
        total.merge(a);
    }
    Ok(TwaResult { times, names, groups: stats::group(&accs), total, failed, n_traj: cfg.n_traj })
}
