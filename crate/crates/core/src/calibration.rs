//! Deterministic checks of the phase-space amplitudes against the exact
//! Dicke solver, and the frozen amplitude tables.
//!
//! The TWA generator is evaluated without sampling noise: the initial
//! distribution is integrated by quadrature (Gauss–Legendre in the polar
//! deviation, uniform grids in both azimuths) and the Wiener increments by
//! Rademacher points, which match Gaussian moments to the order a single
//! Heun step needs. Two step sizes are combined by Richardson extrapolation.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::amplitude::LadderAmplitudes;
use crate::error::ExactError;
use crate::exact::{DickeSolver, DickeSpace, DickeState, Moments};
use crate::model::SystemSpec;
use crate::observables::{onsite_jpjm, total_spin_sq};
use crate::phasespace::PhasePoint;
use crate::twa::sample::rotate_point;
use crate::twa::{heun_step, CoherentSampler, Field, Increment, InitialState};

pub const FIXTURE_VERSION: u32 = 1;

/// Resolution of the deterministic phase-space average.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub panels: usize,
    pub order: usize,
    pub azimuths: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { panels: 16, order: 12, azimuths: 8 }
    }
}

/// Weighted initial points of a coherent state.
pub fn initial_points(n: usize, init: &InitialState, quad: Quadrature) -> Vec<(PhasePoint, f64)> {
    let s = CoherentSampler::new(n);
    let rot = init.rotation();
    let a = quad.azimuths;
    let w_az = 1.0 / (a * a) as f64;
    let mut out = Vec::new();
    for (x, w) in s.x_quadrature(quad.panels, quad.order) {
        for i in 0..a {
            for k in 0..a {
                let (phi, psi) = (TAU * (i as f64 + 0.5) / a as f64, TAU * (k as f64 + 0.25) / a as f64);
                out.push((rotate_point(&s.point(x, phi, psi), &rot), w * w_az));
            }
        }
    }
    out
}

/// Observables tracked by the calibration: `J^z`, `J^x`, `J^y`, `J²`, `J⁺J⁻`.
fn symbols(z: &PhasePoint) -> [f64; 5] {
    let s = z.s_vec();
    [s.z, s.x, s.y, total_spin_sq(z), onsite_jpjm(z)]
}

fn exact_vector(m: &Moments) -> [f64; 5] {
    [m.jz, m.jx, m.jy, m.j2, m.jpjm]
}

pub const OBSERVABLES: [&str; 5] = ["jz", "jx", "jy", "j2", "jpjm"];

/// Phase-space averages of the tracked symbols after one Heun step of `dt`.
fn stepped_means(field: &Field, pts: &[(PhasePoint, f64)], dt: f64) -> [f64; 5] {
    let k = field.noise_len();
    let reals = 2 * k;
    assert!(reals <= 16, "too many noise components for exhaustive Rademacher sums");
    let combos = 1usize << reals;
    let sq = dt.sqrt();
    let wn = 1.0 / combos as f64;
    let mut acc = [0.0; 5];
    let mut dw = vec![C64::new(0.0, 0.0); k];
    let (mut inc0, mut inc1) = ([Increment::default()], [Increment::default()]);
    for (z0, w) in pts {
        for c in 0..combos {
            for (i, d) in dw.iter_mut().enumerate() {
                let sgn = |b: usize| if (c >> b) & 1 == 1 { sq } else { -sq };
                *d = C64::new(sgn(2 * i), sgn(2 * i + 1));
            }
            let mut z = [*z0];
            let mut z1 = [*z0];
            heun_step(field, &mut z, &mut z1, &dw, dt, &mut inc0, &mut inc1);
            for (a, v) in acc.iter_mut().zip(symbols(&z[0])) {
                *a += w * wn * v;
            }
        }
    }
    acc
}

/// TWA time derivatives of the tracked moments at `t = 0`.
pub fn twa_derivatives(spec: &SystemSpec, init: &InitialState, quad: Quadrature) -> [f64; 5] {
    assert_eq!(spec.ensembles, 1, "calibration runs on single ensembles");
    let field = Field::new(spec);
    let pts = initial_points(spec.emitters, init, quad);
    let mut m0 = [0.0; 5];
    for (z, w) in &pts {
        for (a, v) in m0.iter_mut().zip(symbols(z)) {
            *a += w * v;
        }
    }
    let dt = 2e-4 / spec.rate_scale();
    let a = stepped_means(&field, &pts, dt);
    let b = stepped_means(&field, &pts, dt / 2.0);
    let mut d = [0.0; 5];
    for i in 0..5 {
        d[i] = 2.0 * (b[i] - m0[i]) / (dt / 2.0) - (a[i] - m0[i]) / dt;
    }
    d
}

/// Exact time derivatives of the tracked moments on a coherent state.
pub fn exact_derivatives(spec: &SystemSpec, init: &InitialState) -> Result<[f64; 5], ExactError> {
    let solver = DickeSolver::new(spec)?;
    let rho = DickeState::coherent(solver.space(), init.theta, init.phi);
    Ok(exact_vector(&solver.derivative(&rho)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualRow {
    pub channel: String,
    pub theta: f64,
    pub observable: String,
    pub exact: f64,
    pub twa: f64,
}

impl ResidualRow {
    pub fn residual(&self) -> f64 {
        (self.twa - self.exact).abs()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub emitters: usize,
    pub rows: Vec<ResidualRow>,
}

impl CalibrationReport {
    /// Largest residual of `observable` relative to `rate·N`.
    pub fn worst(&self, observable: &str) -> f64 {
        self.rows.iter().filter(|r| r.observable == observable).map(|r| r.residual() / self.emitters as f64).fold(0.0, f64::max)
    }
}

/// Every channel in isolation at unit rate.
pub fn channel_family(n: usize) -> Vec<(String, SystemSpec)> {
    let mut out = Vec::new();
    for q in -1..=1 {
        let mut s = SystemSpec::single(n);
        s.collective.set(q, 1.0);
        out.push((format!("collective q={q}"), s));
        let mut s = SystemSpec::single(n);
        s.local.set(q, 1.0);
        out.push((format!("local q={q}"), s));
    }
    out
}

/// Compares TWA and exact first derivatives of `J^z`, `J^x`, `J^y`, `J²` and
/// `J⁺J⁻` for each channel on coherent states at the given polar angles.
pub fn calibrate_symbols(n: usize, thetas: &[f64], quad: Quadrature) -> Result<CalibrationReport, ExactError> {
    let mut rows = Vec::new();
    for (label, spec) in channel_family(n) {
        for &theta in thetas {
            let init = InitialState { theta, phi: 0.0 };
            let ex = exact_derivatives(&spec, &init)?;
            let tw = twa_derivatives(&spec, &init, quad);
            for (i, name) in OBSERVABLES.iter().enumerate() {
                rows.push(ResidualRow { channel: label.clone(), theta, observable: name.to_string(), exact: ex[i], twa: tw[i] });
            }
        }
    }
    Ok(CalibrationReport { emitters: n, rows })
}

/// Least-squares constants `(a, b)` in the on-site symbol
/// `S_x² + S_y² + S_z + a + b n_z²` over coherent states at `thetas`, with
/// the largest remaining residual.
pub fn calibrate_second_moments(n: usize, thetas: &[f64], quad: Quadrature) -> (f64, f64, f64) {
    let space = DickeSpace::new(n);
    let mut rows = Vec::new();
    for &theta in thetas {
        let init = InitialState { theta, phi: 0.0 };
        let exact = DickeState::coherent(&space, theta, 0.0).moments(&space).jpjm;
        let (mut base, mut nz2) = (0.0, 0.0);
        for (z, w) in initial_points(n, &init, quad) {
            let s = z.s_vec();
            base += w * (s.x * s.x + s.y * s.y + s.z);
            nz2 += w * z.n.z * z.n.z;
        }
        rows.push((exact - base, nz2));
    }
    // normal equations for r ≈ a + b u
    let k = rows.len() as f64;
    let (su, sr) = rows.iter().fold((0.0, 0.0), |acc, (r, u)| (acc.0 + u, acc.1 + r));
    let (suu, sur) = rows.iter().fold((0.0, 0.0), |acc, (r, u)| (acc.0 + u * u, acc.1 + u * r));
    let det = k * suu - su * su;
    let (a, b) = if det.abs() < 1e-14 { (sr / k, 0.0) } else { ((suu * sr - su * sur) / det, (k * sur - su * sr) / det) };
    let worst = rows.iter().map(|(r, u)| (r - a - b * u).abs()).fold(0.0, f64::max);
    (a, b, worst)
}

/// Local amplitudes `χ_{jq}(𝒥)` on a grid of `𝒥`.
pub fn chi_table(n: usize, jcal: &[f64]) -> Vec<(f64, i32, i32, f64)> {
    let amps = LadderAmplitudes::new(n);
    let mut out = Vec::new();
    for &j in jcal {
        for q in -1..=1 {
            for jj in -1..=1 {
                out.push((j, q, jj, amps.chi(q, jj, j + 0.5).0));
            }
        }
    }
    out
}

/// Human-readable fixture with a versioned header.
pub fn format_fixture(n: usize, tolerance: f64, table: &[(f64, i32, i32, f64)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# ensemble-twa amplitude fixture v{FIXTURE_VERSION}");
    let _ = writeln!(s, "# emitters {n}");
    let _ = writeln!(s, "# tolerance {tolerance:e}");
    let _ = writeln!(s, "jcal,q,j,re,im");
    for (jc, q, j, v) in table {
        let _ = writeln!(s, "{jc},{q},{j},{v:.15e},0");
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub version: u32,
    pub emitters: usize,
    pub tolerance: f64,
    pub table: Vec<(f64, i32, i32, f64)>,
}

pub fn parse_fixture(text: &str) -> Result<Fixture, String> {
    let mut version = None;
    let mut emitters = None;
    let mut tolerance = None;
    let mut table = Vec::new();
    for line in text.lines() {
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            if let Some(v) = h.strip_prefix("ensemble-twa amplitude fixture v") {
                version = v.trim().parse().ok();
            } else if let Some(v) = h.strip_prefix("emitters") {
                emitters = v.trim().parse().ok();
            } else if let Some(v) = h.strip_prefix("tolerance") {
                tolerance = v.trim().parse().ok();
            }
            continue;
        }
        if line.trim().is_empty() || line.starts_with("jcal") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(format!("bad fixture row: {line}"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{e}: {line}"));
        let int = |s: &str| s.trim().parse::<i32>().map_err(|e| format!("{e}: {line}"));
        table.push((num(f[0])?, int(f[1])?, int(f[2])?, num(f[3])?));
    }
    Ok(Fixture {
        version: version.ok_or("missing version header")?,
        emitters: emitters.ok_or("missing emitters header")?,
        tolerance: tolerance.ok_or("missing tolerance header")?,
        table,
    })
}
