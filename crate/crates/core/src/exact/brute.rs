//! Dense Lindblad integration on the full 2^N Hilbert space.
//!
//! Emitter `k` belongs to ensemble `k / N`; bit `k` of a basis index is 1
//! when the emitter is excited.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::ExactError;
use crate::exact::ode::Dopri5;
use crate::exact::Moments;
use crate::model::{Polarization, SystemSpec};

/// Largest total emitter number accepted.
pub const BRUTE_CAP: usize = 8;

type CMat = DMatrix<C64>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Observables at one record time.
#[derive(Clone, Debug)]
pub struct BruteRecord {
    pub moments: Vec<Moments>,
    /// `⟨J⁺_m J⁻_{m'}⟩`, row-major over (m, m').
    pub correlations: Vec<C64>,
}

impl BruteRecord {
    pub fn ensembles(&self) -> usize {
        self.moments.len()
    }

    /// `Σ_{m,m'} e^{ip(m−m')} ⟨J⁺_m J⁻_{m'}⟩`.
    pub fn structure_factor(&self, p: f64) -> C64 {
        let mm = self.ensembles();
        let mut s = ZERO;
        for a in 0..mm {
            for b in 0..mm {
                s += C64::from_polar(1.0, p * (a as f64 - b as f64)) * self.correlations[a * mm + b];
            }
        }
        s
    }

    /// Forward emission `⟨L_F† L_F⟩` for propagation phase `phi`.
    pub fn forward(&self, phi: f64) -> f64 {
        self.structure_factor(-phi).re
    }

    pub fn backward(&self, phi: f64) -> f64 {
        self.structure_factor(phi).re
    }
}

pub struct BruteForce {
    spec: SystemSpec,
    dim: usize,
    h_eff: CMat,
    jumps: Vec<(f64, CMat)>,
    jm: Vec<CMat>,
    jz: Vec<CMat>,
    pub ode: Dopri5,
}

fn sigma(dim: usize, k: usize, q: i32) -> CMat {
    let mut s = CMat::zeros(dim, dim);
    for b in 0..dim {
        let up = (b >> k) & 1 == 1;
        match q {
            -1 if up => s[(b & !(1 << k), b)] = ONE,
            1 if !up => s[(b | (1 << k), b)] = ONE,
            0 => s[(b, b)] = if up { ONE } else { -ONE },
            _ => {}
        }
    }
    s
}

impl BruteForce {
    pub fn new(spec: &SystemSpec) -> Result<Self, ExactError> {
        spec.validate().map_err(|e| ExactError::Unsupported(e.to_string()))?;
        let nt = spec.total_emitters();
        if nt > BRUTE_CAP {
            return Err(ExactError::TooLarge(format!("{nt} emitters exceeds cap {BRUTE_CAP}")));
        }
        let (mm, n) = (spec.ensembles, spec.emitters);
        let dim = 1usize << nt;
        let mut jm = Vec::new();
        let mut jz = Vec::new();
        for m in 0..mm {
            let mut a = CMat::zeros(dim, dim);
            let mut z = CMat::zeros(dim, dim);
            for i in 0..n {
                a += sigma(dim, m * n + i, -1);
                z += sigma(dim, m * n + i, 0) * C64::new(0.5, 0.0);
            }
            jm.push(a);
            jz.push(z);
        }
        let mut h = CMat::zeros(dim, dim);
        for m in 0..mm {
            let jp = jm[m].adjoint();
            if spec.transverse_field != 0.0 {
                h += (&jp + &jm[m]) * C64::new(0.5 * spec.transverse_field, 0.0);
            }
            if spec.omega_drive != 0.0 {
                let w = C64::from_polar(spec.omega_drive, -spec.phi_prop * (m + 1) as f64);
                let d = &jp * w;
                h += d.adjoint() + d;
            }
            if spec.has_chain() {
                for k in 0..mm {
                    if k != m {
                        let c = 0.5 * spec.chain_decay * (spec.phi_prop * (m as f64 - k as f64).abs()).sin();
                        h += &jp * &jm[k] * C64::new(c, 0.0);
                    }
                }
            }
        }
        let mut jumps = Vec::new();
        if mm == 1 {
            for (q, r) in spec.collective.active() {
                let l = match q {
                    -1 => jm[0].clone(),
                    1 => jm[0].adjoint(),
                    _ => jz[0].clone(),
                };
                jumps.push((r, l));
            }
        }
        if spec.has_chain() {
            for sgn in [1.0, -1.0] {
                let mut l = CMat::zeros(dim, dim);
                for (m, a) in jm.iter().enumerate() {
                    l += a * C64::from_polar(1.0, sgn * spec.phi_prop * (m + 1) as f64);
                }
                jumps.push((spec.chain_decay / 2.0, l));
            }
        }
        for k in 0..nt {
            for (q, r) in spec.local.active() {
                jumps.push((r, sigma(dim, k, q)));
            }
        }
        let mut h_eff = h;
        for (r, l) in &jumps {
            h_eff -= l.adjoint() * l * C64::new(0.0, 0.5 * r);
        }
        Ok(BruteForce { spec: spec.clone(), dim, h_eff, jumps, jm, jz, ode: Dopri5::default() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn polarized(&self, pol: Polarization) -> CMat {
        let b = match pol {
            Polarization::Up => self.dim - 1,
            Polarization::Down => 0,
        };
        let mut rho = CMat::zeros(self.dim, self.dim);
        rho[(b, b)] = ONE;
        rho
    }

    /// Product of identical single-emitter states, the coherent spin state
    /// `e^{−iφJ^z} e^{−iθJ^y}` applied to all-excited.
    pub fn coherent(&self, theta: f64, phi: f64) -> CMat {
        let (sh, ch) = (theta / 2.0).sin_cos();
        let up = C64::from_polar(ch, -phi / 2.0);
        let dn = C64::from_polar(sh, phi / 2.0);
        let nt = self.dim.trailing_zeros();
        let psi: Vec<C64> =
            (0..self.dim).map(|b| (0..nt).map(|k| if (b >> k) & 1 == 1 { up } else { dn }).product()).collect();
        CMat::from_fn(self.dim, self.dim, |i, k| psi[i] * psi[k].conj())
    }

    /// `dρ/dt` for the full Lindbladian.
    pub fn liouvillian(&self, rho: &CMat) -> CMat {
        let hr = &self.h_eff * rho;
        let mut d = (&hr - rho * self.h_eff.adjoint()) * (-I);
        for (r, l) in &self.jumps {
            d += l * rho * l.adjoint() * C64::new(*r, 0.0);
        }
        d
    }

    pub fn observe(&self, rho: &CMat) -> BruteRecord {
        let mm = self.spec.ensembles;
        let tr = |a: &CMat| -> C64 { (a * rho).trace() };
        let mut moments = Vec::with_capacity(mm);
        let mut correlations = vec![ZERO; mm * mm];
        for m in 0..mm {
            let jp = self.jm[m].adjoint();
            let jx = (&jp + &self.jm[m]) * C64::new(0.5, 0.0);
            let jy = (&jp - &self.jm[m]) * C64::new(0.0, -0.5);
            let jz = &self.jz[m];
            let j2 = &jx * &jx + &jy * &jy + jz * jz;
            moments.push(Moments {
                trace: rho.trace().re,
                jx: tr(&jx).re,
                jy: tr(&jy).re,
                jz: tr(jz).re,
                jz2: tr(&(jz * jz)).re,
                j2: tr(&j2).re,
                jpjm: tr(&(&jp * &self.jm[m])).re,
            });
            for k in 0..mm {
                correlations[m * mm + k] = tr(&(&jp * &self.jm[k]));
            }
        }
        BruteRecord { moments, correlations }
    }

    pub fn evolve(&self, rho0: &CMat, t_grid: &[f64]) -> Result<Vec<BruteRecord>, ExactError> {
        let d = self.dim;
        let mut out = Vec::with_capacity(t_grid.len());
        let to_mat = |y: &[C64]| CMat::from_column_slice(d, d, y);
        self.ode.integrate(
            |_, y, dy| {
                let r = self.liouvillian(&to_mat(y));
                dy.copy_from_slice(r.as_slice());
            },
            rho0.as_slice(),
            t_grid,
            |_, _, y| out.push(self.observe(&to_mat(y))),
        )?;
        Ok(out)
    }
}
