//! Drift and noise of the unravelled phase-space dynamics.
//!
//! Every channel `k` with rate `r_k` and symbol `ℓ_k` contributes
//! `Re[c_k X_k]` to the frame rotation and to `dP`, where `X_k` is the
//! Hamiltonian vector field of `ℓ_k` and
//! `c_k = √r_k dW_k + i r_k ℓ_k* dt`, `dW_k = (ξ₁ + iξ₂)√dt`.

use num_complex::Complex64 as C64;

use crate::amplitude::{chi_from, channel_weight, LadderAmplitudes};
use crate::hamiltonian::Hamiltonian;
use crate::model::SystemSpec;
use crate::phasespace::{spherical_basis, CVec3, PhasePoint, Vec3};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Per-ensemble update produced by one field evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Increment {
    pub rot: Vec3,
    pub dp: f64,
}

struct Local {
    rate: f64,
    sqrt_rate: f64,
    weight: f64,
    e: CVec3,
}

/// Precomputed channel data for one system.
pub struct Field {
    ensembles: usize,
    collective: Vec<(i32, f64)>,
    chain: Option<(f64, f64)>,
    local: Vec<Local>,
    amps: LadderAmplitudes,
    hamiltonian: Hamiltonian,
    noise_len: usize,
}

impl Field {
    pub fn new(spec: &SystemSpec) -> Self {
        let channels = spec.channels();
        Field {
            ensembles: spec.ensembles,
            collective: spec.collective.active(),
            chain: spec.has_chain().then_some((spec.chain_decay / 2.0, spec.phi_prop)),
            local: spec
                .local
                .active()
                .into_iter()
                .map(|(q, r)| Local { rate: r, sqrt_rate: r.sqrt(), weight: channel_weight(q), e: spherical_basis(q) })
                .collect(),
            amps: LadderAmplitudes::new(spec.emitters),
            hamiltonian: Hamiltonian::new(spec),
            noise_len: channels.len(),
        }
    }

    /// Number of complex Wiener increments per step.
    pub fn noise_len(&self) -> usize {
        self.noise_len
    }

    pub fn ensembles(&self) -> usize {
        self.ensembles
    }

    /// Increment for configuration `z` with Wiener increments `dw` over `dt`.
    pub fn increment(&self, z: &[PhasePoint], dw: &[C64], dt: f64, out: &mut [Increment]) {
        debug_assert_eq!(dw.len(), self.noise_len);
        for o in out.iter_mut() {
            *o = Increment::default();
        }
        if !self.hamiltonian.is_zero() {
            let mut g = vec![Vec3::zeros(); z.len()];
            self.hamiltonian.gradient(z, &mut g);
            for (o, gm) in out.iter_mut().zip(&g) {
                o.rot += gm * dt;
            }
        }
        let mut k = 0;
        for &(q, r) in &self.collective {
            let s = z[0].s_vec();
            let (l, g) = match q {
                -1 => (C64::new(s.x, -s.y), [C64::new(1.0, 0.0), C64::new(0.0, -1.0)]),
                1 => (C64::new(s.x, s.y), [C64::new(1.0, 0.0), C64::new(0.0, 1.0)]),
                _ => (C64::new(s.z, 0.0), [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]),
            };
            let c = dw[k] * r.sqrt() + I * l.conj() * (r * dt);
            if q == 0 {
                out[0].rot.z += c.re;
            } else {
                out[0].rot.x += (c * g[0]).re;
                out[0].rot.y += (c * g[1]).re;
            }
            k += 1;
        }
        if let Some((r, phi)) = self.chain {
            for sgn in [1.0, -1.0] {
                let ph: Vec<C64> = (0..z.len()).map(|m| C64::from_polar(1.0, sgn * phi * (m + 1) as f64)).collect();
                let mut l = C64::new(0.0, 0.0);
                for (zm, w) in z.iter().zip(&ph) {
                    let s = zm.s_vec();
                    l += w * C64::new(s.x, -s.y);
                }
                let c = dw[k] * r.sqrt() + I * l.conj() * (r * dt);
                for (o, w) in out.iter_mut().zip(&ph) {
                    let cw = c * w;
                    o.rot.x += cw.re;
                    o.rot.y += cw.im;
                }
                k += 1;
            }
        }
        if self.local.is_empty() {
            return;
        }
        for (zm, o) in z.iter().zip(out.iter_mut()) {
            let (a, da) = self.amps.all(zm.p);
            let v = zm.frame_spherical();
            let n = zm.n.map(C64::from);
            let inv_p = C64::from(1.0 / zm.p.max(1e-300));
            for ch in &self.local {
                for j in -1..=1 {
                    let idx = (j + 1) as usize;
                    let (chi, dchi) = chi_from(ch.weight, a[idx], da[idx]);
                    if chi == 0.0 {
                        k += 1;
                        continue;
                    }
                    let vs = v[idx].map(|x| x.conj());
                    let d = vs.dot(&ch.e);
                    let l = d * chi;
                    let tau = vs.cross(&ch.e) * C64::from(chi);
                    let omega = tau.cross(&n) * inv_p + n * (d * dchi);
                    let pdot = -I * (j as f64) * l;
                    let c = dw[k] * ch.sqrt_rate + I * l.conj() * (ch.rate * dt);
                    o.rot += (omega * c).map(|x| x.re);
                    o.dp += (c * pdot).re;
                    k += 1;
                }
            }
        }
        debug_assert_eq!(k, self.noise_len);
    }
}

/// Applies a rotation and radial step. A negative spin length passes through
/// the origin of S-space: `P → −P`, `n → −n`.
pub fn apply(z: &PhasePoint, inc: &Increment) -> PhasePoint {
    let mut out = *z;
    out.rotate(&inc.rot);
    out.p += inc.dp;
    if out.p < 0.0 {
        out.p = -out.p;
        out.n = -out.n;
    }
    out.reorthonormalize();
    out
}
