//! Weyl symbol of the Hamiltonian and its per-ensemble gradient.
//!
//! All Hamiltonians here are functions of the collective spin vectors only,
//! so their flow is a rigid rotation of each ensemble about `∇_S ℋ`.

use num_complex::Complex64 as C64;

use crate::model::SystemSpec;
use crate::phasespace::{PhasePoint, Vec3};

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    transverse: f64,
    chain: f64,
    phi: f64,
    drive: f64,
}

impl Hamiltonian {
    pub fn new(spec: &SystemSpec) -> Self {
        Hamiltonian {
            transverse: spec.transverse_field,
            chain: if spec.has_chain() { spec.chain_decay } else { 0.0 },
            phi: spec.phi_prop,
            drive: spec.omega_drive,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.transverse == 0.0 && self.chain == 0.0 && self.drive == 0.0
    }

    /// Symbol value at a configuration.
    pub fn value(&self, z: &[PhasePoint]) -> f64 {
        let mut grad = vec![Vec3::zeros(); z.len()];
        self.gradient(z, &mut grad);
        let mut h = 0.0;
        for (m, zm) in z.iter().enumerate() {
            let s = zm.s_vec();
            h += self.transverse * s.x;
            let (sn, cs) = (self.phi * (m + 1) as f64).sin_cos();
            h += 2.0 * self.drive * (cs * s.x + sn * s.y);
            let c = grad[m] - self.local_gradient(m);
            h += 0.5 * (c.x * s.x + c.y * s.y);
        }
        h
    }

    /// Single-site terms. The drive `Ω Σ_m (e^{−iϕm} J⁺_m + h.c.)` induces
    /// dipoles `∝ e^{−iϕm}` that add up in `L_F = Σ_m e^{iϕm} J⁻_m`.
    fn local_gradient(&self, m: usize) -> Vec3 {
        let (sn, cs) = (self.phi * (m + 1) as f64).sin_cos();
        Vec3::new(self.transverse + 2.0 * self.drive * cs, 2.0 * self.drive * sn, 0.0)
    }

    /// `∇_S ℋ` per ensemble using running sums, O(M).
    pub fn gradient(&self, z: &[PhasePoint], out: &mut [Vec3]) {
        assert_eq!(z.len(), out.len());
        for (m, o) in out.iter_mut().enumerate() {
            *o = self.local_gradient(m);
        }
        if self.chain == 0.0 || z.len() < 2 {
            return;
        }
        let w = C64::from_polar(1.0, self.phi);
        let mut fx = C64::new(0.0, 0.0);
        let mut fy = C64::new(0.0, 0.0);
        for (m, zm) in z.iter().enumerate() {
            out[m].x += self.chain * fx.im;
            out[m].y += self.chain * fy.im;
            let s = zm.s_vec();
            fx = w * (fx + s.x);
            fy = w * (fy + s.y);
        }
        let mut bx = C64::new(0.0, 0.0);
        let mut by = C64::new(0.0, 0.0);
        for (m, zm) in z.iter().enumerate().rev() {
            out[m].x += self.chain * bx.im;
            out[m].y += self.chain * by.im;
            let s = zm.s_vec();
            bx = w * (bx + s.x);
            by = w * (by + s.y);
        }
    }

    /// Direct O(M²) evaluation of the chain coupling gradient.
    pub fn gradient_direct(&self, z: &[PhasePoint], out: &mut [Vec3]) {
        for (m, o) in out.iter_mut().enumerate() {
            *o = self.local_gradient(m);
            for (k, zk) in z.iter().enumerate() {
                if k == m {
                    continue;
                }
                let w = self.chain * (self.phi * (m as f64 - k as f64).abs()).sin();
                let s = zk.s_vec();
                o.x += w * s.x;
                o.y += w * s.y;
            }
        }
    }
}
