//! Initial-state sampling around a coherent spin state.
//!
//! The spin length is fixed at `P = (N+1)/2`, both azimuths are uniform and
//! the polar deviation `x = P(1 − cos θ)` is Gamma distributed with shape
//! `(N+2)/N` and mean 1/2, truncated to `[0, 2P]`. The first two moments of
//! `x` then reproduce `⟨J^z⟩ = N/2` and `⟨J⁺J⁻⟩ = N` of the polarized state.

use nalgebra::{DMatrix, Rotation3, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::phasespace::{PhasePoint, Vec3};

/// Orientation of the coherent state each ensemble starts in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    /// Polar angle from +z; 0 is fully excited, π is the ground state.
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl InitialState {
    pub fn excited() -> Self {
        InitialState { theta: 0.0, phi: 0.0 }
    }

    pub fn ground() -> Self {
        InitialState { theta: std::f64::consts::PI, phi: 0.0 }
    }

    pub fn rotation(&self) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&Vec3::z_axis(), self.phi) * Rotation3::from_axis_angle(&Vec3::y_axis(), self.theta)
    }
}

/// Sampler for one ensemble of `n` emitters.
#[derive(Clone, Copy, Debug)]
pub struct CoherentSampler {
    pub p: f64,
    pub shape: f64,
    pub scale: f64,
    gamma: Gamma<f64>,
}

impl CoherentSampler {
    pub fn new(n: usize) -> Self {
        let nf = n as f64;
        let p = (nf + 1.0) / 2.0;
        let shape = (nf + 2.0) / nf;
        let mut s = Self::with_params(p, shape, 0.5 / shape);
        if 2.0 * p < 60.0 * s.scale {
            s.refine();
        }
        s
    }

    fn with_params(p: f64, shape: f64, scale: f64) -> Self {
        CoherentSampler { p, shape, scale, gamma: Gamma::new(shape, scale).expect("valid gamma") }
    }

    /// Truncated first and second moments of `x`.
    pub fn x_moments(&self) -> (f64, f64) {
        let q = self.x_quadrature(24, 16);
        (q.iter().map(|(x, w)| x * w).sum(), q.iter().map(|(x, w)| x * x * w).sum())
    }

    /// Newton iteration on `(ln k, ln θ)` restoring the target moments after
    /// truncation.
    fn refine(&mut self) {
        let target = [0.5, self.p / (2.0 * self.p + 1.0)];
        let mut u = [self.shape.ln(), self.scale.ln()];
        let resid = |u: [f64; 2]| {
            let (m1, m2) = Self::with_params(self.p, u[0].exp(), u[1].exp()).x_moments();
            [m1 - target[0], m2 - target[1]]
        };
        for _ in 0..30 {
            let r = resid(u);
            if r[0].abs().max(r[1].abs()) < 1e-13 {
                break;
            }
            let h = 1e-6;
            let ra = resid([u[0] + h, u[1]]);
            let rb = resid([u[0], u[1] + h]);
            let j = [[(ra[0] - r[0]) / h, (rb[0] - r[0]) / h], [(ra[1] - r[1]) / h, (rb[1] - r[1]) / h]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            u[0] -= (j[1][1] * r[0] - j[0][1] * r[1]) / det;
            u[1] -= (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        }
        *self = Self::with_params(self.p, u[0].exp(), u[1].exp());
    }

    /// Polar deviation by rejection from the untruncated law.
    pub fn sample_x<R: Rng>(&self, rng: &mut R) -> f64 {
        loop {
            let x = self.gamma.sample(rng);
            if x <= 2.0 * self.p {
                return x;
            }
        }
    }

    /// Point about +z for polar deviation `x` and azimuths `φ`, `ψ`.
    pub fn point(&self, x: f64, phi: f64, psi: f64) -> PhasePoint {
        let cz = (1.0 - x / self.p).clamp(-1.0, 1.0);
        PhasePoint::from_chart(phi, cz.acos(), psi, self.p - 0.5)
    }

    pub fn sample<R: Rng>(&self, init: &InitialState, rng: &mut R) -> PhasePoint {
        let x = self.sample_x(rng);
        let (v, w) = (rng.random::<f64>(), rng.random::<f64>());
        rotate_point(&self.point(x, TAU * v, TAU * w), &init.rotation())
    }

    /// Unnormalized density of `x`.
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 || x > 2.0 * self.p {
            return 0.0;
        }
        x.powf(self.shape - 1.0) * (-x / self.scale).exp()
    }

    /// Normalized quadrature `(x_i, w_i)` for expectations over `x`, using
    /// composite Gauss–Legendre panels on the effective support.
    pub fn x_quadrature(&self, panels: usize, order: usize) -> Vec<(f64, f64)> {
        let top = (2.0 * self.p).min(80.0 * self.scale);
        let (nodes, weights) = gauss_legendre(order);
        let mut out = Vec::with_capacity(panels * order);
        // graded panels resolve the x^{k-1} cusp at the origin
        let edge = |i: usize| top * (i as f64 / panels as f64).powi(4);
        for i in 0..panels {
            let (a, b) = (edge(i), edge(i + 1));
            let h = 0.5 * (b - a);
            for (t, w) in nodes.iter().zip(&weights) {
                let x = a + h * (t + 1.0);
                out.push((x, w * h * self.density(x)));
            }
        }
        let z: f64 = out.iter().map(|p| p.1).sum();
        for p in out.iter_mut() {
            p.1 /= z;
        }
        out
    }
}

pub fn rotate_point(z: &PhasePoint, r: &Rotation3<f64>) -> PhasePoint {
    PhasePoint { n: r * z.n, e1: r * z.e1, p: z.p }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` from the Jacobi matrix.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> =
        (0..order).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
