//! Extended phase space of a variable-length collective spin.
//!
//! A point is stored extrinsically as the spin length `P = 𝒥 + 1/2`, the unit
//! orientation `n` and a unit body axis `e1` perpendicular to `n`. The triple
//! `(e1, n × e1, n)` is the rotated frame `R = Rz(φ) Ry(θ) Rz(ψ)` applied to
//! `(x̂, ŷ, ẑ)`, so all four chart coordinates `(φ, θ, ψ, 𝒥)` can be read off
//! without ever integrating in the chart.

use nalgebra::Vector3;
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::amplitude::LadderAmplitudes;
use crate::error::PhaseSpaceError;

pub type Vec3 = Vector3<f64>;
pub type CVec3 = Vector3<C64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// One ensemble's semiclassical state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub n: Vec3,
    pub e1: Vec3,
    pub p: f64,
}

/// Intrinsic chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chart {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub jcal: f64,
}

impl PhasePoint {
    pub fn from_chart(phi: f64, theta: f64, psi: f64, jcal: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let n = Vec3::new(st * cp, st * sp, ct);
        let e_theta = Vec3::new(ct * cp, ct * sp, -st);
        let e_phi = Vec3::new(-sp, cp, 0.0);
        let (ss, cs) = psi.sin_cos();
        PhasePoint { n, e1: e_theta * cs + e_phi * ss, p: jcal + 0.5 }
    }

    /// Builds a point from the spin vector and the auxiliary angle.
    pub fn from_s_psi(s: Vec3, psi: f64) -> Result<Self, PhaseSpaceError> {
        let p = s.norm();
        if !(p > 0.0) || !p.is_finite() {
            return Err(PhaseSpaceError::Singular);
        }
        let n = s / p;
        let theta = n.z.clamp(-1.0, 1.0).acos();
        let phi = n.y.atan2(n.x);
        let mut z = Self::from_chart(phi, theta, psi, p - 0.5);
        z.n = n;
        Ok(z)
    }

    pub fn s_vec(&self) -> Vec3 {
        self.n * self.p
    }

    pub fn e2(&self) -> Vec3 {
        self.n.cross(&self.e1)
    }

    pub fn jcal(&self) -> f64 {
        self.p - 0.5
    }

    pub fn chart(&self) -> Chart {
        let phi = self.n.y.atan2(self.n.x);
        let theta = self.n.z.clamp(-1.0, 1.0).acos();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let e_theta = Vec3::new(ct * cp, ct * sp, -st);
        let e_phi = Vec3::new(-sp, cp, 0.0);
        let psi = self.e1.dot(&e_phi).atan2(self.e1.dot(&e_theta));
        Chart { phi, theta, psi, jcal: self.jcal() }
    }

    /// Rotates the body frame by the rotation vector `w` (axis times angle).
    pub fn rotate(&mut self, w: &Vec3) {
        self.n = rodrigues(&self.n, w);
        self.e1 = rodrigues(&self.e1, w);
    }

    /// Removes rounding drift from the frame.
    pub fn reorthonormalize(&mut self) {
        self.n /= self.n.norm();
        self.e1 -= self.n * self.n.dot(&self.e1);
        self.e1 /= self.e1.norm();
    }

    /// Spherical frame vectors `V_j = R ê_j` for j = -1, 0, +1.
    pub fn frame_spherical(&self) -> [CVec3; 3] {
        let e2 = self.e2();
        let a = self.e1.map(C64::from);
        let b = e2.map(|x| C64::new(0.0, x));
        [
            (a - b) * C64::from(FRAC_1_SQRT_2),
            self.n.map(C64::from),
            -(a + b) * C64::from(FRAC_1_SQRT_2),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite()
            && self.n.iter().all(|x| x.is_finite())
            && self.e1.iter().all(|x| x.is_finite())
    }
}

pub fn rodrigues(v: &Vec3, w: &Vec3) -> Vec3 {
    let th2 = w.norm_squared();
    if th2 < 1e-30 {
        return v + w.cross(v);
    }
    let th = th2.sqrt();
    let k = w / th;
    let (s, c) = th.sin_cos();
    v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

/// Spherical basis vector ê_q.
pub fn spherical_basis(q: i32) -> CVec3 {
    match q {
        1 => CVec3::new(C64::new(-FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2), C64::new(0.0, 0.0)),
        0 => CVec3::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        -1 => CVec3::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2), C64::new(0.0, 0.0)),
        _ => panic!("spherical index {q} out of range"),
    }
}

fn check_index(k: i32) {
    assert!((-1..=1).contains(&k), "spin-1 index {k} out of range");
}

/// Spin-1 little-d element d¹_{qj}(θ).
pub fn wigner_d_small(q: i32, j: i32, theta: f64) -> f64 {
    check_index(q);
    check_index(j);
    let (s, c) = theta.sin_cos();
    match (q, j) {
        (1, 1) | (-1, -1) => 0.5 * (1.0 + c),
        (1, -1) | (-1, 1) => 0.5 * (1.0 - c),
        (1, 0) | (0, -1) => -s * FRAC_1_SQRT_2,
        (0, 1) | (-1, 0) => s * FRAC_1_SQRT_2,
        _ => c,
    }
}

/// θ-derivative of [`wigner_d_small`].
pub fn wigner_d_small_deriv(q: i32, j: i32, theta: f64) -> f64 {
    check_index(q);
    check_index(j);
    let (s, c) = theta.sin_cos();
    match (q, j) {
        (1, 1) | (-1, -1) => -0.5 * s,
        (1, -1) | (-1, 1) => 0.5 * s,
        (1, 0) | (0, -1) => -c * FRAC_1_SQRT_2,
        (0, 1) | (-1, 0) => c * FRAC_1_SQRT_2,
        _ => -s,
    }
}

/// Full spin-1 Wigner D element in the z-y-z convention.
pub fn wigner_d(q: i32, j: i32, phi: f64, theta: f64, psi: f64) -> C64 {
    C64::from_polar(1.0, -(q as f64) * phi - (j as f64) * psi) * wigner_d_small(q, j, theta)
}

/// Symbol value with its gradient in the canonical chart `(φ, p_φ, ψ, p_ψ)`,
/// where `p_φ = S_z` and `p_ψ = 𝒥 + 1/2`.
#[derive(Clone, Copy, Debug)]
pub struct WeylSymbolValue {
    pub value: C64,
    pub gradient: [C64; 4],
}

/// Canonical coordinates `(φ, S_z, ψ, P)` of a point.
pub fn canonical(z: &PhasePoint) -> [f64; 4] {
    let c = z.chart();
    [c.phi, z.p * z.n.z, c.psi, z.p]
}

pub fn from_canonical(x: [f64; 4]) -> PhasePoint {
    let theta = (x[1] / x[3]).clamp(-1.0, 1.0).acos();
    PhasePoint::from_chart(x[0], theta, x[2], x[3] - 0.5)
}

/// Symbol `χ(P) e^{iqφ} d_{qj}(θ) e^{ijψ}` with chart gradient.
fn rotor_symbol(q: i32, j: i32, chi: f64, dchi: f64, z: &PhasePoint) -> WeylSymbolValue {
    let c = z.chart();
    let p = z.p;
    let (st, ct) = c.theta.sin_cos();
    let phase = C64::from_polar(1.0, q as f64 * c.phi + j as f64 * c.psi);
    let d = wigner_d_small(q, j, c.theta);
    let dd = wigner_d_small_deriv(q, j, c.theta);
    let value = phase * (chi * d);
    // θ = acos(S_z / P): ∂θ/∂S_z = -1/(P sinθ), ∂θ/∂P = cosθ/(P sinθ).
    let dth_du = -1.0 / (p * st);
    let dth_dp = ct / (p * st);
    let g_phi = value * I * q as f64;
    let g_psi = value * I * j as f64;
    let g_u = phase * (chi * dd * dth_du);
    let g_p = phase * (dchi * d + chi * dd * dth_dp);
    WeylSymbolValue { value, gradient: [g_phi, g_u, g_psi, g_p] }
}

/// Collective χ_q(P): J^z ↔ S_z, J^± ↔ S_x ± i S_y.
pub fn collective_chi(q: i32, p: f64) -> f64 {
    match q {
        0 => p,
        1 => -SQRT_2 * p,
        -1 => SQRT_2 * p,
        _ => panic!("collective index {q} out of range"),
    }
}

pub fn collective_symbol(q: i32, z: &PhasePoint) -> WeylSymbolValue {
    check_index(q);
    let chi = collective_chi(q, z.p);
    rotor_symbol(q, 0, chi, chi / z.p, z)
}

pub fn local_symbol(q: i32, j: i32, amps: &LadderAmplitudes, z: &PhasePoint) -> WeylSymbolValue {
    check_index(q);
    check_index(j);
    let (chi, dchi) = amps.chi(q, j, z.p);
    rotor_symbol(q, j, chi, dchi, z)
}

/// Poisson bracket of two symbols through the canonical chart.
pub fn poisson_bracket(a: &WeylSymbolValue, b: &WeylSymbolValue, z: &PhasePoint) -> Result<C64, PhaseSpaceError> {
    if !(z.p > 0.0) {
        return Err(PhaseSpaceError::Singular);
    }
    let (ga, gb) = (&a.gradient, &b.gradient);
    Ok(ga[0] * gb[1] - ga[1] * gb[0] + ga[2] * gb[3] - ga[3] * gb[2])
}

/// Extrinsic representation of a symbol: value, rotational gradient `τ`
/// (δG = τ·ω under δe = ω × e) and the radial derivative at fixed frame.
#[derive(Clone, Copy, Debug)]
pub struct FrameGradient {
    pub value: C64,
    pub tau: CVec3,
    pub dp: C64,
}

/// Hamiltonian vector field of a symbol: frame angular velocity and `dP/dt`.
#[derive(Clone, Copy, Debug)]
pub struct Flow {
    pub omega: CVec3,
    pub pdot: C64,
}

impl FrameGradient {
    pub fn flow(&self, z: &PhasePoint) -> Flow {
        let n = z.n.map(C64::from);
        Flow {
            omega: self.tau.cross(&n) * C64::from(1.0 / z.p) + n * self.dp,
            pdot: -n.dot(&self.tau),
        }
    }
}

/// Bracket in the extrinsic representation.
pub fn frame_bracket(a: &FrameGradient, b: &FrameGradient, z: &PhasePoint) -> C64 {
    let n = z.n.map(C64::from);
    n.dot(&a.tau.cross(&b.tau)) / z.p + n.dot(&a.tau) * b.dp - n.dot(&b.tau) * a.dp
}

pub fn collective_frame(q: i32, z: &PhasePoint) -> FrameGradient {
    let e = spherical_basis(q);
    let n = z.n.map(C64::from);
    let k = collective_chi(q, z.p);
    FrameGradient { value: e.dot(&n) * k, tau: n.cross(&e) * C64::from(k), dp: e.dot(&n) * (k / z.p) }
}

pub fn local_frame(q: i32, j: i32, amps: &LadderAmplitudes, z: &PhasePoint) -> FrameGradient {
    let v = z.frame_spherical()[(j + 1) as usize].map(|x| x.conj());
    let e = spherical_basis(q);
    let (chi, dchi) = amps.chi(q, j, z.p);
    let d = e.dot(&v);
    FrameGradient { value: d * chi, tau: v.cross(&e) * C64::from(chi), dp: d * dchi }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_round_trip() {
        let z = PhasePoint::from_chart(0.7, 1.1, -2.3, 3.5);
        let c = z.chart();
        assert!((c.phi - 0.7).abs() < 1e-12);
        assert!((c.theta - 1.1).abs() < 1e-12);
        assert!((c.psi + 2.3).abs() < 1e-12);
        assert!((z.p - 4.0).abs() < 1e-15);
    }

    #[test]
    fn d_matrix_matches_frame_construction() {
        let (phi, theta, psi) = (0.4, 1.3, -0.9);
        let z = PhasePoint::from_chart(phi, theta, psi, 2.0);
        let v = z.frame_spherical();
        for q in -1..=1 {
            for j in -1..=1 {
                let via_frame = spherical_basis(q).map(|x| x.conj()).dot(&v[(j + 1) as usize]);
                let direct = wigner_d(q, j, phi, theta, psi);
                assert!((via_frame - direct).norm() < 1e-12, "q={q} j={j}");
            }
        }
    }

    #[test]
    fn small_d_examples() {
        assert!((wigner_d_small(0, 0, 0.3) - 0.3f64.cos()).abs() < 1e-15);
        assert_eq!(wigner_d_small(1, 1, 0.0), 1.0);
        assert!((wigner_d_small(1, 0, std::f64::consts::FRAC_PI_2) + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn small_d_rejects_bad_index() {
        wigner_d_small(2, 0, 0.1);
    }

    #[test]
    fn collective_symbols_are_spin_components() {
        let z = PhasePoint::from_chart(0.3, 0.8, 1.7, 4.5);
        let s = z.s_vec();
        assert!((collective_symbol(0, &z).value - C64::new(s.z, 0.0)).norm() < 1e-12);
        assert!((collective_symbol(1, &z).value - C64::new(s.x, s.y)).norm() < 1e-12);
        assert!((collective_symbol(-1, &z).value - C64::new(s.x, -s.y)).norm() < 1e-12);
        assert!((collective_frame(-1, &z).value - C64::new(s.x, -s.y)).norm() < 1e-12);
    }

    #[test]
    fn canonical_pairs() {
        let z = PhasePoint::from_chart(0.3, 0.8, 1.7, 4.5);
        let unit = |k: usize| {
            let mut g = [C64::new(0.0, 0.0); 4];
            g[k] = C64::new(1.0, 0.0);
            WeylSymbolValue { value: C64::new(0.0, 0.0), gradient: g }
        };
        assert!((poisson_bracket(&unit(0), &unit(1), &z).unwrap() - 1.0).norm() < 1e-15);
        assert!((poisson_bracket(&unit(2), &unit(3), &z).unwrap() - 1.0).norm() < 1e-15);
        let mut bad = z;
        bad.p = 0.0;
        assert!(poisson_bracket(&unit(0), &unit(1), &bad).is_err());
    }
}
