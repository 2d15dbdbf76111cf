use ensemble_twa::amplitude::LadderAmplitudes;
use ensemble_twa::hamiltonian::Hamiltonian;
use ensemble_twa::model::SystemSpec;
use ensemble_twa::phasespace::{
    canonical, collective_symbol, from_canonical, local_symbol, poisson_bracket, wigner_d_small, PhasePoint, Vec3,
    WeylSymbolValue,
};
use ensemble_twa::twa::{apply, trajectory, CoherentSampler, Field, Increment, TwaConfig};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = PhasePoint> {
    (-3.0..3.0f64, 0.2..2.9f64, -3.0..3.0f64, 0.5..20.0f64).prop_map(|(a, b, c, d)| PhasePoint::from_chart(a, b, c, d))
}

fn symbol(kind: u8, q: i32, j: i32, amps: &LadderAmplitudes, z: &PhasePoint) -> WeylSymbolValue {
    if kind == 0 {
        collective_symbol(q, z)
    } else {
        local_symbol(q, j, amps, z)
    }
}

fn symbol_spec() -> impl Strategy<Value = (u8, i32, i32)> {
    (0u8..2, -1i32..=1, -1i32..=1)
}

/// Central finite-difference gradient in canonical coordinates.
fn fd_gradient<F: Fn(&PhasePoint) -> C64>(f: F, z: &PhasePoint, h: f64) -> [C64; 4] {
    let x = canonical(z);
    let mut g = [C64::new(0.0, 0.0); 4];
    for k in 0..4 {
        let (mut a, mut b) = (x, x);
        a[k] += h;
        b[k] -= h;
        g[k] = (f(&from_canonical(a)) - f(&from_canonical(b))) / (2.0 * h);
    }
    g
}

/// Fourth-order central differences, for nested brackets.
fn fd_gradient4<F: Fn(&PhasePoint) -> C64>(f: F, z: &PhasePoint, h: f64) -> [C64; 4] {
    let x = canonical(z);
    let mut g = [C64::new(0.0, 0.0); 4];
    for k in 0..4 {
        let at = |s: f64| {
            let mut y = x;
            y[k] += s * h;
            f(&from_canonical(y))
        };
        g[k] = (at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * 8.0) / (12.0 * h);
    }
    g
}

fn bracket_of(ga: &[C64; 4], gb: &[C64; 4]) -> C64 {
    ga[0] * gb[1] - ga[1] * gb[0] + ga[2] * gb[3] - ga[3] * gb[2]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_matrix_rows_are_unit(theta in 0.0..std::f64::consts::PI, q in -1i32..=1) {
        let s: f64 = (-1..=1).map(|j| wigner_d_small(q, j, theta).powi(2)).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_is_antisymmetric_and_bilinear(z in point(), a in symbol_spec(), b in symbol_spec(), c in symbol_spec(),
                                             al in -2.0..2.0f64, be in -2.0..2.0f64) {
        let amps = LadderAmplitudes::new(12);
        let (sa, sb, sc) = (symbol(a.0, a.1, a.2, &amps, &z), symbol(b.0, b.1, b.2, &amps, &z), symbol(c.0, c.1, c.2, &amps, &z));
        let ab = poisson_bracket(&sa, &sb, &z).unwrap();
        let ba = poisson_bracket(&sb, &sa, &z).unwrap();
        prop_assert!((ab + ba).norm() <= 1e-12 * (1.0 + ab.norm()));
        let mut mix = sb;
        mix.value = sb.value * al + sc.value * be;
        for k in 0..4 {
            mix.gradient[k] = sb.gradient[k] * al + sc.gradient[k] * be;
        }
        let lhs = poisson_bracket(&sa, &mix, &z).unwrap();
        let rhs = ab * al + poisson_bracket(&sa, &sc, &z).unwrap() * be;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn symbol_gradients_match_finite_differences(z in point(), s in symbol_spec()) {
        let amps = LadderAmplitudes::new(12);
        let an = symbol(s.0, s.1, s.2, &amps, &z).gradient;
        let fd = fd_gradient(|w| symbol(s.0, s.1, s.2, &amps, w).value, &z, 1e-6);
        let scale = an.iter().map(|g| g.norm()).fold(1.0, f64::max);
        for k in 0..4 {
            prop_assert!((an[k] - fd[k]).norm() <= 1e-5 * scale, "k={} {} vs {}", k, an[k], fd[k]);
        }
    }

    #[test]
    fn jacobi_identity(z in point(), a in symbol_spec(), b in symbol_spec(), c in symbol_spec()) {
        let amps = LadderAmplitudes::new(12);
        let sym = |s: (u8, i32, i32), w: &PhasePoint| symbol(s.0, s.1, s.2, &amps, w);
        let inner = |x: (u8, i32, i32), y: (u8, i32, i32)| {
            move |w: &PhasePoint| poisson_bracket(&sym(x, w), &sym(y, w), w).unwrap()
        };
        let h = 1e-3;
        let term = |x: (u8, i32, i32), y, u| bracket_of(&sym(x, &z).gradient, &fd_gradient4(inner(y, u), &z, h));
        let total = term(a, b, c) + term(b, c, a) + term(c, a, b);
        let scale = [term(a, b, c), term(b, c, a), term(c, a, b)].iter().map(|t| t.norm()).fold(1.0, f64::max);
        prop_assert!(total.norm() <= 1e-8 * scale, "{total} at scale {scale}");
    }

    #[test]
    fn collective_symbols_ignore_psi(z in point(), q in -1i32..=1, dpsi in -3.0..3.0f64) {
        let c = z.chart();
        let w = PhasePoint::from_chart(c.phi, c.theta, c.psi + dpsi, c.jcal);
        prop_assert!((collective_symbol(q, &z).value - collective_symbol(q, &w).value).norm() < 1e-10);
    }

    #[test]
    fn local_symbol_modulus_ignores_psi(z in point(), q in -1i32..=1, j in -1i32..=1, dpsi in -3.0..3.0f64) {
        let amps = LadderAmplitudes::new(9);
        let c = z.chart();
        let w = PhasePoint::from_chart(c.phi, c.theta, c.psi + dpsi, c.jcal);
        let (a, b) = (local_symbol(q, j, &amps, &z).value, local_symbol(q, j, &amps, &w).value);
        prop_assert!((a.norm() - b.norm()).abs() < 1e-10);
        if j == 0 {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn running_sum_gradient_matches_direct(m in 1usize..12, phi in -3.2..3.2f64, drive in 0.0..2.0f64, seed in 0u64..1000) {
        let mut spec = SystemSpec::chain(m, 5, 1.3, phi);
        spec.omega_drive = drive;
        let h = Hamiltonian::new(&spec);
        let z: Vec<PhasePoint> = (0..m)
            .map(|k| {
                let x = (seed + 7 * k as u64) as f64;
                PhasePoint::from_chart(x.sin() * 3.0, 1.0 + 0.8 * (1.3 * x).cos(), 0.0, 1.0 + (x * 0.37).sin().abs() * 4.0)
            })
            .collect();
        let (mut a, mut b) = (vec![Vec3::zeros(); m], vec![Vec3::zeros(); m]);
        h.gradient(&z, &mut a);
        h.gradient_direct(&z, &mut b);
        for k in 0..m {
            prop_assert!((a[k] - b[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn apply_keeps_frame_orthonormal(z in point(), w in prop::array::uniform3(-1.0..1.0f64), dp in -30.0..5.0f64) {
        let out = apply(&z, &Increment { rot: Vec3::new(w[0], w[1], w[2]), dp });
        prop_assert!((out.n.norm() - 1.0).abs() < 1e-12);
        prop_assert!((out.e1.norm() - 1.0).abs() < 1e-12);
        prop_assert!(out.n.dot(&out.e1).abs() < 1e-12);
        prop_assert!(out.p >= 0.0);
    }
}

#[test]
fn spin_length_is_conserved_without_local_dissipation() {
    let mut spec = SystemSpec::single(40);
    spec.collective.decay = 1.0;
    spec.collective.dephasing = 0.5;
    spec.transverse_field = 30.0;
    let field = Field::new(&spec);
    let sampler = CoherentSampler::new(40);
    let cfg = TwaConfig::new(1e-3, 2.0, 100, 1, 5);
    for index in 0..8 {
        let mut lens = Vec::new();
        assert!(trajectory(&field, &sampler, &cfg, index, |_, z| lens.push(z[0].jcal())));
        let drift = lens.iter().map(|j| (j - lens[0]).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-8 * cfg.t_max, "{drift}");
    }

    let mut chain = SystemSpec::chain(5, 30, 1.0, 0.9);
    chain.omega_drive = 3.0;
    let field = Field::new(&chain);
    let mut lens = Vec::new();
    assert!(trajectory(&field, &CoherentSampler::new(30), &cfg, 0, |_, z| lens.push(z.iter().map(|p| p.jcal()).collect::<Vec<_>>())));
    for rec in &lens {
        for (a, b) in rec.iter().zip(&lens[0]) {
            assert!((a - b).abs() < 1e-8 * cfg.t_max);
        }
    }
}
