//! Acceptance suite. Prints one PASS/FAIL line per criterion and always
//! exits 0; failures are reported, not enforced.

use std::f64::consts::PI;
use std::time::Instant;

use ensemble_twa::chain::{directionality_sweep, p_grid, run_chain, structure_peaks, SweepSpec};
use ensemble_twa::exact::ode::Dopri5;
use ensemble_twa::exact::{BruteForce, DickeSolver, DickeState, Moments};
use ensemble_twa::model::{Polarization, SystemSpec};
use ensemble_twa::observables::{s_series, xi2_series, SingleProbe};
use ensemble_twa::twa::{run, trajectory, CoherentSampler, Field, InitialState, TwaConfig, TwaResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    passed: usize,
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, ok: bool, detail: String, start: Instant) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        println!("{} {name}: {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
}

fn tight() -> Dopri5 {
    Dopri5 { rtol: 1e-11, atol: 1e-13, ..Default::default() }
}

fn exact_from_up(spec: &SystemSpec, times: &[f64]) -> Vec<Moments> {
    let mut d = DickeSolver::new(spec).unwrap();
    d.ode = tight();
    d.evolve(&d.initial(Polarization::Up), times).unwrap()
}

fn twa(spec: &SystemSpec, dt: f64, t_max: f64, records: usize, n_traj: usize, seed: u64) -> TwaResult {
    let steps = (t_max / dt).round() as usize;
    let cfg = TwaConfig::new(dt, t_max, (steps / records).max(1), n_traj, seed);
    run(spec, &cfg, &SingleProbe).unwrap()
}

fn laser(n: usize) -> SystemSpec {
    let mut s = SystemSpec::single(n);
    s.collective.decay = 1.0;
    s.local.pumping = 0.25 * n as f64;
    s
}

/// Largest deviation of `⟨J⁺J⁻⟩/N²` and `⟨J^z⟩/N` from the exact solution.
fn laser_error(r: &TwaResult, ex: &[Moments], n: usize) -> f64 {
    let nf = n as f64;
    let mut e = 0.0f64;
    for (k, m) in ex.iter().enumerate() {
        e = e.max((r.mean(k, "jpjm") - m.jpjm).abs() / (nf * nf));
        e = e.max((r.mean(k, "jz") - m.jz).abs() / nf);
    }
    e
}

fn oracle(rep: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=5 {
        let mut specs = Vec::new();
        for q in -1..=1 {
            for collective in [true, false] {
                let mut s = SystemSpec::single(n);
                if collective {
                    s.collective.set(q, 0.7);
                } else {
                    s.local.set(q, 0.9);
                }
                specs.push((s, 1.1, 0.4));
            }
        }
        for _ in 0..3 {
            let mut s = SystemSpec::single(n);
            for q in -1..=1 {
                s.collective.set(q, rng.random_range(0.0..1.0));
                s.local.set(q, rng.random_range(0.0..1.0));
            }
            specs.push((s, rng.random_range(0.0..3.0), rng.random_range(0.0..6.0)));
        }
        for (s, th, ph) in specs {
            let mut d = DickeSolver::new(&s).unwrap();
            d.ode = tight();
            let mut b = BruteForce::new(&s).unwrap();
            b.ode = tight();
            let a = d.evolve(&DickeState::coherent(d.space(), th, ph), &grid).unwrap();
            let c = b.evolve(&b.coherent(th, ph), &grid).unwrap();
            for (x, y) in a.iter().zip(&c) {
                let y = &y.moments[0];
                worst = worst.max((x.jz - y.jz).abs()).max((x.jpjm - y.jpjm).abs()).max((x.xi2(n) - y.xi2(n)).abs());
                if y.jz + n as f64 / 2.0 > 1e-3 {
                    worst = worst.max((x.s_ratio(n) - y.s_ratio(n)).abs());
                }
            }
            cases += 1;
        }
    }
    rep.line("oracle equivalence", worst < 1e-8, format!("{cases} cases, N ≤ 5, max gap {worst:.2e} (tol 1e-8)"), start);
}

fn single_emitter(rep: &mut Report) {
    let start = Instant::now();
    let mut s = SystemSpec::single(1);
    s.local.decay = 1.0;
    let times: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
    let ex = exact_from_up(&s, &times);
    let gap = ex.iter().zip(&times).map(|(m, t)| (m.jpjm - (-t).exp()).abs()).fold(0.0, f64::max);
    rep.line("single emitter exact", gap < 1e-8, format!("max |⟨σ⁺σ⁻⟩ − e^(−γt)| = {gap:.2e} (tol 1e-8)"), start);

    let start = Instant::now();
    let a = twa(&s, 0.02, 2.0, 20, 100_000, 1);
    let b = twa(&s, 0.01, 2.0, 20, 100_000, 2);
    // for one emitter σ⁺σ⁻ = J^z + 1/2; the on-site J⁺J⁻ symbol is shown too
    let est = |r: &TwaResult, k: usize| r.mean(k, "jz") + 0.5;
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    for k in 0..a.times.len() {
        let t = a.times[k];
        let dev = (est(&b, k) - (-t).exp()).abs();
        let allowed = 3.0 * b.stderr(k, "jz") + (est(&a, k) - est(&b, k)).abs();
        if dev - allowed > worst.0 - worst.1 {
            worst = (dev, allowed, t, b.mean(k, "jpjm"));
        }
    }
    rep.line(
        "single emitter TWA",
        worst.0 <= worst.1,
        format!(
            "worst at t={:.1}: |⟨J^z⟩ + 1/2 − e^(−γt)| {:.4} vs 3SE+dt {:.4} (e^(−γt) = {:.4}; on-site J⁺J⁻ symbol gives {:.4})",
            worst.2,
            worst.0,
            worst.1,
            (-worst.2).exp(),
            worst.3
        ),
        start,
    );
}

fn superradiant_laser(rep: &mut Report) {
    let start = Instant::now();
    let mut errs = Vec::new();
    for (n, traj) in [(10usize, 4000usize), (100, 1000)] {
        let s = laser(n);
        let t_max = 50.0 / n as f64;
        let r = twa(&s, 0.02 / s.rate_scale(), t_max, 100, traj, 1);
        let ex = exact_from_up(&s, &r.times);
        errs.push(laser_error(&r, &ex, n));
    }
    rep.line(
        "laser N=10 error",
        errs[0] < 0.1,
        format!("max-abs error of ⟨J⁺J⁻⟩/N², ⟨J^z⟩/N = {:.4} (tol 0.1)", errs[0]),
        start,
    );
    rep.line("laser error shrinks with N", errs[1] < errs[0], format!("N=100 {:.4} < N=10 {:.4}", errs[1], errs[0]), start);
}

fn nonclassicality(rep: &mut Report) {
    let start = Instant::now();
    let n = 25;
    let mut s = SystemSpec::single(n);
    s.collective.decay = 1.0;
    s.local.pumping = 0.4;
    let r = twa(&s, 0.02 / s.rate_scale(), 4.0, 200, 4000, 2);
    let ex = exact_from_up(&s, &r.times);
    let xi = xi2_series(&r, n);
    let sv = s_series(&r, n);
    let (k_min, &(xi_min, xi_se)) = xi.iter().enumerate().min_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).unwrap();
    let xi_ex_min = ex.iter().map(|m| m.xi2(n)).fold(f64::INFINITY, f64::min);
    let gap = (xi_min - ex[k_min].xi2(n)).abs();
    rep.line(
        "squeezing minimum",
        xi_min + 3.0 * xi_se < 1.0 && gap < 0.05,
        format!("TWA ξ² min {xi_min:.3} ± {xi_se:.3} at t={:.2}, exact there {:.3} (exact min {xi_ex_min:.3})", r.times[k_min], ex[k_min].xi2(n)),
        start,
    );

    let below: Vec<usize> = (0..sv.len()).filter(|&k| sv[k].0 + 3.0 * sv[k].1 < 1.0).collect();
    let ex_below = ex.iter().filter(|m| m.s_ratio(n) < 1.0).count();
    // s spans two decades, so deviations are judged relative to s itself
    let mut bright = (0.0f64, 0.0, 0.0);
    let mut dim = (0.0f64, f64::NAN);
    for (k, m) in ex.iter().enumerate() {
        let se = m.s_ratio(n);
        let excess = (sv[k].0 - se).abs() / (0.05 * se).max(3.0 * sv[k].1);
        if m.jpjm > 2.0 {
            if excess > bright.0 {
                bright = (excess, r.times[k], (sv[k].0 - se) / se);
            }
        } else if excess > dim.0 {
            dim = (excess, m.jpjm);
        }
    }
    rep.line(
        "subradiant window",
        !below.is_empty() && ex_below > 0,
        format!(
            "TWA s < 1 at {} records from t={:.2}; exact s < 1 at {ex_below} records",
            below.len(),
            below.first().map(|&k| r.times[k]).unwrap_or(f64::NAN)
        ),
        start,
    );
    rep.line(
        "s deviations confined to dim regime",
        bright.0 <= 1.0,
        format!(
            "|Δs| in units of max(5% of s, 3SE): worst {:.2} where exact ⟨J⁺J⁻⟩ > 2 (t={:.2}, Δs/s = {:+.1}%), worst {:.2} (at ⟨J⁺J⁻⟩ = {:.2}) below",
            bright.0,
            bright.1,
            100.0 * bright.2,
            dim.0,
            dim.1
        ),
        start,
    );
}

fn peak_to_peak(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn time_crystal(rep: &mut Report) {
    let start = Instant::now();
    let n = 50;
    let nf = n as f64;
    let base = |omega: f64| {
        let mut s = SystemSpec::single(n);
        s.collective.decay = 1.0;
        s.transverse_field = omega;
        s
    };
    let t_max = 20.0 / nf;
    let run_pair = |s: &SystemSpec| {
        let r = twa(s, 0.02 / s.rate_scale(), t_max, 200, 2000, 7);
        let ex = exact_from_up(s, &r.times);
        let jz: Vec<f64> = r.series("jz").iter().map(|v| v / nf).collect();
        let err = ex.iter().zip(&jz).map(|(m, v)| (m.jz / nf - v).abs()).fold(0.0, f64::max);
        (jz, err)
    };

    let (jz, err) = run_pair(&base(nf));
    let q = jz.len() / 4;
    let (early, late) = (peak_to_peak(&jz[..q]), peak_to_peak(&jz[3 * q..]));
    rep.line(
        "time crystal undamped",
        late > 0.5 * early && late > 0.3,
        format!("peak-to-peak ⟨J^z⟩/N first quarter {early:.3}, last quarter {late:.3}; TWA vs exact {err:.4}"),
        start,
    );

    for (label, q) in [("dephasing", 0), ("decay", -1)] {
        let start = Instant::now();
        let mut s = base(nf);
        s.local.set(q, 0.2 * nf);
        let (jz, err) = run_pair(&s);
        let late = peak_to_peak(&jz[3 * jz.len() / 4..]);
        rep.line(
            &format!("time crystal with local {label}"),
            err < 0.05,
            format!("max |Δ⟨J^z⟩/N| = {err:.4} (tol 0.05); late peak-to-peak {late:.3}"),
            start,
        );
    }

    let start = Instant::now();
    let (jz, err) = run_pair(&base(0.4 * nf));
    let late = peak_to_peak(&jz[jz.len() / 2..]);
    rep.line(
        "no oscillations below threshold",
        late < 0.05,
        format!("Ω = 0.4N: peak-to-peak ⟨J^z⟩/N over second half {late:.4} (tol 0.05); TWA vs exact {err:.4}"),
        start,
    );
}

/// Mean of `name` over records `lo..` with the average per-record error.
fn window_mean(r: &TwaResult, name: &str, lo: usize) -> (f64, f64) {
    let k = (r.times.len() - lo) as f64;
    let m = (lo..r.times.len()).map(|i| r.mean(i, name)).sum::<f64>() / k;
    let se = (lo..r.times.len()).map(|i| r.stderr(i, name)).sum::<f64>() / k;
    (m, se)
}

fn chain_validation(rep: &mut Report) {
    let start = Instant::now();
    let phi = PI / 4.0;
    let mut lines = Vec::new();
    let mut worst = 0.0f64;
    for (n, pump) in [(2usize, 1.0), (3, 1.5), (2, 2.0), (3, 3.0)] {
        let mut s = SystemSpec::chain(2, n, 1.0, phi);
        s.local.pumping = pump;
        let mut cfg = TwaConfig::new(2e-3, 4.0, 100, 4000, 21);
        cfg.initial = InitialState::ground();
        let r = run_chain(&s, &cfg, &[], false).unwrap();
        let b = BruteForce::new(&s).unwrap();
        let rec = b.evolve(&b.polarized(Polarization::Down), &r.times).unwrap();
        let lo = r.times.len() / 2;
        let (tw, se) = window_mean(&r, "I_F", lo);
        let ex = rec[lo..].iter().map(|x| x.forward(phi)).sum::<f64>() / (rec.len() - lo) as f64;
        let rel = (tw - ex).abs() / ex;
        worst = worst.max(rel);
        lines.push(format!("N={n} γ={pump}: TWA {tw:.3} ± {se:.3} vs exact {ex:.3} ({:.0}%)", 100.0 * rel));
    }
    rep.line("chain M=2 small N vs brute force", worst < 0.15, format!("steady ⟨I_F⟩ {} (tol 15%)", lines.join("; ")), start);

    let start = Instant::now();
    let steady = |phi: f64| {
        let mut s = SystemSpec::chain(2, 20, 1.0, phi);
        s.local.pumping = 10.0;
        let mut cfg = TwaConfig::new(5e-4, 3.0, 60, 400, 3);
        cfg.initial = InitialState::ground();
        let r = run_chain(&s, &cfg, &[], false).unwrap();
        window_mean(&r, "I_F", 2 * r.times.len() / 3)
    };
    let (a, sa) = steady(0.0);
    let (b, sb) = steady(PI / 2.0);
    let ratio = b / a;
    let se = ratio * ((sa / a).powi(2) + (sb / b).powi(2)).sqrt();
    rep.line(
        "chain N=20 suppression",
        (ratio - 0.5).abs() <= 0.1,
        format!("⟨I_F⟩(π/2)/⟨I_F⟩(0) = {b:.1}/{a:.1} = {ratio:.3} ± {se:.3} (target 0.5 ± 0.1)"),
        start,
    );
}

fn directional_chain(rep: &mut Report) {
    let start = Instant::now();
    let (m, n) = (100, 250);
    let mut s = SystemSpec::chain(m, n, 1.0, PI / 10.0);
    s.local.pumping = 250.0;
    let grid = p_grid(64);
    let mut cfg = TwaConfig::new(5e-5, 1.0, 200, 32, 5);
    cfg.initial = InitialState::ground();
    let r = run_chain(&s, &cfg, &grid, false).unwrap();
    let k01 = r.times.iter().position(|&t| t >= 0.01 - 1e-12).unwrap();
    let late = window_mean(&r, "I_F", r.times.len() / 2);
    let mut worst = (0.0f64, 0.0, 0.0);
    for k in k01..r.times.len() {
        let dev = (r.mean(k, "I_F") - late.0).abs();
        let allowed = (0.1 * late.0).max(3.0 * r.stderr(k, "I_F"));
        if dev / allowed > worst.0 {
            worst = (dev / allowed, r.times[k], dev / late.0);
        }
    }
    rep.line(
        "chain M=100 steady forward emission",
        worst.0 <= 1.0,
        format!(
            "⟨I_F⟩ for t ≥ 0.01 vs late mean {:.3e}: worst at t={:.3}, {:.1}% off, {:.2} of max(10%, 3SE)",
            late.0,
            worst.1,
            100.0 * worst.2,
            worst.0
        ),
        start,
    );

    let last = r.times.len() - 1;
    let [lo, hi] = structure_peaks(&r, last, &grid);
    let dp = grid[1] - grid[0];
    let s0 = r.mean(last, &format!("S_{}", grid.len() / 2));
    let tol = 3.0 * (lo.2 * lo.2 + hi.2 * hi.2).sqrt();
    let symmetric = (lo.0 + hi.0).abs() <= dp + 1e-12 && (lo.1 - hi.1).abs() <= tol.max(0.05 * hi.1);
    rep.line(
        "chain M=100 symmetric S(p) peaks",
        symmetric && lo.1 > 2.0 * s0 && hi.1 > 2.0 * s0,
        format!("peaks S({:.3}) = {:.3e} ± {:.1e}, S({:.3}) = {:.3e} ± {:.1e}; S(0) = {s0:.3e}", lo.0, lo.1, lo.2, hi.0, hi.1, hi.2),
        start,
    );

    for (size, drives, traj, dt) in [(20usize, vec![0.0, 0.1, 0.3, 1.0], 32usize, 5e-5), (50, vec![0.0, 0.05, 0.2], 16, 2e-5)] {
        let start = Instant::now();
        let sweep = SweepSpec {
            emitters: 250,
            sizes: vec![size],
            drive: drives,
            total_phase: 10.0 * PI,
            cooperativity: 100.0,
            chain_decay: 1.0,
            t_eval: 2.0,
        };
        let rows = directionality_sweep(&sweep, |_| {
            let mut c = TwaConfig::new(dt, 2.0, 1, traj, 6);
            c.initial = InitialState::ground();
            c
        })
        .unwrap();
        let zero = &rows[0];
        let balanced = (zero.fraction - 0.5).abs() <= 3.0 * zero.stderr;
        let monotone = rows.windows(2).all(|w| w[1].fraction >= w[0].fraction - 2.0 * (w[0].stderr.hypot(w[1].stderr)));
        let rises = rows.last().unwrap().fraction > zero.fraction + 3.0 * zero.stderr.hypot(rows.last().unwrap().stderr);
        let desc: Vec<String> = rows.iter().map(|r| format!("{:.2}γ→{:.3}±{:.3}", r.drive_over_pump, r.fraction, r.stderr)).collect();
        rep.line(
            &format!("directionality M={size}"),
            balanced && monotone && rises,
            format!("{} (0.5 ± 3SE at Ω=0: {balanced}; monotone within 2SE: {monotone})", desc.join(", ")),
            start,
        );
    }
}

fn statistics(rep: &mut Report) {
    let start = Instant::now();
    let s = laser(10);
    let dt = 0.02 / s.rate_scale();
    let ses: Vec<f64> = [100usize, 1000, 10000]
        .iter()
        .map(|&t| {
            let r = twa(&s, dt, 2.0, 10, t, 40);
            let k = r.times.len() / 2;
            r.stderr(k, "jz")
        })
        .collect();
    let ratios = [ses[0] / ses[1] / 10f64.sqrt(), ses[1] / ses[2] / 10f64.sqrt()];
    rep.line(
        "standard error scaling",
        ratios.iter().all(|x| (x - 1.0).abs() < 0.2),
        format!("SE(⟨J^z⟩) at 10², 10³, 10⁴ trajectories {:.4}, {:.4}, {:.4}; decade ratios / √10 = {:.3}, {:.3}", ses[0], ses[1], ses[2], ratios[0], ratios[1]),
        start,
    );

    let start = Instant::now();
    let mut worst = (0.0f64, String::new());
    let mut cases: Vec<(&str, SystemSpec, f64)> = vec![("laser N=10", laser(10), 5.0)];
    let mut bt = SystemSpec::single(50);
    bt.collective.decay = 1.0;
    bt.transverse_field = 50.0;
    bt.local.decay = 10.0;
    cases.push(("time crystal N=50", bt, 0.4));
    for (label, spec, t_max) in &cases {
        let dt = 0.02 / spec.rate_scale();
        let a = twa(spec, dt, *t_max, 20, 4000, 8);
        let b = twa(spec, dt / 2.0, *t_max, 20, 4000, 9);
        let nf = spec.emitters as f64;
        for (name, scale) in [("jz", nf), ("jpjm", nf * nf)] {
            for k in 0..a.times.len() {
                let se = a.stderr(k, name).hypot(b.stderr(k, name));
                if se == 0.0 {
                    continue;
                }
                let z = (a.mean(k, name) - b.mean(k, name)).abs() / se;
                if z > worst.0 {
                    worst = (z, format!("{label} {name} t={:.3} shift {:.2e}", a.times[k], (a.mean(k, name) - b.mean(k, name)).abs() / scale));
                }
            }
        }
    }
    rep.line(
        "dt halving within statistical error",
        worst.0 < 3.0,
        format!("largest shift {:.2} combined SE ({}) (tol 3 SE per record)", worst.0, worst.1),
        start,
    );

    let start = Instant::now();
    let mut cfg = TwaConfig::new(dt, 2.0, 10, 64, 13);
    cfg.workers = Some(1);
    let a = run(&s, &cfg, &SingleProbe).unwrap();
    cfg.workers = Some(4);
    let b = run(&s, &cfg, &SingleProbe).unwrap();
    let same = a.total.sum.iter().zip(&b.total.sum).all(|(x, y)| x.to_bits() == y.to_bits())
        && a.total.sumsq.iter().zip(&b.total.sumsq).all(|(x, y)| x.to_bits() == y.to_bits());
    rep.line("worker-count determinism", same, "1 vs 4 workers, bitwise sums".into(), start);

    let start = Instant::now();
    let mut spec = SystemSpec::single(40);
    spec.collective.decay = 1.0;
    spec.collective.dephasing = 0.5;
    spec.collective.pumping = 0.2;
    spec.transverse_field = 30.0;
    let field = Field::new(&spec);
    let sampler = CoherentSampler::new(40);
    let cfg = TwaConfig::new(1e-3, 2.0, 100, 1, 5);
    let mut worst = 0.0f64;
    for index in 0..16 {
        let mut lens = Vec::new();
        trajectory(&field, &sampler, &cfg, index, |_, z| lens.push(z[0].jcal()));
        worst = worst.max(lens.iter().map(|j| (j - lens[0]).abs()).fold(0.0, f64::max) / cfg.t_max);
    }
    rep.line("𝒥 conserved without local channels", worst < 1e-8, format!("max drift per unit time {worst:.2e} (tol 1e-8)"), start);
}

fn main() {
    let mut rep = Report { passed: 0, failed: 0 };
    oracle(&mut rep);
    single_emitter(&mut rep);
    superradiant_laser(&mut rep);
    nonclassicality(&mut rep);
    time_crystal(&mut rep);
    chain_validation(&mut rep);
    directional_chain(&mut rep);
    statistics(&mut rep);
    println!("acceptance: {} passed, {} failed", rep.passed, rep.failed);
}
