//! Adaptive Dormand–Prince 5(4) integrator for complex state vectors.
//!
//! Steps are clipped so that every requested output time is hit exactly.

use num_complex::Complex64 as C64;

use crate::error::ExactError;

#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-10, atol: 1e-12, max_steps: 10_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..y.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

impl Dopri5 {
    /// Integrates `dy/dt = f(t, y)` from `t_grid[0]`, calling `record` at every
    /// grid time (including the first). Returns the final state.
    pub fn integrate<F, R>(&self, mut f: F, y0: &[C64], t_grid: &[f64], mut record: R) -> Result<Vec<C64>, ExactError>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        R: FnMut(usize, f64, &[C64]),
    {
        let n = y0.len();
        let mut y = y0.to_vec();
        if t_grid.is_empty() {
            return Ok(y);
        }
        let mut t = t_grid[0];
        record(0, t, &y);
        let zero = C64::new(0.0, 0.0);
        let mut k1 = vec![zero; n];
        let mut k2 = vec![zero; n];
        let mut k3 = vec![zero; n];
        let mut k4 = vec![zero; n];
        let mut k5 = vec![zero; n];
        let mut k6 = vec![zero; n];
        let mut k7 = vec![zero; n];
        let mut tmp = vec![zero; n];
        let mut ynew = vec![zero; n];
        f(t, &y, &mut k1);
        let mut h = self.initial_step(&y, &k1);
        let mut steps = 0usize;
        for (idx, &target) in t_grid.iter().enumerate().skip(1) {
            while t < target {
                steps += 1;
                if steps > self.max_steps {
                    return Err(ExactError::StepUnderflow { t });
                }
                let last = t + h >= target;
                let hs = if last { target - t } else { h };
                combine(&mut tmp, &y, hs, &[(A21, &k1)]);
                f(t + C2 * hs, &tmp, &mut k2);
                combine(&mut tmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
                f(t + C3 * hs, &tmp, &mut k3);
                combine(&mut tmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
                f(t + C4 * hs, &tmp, &mut k4);
                combine(&mut tmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
                f(t + C5 * hs, &tmp, &mut k5);
                combine(&mut tmp, &y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
                f(t + hs, &tmp, &mut k6);
                combine(&mut ynew, &y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
                f(t + hs, &ynew, &mut k7);
                let mut err = 0.0f64;
                for i in 0..n {
                    let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
                    let sc = self.atol + self.rtol * y[i].norm().max(ynew[i].norm());
                    err = err.max(e.norm() / sc);
                }
                if !err.is_finite() {
                    h = hs * 0.1;
                    if h < 1e-300 {
                        return Err(ExactError::StepUnderflow { t });
                    }
                    continue;
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if err <= 1.0 {
                    t = if last { target } else { t + hs };
                    std::mem::swap(&mut y, &mut ynew);
                    std::mem::swap(&mut k1, &mut k7);
                    if !last {
                        h = hs * fac;
                    } else {
                        h = h.max(hs * fac);
                    }
                } else {
                    h = hs * fac.min(1.0);
                    if h < 1e-14 * t.abs().max(1.0) {
                        return Err(ExactError::StepUnderflow { t });
                    }
                }
            }
            record(idx, t, &y);
        }
        Ok(y)
    }

    fn initial_step(&self, y: &[C64], f0: &[C64]) -> f64 {
        let mut d0 = 0.0f64;
        let mut d1 = 0.0f64;
        for (yi, fi) in y.iter().zip(f0) {
            let sc = self.atol + self.rtol * yi.norm();
            d0 = d0.max(yi.norm() / sc);
            d1 = d1.max(fi.norm() / sc);
        }
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.clamp(1e-10, 1.0)
    }
}
