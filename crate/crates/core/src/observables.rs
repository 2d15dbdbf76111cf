//! Weyl symbols of the reported observables and derived composites.

use num_complex::Complex64 as C64;

use crate::phasespace::PhasePoint;
use crate::twa::{Probe, TwaResult};

/// Symbol of `J⁺J⁻` on one ensemble.
pub fn onsite_jpjm(z: &PhasePoint) -> f64 {
    let s = z.s_vec();
    s.x * s.x + s.y * s.y + s.z - 0.25 + 0.25 * z.n.z * z.n.z
}

/// Symbol of `J²`.
pub fn total_spin_sq(z: &PhasePoint) -> f64 {
    z.p * z.p - 0.25
}

/// Symbol of `Σ_{m,m'} e^{ip(m−m')} J⁺_m J⁻_{m'}` for one configuration.
pub fn structure_factor(z: &[PhasePoint], p: f64) -> f64 {
    let mut amp = C64::new(0.0, 0.0);
    let mut diag = 0.0;
    for (m, zm) in z.iter().enumerate() {
        let s = zm.s_vec();
        let sp = C64::new(s.x, s.y);
        amp += C64::from_polar(1.0, p * (m + 1) as f64) * sp;
        diag += onsite_jpjm(zm) - sp.norm_sqr();
    }
    amp.norm_sqr() + diag
}

/// `ξ² = (⟨J²⟩ − |⟨J⟩|²)/(N/2)`.
pub fn xi2(j2: f64, jx: f64, jy: f64, jz: f64, n: usize) -> f64 {
    (j2 - jx * jx - jy * jy - jz * jz) / (n as f64 / 2.0)
}

/// `s = ⟨J⁺J⁻⟩/(⟨J^z⟩ + N/2)`.
pub fn s_ratio(jpjm: f64, jz: f64, n: usize) -> f64 {
    jpjm / (jz + n as f64 / 2.0)
}

/// Single-ensemble probe: `jz, jx, jy, jpjm, j2`.
pub struct SingleProbe;

pub const SINGLE_NAMES: [&str; 5] = ["jz", "jx", "jy", "jpjm", "j2"];

impl Probe for SingleProbe {
    fn names(&self) -> Vec<String> {
        SINGLE_NAMES.iter().map(|s| s.to_string()).collect()
    }

    fn eval(&self, z: &[PhasePoint], out: &mut [f64]) {
        let s = z[0].s_vec();
        out[0] = s.z;
        out[1] = s.x;
        out[2] = s.y;
        out[3] = onsite_jpjm(&z[0]);
        out[4] = total_spin_sq(&z[0]);
    }
}

/// Composite series with jackknife errors from a [`SingleProbe`] run.
pub fn xi2_series(r: &TwaResult, n: usize) -> Vec<(f64, f64)> {
    let (jz, jx, jy, j2) = (r.index("jz").unwrap(), r.index("jx").unwrap(), r.index("jy").unwrap(), r.index("j2").unwrap());
    (0..r.times.len()).map(|k| r.composite(k, |m| xi2(m[j2], m[jx], m[jy], m[jz], n))).collect()
}

pub fn s_series(r: &TwaResult, n: usize) -> Vec<(f64, f64)> {
    let (jz, jp) = (r.index("jz").unwrap(), r.index("jpjm").unwrap());
    (0..r.times.len()).map(|k| r.composite(k, |m| s_ratio(m[jp], m[jz], n))).collect()
}

/// Chain probe: total inversion, forward and backward emission, optional
/// site-resolved emission and inversion, and `S(p)` on a grid.
pub struct ChainProbe {
    pub ensembles: usize,
    pub phi: f64,
    pub p_grid: Vec<f64>,
    pub per_site: bool,
}

impl ChainProbe {
    pub fn new(ensembles: usize, phi: f64) -> Self {
        ChainProbe { ensembles, phi, p_grid: Vec::new(), per_site: false }
    }
}

impl Probe for ChainProbe {
    fn names(&self) -> Vec<String> {
        let mut v = vec!["jz".to_string(), "I_F".to_string(), "I_B".to_string()];
        if self.per_site {
            for m in 1..=self.ensembles {
                v.push(format!("I_{m}"));
            }
            for m in 1..=self.ensembles {
                v.push(format!("jz_{m}"));
            }
        }
        for k in 0..self.p_grid.len() {
            v.push(format!("S_{k}"));
        }
        v
    }

    fn eval(&self, z: &[PhasePoint], out: &mut [f64]) {
        out[0] = z.iter().map(|p| p.s_vec().z).sum();
        out[1] = structure_factor(z, -self.phi);
        out[2] = structure_factor(z, self.phi);
        let mut i = 3;
        if self.per_site {
            for zm in z {
                out[i] = onsite_jpjm(zm);
                i += 1;
            }
            for zm in z {
                out[i] = zm.s_vec().z;
                i += 1;
            }
        }
        for &p in &self.p_grid {
            out[i] = structure_factor(z, p);
            i += 1;
        }
    }
}

/// Forward fraction `⟨I_F⟩/⟨I_F + I_B⟩` at one record.
pub fn forward_fraction(r: &TwaResult, record: usize) -> (f64, f64) {
    let (f, b) = (r.index("I_F").unwrap(), r.index("I_B").unwrap());
    r.composite(record, |m| m[f] / (m[f] + m[b]))
}

/// Forward fraction of the emission averaged over records `lo..=hi`.
pub fn window_fraction(r: &TwaResult, lo: usize, hi: usize) -> (f64, f64) {
    let (f, b) = (r.index("I_F").unwrap(), r.index("I_B").unwrap());
    let k = (hi - lo + 1) as f64;
    let groups = &r.groups;
    let total = &r.total;
    let est = |sum_f: f64, sum_b: f64| sum_f / (sum_f + sum_b);
    let full = {
        let (mut sf, mut sb) = (0.0, 0.0);
        for rec in lo..=hi {
            sf += total.mean(rec, f) / k;
            sb += total.mean(rec, b) / k;
        }
        est(sf, sb)
    };
    let mut vals = Vec::new();
    for g in groups {
        let (mut sf, mut sb) = (0.0, 0.0);
        for rec in lo..=hi {
            let n = (total.count[rec] - g.count[rec]) as f64;
            let o = rec * total.comps;
            sf += (total.sum[o + f] - g.sum[o + f]) / n / k;
            sb += (total.sum[o + b] - g.sum[o + b]) / n / k;
        }
        vals.push(est(sf, sb));
    }
    let g = vals.len() as f64;
    if g < 2.0 {
        return (full, f64::NAN);
    }
    let mean = vals.iter().sum::<f64>() / g;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * (g - 1.0) / g;
    (full, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_structure_factor_is_onsite() {
        let z = [PhasePoint::from_chart(0.4, 1.2, 0.3, 2.0)];
        for p in [0.0, 0.7, 2.0] {
            assert!((structure_factor(&z, p) - onsite_jpjm(&z[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn structure_factor_symmetric_for_mirror_configuration() {
        let z: Vec<_> = [0.3, 1.0, 0.3].iter().map(|&t| PhasePoint::from_chart(0.2, t, 0.0, 3.0)).collect();
        assert!((structure_factor(&z, 0.9) - structure_factor(&z, -0.9)).abs() < 1e-10);
    }
}
