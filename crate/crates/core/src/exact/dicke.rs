//! Exact permutation-invariant dynamics in the Dicke basis.
//!
//! The density matrix is block diagonal in J. Blocks are stored with the
//! sector degeneracy absorbed, so `Tr ρ = Σ_{J,M} ρ_{J,M,M}` and observables
//! are plain traces. Local dissipation moves weight between neighbouring
//! sectors with transfer coefficients
//!
//! ```text
//! ρ'_{J+j, M+q, M'+q} += γ c_q Λ_j(J) ⟨J M; 1 q|J+j M+q⟩⟨J M'; 1 q|J+j M'+q⟩ ρ_{J,M,M'}
//! Λ_{+1} = N/2 − J,  Λ_0 = N/2 + 1,  Λ_{−1} = N/2 + J + 1
//! ```

use num_complex::Complex64 as C64;

use crate::amplitude::channel_weight;
use crate::error::ExactError;
use crate::exact::ode::Dopri5;
use crate::exact::Moments;
use crate::model::{Polarization, Rates, SystemSpec};

/// Largest N accepted for full block evolution.
pub const FULL_CAP: usize = 200;
/// Largest N accepted for population-only evolution.
pub const POPULATION_CAP: usize = 2000;

#[derive(Clone, Debug)]
pub struct Sector {
    /// Twice the total spin.
    pub twice_j: usize,
    pub dim: usize,
    pub offset: usize,
    pub diag_offset: usize,
}

impl Sector {
    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    /// Magnetic quantum number of row `i` (ascending from −J).
    pub fn m(&self, i: usize) -> f64 {
        i as f64 - self.j()
    }
}

#[derive(Clone, Debug)]
pub struct DickeSpace {
    pub n: usize,
    pub sectors: Vec<Sector>,
    pub full_len: usize,
    pub diag_len: usize,
}

impl DickeSpace {
    pub fn new(n: usize) -> Self {
        let mut sectors = Vec::new();
        let (mut off, mut doff) = (0, 0);
        let mut tj = n as i64;
        while tj >= 0 {
            let dim = tj as usize + 1;
            sectors.push(Sector { twice_j: tj as usize, dim, offset: off, diag_offset: doff });
            off += dim * dim;
            doff += dim;
            tj -= 2;
        }
        DickeSpace { n, sectors, full_len: off, diag_len: doff }
    }

    /// Sector index of twice-J, if present.
    pub fn sector_index(&self, twice_j: i64) -> Option<usize> {
        let top = self.n as i64;
        if twice_j < 0 || twice_j > top || (top - twice_j) % 2 != 0 {
            return None;
        }
        Some(((top - twice_j) / 2) as usize)
    }

    /// Sector degeneracy `C(N, N/2−J) − C(N, N/2−J−1)`.
    pub fn degeneracy(&self, twice_j: usize) -> f64 {
        let k = (self.n - twice_j) / 2;
        binomial(self.n, k) - if k > 0 { binomial(self.n, k - 1) } else { 0.0 }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Clebsch–Gordan coefficient ⟨J M; 1 q|J' M+q⟩ for J' ∈ {J−1, J, J+1}
/// (Condon–Shortley phases).
pub fn clebsch_gordan(j: f64, m: f64, q: i32, jp: f64) -> f64 {
    let sq = |x: f64| x.max(0.0).sqrt();
    if (jp - (j + 1.0)).abs() < 1e-9 {
        let d = (2.0 * j + 1.0) * (2.0 * j + 2.0);
        match q {
            1 => sq((j + m + 1.0) * (j + m + 2.0) / d),
            0 => sq((j - m + 1.0) * (j + m + 1.0) / ((2.0 * j + 1.0) * (j + 1.0))),
            _ => sq((j - m + 1.0) * (j - m + 2.0) / d),
        }
    } else if (jp - j).abs() < 1e-9 {
        if j == 0.0 {
            return 0.0;
        }
        let d = 2.0 * j * (j + 1.0);
        match q {
            1 => -sq((j + m + 1.0) * (j - m) / d),
            0 => m / (j * (j + 1.0)).sqrt(),
            _ => sq((j - m + 1.0) * (j + m) / d),
        }
    } else if (jp - (j - 1.0)).abs() < 1e-9 {
        if j < 1.0 {
            return 0.0;
        }
        let d = 2.0 * j * (2.0 * j + 1.0);
        match q {
            1 => sq((j - m - 1.0) * (j - m) / d),
            0 => -sq((j - m) * (j + m) / (j * (2.0 * j + 1.0))),
            _ => sq((j + m - 1.0) * (j + m) / d),
        }
    } else {
        0.0
    }
}

/// Sector-transfer weight Λ_j(J) of the local channels.
pub fn ladder_weight(n: usize, j: f64, shift: i32) -> f64 {
    let h = n as f64 / 2.0;
    match shift {
        1 => h - j,
        0 => h + 1.0,
        _ => h + j + 1.0,
    }
}

/// Diagonal of `Σ_n σ_n^{q†} σ_n^q` on |J M⟩.
pub fn local_loss(n: usize, q: i32, m: f64) -> f64 {
    let h = n as f64 / 2.0;
    match q {
        -1 => m + h,
        1 => h - m,
        _ => n as f64,
    }
}

/// Rate of leaving |J M⟩ through the shift-`j` part of local channel q.
pub fn local_loss_by_shift(n: usize, q: i32, shift: i32, j: f64, m: f64) -> f64 {
    let jp = j + shift as f64;
    if jp < 0.0 || jp > n as f64 / 2.0 || (m + q as f64).abs() > jp + 1e-9 {
        return 0.0;
    }
    let c = clebsch_gordan(j, m, q, jp);
    channel_weight(q) * ladder_weight(n, j, shift) * c * c
}

struct Transfer {
    src: usize,
    dst: usize,
    coef: Vec<f64>,
    src_row0: usize,
    dst_row0: usize,
    len: usize,
    rate: f64,
}

/// Liouvillian of a single ensemble in the Dicke basis.
pub struct DickeLiouvillian {
    pub space: DickeSpace,
    collective: Rates,
    local: Rates,
    omega_x: f64,
    /// J^+ and J^- ladder coefficients per sector row.
    up: Vec<Vec<f64>>,
    down: Vec<Vec<f64>>,
    /// No-jump loss per sector row.
    loss: Vec<Vec<f64>>,
    transfers: Vec<Transfer>,
}

impl DickeLiouvillian {
    pub fn new(spec: &SystemSpec) -> Result<Self, ExactError> {
        spec.validate().map_err(|e| ExactError::Unsupported(e.to_string()))?;
        if spec.ensembles != 1 || spec.has_chain() || spec.omega_drive != 0.0 {
            return Err(ExactError::Unsupported("the Dicke solver handles one ensemble".into()));
        }
        let n = spec.emitters;
        let cap = if spec.transverse_field == 0.0 { POPULATION_CAP } else { FULL_CAP };
        if n > cap {
            return Err(ExactError::TooLarge(format!("N = {n} exceeds cap {cap}")));
        }
        let space = DickeSpace::new(n);
        let mut up = Vec::new();
        let mut down = Vec::new();
        let mut loss = Vec::new();
        for s in &space.sectors {
            let j = s.j();
            up.push((0..s.dim).map(|i| ((j - s.m(i)) * (j + s.m(i) + 1.0)).max(0.0).sqrt()).collect());
            down.push((0..s.dim).map(|i| ((j + s.m(i)) * (j - s.m(i) + 1.0)).max(0.0).sqrt()).collect());
            loss.push(
                (0..s.dim)
                    .map(|i| spec.local.active().iter().map(|&(q, r)| r * local_loss(n, q, s.m(i))).sum::<f64>() / 2.0)
                    .collect(),
            );
        }
        let mut transfers = Vec::new();
        for (si, s) in space.sectors.iter().enumerate() {
            let j = s.j();
            for (q, r) in spec.local.active() {
                for shift in -1..=1 {
                    let Some(di) = space.sector_index(s.twice_j as i64 + 2 * shift as i64) else { continue };
                    let d = &space.sectors[di];
                    let jp = d.j();
                    let w = channel_weight(q) * ladder_weight(n, j, shift);
                    if w == 0.0 {
                        continue;
                    }
                    // rows i in the source with M+q inside the destination
                    let rows: Vec<usize> = (0..s.dim).filter(|&i| (s.m(i) + q as f64).abs() <= jp + 1e-9).collect();
                    if rows.is_empty() {
                        continue;
                    }
                    let src_row0 = rows[0];
                    let dst_row0 = (s.m(src_row0) + q as f64 + jp).round() as usize;
                    let coef: Vec<f64> = rows.iter().map(|&i| clebsch_gordan(j, s.m(i), q, jp) * w.sqrt()).collect();
                    transfers.push(Transfer { src: si, dst: di, coef, src_row0, dst_row0, len: rows.len(), rate: r });
                }
            }
        }
        Ok(DickeLiouvillian {
            space,
            collective: spec.collective,
            local: spec.local,
            omega_x: spec.transverse_field,
            up,
            down,
            loss,
            transfers,
        })
    }

    pub fn supports_populations_only(&self) -> bool {
        self.omega_x == 0.0
    }

    pub fn local_rates(&self) -> Rates {
        self.local
    }

    /// Full block action `dρ = L ρ`.
    pub fn apply(&self, rho: &[C64], out: &mut [C64]) {
        let i_unit = C64::new(0.0, 1.0);
        let (gd, gz, gu) = (self.collective.decay, self.collective.dephasing, self.collective.pumping);
        for (si, s) in self.space.sectors.iter().enumerate() {
            let d = s.dim;
            let b = &rho[s.offset..s.offset + d * d];
            let o = &mut out[s.offset..s.offset + d * d];
            let (up, dn, ls) = (&self.up[si], &self.down[si], &self.loss[si]);
            for i in 0..d {
                let mi = s.m(i);
                for k in 0..d {
                    let mk = s.m(k);
                    let x = b[i * d + k];
                    let mut acc = -x * (ls[i] + ls[k]);
                    if gd > 0.0 {
                        if i + 1 < d && k + 1 < d {
                            acc += b[(i + 1) * d + k + 1] * (gd * dn[i + 1] * dn[k + 1]);
                        }
                        acc -= x * (0.5 * gd * (dn[i] * dn[i] + dn[k] * dn[k]));
                    }
                    if gu > 0.0 {
                        if i > 0 && k > 0 {
                            acc += b[(i - 1) * d + k - 1] * (gu * up[i - 1] * up[k - 1]);
                        }
                        acc -= x * (0.5 * gu * (up[i] * up[i] + up[k] * up[k]));
                    }
                    if gz > 0.0 {
                        acc -= x * (0.5 * gz * (mi - mk) * (mi - mk));
                    }
                    if self.omega_x != 0.0 {
                        let mut hx = C64::new(0.0, 0.0);
                        if i > 0 {
                            hx += b[(i - 1) * d + k] * up[i - 1];
                        }
                        if i + 1 < d {
                            hx += b[(i + 1) * d + k] * dn[i + 1];
                        }
                        if k > 0 {
                            hx -= b[i * d + k - 1] * up[k - 1];
                        }
                        if k + 1 < d {
                            hx -= b[i * d + k + 1] * dn[k + 1];
                        }
                        acc -= i_unit * hx * (0.5 * self.omega_x);
                    }
                    o[i * d + k] = acc;
                }
            }
        }
        for t in &self.transfers {
            let s = &self.space.sectors[t.src];
            let dsec = &self.space.sectors[t.dst];
            let (ds, dd) = (s.dim, dsec.dim);
            for a in 0..t.len {
                for c in 0..t.len {
                    let x = rho[s.offset + (t.src_row0 + a) * ds + t.src_row0 + c];
                    let w = t.rate * t.coef[a] * t.coef[c];
                    out[dsec.offset + (t.dst_row0 + a) * dd + t.dst_row0 + c] += x * w;
                }
            }
        }
    }

    /// Population-only action on the diagonal.
    pub fn apply_diag(&self, p: &[C64], out: &mut [C64]) {
        let (gd, gu) = (self.collective.decay, self.collective.pumping);
        for (si, s) in self.space.sectors.iter().enumerate() {
            let d = s.dim;
            let b = &p[s.diag_offset..s.diag_offset + d];
            let o = &mut out[s.diag_offset..s.diag_offset + d];
            let (up, dn, ls) = (&self.up[si], &self.down[si], &self.loss[si]);
            for i in 0..d {
                let mut acc = -b[i] * (2.0 * ls[i]);
                if gd > 0.0 {
                    if i + 1 < d {
                        acc += b[i + 1] * (gd * dn[i + 1] * dn[i + 1]);
                    }
                    acc -= b[i] * (gd * dn[i] * dn[i]);
                }
                if gu > 0.0 {
                    if i > 0 {
                        acc += b[i - 1] * (gu * up[i - 1] * up[i - 1]);
                    }
                    acc -= b[i] * (gu * up[i] * up[i]);
                }
                o[i] = acc;
            }
        }
        for t in &self.transfers {
            let s = &self.space.sectors[t.src];
            let dsec = &self.space.sectors[t.dst];
            for a in 0..t.len {
                let x = p[s.diag_offset + t.src_row0 + a];
                out[dsec.diag_offset + t.dst_row0 + a] += x * (t.rate * t.coef[a] * t.coef[a]);
            }
        }
    }
}

/// A density matrix in the Dicke representation, either full blocks or
/// populations only.
#[derive(Clone, Debug)]
pub struct DickeState {
    pub populations_only: bool,
    pub data: Vec<C64>,
}

impl DickeState {
    pub fn polarized(space: &DickeSpace, pol: Polarization, populations_only: bool) -> Self {
        let s = &space.sectors[0];
        let i = match pol {
            Polarization::Up => s.dim - 1,
            Polarization::Down => 0,
        };
        let zero = C64::new(0.0, 0.0);
        if populations_only {
            let mut data = vec![zero; space.diag_len];
            data[s.diag_offset + i] = C64::new(1.0, 0.0);
            DickeState { populations_only, data }
        } else {
            let mut data = vec![zero; space.full_len];
            data[s.offset + i * s.dim + i] = C64::new(1.0, 0.0);
            DickeState { populations_only, data }
        }
    }

    /// Coherent spin state `e^{−iφJ^z} e^{−iθJ^y} |N/2, N/2⟩`.
    pub fn coherent(space: &DickeSpace, theta: f64, phi: f64) -> Self {
        let s = &space.sectors[0];
        let j = s.j();
        let n2 = s.twice_j;
        let mut lnf = vec![0.0f64; n2 + 2];
        for k in 1..lnf.len() {
            lnf[k] = lnf[k - 1] + (k as f64).ln();
        }
        let (sh, ch) = (theta / 2.0).sin_cos();
        let amp: Vec<C64> = (0..s.dim)
            .map(|i| {
                let m = s.m(i);
                let up = (j + m).round() as usize;
                let dn = n2 - up;
                let lc = 0.5 * (lnf[n2] - lnf[up] - lnf[dn]);
                let mag = powlog(lc, ch, up, sh, dn);
                C64::from_polar(mag, -m * phi)
            })
            .collect();
        let mut data = vec![C64::new(0.0, 0.0); space.full_len];
        for i in 0..s.dim {
            for k in 0..s.dim {
                data[s.offset + i * s.dim + k] = amp[i] * amp[k].conj();
            }
        }
        DickeState { populations_only: false, data }
    }

    pub fn moments(&self, space: &DickeSpace) -> Moments {
        let mut mo = Moments::default();
        for s in &space.sectors {
            let j = s.j();
            for i in 0..s.dim {
                let m = s.m(i);
                let p = if self.populations_only {
                    self.data[s.diag_offset + i].re
                } else {
                    self.data[s.offset + i * s.dim + i].re
                };
                mo.trace += p;
                mo.jz += m * p;
                mo.jz2 += m * m * p;
                mo.j2 += j * (j + 1.0) * p;
                mo.jpjm += (j + m) * (j - m + 1.0) * p;
                if !self.populations_only && i > 0 {
                    // Tr(J^- ρ) = Σ ⟨M−1|J^-|M⟩ ρ_{M, M−1}
                    let a = ((j + m) * (j - m + 1.0)).sqrt();
                    let c = self.data[s.offset + i * s.dim + i - 1] * a;
                    mo.jx += c.re;
                    mo.jy -= c.im;
                }
            }
        }
        mo
    }
}

fn powlog(lc: f64, a: f64, ea: usize, b: f64, eb: usize) -> f64 {
    let mut l = lc;
    for (x, e) in [(a, ea), (b, eb)] {
        if e > 0 {
            if x.abs() < 1e-300 {
                return 0.0;
            }
            l += e as f64 * x.abs().ln();
        }
    }
    let sign = if (a < 0.0 && ea % 2 == 1) ^ (b < 0.0 && eb % 2 == 1) { -1.0 } else { 1.0 };
    sign * l.exp()
}

/// Exact evolution of one ensemble.
pub struct DickeSolver {
    pub liouvillian: DickeLiouvillian,
    pub ode: Dopri5,
}

impl DickeSolver {
    pub fn new(spec: &SystemSpec) -> Result<Self, ExactError> {
        Ok(DickeSolver { liouvillian: DickeLiouvillian::new(spec)?, ode: Dopri5::default() })
    }

    pub fn space(&self) -> &DickeSpace {
        &self.liouvillian.space
    }

    pub fn initial(&self, pol: Polarization) -> DickeState {
        DickeState::polarized(self.space(), pol, self.liouvillian.supports_populations_only())
    }

    /// Observables on `t_grid` starting from `rho0`.
    pub fn evolve(&self, rho0: &DickeState, t_grid: &[f64]) -> Result<Vec<Moments>, ExactError> {
        let space = self.space();
        let mut out = Vec::with_capacity(t_grid.len());
        let pops = rho0.populations_only;
        if pops && !self.liouvillian.supports_populations_only() {
            return Err(ExactError::Unsupported("coherent dynamics need full blocks".into()));
        }
        let lv = &self.liouvillian;
        self.ode.integrate(
            |_, y, dy| {
                if pops {
                    lv.apply_diag(y, dy)
                } else {
                    lv.apply(y, dy)
                }
            },
            &rho0.data,
            t_grid,
            |_, _, y| {
                let st = DickeState { populations_only: pops, data: y.to_vec() };
                out.push(st.moments(space));
            },
        )?;
        Ok(out)
    }

    /// Time derivative of the moments at a given state.
    pub fn derivative(&self, rho: &DickeState) -> Moments {
        let mut d = vec![C64::new(0.0, 0.0); rho.data.len()];
        if rho.populations_only {
            self.liouvillian.apply_diag(&rho.data, &mut d);
        } else {
            self.liouvillian.apply(&rho.data, &mut d);
        }
        DickeState { populations_only: rho.populations_only, data: d }.moments(self.space())
    }
}
