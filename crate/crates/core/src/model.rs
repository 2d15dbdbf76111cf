//! System definitions shared by the exact solvers and the TWA.

use serde::{Deserialize, Serialize};

use crate::error::SpecError;

/// Rates indexed by q = -1, 0, +1 (decay, dephasing, pumping).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rates {
    #[serde(default)]
    pub decay: f64,
    #[serde(default)]
    pub dephasing: f64,
    #[serde(default)]
    pub pumping: f64,
}

impl Rates {
    pub fn get(&self, q: i32) -> f64 {
        match q {
            -1 => self.decay,
            0 => self.dephasing,
            1 => self.pumping,
            _ => panic!("rate index {q} out of range"),
        }
    }

    pub fn set(&mut self, q: i32, r: f64) {
        match q {
            -1 => self.decay = r,
            0 => self.dephasing = r,
            1 => self.pumping = r,
            _ => panic!("rate index {q} out of range"),
        }
    }

    pub fn single(q: i32, r: f64) -> Self {
        let mut out = Rates::default();
        out.set(q, r);
        out
    }

    /// Nonzero `(q, rate)` pairs in the order -1, 0, +1.
    pub fn active(&self) -> Vec<(i32, f64)> {
        (-1..=1).map(|q| (q, self.get(q))).filter(|&(_, r)| r > 0.0).collect()
    }

    fn valid(&self) -> bool {
        [self.decay, self.dephasing, self.pumping].iter().all(|r| r.is_finite() && *r >= 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    Collective,
    Local,
    CollectiveDirectional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// One dissipation channel of the unravelled dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub q: i32,
    pub j: i32,
    pub rate: f64,
    pub direction: Option<Direction>,
    pub ensemble: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    Up,
    Down,
}

/// Full problem definition. Rates are in units of the reference rate Γ and
/// time in units of 1/Γ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Number of ensembles M.
    #[serde(default = "one")]
    pub ensembles: usize,
    /// Emitters per ensemble N.
    pub emitters: usize,
    /// Collective rates Γ^q, single-ensemble systems only.
    #[serde(default)]
    pub collective: Rates,
    /// Local rates γ^q, identical on every emitter.
    #[serde(default)]
    pub local: Rates,
    /// Decay rate Γ into the waveguide chain; zero disables the chain terms.
    #[serde(default)]
    pub chain_decay: f64,
    /// Propagation phase between neighbouring ensembles.
    #[serde(default)]
    pub phi_prop: f64,
    /// Amplitude of the coherent drive phase-matched to the forward mode.
    #[serde(default)]
    pub omega_drive: f64,
    /// Transverse field Ω J^x on every ensemble.
    #[serde(default)]
    pub transverse_field: f64,
}

fn one() -> usize {
    1
}

impl SystemSpec {
    pub fn single(n: usize) -> Self {
        SystemSpec {
            ensembles: 1,
            emitters: n,
            collective: Rates::default(),
            local: Rates::default(),
            chain_decay: 0.0,
            phi_prop: 0.0,
            omega_drive: 0.0,
            transverse_field: 0.0,
        }
    }

    pub fn chain(m: usize, n: usize, chain_decay: f64, phi_prop: f64) -> Self {
        SystemSpec { ensembles: m, chain_decay, phi_prop, ..SystemSpec::single(n) }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |s: &str| Err(SpecError::Invalid(s.to_string()));
        if self.ensembles == 0 {
            return bad("ensemble count must be at least 1");
        }
        if self.emitters == 0 {
            return bad("emitter count must be at least 1");
        }
        if !self.collective.valid() || !self.local.valid() {
            return bad("rates must be finite and non-negative");
        }
        for (name, x) in [
            ("chain_decay", self.chain_decay),
            ("omega_drive", self.omega_drive),
        ] {
            if !(x.is_finite() && x >= 0.0) {
                return bad(&format!("{name} must be finite and non-negative"));
            }
        }
        if !self.phi_prop.is_finite() || !self.transverse_field.is_finite() {
            return bad("phases and fields must be finite");
        }
        if self.ensembles > 1 && !self.collective.active().is_empty() {
            return bad("collective rates apply to single-ensemble systems; use chain_decay");
        }
        if self.omega_drive > 0.0 && self.chain_decay == 0.0 && self.ensembles > 1 {
            return bad("the drive is defined on the chain");
        }
        Ok(())
    }

    pub fn total_emitters(&self) -> usize {
        self.ensembles * self.emitters
    }

    pub fn has_chain(&self) -> bool {
        self.chain_decay > 0.0
    }

    /// Every channel of the unravelling, in noise-stream order.
    pub fn channels(&self) -> Vec<ChannelSpec> {
        let mut out = Vec::new();
        for (q, r) in self.collective.active() {
            out.push(ChannelSpec { kind: ChannelKind::Collective, q, j: 0, rate: r, direction: None, ensemble: 0 });
        }
        if self.has_chain() {
            for d in [Direction::Forward, Direction::Backward] {
                out.push(ChannelSpec {
                    kind: ChannelKind::CollectiveDirectional,
                    q: -1,
                    j: 0,
                    rate: self.chain_decay / 2.0,
                    direction: Some(d),
                    ensemble: 0,
                });
            }
        }
        for m in 0..self.ensembles {
            for (q, r) in self.local.active() {
                for j in -1..=1 {
                    out.push(ChannelSpec { kind: ChannelKind::Local, q, j, rate: r, direction: None, ensemble: m });
                }
            }
        }
        out
    }

    /// Fastest rate scale of one ensemble, used for the default step.
    pub fn rate_scale(&self) -> f64 {
        let n = self.emitters as f64;
        let nt = self.total_emitters() as f64;
        let mut s = 0.0f64;
        for (_, r) in self.collective.active() {
            s = s.max(r * n);
        }
        for (_, r) in self.local.active() {
            s = s.max(r);
        }
        s = s.max(self.chain_decay * nt / 2.0);
        s = s.max(self.transverse_field.abs()).max(2.0 * self.omega_drive);
        s.max(1e-12)
    }
}
