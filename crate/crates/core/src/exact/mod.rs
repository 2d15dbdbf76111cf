//! Exact reference solvers: the Dicke-basis block solver for single
//! ensembles and a dense 2^N Lindblad integrator for tiny systems.

pub mod brute;
pub mod dicke;
pub mod ode;

pub use brute::{BruteForce, BruteRecord};
pub use dicke::{DickeLiouvillian, DickeSolver, DickeSpace, DickeState};

/// Expectation values of collective spin moments of one ensemble.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub trace: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub jz2: f64,
    pub j2: f64,
    pub jpjm: f64,
}

impl Moments {
    /// Spin-squeezing-type parameter `(⟨J²⟩ − |⟨J⟩|²)/(N/2)`.
    pub fn xi2(&self, n: usize) -> f64 {
        (self.j2 - self.jx * self.jx - self.jy * self.jy - self.jz * self.jz) / (n as f64 / 2.0)
    }

    /// Superradiance ratio `⟨J⁺J⁻⟩/(⟨J^z⟩ + N/2)`.
    pub fn s_ratio(&self, n: usize) -> f64 {
        self.jpjm / (self.jz + n as f64 / 2.0)
    }
}
