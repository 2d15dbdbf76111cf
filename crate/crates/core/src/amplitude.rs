//! Jump amplitudes χ_{jq}(P) of the local channels.
//!
//! `χ_{jq}² = c_q A_j(P)` with `c_{±1} = 1`, `c_0 = 2` and `P = 𝒥 + 1/2`.
//! Writing `K = (N+2)/4`, `D = A_{+1} − A_{−1}` and `Σ = A_{+1} + A_{−1}`, the
//! first-moment equations of ⟨J^z⟩ and ⟨J^−⟩ reduce to
//!
//! ```text
//! Σ + D'/2 = N,   A_0 = N/2 − D/(2P),   D''/4 − (1 + 1/(2P²)) D = 2P − N/(2P)
//! ```
//!
//! for every q. The Laurent solution `D = −2P + 2K/P` reproduces the ladder
//! coefficients `N/2 + J + 1`, `N/2 + 1`, `N/2 − J` at large P but is singular
//! at the origin. Adding the decaying homogeneous solution
//! `β e^{−2P}(1 + 1/(2P))` with `β = −4K` cancels the singular part, so all
//! three amplitudes are finite and positive near `P = 0` while the
//! large-P behaviour is unchanged up to `O(e^{−2P})`.

/// Smallest spin length at which amplitudes are evaluated.
const P_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct LadderAmplitudes {
    n: f64,
    k: f64,
}

pub fn channel_weight(q: i32) -> f64 {
    if q == 0 {
        2.0
    } else {
        1.0
    }
}

impl LadderAmplitudes {
    pub fn new(n: usize) -> Self {
        let n = n as f64;
        LadderAmplitudes { n, k: (n + 2.0) / 4.0 }
    }

    pub fn emitters(&self) -> f64 {
        self.n
    }

    /// `[A_{−1}, A_0, A_{+1}]` and their P-derivatives.
    pub fn all(&self, p: f64) -> ([f64; 3], [f64; 3]) {
        let p = p.max(P_FLOOR);
        let (n, k) = (self.n, self.k);
        let e = (-2.0 * p).exp();
        let om = -(-2.0 * p).exp_m1();
        let (p2, p3) = (p * p, p * p * p);
        let d = -2.0 * p + 2.0 * k * om / p - 4.0 * k * e;
        let s = n + 1.0 + k * om / p2 - 2.0 * k * e / p - 4.0 * k * e;
        let d1 = -2.0 - 2.0 * k * om / p2 + 4.0 * k * e / p + 8.0 * k * e;
        let s1 = -2.0 * k * om / p3 + 4.0 * k * e / p2 + 4.0 * k * e / p + 8.0 * k * e;
        let a = [0.5 * (s - d), 0.5 * n - d / (2.0 * p), 0.5 * (s + d)];
        let da = [0.5 * (s1 - d1), -d1 / (2.0 * p) + d / (2.0 * p2), 0.5 * (s1 + d1)];
        (a, da)
    }

    /// `A_j(P)` and `A_j'(P)`.
    pub fn a(&self, j: i32, p: f64) -> (f64, f64) {
        let (a, da) = self.all(p);
        let i = (j + 1) as usize;
        (a[i], da[i])
    }

    /// `χ_{jq}(P)` and its derivative; zero where `A_j` is negative.
    pub fn chi(&self, q: i32, j: i32, p: f64) -> (f64, f64) {
        let (a, da) = self.a(j, p);
        chi_from(channel_weight(q), a, da)
    }
}

pub fn chi_from(c: f64, a: f64, da: f64) -> (f64, f64) {
    if a <= 0.0 {
        return (0.0, 0.0);
    }
    let chi = (c * a).sqrt();
    (chi, c * da / (2.0 * chi))
}
