//! The time cutoff φ, the resonance cutoff η, and tabulated transforms.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::hilbert::hilbert_pv;
use crate::quadrature::GaussLegendre;

/// `e^{-1/s}` for `s > 0`, zero otherwise.
pub fn psi(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth even bump, exactly 1 on [-1, 1] and 0 outside (-2, 2).
pub fn phi_eval(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let p = psi(2.0 - a);
        p / (p + psi(a - 1.0))
    }
}

/// `φ_T(t) = φ(t/T)`.
pub fn phi_scaled(t: f64, big_t: f64) -> f64 {
    phi_eval(t / big_t)
}

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// `η̂(ξ) = (ξ+1) e^{-(ξ+1)²} / √π`.
pub fn eta_hat(xi: f64) -> f64 {
    let x = xi + 1.0;
    x * (-x * x).exp() * FRAC_1_SQRT_PI
}

pub fn eta_hat_derivative(xi: f64) -> f64 {
    let x = xi + 1.0;
    (1.0 - 2.0 * x * x) * (-x * x).exp() * FRAC_1_SQRT_PI
}

/// `η(s) = ∫ η̂(ξ) e^{isξ} dξ = (is/2) e^{-is} e^{-s²/4}`.
pub fn eta_time(s: f64) -> Complex64 {
    Complex64::new(0.0, 0.5 * s) * Complex64::from_polar((-0.25 * s * s).exp(), -s)
}

/// Moments `∫ ξ^k η̂(ξ) dξ`.
fn eta_moments(count: usize) -> Vec<f64> {
    // ∫ x^j e^{-x²} dx / √π for even j is (j-1)!!/2^{j/2}
    let gauss = |j: usize| -> f64 {
        if j % 2 == 1 {
            0.0
        } else {
            (1..j).step_by(2).map(|v| v as f64).product::<f64>() / 2f64.powi(j as i32 / 2)
        }
    };
    let binom = |n: usize, k: usize| -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    // ξ = x - 1, so ∫ (x-1)^k x e^{-x²}/√π
    (0..count)
        .map(|k| {
            (0..=k)
                .map(|i| binom(k, i) * (-1f64).powi((k - i) as i32) * gauss(i + 1))
                .sum()
        })
        .collect()
}

/// Uniform table of a function and its derivative, interpolated by cubic
/// Hermite polynomials.
#[derive(Debug, Clone)]
struct HermiteTable {
    start: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteTable {
    fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.end()
    }

    fn slope(&self, x: f64) -> f64 {
        let u = (x - self.start) / self.step;
        let k = (u.floor() as usize).min(self.values.len() - 2);
        let s = u - k as f64;
        let h = self.step;
        let dv = (self.values[k + 1] - self.values[k]) / h;
        6.0 * s * (1.0 - s) * dv
            + (1.0 - s) * (1.0 - 3.0 * s) * self.slopes[k]
            + s * (3.0 * s - 2.0) * self.slopes[k + 1]
    }

    fn eval(&self, x: f64) -> f64 {
        let u = (x - self.start) / self.step;
        let k = (u.floor() as usize).min(self.values.len() - 2);
        let s = u - k as f64;
        let h = self.step;
        let s2 = s * s;
        let one = 1.0 - s;
        (1.0 + 2.0 * s) * one * one * self.values[k]
            + s * one * one * h * self.slopes[k]
            + s2 * (3.0 - 2.0 * s) * self.values[k + 1]
            + s2 * (s - 1.0) * h * self.slopes[k + 1]
    }
}

/// `∫_0^1 cos(ξt)`, `∫_0^1 sin(ξt)`, `∫_0^1 t cos(ξt)`, `∫_0^1 t sin(ξt)`.
fn unit_moments(xi: f64) -> [f64; 4] {
    if xi.abs() < 0.5 {
        let mut out = [0.0; 4];
        let x2 = xi * xi;
        // term_k = (-1)^k ξ^{2k}/(2k)! and (-1)^k ξ^{2k+1}/(2k+1)!
        let mut even = 1.0;
        let mut odd = xi;
        for k in 0..20 {
            let kk = 2.0 * k as f64;
            out[0] += even / (kk + 1.0);
            out[1] += odd / (kk + 2.0);
            out[2] += even / (kk + 2.0);
            out[3] += odd / (kk + 3.0);
            even *= -x2 / ((kk + 1.0) * (kk + 2.0));
            odd *= -x2 / ((kk + 2.0) * (kk + 3.0));
        }
        out
    } else {
        let (s, c) = xi.sin_cos();
        let x2 = xi * xi;
        [
            s / xi,
            (1.0 - c) / xi,
            (c + xi * s - 1.0) / x2,
            (s - xi * c) / x2,
        ]
    }
}

/// Quadrature nodes `(t, w·φ(t))` on the transition band [1, 2].
fn transition_nodes() -> Vec<(f64, f64)> {
    let g = GaussLegendre::gl16();
    let panels = 64;
    let h = 1.0 / panels as f64;
    let mut v = Vec::with_capacity(16 * panels);
    for p in 0..panels {
        let a = 1.0 + p as f64 * h;
        for (t, w) in g.mapped(a, a + h) {
            v.push((t, w * phi_eval(t)));
        }
    }
    v
}

/// `[φ̂, φ̂', Hφ̂, (Hφ̂)']` at `ξ` by direct quadrature.
///
/// With φ even, `φ̂(ξ) = (1/π)∫_0^2 φ cos(ξt)`, `Hφ̂(ξ) = ∫_0^2 φ sin(ξt)`.
pub fn phi_transforms_direct(xi: f64) -> [f64; 4] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let nodes = NODES.get_or_init(transition_nodes);
    let [c0, s0, tc0, ts0] = unit_moments(xi);
    let (mut c, mut s, mut tc, mut ts) = (c0, s0, tc0, ts0);
    for &(t, w) in nodes {
        let (sn, cs) = (xi * t).sin_cos();
        c += w * cs;
        s += w * sn;
        tc += w * t * cs;
        ts += w * t * sn;
    }
    [c / PI, -ts / PI, s, tc]
}

fn phi_tables(extent: f64, step: f64) -> [HermiteTable; 2] {
    let count = (2.0 * extent / step).round() as usize + 1;
    let start = -extent;
    let nodes = transition_nodes();
    let mut acc = vec![[0.0f64; 4]; count];
    const RESEED: usize = 128;
    for &(t, w) in &nodes {
        let rot = Complex64::from_polar(1.0, step * t);
        let mut z = Complex64::default();
        for (k, a) in acc.iter_mut().enumerate() {
            if k % RESEED == 0 {
                z = Complex64::from_polar(1.0, (start + k as f64 * step) * t);
            }
            a[0] += w * z.re;
            a[1] += w * z.im;
            a[2] += w * t * z.re;
            a[3] += w * t * z.im;
            z *= rot;
        }
    }
    let mut phi = HermiteTable {
        start,
        step,
        values: vec![0.0; count],
        slopes: vec![0.0; count],
    };
    let mut hphi = phi.clone();
    for (k, a) in acc.iter().enumerate() {
        let xi = start + k as f64 * step;
        let [c0, s0, tc0, ts0] = unit_moments(xi);
        phi.values[k] = (c0 + a[0]) / PI;
        phi.slopes[k] = -(ts0 + a[3]) / PI;
        hphi.values[k] = s0 + a[1];
        hphi.slopes[k] = tc0 + a[2];
    }
    [phi, hphi]
}

fn eta_hilbert_table(extent: f64, step: f64) -> HermiteTable {
    let count = (2.0 * extent / step).round() as usize + 1;
    let start = -extent;
    let mut t = HermiteTable {
        start,
        step,
        values: vec![0.0; count],
        slopes: vec![0.0; count],
    };
    for k in 0..count {
        let xi = start + k as f64 * step;
        t.values[k] = hilbert_pv(eta_hat, xi, 0.25)
            .expect("Gaussian integrand converges")
            .value;
        t.slopes[k] = hilbert_pv(eta_hat_derivative, xi, 0.25)
            .expect("Gaussian integrand converges")
            .value;
    }
    t
}

/// φ and η with cached transform tables.
#[derive(Debug)]
pub struct CutoffPair {
    phi_hat: HermiteTable,
    hilbert_phi_hat: HermiteTable,
    hilbert_eta_hat: HermiteTable,
    eta_moments: Vec<f64>,
}

/// Half-width and step of the φ̂ tables.
pub const PHI_TABLE_EXTENT: f64 = 400.0;
pub const PHI_TABLE_STEP: f64 = 1.0 / 64.0;
/// Half-width and step of the Hη̂ table; beyond it the moment expansion is
/// used.
pub const ETA_TABLE_EXTENT: f64 = 64.0;
pub const ETA_TABLE_STEP: f64 = 1.0 / 64.0;

impl CutoffPair {
    /// Builds the tables. Prefer [`CutoffPair::shared`].
    pub fn build() -> Self {
        let [phi_hat, hilbert_phi_hat] = phi_tables(PHI_TABLE_EXTENT, PHI_TABLE_STEP);
        Self {
            phi_hat,
            hilbert_phi_hat,
            hilbert_eta_hat: eta_hilbert_table(ETA_TABLE_EXTENT, ETA_TABLE_STEP),
            eta_moments: eta_moments(12),
        }
    }

    pub fn shared() -> &'static CutoffPair {
        static PAIR: OnceLock<CutoffPair> = OnceLock::new();
        PAIR.get_or_init(CutoffPair::build)
    }

    pub fn phi(&self, t: f64) -> f64 {
        phi_eval(t)
    }

    /// `φ̂(τ) = (1/2π) ∫ φ(t) e^{-itτ} dt`, real since φ is even.
    pub fn phi_hat(&self, tau: f64) -> f64 {
        if self.phi_hat.contains(tau) {
            self.phi_hat.eval(tau)
        } else {
            phi_transforms_direct(tau)[0]
        }
    }

    pub fn phi_hat_derivative(&self, tau: f64) -> f64 {
        if self.phi_hat.contains(tau) {
            self.phi_hat.slope(tau)
        } else {
            phi_transforms_direct(tau)[1]
        }
    }

    pub fn hilbert_phi_hat(&self, xi: f64) -> f64 {
        if self.hilbert_phi_hat.contains(xi) {
            self.hilbert_phi_hat.eval(xi)
        } else {
            phi_transforms_direct(xi)[2]
        }
    }

    pub fn eta_hat(&self, xi: f64) -> f64 {
        eta_hat(xi)
    }

    pub fn eta(&self, s: f64) -> Complex64 {
        eta_time(s)
    }

    /// `Hη̂(ξ)`, tabulated from [`hilbert_pv`].
    pub fn hilbert_eta_hat(&self, xi: f64) -> f64 {
        if self.hilbert_eta_hat.contains(xi) {
            self.hilbert_eta_hat.eval(xi)
        } else {
            // PV ∫ f(y)/(ξ - y) dy = Σ m_k / ξ^{k+1}
            let inv = 1.0 / xi;
            let mut p = inv;
            let mut s = 0.0;
            for m in &self.eta_moments {
                s += m * p;
                p *= inv;
            }
            s
        }
    }
}

pub fn phi_hat(tau: f64) -> f64 {
    CutoffPair::shared().phi_hat(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, AdaptiveOptions};

    fn phi_hat_reference(tau: f64) -> f64 {
        let opts = AdaptiveOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_panels: 4000,
        };
        adaptive(-2.0, 2.0, opts, |t| phi_eval(t) * (tau * t).cos())
            .unwrap()
            .value
            / (2.0 * PI)
    }

    use crate::kernels::test_support::dawson;

    #[test]
    fn phi_support_and_range() {
        assert_eq!(phi_eval(0.0), 1.0);
        assert_eq!(phi_eval(1.0), 1.0);
        assert_eq!(phi_eval(-0.7), 1.0);
        assert_eq!(phi_eval(2.0), 0.0);
        assert_eq!(phi_eval(3.0), 0.0);
        assert!((phi_eval(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=1000 {
            let v = phi_eval(1.0 + k as f64 / 1000.0);
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn phi_hat_matches_adaptive_quadrature() {
        let c = CutoffPair::shared();
        let v0 = c.phi_hat(0.0);
        assert!(v0 >= 2.0 / (2.0 * PI) && v0 <= 4.0 / (2.0 * PI));
        assert!((v0 - 3.0 / (2.0 * PI)).abs() < 1e-12, "φ is symmetric about 3/2 on [1,2]");
        for tau in [0.0, 0.013, -0.77, 3.3, 17.0, -41.25, 99.9, 250.1, 400.0] {
            let r = phi_hat_reference(tau);
            assert!((c.phi_hat(tau) - r).abs() < 1e-10, "{tau}: {} vs {r}", c.phi_hat(tau));
            let d = phi_transforms_direct(tau)[0];
            assert!((d - r).abs() < 1e-13, "{tau}: {d} vs {r}");
        }
    }

    #[test]
    fn phi_hat_decay_constant() {
        let c = CutoffPair::shared();
        let mut worst: f64 = 0.0;
        for k in -1000..=1000 {
            let tau = k as f64 * 0.1;
            worst = worst.max(c.phi_hat(tau).abs() * crate::jb(tau).powi(8));
        }
        assert!(worst.is_finite() && worst < 1e9, "{worst}");
    }

    #[test]
    fn hilbert_phi_hat_against_pv_quadrature() {
        let c = CutoffPair::shared();
        let opts = AdaptiveOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_panels: 4000,
        };
        for xi in [0.0, 0.4, -2.5, 10.0, 63.7, 350.2] {
            let sine = adaptive(0.0, 2.0, opts, |t| phi_eval(t) * (xi * t).sin()).unwrap().value;
            assert!((sine - c.hilbert_phi_hat(xi)).abs() < 1e-9, "{xi}: {sine} vs {}", c.hilbert_phi_hat(xi));
        }
        for xi in [0.4, -2.5] {
            let pv = hilbert_pv(|x| c.phi_hat(x), xi, 0.5).unwrap();
            assert!((pv.value - c.hilbert_phi_hat(xi)).abs() < 1e-9, "{xi}: {} vs {}", pv.value, c.hilbert_phi_hat(xi));
        }
        // Hφ̂ is odd and behaves like 1/ξ
        assert!((c.hilbert_phi_hat(7.3) + c.hilbert_phi_hat(-7.3)).abs() < 1e-14);
        assert!((c.hilbert_phi_hat(300.0) * 300.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn eta_conditions() {
        let c = CutoffPair::shared();
        assert_eq!(eta_hat(-1.0), 0.0);
        for x in [0.1, 0.9, 3.0] {
            assert!((eta_hat(-1.0 + x) + eta_hat(-1.0 - x)).abs() < 1e-16);
        }
        let v = hilbert_pv(eta_hat, -1.0, 0.25).unwrap();
        assert!((v.value + 1.0).abs() < 1e-10);
        assert!((c.hilbert_eta_hat(-1.0) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn hilbert_eta_hat_closed_form() {
        // PV ∫ y e^{-y²}/(x - y) dy = √π (2x D(x) - 1)
        let c = CutoffPair::shared();
        for xi in [-60.0, -9.1, -1.0, -0.3, 0.0, 0.77, 5.0, 40.0, 63.99, 64.5, 100.0, -500.0] {
            let x = xi + 1.0;
            let exact = 2.0 * x * dawson(x) - 1.0;
            let v = c.hilbert_eta_hat(xi);
            assert!((v - exact).abs() < 1e-8, "{xi}: {v} vs {exact}");
        }
    }

    #[test]
    fn eta_time_is_the_inverse_transform() {
        for s in [-3.0, -0.5, 0.0, 0.2, 2.0] {
            let v = adaptive(-12.0, 12.0, AdaptiveOptions::default(), |xi| {
                Complex64::from_polar(eta_hat(xi), s * xi)
            })
            .unwrap()
            .value;
            assert!((v - eta_time(s)).norm() < 1e-12);
        }
    }

    #[test]
    fn moments() {
        let m = eta_moments(6);
        let expect = [0.0, 0.5, -1.0, 2.25, -5.0, 11.875];
        for (a, b) in m.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
