//! Principal-value Hilbert transform `Hf(ξ) = PV ∫ f(ξ - μ) / μ dμ`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::{adaptive_breaks, adaptive_to_infinity, gk15, AdaptiveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvEstimate {
    pub value: f64,
    /// Difference between the last two extrapolation levels plus the
    /// quadrature error estimates.
    pub error: f64,
}

impl PvEstimate {
    pub fn converged(&self, tol: f64) -> bool {
        self.error <= tol * self.value.abs().max(1.0)
    }
}

const LEVELS: usize = 7;

/// `PV ∫ f(ξ - μ)/μ dμ` for smooth, rapidly decaying `f`.
///
/// Written as `∫_0^∞ (f(ξ-μ) - f(ξ+μ))/μ dμ`. The outer part `μ > 1` is
/// integrated adaptively; the inner part is integrated on `[ε, 1]` for
/// `ε = exclusion, exclusion/2, …` and extrapolated to `ε = 0`, using that the
/// omitted piece `∫_0^ε` is odd in `ε`.
pub fn hilbert_pv(f: impl Fn(f64) -> f64, xi: f64, exclusion: f64) -> Result<PvEstimate> {
    if !(exclusion > 0.0 && exclusion <= 1.0) {
        return Err(crate::Error::InvalidParameter(format!(
            "exclusion radius {exclusion} outside (0, 1]"
        )));
    }
    let g = |mu: f64| (f(xi - mu) - f(xi + mu)) / mu;
    let opts = AdaptiveOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_panels: 8000,
    };

    let mut breaks = vec![1.0];
    let mut b = 2.0;
    while b < 16.0 {
        breaks.push(b);
        b *= 2.0;
    }
    // slowly decaying f (Gevrey-class transforms) need a long explicit range
    while b < xi.abs() + 512.0 {
        breaks.push(b);
        b += 8.0;
    }
    breaks.push(b);
    let mut gm = g;
    let mid = adaptive_breaks(&breaks, opts, &mut gm)?;
    let tail = adaptive_to_infinity(b, opts, g)?;
    let mut qerr = mid.error + tail.error;
    let outer = mid.value + tail.value;

    let mut eps = exclusion;
    let inner0 = adaptive_breaks(&[eps, 1.0], opts, &mut gm)?;
    qerr += inner0.error;
    let mut table = [[0.0; LEVELS]; LEVELS];
    table[0][0] = outer + inner0.value;
    for i in 1..LEVELS {
        let (piece, e) = gk15(eps / 2.0, eps, &mut gm);
        qerr += e;
        eps /= 2.0;
        table[i][0] = table[i - 1][0] + piece;
        for j in 1..=i {
            let k = 2f64.powi(2 * j as i32 - 1);
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (k - 1.0);
        }
    }
    let value = table[LEVELS - 1][LEVELS - 1];
    let error = (value - table[LEVELS - 1][LEVELS - 2]).abs() + qerr;
    Ok(PvEstimate { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::test_support::dawson;

    fn gauss(x: f64) -> f64 {
        (-x * x).exp()
    }

    #[test]
    fn gaussian_is_odd_about_zero() {
        let v = hilbert_pv(gauss, 0.0, 0.25).unwrap();
        assert!(v.value.abs() < 1e-14);
        // H e^{-x²} = 2√π D(x)
        for xi in [0.3, -1.7, 4.0, 25.0] {
            let v = hilbert_pv(gauss, xi, 0.25).unwrap();
            let exact = 2.0 * std::f64::consts::PI.sqrt() * dawson(xi);
            assert!((v.value - exact).abs() < 1e-10, "{xi}: {} vs {exact}", v.value);
            assert!(v.converged(1e-8));
        }
    }

    #[test]
    fn exclusion_radius_does_not_matter() {
        let a = hilbert_pv(gauss, 0.8, 1.0).unwrap().value;
        let b = hilbert_pv(gauss, 0.8, 0.1).unwrap().value;
        assert!((a - b).abs() < 1e-11);
        assert!(hilbert_pv(gauss, 0.8, 0.0).is_err());
    }

    #[test]
    fn decay_like_one_over_xi() {
        let mut worst: f64 = 0.0;
        for k in -100..=100 {
            let xi = k as f64 * 0.5;
            let v = hilbert_pv(gauss, xi, 0.25).unwrap().value;
            worst = worst.max(v.abs() * crate::jb(xi));
        }
        // 2√π sup |D(ξ)|⟨ξ⟩ on this grid
        assert!((worst - 2.736_799_879_853_734).abs() < 1e-9, "{worst}");
    }
}
