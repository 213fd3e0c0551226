//! Kernels of the truncated Duhamel operator and of its modified pieces,
//! their pointwise quadrature, and bound sweeps.
//!
//! All kernels take modulation variables: `τ` and `λ` are already shifted
//! by `n³`. With real cutoffs, `K` is purely imaginary and `K_G`, `K_B` are
//! real; all are returned as complex numbers.

mod cutoff;
mod hilbert;
pub mod sweep;

use serde::{Deserialize, Serialize};

pub use cutoff::*;
pub use hilbert::*;

use crate::error::{Error, Result};
use crate::jb;
use crate::quadrature::{adaptive_breaks, AdaptiveOptions, GaussLegendre};
use crate::Complex64;

/// Half-width of the μ-window around the localizing variable. φ̂ is below
/// 1e-11 beyond it.
pub const MU_RANGE: f64 = 240.0;

fn options() -> AdaptiveOptions {
    AdaptiveOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_panels: 20_000,
    }
}

fn check_phi(phi: i64) -> Result<f64> {
    if phi == 0 {
        Err(Error::InvalidParameter("resonance Φ must be nonzero".into()))
    } else {
        Ok(phi as f64)
    }
}

/// Integer breakpoints covering `[lo, hi]`, plus the interval ends.
fn unit_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut b = vec![lo];
    let mut k = lo.floor() + 1.0;
    while k < hi {
        if k - lo > 1e-9 && hi - k > 1e-9 {
            b.push(k);
        }
        k += 1.0;
    }
    b.push(hi);
    b
}

fn integrate(lo: f64, hi: f64, f: impl FnMut(f64) -> f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let mut f = f;
    Ok(adaptive_breaks(&unit_breaks(lo, hi), options(), &mut f)?.value)
}

/// Integral over `[lo, hi] \ (-1, 1)`.
fn integrate_outer(lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
    Ok(integrate(lo, hi.min(-1.0), &mut f)? + integrate(lo.max(1.0), hi, &mut f)?)
}

/// `(φ̂(τ-μ) - φ̂(τ))/μ`, continuous at `μ = 0`.
fn difference_quotient(c: &CutoffPair, tau: f64, mu: f64) -> f64 {
    if mu.abs() < 1e-9 {
        -c.phi_hat_derivative(tau)
    } else {
        (c.phi_hat(tau - mu) - c.phi_hat(tau)) / mu
    }
}

/// `K(τ, λ) = -i ∫ φ̂(μ-λ) (φ̂(τ-μ) - φ̂(τ))/μ dμ`.
pub fn kernel_k(tau: f64, lambda: f64) -> Result<Complex64> {
    let c = CutoffPair::shared();
    let v = integrate(lambda - MU_RANGE, lambda + MU_RANGE, |mu| {
        c.phi_hat(mu - lambda) * difference_quotient(c, tau, mu)
    })?;
    Ok(Complex64::new(0.0, -v))
}

/// The two terms of `K_G`:
/// `T1 = (1/Φ) ∫ φ̂(τ-μ) φ̂(μ-λ) Hη̂(μ/Φ) dμ` and
/// `T2 = (1/|Φ|) ∫ φ̂(τ-μ) Hφ̂(μ-λ) η̂(μ/Φ) dμ`.
pub fn kg_terms(tau: f64, lambda: f64, phi: i64) -> Result<(f64, f64)> {
    let p = check_phi(phi)?;
    let c = CutoffPair::shared();
    let t1 = integrate(tau.min(lambda) - MU_RANGE, tau.max(lambda) + MU_RANGE, |mu| {
        c.phi_hat(tau - mu) * c.phi_hat(mu - lambda) * c.hilbert_eta_hat(mu / p)
    })? / p;
    let t2 = integrate(tau - MU_RANGE, tau + MU_RANGE, |mu| {
        c.phi_hat(tau - mu) * c.hilbert_phi_hat(mu - lambda) * eta_hat(mu / p)
    })? / p.abs();
    Ok((t1, t2))
}

/// `K_G = T1 + T2`.
pub fn kernel_kg(tau: f64, lambda: f64, phi: i64) -> Result<Complex64> {
    let (t1, t2) = kg_terms(tau, lambda, phi)?;
    Ok(Complex64::new(t1 + t2, 0.0))
}

/// `K_B = iK - K_G`.
pub fn kernel_kb(tau: f64, lambda: f64, phi: i64) -> Result<Complex64> {
    let k = kernel_k(tau, lambda)?;
    let kg = kernel_kg(tau, lambda, phi)?;
    Ok(Complex64::i() * k - kg)
}

/// The five pieces of `K_B` obtained by splitting the μ-line at `|μ| = 1`:
///
/// ```text
/// I1 = ∫_{|μ|≤1} (φ̂(τ-μ) - φ̂(τ)) φ̂(μ-λ) / μ
/// I2 = -(1/Φ) ∫_{|μ|≤1} φ̂(τ-μ) φ̂(μ-λ) Hη̂(μ/Φ)
/// I3 = ∫_{|μ|>1} φ̂(τ-μ) φ̂(μ-λ) (1/μ - Hη̂(μ/Φ)/Φ)
/// I4 = -T2
/// I5 = -∫_{|μ|>1} φ̂(τ) φ̂(μ-λ) / μ
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KbPieces {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
}

impl KbPieces {
    pub fn sum(&self) -> f64 {
        self.i1 + self.i2 + self.i3 + self.i4 + self.i5
    }

    /// `(K₀, K₊)`, with indicator thresholds at ratio 1.
    pub fn split(&self, tau: f64, lambda: f64, phi: f64) -> (f64, f64) {
        let low = jb(lambda) >= jb(phi);
        let mid = jb(lambda + phi) <= jb(tau - lambda);
        let high = jb(tau + phi) <= jb(tau - lambda);
        let i15 = self.i1 + self.i5;
        let pick = |on: bool, v: f64| if on { (v, 0.0) } else { (0.0, v) };
        let (a0, a1) = pick(low, i15);
        let (b0, b1) = pick(mid, self.i3);
        let (c0, c1) = pick(high, self.i4);
        (a0 + b0 + c0 + self.i2, a1 + b1 + c1)
    }
}

/// Pieces of `K_B` by adaptive quadrature.
pub fn kb_pieces(tau: f64, lambda: f64, phi: i64) -> Result<KbPieces> {
    let p = check_phi(phi)?;
    let c = CutoffPair::shared();
    let g = |mu: f64| c.phi_hat(tau - mu) * c.phi_hat(mu - lambda);
    let i1 = integrate(-1.0, 1.0, |mu| {
        difference_quotient(c, tau, mu) * c.phi_hat(mu - lambda)
    })?;
    let i2 = -integrate(-1.0, 1.0, |mu| g(mu) * c.hilbert_eta_hat(mu / p))? / p;
    let i3 = integrate_outer(
        tau.min(lambda) - MU_RANGE,
        tau.max(lambda) + MU_RANGE,
        |mu| g(mu) * (1.0 / mu - c.hilbert_eta_hat(mu / p) / p),
    )?;
    let (_, t2) = kg_terms(tau, lambda, phi)?;
    let i5 = -c.phi_hat(tau)
        * integrate_outer(lambda - MU_RANGE, lambda + MU_RANGE, |mu| {
            c.phi_hat(mu - lambda) / mu
        })?;
    Ok(KbPieces {
        i1,
        i2,
        i3,
        i4: -t2,
        i5,
    })
}

/// Composite 32-point Gauss-Legendre over `[a, b]` with panels of width at
/// most 1.25.
fn gl_panels(a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a) / 1.25).ceil().max(1.0) as usize;
    GaussLegendre::gl32().composite(a, b, panels, f)
}

/// Pieces of `K_B` by fixed composite Gauss-Legendre quadrature, independent
/// of the adaptive path.
pub fn kb_pieces_direct(tau: f64, lambda: f64, phi: i64) -> Result<KbPieces> {
    let p = check_phi(phi)?;
    let c = CutoffPair::shared();
    let g = |mu: f64| c.phi_hat(tau - mu) * c.phi_hat(mu - lambda);
    let inner = |f: &dyn Fn(f64) -> f64| gl_panels(-1.0, 0.0, f) + gl_panels(0.0, 1.0, f);
    let outer = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| {
        gl_panels(lo, hi.min(-1.0), f) + gl_panels(lo.max(1.0), hi, f)
    };
    let ft = c.phi_hat(tau);
    let i1 = inner(&|mu| (c.phi_hat(tau - mu) - ft) / mu * c.phi_hat(mu - lambda));
    let i2 = -inner(&|mu| g(mu) * c.hilbert_eta_hat(mu / p)) / p;
    let i3 = outer(
        tau.min(lambda) - MU_RANGE,
        tau.max(lambda) + MU_RANGE,
        &|mu| g(mu) * (1.0 / mu - c.hilbert_eta_hat(mu / p) / p),
    );
    let i4 = -gl_panels(tau - MU_RANGE, tau + MU_RANGE, |mu| {
        c.phi_hat(tau - mu) * c.hilbert_phi_hat(mu - lambda) * eta_hat(mu / p)
    }) / p.abs();
    let i5 = -ft * outer(lambda - MU_RANGE, lambda + MU_RANGE, &|mu| c.phi_hat(mu - lambda) / mu);
    Ok(KbPieces { i1, i2, i3, i4, i5 })
}

/// `K_B` as the sum of [`kb_pieces_direct`].
pub fn kernel_kb_direct(tau: f64, lambda: f64, phi: i64) -> Result<Complex64> {
    Ok(Complex64::new(kb_pieces_direct(tau, lambda, phi)?.sum(), 0.0))
}

/// `(K₀, K₊)` with `K₀ + K₊ = K_B`.
pub fn split_k0_kplus(tau: f64, lambda: f64, phi: i64) -> Result<(Complex64, Complex64)> {
    let pieces = kb_pieces(tau, lambda, phi)?;
    let (k0, kp) = pieces.split(tau, lambda, phi as f64);
    Ok((Complex64::new(k0, 0.0), Complex64::new(kp, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `K` against `1/(⟨τ⟩⟨τ-λ⟩)`.
    K,
    /// `K` against `1/⟨λ⟩`.
    KDecay,
    /// `K_G` against `min(1/⟨Φ⟩, 1/⟨τ⟩)/⟨τ-λ⟩`.
    KG,
    /// `K_B` against its three-term bound.
    KB,
    K0,
    KPlus,
}

impl KernelKind {
    pub const ALL: [KernelKind; 6] = [
        KernelKind::K,
        KernelKind::KDecay,
        KernelKind::KG,
        KernelKind::KB,
        KernelKind::K0,
        KernelKind::KPlus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::K => "k",
            KernelKind::KDecay => "k_decay",
            KernelKind::KG => "kg",
            KernelKind::KB => "kb",
            KernelKind::K0 => "k0",
            KernelKind::KPlus => "kplus",
        }
    }

    pub fn depends_on_phi(&self) -> bool {
        !matches!(self, KernelKind::K | KernelKind::KDecay)
    }

    /// Right-hand side of the bound at `(τ, λ, Φ)`, with exponent `alpha`
    /// where the bound has one.
    pub fn bound(&self, tau: f64, lambda: f64, phi: f64, alpha: f64) -> f64 {
        let (t, l, p) = (jb(tau), jb(lambda), jb(phi));
        let tl = jb(tau - lambda);
        match self {
            KernelKind::K => 1.0 / (t * tl),
            KernelKind::KDecay => 1.0 / l,
            KernelKind::KG => (1.0 / p).min(1.0 / t) / tl,
            KernelKind::KB => {
                1.0 / (t.powf(alpha) * l)
                    + jb(lambda + phi) / (tl.powf(alpha) * l) * (1.0 / p).min(1.0 / l)
                    + jb(tau + phi) / tl * (1.0 / p).min(1.0 / t).powi(2)
            }
            KernelKind::K0 => 1.0 / (t.powf(1.0 + alpha) * p.powf(1.0 - alpha)),
            KernelKind::KPlus => {
                let first = if l < p { 1.0 / (tl * t) } else { 0.0 };
                first
                    + jb(lambda + phi).powf(1.0 - alpha) / (tl * t)
                        * (1.0 / p).min(1.0 / t).powf(1.0 - alpha)
            }
        }
    }

    /// Pointwise value by adaptive quadrature.
    pub fn evaluate(&self, tau: f64, lambda: f64, phi: i64) -> Result<Complex64> {
        match self {
            KernelKind::K | KernelKind::KDecay => kernel_k(tau, lambda),
            KernelKind::KG => kernel_kg(tau, lambda, phi),
            KernelKind::KB => kernel_kb(tau, lambda, phi),
            KernelKind::K0 => Ok(split_k0_kplus(tau, lambda, phi)?.0),
            KernelKind::KPlus => Ok(split_k0_kplus(tau, lambda, phi)?.1),
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown kernel {s}")))
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::quadrature::{adaptive_breaks, AdaptiveOptions};

    /// Dawson's integral `e^{-x²} ∫_0^x e^{t²} dt`, as `∫_0^x e^{-s(2x-s)} ds`
    /// truncated where the integrand is below `e^{-40}`.
    pub fn dawson(x: f64) -> f64 {
        let a = x.abs();
        if a == 0.0 {
            return 0.0;
        }
        let end = a.min(40.0 / a);
        let breaks: Vec<f64> = (0..=16).map(|k| end * k as f64 / 16.0).collect();
        let opts = AdaptiveOptions {
            abs_tol: 1e-16,
            rel_tol: 1e-14,
            max_panels: 4000,
        };
        adaptive_breaks(&breaks, opts, &mut |s: f64| (-s * (2.0 * a - s)).exp())
            .unwrap()
            .value
            * x.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_hat_tail_is_negligible() {
        let c = CutoffPair::shared();
        for x in [MU_RANGE, MU_RANGE + 0.3, -MU_RANGE - 7.1, 399.0, 500.0] {
            assert!(c.phi_hat(x).abs() < 1e-11, "{x}: {}", c.phi_hat(x));
        }
    }

    #[test]
    fn k_is_imaginary_and_kb_real() {
        let k = kernel_k(0.5, -2.0).unwrap();
        assert_eq!(k.re, 0.0);
        assert!(k.im.abs() > 1e-6);
        let kb = kernel_kb(0.5, -2.0, 6).unwrap();
        assert_eq!(kb.im, 0.0);
        assert!(kernel_kg(0.0, 0.0, 0).is_err());
    }

    #[test]
    fn two_paths_agree_at_reference_point() {
        let a = kernel_kb(0.0, 0.0, 6).unwrap();
        let b = kernel_kb_direct(0.0, 0.0, 6).unwrap();
        assert!((a - b).norm() < 1e-7, "{a} vs {b}");
        for (t, l, p) in [(3.0, -4.5, -24), (-20.0, 10.0, 960), (41.0, 40.0, -6)] {
            let a = kernel_kb(t, l, p).unwrap();
            let b = kernel_kb_direct(t, l, p).unwrap();
            assert!((a - b).norm() < 1e-7, "({t},{l},{p}): {a} vs {b}");
        }
    }

    #[test]
    fn pieces_reassemble_kb() {
        for (t, l, p) in [(0.0, 0.0, 6), (2.5, -1.0, -96), (-30.0, 12.0, 24)] {
            let pieces = kb_pieces(t, l, p).unwrap();
            let kb = kernel_kb(t, l, p).unwrap().re;
            assert!((pieces.sum() - kb).abs() < 1e-9, "{} vs {kb}", pieces.sum());
            let (k0, kp) = split_k0_kplus(t, l, p).unwrap();
            assert!((k0 + kp - kb).norm() < 1e-9);
        }
    }

    #[test]
    fn kplus_vanishes_where_all_indicators_are_off() {
        // ⟨λ⟩ ≥ ⟨Φ⟩, ⟨λ+Φ⟩ ≤ ⟨τ-λ⟩, ⟨τ+Φ⟩ ≤ ⟨τ-λ⟩
        let (t, l, p) = (-20.0, 10.0, -6);
        let (_, kp) = split_k0_kplus(t, l, p).unwrap();
        assert_eq!(kp, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn kg_decays_in_phi() {
        let big = kernel_kg(0.0, 0.0, 10_000).unwrap().norm();
        let small = kernel_kg(0.0, 0.0, 100).unwrap().norm();
        assert!(big * jb(1e4) < 10.0 && small * jb(100.0) < 10.0, "{big} {small}");
    }

    #[test]
    fn kind_names_round_trip() {
        for k in KernelKind::ALL {
            assert_eq!(k.name().parse::<KernelKind>().unwrap(), k);
        }
    }
}
