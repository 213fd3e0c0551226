//! Divisor counting near a point and the weighted convolution bound
//!
//! ```text
//! ∫ ⟨x-a⟩^{-α} ⟨x-b⟩^{-β} dx ≲ ⟨a-b⟩^{-γ}
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jb;
use crate::quadrature::{adaptive, adaptive_breaks, AdaptiveOptions};

/// Divisors `r` of `k` (either sign) with `|r - q| ≤ ρ`, by trial division.
pub fn divisor_count_near(k: i64, q: i64, rho: f64) -> Result<u64> {
    if k == 0 || !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("k = {k}, rho = {rho}")));
    }
    let m = k.unsigned_abs();
    let near = |r: i128| ((r - q as i128).abs() as f64) <= rho;
    let mut count = 0;
    let mut d: u64 = 1;
    while d * d <= m {
        if m % d == 0 {
            let pair = m / d;
            let mut ds = vec![d as i128];
            if pair != d {
                ds.push(pair as i128);
            }
            for r in ds {
                count += near(r) as u64 + near(-r) as u64;
            }
        }
        d += 1;
    }
    Ok(count)
}

/// Same count by scanning the window `[q - ρ, q + ρ]`.
pub fn divisors_near_brute(k: i64, q: i64, rho: f64) -> Result<u64> {
    if k == 0 || !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("k = {k}, rho = {rho}")));
    }
    let w = rho.floor() as i128;
    let q = q as i128;
    Ok((q - w..=q + w)
        .filter(|&r| r != 0 && (k as i128) % r == 0)
        .count() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorSample {
    pub k: i64,
    pub q: i64,
    pub rho: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorReport {
    pub samples: usize,
    /// Samples where the two counting methods disagree.
    pub mismatches: usize,
    /// `max count/ρ^{1/2}` over the first half of the samples.
    pub fitted_constant: f64,
    /// Second-half samples above `C·ρ^{1/2}`.
    pub violations: Vec<DivisorSample>,
    pub max_count: u64,
    pub pass: bool,
}

/// Random `0 < |k| ≤ 10⁹`, integer `1 ≤ ρ ≤ 10³` and `|q| ≥ |k|^{1/3}`, half of the
/// `q` placed near a divisor of `k`. The constant is fitted on the first
/// half of the samples and tested on the second.
pub fn verify_divisor_lemma(sample_count: usize, seed: u64) -> Result<DivisorReport> {
    if sample_count < 2 {
        return Err(Error::InvalidParameter("at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(sample_count);
    let mut mismatches = 0;
    for _ in 0..sample_count {
        let m: i64 = rng.gen_range(1..=1_000_000_000);
        let k = if rng.gen_bool(0.5) { m } else { -m };
        let floor = ((m as f64).cbrt().ceil() as i64).max(1);
        let rho = 10f64.powf(rng.gen_range(0.0..3.0)).round();
        let q = if rng.gen_bool(0.5) {
            let mut d = rng.gen_range(1..=m.min(1_000_000));
            while m % d != 0 {
                d -= 1;
            }
            let d = if d < floor { m / d } else { d };
            let w = rho.floor() as i64;
            (d + rng.gen_range(-w..=w)).max(floor)
        } else {
            rng.gen_range(floor..=m.max(floor))
        };
        let q = if rng.gen_bool(0.5) { q } else { -q };
        let count = divisor_count_near(k, q, rho)?;
        if count != divisors_near_brute(k, q, rho)? {
            mismatches += 1;
        }
        samples.push(DivisorSample { k, q, rho, count });
    }
    let half = sample_count / 2;
    let fitted_constant = samples[..half]
        .iter()
        .map(|s| s.count as f64 / s.rho.sqrt())
        .fold(0.0, f64::max);
    let violations: Vec<DivisorSample> = samples[half..]
        .iter()
        .filter(|s| s.count as f64 > fitted_constant * s.rho.sqrt())
        .cloned()
        .collect();
    let max_count = samples.iter().map(|s| s.count).max().unwrap_or(0);
    Ok(DivisorReport {
        samples: sample_count,
        mismatches,
        fitted_constant,
        pass: mismatches == 0 && violations.is_empty(),
        violations,
        max_count,
    })
}

/// `γ` and the name of its branch for `0 ≤ α ≤ β`, `α + β > 1`.
pub fn convolution_gamma(alpha: f64, beta: f64, eps: f64) -> Result<(f64, &'static str)> {
    if !(0.0 <= alpha && alpha <= beta && alpha + beta > 1.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 ≤ α ≤ β and α + β > 1, got α = {alpha}, β = {beta}"
        )));
    }
    Ok(if beta < 1.0 {
        (alpha + beta - 1.0, "beta<1")
    } else if beta == 1.0 {
        (alpha - eps, "beta=1")
    } else {
        (alpha, "beta>1")
    })
}

fn opts() -> AdaptiveOptions {
    AdaptiveOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_panels: 20000,
    }
}

/// `∫ ⟨x-a⟩^{-α} ⟨x-b⟩^{-β} dx`.
pub fn convolution_lhs(alpha: f64, beta: f64, a: f64, b: f64) -> Result<f64> {
    convolution_gamma(alpha, beta, 1.0)?;
    let f = |x: f64| jb(x - a).powf(-alpha) * jb(x - b).powf(-beta);
    let (lo, hi) = (a.min(b), a.max(b));
    let reach = 1.0 + (hi - lo);
    let mut breaks = vec![lo - reach, lo - 1.0, lo, lo + 1.0, hi - 1.0, hi, hi + 1.0, hi + reach];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut g = f;
    let core = adaptive_breaks(&breaks, opts(), &mut g)?.value;
    // tails through x = edge ± reach·(e^u - 1); beyond u_max the integrand
    // is |x - mid|^{-(α+β)} up to relative O(reach²/x²)
    let decay = alpha + beta - 1.0;
    let u_max = (60.0 / decay).min(600.0);
    let mid = 0.5 * (a + b);
    let tail = |sign: f64, edge: f64| -> Result<f64> {
        let body = adaptive(0.0, u_max, opts(), |u| {
            let e = u.exp();
            f(edge + sign * reach * (e - 1.0)) * reach * e
        })?
        .value;
        let x_end = (edge - mid).abs() + reach * u_max.exp_m1();
        Ok(body + x_end.powf(-decay) / decay)
    };
    Ok(core + tail(1.0, hi + reach)? + tail(-1.0, lo - reach)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionRow {
    pub a: f64,
    pub b: f64,
    pub lhs: f64,
    /// `lhs·⟨a-b⟩^γ`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub branch: String,
    pub rows: Vec<ConvolutionRow>,
    /// Largest ratio.
    pub constant: f64,
}

/// Ratios on the given centers; `eps` enters only when `β = 1`.
pub fn convolution_lemma_check(alpha: f64, beta: f64, eps: f64, pairs: &[(f64, f64)]) -> Result<ConvolutionReport> {
    let (gamma, branch) = convolution_gamma(alpha, beta, eps)?;
    let rows = pairs
        .iter()
        .map(|&(a, b)| {
            let lhs = convolution_lhs(alpha, beta, a, b)?;
            Ok(ConvolutionRow {
                a,
                b,
                lhs,
                ratio: lhs * jb(a - b).powf(gamma),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ConvolutionReport {
        alpha,
        beta,
        gamma,
        branch: branch.into(),
        rows,
        constant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionSweep {
    pub coarse: ConvolutionReport,
    pub fine: ConvolutionReport,
    pub relative_change: f64,
    /// Log-log slope of the ratio over the last decade of `|a - b|`.
    pub tail_slope: f64,
    /// Finite constants that move by at most 10% under step halving.
    pub pass: bool,
}

/// Centers `a = 0`, `b ∈ {0, step, …, extent}` and the same with half the
/// step.
pub fn convolution_sweep(alpha: f64, beta: f64, eps: f64, extent: f64, step: f64) -> Result<ConvolutionSweep> {
    if !(step > 0.0 && extent >= step) {
        return Err(Error::InvalidParameter(format!("extent {extent}, step {step}")));
    }
    let pairs = |h: f64| -> Vec<(f64, f64)> {
        let m = (extent / h).round() as usize;
        (0..=m).map(|j| (0.0, j as f64 * h)).collect()
    };
    let coarse = convolution_lemma_check(alpha, beta, eps, &pairs(step))?;
    let fine = convolution_lemma_check(alpha, beta, eps, &pairs(step / 2.0))?;
    let relative_change = (fine.constant - coarse.constant).abs() / coarse.constant;
    let last = fine.rows.last().expect("nonempty");
    let tenth = fine
        .rows
        .iter()
        .min_by(|x, y| (x.b - extent / 10.0).abs().total_cmp(&(y.b - extent / 10.0).abs()))
        .expect("nonempty");
    let tail_slope = (last.ratio / tenth.ratio).ln() / (last.b / tenth.b).ln();
    Ok(ConvolutionSweep {
        pass: coarse.constant.is_finite() && fine.constant.is_finite() && relative_change <= 0.1,
        coarse,
        fine,
        relative_change,
        tail_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn divisor_examples() {
        assert_eq!(divisor_count_near(12, 5, 3.0).unwrap(), 4);
        assert_eq!(divisor_count_near(1, 7, 14.0).unwrap(), 2);
        assert_eq!(divisor_count_near(1, 0, 2.0).unwrap(), 2);
        assert_eq!(divisor_count_near(101, 0, 101.0).unwrap(), 4);
        assert_eq!(divisor_count_near(-101, 0, 101.0).unwrap(), 4);
        assert!(divisor_count_near(0, 1, 1.0).is_err());
    }

    #[test]
    fn divisor_lemma_holds_on_samples() {
        let r = verify_divisor_lemma(2000, 7).unwrap();
        assert_eq!(r.mismatches, 0);
        assert!(r.pass, "{:?}", r.violations);
        assert!(r.max_count >= 1);
    }

    #[test]
    fn coincident_centers() {
        // ∫ ⟨x⟩^{-2} = π
        let v = convolution_lhs(1.0, 1.0, 3.0, 3.0).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-9, "{v}");
        let r = convolution_lemma_check(1.0, 1.0, 0.01, &[(2.0, 2.0)]).unwrap();
        assert_eq!(r.rows[0].ratio, r.rows[0].lhs);
        assert!((r.gamma - 0.99).abs() < 1e-15 && r.branch == "beta=1");
    }

    #[test]
    fn slow_tails_are_integrated() {
        // ∫ ⟨x⟩^{-1.2} = √π Γ(0.1)/Γ(0.6)
        let v = convolution_lhs(0.4, 0.8, 0.0, 0.0).unwrap();
        let exact = 11.323_086_975_215_757;
        assert!((v - exact).abs() < 1e-7 * exact, "{v}");
    }

    #[test]
    fn branches() {
        assert_eq!(convolution_gamma(0.4, 0.8, 0.01).unwrap().1, "beta<1");
        assert!((convolution_gamma(0.4, 0.8, 0.01).unwrap().0 - 0.2).abs() < 1e-15);
        assert_eq!(convolution_gamma(0.5, 1.5, 0.01).unwrap(), (0.5, "beta>1"));
        assert!(convolution_gamma(0.3, 0.5, 0.01).is_err());
        assert!(convolution_gamma(0.8, 0.4, 0.01).is_err());
    }

    #[test]
    fn sweeps_are_stable() {
        for (a, b) in [(0.4, 0.8), (1.0, 1.0), (0.5, 1.5)] {
            let s = convolution_sweep(a, b, 0.01, 200.0, 4.0).unwrap();
            assert!(s.pass, "{a} {b}: {}", s.relative_change);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn counts_agree(k in -100_000i64..100_000, q in -2000i64..2000, rho in 0.0f64..300.0) {
            prop_assume!(k != 0);
            prop_assert_eq!(divisor_count_near(k, q, rho).unwrap(), divisors_near_brute(k, q, rho).unwrap());
        }
    }
}
