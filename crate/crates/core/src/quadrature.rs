//! Quadrature rules: Gauss-Legendre, adaptive Gauss-Kronrod, and cumulative
//! rules on uniformly sampled data.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: a vector space over f64 with a size.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Default
{
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// A Gauss-Legendre rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn gl16() -> &'static GaussLegendre {
        static R: OnceLock<GaussLegendre> = OnceLock::new();
        R.get_or_init(|| GaussLegendre::new(16))
    }

    /// Shared 32-point rule.
    pub fn gl32() -> &'static GaussLegendre {
        static R: OnceLock<GaussLegendre> = OnceLock::new();
        R.get_or_init(|| GaussLegendre::new(32))
    }

    /// Nodes and weights on [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + r * x, r * w))
    }

    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
        let mut acc = T::default();
        for (x, w) in self.mapped(a, b) {
            acc = acc + f(x) * w;
        }
        acc
    }

    /// Composite rule over `panels` equal panels of [a, b].
    pub fn composite<T: Integrand>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> T,
    ) -> T {
        let h = (b - a) / panels as f64;
        let mut acc = T::default();
        for k in 0..panels {
            let lo = a + k as f64 * h;
            acc = acc + self.integrate(lo, lo + h, &mut f);
        }
        acc
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel with the embedded 7-point Gauss error estimate.
pub fn gk15<T: Integrand>(a: f64, b: f64, f: &mut impl FnMut(f64) -> T) -> (T, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = r * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * r;
    let g = g * r;
    (k, (k - g).magnitude())
}

/// Tolerances and work limit for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Globally adaptive Gauss-Kronrod integration on a finite interval.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets the tolerance. Running out of panels is an error that
/// carries the achieved estimate.
pub fn adaptive<T: Integrand>(
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
    mut f: impl FnMut(f64) -> T,
) -> Result<Estimate<T>> {
    adaptive_breaks(&[a, b], opts, &mut f)
}

/// As [`adaptive`], starting from the given break points.
pub fn adaptive_breaks<T: Integrand>(
    breaks: &[f64],
    opts: AdaptiveOptions,
    f: &mut impl FnMut(f64) -> T,
) -> Result<Estimate<T>> {
    let mut panels: Vec<(f64, f64, T, f64)> = breaks
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(w[0], w[1], f);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let mut total = T::default();
        let mut err = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            total = total + p.2;
            err += p.3;
            if p.3 > panels[worst].3 {
                worst = i;
            }
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= tol {
            return Ok(Estimate { value: total, error: err });
        }
        let (a, b, _, _) = panels[worst];
        let m = 0.5 * (a + b);
        if panels.len() >= opts.max_panels || m <= a || m >= b {
            return Err(Error::Quadrature {
                estimate: err,
                tolerance: tol,
            });
        }
        let (v1, e1) = gk15(a, m, f);
        let (v2, e2) = gk15(m, b, f);
        panels[worst] = (a, m, v1, e1);
        panels.push((m, b, v2, e2));
    }
}

/// Adaptive integration over [a, ∞) through the map x = a + s/(1-s).
pub fn adaptive_to_infinity<T: Integrand>(
    a: f64,
    opts: AdaptiveOptions,
    mut f: impl FnMut(f64) -> T,
) -> Result<Estimate<T>> {
    adaptive(0.0, 1.0, opts, |s| {
        let d = 1.0 - s;
        if d < 1e-12 {
            return T::default();
        }
        f(a + s / d) * (1.0 / (d * d))
    })
}

/// Cumulative integrals `I_k = ∫_{t_0}^{t_k} y` of uniformly spaced samples,
/// fourth order. Needs at least four samples.
pub fn cumulative_fourth_order<T: Integrand>(y: &[T], h: f64) -> Result<Vec<T>> {
    let m = y.len();
    if m < 4 {
        return Err(Error::Resolution(format!(
            "{m} samples, at least 4 needed"
        )));
    }
    let c = h / 24.0;
    let mut out = Vec::with_capacity(m);
    out.push(T::default());
    for k in 0..m - 1 {
        let inc = if k == 0 {
            y[0] * 9.0 + y[1] * 19.0 - y[2] * 5.0 + y[3]
        } else if k == m - 2 {
            y[m - 4] - y[m - 3] * 5.0 + y[m - 2] * 19.0 + y[m - 1] * 9.0
        } else {
            (y[k] + y[k + 1]) * 13.0 - y[k - 1] - y[k + 2]
        };
        let prev = out[k];
        out.push(prev + inc * c);
    }
    Ok(out)
}

/// Composite Simpson rule over uniformly spaced samples; an odd number of
/// intervals closes with Simpson's 3/8 rule. Returns zero for one sample.
pub fn simpson<T: Integrand>(y: &[T], h: f64) -> T {
    let m = y.len();
    match m {
        0 | 1 => T::default(),
        2 => (y[0] + y[1]) * (0.5 * h),
        3 => (y[0] + y[1] * 4.0 + y[2]) * (h / 3.0),
        _ => {
            let intervals = m - 1;
            let (even_end, tail) = if intervals % 2 == 0 {
                (m - 1, T::default())
            } else {
                let j = m - 4;
                (
                    j,
                    (y[j] + y[j + 1] * 3.0 + y[j + 2] * 3.0 + y[j + 3]) * (3.0 * h / 8.0),
                )
            };
            let mut acc = T::default();
            if even_end > 0 {
                acc = y[0] + y[even_end];
                for (i, &v) in y.iter().enumerate().take(even_end).skip(1) {
                    acc = acc + v * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc = acc * (h / 3.0);
            }
            acc + tail
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 32] {
            let g = GaussLegendre::new(n);
            for p in 0..(2 * n) {
                let v: f64 = g.integrate(-1.0, 1.0, |x| x.powi(p as i32));
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((v - exact).abs() < 1e-13, "n={n} p={p}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn gk15_matches_exp() {
        let (v, e) = gk15(0.0, 1.0, &mut |x: f64| x.exp());
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert!(e < 1e-10);
    }

    #[test]
    fn adaptive_handles_peaks_and_complex_values() {
        let v = adaptive(-1.0, 1.0, AdaptiveOptions::default(), |x: f64| {
            1.0 / (1e-4 + x * x)
        })
        .unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v.value - exact).abs() < 1e-9 * exact);

        let z = adaptive(0.0, std::f64::consts::PI, AdaptiveOptions::default(), |x| {
            Complex64::new(0.0, x).exp()
        })
        .unwrap();
        assert!((z.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let v = adaptive_to_infinity(0.0, AdaptiveOptions::default(), |x: f64| (-x * x).exp())
            .unwrap();
        assert!((v.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-11);
    }

    #[test]
    fn cumulative_rule_is_fourth_order() {
        let err = |m: usize| {
            let h = 2.0 / (m - 1) as f64;
            let y: Vec<f64> = (0..m).map(|k| (k as f64 * h).sin()).collect();
            let c = cumulative_fourth_order(&y, h).unwrap();
            c.iter()
                .enumerate()
                .map(|(k, v)| (v - (1.0 - (k as f64 * h).cos())).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 12.0, "ratio {ratio}");
        // cubics are integrated exactly
        let h = 0.1;
        let y: Vec<f64> = (0..12).map(|k| (k as f64 * h).powi(3)).collect();
        let c = cumulative_fourth_order(&y, h).unwrap();
        for (k, v) in c.iter().enumerate() {
            assert!((v - (k as f64 * h).powi(4) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn simpson_even_and_odd_interval_counts() {
        for m in [5, 6, 7, 10] {
            let h = 1.0 / (m - 1) as f64;
            let y: Vec<f64> = (0..m).map(|k| (k as f64 * h).powi(3)).collect();
            assert!((simpson(&y, h) - 0.25).abs() < 1e-14, "m={m}");
        }
    }
}
