//! The truncated Duhamel operator and its η-modified splitting on
//! time-sampled fields.
//!
//! ```text
//! 𝒟F(t)      = φ(t) ∫₀ᵗ S(t-t') φ(t') F(t') dt'
//! G(u1,u2,u3) = φ(t) Σ i n1 ∫₀ᵗ e^{i(t-t')n³} η(Φ(t-t')) φ(t') û1û2û3(t') dt'
//! B(u1,u2,u3) = same with 1 - η(Φ(t-t'))
//! ```
//!
//! with the sum over the non-resonant triples assigned to one region.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{eta_time, phi_eval};
use crate::nonlinearity::{priority_region, FrequencyTriple, RegionConstants, RegionLabel};
use crate::quadrature::{cumulative_fourth_order, simpson};
use crate::spectral::{resonance, FLParams, SpectralField};
use crate::Complex64;

/// Fields sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.len() != fields.len() || times.len() < 2 {
            return Err(Error::Resolution("time series needs at least two matching samples".into()));
        }
        let h = times[1] - times[0];
        if !(h > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
            return Err(Error::NonUniformGrid("time samples must be increasing and uniform".into()));
        }
        let n = fields[0].n_max();
        if fields.iter().any(|f| f.n_max() != n) {
            return Err(Error::InvalidParameter("fields do not share n_max".into()));
        }
        Ok(Self { times, fields })
    }

    /// `count` uniform samples of `f` on `[a, b]`.
    pub fn sample(a: f64, b: f64, count: usize, mut f: impl FnMut(f64) -> SpectralField) -> Result<Self> {
        if count < 2 {
            return Err(Error::Resolution("at least two samples".into()));
        }
        let h = (b - a) / (count - 1) as f64;
        let times: Vec<f64> = (0..count).map(|k| a + k as f64 * h).collect();
        let fields = times.iter().map(|&t| f(t).with_time(t)).collect();
        Self::new(times, fields)
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn n_max(&self) -> usize {
        self.fields[0].n_max()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the sample at `t = 0`.
    pub fn zero_index(&self) -> Result<usize> {
        let h = self.step();
        self.times
            .iter()
            .position(|t| t.abs() < 1e-9 * h)
            .ok_or_else(|| Error::NonUniformGrid("t = 0 is not a grid point".into()))
    }

    pub fn sub(&self, other: &TimeSeries) -> TimeSeries {
        TimeSeries {
            times: self.times.clone(),
            fields: self.fields.iter().zip(&other.fields).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn add(&self, other: &TimeSeries) -> TimeSeries {
        TimeSeries {
            times: self.times.clone(),
            fields: self.fields.iter().zip(&other.fields).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &TimeSeries) -> f64 {
        self.fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self, params: FLParams) -> f64 {
        self.fields
            .iter()
            .map(|f| crate::spectral::fl_norm(f, params))
            .fold(0.0, f64::max)
    }

    /// Coefficient `n` over time.
    pub fn mode(&self, n: i64) -> Vec<Complex64> {
        self.fields.iter().map(|f| f.get(n)).collect()
    }
}

/// `F_t f(τ) = (1/2π) ∫ f(t) e^{-itτ} dt` for mode `n`, by the trapezoid
/// rule over the samples. Meant for series vanishing at both ends.
pub fn time_transform(series: &TimeSeries, n: i64, tau: f64) -> Complex64 {
    let h = series.step();
    let m = series.len();
    let mut acc = Complex64::default();
    for (k, (f, &t)) in series.fields.iter().zip(&series.times).enumerate() {
        let w = if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
        acc += f.get(n) * Complex64::from_polar(w, -t * tau);
    }
    acc * (h / (2.0 * PI))
}

/// Weight inside the t'-integral, as a function of `Φ·(t - t')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `η(Φ s)`: the operator G.
    Eta,
    /// `1 - η(Φ s)`: the operator B.
    OneMinusEta,
    /// `1`: the truncated Duhamel operator of the non-resonant sum.
    One,
}

impl Weight {
    pub fn eval(&self, phi_s: f64) -> Complex64 {
        match self {
            Weight::Eta => eta_time(phi_s),
            Weight::OneMinusEta => Complex64::new(1.0, 0.0) - eta_time(phi_s),
            Weight::One => Complex64::new(1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelOutput {
    pub series: TimeSeries,
    /// Largest Richardson estimate `|S_h - S_2h|/15` over outputs with an
    /// even number of intervals.
    pub error_estimate: f64,
}

fn support(s: &TimeSeries) -> Vec<i64> {
    let nb = s.n_max() as i64;
    (-nb..=nb)
        .filter(|&n| s.fields.iter().any(|f| f.get(n) != Complex64::default()))
        .collect()
}

/// `φ(t) Σ i n1 ∫₀ᵗ e^{i(t-t')n³} w(Φ(t-t')) φ(t') û1û2û3(t') dt'` over the
/// triples of `region` with `|n2| ≥ |n3|` (`>` when `strict`), by composite
/// Simpson on the sample grid.
pub fn modified_duhamel(
    u1: &TimeSeries,
    u2: &TimeSeries,
    u3: &TimeSeries,
    region: RegionLabel,
    strict: bool,
    constants: &RegionConstants,
    weight: impl Fn(f64) -> Complex64,
) -> Result<DuhamelOutput> {
    if region == RegionLabel::Resonant {
        return Err(Error::InvalidParameter("region must be non-resonant".into()));
    }
    constants.validate()?;
    if u1.times != u2.times || u1.times != u3.times {
        return Err(Error::NonUniformGrid("inputs sampled on different grids".into()));
    }
    let z = u1.zero_index()?;
    let h = u1.step();
    let m = u1.len();
    let band = u1.n_max().max(u2.n_max()).max(u3.n_max()) as i64;
    let phis: Vec<f64> = u1.times.iter().map(|&t| phi_eval(t)).collect();
    let mut out: Vec<SpectralField> = u1
        .times
        .iter()
        .map(|&t| SpectralField::zeros(band as usize).with_time(t))
        .collect();
    let (s1, s2, s3) = (support(u1), support(u2), support(u3));
    // e^{i d h n³} w(Φ d h) for offsets d in -(m-1)..=(m-1)
    let mut kernels: HashMap<(i64, i128), Vec<Complex64>> = HashMap::new();
    let mut err: f64 = 0.0;
    let mut p = vec![Complex64::default(); m];
    let mut y = vec![Complex64::default(); m];
    for &n1 in &s1 {
        for &n2 in &s2 {
            for &n3 in &s3 {
                let n = n1 + n2 + n3;
                if n.abs() > band {
                    continue;
                }
                let ok = if strict { n2.abs() > n3.abs() } else { n2.abs() >= n3.abs() };
                let phi_int = resonance(n1, n2, n3)?;
                if !ok || phi_int == 0 {
                    continue;
                }
                let triple = FrequencyTriple::new(n1, n2, n3)?;
                if priority_region(&triple, constants) != region {
                    continue;
                }
                let big_phi = phi_int as f64;
                let nc = (n as f64).powi(3);
                let kern = kernels.entry((n, phi_int)).or_insert_with(|| {
                    (0..2 * m - 1)
                        .map(|i| {
                            let s = (i as f64 - (m - 1) as f64) * h;
                            Complex64::from_polar(1.0, s * nc) * weight(big_phi * s)
                        })
                        .collect()
                });
                for j in 0..m {
                    p[j] = u1.fields[j].get(n1)
                        * u2.fields[j].get(n2)
                        * u3.fields[j].get(n3)
                        * phis[j];
                }
                if p.iter().all(|v| *v == Complex64::default()) {
                    continue;
                }
                let pref = Complex64::new(0.0, n1 as f64);
                for k in 0..m {
                    if k == z || phis[k] == 0.0 {
                        continue;
                    }
                    let (lo, hi, orient) = if k > z { (z, k, 1.0) } else { (k, z, -1.0) };
                    for j in lo..=hi {
                        y[j] = kern[k + m - 1 - j] * p[j];
                    }
                    let seg = &y[lo..=hi];
                    let v = simpson(seg, h);
                    let intervals = hi - lo;
                    if intervals >= 4 && intervals % 2 == 0 {
                        let coarse: Vec<Complex64> = seg.iter().step_by(2).copied().collect();
                        let e = (v - simpson(&coarse, 2.0 * h)).norm() / 15.0;
                        err = err.max(e * n1.abs() as f64 * phis[k]);
                    }
                    let add = pref * v * (orient * phis[k]);
                    let i = n;
                    let cur = out[k].get(i);
                    out[k].set(i, cur + add)?;
                }
            }
        }
    }
    Ok(DuhamelOutput {
        series: TimeSeries::new(u1.times.clone(), out)?,
        error_estimate: err,
    })
}

fn check_ab(region: RegionLabel) -> Result<()> {
    if !matches!(region, RegionLabel::A | RegionLabel::B) {
        return Err(Error::InvalidParameter(
            "the modified operators are defined on regions A and B".into(),
        ));
    }
    Ok(())
}

/// The η-localized operator G on region A or B.
pub fn modified_duhamel_g(
    u1: &TimeSeries,
    u2: &TimeSeries,
    u3: &TimeSeries,
    region: RegionLabel,
    strict: bool,
    constants: &RegionConstants,
) -> Result<DuhamelOutput> {
    check_ab(region)?;
    modified_duhamel(u1, u2, u3, region, strict, constants, |x| Weight::Eta.eval(x))
}

/// The remainder B on region A or B, from its own defining integral.
pub fn remainder_b(
    u1: &TimeSeries,
    u2: &TimeSeries,
    u3: &TimeSeries,
    region: RegionLabel,
    strict: bool,
    constants: &RegionConstants,
) -> Result<DuhamelOutput> {
    check_ab(region)?;
    modified_duhamel(u1, u2, u3, region, strict, constants, |x| {
        Weight::OneMinusEta.eval(x)
    })
}

/// `𝒟 NR_region(u1, u2, u3)`.
pub fn truncated_duhamel_nr(
    u1: &TimeSeries,
    u2: &TimeSeries,
    u3: &TimeSeries,
    region: RegionLabel,
    strict: bool,
    constants: &RegionConstants,
) -> Result<DuhamelOutput> {
    modified_duhamel(u1, u2, u3, region, strict, constants, |x| Weight::One.eval(x))
}

/// `𝒟F(t) = φ(t) ∫₀ᵗ S(t-t') φ(t') F(t') dt'` with the fourth-order
/// cumulative rule in the interaction picture.
pub fn truncated_duhamel(f: &TimeSeries) -> Result<TimeSeries> {
    duhamel_with(f, phi_eval, phi_eval)
}

/// `outer(t) ∫₀ᵗ S(t-t') inner(t') F(t') dt'`.
pub(crate) fn duhamel_with(
    f: &TimeSeries,
    outer: impl Fn(f64) -> f64,
    inner: impl Fn(f64) -> f64,
) -> Result<TimeSeries> {
    let z = f.zero_index()?;
    let h = f.step();
    let m = f.len();
    let nb = f.n_max() as i64;
    let mut out: Vec<SpectralField> = f
        .times
        .iter()
        .map(|&t| SpectralField::zeros(nb as usize).with_time(t))
        .collect();
    for n in -nb..=nb {
        let nc = (n as f64).powi(3);
        let y: Vec<Complex64> = f
            .fields
            .iter()
            .zip(&f.times)
            .map(|(g, &t)| g.get(n) * Complex64::from_polar(inner(t), -t * nc))
            .collect();
        let mut put = |k: usize, v: Complex64| -> Result<()> {
            let t = f.times[k];
            out[k].set(n, v * Complex64::from_polar(outer(t), t * nc))
        };
        if m - z >= 4 {
            let fwd = cumulative_fourth_order(&y[z..], h)?;
            for (i, v) in fwd.into_iter().enumerate() {
                put(z + i, v)?;
            }
        } else if m - z > 1 {
            return Err(Error::Resolution("fewer than four samples after t = 0".into()));
        }
        if z >= 3 {
            let rev: Vec<Complex64> = y[..=z].iter().rev().copied().collect();
            let bwd = cumulative_fourth_order(&rev, -h)?;
            for (i, v) in bwd.into_iter().enumerate() {
                put(z - i, v)?;
            }
        } else if z > 0 {
            return Err(Error::Resolution("fewer than four samples before t = 0".into()));
        }
    }
    TimeSeries::new(f.times.clone(), out)
}
