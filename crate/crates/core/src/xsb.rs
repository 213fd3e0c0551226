//! Discrete Fourier restriction norms
//!
//! ```text
//! ‖u‖ = ‖⟨n⟩^s ⟨τ - n³⟩^b û(τ, n)‖_{ℓ^p_n L^q_τ}
//! ```
//!
//! on fields sampled over the time window `[-4, 4)`, the parameter family
//! built on a small `δ`, and the time-cutoff gain sweep.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::phi_scaled;
use crate::spectral::SpectralField;
use crate::{jb, Complex64};

/// Half-width of the time window.
pub const WINDOW: f64 = 4.0;
pub const DEFAULT_SAMPLES: usize = 1024;
/// Cells at each end of the τ-grid watched for leakage.
const EDGE_CELLS: usize = 5;
const LEAKAGE_LIMIT: f64 = 0.01;
/// Zero-padding factor of the time transform; refines the τ-grid.
pub const TAU_OVERSAMPLING: usize = 4;

/// Values `f(n, t_k)` for `|n| ≤ n_max` on `t_k = -4 + 8k/M`, `k < M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    n_max: usize,
    count: usize,
    /// `values[n + n_max][k]`
    values: Vec<Vec<Complex64>>,
}

impl SpaceTimeField {
    pub fn zeros(n_max: usize, count: usize) -> Result<Self> {
        if count < 16 || count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "{count} time samples; need an even count of at least 16"
            )));
        }
        Ok(Self {
            n_max,
            count,
            values: vec![vec![Complex64::default(); count]; 2 * n_max + 1],
        })
    }

    /// Samples `f` on the grid. Fields may have a smaller band than `n_max`.
    pub fn from_fn(n_max: usize, count: usize, mut f: impl FnMut(f64) -> SpectralField) -> Result<Self> {
        let mut out = Self::zeros(n_max, count)?;
        for k in 0..count {
            let t = out.time(k);
            let u = f(t);
            if u.n_max() > n_max {
                return Err(Error::OutOfBand {
                    n: u.n_max() as i64,
                    n_max,
                });
            }
            for (n, c) in u.iter() {
                out.values[(n + n_max as i64) as usize][k] = c;
            }
        }
        Ok(out)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        2.0 * WINDOW / self.count as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        -WINDOW + k as f64 * self.step()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.time(k)).collect()
    }

    /// Samples of mode `n`.
    pub fn mode(&self, n: i64) -> &[Complex64] {
        &self.values[(n + self.n_max as i64) as usize]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().flatten().for_each(|v| *v *= c);
        out
    }

    /// Pointwise product with a function of time.
    pub fn multiply_time(&self, f: impl Fn(f64) -> f64) -> Self {
        let w: Vec<f64> = self.times().into_iter().map(f).collect();
        let mut out = self.clone();
        for row in &mut out.values {
            row.iter_mut().zip(&w).for_each(|(v, &x)| *v *= x);
        }
        out
    }

    /// `f(n, t) ↦ e^{-itn³} f(n, t)`: moves the dispersion surface to `τ = 0`.
    pub fn conjugate_linear(&self) -> Self {
        let times = self.times();
        let mut out = self.clone();
        for (i, row) in out.values.iter_mut().enumerate() {
            let nc = (i as f64 - self.n_max as f64).powi(3);
            row.iter_mut()
                .zip(&times)
                .for_each(|(v, &t)| *v *= Complex64::from_polar(1.0, -t * nc));
        }
        out
    }

    pub fn tau_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / (2.0 * WINDOW * TAU_OVERSAMPLING as f64)
    }

    /// τ-grid `τ_m = m·Δτ` for `m = -L/2 .. L/2 - 1`, `L` the padded length.
    pub fn taus(&self) -> Vec<f64> {
        let half = (self.count * TAU_OVERSAMPLING / 2) as i64;
        (-half..half).map(|m| m as f64 * self.tau_step()).collect()
    }

    /// `(1/2π) Σ_k h f(n, t_k) e^{-i t_k τ_m}` on [`taus`](Self::taus), for every
    /// mode; rows indexed like the values.
    pub fn transform(&self) -> Vec<Vec<Complex64>> {
        let m = self.count * TAU_OVERSAMPLING;
        let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
        let h = self.step();
        let scale = h / (2.0 * std::f64::consts::PI);
        let taus = self.taus();
        self.values
            .iter()
            .map(|row| {
                let mut buf = row.clone();
                buf.resize(m, Complex64::default());
                fft.process(&mut buf);
                // DFT index j ↔ m = j (j < L/2) or j - L; t_0 = -4 gives e^{4iτ}
                taus.iter()
                    .enumerate()
                    .map(|(i, &tau)| {
                        let j = (i + m / 2) % m;
                        buf[j] * Complex64::from_polar(scale, WINDOW * tau)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Share of `Σ|F̂|²` in the outer cells of the τ-grid (cells of the
/// unpadded grid).
pub fn leakage(field: &SpaceTimeField) -> f64 {
    leakage_of(&field.transform())
}

fn leakage_of(hat: &[Vec<Complex64>]) -> f64 {
    let mut total = 0.0;
    let mut edge = 0.0;
    for row in hat {
        let m = row.len();
        for (i, v) in row.iter().enumerate() {
            let w = v.norm_sqr();
            total += w;
            let edge_cells = EDGE_CELLS * TAU_OVERSAMPLING;
            if i < edge_cells || i >= m - edge_cells {
                edge += w;
            }
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// `log(Σ_i e^{x_i})` of finite terms; `-∞` when there are none.
fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.filter(|x| x.is_finite()).collect();
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return f64::NEG_INFINITY;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// `log ‖a‖_{ℓ^r}` from the logs of `|a_i|`, with cell weight `log w`.
fn log_lr(logs: &[f64], r: f64, log_w: f64) -> f64 {
    if r.is_infinite() {
        logs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        (log_sum_exp(logs.iter().map(|l| r * l)) + log_w) / r
    }
}

/// `‖⟨n⟩^s ⟨τ - n³⟩^b F̂(τ, n)‖_{ℓ^p_n L^q_τ}`, with the L^q_τ integral as a
/// Riemann sum over the τ-grid. Fails when more than 1% of the transform
/// mass sits in the five outermost τ-cells.
pub fn xsb_norm(field: &SpaceTimeField, s: f64, b: f64, p: f64, q: f64) -> Result<f64> {
    weighted_norm(field, s, b, p, q, 1.0)
}

/// As [`xsb_norm`] with modulation weight `⟨τ - c·n³⟩^b`; `c = 0` gives the
/// plain `⟨τ⟩^b` weight.
pub fn weighted_norm(field: &SpaceTimeField, s: f64, b: f64, p: f64, q: f64, c: f64) -> Result<f64> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p}, q = {q}; need both ≥ 1")));
    }
    let hat = field.transform();
    let leak = leakage_of(&hat);
    if leak > LEAKAGE_LIMIT {
        return Err(Error::TimeAliasing { leakage: leak });
    }
    let taus = field.taus();
    let log_dtau = field.tau_step().ln();
    let nb = field.n_max as i64;
    let mut per_mode = Vec::with_capacity(hat.len());
    for (i, row) in hat.iter().enumerate() {
        let n = i as i64 - nb;
        let nc = c * (n as f64).powi(3);
        let logs: Vec<f64> = row
            .iter()
            .zip(&taus)
            .map(|(v, &tau)| v.norm().ln() + b * jb(tau - nc).ln())
            .collect();
        per_mode.push(s * jb(n as f64).ln() + log_lr(&logs, q, log_dtau));
    }
    Ok(log_lr(&per_mode, p, 0.0).exp())
}

/// The exponent family attached to `0 < δ ≤ 1/10`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XsbParamSet {
    pub delta: f64,
    pub b0: f64,
    pub b1: f64,
    pub q0: f64,
    pub q1: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
}

pub fn make_params(delta: f64) -> Result<XsbParamSet> {
    if !(delta > 0.0 && delta <= 0.1) {
        return Err(Error::InvalidParameter(format!("δ = {delta} outside (0, 1/10]")));
    }
    let ps = XsbParamSet {
        delta,
        b0: 1.0 - 2.0 * delta,
        b1: 1.0 - delta,
        q0: 1.0 / (4.0 * delta),
        q1: 1.0 / (4.5 * delta),
        r0: 1.0 / (0.5 + delta),
        r1: 1.0 / (0.5 + 2.0 * delta),
        r2: 1.0 / (0.5 + 3.0 * delta),
    };
    assert!(ps.b0 < ps.b1 && ps.q1 < ps.q0 && ps.r2 < ps.r1 && ps.r1 < ps.r0);
    Ok(ps)
}

impl XsbParamSet {
    /// `Y₀ = X^{1/2,1/2}_{p,r₀}`.
    pub fn y0(&self, field: &SpaceTimeField, p: f64) -> Result<f64> {
        xsb_norm(field, 0.5, 0.5, p, self.r0)
    }

    /// `Y₁ = X^{1/2,1/2}_{p,r₁}`.
    pub fn y1(&self, field: &SpaceTimeField, p: f64) -> Result<f64> {
        xsb_norm(field, 0.5, 0.5, p, self.r1)
    }

    /// `Z₀ = X^{1/2,b₀}_{p,q₀}`.
    pub fn z0(&self, field: &SpaceTimeField, p: f64) -> Result<f64> {
        xsb_norm(field, 0.5, self.b0, p, self.q0)
    }

    /// `Z₁ = X^{1/2,b₁}_{p,q₁}`.
    pub fn z1(&self, field: &SpaceTimeField, p: f64) -> Result<f64> {
        xsb_norm(field, 0.5, self.b1, p, self.q1)
    }

    /// `b₀ - (1 - 1/q₀)`; positive means `Z₀` embeds in continuous
    /// FL-valued functions.
    pub fn embedding_margin(&self) -> f64 {
        self.b0 - (1.0 - 1.0 / self.q0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub big_t: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    /// `2T` spans at least 8 time cells.
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub theta: f64,
    pub delta: f64,
    pub rows: Vec<GainRow>,
    /// Largest ratio over the sweep.
    pub constant: f64,
    /// `None` when `θ > δ/2`: outside the lemma, informational only.
    pub pass: Option<bool>,
    pub notes: Vec<String>,
}

/// `‖φ_T F‖_{Y₀} / (T^θ ‖F‖_{Y₁})` for each `T`.
///
/// Passes when every ratio is finite and the ratios do not grow as `T`
/// decreases: the largest ratio over the smaller half of the horizons is at
/// most 1.1 times the largest over the larger half.
pub fn cutoff_gain_check(
    field: &SpaceTimeField,
    horizons: &[f64],
    theta: f64,
    params: &XsbParamSet,
    p: f64,
) -> Result<GainReport> {
    if horizons.is_empty() || horizons.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::InvalidParameter("horizons must lie in (0, 1]".into()));
    }
    let mut notes = Vec::new();
    let in_range = theta > 0.0 && theta <= params.delta / 2.0;
    if !in_range {
        notes.push(format!("theta = {theta} outside (0, delta/2]; no verdict"));
    }
    let den0 = params.y1(field, p)?;
    let mut rows = Vec::with_capacity(horizons.len());
    let mut sorted = horizons.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    for &big_t in &sorted {
        let resolved = 2.0 * big_t >= 8.0 * field.step();
        if !resolved {
            notes.push(format!("T = {big_t} spans fewer than 8 time cells"));
        }
        let num = params.y0(&field.multiply_time(|t| phi_scaled(t, big_t)), p)?;
        let den = big_t.powf(theta) * den0;
        let ratio = if den0 == 0.0 { 0.0 } else { num / den };
        rows.push(GainRow {
            big_t,
            numerator: num,
            denominator: den,
            ratio,
            resolved,
        });
    }
    if den0 == 0.0 {
        notes.push("zero field: ratio 0/0 read as 0".into());
    }
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let half = rows.len().div_ceil(2);
    let large = rows[..half].iter().map(|r| r.ratio).fold(0.0, f64::max);
    let small = rows[half..].iter().map(|r| r.ratio).fold(0.0, f64::max);
    let bounded = rows.iter().all(|r| r.ratio.is_finite()) && small <= 1.1 * large.max(f64::MIN_POSITIVE);
    Ok(GainReport {
        theta,
        delta: params.delta,
        rows,
        constant,
        pass: in_range.then_some(bounded || den0 == 0.0),
        notes,
    })
}

/// `F(t) = ∫₀ᵗ φ(t') dt'` on mode `n` with amplitude `c`.
pub fn integrated_cutoff(n_max: usize, count: usize, n: i64, c: Complex64) -> Result<SpaceTimeField> {
    use crate::kernels::phi_eval;
    let mut out = SpaceTimeField::zeros(n_max, count)?;
    if n.unsigned_abs() as usize > n_max {
        return Err(Error::OutOfBand { n, n_max });
    }
    let h = out.step();
    let k0 = count / 2;
    let times = out.times();
    let y: Vec<f64> = times.iter().map(|&t| phi_eval(t)).collect();
    let fwd = crate::quadrature::cumulative_fourth_order(&y[k0..], h)?;
    let rev: Vec<f64> = y[..=k0].iter().rev().copied().collect();
    let bwd = crate::quadrature::cumulative_fourth_order(&rev, -h)?;
    let row = &mut out.values[(n + n_max as i64) as usize];
    for (i, v) in fwd.into_iter().enumerate() {
        row[k0 + i] = c * v;
    }
    for (i, v) in bwd.into_iter().enumerate() {
        row[k0 - i] = c * v;
    }
    Ok(out)
}
