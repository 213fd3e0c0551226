//! Time integration of the three models, gauge maps, Duhamel residuals,
//! Picard iteration and the modified Duhamel operators.

mod operators;
mod picard;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

pub use operators::{
    modified_duhamel, modified_duhamel_g, remainder_b, time_transform, truncated_duhamel,
    truncated_duhamel_nr,
    DuhamelOutput, TimeSeries, Weight,
};
pub use picard::{picard_iterate, PicardResult};

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityEvaluator;
use crate::quadrature::cumulative_fourth_order;
use crate::spectral::{fl_norm, mass, momentum, FLParams, SpectralField};
use crate::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients above this magnitude abort an integration.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;
/// Largest admissible time step.
pub const MAX_DT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Mkdv,
    Mkdv1,
    Mkdv2,
    /// Nonlinearity switched off.
    Linear,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mkdv" => Ok(Model::Mkdv),
            "mkdv1" => Ok(Model::Mkdv1),
            "mkdv2" => Ok(Model::Mkdv2),
            "linear" => Ok(Model::Linear),
            _ => Err(Error::InvalidParameter(format!("unknown model {s}"))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Model::Mkdv => "mkdv",
            Model::Mkdv1 => "mkdv1",
            Model::Mkdv2 => "mkdv2",
            Model::Linear => "linear",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelKind {
    pub model: Model,
    /// +1 or -1, the sign in front of the nonlinearity.
    pub sign: f64,
}

impl ModelKind {
    pub fn new(model: Model, sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
        }
        Ok(Self { model, sign })
    }

    pub fn plus(model: Model) -> Self {
        Self { model, sign: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Integrating-factor fourth-order Runge-Kutta.
    Ifrk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub n_max: usize,
    pub method: Method,
    pub record_every: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, n_max: usize) -> Self {
        Self {
            dt,
            t_end,
            n_max,
            method: Method::Ifrk4,
            record_every: 1,
        }
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::InvalidParameter(format!(
                "dt = {} outside (0, {MAX_DT}]",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end = {}", self.t_end)));
        }
        if self.n_max == 0 || self.record_every == 0 {
            return Err(Error::InvalidParameter(
                "n_max and record_every must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps and the adjusted step `t_end / steps`.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize;
        if n == 0 {
            (0, 0.0)
        } else {
            (n, self.t_end / n as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub model: ModelKind,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<SpectralField>, model: ModelKind) -> Result<Self> {
        let t = Self {
            times,
            states,
            model,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.states.len() || self.times.is_empty() {
            return Err(Error::Trajectory("times and states differ in length or are empty".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Trajectory("times not strictly increasing".into()));
        }
        let n = self.states[0].n_max();
        if self.states.iter().any(|s| s.n_max() != n) {
            return Err(Error::Trajectory("states do not share n_max".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.states[0].n_max()
    }

    pub fn initial(&self) -> &SpectralField {
        &self.states[0]
    }

    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("non-empty")
    }

    /// One JSON object per state per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for s in &self.states {
            serde_json::to_writer(&mut out, s)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R, model: ModelKind) -> Result<Self> {
        let mut states = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            states.push(serde_json::from_str::<SpectralField>(&line)?);
        }
        let times = states.iter().map(|s| s.time).collect();
        Self::new(times, states, model)
    }

    /// `max_t fl_norm(self(t) - other(t))` over matching slices.
    pub fn sup_distance(&self, other: &Trajectory, params: FLParams) -> Result<f64> {
        if self.len() != other.len()
            || self.times.iter().zip(&other.times).any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return Err(Error::Trajectory("trajectories sampled at different times".into()));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| fl_norm(&a.sub(b), params))
            .fold(0.0, f64::max))
    }
}

/// `û(n) ↦ e^{itn³} û(n)`.
pub fn linear_propagate(field: &SpectralField, t: f64) -> SpectralField {
    field
        .map(|n, c| c * phase(t, n))
        .with_time(field.time + t)
}

#[inline]
fn phase(t: f64, n: i64) -> Complex64 {
    let n = n as f64;
    Complex64::from_polar(1.0, t * n * n * n)
}

/// Right-hand side without the linear part, in coefficient space.
struct Rhs {
    kind: ModelKind,
    eval: NonlinearityEvaluator,
    n_max: usize,
}

impl Rhs {
    fn new(kind: ModelKind, n_max: usize) -> Self {
        Self {
            kind,
            eval: NonlinearityEvaluator::new(n_max),
            n_max,
        }
    }

    fn apply(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        let sign = self.kind.sign;
        if self.kind.model == Model::Linear {
            out.fill(Complex64::default());
            return;
        }
        self.eval.cubic(u, out);
        let nb = self.n_max as i64;
        let (mu, p) = match self.kind.model {
            Model::Mkdv1 | Model::Mkdv2 => {
                let mu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
                let p = if self.kind.model == Model::Mkdv2 {
                    crate::spectral::MOMENTUM_SIGN
                        * u.iter()
                            .enumerate()
                            .map(|(i, c)| (i as i64 - nb) as f64 * c.norm_sqr())
                            .sum::<f64>()
                } else {
                    0.0
                };
                (mu, p)
            }
            _ => (0.0, 0.0),
        };
        for (i, (o, &c)) in out.iter_mut().zip(u).enumerate() {
            let n = (i as i64 - nb) as f64;
            *o = sign * (*o - I * (mu * n + p) * c);
        }
    }
}

/// Integrating-factor RK4 for `∂ₜû = i n³ û + N(û)`.
///
/// Records the initial state, every `record_every`-th step and the final
/// state.
pub fn evolve(u0: &SpectralField, model: ModelKind, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if u0.n_max() > cfg.n_max {
        return Err(Error::OutOfBand {
            n: u0.n_max() as i64,
            n_max: cfg.n_max,
        });
    }
    let n_max = cfg.n_max;
    let nb = n_max as i64;
    let start = u0.resized(n_max);
    let t0 = start.time;
    let (steps, h) = cfg.steps();
    let mut times = vec![t0];
    let mut states = vec![start.clone()];
    let mut rhs = Rhs::new(model, n_max);
    let len = 2 * n_max + 1;
    let full: Vec<Complex64> = (-nb..=nb).map(|n| phase(h, n)).collect();
    let half: Vec<Complex64> = (-nb..=nb).map(|n| phase(0.5 * h, n)).collect();
    let zero = Complex64::default();
    let mut u = start.coeffs().to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
    let mut tmp = vec![zero; len];
    for step in 1..=steps {
        rhs.apply(&u, &mut k1);
        for i in 0..len {
            tmp[i] = half[i] * (u[i] + 0.5 * h * k1[i]);
        }
        rhs.apply(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = half[i] * u[i] + 0.5 * h * k2[i];
        }
        rhs.apply(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = full[i] * u[i] + h * half[i] * k3[i];
        }
        rhs.apply(&tmp, &mut k4);
        let t = t0 + step as f64 * h;
        for i in 0..len {
            u[i] = full[i] * u[i]
                + h / 6.0 * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i]);
            let a = u[i].norm();
            if !(a <= BLOW_UP_THRESHOLD) {
                return Err(Error::BlowUp {
                    time: t,
                    frequency: i as i64 - nb,
                    magnitude: a,
                });
            }
        }
        if step % cfg.record_every == 0 || step == steps {
            times.push(t);
            states.push(SpectralField::from_dense(n_max, u.clone())?.with_time(t));
        }
    }
    Trajectory::new(times, states, model)
}

fn check_model(traj: &Trajectory, expected: Model, sign: f64) -> Result<()> {
    if traj.model.model != expected {
        return Err(Error::InvalidParameter(format!(
            "gauge map expects a {expected} trajectory, got {}",
            traj.model.model
        )));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
    }
    Ok(())
}

/// Translation by `sign·μ(u₀)·t`: `û(n,t) ↦ û(n,t) e^{-sign·i n μ t}`.
pub fn gauge_g1(traj: &Trajectory, sign: f64) -> Result<Trajectory> {
    check_model(traj, Model::Mkdv, sign)?;
    let mu = mass(traj.initial());
    let t0 = traj.times[0];
    let states = traj
        .states
        .iter()
        .zip(&traj.times)
        .map(|(s, &t)| s.map(|n, c| c * Complex64::from_polar(1.0, -sign * n as f64 * mu * (t - t0))))
        .collect();
    Trajectory::new(traj.times.clone(), states, ModelKind { model: Model::Mkdv1, sign })
}

/// Global phase `e^{-sign·i P(u₀) t}`.
pub fn gauge_g2(traj: &Trajectory, sign: f64) -> Result<Trajectory> {
    check_model(traj, Model::Mkdv1, sign)?;
    let p = momentum(traj.initial());
    let t0 = traj.times[0];
    let states = traj
        .states
        .iter()
        .zip(&traj.times)
        .map(|(s, &t)| s.scale(Complex64::from_polar(1.0, -sign * p * (t - t0))))
        .collect();
    Trajectory::new(traj.times.clone(), states, ModelKind { model: Model::Mkdv2, sign })
}

/// Nonlinearity of `model` including its sign.
pub fn model_nonlinearity(field: &SpectralField, model: ModelKind) -> SpectralField {
    use crate::nonlinearity::{mkdv1_nonlinearity, mkdv2_nonlinearity, mkdv_nonlinearity};
    match model.model {
        Model::Mkdv => mkdv_nonlinearity(field, model.sign),
        Model::Mkdv1 => mkdv1_nonlinearity(field, model.sign),
        Model::Mkdv2 => mkdv2_nonlinearity(field, model.sign),
        Model::Linear => SpectralField::zeros(field.n_max()).with_time(field.time),
    }
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    let h = times[1] - times[0];
    let tol = 1e-9 * h.abs().max(1e-300);
    if times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol.max(1e-12 * w[1].abs())) {
        return Err(Error::NonUniformGrid("recorded times are not uniformly spaced".into()));
    }
    Ok(h)
}

/// `max_t ‖u(t) - S(t)u₀ - ∫₀ᵗ S(t-t') N(u(t')) dt'‖` in FL^{1/2,2}.
///
/// The integral is taken over the recorded slices in the interaction
/// picture with a fourth-order cumulative rule; slices must be uniformly
/// spaced and at least four.
pub fn duhamel_residual(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 4 {
        return Err(Error::Resolution(format!(
            "{} slices, at least 4 needed",
            traj.len()
        )));
    }
    let h = uniform_step(&traj.times)?;
    let t0 = traj.times[0];
    let n_max = traj.n_max();
    let mut eval = Rhs::new(traj.model, n_max);
    let len = 2 * n_max + 1;
    let nb = n_max as i64;
    // y_k(n) = e^{-i(t_k - t0) n³} N(u(t_k))(n)
    let mut ys: Vec<Vec<Complex64>> = Vec::with_capacity(traj.len());
    for (s, &t) in traj.states.iter().zip(&traj.times) {
        let mut out = vec![Complex64::default(); len];
        eval.apply(s.coeffs(), &mut out);
        for (i, o) in out.iter_mut().enumerate() {
            *o *= phase(-(t - t0), i as i64 - nb);
        }
        ys.push(out);
    }
    let params = FLParams { s: 0.5, p: 2.0 };
    let mut worst: f64 = 0.0;
    let mut cumulative = vec![vec![Complex64::default(); traj.len()]; len];
    for (i, col) in cumulative.iter_mut().enumerate() {
        let y: Vec<Complex64> = ys.iter().map(|v| v[i]).collect();
        *col = cumulative_fourth_order(&y, h)?;
    }
    let u0 = traj.initial();
    for (k, (s, &t)) in traj.states.iter().zip(&traj.times).enumerate() {
        let d = s.map(|n, c| {
            let i = (n + nb) as usize;
            c * phase(-(t - t0), n) - u0.get(n) - cumulative[i][k]
        });
        worst = worst.max(fl_norm(&d, params));
    }
    Ok(worst)
}
