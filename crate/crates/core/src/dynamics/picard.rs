//! Picard iteration for the truncated Duhamel formulation
//! `u = φ S(t)u₀ + φ_T ∫₀ᵗ S(t-t') φ(t') N(u(t')) dt'`.

use super::operators::{duhamel_with, TimeSeries};
use super::{linear_propagate, model_nonlinearity, IntegratorConfig, ModelKind, Trajectory, BLOW_UP_THRESHOLD};
use crate::error::{Error, Result};
use crate::kernels::{phi_eval, phi_scaled};
use crate::spectral::{fl_norm, FLParams, SpectralField};

#[derive(Debug, Clone)]
pub struct PicardResult {
    /// `u^{(0)}, u^{(1)}, …` on the grid `[0, 2T]` with step `cfg.dt`.
    pub iterates: Vec<Trajectory>,
    /// `sup_t ‖u^{(m+1)} - u^{(m)}‖` in FL^{1/2,2}.
    pub differences: Vec<f64>,
}

impl PicardResult {
    /// Successive ratios of the differences.
    pub fn ratios(&self) -> Vec<f64> {
        self.differences
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect()
    }

    pub fn last(&self) -> &Trajectory {
        self.iterates.last().expect("at least the zeroth iterate")
    }
}

pub fn picard_iterate(
    u0: &SpectralField,
    model: ModelKind,
    big_t: f64,
    iterations: usize,
    cfg: &IntegratorConfig,
) -> Result<PicardResult> {
    cfg.validate()?;
    if !(big_t > 0.0 && big_t <= 1.0) {
        return Err(Error::InvalidParameter(format!("horizon {big_t} outside (0, 1]")));
    }
    if u0.n_max() > cfg.n_max {
        return Err(Error::OutOfBand {
            n: u0.n_max() as i64,
            n_max: cfg.n_max,
        });
    }
    let u0 = u0.resized(cfg.n_max).with_time(0.0);
    let steps = ((2.0 * big_t) / cfg.dt).round().max(4.0) as usize;
    let h = 2.0 * big_t / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let free: Vec<SpectralField> = times
        .iter()
        .map(|&t| linear_propagate(&u0, t).scale(phi_eval(t).into()).with_time(t))
        .collect();
    let params = FLParams { s: 0.5, p: 2.0 };
    let mut current = free.clone();
    let mut iterates = vec![Trajectory::new(times.clone(), current.clone(), model)?];
    let mut differences = Vec::with_capacity(iterations);
    for m in 0..iterations {
        let forcing: Vec<SpectralField> = current
            .iter()
            .map(|u| model_nonlinearity(u, model))
            .collect();
        let series = TimeSeries::new(times.clone(), forcing)?;
        let d = duhamel_with(&series, |t| phi_scaled(t, big_t), phi_eval)?;
        let next: Vec<SpectralField> = free
            .iter()
            .zip(&d.fields)
            .map(|(a, b)| a.add(b).with_time(a.time))
            .collect();
        let diff = next
            .iter()
            .zip(&current)
            .map(|(a, b)| fl_norm(&a.sub(b), params))
            .fold(0.0, f64::max);
        if !diff.is_finite() || diff > BLOW_UP_THRESHOLD {
            return Err(Error::Diverged {
                iteration: m + 1,
                difference: diff,
            });
        }
        differences.push(diff);
        current = next;
        iterates.push(Trajectory::new(times.clone(), current.clone(), model)?);
    }
    Ok(PicardResult {
        iterates,
        differences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, Model};
    use crate::Complex64;

    fn small_data(n_max: usize) -> SpectralField {
        let u = SpectralField::zeros(n_max).map(|n, _| {
            Complex64::new(0.3, 0.1 * n as f64) * crate::jb(n as f64).powi(-3)
        });
        let norm = fl_norm(&u, FLParams { s: 0.5, p: 2.0 });
        u.scale((0.1 / norm).into())
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = IntegratorConfig::new(0.01, 0.1, 4);
        let r = picard_iterate(&SpectralField::zeros(4), ModelKind::plus(Model::Mkdv2), 0.1, 3, &cfg).unwrap();
        assert!(r.differences.iter().all(|&d| d == 0.0));
        assert!(r.last().states.iter().all(|s| s.max_abs() == 0.0));
    }

    #[test]
    fn contracts_and_matches_evolve() {
        let u0 = small_data(8);
        let cfg = IntegratorConfig::new(1e-3, 0.1, 8);
        for model in [Model::Mkdv, Model::Mkdv2] {
            let kind = ModelKind::plus(model);
            let r = picard_iterate(&u0, kind, 0.1, 6, &cfg).unwrap();
            assert!(r.ratios().iter().all(|&q| q < 0.5), "{:?}", r.ratios());
            let tr = evolve(&u0, kind, &IntegratorConfig::new(1e-3, 0.05, 8)).unwrap();
            let it = r.last();
            for (s, &t) in tr.states.iter().zip(&tr.times) {
                let k = (t / 1e-3).round() as usize;
                assert!((it.times[k] - t).abs() < 1e-12);
                assert!(s.max_abs_diff(&it.states[k]) < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_long_horizons() {
        let cfg = IntegratorConfig::new(0.01, 1.0, 4);
        assert!(picard_iterate(&SpectralField::zeros(4), ModelKind::plus(Model::Mkdv), 1.5, 2, &cfg).is_err());
    }
}
