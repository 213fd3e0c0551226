//! Difference quotients of the data-to-solution map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, IntegratorConfig, ModelKind};
use crate::error::{Error, Result};
use crate::spectral::{fl_norm, FLParams, SpectralField};
use crate::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzRow {
    pub direction: usize,
    pub scale: f64,
    /// `‖u(T; u₀+h) - u(T; u₀)‖ / ‖h‖`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub rows: Vec<LipschitzRow>,
    /// Largest `max/min - 1` of the ratios over scales, per direction.
    pub variation: f64,
    pub constant: f64,
    /// Variation below 20%.
    pub pass: bool,
}

/// Random directions `h` normalized in FL^{s,p}, scaled by each entry of
/// `scales`; the horizon is `cfg.t_end`.
pub fn run_lipschitz_probe(
    u0: &SpectralField,
    scales: &[f64],
    directions: usize,
    seed: u64,
    model: ModelKind,
    cfg: &IntegratorConfig,
    params: FLParams,
) -> Result<LipschitzReport> {
    let size = fl_norm(u0, params);
    if scales.is_empty() || directions == 0 {
        return Err(Error::InvalidParameter("no scales or directions".into()));
    }
    if scales.iter().any(|&s| !(s > 0.0 && s <= 0.1 * size)) {
        return Err(Error::InvalidParameter(format!(
            "scales must lie in (0, {}], a tenth of the data norm",
            0.1 * size
        )));
    }
    let base = evolve(u0, model, cfg)?;
    let end = base.last().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut variation: f64 = 0.0;
    for d in 0..directions {
        let raw = SpectralField::zeros(u0.n_max()).map(|n, _| {
            let w = crate::jb(n as f64).powf(-params.s - 1.0);
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w
        });
        let h = raw.scale((1.0 / fl_norm(&raw, params)).into());
        let mut ratios = Vec::with_capacity(scales.len());
        for &scale in scales {
            let tr = evolve(&u0.add(&h.scale(scale.into())), model, cfg)?;
            let ratio = fl_norm(&tr.last().sub(&end), params) / scale;
            ratios.push(ratio);
            rows.push(LipschitzRow {
                direction: d,
                scale,
                ratio,
            });
        }
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        variation = variation.max(hi / lo - 1.0);
    }
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(LipschitzReport {
        rows,
        variation,
        constant,
        pass: variation < 0.2 && constant.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Model;

    fn data() -> SpectralField {
        SpectralField::zeros(8).map(|n, _| Complex64::new(0.4, -0.2 * n as f64) * crate::jb(n as f64).powi(-2))
    }

    #[test]
    fn plateau_for_the_renormalized_flow() {
        let cfg = IntegratorConfig::new(1e-3, 0.25, 8).record_every(1000);
        let p = FLParams { s: 0.5, p: 2.0 };
        let r = run_lipschitz_probe(&data(), &[1e-2, 1e-3, 1e-4], 2, 5, ModelKind::plus(Model::Mkdv2), &cfg, p).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.rows.len(), 6);
    }

    #[test]
    fn linear_flow_is_an_isometry() {
        let cfg = IntegratorConfig::new(1e-2, 0.5, 8).record_every(1000);
        let p = FLParams { s: 0.5, p: 3.0 };
        let r = run_lipschitz_probe(&data(), &[1e-2, 1e-4], 3, 1, ModelKind::plus(Model::Linear), &cfg, p).unwrap();
        for row in &r.rows {
            assert!((row.ratio - 1.0).abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn zero_perturbation_changes_nothing() {
        let cfg = IntegratorConfig::new(1e-3, 0.1, 8);
        let kind = ModelKind::plus(Model::Mkdv2);
        let a = evolve(&data(), kind, &cfg).unwrap();
        let b = evolve(&data().add(&SpectralField::zeros(8)), kind, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oversized_scales_are_rejected() {
        let cfg = IntegratorConfig::new(1e-3, 0.1, 8);
        let p = FLParams { s: 0.5, p: 2.0 };
        assert!(run_lipschitz_probe(&data(), &[10.0], 1, 0, ModelKind::plus(Model::Mkdv2), &cfg, p).is_err());
    }
}
