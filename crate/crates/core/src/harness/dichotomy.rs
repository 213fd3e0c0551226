//! Truncation families under the original and the renormalized flow.

use serde::{Deserialize, Serialize};

use super::{build_infinite_momentum_data, ExperimentConfig};
use crate::dynamics::{evolve, gauge_g1, gauge_g2, IntegratorConfig, Model, ModelKind, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{fl_norm, momentum, project_leq, FLParams, SpectralField};

/// Frequency whose relative phase is tracked.
const PHASE_MODE: i64 = 1;
/// Share of the horizon used for the phase comparison.
const EARLY_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub n: usize,
    pub n_prime: usize,
    /// `sup_t ‖u_N(t) - u_N'(t)‖_{FL^{s,p}}` over recorded times.
    pub distance: f64,
    /// `|P_N - P_N'|·t` at the end of the early window.
    pub predicted_phase_gap: f64,
    /// Observed relative phase of the tracked mode at the same time.
    pub phase_drift: f64,
    pub window_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub model: Model,
    pub rows: Vec<DivergenceRow>,
}

impl DivergenceTable {
    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.distance).collect()
    }

    /// Consecutive distances strictly decrease.
    pub fn monotone_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].distance < w[0].distance)
    }

    /// Last distance over the first.
    pub fn final_over_first(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.distance) / self.rows[0].distance
    }

    /// Smallest distance over the first.
    pub fn floor_over_first(&self) -> f64 {
        self.distances().into_iter().fold(f64::INFINITY, f64::min) / self.rows[0].distance
    }

    /// Largest `|drift - predicted| / predicted`.
    pub fn phase_mismatch(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.phase_drift - r.predicted_phase_gap).abs() / r.predicted_phase_gap)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value < threshold,
        }
    }

    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub config: ExperimentConfig,
    pub tables: Vec<DivergenceTable>,
    /// `(N, sup_t distance)` between the doubly gauged original flow and the
    /// renormalized flow, when both are run.
    pub gauge_defects: Vec<(usize, f64)>,
    pub verdicts: Vec<Verdict>,
}

impl DichotomyReport {
    pub fn table(&self, model: Model) -> Option<&DivergenceTable> {
        self.tables.iter().find(|t| t.model == model)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

fn unwrapped_relative_phase(a: &Trajectory, b: &Trajectory, upto: usize) -> f64 {
    let mut total = 0.0;
    let mut prev = (b.states[0].get(PHASE_MODE) * a.states[0].get(PHASE_MODE).conj()).arg();
    for k in 1..=upto {
        let cur = (b.states[k].get(PHASE_MODE) * a.states[k].get(PHASE_MODE).conj()).arg();
        let mut d = cur - prev;
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
        prev = cur;
    }
    total
}

fn table_for(
    model: Model,
    runs: &[Trajectory],
    data: &[SpectralField],
    cfg: &ExperimentConfig,
) -> DivergenceTable {
    let params = FLParams { s: cfg.s, p: cfg.p };
    let times = &runs[0].times;
    let upto = times
        .iter()
        .rposition(|&t| t <= EARLY_WINDOW * cfg.big_t + 1e-12)
        .unwrap_or(0);
    let rows = runs
        .windows(2)
        .zip(data.windows(2))
        .zip(cfg.n_list.windows(2))
        .map(|((r, d), n)| {
            let band = n[1];
            let distance = r[0]
                .states
                .iter()
                .zip(&r[1].states)
                .map(|(a, b)| fl_norm(&a.resized(band).sub(b), params))
                .fold(0.0, f64::max);
            let t_e = times[upto];
            DivergenceRow {
                n: n[0],
                n_prime: n[1],
                distance,
                predicted_phase_gap: (momentum(&d[0]) - momentum(&d[1])).abs() * t_e,
                phase_drift: unwrapped_relative_phase(&r[0], &r[1], upto).abs(),
                window_end: t_e,
            }
        })
        .collect();
    DivergenceTable { model, rows }
}

/// Runs every `(model, N)` pair in parallel and tabulates consecutive
/// distances.
///
/// The non-convergence of the original flow is exhibited as a property of
/// the truncated family on the given list of truncations, not as a limit
/// statement.
pub fn run_dichotomy_experiment(cfg: &ExperimentConfig) -> Result<DichotomyReport> {
    cfg.validate()?;
    let top = *cfg.n_list.last().expect("validated");
    let mut u0 = build_infinite_momentum_data(cfg.p, top, cfg.random_phases.then_some(cfg.seed))?;
    if cfg.real_data {
        u0 = u0.real_part();
    }
    let data: Vec<SpectralField> = cfg
        .n_list
        .iter()
        .map(|&n| project_leq(&u0, n).resized(n))
        .collect();
    let jobs: Vec<(Model, usize)> = cfg
        .models
        .iter()
        .flat_map(|&m| (0..data.len()).map(move |i| (m, i)))
        .collect();
    let results: Vec<Result<Trajectory>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(m, i)| {
                let d = &data[i];
                let n = cfg.n_list[i];
                scope.spawn(move || {
                    let ic = IntegratorConfig::new(cfg.dt, cfg.big_t, n).record_every(cfg.record_every);
                    evolve(d, ModelKind::new(m, cfg.sign)?, &ic)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::InvalidParameter("worker panicked".into()))))
            .collect()
    });
    let mut runs: Vec<Trajectory> = Vec::with_capacity(results.len());
    for (r, &(m, i)) in results.into_iter().zip(&jobs) {
        runs.push(r.map_err(|e| {
            Error::InvalidParameter(format!("{m} at N = {}: {e}", cfg.n_list[i]))
        })?);
    }
    let k = data.len();
    let tables: Vec<DivergenceTable> = cfg
        .models
        .iter()
        .enumerate()
        .map(|(j, &m)| table_for(m, &runs[j * k..(j + 1) * k], &data, cfg))
        .collect();

    let mut gauge_defects = Vec::new();
    let pos = |m: Model| cfg.models.iter().position(|&x| x == m);
    if let (Some(a), Some(b)) = (pos(Model::Mkdv), pos(Model::Mkdv2)) {
        for i in 0..k {
            let g = gauge_g2(&gauge_g1(&runs[a * k + i], cfg.sign)?, cfg.sign)?;
            let d = g.sup_distance(&runs[b * k + i], FLParams { s: 0.5, p: 2.0 })?;
            gauge_defects.push((cfg.n_list[i], d));
        }
    }

    let mut verdicts = Vec::new();
    if let Some(t) = tables.iter().find(|t| t.model == Model::Mkdv2) {
        verdicts.push(Verdict {
            name: "mkdv2 gaps decrease".into(),
            value: t.monotone_decreasing() as u8 as f64,
            threshold: 1.0,
            pass: t.monotone_decreasing(),
        });
        verdicts.push(Verdict::below("mkdv2 final/first gap", t.final_over_first(), 0.25));
    }
    if let Some(t) = tables.iter().find(|t| t.model == Model::Mkdv) {
        verdicts.push(Verdict::at_least("mkdv floor/first gap", t.floor_over_first(), 0.5));
        verdicts.push(Verdict::below("mkdv early phase mismatch", t.phase_mismatch(), 0.1));
    }
    Ok(DichotomyReport {
        config: cfg.clone(),
        tables,
        gauge_defects,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n_list: vec![8, 16, 32],
            big_t: 0.05,
            dt: 2.5e-5,
            record_every: 20,
            ..Default::default()
        }
    }

    #[test]
    fn tables_have_consecutive_rows() {
        let r = run_dichotomy_experiment(&small()).unwrap();
        assert_eq!(r.tables.len(), 2);
        for t in &r.tables {
            assert_eq!(t.rows.len(), 2);
            assert_eq!((t.rows[0].n, t.rows[0].n_prime), (8, 16));
            assert!(t.rows.iter().all(|row| row.distance > 0.0 && row.distance.is_finite()));
        }
        assert_eq!(r.gauge_defects.len(), 3);
        assert!(r.gauge_defects.iter().all(|&(_, d)| d < 1e-6), "{:?}", r.gauge_defects);
        assert_eq!(r.verdicts.len(), 4);
    }

    #[test]
    fn deterministic() {
        let a = run_dichotomy_experiment(&small()).unwrap();
        let b = run_dichotomy_experiment(&small()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn real_data_makes_the_momentum_gauge_trivial() {
        let cfg = ExperimentConfig {
            real_data: true,
            models: vec![Model::Mkdv1, Model::Mkdv2],
            ..small()
        };
        let r = run_dichotomy_experiment(&cfg).unwrap();
        let a = r.table(Model::Mkdv1).unwrap().distances();
        let b = r.table(Model::Mkdv2).unwrap().distances();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-6);
        }
    }
}
