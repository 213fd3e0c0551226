//! Experiment driver: the dichotomy between the original and the
//! renormalized equation, a Lipschitz probe, lemma verifiers and report
//! emission.

mod data;
mod dichotomy;
mod emit;
mod lemmas;
mod lipschitz;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use data::{build_infinite_momentum_data, power_law_coefficient, MAX_DATA_BAND};
pub use dichotomy::{
    run_dichotomy_experiment, DichotomyReport, DivergenceRow, DivergenceTable, Verdict,
};
pub use emit::{emit, emit_csv, emit_json, read_json, write_csv, write_json, Format, Metadata, Table};
pub use lemmas::{
    convolution_gamma, convolution_lemma_check, convolution_lhs, convolution_sweep,
    divisor_count_near, divisors_near_brute, verify_divisor_lemma, ConvolutionReport,
    ConvolutionRow, ConvolutionSweep, DivisorReport, DivisorSample,
};
pub use lipschitz::{run_lipschitz_probe, LipschitzReport, LipschitzRow};

use crate::dynamics::Model;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Fourier-Lebesgue exponent of the data and of the distances.
    pub p: f64,
    pub s: f64,
    /// Truncation levels, increasing.
    pub n_list: Vec<usize>,
    /// Horizon, at most 1.
    pub big_t: f64,
    pub dt: f64,
    pub record_every: usize,
    pub seed: u64,
    /// Random unimodular phases on the data.
    pub random_phases: bool,
    /// Replace the data by its real part.
    pub real_data: bool,
    pub models: Vec<Model>,
    pub sign: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: 6.0,
            s: 0.5,
            n_list: vec![16, 32, 64, 128, 256],
            big_t: 0.25,
            dt: 2e-6,
            record_every: 250,
            seed: 0,
            random_phases: false,
            real_data: false,
            models: vec![Model::Mkdv, Model::Mkdv2],
            sign: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.len() < 2 || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "n_list needs at least two increasing entries".into(),
            ));
        }
        if self.n_list.iter().any(|&n| n == 0 || n > MAX_DATA_BAND) {
            return Err(Error::InvalidParameter(format!("n_list entries in 1..={MAX_DATA_BAND}")));
        }
        if !(self.big_t > 0.0 && self.big_t <= 1.0) {
            return Err(Error::InvalidParameter(format!("T = {} outside (0, 1]", self.big_t)));
        }
        if !(self.dt > 0.0 && self.dt <= crate::dynamics::MAX_DT) || self.record_every == 0 {
            return Err(Error::InvalidParameter("dt or record_every".into()));
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(Error::InvalidParameter(format!("sign {}", self.sign)));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidParameter("no models".into()));
        }
        crate::spectral::FLParams::new(self.s, self.p)?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

/// SHA-256 (hex) of the JSON serialization of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configs serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_every_field() {
        let base = ExperimentConfig::default();
        let h = base.hash();
        assert_eq!(h, ExperimentConfig::default().hash());
        let variants = [
            ExperimentConfig { p: 5.0, ..base.clone() },
            ExperimentConfig { s: 0.4, ..base.clone() },
            ExperimentConfig { n_list: vec![16, 32], ..base.clone() },
            ExperimentConfig { big_t: 0.2, ..base.clone() },
            ExperimentConfig { dt: 1e-4, ..base.clone() },
            ExperimentConfig { record_every: 3, ..base.clone() },
            ExperimentConfig { seed: 1, ..base.clone() },
            ExperimentConfig { random_phases: true, ..base.clone() },
            ExperimentConfig { real_data: true, ..base.clone() },
            ExperimentConfig { models: vec![Model::Mkdv], ..base.clone() },
            ExperimentConfig { sign: -1.0, ..base.clone() },
        ];
        for v in &variants {
            assert_ne!(v.hash(), h, "{v:?}");
        }
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = [
            ExperimentConfig { n_list: vec![32, 16], ..Default::default() },
            ExperimentConfig { big_t: 1.5, ..Default::default() },
            ExperimentConfig { dt: 0.5, ..Default::default() },
            ExperimentConfig { sign: 0.0, ..Default::default() },
            ExperimentConfig { p: 0.5, ..Default::default() },
        ];
        for b in &bad {
            assert!(b.validate().is_err());
        }
    }
}
