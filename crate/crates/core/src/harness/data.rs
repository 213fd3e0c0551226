//! Initial data with divergent momentum truncations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::Complex64;

/// Largest admissible band of the data.
pub const MAX_DATA_BAND: usize = 4096;

/// Modulus of the coefficient at frequency `n ≥ 1`:
/// `n^{-1/2-1/p} (1 + ln n)^{-3/(2p)}`.
pub fn power_law_coefficient(n: usize, p: f64) -> f64 {
    let x = n as f64;
    x.powf(-0.5 - 1.0 / p) * (1.0 + x.ln()).powf(-1.5 / p)
}

/// One-sided spectrum on `1 ≤ n ≤ n_cap`, with unimodular random phases
/// when a seed is given.
///
/// The logarithmic factor keeps the FL^{1/2,p} norm bounded in `n_cap`
/// while `Σ_{n≤N} n|û(n)|²` still grows like `N^{1-2/p}` up to logarithms.
pub fn build_infinite_momentum_data(p: f64, n_cap: usize, seed: Option<u64>) -> Result<SpectralField> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "p = {p}: the momentum of the truncations diverges only for p > 2"
        )));
    }
    if n_cap == 0 || n_cap > MAX_DATA_BAND {
        return Err(Error::InvalidParameter(format!(
            "band {n_cap} outside 1..={MAX_DATA_BAND}"
        )));
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    Ok(SpectralField::zeros(n_cap).map(|n, _| {
        if n < 1 {
            return Complex64::default();
        }
        let a = power_law_coefficient(n as usize, p);
        match rng.as_mut() {
            Some(r) => Complex64::from_polar(a, r.gen_range(0.0..std::f64::consts::TAU)),
            None => Complex64::new(a, 0.0),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{fl_norm, momentum, project_leq, FLParams};

    #[test]
    fn momentum_grows_like_a_power() {
        let u = build_infinite_momentum_data(6.0, 128, None).unwrap();
        let r = momentum(&project_leq(&u, 128)) / momentum(&project_leq(&u, 64));
        let expected = 2f64.powf(2.0 / 3.0);
        assert!((r / expected - 1.0).abs() < 0.1, "{r}");
    }

    #[test]
    fn norm_saturates() {
        let fl = FLParams { s: 0.5, p: 6.0 };
        let a = fl_norm(&build_infinite_momentum_data(6.0, 512, Some(3)).unwrap(), fl);
        let b = fl_norm(&build_infinite_momentum_data(6.0, 1024, Some(3)).unwrap(), fl);
        assert!(b > a && b / a - 1.0 < 0.01);
    }

    #[test]
    fn real_part_has_no_momentum() {
        let u = build_infinite_momentum_data(4.0, 64, Some(9)).unwrap().real_part();
        assert!(momentum(&u).abs() < 1e-14);
        assert!(u.reality_defect() == 0.0);
    }

    #[test]
    fn rejects_small_p_and_large_bands() {
        assert!(build_infinite_momentum_data(2.0, 16, None).is_err());
        assert!(build_infinite_momentum_data(3.0, 5000, None).is_err());
        let s = build_infinite_momentum_data(1.5, 16, None).unwrap_err().to_string();
        assert!(s.contains("p > 2"));
    }

    #[test]
    fn phases_are_seeded() {
        let a = build_infinite_momentum_data(6.0, 32, Some(1)).unwrap();
        let b = build_infinite_momentum_data(6.0, 32, Some(1)).unwrap();
        assert_eq!(a, b);
        for (n, c) in a.iter().filter(|(n, _)| *n >= 1) {
            assert!((c.norm() - power_law_coefficient(n as usize, 6.0)).abs() < 1e-15);
        }
    }
}
