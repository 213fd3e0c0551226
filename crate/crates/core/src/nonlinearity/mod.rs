//! Cubic nonlinearities of mKdV and its renormalizations, and the
//! resonant / non-resonant decomposition.
//!
//! For fields `u1, u2, u3` the basic trilinear form is
//!
//! ```text
//! T(u1, u2, u3)(n) = Σ_{n1+n2+n3 = n} i n1 û1(n1) û2(n2) û3(n3)
//! ```
//!
//! and `|u|² ∂ₓu` has coefficients `T(u, ū, u)`, where `ū` has coefficients
//! `conj(û(-n))`. All outputs are projected back onto the band of the input.

mod regions;

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub use regions::{
    classify_region, priority_region, verify_region_lemma, FrequencyTriple, RegionConstants,
    RegionLabel, RegionLemmaReport, Violation,
};

use crate::error::{Error, Result};
use crate::spectral::{mass, momentum, resonance_small, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest band for which [`mkdv_nonlinearity`] sums directly.
pub const DIRECT_LIMIT: usize = 64;

fn common_band(fields: &[&SpectralField]) -> usize {
    fields.iter().map(|f| f.n_max()).max().unwrap_or(0)
}

/// `T(u1, u2, u3)` restricted to the triples accepted by `keep(n1, n2, n3)`.
pub fn trilinear_direct(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    mut keep: impl FnMut(i64, i64, i64) -> bool,
) -> SpectralField {
    let nb = common_band(&[u1, u2, u3]) as i64;
    let mut out = SpectralField::zeros(nb as usize).with_time(u1.time);
    let (b1, b2, b3) = (u1.n_max() as i64, u2.n_max() as i64, u3.n_max() as i64);
    let coeffs = out.coeffs_mut();
    for n in -nb..=nb {
        let mut acc = Complex64::default();
        for n1 in -b1..=b1 {
            let a1 = u1.get(n1);
            if a1 == Complex64::default() {
                continue;
            }
            let w1 = a1 * n1 as f64;
            for n3 in -b3..=b3 {
                let n2 = n - n1 - n3;
                if n2.abs() > b2 || !keep(n1, n2, n3) {
                    continue;
                }
                acc += w1 * u2.get(n2) * u3.get(n3);
            }
        }
        coeffs[(n + nb) as usize] = I * acc;
    }
    out
}

/// Coefficients of `sign·|u|² ∂ₓu` by direct summation.
pub fn mkdv_nonlinearity_direct(field: &SpectralField, sign: f64) -> SpectralField {
    trilinear_direct(field, &field.conj_field(), field, |_, _, _| true)
        .scale(Complex64::new(sign, 0.0))
}

/// Pseudospectral evaluation of `|u|² ∂ₓu` on a zero-padded grid large
/// enough that the cubic product does not alias into the band.
pub struct NonlinearityEvaluator {
    n_max: usize,
    grid: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    u: Vec<Complex64>,
    du: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for NonlinearityEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearityEvaluator")
            .field("n_max", &self.n_max)
            .field("grid", &self.grid)
            .finish()
    }
}

/// Smallest 2^a·3^b that is at least `m`.
pub fn smooth_grid_size(m: usize) -> usize {
    let mut best = m.next_power_of_two();
    let mut p3 = 1;
    while p3 < best {
        let mut v = p3;
        while v < m {
            v *= 2;
        }
        best = best.min(v);
        p3 *= 3;
    }
    best
}

impl NonlinearityEvaluator {
    pub fn new(n_max: usize) -> Self {
        let grid = smooth_grid_size(4 * n_max + 2);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid);
        let inverse = planner.plan_fft_inverse(grid);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n_max,
            grid,
            forward,
            inverse,
            u: vec![Complex64::default(); grid],
            du: vec![Complex64::default(); grid],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn grid_size(&self) -> usize {
        self.grid
    }

    /// Writes the coefficients of `|u|² ∂ₓu` for the dense coefficients
    /// `coeffs` (ordered `-N..=N`) into `out`.
    pub fn cubic(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        let nb = self.n_max as i64;
        let m = self.grid as i64;
        assert_eq!(coeffs.len(), 2 * self.n_max + 1);
        assert_eq!(out.len(), coeffs.len());
        self.u.fill(Complex64::default());
        self.du.fill(Complex64::default());
        for (i, &c) in coeffs.iter().enumerate() {
            let n = i as i64 - nb;
            let j = n.rem_euclid(m) as usize;
            self.u[j] = c;
            self.du[j] = c * Complex64::new(0.0, n as f64);
        }
        self.inverse
            .process_with_scratch(&mut self.u, &mut self.scratch);
        self.inverse
            .process_with_scratch(&mut self.du, &mut self.scratch);
        for (d, u) in self.du.iter_mut().zip(&self.u) {
            *d *= u.norm_sqr();
        }
        self.forward
            .process_with_scratch(&mut self.du, &mut self.scratch);
        let scale = 1.0 / self.grid as f64;
        for (i, o) in out.iter_mut().enumerate() {
            let n = i as i64 - nb;
            *o = self.du[n.rem_euclid(m) as usize] * scale;
        }
    }

    pub fn cubic_field(&mut self, field: &SpectralField) -> Result<SpectralField> {
        if field.n_max() != self.n_max {
            return Err(Error::InvalidParameter(format!(
                "evaluator band {} does not match field band {}",
                self.n_max,
                field.n_max()
            )));
        }
        let mut out = vec![Complex64::default(); field.coeffs().len()];
        self.cubic(field.coeffs(), &mut out);
        Ok(SpectralField::from_dense(self.n_max, out)?.with_time(field.time))
    }
}

/// Coefficients of `sign·|u|² ∂ₓu` through the padded transform.
pub fn mkdv_nonlinearity_padded(field: &SpectralField, sign: f64) -> SpectralField {
    NonlinearityEvaluator::new(field.n_max())
        .cubic_field(field)
        .expect("band matches by construction")
        .scale(Complex64::new(sign, 0.0))
}

/// Coefficients of `sign·|u|² ∂ₓu`, summed directly for small bands.
pub fn mkdv_nonlinearity(field: &SpectralField, sign: f64) -> SpectralField {
    if field.n_max() <= DIRECT_LIMIT {
        mkdv_nonlinearity_direct(field, sign)
    } else {
        mkdv_nonlinearity_padded(field, sign)
    }
}

/// `sign·(|u|² - μ(u)) ∂ₓu`.
pub fn mkdv1_nonlinearity(field: &SpectralField, sign: f64) -> SpectralField {
    let mu = mass(field);
    let full = mkdv_nonlinearity(field, sign);
    full.map(|n, f| f - sign * mu * I * n as f64 * field.get(n))
}

/// The momentum-renormalized nonlinearity, as the full nonlinearity minus
/// the mass and momentum corrections.
pub fn mkdv2_nonlinearity(field: &SpectralField, sign: f64) -> SpectralField {
    let p = momentum(field);
    mkdv1_nonlinearity(field, sign).map(|n, f| f - sign * I * p * field.get(n))
}

/// The momentum-renormalized nonlinearity from its resonance form:
/// the non-resonant sum minus `i n |û(n)|² û(n)`, times `sign`.
pub fn mkdv2_nonlinearity_direct(field: &SpectralField, sign: f64) -> SpectralField {
    let nr = trilinear_direct(field, &field.conj_field(), field, |a, b, c| {
        resonance_small(a, b, c) != 0
    });
    nr.add(&resonant_term(field, field, field))
        .scale(Complex64::new(sign, 0.0))
}

fn check_region(region: RegionLabel) -> Result<()> {
    if region == RegionLabel::Resonant {
        return Err(Error::InvalidParameter(
            "non-resonant operators are localized to A, B, C or D".into(),
        ));
    }
    Ok(())
}

/// Non-resonant trilinear sum over the triples assigned to `region`, with
/// `|n2| ≥ |n3|`, or `|n2| > |n3|` when `strict`.
pub fn nr_partial(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    region: RegionLabel,
    strict: bool,
    constants: &RegionConstants,
) -> Result<SpectralField> {
    check_region(region)?;
    constants.validate()?;
    Ok(trilinear_direct(u1, u2, u3, |a, b, c| {
        let ok = if strict { b.abs() > c.abs() } else { b.abs() >= c.abs() };
        ok && {
            let phi = resonance_small(a, b, c);
            phi != 0 && regions::priority_from_mask(regions::region_mask(a, b, c, false, constants)) == region
        }
    }))
}

/// Non-resonant trilinear sum over all triples with `|n2| ≥ |n3|`
/// (or `>` when `strict`).
pub fn nr_sum(
    u1: &SpectralField,
    u2: &SpectralField,
    u3: &SpectralField,
    strict: bool,
) -> SpectralField {
    trilinear_direct(u1, u2, u3, |a, b, c| {
        let ok = if strict { b.abs() > c.abs() } else { b.abs() >= c.abs() };
        ok && resonance_small(a, b, c) != 0
    })
}

/// `R(u1, u2, u3)(n) = -i n û1(n) conj(û2(n)) û3(n)`.
pub fn resonant_term(u1: &SpectralField, u2: &SpectralField, u3: &SpectralField) -> SpectralField {
    let nb = common_band(&[u1, u2, u3]);
    SpectralField::zeros(nb)
        .with_time(u1.time)
        .map(|n, _| -I * n as f64 * u1.get(n) * u2.get(n).conj() * u3.get(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{from_physical, to_physical};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(n_max: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..2 * n_max + 1)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SpectralField::from_dense(n_max, v).unwrap()
    }

    /// Physical-space product, projected, on a grid wide enough for the
    /// cubic product.
    fn physical_oracle(f: &SpectralField) -> SpectralField {
        let m = 6 * f.n_max() + 3;
        let u = to_physical(f, m).unwrap();
        let du = to_physical(&f.map(|n, v| I * n as f64 * v), m).unwrap();
        let w: Vec<Complex64> = u.iter().zip(&du).map(|(a, b)| a.norm_sqr() * b).collect();
        from_physical(&w, f.n_max()).unwrap()
    }

    #[test]
    fn zero_and_single_mode() {
        let z = SpectralField::zeros(5);
        for s in [1.0, -1.0] {
            assert_eq!(mkdv_nonlinearity(&z, s).max_abs(), 0.0);
            assert_eq!(mkdv1_nonlinearity(&z, s).max_abs(), 0.0);
            assert_eq!(mkdv2_nonlinearity(&z, s).max_abs(), 0.0);
        }
        for k in [-3i64, 1, 4] {
            let a = c(0.7, -0.4);
            let f = SpectralField::from_modes(5, &[(k, a)]).unwrap();
            for s in [1.0, -1.0] {
                let expect =
                    SpectralField::from_modes(5, &[(k, s * I * k as f64 * a.norm_sqr() * a)]).unwrap();
                assert!(mkdv_nonlinearity(&f, s).max_abs_diff(&expect) < 1e-15);
                assert!(physical_oracle(&f).scale(c(s, 0.0)).max_abs_diff(&expect) < 1e-14);
                assert!(mkdv1_nonlinearity(&f, s).max_abs() < 1e-15);
                let m2 = expect.scale(c(-1.0, 0.0));
                assert!(mkdv2_nonlinearity(&f, s).max_abs_diff(&m2) < 1e-15);
                assert!(mkdv2_nonlinearity_direct(&f, s).max_abs_diff(&m2) < 1e-15);
            }
        }
    }

    #[test]
    fn direct_padded_and_physical_agree() {
        for (n_max, seed) in [(8, 1), (13, 2), (40, 3)] {
            let f = random_field(n_max, seed);
            let d = mkdv_nonlinearity_direct(&f, 1.0);
            let scale = d.max_abs();
            assert!(d.max_abs_diff(&mkdv_nonlinearity_padded(&f, 1.0)) < 1e-12 * scale);
            assert!(d.max_abs_diff(&physical_oracle(&f)) < 1e-12 * scale);
        }
    }

    #[test]
    fn grid_sizes_are_smooth() {
        assert_eq!(smooth_grid_size(34), 36);
        assert_eq!(smooth_grid_size(1026), 1152);
        assert_eq!(smooth_grid_size(64), 64);
        assert_eq!(NonlinearityEvaluator::new(256).grid_size(), 1152);
    }

    #[test]
    fn isolated_triple_support() {
        let u1 = SpectralField::from_modes(70, &[(64, c(1.0, 0.5))]).unwrap();
        let u2 = SpectralField::from_modes(70, &[(1, c(0.3, 0.0))]).unwrap();
        let u3 = SpectralField::from_modes(70, &[(1, c(0.0, 2.0))]).unwrap();
        let k = RegionConstants::default();
        let out = nr_partial(&u1, &u2, &u3, RegionLabel::A, false, &k).unwrap();
        let expect = I * 64.0 * c(1.0, 0.5) * c(0.3, 0.0) * c(0.0, 2.0);
        for (n, v) in out.iter() {
            if n == 66 {
                assert!((v - expect).norm() < 1e-13);
            } else {
                assert_eq!(v.norm(), 0.0);
            }
        }
        for r in [RegionLabel::B, RegionLabel::C, RegionLabel::D] {
            assert_eq!(nr_partial(&u1, &u2, &u3, r, false, &k).unwrap().max_abs(), 0.0);
        }
        assert!(nr_partial(&u1, &u2, &u3, RegionLabel::Resonant, false, &k).is_err());
    }

    #[test]
    fn single_mode_has_no_nonresonant_part() {
        let f = SpectralField::from_modes(6, &[(3, c(0.2, 0.9))]).unwrap();
        let k = RegionConstants::default();
        for r in RegionLabel::NON_RESONANT {
            for strict in [false, true] {
                assert_eq!(
                    nr_partial(&f, &f.conj_field(), &f, r, strict, &k).unwrap().max_abs(),
                    0.0
                );
            }
        }
    }

    #[test]
    fn regions_reassemble_the_nonresonant_sum() {
        let k = RegionConstants::default();
        for seed in 0..5 {
            let u = random_field(8, seed);
            let ub = u.conj_field();
            for strict in [false, true] {
                let (a, b, cc) = if strict { (&u, &u, &ub) } else { (&u, &ub, &u) };
                let mut sum = SpectralField::zeros(8);
                for r in RegionLabel::NON_RESONANT {
                    sum = sum.add(&nr_partial(a, b, cc, r, strict, &k).unwrap());
                }
                assert!(sum.max_abs_diff(&nr_sum(a, b, cc, strict)) < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn renormalized_forms_agree(seed in any::<u64>(), n_max in 1usize..10, sign in prop::sample::select(vec![1.0, -1.0])) {
            let f = random_field(n_max, seed);
            let a = mkdv2_nonlinearity(&f, sign);
            let b = mkdv2_nonlinearity_direct(&f, sign);
            prop_assert!(a.max_abs_diff(&b) < 1e-12);
        }

        #[test]
        fn decomposition_identity(seed in any::<u64>(), n_max in 1usize..12) {
            let u = random_field(n_max, seed);
            let ub = u.conj_field();
            let rhs = nr_sum(&u, &ub, &u, false)
                .add(&nr_sum(&u, &u, &ub, true))
                .add(&resonant_term(&u, &u, &u));
            prop_assert!(mkdv2_nonlinearity(&u, 1.0).max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn reality_is_preserved(seed in any::<u64>(), n_max in 1usize..12) {
            let u = random_field(n_max, seed).real_part();
            let nl = mkdv_nonlinearity(&u, 1.0);
            prop_assert!(nl.reality_defect() < 1e-14 * nl.max_abs().max(1.0));
        }

        #[test]
        fn skew_symmetry(seed in any::<u64>(), n_max in 1usize..16, sign in prop::sample::select(vec![1.0, -1.0])) {
            let u = random_field(n_max, seed);
            for nl in [mkdv_nonlinearity(&u, sign), mkdv1_nonlinearity(&u, sign), mkdv2_nonlinearity(&u, sign)] {
                let s: f64 = u.iter().map(|(n, c)| (c.conj() * nl.get(n)).re).sum();
                prop_assert!(s.abs() < 1e-10 * nl.max_abs().max(1.0));
            }
        }

        #[test]
        fn classification_is_consistent(n1 in -300i64..300, n2 in -300i64..300, n3 in -300i64..300) {
            let t = FrequencyTriple::new(n1, n2, n3).unwrap();
            let set = classify_region(&t, &RegionConstants::default());
            if t.phi == 0 {
                prop_assert_eq!(set.len(), 1);
                prop_assert!(set.contains(&RegionLabel::Resonant));
            } else {
                prop_assert!(!set.contains(&RegionLabel::Resonant));
            }
        }
    }
}
