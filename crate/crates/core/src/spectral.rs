//! Fourier representation of periodic fields on T = R/2πZ.
//!
//! Coefficients follow `û(n) = (1/2π) ∫ u(x) e^{-inx} dx`, so that
//! `u(x) = Σ û(n) e^{inx}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jb;

/// Sign in front of `Σ n |û(n)|²` in [`momentum`].
///
/// Positive is the sign for which the momentum-renormalized nonlinearity
/// equals the full nonlinearity minus the mass and momentum corrections.
/// The literal quadrature of `(1/2π) Im ∫ u ∂ₓū` is the opposite sign, see
/// [`momentum_defining_integral`].
pub const MOMENTUM_SIGN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n_max: usize,
    pub time: f64,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            time: 0.0,
            coeffs: vec![Complex64::default(); 2 * n_max + 1],
        }
    }

    /// Builds a field from a dense coefficient vector ordered `-N..=N`.
    pub fn from_dense(n_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * n_max + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                2 * n_max + 1,
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(i as i64 - n_max as i64));
        }
        Ok(Self {
            n_max,
            time: 0.0,
            coeffs,
        })
    }

    pub fn from_modes(n_max: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut f = Self::zeros(n_max);
        for &(n, c) in modes {
            if n.unsigned_abs() as usize > n_max {
                return Err(Error::OutOfBand { n, n_max });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite(n));
            }
            let i = f.index(n);
            f.coeffs[i] += c;
        }
        Ok(f)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    fn index(&self, n: i64) -> usize {
        (n + self.n_max as i64) as usize
    }

    /// Coefficient at `n`, zero outside the band.
    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            Complex64::default()
        } else {
            self.coeffs[self.index(n)]
        }
    }

    pub fn set(&mut self, n: i64, c: Complex64) -> Result<()> {
        if n.unsigned_abs() as usize > self.n_max {
            return Err(Error::OutOfBand { n, n_max: self.n_max });
        }
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::NonFinite(n));
        }
        let i = self.index(n);
        self.coeffs[i] = c;
        Ok(())
    }

    /// Dense coefficients ordered `-N..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        let n = self.n_max as i64;
        -n..=n
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.frequencies().zip(self.coeffs.iter().copied())
    }

    /// Same coefficients on a different band, truncating or zero padding.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut out = Self::zeros(n_max);
        out.time = self.time;
        let m = n_max.min(self.n_max) as i64;
        for n in -m..=m {
            let i = out.index(n);
            out.coeffs[i] = self.get(n);
        }
        out
    }

    pub fn map(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (i, n) in self.frequencies().enumerate() {
            out.coeffs[i] = f(n, self.coeffs[i]);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|_, c| c * s)
    }

    /// Coefficientwise combination on the larger of the two bands.
    pub fn zip_with(
        &self,
        other: &Self,
        mut f: impl FnMut(Complex64, Complex64) -> Complex64,
    ) -> Self {
        let n_max = self.n_max.max(other.n_max);
        let mut out = Self::zeros(n_max);
        out.time = self.time;
        for (i, n) in out.frequencies().enumerate() {
            out.coeffs[i] = f(self.get(n), other.get(n));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Largest `|û(-n) - conj(û(n))|`; zero for real-valued fields.
    pub fn reality_defect(&self) -> f64 {
        self.iter()
            .map(|(n, c)| (self.get(-n) - c.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients of the complex conjugate field, `conj(û(-n))`.
    pub fn conj_field(&self) -> Self {
        let mut out = self.clone();
        for (i, n) in self.frequencies().enumerate() {
            out.coeffs[i] = self.get(-n).conj();
        }
        out
    }

    /// Coefficients of the spatial reflection `u(-x)`.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for (i, n) in self.frequencies().enumerate() {
            out.coeffs[i] = self.get(-n);
        }
        out
    }

    /// Real part of the physical field, `(û(n) + conj(û(-n)))/2`.
    pub fn real_part(&self) -> Self {
        self.add(&self.conj_field()).scale(Complex64::new(0.5, 0.0))
    }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    n_max: usize,
    time: f64,
    coeffs: Vec<(i64, f64, f64)>,
}

impl Serialize for SpectralField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldRepr {
            n_max: self.n_max,
            time: self.time,
            coeffs: self.iter().map(|(n, c)| (n, c.re, c.im)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FieldRepr::deserialize(d)?;
        let modes: Vec<(i64, Complex64)> = r
            .coeffs
            .iter()
            .map(|&(n, re, im)| (n, Complex64::new(re, im)))
            .collect();
        SpectralField::from_modes(r.n_max, &modes)
            .map(|f| f.with_time(r.time))
            .map_err(serde::de::Error::custom)
    }
}

/// Samples `u(x_j) = Σ û(n) e^{inx_j}` on `x_j = 2πj/M`.
pub fn to_physical(field: &SpectralField, grid_size: usize) -> Result<Vec<Complex64>> {
    let needed = 2 * field.n_max + 1;
    if grid_size < needed {
        return Err(Error::Aliasing {
            grid: grid_size,
            n_max: field.n_max,
            needed,
        });
    }
    let mut buf = vec![Complex64::default(); grid_size];
    for (n, c) in field.iter() {
        buf[n.rem_euclid(grid_size as i64) as usize] = c;
    }
    FftPlanner::new().plan_fft_inverse(grid_size).process(&mut buf);
    Ok(buf)
}

/// Discrete transform of samples on the uniform grid `x_j = 2πj/M`,
/// normalized by `1/M` (the trapezoidal rule for the coefficient integral).
pub fn from_physical(samples: &[Complex64], n_max: usize) -> Result<SpectralField> {
    let m = samples.len();
    let needed = 2 * n_max + 1;
    if m < needed {
        return Err(Error::Aliasing {
            grid: m,
            n_max,
            needed,
        });
    }
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let n = n_max as i64;
    let coeffs = (-n..=n)
        .map(|k| buf[k.rem_euclid(m as i64) as usize] * scale)
        .collect();
    SpectralField::from_dense(n_max, coeffs)
}

/// As [`from_physical`] but with explicit sample locations, which must form
/// the uniform grid `2πj/M` on [0, 2π).
pub fn from_samples(xs: &[f64], samples: &[Complex64], n_max: usize) -> Result<SpectralField> {
    if xs.len() != samples.len() {
        return Err(Error::NonUniformGrid(format!(
            "{} locations for {} samples",
            xs.len(),
            samples.len()
        )));
    }
    let m = xs.len();
    let h = 2.0 * PI / m as f64;
    for (j, &x) in xs.iter().enumerate() {
        if (x - j as f64 * h).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(Error::NonUniformGrid(format!(
                "x[{j}] = {x}, expected {}",
                j as f64 * h
            )));
        }
    }
    from_physical(samples, n_max)
}

/// Dirichlet projection onto `|n| ≤ n`.
pub fn project_leq(field: &SpectralField, n: usize) -> SpectralField {
    field.map(|k, c| {
        if k.unsigned_abs() as usize <= n {
            c
        } else {
            Complex64::default()
        }
    })
}

/// Dyadic shell projection. Shell `N ≥ 1` keeps `N/2 < |n| ≤ N`; shell 0 is
/// the zero mode. The shells `0, 1, 2, 4, …` partition the frequencies.
pub fn project_dyadic(field: &SpectralField, shell: usize) -> Result<SpectralField> {
    if shell != 0 && !shell.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "dyadic shell {shell} is not a power of two"
        )));
    }
    Ok(field.map(|k, c| {
        let a = k.unsigned_abs() as usize;
        let keep = if shell == 0 {
            a == 0
        } else {
            2 * a > shell && a <= shell
        };
        if keep {
            c
        } else {
            Complex64::default()
        }
    }))
}

/// Dyadic shells needed to cover the band of `field`.
pub fn dyadic_shells(n_max: usize) -> Vec<usize> {
    let mut v = vec![0];
    let mut s = 1;
    while s < 2 * n_max.max(1) {
        v.push(s);
        s *= 2;
    }
    v
}

pub fn mass(field: &SpectralField) -> f64 {
    field.coeffs.iter().map(|c| c.norm_sqr()).sum()
}

pub fn momentum(field: &SpectralField) -> f64 {
    MOMENTUM_SIGN * field.iter().map(|(n, c)| n as f64 * c.norm_sqr()).sum::<f64>()
}

/// `(1/2π) Im ∫ u ∂ₓū dx`, evaluated by quadrature on a physical grid.
pub fn momentum_defining_integral(field: &SpectralField) -> Result<f64> {
    let m = 4 * field.n_max + 4;
    let u = to_physical(field, m)?;
    let du = to_physical(&field.map(|n, c| Complex64::new(0.0, n as f64) * c), m)?;
    let s: f64 = u.iter().zip(&du).map(|(a, b)| (a * b.conj()).im).sum();
    Ok(s / m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FLParams {
    pub s: f64,
    pub p: f64,
}

impl FLParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Fourier-Lebesgue index (s, p) = ({s}, {p})"
            )));
        }
        Ok(Self { s, p })
    }
}

/// `‖⟨n⟩^s û‖_{ℓ^p}`.
pub fn fl_norm(field: &SpectralField, params: FLParams) -> f64 {
    let FLParams { s, p } = params;
    let terms: Vec<f64> = field
        .iter()
        .map(|(n, c)| jb(n as f64).powf(s) * c.norm())
        .collect();
    let big = terms.iter().copied().fold(0.0, f64::max);
    if big == 0.0 {
        return 0.0;
    }
    big * terms.iter().map(|t| (t / big).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `n³ - n₁³ - n₂³ - n₃³` with `n = n₁ + n₂ + n₃`, in exact arithmetic.
/// The cubic and factored forms are both evaluated and must agree.
pub fn resonance(n1: i64, n2: i64, n3: i64) -> Result<i128> {
    let ovf = || Error::Overflow(n1, n2, n3);
    let (a, b, c) = (n1 as i128, n2 as i128, n3 as i128);
    let n = a + b + c;
    let cube = |x: i128| x.checked_mul(x).and_then(|y| y.checked_mul(x));
    let cubic = cube(n)
        .and_then(|v| v.checked_sub(cube(a)?))
        .and_then(|v| v.checked_sub(cube(b)?))
        .and_then(|v| v.checked_sub(cube(c)?))
        .ok_or_else(ovf)?;
    let factored = (a + b)
        .checked_mul(a + c)
        .and_then(|v| v.checked_mul(b + c))
        .and_then(|v| v.checked_mul(3))
        .ok_or_else(ovf)?;
    debug_assert_eq!(cubic, factored);
    Ok(factored)
}

/// Factored resonance in plain i64 for frequencies known to be small.
#[inline]
pub(crate) fn resonance_small(n1: i64, n2: i64, n3: i64) -> i64 {
    3 * (n1 + n2) * (n1 + n3) * (n2 + n3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedPair {
    pub mass: f64,
    pub momentum: f64,
}

pub fn conserved(field: &SpectralField) -> ConservedPair {
    ConservedPair {
        mass: mass(field),
        momentum: momentum(field),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn arb_field(n_max: usize) -> impl Strategy<Value = SpectralField> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * n_max + 1).prop_map(move |v| {
            SpectralField::from_dense(n_max, v.into_iter().map(|(a, b)| c(a, b)).collect())
                .unwrap()
        })
    }

    #[test]
    fn physical_round_trip_and_trivial_cases() {
        let z = SpectralField::zeros(4);
        assert!(to_physical(&z, 16).unwrap().iter().all(|v| v.norm() == 0.0));
        let k = SpectralField::from_modes(3, &[(0, c(0.3, -2.0))]).unwrap();
        for v in to_physical(&k, 7).unwrap() {
            assert!((v - c(0.3, -2.0)).norm() < 1e-15);
        }
        let f = random_field(10, 1);
        for m in [21, 32, 45] {
            let g = from_physical(&to_physical(&f, m).unwrap(), 10).unwrap();
            assert!(g.max_abs_diff(&f) < 1e-12);
        }
        assert!(matches!(to_physical(&f, 20), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn physical_samples_of_known_functions() {
        let m = 32;
        let xs: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let e3: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(0.0, 3.0 * x).exp()).collect();
        let f = from_samples(&xs, &e3, 5).unwrap();
        assert!(f.max_abs_diff(&SpectralField::from_modes(5, &[(3, c(1.0, 0.0))]).unwrap()) < 1e-14);
        let cos: Vec<Complex64> = xs.iter().map(|&x| c(2.0 * x.cos(), 0.0)).collect();
        let f = from_physical(&cos, 5).unwrap();
        let expect = SpectralField::from_modes(5, &[(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]).unwrap();
        assert!(f.max_abs_diff(&expect) < 1e-14);

        // trig polynomial with analytic coefficients, sampled pointwise
        let modes = [(-4, c(0.5, 0.25)), (0, c(-1.0, 0.0)), (2, c(0.0, 0.75)), (7, c(0.1, 0.2))];
        let s: Vec<Complex64> = xs
            .iter()
            .map(|&x| {
                modes
                    .iter()
                    .map(|&(n, a)| a * Complex64::new(0.0, n as f64 * x).exp())
                    .sum()
            })
            .collect();
        let f = from_physical(&s, 8).unwrap();
        assert!(f.max_abs_diff(&SpectralField::from_modes(8, &modes).unwrap()) < 1e-12);

        let mut bad = xs.clone();
        bad[5] += 0.01;
        assert!(matches!(from_samples(&bad, &e3, 5), Err(Error::NonUniformGrid(_))));
    }

    #[test]
    fn projections() {
        let f = random_field(5, 2);
        let p = project_leq(&f, 2);
        assert_eq!(project_leq(&p, 2), p);
        for (n, v) in p.iter() {
            assert_eq!(v.norm() == 0.0, n.abs() > 2);
        }
        assert!(mass(&p) <= mass(&f));
        let rest = f.sub(&p);
        assert!((mass(&p) + mass(&rest) - mass(&f)).abs() < 1e-13);

        let three = SpectralField::from_modes(20, &[(3, c(1.0, 1.0))]).unwrap();
        assert_eq!(project_dyadic(&three, 4).unwrap(), three);
        assert_eq!(project_dyadic(&three, 16).unwrap().max_abs(), 0.0);
        assert_eq!(project_dyadic(&SpectralField::zeros(8), 4).unwrap().max_abs(), 0.0);
        assert!(project_dyadic(&three, 6).is_err());
    }

    #[test]
    fn dyadic_shells_partition_the_identity() {
        for n_max in [1, 7, 16, 33] {
            let f = random_field(n_max, n_max as u64);
            let mut sum = SpectralField::zeros(n_max);
            for s in dyadic_shells(n_max) {
                sum = sum.add(&project_dyadic(&f, s).unwrap());
            }
            assert!(sum.max_abs_diff(&f) == 0.0, "n_max = {n_max}");
        }
    }

    #[test]
    fn mass_and_momentum_against_quadrature() {
        let one = SpectralField::from_modes(2, &[(1, c(0.6, 0.8))]).unwrap();
        assert!((mass(&one) - 1.0).abs() < 1e-15);
        assert_eq!(mass(&SpectralField::zeros(3)), 0.0);
        assert_eq!(momentum(&SpectralField::zeros(3)), 0.0);

        let f = random_field(6, 3);
        let u = to_physical(&f, 64).unwrap();
        let quad: f64 = u.iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0;
        assert!((quad - mass(&f)).abs() < 1e-12);

        let e1 = SpectralField::from_modes(2, &[(1, c(1.0, 0.0))]).unwrap();
        assert!((momentum_defining_integral(&e1).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(momentum(&e1), MOMENTUM_SIGN);
        assert!((momentum_defining_integral(&f).unwrap() + momentum(&f)).abs() < 1e-12);
    }

    #[test]
    fn momentum_of_real_fields_vanishes() {
        let f = random_field(9, 4).real_part();
        assert!(f.reality_defect() < 1e-15);
        assert!(momentum(&f).abs() < 1e-13);
    }

    #[test]
    fn fl_norm_examples() {
        let z = SpectralField::from_modes(1, &[(0, c(3.0, 4.0))]).unwrap();
        assert!((fl_norm(&z, FLParams::new(2.0, 3.0).unwrap()) - 5.0).abs() < 1e-14);
        let f = random_field(7, 5);
        let l2 = fl_norm(&f, FLParams::new(0.0, 2.0).unwrap());
        assert!((l2 - mass(&f).sqrt()).abs() < 1e-13);
        let pm = SpectralField::from_modes(1, &[(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]).unwrap();
        let direct = (2.0 * 2f64.sqrt().powf(2.0 * 0.5)).sqrt();
        assert!((fl_norm(&pm, FLParams::new(0.5, 2.0).unwrap()) - direct).abs() < 1e-14);
        assert!(FLParams::new(0.0, 0.5).is_err());
    }

    #[test]
    fn resonance_examples() {
        assert_eq!(resonance(1, 1, 1).unwrap(), 24);
        for n in [-50, 0, 3, 1000] {
            assert_eq!(resonance(n, -n, n).unwrap(), 0);
        }
        assert!(matches!(
            resonance(i64::MAX / 2, i64::MAX / 2, 1),
            Err(Error::Overflow(..))
        ));
        assert_eq!(resonance(100_000, 100_000, 100_000).unwrap(), 24_000_000_000_000_000);
        assert_eq!(resonance(64, 1, 1).unwrap(), 3 * 65 * 65 * 2);
    }

    #[test]
    fn json_format() {
        let f = SpectralField::from_modes(1, &[(-1, c(1.0, 2.0))]).unwrap().with_time(0.5);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"n_max":1,"time":0.5,"coeffs":[[-1,1.0,2.0],[0,0.0,0.0],[1,0.0,0.0]]}"#
        );
        let g: SpectralField = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<SpectralField>(
            r#"{"n_max":1,"time":0,"coeffs":[[2,1.0,0.0]]}"#
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn resonance_forms_agree(a in -10_000i64..=10_000, b in -10_000i64..=10_000, d in -10_000i64..=10_000) {
            let n = (a + b + d) as i128;
            let cubic = n.pow(3) - (a as i128).pow(3) - (b as i128).pow(3) - (d as i128).pow(3);
            let r = resonance(a, b, d).unwrap();
            prop_assert_eq!(r, cubic);
            prop_assert_eq!(r, resonance(b, d, a).unwrap());
            prop_assert_eq!(r, resonance(d, a, b).unwrap());
            prop_assert_eq!(r, resonance(b, a, d).unwrap());
        }

        #[test]
        fn phase_invariance(f in arb_field(6), theta in -4.0f64..4.0) {
            let g = f.scale(Complex64::from_polar(1.0, theta));
            prop_assert!((mass(&g) - mass(&f)).abs() < 1e-12);
            prop_assert!((momentum(&g) - momentum(&f)).abs() < 1e-12);
        }

        #[test]
        fn reflection_flips_momentum(f in arb_field(6)) {
            prop_assert!((momentum(&f.reflect()) + momentum(&f)).abs() < 1e-12);
        }

        #[test]
        fn fl_norm_monotone_under_projection(f in arb_field(8), n in 0usize..9, s in -1.0f64..2.0, p in 1.0f64..8.0) {
            let pr = FLParams { s, p };
            prop_assert!(fl_norm(&project_leq(&f, n), pr) <= fl_norm(&f, pr) * (1.0 + 1e-14));
        }

        #[test]
        fn parseval(f in arb_field(5)) {
            let u = to_physical(&f, 16).unwrap();
            let quad: f64 = u.iter().map(|v| v.norm_sqr()).sum::<f64>() / 16.0;
            let g = from_physical(&u, 5).unwrap();
            prop_assert!((mass(&g) - quad).abs() < 1e-10);
        }
    }
}
