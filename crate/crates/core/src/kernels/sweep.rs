//! Bound sweeps of the kernels over a (τ, λ) grid.
//!
//! All kernels on a grid are computed at once from matrix products over a
//! uniform μ-grid. The integrands `φ̂(τ-μ)φ̂(μ-λ)` and their relatives have
//! compactly supported time transforms, so the trapezoid rule is exact up to
//! truncation; principal values use the symmetric sum plus `h·g'(0)`. The
//! pieces cut at `|μ| = 1` are recovered from 32-point Gauss-Legendre
//! integrals over `[-1, 1]`.

use std::io::Write;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::{eta_hat, CutoffPair, KernelKind, MU_RANGE};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// τ and λ range over `[-extent, extent]`.
    pub extent: f64,
    /// Coarse grid step; the refinement uses half of it.
    pub step: f64,
    pub phis: Vec<i64>,
    pub alpha: f64,
    pub mu_step: f64,
    /// Allowed relative change of a constant under step halving.
    pub stability: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            extent: 50.0,
            step: 1.0,
            phis: vec![-960, -96, -24, -6, 6, 24, 96, 960],
            alpha: 0.5,
            mu_step: 0.25,
            stability: 0.1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.extent > 0.0 && self.step > 0.0 && self.mu_step > 0.0) {
            return bad("extent and steps must be positive");
        }
        if self.mu_step > 1.0 {
            return bad("mu_step above 1 under-resolves the integrands");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if self.phis.contains(&0) {
            return bad("Φ = 0 is resonant");
        }
        if (2.0 * self.extent / self.step).round() as usize > 4000 {
            return bad("grid too large");
        }
        Ok(())
    }
}

pub fn uniform_grid(extent: f64, step: f64) -> Vec<f64> {
    let n = (2.0 * extent / step).round() as usize;
    (0..=n).map(|i| -extent + i as f64 * step).collect()
}

/// All kernels at one Φ on a `τ × λ` grid.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    pub phi: i64,
    pub taus: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub k: Array2<Complex64>,
    pub kg: Array2<Complex64>,
    pub kb: Array2<Complex64>,
    pub k0: Array2<Complex64>,
    pub kplus: Array2<Complex64>,
}

fn scale_rows(m: &Array2<f64>, w: &[f64]) -> Array2<f64> {
    let w = Array1::from(w.to_vec()).insert_axis(Axis(1));
    m * &w
}

fn to_complex(m: &Array2<f64>, imaginary: bool) -> Array2<Complex64> {
    m.mapv(|v| {
        if imaginary {
            Complex64::new(0.0, v)
        } else {
            Complex64::new(v, 0.0)
        }
    })
}

impl KernelGrid {
    pub fn compute(taus: &[f64], lambdas: &[f64], phi: i64, mu_step: f64) -> Result<Self> {
        if phi == 0 {
            return Err(Error::InvalidParameter("Φ must be nonzero".into()));
        }
        let c = CutoffPair::shared();
        let p = phi as f64;
        let h = mu_step;
        let reach = taus
            .iter()
            .chain(lambdas)
            .fold(0.0f64, |a, &x| a.max(x.abs()));
        let m = ((reach + MU_RANGE) / h).ceil() as i64;
        let mus: Vec<f64> = (-m..=m).map(|k| k as f64 * h).collect();
        let (nt, nl, nm) = (taus.len(), lambdas.len(), mus.len());

        let a = Array2::from_shape_fn((nt, nm), |(i, k)| c.phi_hat(taus[i] - mus[k]));
        let b = Array2::from_shape_fn((nm, nl), |(k, j)| c.phi_hat(mus[k] - lambdas[j]));
        let hb = Array2::from_shape_fn((nm, nl), |(k, j)| c.hilbert_phi_hat(mus[k] - lambdas[j]));

        let w_pv: Vec<f64> = mus.iter().map(|&u| if u == 0.0 { 0.0 } else { h / u }).collect();
        let w1: Vec<f64> = mus.iter().map(|&u| h * c.hilbert_eta_hat(u / p) / p).collect();
        let w2: Vec<f64> = mus.iter().map(|&u| h * eta_hat(u / p) / p.abs()).collect();

        // PV ∫ φ̂(τ-μ)φ̂(μ-λ)/μ
        let mut pv = a.dot(&scale_rows(&b, &w_pv));
        for (i, &t) in taus.iter().enumerate() {
            for (j, &l) in lambdas.iter().enumerate() {
                let dg = -c.phi_hat_derivative(t) * c.phi_hat(-l)
                    + c.phi_hat(t) * c.phi_hat_derivative(-l);
                pv[[i, j]] += h * dg;
            }
        }
        let t1 = a.dot(&scale_rows(&b, &w1));
        let t2 = a.dot(&scale_rows(&hb, &w2));
        let ik = Array2::from_shape_fn((nt, nl), |(i, j)| {
            pv[[i, j]] - c.phi_hat(taus[i]) * c.hilbert_phi_hat(lambdas[j])
        });

        // ∫_0^1 (g(ν) - g(-ν))/ν and (1/Φ)∫_{-1}^1 g Hη̂(μ/Φ)
        let gl = GaussLegendre::gl32();
        let half: Vec<(f64, f64)> = gl.mapped(0.0, 1.0).collect();
        let full: Vec<(f64, f64)> = gl.mapped(-1.0, 1.0).collect();
        let side = |nodes: &[(f64, f64)], sign: f64| {
            (
                Array2::from_shape_fn((nt, nodes.len()), |(i, q)| c.phi_hat(taus[i] - sign * nodes[q].0)),
                Array2::from_shape_fn((nodes.len(), nl), |(q, j)| c.phi_hat(sign * nodes[q].0 - lambdas[j])),
            )
        };
        let wq: Vec<f64> = half.iter().map(|&(v, w)| w / v).collect();
        let (ap, bp) = side(&half, 1.0);
        let (an, bn) = side(&half, -1.0);
        let inner_g = ap.dot(&scale_rows(&bp, &wq)) - an.dot(&scale_rows(&bn, &wq));
        let (az, bz) = side(&full, 1.0);
        let wz: Vec<f64> = full.iter().map(|&(v, w)| w * c.hilbert_eta_hat(v / p) / p).collect();
        let q = az.dot(&scale_rows(&bz, &wz));

        let j_outer = &pv - &inner_g;
        let mut kb = Array2::zeros((nt, nl));
        let mut k0 = Array2::zeros((nt, nl));
        let mut kp = Array2::zeros((nt, nl));
        for i in 0..nt {
            for j in 0..nl {
                let pieces = super::KbPieces {
                    i1: ik[[i, j]] - j_outer[[i, j]],
                    i2: -q[[i, j]],
                    i3: j_outer[[i, j]] - (t1[[i, j]] - q[[i, j]]),
                    i4: -t2[[i, j]],
                    i5: 0.0,
                };
                kb[[i, j]] = ik[[i, j]] - t1[[i, j]] - t2[[i, j]];
                let (a0, a1) = pieces.split(taus[i], lambdas[j], p);
                k0[[i, j]] = a0;
                kp[[i, j]] = a1;
            }
        }
        let kg = &t1 + &t2;
        Ok(Self {
            phi,
            taus: taus.to_vec(),
            lambdas: lambdas.to_vec(),
            // K = -i (iK)
            k: to_complex(&(-&ik), true),
            kg: to_complex(&kg, false),
            kb: to_complex(&kb, false),
            k0: to_complex(&k0, false),
            kplus: to_complex(&kp, false),
        })
    }

    pub fn values(&self, kind: KernelKind) -> &Array2<Complex64> {
        match kind {
            KernelKind::K | KernelKind::KDecay => &self.k,
            KernelKind::KG => &self.kg,
            KernelKind::KB => &self.kb,
            KernelKind::K0 => &self.k0,
            KernelKind::KPlus => &self.kplus,
        }
    }

    fn rows(&self, kind: KernelKind, alpha: f64) -> impl Iterator<Item = (f64, f64, Complex64, f64)> + '_ {
        let v = self.values(kind);
        let p = self.phi as f64;
        self.taus.iter().enumerate().flat_map(move |(i, &t)| {
            self.lambdas
                .iter()
                .enumerate()
                .map(move |(j, &l)| (t, l, v[[i, j]], kind.bound(t, l, p, alpha)))
        })
    }

    /// `max |kernel| / bound` over the grid.
    pub fn empirical_constant(&self, kind: KernelKind, alpha: f64) -> EmpiricalConstant {
        let mut best = EmpiricalConstant {
            kind,
            phi: kind.depends_on_phi().then_some(self.phi),
            points: 0,
            constant: 0.0,
            tau: f64::NAN,
            lambda: f64::NAN,
            all_finite: true,
        };
        for (t, l, v, b) in self.rows(kind, alpha) {
            best.points += 1;
            let r = v.norm() / b;
            if !r.is_finite() {
                best.all_finite = false;
                continue;
            }
            if r > best.constant || best.tau.is_nan() {
                best.constant = r;
                best.tau = t;
                best.lambda = l;
            }
        }
        best
    }

    /// CSV with columns `tau,lambda,phi,re,im,bound_value,ratio`.
    pub fn write_csv<W: Write>(&self, kind: KernelKind, alpha: f64, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tau", "lambda", "phi", "re", "im", "bound_value", "ratio"])?;
        for (t, l, v, b) in self.rows(kind, alpha) {
            w.write_record([
                t.to_string(),
                l.to_string(),
                self.phi.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                b.to_string(),
                (v.norm() / b).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConstant {
    pub kind: KernelKind,
    pub phi: Option<i64>,
    pub points: usize,
    pub constant: f64,
    /// Location of the maximum.
    pub tau: f64,
    pub lambda: f64,
    pub all_finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub kind: KernelKind,
    pub phi: Option<i64>,
    pub coarse: EmpiricalConstant,
    pub fine: EmpiricalConstant,
    pub relative_change: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

fn entry(coarse: EmpiricalConstant, fine: EmpiricalConstant, tol: f64) -> SweepEntry {
    let relative_change = (fine.constant - coarse.constant).abs() / coarse.constant;
    let pass = coarse.all_finite
        && fine.all_finite
        && coarse.constant.is_finite()
        && fine.constant.is_finite()
        && relative_change <= tol;
    SweepEntry {
        kind: coarse.kind,
        phi: coarse.phi,
        coarse,
        fine,
        relative_change,
        pass,
    }
}

/// Runs every kernel against its bound at each Φ on the coarse grid and on
/// the grid with half the step.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    if cfg.phis.is_empty() {
        return Ok(SweepReport {
            config: cfg.clone(),
            entries: vec![],
        });
    }
    let coarse_grid = uniform_grid(cfg.extent, cfg.step);
    let fine_grid = uniform_grid(cfg.extent, cfg.step / 2.0);
    let mut entries = Vec::new();
    for (idx, &phi) in cfg.phis.iter().enumerate() {
        let coarse = KernelGrid::compute(&coarse_grid, &coarse_grid, phi, cfg.mu_step)?;
        let fine = KernelGrid::compute(&fine_grid, &fine_grid, phi, cfg.mu_step)?;
        for kind in KernelKind::ALL {
            if !kind.depends_on_phi() && idx > 0 {
                continue;
            }
            entries.push(entry(
                coarse.empirical_constant(kind, cfg.alpha),
                fine.empirical_constant(kind, cfg.alpha),
                cfg.stability,
            ));
        }
    }
    Ok(SweepReport {
        config: cfg.clone(),
        entries,
    })
}
