//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string; the native
//! functions behind them are usable without a JavaScript host.

use mkdv_core::dynamics::{evolve, IntegratorConfig, Model, ModelKind};
use mkdv_core::harness::divisor_count_near;
use mkdv_core::kernels::KernelKind;
use mkdv_core::spectral::{mass, momentum, to_physical};
use mkdv_core::{Complex64, SpectralField};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Physical samples per profile.
const PROFILE_POINTS: usize = 128;

/// Evolves the two-mode datum `a₁e^{ik₁x} + a₂e^{ik₂x}` and returns the
/// real part of the profile, the mass and the momentum at `frames + 1`
/// evenly spaced times.
#[allow(clippy::too_many_arguments)]
pub fn simulate_json(
    model: &str,
    k1: i64,
    a1: f64,
    k2: i64,
    a2: f64,
    n_max: usize,
    dt: f64,
    t_end: f64,
    frames: usize,
) -> Result<String, String> {
    let model: Model = model.parse().map_err(|e| format!("{e}"))?;
    if frames == 0 || n_max == 0 || n_max > 64 {
        return Err("frames must be positive and n_max in 1..=64".into());
    }
    let mut modes = vec![(k1, Complex64::new(a1, 0.0))];
    if k2 == k1 {
        modes[0].1 += a2;
    } else {
        modes.push((k2, Complex64::new(a2, 0.0)));
    }
    let u0 = SpectralField::from_modes(n_max, &modes).map_err(|e| e.to_string())?;
    let steps = (t_end / dt).round().max(1.0) as usize;
    let cfg = IntegratorConfig::new(dt, t_end, n_max).record_every((steps / frames).max(1));
    let tr = evolve(&u0, ModelKind::plus(model), &cfg).map_err(|e| e.to_string())?;
    let grid = PROFILE_POINTS.max(2 * n_max + 1);
    let profiles = tr
        .states
        .iter()
        .map(|s| to_physical(s, grid).map(|v| v.iter().map(|z| z.re).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "times": tr.times,
        "mass": tr.states.iter().map(mass).collect::<Vec<_>>(),
        "momentum": tr.states.iter().map(momentum).collect::<Vec<_>>(),
        "profiles": profiles,
    })
    .to_string())
}

/// `|kernel|` and its bound along `τ ∈ [tau_min, tau_max]` at fixed `λ`, `Φ`.
pub fn kernel_slice_json(
    kind: &str,
    lambda: f64,
    phi: i64,
    tau_min: f64,
    tau_max: f64,
    count: usize,
    alpha: f64,
) -> Result<String, String> {
    let kind = KernelKind::ALL
        .into_iter()
        .find(|k| k.name() == kind)
        .ok_or_else(|| format!("unknown kernel {kind}"))?;
    if !(2..=2000).contains(&count) || tau_max <= tau_min {
        return Err("need 2..=2000 points on a nonempty interval".into());
    }
    let mut taus = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    let mut bounds = Vec::with_capacity(count);
    for i in 0..count {
        let tau = tau_min + (tau_max - tau_min) * i as f64 / (count - 1) as f64;
        let v = kind.evaluate(tau, lambda, phi).map_err(|e| e.to_string())?;
        taus.push(tau);
        values.push(v.norm());
        bounds.push(kind.bound(tau, lambda, phi as f64, alpha));
    }
    Ok(json!({ "tau": taus, "abs": values, "bound": bounds }).to_string())
}

/// Divisors `d` of `k` with `|d - q| ≤ ρ`, with the reference `ρ^{1/2}`.
pub fn divisor_json(k: i64, q: i64, rho: f64) -> Result<String, String> {
    if k.unsigned_abs() > 1_000_000_000_000 {
        return Err("|k| above 10^12".into());
    }
    let count = divisor_count_near(k, q, rho).map_err(|e| e.to_string())?;
    Ok(json!({ "count": count, "sqrt_rho": rho.sqrt() }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    model: &str,
    k1: i32,
    a1: f64,
    k2: i32,
    a2: f64,
    n_max: u32,
    dt: f64,
    t_end: f64,
    frames: u32,
) -> Result<String, JsValue> {
    js(simulate_json(model, k1 as i64, a1, k2 as i64, a2, n_max as usize, dt, t_end, frames as usize))
}

#[wasm_bindgen]
pub fn kernel_slice(
    kind: &str,
    lambda: f64,
    phi: i32,
    tau_min: f64,
    tau_max: f64,
    count: u32,
    alpha: f64,
) -> Result<String, JsValue> {
    js(kernel_slice_json(kind, lambda, phi as i64, tau_min, tau_max, count as usize, alpha))
}

#[wasm_bindgen]
pub fn divisors(k: f64, q: f64, rho: f64) -> Result<String, JsValue> {
    js(divisor_json(k as i64, q as i64, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn simulate_keeps_mass() {
        let out: Value = serde_json::from_str(&simulate_json("mkdv2", 1, 0.5, -2, 0.3, 4, 1e-3, 0.1, 5).unwrap()).unwrap();
        let m = out["mass"].as_array().unwrap();
        assert_eq!(m.len(), 6);
        let m0 = m[0].as_f64().unwrap();
        assert!((m0 - 0.34).abs() < 1e-12);
        assert!(m.iter().all(|x| (x.as_f64().unwrap() - m0).abs() < 1e-9));
        assert_eq!(out["profiles"][0].as_array().unwrap().len(), PROFILE_POINTS);
    }

    #[test]
    fn simulate_rejects_bad_input() {
        assert!(simulate_json("kdv", 1, 1.0, 2, 0.0, 4, 1e-3, 0.1, 5).is_err());
        assert!(simulate_json("mkdv", 9, 1.0, 2, 0.0, 4, 1e-3, 0.1, 5).is_err());
        assert!(simulate_json("mkdv", 1, 1.0, 2, 0.0, 4, 1e-3, 0.1, 0).is_err());
    }

    #[test]
    fn same_mode_twice_adds() {
        let out: Value = serde_json::from_str(&simulate_json("linear", 2, 0.5, 2, 0.5, 4, 1e-2, 0.1, 1).unwrap()).unwrap();
        assert!((out["mass"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_slice_shapes() {
        let out: Value = serde_json::from_str(&kernel_slice_json("kg", 1.0, 24, -10.0, 10.0, 11, 0.5).unwrap()).unwrap();
        assert_eq!(out["tau"].as_array().unwrap().len(), 11);
        assert!(out["bound"].as_array().unwrap().iter().all(|b| b.as_f64().unwrap() > 0.0));
        assert!(kernel_slice_json("kq", 1.0, 24, -10.0, 10.0, 11, 0.5).is_err());
    }

    #[test]
    fn divisor_example() {
        let out: Value = serde_json::from_str(&divisor_json(12, 3, 1.0).unwrap()).unwrap();
        // 2, 3 and 4 divide 12
        assert_eq!(out["count"], 3);
    }
}
