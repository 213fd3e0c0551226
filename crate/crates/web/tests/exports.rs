use mkdv_web::{divisor_json, kernel_slice_json, simulate_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn linear_profile_is_a_travelling_cosine() {
    let out = parse(simulate_json("linear", 2, 0.7, 3, 0.0, 4, 1e-3, 0.5, 5).unwrap());
    let times = out["times"].as_array().unwrap();
    let profiles = out["profiles"].as_array().unwrap();
    for (t, prof) in times.iter().zip(profiles) {
        let t = t.as_f64().unwrap();
        let prof = prof.as_array().unwrap();
        let m = prof.len() as f64;
        for (j, v) in prof.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * j as f64 / m;
            let exact = 0.7 * (2.0 * x + 8.0 * t).cos();
            assert!((v.as_f64().unwrap() - exact).abs() < 1e-12);
        }
    }
}

#[test]
fn original_flow_conserves_momentum() {
    let out = parse(simulate_json("mkdv", 1, 0.6, -2, 0.5, 8, 5e-4, 0.5, 10).unwrap());
    let p: Vec<f64> = out["momentum"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(p.iter().all(|x| (x - p[0]).abs() < 1e-8));
}

#[test]
fn kernel_slice_stays_below_a_bounded_multiple() {
    let out = parse(kernel_slice_json("kb", 2.0, 6, -20.0, 20.0, 41, 0.5).unwrap());
    let abs = out["abs"].as_array().unwrap();
    let bound = out["bound"].as_array().unwrap();
    let worst = abs
        .iter()
        .zip(bound)
        .map(|(a, b)| a.as_f64().unwrap() / b.as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(worst.is_finite() && worst < 10.0, "{worst}");
}

#[test]
fn divisor_count_window() {
    // divisors of 720720 in [90, 110]: 90, 91, 99, 104, 105, 110
    let out = parse(divisor_json(720_720, 100, 10.0).unwrap());
    assert_eq!(out["count"], 6);
    assert!(divisor_json(0, 1, 1.0).is_err());
    assert!(divisor_json(i64::MAX, 1, 1.0).is_err());
}
