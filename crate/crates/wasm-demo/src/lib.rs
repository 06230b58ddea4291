//! Browser bindings: SVP trajectories, random-instance runs and observable spectra.
//!
//! Every export returns a JSON string so the page can stay framework-free.

use falqon_core::algorithms::{run, Algorithm, RunConfig, Trajectory};
use falqon_core::experiments::SvpVariant;
use falqon_core::observable::{alpha_interval, build_qc, problem_diagonal, ObservableSpec};
use falqon_core::oracle::{brute_force, Landscape};
use falqon_core::problem::{random_instance, svp_instance};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Browser runs are single-threaded; keep the state vector small.
pub const MAX_DEMO_QUBITS: usize = 14;
pub const MAX_DEMO_LAYERS: usize = 5000;

#[derive(Serialize)]
struct TrajectoryView {
    qubits: usize,
    theta: Vec<f64>,
    lyapunov: Vec<f64>,
    success_prob: Vec<f64>,
    approx_ratio: Vec<Option<f64>>,
    argmax: String,
    decoded: Vec<u8>,
    monotone: bool,
    final_probabilities: Vec<f64>,
}

impl From<Trajectory> for TrajectoryView {
    fn from(t: Trajectory) -> Self {
        Self {
            qubits: t.n_qubits,
            theta: t.records.iter().map(|r| r.theta).collect(),
            lyapunov: t.records.iter().map(|r| r.lyapunov).collect(),
            success_prob: t.records.iter().map(|r| r.success_prob).collect(),
            approx_ratio: t.records.iter().map(|r| r.approx_ratio).collect(),
            argmax: t.argmax_bits(),
            decoded: t.decoded(),
            monotone: t.is_monotone(1e-9),
            final_probabilities: t.final_probabilities,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn check_layers(layers: usize) -> Result<(), String> {
    if layers == 0 || layers > MAX_DEMO_LAYERS {
        return Err(format!("layers must be in 1..={MAX_DEMO_LAYERS}"));
    }
    Ok(())
}

/// Trajectory of one SVP variant with its published settings.
pub fn svp_trajectory_json(variant: &str, layers: usize) -> Result<String, String> {
    check_layers(layers)?;
    let v: SvpVariant = serde_json::from_value(serde_json::Value::String(variant.into()))
        .map_err(|_| format!("unknown variant `{variant}`"))?;
    let t = run(&svp_instance(), &v.config(layers)).map_err(|e| e.to_string())?;
    to_json(&TrajectoryView::from(t))
}

/// FALQON-IC with deflation on a seeded random instance with one IC constraint.
pub fn random_trajectory_json(
    n: usize,
    seed: u64,
    dt: f64,
    layers: usize,
    gamma: f64,
) -> Result<String, String> {
    check_layers(layers)?;
    if !(2..=MAX_DEMO_QUBITS).contains(&n) {
        return Err(format!("n must be in 2..={MAX_DEMO_QUBITS}"));
    }
    let p = random_instance(n, 1, seed).map_err(|e| e.to_string())?;
    let cfg = RunConfig::new(
        Algorithm::FalqonIc,
        ObservableSpec::deflation(vec![gamma]),
        dt,
        layers,
    );
    let t = run(&p, &cfg).map_err(|e| e.to_string())?;
    to_json(&TrajectoryView::from(t))
}

#[derive(Serialize)]
struct SpectrumView {
    labels: Vec<String>,
    cost: Vec<f64>,
    observable: Vec<f64>,
    feasible: Vec<bool>,
    optimal: Vec<usize>,
    argmin: usize,
    alpha_interval: Option<(f64, f64)>,
}

/// Diagonals of `H_P` and of the chosen observable for the SVP instance
/// (`seed` = None) or a random instance whose IC sits at the cheapest outcome.
pub fn observable_spectrum_json(
    variant: &str,
    parameter: f64,
    n: usize,
    seed: Option<u64>,
) -> Result<String, String> {
    let err = |e: falqon_core::Error| e.to_string();
    let p = match seed {
        None => svp_instance(),
        Some(s) => {
            if !(2..=10).contains(&n) {
                return Err("n must be in 2..=10".into());
            }
            let mut p = random_instance(n, 1, s).map_err(err)?;
            // Put the IC on the cheapest outcome so every variant applies.
            let d = problem_diagonal(&p, n).map_err(err)?;
            p.invalid_configs = vec![falqon_core::bits::bits_of(d.argmin(), n)];
            p.validate().map_err(err)?;
            p
        }
    };
    let spec = match variant {
        "deflation" => ObservableSpec::deflation(vec![parameter]),
        "folded_spectrum" => ObservableSpec::folded_spectrum(parameter),
        other => {
            return Err(format!(
                "unknown variant `{other}`; expected deflation or folded_spectrum"
            ))
        }
    };
    let qc = build_qc(&p, &spec).map_err(err)?;
    let land = Landscape::new(&p).map_err(err)?;
    let summary = brute_force(&p).map_err(err)?;
    to_json(&SpectrumView {
        labels: (0..1usize << p.n)
            .map(|j| falqon_core::bits::bitstring(j, p.n))
            .collect(),
        cost: land.costs.clone(),
        observable: qc.diag.diag.clone(),
        feasible: land.feasible.clone(),
        optimal: land.optimal_indices(summary.e_f_min),
        argmin: qc.diag.argmin(),
        alpha_interval: alpha_interval(&summary).ok(),
    })
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = svpTrajectory)]
pub fn svp_trajectory(variant: &str, layers: usize) -> Result<String, JsError> {
    js(svp_trajectory_json(variant, layers))
}

#[wasm_bindgen(js_name = randomTrajectory)]
pub fn random_trajectory(
    n: usize,
    seed: u32,
    dt: f64,
    layers: usize,
    gamma: f64,
) -> Result<String, JsError> {
    js(random_trajectory_json(n, seed as u64, dt, layers, gamma))
}

/// `seed < 0` selects the SVP instance.
#[wasm_bindgen(js_name = observableSpectrum)]
pub fn observable_spectrum(
    variant: &str,
    parameter: f64,
    n: usize,
    seed: i32,
) -> Result<String, JsError> {
    js(observable_spectrum_json(
        variant,
        parameter,
        n,
        (seed >= 0).then_some(seed as u64),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: Result<String, String>) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn svp_deflation_reaches_the_optimum() {
        let v = parse(svp_trajectory_json("deflation", 400));
        assert_eq!(v["argmax"], "100");
        assert_eq!(v["theta"].as_array().unwrap().len(), 400);
        assert_eq!(v["monotone"], true);
    }

    #[test]
    fn bad_inputs_are_reported() {
        assert!(svp_trajectory_json("nope", 10).is_err());
        assert!(svp_trajectory_json("deflation", 0).is_err());
        assert!(random_trajectory_json(20, 0, 0.01, 10, 8.0).is_err());
        assert!(observable_spectrum_json("penalty_ic", 3.0, 3, None).is_err());
    }

    #[test]
    fn random_run_has_requested_shape() {
        let v = parse(random_trajectory_json(5, 7, 0.01, 50, 8.0));
        assert_eq!(v["qubits"], 5);
        assert_eq!(v["success_prob"].as_array().unwrap().len(), 50);
    }

    #[test]
    fn svp_spectra_match_known_diagonals() {
        let v = parse(observable_spectrum_json("deflation", 3.0, 3, None));
        assert_eq!(
            v["observable"],
            serde_json::json!([3.0, 5.0, 2.0, 9.0, 1.0, 6.0, 3.0, 10.0])
        );
        assert_eq!(v["argmin"], 4);
        assert_eq!(v["alpha_interval"], serde_json::json!([0.5, 1.5]));
        let fs = parse(observable_spectrum_json("folded_spectrum", 1.3, 3, None));
        assert_eq!(fs["argmin"], 4);
    }

    #[test]
    fn random_spectrum_argmin_is_optimal() {
        for seed in 0..5 {
            let v = parse(observable_spectrum_json("deflation", 100.0, 6, Some(seed)));
            let optimal: Vec<u64> = serde_json::from_value(v["optimal"].clone()).unwrap();
            assert!(optimal.contains(&v["argmin"].as_u64().unwrap()));
        }
    }
}
