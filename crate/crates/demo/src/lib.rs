//! Browser bindings: coefficient tables, growth fits and boundary-layer profiles.
//!
//! Every export returns a JSON string; errors surface as JS exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use tunnel_orders::asymptotics::{
    boundary_layer_profile, fit_growth, predict_energy, FitOptions, Symmetry, Target,
};
use tunnel_orders::expansion::expand;
use tunnel_orders::geometry::{action_integrals, find_turning_point, singularity_amplitude};
use tunnel_orders::scenario::{preset, validate_scenario, ValidatedScenario};
use tunnel_orders::Result;

/// Largest order the page may request; keeps exact arithmetic interactive.
pub const MAX_K: usize = 60;

#[derive(Serialize)]
pub struct Coefficient {
    pub k: usize,
    pub exact: String,
    pub value: f64,
    /// `E^(k+1) / (k E^(k))`, tending to `1 / A0`.
    pub ratio: Option<f64>,
}

#[derive(Serialize)]
pub struct Comparison {
    pub formula: &'static str,
    pub predicted: [f64; 3],
    pub fitted: [f64; 3],
    pub uncertainty: [f64; 3],
    pub low_confidence: bool,
    pub notes: Vec<String>,
}

fn scenario(name: &str, n: u32, k: usize) -> Result<ValidatedScenario> {
    let mut s = preset(name, Some(n))?;
    s.k_max = k.clamp(1, MAX_K);
    s.m_trunc = 2 * s.k_max + 2;
    validate_scenario(s)
}

pub fn coefficient_table(name: &str, n: u32, k: usize) -> Result<Vec<Coefficient>> {
    let r = expand(&scenario(name, n, k)?)?;
    let values: Vec<f64> = r.energies.iter().map(|e| e.to_f64()).collect();
    Ok(r.energies
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let k = i + 1;
            let ratio = values
                .get(i + 1)
                .filter(|_| values[i] != 0.0)
                .map(|next| next / (k as f64 * values[i]));
            Coefficient {
                k,
                exact: e.to_string(),
                value: values[i],
                ratio,
            }
        })
        .collect())
}

pub fn compare_growth(name: &str, n: u32, k: usize) -> Result<Comparison> {
    let s = scenario(name, n, k)?;
    let tp = find_turning_point(&s)?;
    let act = action_integrals(&s, &tp)?;
    let b = singularity_amplitude(&s, &tp, &act)?;
    let pred = predict_energy(&s, &tp, &act, b)?;
    let r = expand(&s)?;
    let opts = FitOptions {
        exponent_hint: Some(pred.nu),
        pinned: Some((pred.a0, pred.nu)),
        ..FitOptions::default()
    };
    let fit = fit_growth(Target::Energy, &r.energies, 1, &opts)?;
    let mut notes = pred.notes.clone();
    notes.extend(fit.notes.iter().cloned());
    Ok(Comparison {
        formula: pred.formula_id.describe(),
        predicted: [pred.a0, pred.nu, pred.prefactor],
        fitted: [fit.a0.value, fit.nu.value, fit.prefactor.value],
        uncertainty: [
            fit.a0.uncertainty,
            fit.nu.uncertainty,
            fit.prefactor.uncertainty,
        ],
        low_confidence: fit.low_confidence,
        notes,
    })
}

fn js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Energy coefficients `E^(k)` and their growth ratios.
#[wasm_bindgen]
pub fn coefficients(name: &str, n: u32, k: usize) -> std::result::Result<String, JsError> {
    js(coefficient_table(name, n, k))
}

/// Fitted `(A0, nu, prefactor)` next to the predicted values.
#[wasm_bindgen]
pub fn growth(name: &str, n: u32, k: usize) -> std::result::Result<String, JsError> {
    js(compare_growth(name, n, k))
}

/// Boundary-layer profile `g(z)`, normalized to tend to 1.
#[wasm_bindgen]
pub fn profile(
    n: u32,
    symmetric: bool,
    z_max: f64,
    points: usize,
) -> std::result::Result<String, JsError> {
    let symmetry = if symmetric {
        Symmetry::Symmetric
    } else {
        Symmetry::Asymmetric
    };
    js(boundary_layer_profile(n, symmetry, z_max, points.min(400)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_table() {
        let t = coefficient_table("cubic", 1, 10).unwrap();
        assert_eq!(t[0].exact, "-11/8");
        assert!(t.last().unwrap().ratio.is_none());
    }

    #[test]
    fn growth_matches() {
        let c = compare_growth("cubic", 1, 30).unwrap();
        assert!((c.fitted[0] / c.predicted[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn order_is_clamped() {
        assert_eq!(coefficient_table("harmonic", 1, 500).unwrap().len(), MAX_K);
    }
}
