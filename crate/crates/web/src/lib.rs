//! Browser bindings: sector spectra with Juddian points overlaid, the
//! Juddian search itself, and compatibility-determinant curves. Every export
//! returns a JSON string so the page needs no generated type glue.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tprh::crossings::{scan, ScanConfig, Truncation};
use tprh::juddian::{baseline, determinant, find_all_points, RootSearch};
use tprh::{ModelParams, Result};

/// The page works in rescaled units, so ω only fixes the physical scale.
const OMEGA: f64 = 0.5;
/// Largest cut-off the page may request; keeps a single call interactive.
pub const MAX_N_MAX: usize = 800;
/// Largest order offered by the page.
pub const MAX_ORDER: usize = 12;

fn params(omega_tilde: f64) -> Result<ModelParams> {
    ModelParams::from_rescaled(OMEGA, omega_tilde, 0.0)
}

fn check_order(n_lo: usize, n_hi: usize) -> Result<()> {
    if n_lo < 2 || n_lo > n_hi || n_hi > MAX_ORDER {
        return Err(tprh::Error::InvalidParameter(format!(
            "orders must satisfy 2 <= a <= b <= {MAX_ORDER}, got {n_lo},{n_hi}"
        )));
    }
    Ok(())
}

/// Sector levels on a λ grid plus the Juddian points and baselines of
/// orders up to `max_order` inside the window.
pub fn spectrum_value(
    omega_tilde: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    grid: usize,
    levels: usize,
    n_max: usize,
    max_order: usize,
) -> Result<Value> {
    if n_max > MAX_N_MAX {
        return Err(tprh::Error::InvalidParameter(format!("n_max is capped at {MAX_N_MAX}")));
    }
    check_order(2, max_order)?;
    let base = params(omega_tilde)?;
    let config = ScanConfig {
        params: base,
        window: (lambda_lo, lambda_hi),
        grid,
        levels,
        truncation: Truncation::Fixed(n_max),
    };
    let table = scan(&config)?;
    let sectors: Vec<Value> = table
        .sectors
        .iter()
        .enumerate()
        .map(|(s, label)| {
            // Transpose to one curve per level.
            let curves: Vec<Vec<f64>> = (0..levels)
                .map(|l| table.levels[s][..].iter().map(|at| at[l]).collect())
                .collect();
            json!({ "M": label.m.as_i8(), "k": label.k.value(), "label": label.to_string(), "levels": curves })
        })
        .collect();

    let search = RootSearch {
        window: (lambda_lo.max(1e-4), lambda_hi),
        ..RootSearch::default()
    };
    let points: Vec<Value> = find_all_points(2..=max_order, &base, &search)?
        .iter()
        .map(|p| json!({ "N": p.order, "lambda": p.lambda, "energy_tilde": p.energy_tilde }))
        .collect();
    let baselines: Vec<Value> = (2..=max_order)
        .map(|n| {
            let curve: Result<Vec<f64>> = table.lambdas.iter().map(|&l| baseline(n, l)).collect();
            curve.map(|c| json!({ "N": n, "energy_tilde": c }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "omega_tilde": omega_tilde,
        "n_max": table.n_max,
        "lambdas": table.lambdas,
        "sectors": sectors,
        "juddian": points,
        "baselines": baselines,
    }))
}

/// Juddian points of orders `n_lo..=n_hi` with their ansatz coefficients.
pub fn juddian_value(omega_tilde: f64, n_lo: usize, n_hi: usize) -> Result<Value> {
    check_order(n_lo, n_hi)?;
    let base = params(omega_tilde)?;
    let points = find_all_points(n_lo..=n_hi, &base, &RootSearch::default())?;
    Ok(json!(points
        .iter()
        .map(|p| json!({
            "N": p.order,
            "lambda": p.lambda,
            "g": p.g,
            "energy_tilde": p.energy_tilde,
            "energy": p.energy,
            "p": p.p,
            "q": p.q,
            "determinant_residual": p.determinant_residual,
        }))
        .collect::<Vec<_>>()))
}

/// The compatibility determinant of order `N` on a λ grid over `(0, 1/2)`,
/// with the sign changes that mark Juddian points.
pub fn determinant_value(order: usize, omega_tilde: f64, samples: usize) -> Result<Value> {
    check_order(order, order)?;
    if samples < 2 {
        return Err(tprh::Error::InvalidParameter("need at least two samples".into()));
    }
    let (lo, hi) = RootSearch::default().window;
    let lambdas: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let values: Vec<f64> = lambdas
        .iter()
        .map(|&l| determinant(order, omega_tilde, l))
        .collect::<Result<_>>()?;
    let sign_changes = values.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    Ok(json!({ "N": order, "lambdas": lambdas, "values": values, "sign_changes": sign_changes }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn spectrum(
    omega_tilde: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    grid: usize,
    levels: usize,
    n_max: usize,
    max_order: usize,
) -> std::result::Result<String, JsError> {
    to_js(spectrum_value(omega_tilde, lambda_lo, lambda_hi, grid, levels, n_max, max_order))
}

#[wasm_bindgen]
pub fn juddian(omega_tilde: f64, n_lo: usize, n_hi: usize) -> std::result::Result<String, JsError> {
    to_js(juddian_value(omega_tilde, n_lo, n_hi))
}

#[wasm_bindgen]
pub fn compatibility(order: usize, omega_tilde: f64, samples: usize) -> std::result::Result<String, JsError> {
    to_js(determinant_value(order, omega_tilde, samples))
}
