//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each exported function has a plain Rust counterpart returning
//! `Result<_, String>` so the numerics can be tested natively.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use sis_core::coherent::{CoherentState, Truncation};
use sis_core::family::FamilyConfig;
use sis_core::functional::{ZSpec, ZVariant};
use sis_core::measure::{distribution_w, MeasureCase};
use sis_core::position::{uncertainty, wavepacket, Grid};
use sis_core::{Complex64, ETA};
use wasm_bindgen::prelude::*;

/// Oscillator box used by the wavepacket panel.
pub const BOX: (f64, f64) = (-10.0, 10.0);

fn preset(name: &str) -> Result<(FamilyConfig, ZSpec), String> {
    let pt = || FamilyConfig::type_a(0.5 * ETA, 1.0, 0.5 * ETA, 0.0, 0.0);
    let scaling = || FamilyConfig::self_similar(1.0, 0.5, 1.0);
    let pair = match name {
        "oscillator" => (FamilyConfig::type_d(ETA, 0.0), ZSpec::constant(1.0)),
        "disk" => (FamilyConfig::type_c(-3.0 * ETA, 1.0, 0.0), ZSpec::new(ZVariant::TypeCG, 0.0)),
        "poschlTeller" => (pt(), ZSpec::new(ZVariant::TypeAPT1, 0.0)),
        "barutGirardello" => (pt(), ZSpec::new(ZVariant::TypeABG, 0.0)),
        "whittaker" => (pt(), ZSpec::new(ZVariant::TypeAWhittaker { sigma: 0.5 }, 0.0)),
        "scaling" => (scaling(), ZSpec::new(ZVariant::SsR, 0.0)),
        "ramanujan" => (scaling(), ZSpec::new(ZVariant::SsRamanujan { c: 0.3 }, 0.0)),
        other => return Err(format!("unknown preset '{other}'")),
    };
    Ok((pair.0.map_err(|e| e.to_string())?, pair.1))
}

/// |cₙ|² of the coherent state with label z for one of the preset families.
pub fn coefficient_probabilities(preset_name: &str, re: f64, im: f64) -> Result<Vec<f64>, String> {
    let (cfg, zs) = preset(preset_name)?;
    let s = CoherentState::build(&cfg, &zs, Complex64::new(re, im), Truncation::Auto).map_err(|e| e.to_string())?;
    Ok(s.probabilities())
}

fn packet_grid(npoints: usize) -> Result<Grid, String> {
    Grid::new(BOX.0, BOX.1, npoints).map_err(|e| e.to_string())
}

fn packet(re: f64, im: f64, t: f64, npoints: usize) -> Result<sis_core::position::GridFn, String> {
    let (cfg, zs) = preset("oscillator")?;
    let s = CoherentState::build(&cfg, &zs, Complex64::new(re, im), Truncation::Auto).map_err(|e| e.to_string())?;
    wavepacket(&s.evolve(t, 1.0), &packet_grid(npoints)?).map_err(|e| e.to_string())
}

/// |Ψ(x, t)|² of the oscillator coherent wavepacket on `npoints` points of [−8, 8].
pub fn packet_density(re: f64, im: f64, t: f64, npoints: usize) -> Result<Vec<f64>, String> {
    Ok(packet(re, im, t, npoints)?.values.iter().map(|v| v.norm_sqr()).collect())
}

/// [⟨x⟩, ⟨p⟩, Δx, Δp] of the same wavepacket.
pub fn packet_moments(re: f64, im: f64, t: f64, npoints: usize) -> Result<Vec<f64>, String> {
    let u = uncertainty(&packet(re, im, t, npoints)?);
    Ok(vec![u.mean_x, u.mean_p, u.dx, u.dp])
}

/// 𝒲(ρ) of a reference measure on npoints interior points of (0, rho_max).
pub fn measure_values(case: &str, rho_max: f64, npoints: usize) -> Result<Vec<f64>, String> {
    let mc = MeasureCase::reference_catalog()
        .into_iter()
        .find(|m| m.name() == case)
        .ok_or_else(|| format!("unknown measure '{case}'"))?;
    if !(rho_max > 0.0) || npoints < 2 {
        return Err("need rho_max > 0 and at least two points".into());
    }
    let top = rho_max.min(mc.domain_end());
    (1..=npoints)
        .map(|i| {
            let rho = top * i as f64 / (npoints + 1) as f64;
            distribution_w(&mc, rho).map_err(|e| e.to_string())
        })
        .collect()
}

#[wasm_bindgen]
pub fn coefficient_distribution(preset_name: &str, re: f64, im: f64) -> Result<Vec<f64>, JsValue> {
    coefficient_probabilities(preset_name, re, im).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn wavepacket_density(re: f64, im: f64, t: f64, npoints: usize) -> Result<Vec<f64>, JsValue> {
    packet_density(re, im, t, npoints).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn wavepacket_moments(re: f64, im: f64, t: f64, npoints: usize) -> Result<Vec<f64>, JsValue> {
    packet_moments(re, im, t, npoints).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn measure_curve(case: &str, rho_max: f64, npoints: usize) -> Result<Vec<f64>, JsValue> {
    measure_values(case, rho_max, npoints).map_err(|e| JsValue::from_str(&e))
}
