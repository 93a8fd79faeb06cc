//! Browser bindings for the three-state walk. Distributions are returned as
//! `[P(-steps-1), ..., P(steps+1)]`.

use qw3::analysis::sigma_of;
use qw3::coin::{amplitude_damping_kraus, grover_coin, phase_damping_kraus, Spinor};
use qw3::density::{density_distribution, from_pure, step_channel};
use qw3::stochastic::{monte_carlo, McConfig, NoiseModel};
use qw3::walk::{
    initial_state, localized_coin, nonlocalized_coin, position_distribution, step_pure,
};
use wasm_bindgen::prelude::*;

/// Density evolution cost grows with steps², so the page caps it.
pub const MAX_DENSITY_STEPS: usize = 200;
pub const MAX_STEPS: usize = 1000;
pub const MAX_RUNS: usize = 2000;

fn coin_state(name: &str) -> Result<Spinor, String> {
    match name {
        "localized" => Ok(localized_coin()),
        "nonlocalized" => Ok(nonlocalized_coin()),
        other => Err(format!("unknown initial coin {other:?}")),
    }
}

fn check_steps(steps: usize, max: usize) -> Result<(), String> {
    if steps == 0 || steps > max {
        return Err(format!("steps must be in 1..={max}, got {steps}"));
    }
    Ok(())
}

/// Coherent Grover walk.
pub fn coherent(initial_coin: &str, steps: usize) -> Result<Vec<f64>, String> {
    check_steps(steps, MAX_STEPS)?;
    let coin = grover_coin();
    let mut state =
        initial_state(coin_state(initial_coin)?, steps + 1).map_err(|e| e.to_string())?;
    for _ in 0..steps {
        state = step_pure(&state, &coin).map_err(|e| e.to_string())?;
    }
    Ok(position_distribution(&state).probs().to_vec())
}

/// Walk under the phase-damping or amplitude-damping channel.
pub fn damped(
    channel: &str,
    gamma: f64,
    initial_coin: &str,
    steps: usize,
) -> Result<Vec<f64>, String> {
    check_steps(steps, MAX_DENSITY_STEPS)?;
    let ks = match channel {
        "phase" => phase_damping_kraus(gamma),
        "amplitude" => amplitude_damping_kraus(gamma),
        other => return Err(format!("unknown channel {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    let coin = grover_coin();
    let mut rho =
        from_pure(&initial_state(coin_state(initial_coin)?, steps + 1).map_err(|e| e.to_string())?);
    for _ in 0..steps {
        rho = step_channel(&rho, &coin, &ks).map_err(|e| e.to_string())?;
    }
    Ok(density_distribution(&rho).probs().to_vec())
}

/// Mean distribution over `runs` broken-link trajectories.
pub fn broken_links(
    p: f64,
    runs: usize,
    initial_coin: &str,
    steps: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    check_steps(steps, MAX_STEPS)?;
    if runs == 0 || runs > MAX_RUNS {
        return Err(format!("runs must be in 1..={MAX_RUNS}, got {runs}"));
    }
    let ensemble = monte_carlo(&McConfig {
        runs,
        steps,
        model: NoiseModel::BrokenLinks { p },
        initial_coin: coin_state(initial_coin)?,
        master_seed: seed,
    })
    .map_err(|e| e.to_string())?;
    Ok(ensemble.distribution.probs().to_vec())
}

/// Standard deviation of a distribution laid out as returned above.
pub fn spread(probs: &[f64]) -> f64 {
    let half = probs.len() / 2;
    let dist = qw3::walk::PositionDistribution::from_probs(probs.to_vec(), half.saturating_sub(1));
    sigma_of(&dist)
}

#[wasm_bindgen(js_name = coherentDistribution)]
pub fn coherent_js(initial_coin: &str, steps: usize) -> Result<Vec<f64>, JsError> {
    coherent(initial_coin, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = dampedDistribution)]
pub fn damped_js(
    channel: &str,
    gamma: f64,
    initial_coin: &str,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    damped(channel, gamma, initial_coin, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = brokenLinksDistribution)]
pub fn broken_links_js(
    p: f64,
    runs: usize,
    initial_coin: &str,
    steps: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    broken_links(p, runs, initial_coin, steps, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sigma(probs: &[f64]) -> f64 {
    spread(probs)
}
