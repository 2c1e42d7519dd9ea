//! wasm-bindgen entry points for the browser demo in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string; the page parses
//! it and draws on a canvas. The `*_json` functions hold the logic so they can
//! be tested natively.

use consensus_lab::graph::Family;
use consensus_lab::scaling::{critical_n_vs_q, find_critical_n, SweepSpec};
use consensus_lab::sim::{integrate, SimConfig};
use consensus_lab::stability::{assess, Gains, Mode};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest network the page may request; dense eigen-solves grow as N³.
pub const MAX_NODES: usize = 200;
/// Plotted points per trajectory.
const PLOT_POINTS: usize = 400;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn family(tag: &str, q: usize, seed: u64) -> Result<Family, String> {
    let (r, d) = if tag == "toric_lattice" {
        (1, 2)
    } else {
        (1, 1)
    };
    Family::from_tag(tag, q, r, d, seed, 1.0).map_err(err)
}

fn mode(leader: bool) -> Mode {
    if leader {
        Mode::Leader { index: 0 }
    } else {
        Mode::Leaderless
    }
}

fn check_nodes(n: usize) -> Result<(), String> {
    if n > MAX_NODES {
        return Err(format!("N is capped at {} in the browser", MAX_NODES));
    }
    Ok(())
}

/// `λ₂` (or grounded `λ₁`) and the stability verdict for every size in
/// `n_min..=n_max`, plus the first unstable size.
pub fn lambda2_curve_json(
    tag: &str,
    q: usize,
    gains: &[f64],
    n_min: usize,
    n_max: usize,
    leader: bool,
) -> Result<String, String> {
    check_nodes(n_max)?;
    let gains = Gains::new(gains.to_vec()).map_err(err)?;
    let spec = SweepSpec::new(family(tag, q, 1)?, gains, n_min, n_max).with_mode(mode(leader));
    let res = find_critical_n(&spec).map_err(err)?;
    serde_json::to_string(&res).map_err(err)
}

/// `N̄` on the fuzz path for each neighborhood size in `qs` and each order in
/// `orders`; order `n` uses the first `n` gains.
pub fn critical_table_json(
    qs: &[usize],
    orders: &[usize],
    gains: &[f64],
    n_max: usize,
) -> Result<String, String> {
    check_nodes(n_max)?;
    let gains = Gains::new(gains.to_vec()).map_err(err)?;
    let table = critical_n_vs_q(qs, orders, &gains, n_max, 1).map_err(err)?;
    serde_json::to_string(&table).map_err(err)
}

#[derive(Serialize)]
struct Trajectories {
    times: Vec<f64>,
    /// Position of each agent relative to agent 0, one series per agent.
    offsets: Vec<Vec<f64>>,
    metric: Vec<f64>,
    classification: &'static str,
    growth_rate: f64,
    stopped_early: bool,
    system_stable: bool,
}

/// Integrates the closed loop and returns downsampled position offsets.
pub fn simulate_json(
    tag: &str,
    q: usize,
    n: usize,
    gains: &[f64],
    horizon: f64,
    seed: u64,
    leader: bool,
) -> Result<String, String> {
    check_nodes(n)?;
    let gains = Gains::new(gains.to_vec()).map_err(err)?;
    let graph = family(tag, q, seed)?.generate(n).map_err(err)?;
    let mode = mode(leader);
    let report = assess(&gains, &graph, mode).map_err(err)?;
    let cfg = SimConfig {
        mode,
        horizon,
        ..SimConfig::new(gains, graph, seed)
    };
    let trace = integrate(&cfg).map_err(err)?;
    let stride = trace.times.len().div_ceil(PLOT_POINTS).max(1);
    let picks: Vec<usize> = (0..trace.times.len()).step_by(stride).collect();
    let reference = |idx: usize| match mode {
        Mode::Leaderless => trace.value(idx, 0, 0),
        Mode::Leader { .. } => 0.0,
    };
    let out = Trajectories {
        times: picks.iter().map(|&i| trace.times[i]).collect(),
        offsets: (0..n)
            .map(|agent| {
                picks
                    .iter()
                    .map(|&i| trace.value(i, agent, 0) - reference(i))
                    .collect()
            })
            .collect(),
        metric: picks.iter().map(|&i| trace.metric[i]).collect(),
        classification: trace.classification.tag(),
        growth_rate: trace.growth_rate,
        stopped_early: trace.stopped_early,
        system_stable: report.system_stable,
    };
    serde_json::to_string(&out).map_err(err)
}

/// Library version, shown in the page footer.
pub fn version_json() -> String {
    json!({ "version": env!("CARGO_PKG_VERSION") }).to_string()
}

#[wasm_bindgen]
pub fn lambda2_curve(
    family: &str,
    q: usize,
    gains: Vec<f64>,
    n_min: usize,
    n_max: usize,
    leader: bool,
) -> Result<String, JsValue> {
    lambda2_curve_json(family, q, &gains, n_min, n_max, leader).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn critical_table(
    qs: Vec<usize>,
    orders: Vec<usize>,
    gains: Vec<f64>,
    n_max: usize,
) -> Result<String, JsValue> {
    critical_table_json(&qs, &orders, &gains, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(
    family: &str,
    q: usize,
    n: usize,
    gains: Vec<f64>,
    horizon: f64,
    seed: u64,
    leader: bool,
) -> Result<String, JsValue> {
    simulate_json(family, q, n, &gains, horizon, seed, leader).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn version() -> String {
    version_json()
}
