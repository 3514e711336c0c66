//! Browser bindings for the demo page. The bundled fixture scenario is
//! compiled into the module and exposed as three JSON-in/JSON-out
//! operations — simulate, infer, forecast — each deterministic in the seed
//! passed from the page. The `*_impl` functions are plain Rust so the
//! native test suite covers them; the exported wrappers only translate
//! errors for JavaScript.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use plantsis::abc::{self, AbcContext, Prior};
use plantsis::fixtures;
use plantsis::forecast::{self, Scenario};
use plantsis::net::{NodeId, ObservationSeries};
use plantsis::nodeset::NodeSet;
use plantsis::sis::{ParamSet, Simulator, PARAM_NAMES};
use plantsis::{Error, Result};

/// Prior box used by the in-browser inference, matching the bundled run
/// configuration.
const PRIOR_LOWER: [f64; 6] = [0.0; 6];
const PRIOR_UPPER: [f64; 6] = [0.45, 0.45, 0.15, 0.15, 0.02, 0.02];

/// Bins per parameter in the posterior marginal histograms.
const HISTOGRAM_BINS: usize = 24;

fn to_js(err: Error) -> JsError {
    JsError::new(&err.to_string())
}

fn bad_json(what: &str, err: serde_json::Error) -> Error {
    Error::InvalidInput(format!("{what}: {err}"))
}

fn month_labels(series: &ObservationSeries) -> Vec<String> {
    series.months().iter().map(|m| m.to_string()).collect()
}

fn snapshot_lists(series: &ObservationSeries) -> Vec<Vec<usize>> {
    series.snapshots().iter().map(|s| s.iter().collect()).collect()
}

#[derive(Serialize)]
struct SeriesJson {
    months: Vec<String>,
    /// Infected node indices per month.
    snapshots: Vec<Vec<usize>>,
}

fn series_json(series: &ObservationSeries) -> SeriesJson {
    SeriesJson { months: month_labels(series), snapshots: snapshot_lists(series) }
}

#[derive(Serialize)]
struct DescribeJson {
    rows: usize,
    cols: usize,
    node_count: usize,
    unplanted: Vec<usize>,
    initial: Vec<usize>,
    edges: Vec<(u32, u32)>,
    param_names: [&'static str; 6],
    true_params: [f64; 6],
    prior_lower: [f64; 6],
    prior_upper: [f64; 6],
    observed: SeriesJson,
}

fn describe_impl() -> Result<String> {
    let network = fixtures::fixture_network();
    let observed = fixtures::synthetic_training_series();
    let out = DescribeJson {
        rows: fixtures::ROWS,
        cols: fixtures::COLS,
        node_count: network.node_count(),
        unplanted: fixtures::UNPLANTED.to_vec(),
        initial: fixtures::SEED_NODES.to_vec(),
        edges: network.edges().iter().map(|&(u, v)| (u.0, v.0)).collect(),
        param_names: PARAM_NAMES,
        true_params: fixtures::synthetic_params().to_array(),
        prior_lower: PRIOR_LOWER,
        prior_upper: PRIOR_UPPER,
        observed: series_json(&observed),
    };
    serde_json::to_string(&out).map_err(|e| Error::Numeric(e.to_string()))
}

/// The fixture network, ground-truth parameters, prior box, and observed
/// snapshots, so the page can draw everything without duplicating data.
#[wasm_bindgen]
pub fn describe() -> std::result::Result<String, JsError> {
    describe_impl().map_err(to_js)
}

fn simulate_impl(params_json: &str, horizon: u32, seed: u32) -> Result<String> {
    let values: [f64; 6] = serde_json::from_str(params_json).map_err(|e| bad_json("params", e))?;
    let params = ParamSet::from_array(values)?;
    if !(1..=600).contains(&horizon) {
        return Err(Error::InvalidInput(format!(
            "horizon must be between 1 and 600 months, got {horizon}"
        )));
    }
    let network = fixtures::fixture_network();
    let initial = NodeSet::from_indices(network.node_count(), fixtures::SEED_NODES);
    let sim = Simulator::new(&network, params);
    let mut rng = plantsis::rng::task_rng(seed as u64, 0);
    let trajectory = sim.simulate(&initial, fixtures::start_month(), horizon as usize, &mut rng)?;
    serde_json::to_string(&series_json(&trajectory)).map_err(|e| Error::Numeric(e.to_string()))
}

/// One forward run on the fixture network from the usual six seed nodes.
/// `params_json` is the six rates as a JSON array in the documented order.
#[wasm_bindgen]
pub fn simulate(
    params_json: &str,
    horizon: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    simulate_impl(params_json, horizon, seed).map_err(to_js)
}

#[derive(Serialize)]
struct InferJson {
    attempted: u64,
    accepted: usize,
    acceptance_rate: f64,
    epsilon: f64,
    /// Posterior mean per parameter; empty when nothing was accepted.
    means: Vec<f64>,
    draws: Vec<[f64; 6]>,
    /// Normalized marginal histogram per parameter over the prior range.
    histograms: Vec<Vec<f64>>,
}

fn infer_impl(attempts: u32, epsilon: f64, seed: u32) -> Result<String> {
    if attempts == 0 || attempts > 200_000 {
        return Err(Error::InvalidInput(format!(
            "attempts must be between 1 and 200000, got {attempts}"
        )));
    }
    let network = fixtures::fixture_network();
    let observed = fixtures::synthetic_training_series();
    let ctx = AbcContext::new(&network, &observed)?;
    let prior = Prior::new(PRIOR_LOWER, PRIOR_UPPER)?;
    let result = abc::rejection_sample(&ctx, &prior, attempts as u64, epsilon, seed as u64)?;
    let draws: Vec<[f64; 6]> = result.draws.iter().map(|d| d.params.to_array()).collect();
    let means = if draws.is_empty() {
        Vec::new()
    } else {
        (0..6).map(|p| draws.iter().map(|d| d[p]).sum::<f64>() / draws.len() as f64).collect()
    };
    let histograms = (0..6)
        .map(|p| {
            let mut mass = vec![0.0; HISTOGRAM_BINS];
            let width = (PRIOR_UPPER[p] - PRIOR_LOWER[p]) / HISTOGRAM_BINS as f64;
            for d in &draws {
                let bin = ((d[p] - PRIOR_LOWER[p]) / width) as usize;
                mass[bin.min(HISTOGRAM_BINS - 1)] += 1.0;
            }
            if !draws.is_empty() {
                for m in &mut mass {
                    *m /= draws.len() as f64;
                }
            }
            mass
        })
        .collect();
    let out = InferJson {
        attempted: result.attempted,
        accepted: draws.len(),
        acceptance_rate: result.acceptance_rate,
        epsilon,
        means,
        draws,
        histograms,
    };
    serde_json::to_string(&out).map_err(|e| Error::Numeric(e.to_string()))
}

/// ABC rejection sampling against the bundled observed snapshots under the
/// demo prior box. Returns the accepted draws plus marginal histograms.
#[wasm_bindgen]
pub fn infer(attempts: u32, epsilon: f64, seed: u32) -> std::result::Result<String, JsError> {
    infer_impl(attempts, epsilon, seed).map_err(to_js)
}

#[derive(Serialize)]
struct ForecastJson {
    months: Vec<String>,
    /// Mean infection probability over planted nodes, per month.
    mean: Vec<f64>,
    /// Infection probability per month, then node.
    per_node: Vec<Vec<f64>>,
    steady_state_mean: f64,
}

fn forecast_impl(
    draws_json: &str,
    season_mode: &str,
    cleared_json: &str,
    horizon: u32,
    replicates: u32,
    seed: u32,
) -> Result<String> {
    let arrays: Vec<[f64; 6]> =
        serde_json::from_str(draws_json).map_err(|e| bad_json("draws", e))?;
    let params: Vec<ParamSet> =
        arrays.into_iter().map(ParamSet::from_array).collect::<Result<_>>()?;
    let cleared: Vec<u32> =
        serde_json::from_str(cleared_json).map_err(|e| bad_json("cleared", e))?;
    if !(1..=120).contains(&horizon) {
        return Err(Error::InvalidInput(format!(
            "horizon must be between 1 and 120 months, got {horizon}"
        )));
    }
    if !(1..=20_000).contains(&replicates) {
        return Err(Error::InvalidInput(format!(
            "replicates must be between 1 and 20000, got {replicates}"
        )));
    }
    let network = fixtures::fixture_network();
    let observed = fixtures::synthetic_training_series();
    let last = observed.snapshot_count() - 1;
    let scenario = Scenario {
        season_mode: season_mode.parse()?,
        cleared_nodes: cleared.into_iter().map(NodeId).collect(),
        horizon: horizon as usize,
        start_month: observed.months()[last],
        initial: observed.snapshot(last).clone(),
    };
    let result = forecast::posterior_forecast(
        &network,
        &params,
        &scenario,
        replicates as usize,
        seed as u64,
    )?;
    let months: Vec<String> = result.months().iter().map(|m| m.to_string()).collect();
    let planted: Vec<usize> =
        (0..network.node_count()).filter(|&n| network.is_planted(NodeId(n as u32))).collect();
    let per_node: Vec<Vec<f64>> = (0..months.len())
        .map(|t| (0..network.node_count()).map(|n| result.probability(n, t)).collect())
        .collect();
    let mean = (0..months.len())
        .map(|t| {
            planted.iter().map(|&n| result.probability(n, t)).sum::<f64>() / planted.len() as f64
        })
        .collect();
    let out = ForecastJson {
        months,
        mean,
        per_node,
        steady_state_mean: forecast::steady_state_mean(&result),
    };
    serde_json::to_string(&out).map_err(|e| Error::Numeric(e.to_string()))
}

/// Posterior predictive forecast from the last observed snapshot under a
/// what-if scenario: `season_mode` is calendar | all-summer | all-winter,
/// `cleared_json` lists node indices cleared and replanted at month 0,
/// `draws_json` is the parameter draws array returned by `infer`.
#[wasm_bindgen]
pub fn forecast(
    draws_json: &str,
    season_mode: &str,
    cleared_json: &str,
    horizon: u32,
    replicates: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    forecast_impl(draws_json, season_mode, cleared_json, horizon, replicates, seed).map_err(to_js)
}
