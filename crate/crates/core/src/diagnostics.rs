//! Chain diagnostics and posterior reporting: summaries with seasonal
//! deltas, autocorrelation, effective sample size, binned density grids,
//! and tolerance sensitivity.

use serde::{Deserialize, Serialize};

use crate::abc::{threshold_filter, PosteriorDraw, Prior};
use crate::error::{Error, Result};
use crate::sis::PARAM_NAMES;

/// Sample statistics of one parameter's marginal posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamStats {
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub median: f64,
    pub q975: f64,
}

/// Per-family differences of posterior means, winter minus summer — the
/// orientation that makes a positive recovery delta mean "recovery is
/// faster in winter".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonalDeltas {
    pub recovery: f64,
    pub near: f64,
    pub far: f64,
}

/// Posterior summary across all six parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorReport {
    pub n_draws: usize,
    /// Per-parameter statistics in the documented column order.
    pub params: [ParamStats; 6],
    pub deltas: SeasonalDeltas,
}

/// Linear-interpolation quantile of a sorted sample.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let position = q * (sorted.len() - 1) as f64;
    let lo = position.floor() as usize;
    let hi = position.ceil() as usize;
    sorted[lo] + (position - lo as f64) * (sorted[hi] - sorted[lo])
}

fn stats(values: &mut [f64]) -> ParamStats {
    // Sorting first canonicalizes the summation order, so the report is
    // bitwise identical under any permutation of the draws.
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    ParamStats {
        mean,
        sd: var.sqrt(),
        q025: quantile(values, 0.025),
        median: quantile(values, 0.5),
        q975: quantile(values, 0.975),
    }
}

/// Sample mean, spread, and central quantiles per parameter, plus the
/// winter−summer deltas of the means.
pub fn posterior_summary(draws: &[PosteriorDraw]) -> Result<PosteriorReport> {
    if draws.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "posterior summary needs at least 2 draws, got {}",
            draws.len()
        )));
    }
    let per_param: Vec<ParamStats> = (0..6)
        .map(|p| {
            let mut values: Vec<f64> = draws.iter().map(|d| d.params.to_array()[p]).collect();
            stats(&mut values)
        })
        .collect();
    let params: [ParamStats; 6] = per_param.try_into().unwrap();
    let deltas = SeasonalDeltas {
        recovery: params[1].mean - params[0].mean,
        near: params[3].mean - params[2].mean,
        far: params[5].mean - params[4].mean,
    };
    Ok(PosteriorReport { n_draws: draws.len(), params, deltas })
}

/// Plain-text rendering of a [`PosteriorReport`], the body of the CLI's
/// summary file.
pub fn report_to_text(report: &PosteriorReport) -> String {
    let mut out = format!("draws: {}\n", report.n_draws);
    out.push_str("parameter,mean,sd,q2.5,median,q97.5\n");
    for (name, s) in PARAM_NAMES.iter().zip(&report.params) {
        out.push_str(&format!(
            "{name},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            s.mean, s.sd, s.q025, s.median, s.q975
        ));
    }
    let d = &report.deltas;
    out.push_str(&format!(
        "delta_winter_minus_summer: recovery {:+.6}, near {:+.6}, far {:+.6}\n",
        d.recovery, d.near, d.far
    ));
    out
}

/// Autocorrelation at lags `0..=max_lag`, the standard biased estimator
/// (denominator `n`, shared sample mean). Lag 0 is exactly 1.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if series.len() <= max_lag {
        return Err(Error::InvalidInput(format!(
            "series of length {} cannot support lag {max_lag}",
            series.len()
        )));
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(Error::Numeric("autocorrelation of a constant series: zero variance".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            let num: f64 = (0..n - k).map(|t| (series[t] - mean) * (series[t + k] - mean)).sum();
            num / denom
        })
        .collect())
}

/// Effective sample size: `n / (1 + 2·Σ ρ_k)`, summing lag correlations
/// while they stay positive and truncating at the first non-positive lag.
pub fn effective_sample_size(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InvalidInput("effective sample size needs at least 3 points".into()));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(Error::Numeric(
            "effective sample size of a constant series: zero variance".into(),
        ));
    }
    let mut tail = 0.0;
    for k in 1..n {
        let rho: f64 =
            (0..n - k).map(|t| (series[t] - mean) * (series[t + k] - mean)).sum::<f64>() / denom;
        if rho <= 0.0 {
            break;
        }
        tail += rho;
    }
    Ok(n as f64 / (1.0 + 2.0 * tail))
}

/// One pairwise panel of the density grid: probability mass on a
/// `bins × bins` lattice over parameters `i` (rows) and `j` (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGrid {
    pub param_i: usize,
    pub param_j: usize,
    /// Row-major, `mass[bi * bins + bj]`; sums to 1.
    pub mass: Vec<f64>,
}

/// Binned posterior densities: one histogram per parameter and one 2-D
/// histogram per parameter pair, each normalized to unit mass. Grid bounds
/// are the prior bounds, so panels from different runs line up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub bins: usize,
    pub lower: [f64; 6],
    pub upper: [f64; 6],
    pub marginals: Vec<Vec<f64>>,
    pub pairwise: Vec<PairGrid>,
}

pub fn pairwise_density_grid(
    draws: &[PosteriorDraw],
    bins: usize,
    prior: &Prior,
) -> Result<DensityGrid> {
    if draws.is_empty() {
        return Err(Error::InvalidInput("density grid needs at least one draw".into()));
    }
    if bins < 2 {
        return Err(Error::InvalidInput("density grid needs at least 2 bins".into()));
    }
    let (lower, upper) = (prior.lower(), prior.upper());
    let bin_of = |p: usize, v: f64| -> usize {
        let scaled = (v - lower[p]) / (upper[p] - lower[p]) * bins as f64;
        (scaled.floor() as usize).min(bins - 1)
    };
    let weight = 1.0 / draws.len() as f64;
    let mut marginals = vec![vec![0.0; bins]; 6];
    let mut pairwise: Vec<PairGrid> = (0..6)
        .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
        .map(|(i, j)| PairGrid { param_i: i, param_j: j, mass: vec![0.0; bins * bins] })
        .collect();
    for draw in draws {
        let values = draw.params.to_array();
        let cells: Vec<usize> = (0..6).map(|p| bin_of(p, values[p])).collect();
        for p in 0..6 {
            marginals[p][cells[p]] += weight;
        }
        for panel in pairwise.iter_mut() {
            panel.mass[cells[panel.param_i] * bins + cells[panel.param_j]] += weight;
        }
    }
    Ok(DensityGrid { bins, lower, upper, marginals, pairwise })
}

/// Posterior behaviour as the tolerance tightens: retained counts and
/// summaries per filter tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceRow {
    pub epsilon: f64,
    pub retained: usize,
    /// `None` when fewer than 2 draws survive the filter.
    pub report: Option<PosteriorReport>,
}

/// Applies [`threshold_filter`] at each tolerance of a descending list and
/// summarizes the surviving draws.
pub fn tolerance_sensitivity(
    draws: &[PosteriorDraw],
    epsilons: &[f64],
    generation_epsilon: f64,
) -> Result<Vec<ToleranceRow>> {
    if epsilons.is_empty() {
        return Err(Error::InvalidInput("tolerance list is empty".into()));
    }
    if epsilons.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput("tolerance list must be sorted descending".into()));
    }
    epsilons
        .iter()
        .map(|&eps| {
            let kept = threshold_filter(draws, eps, generation_epsilon)?;
            Ok(ToleranceRow {
                epsilon: eps,
                retained: kept.len(),
                report: posterior_summary(&kept).ok(),
            })
        })
        .collect()
}
