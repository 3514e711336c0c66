//! Posterior predictive forecasting: per-node infection probabilities under
//! season-override and node-clearing what-if scenarios.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::month::{Month, Season};
use crate::net::{Network, NodeId};
use crate::nodeset::NodeSet;
use crate::rng::Rng;
use crate::sis::{ensemble_counts, summarize_counts, EnsembleSummary, ParamSet};

/// Default Monte-Carlo replicates per forecast: standard error ≤ 0.005 on
/// probabilities near one half.
pub const DEFAULT_REPLICATES: usize = 10_000;

/// Which season's parameters drive each forecast step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeasonMode {
    /// Follow the calendar: each step uses its source month's season.
    Calendar,
    /// Every step uses the summer parameters.
    AllSummer,
    /// Every step uses the winter parameters.
    AllWinter,
}

impl fmt::Display for SeasonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeasonMode::Calendar => "calendar",
            SeasonMode::AllSummer => "all-summer",
            SeasonMode::AllWinter => "all-winter",
        })
    }
}

impl FromStr for SeasonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "calendar" => Ok(SeasonMode::Calendar),
            "all-summer" => Ok(SeasonMode::AllSummer),
            "all-winter" => Ok(SeasonMode::AllWinter),
            other => Err(Error::Parse(format!(
                "unknown season mode {other:?}, expected calendar, all-summer or all-winter"
            ))),
        }
    }
}

/// A what-if forecast configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub season_mode: SeasonMode,
    /// Nodes removed from the epidemic for the whole forecast, on top of
    /// the unplanted ones.
    pub cleared_nodes: Vec<NodeId>,
    /// Number of monthly steps to simulate, ≥ 1.
    pub horizon: usize,
    pub start_month: Month,
    /// Infection state at month 0, typically the last observed snapshot.
    pub initial: NodeSet,
}

impl Scenario {
    fn validate(&self, network: &Network) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::InvalidInput("forecast horizon must be at least 1".into()));
        }
        for id in &self.cleared_nodes {
            if id.index() >= network.node_count() {
                return Err(Error::NodeOutOfRange(id.0, network.node_count()));
            }
        }
        if self.initial.capacity() != network.node_count() {
            return Err(Error::InvalidInput(format!(
                "scenario initial state covers {} nodes, network has {}",
                self.initial.capacity(),
                network.node_count()
            )));
        }
        Ok(())
    }

    fn step_seasons(&self, months: &[Month]) -> Vec<Season> {
        let steps = months.len() - 1;
        match self.season_mode {
            SeasonMode::Calendar => months[..steps].iter().map(|m| m.season()).collect(),
            SeasonMode::AllSummer => vec![Season::Summer; steps],
            SeasonMode::AllWinter => vec![Season::Winter; steps],
        }
    }
}

/// Monte-Carlo posterior forecast: infection frequencies per node and month,
/// plus the bookkeeping needed to group and report them.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    pub summary: EnsembleSummary,
    /// Month-0 state after removing excluded nodes; frequencies at month 0
    /// are exactly this indicator.
    pub initial: NodeSet,
    /// Unplanted plus scenario-cleared nodes, frozen susceptible throughout.
    pub excluded: NodeSet,
}

/// How a node enters forecast reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeGroup {
    PreviouslyInfected,
    PreviouslyUninfected,
    Excluded,
}

impl NodeGroup {
    pub fn label(self) -> &'static str {
        match self {
            NodeGroup::PreviouslyInfected => "infected-at-start",
            NodeGroup::PreviouslyUninfected => "susceptible-at-start",
            NodeGroup::Excluded => "excluded",
        }
    }
}

impl Forecast {
    pub fn probability(&self, node: usize, t: usize) -> f64 {
        self.summary.frequency[node][t]
    }

    pub fn months(&self) -> &[Month] {
        &self.summary.months
    }

    /// Group of each node by its month-0 status.
    pub fn node_groups(&self) -> Vec<NodeGroup> {
        (0..self.summary.frequency.len())
            .map(|node| {
                if self.excluded.contains(node) {
                    NodeGroup::Excluded
                } else if self.initial.contains(node) {
                    NodeGroup::PreviouslyInfected
                } else {
                    NodeGroup::PreviouslyUninfected
                }
            })
            .collect()
    }
}

/// Simulates `replicates` trajectories under the scenario, each from a
/// posterior draw sampled uniformly with replacement, and reports per-cell
/// infection frequencies. Month 0 reproduces the initial state exactly.
pub fn posterior_forecast(
    network: &Network,
    draws: &[ParamSet],
    scenario: &Scenario,
    replicates: usize,
    master_seed: u64,
) -> Result<Forecast> {
    if draws.is_empty() {
        return Err(Error::InvalidInput("forecast needs at least one posterior draw".into()));
    }
    if replicates < 1 {
        return Err(Error::InvalidInput("forecast needs at least one replicate".into()));
    }
    scenario.validate(network)?;
    let months = scenario.start_month.sequence(scenario.horizon + 1);
    let step_seasons = scenario.step_seasons(&months);
    let mut excluded = network.unplanted();
    for id in &scenario.cleared_nodes {
        excluded.insert(id.index());
    }
    let counts = ensemble_counts(
        network,
        &{
            let mut extra = NodeSet::new(network.node_count());
            for id in &scenario.cleared_nodes {
                extra.insert(id.index());
            }
            extra
        },
        &scenario.initial,
        &step_seasons,
        replicates,
        master_seed,
        &|_run, rng: &mut Rng| draws[rng.random_range(0..draws.len())],
    );
    let mut initial = scenario.initial.clone();
    initial.subtract(&excluded);
    Ok(Forecast { summary: summarize_counts(&counts, replicates, months), initial, excluded })
}

/// One-month forecast with nodes grouped by their starting status, the
/// shape of a next-month infectivity map.
#[derive(Debug, Clone, PartialEq)]
pub struct OneMonthMap {
    pub forecast: Forecast,
    pub groups: Vec<NodeGroup>,
}

impl OneMonthMap {
    /// Next-month infection probability of a node.
    pub fn probability(&self, node: usize) -> f64 {
        self.forecast.summary.frequency[node][1]
    }
}

/// Horizon-1 specialization of [`posterior_forecast`] with group labels.
pub fn one_month_map(
    network: &Network,
    draws: &[ParamSet],
    initial: &NodeSet,
    month: Month,
    cleared_nodes: &[NodeId],
    replicates: usize,
    master_seed: u64,
) -> Result<OneMonthMap> {
    let scenario = Scenario {
        season_mode: SeasonMode::Calendar,
        cleared_nodes: cleared_nodes.to_vec(),
        horizon: 1,
        start_month: month,
        initial: initial.clone(),
    };
    let forecast = posterior_forecast(network, draws, &scenario, replicates, master_seed)?;
    let groups = forecast.node_groups();
    Ok(OneMonthMap { forecast, groups })
}

/// Per-node and network-averaged probability differences between two
/// forecasts of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison {
    pub months: Vec<Month>,
    /// `delta[node][t]` = variant probability − baseline probability.
    pub delta: Vec<Vec<f64>>,
    /// Mean delta per month over nodes excluded in neither forecast.
    pub mean_delta: Vec<f64>,
}

pub fn compare_scenarios(baseline: &Forecast, variant: &Forecast) -> Result<ScenarioComparison> {
    if baseline.summary.months != variant.summary.months
        || baseline.summary.frequency.len() != variant.summary.frequency.len()
    {
        return Err(Error::InvalidInput(
            "scenario comparison needs matching months and node counts".into(),
        ));
    }
    let node_count = baseline.summary.frequency.len();
    let snapshots = baseline.summary.months.len();
    let delta: Vec<Vec<f64>> = (0..node_count)
        .map(|node| {
            (0..snapshots)
                .map(|t| variant.summary.frequency[node][t] - baseline.summary.frequency[node][t])
                .collect()
        })
        .collect();
    let remaining: Vec<usize> = (0..node_count)
        .filter(|&n| !baseline.excluded.contains(n) && !variant.excluded.contains(n))
        .collect();
    if remaining.is_empty() {
        return Err(Error::InvalidInput("no nodes remain in both scenarios".into()));
    }
    let mean_delta = (0..snapshots)
        .map(|t| remaining.iter().map(|&n| delta[n][t]).sum::<f64>() / remaining.len() as f64)
        .collect();
    Ok(ScenarioComparison { months: baseline.summary.months.clone(), delta, mean_delta })
}

/// Mean infection probability over planted, uncleared nodes at the final
/// forecast month — the steady-state estimate for scenario comparisons.
pub fn steady_state_mean(forecast: &Forecast) -> f64 {
    let last = forecast.summary.months.len() - 1;
    let included: Vec<usize> =
        (0..forecast.summary.frequency.len()).filter(|&n| !forecast.excluded.contains(n)).collect();
    included.iter().map(|&n| forecast.summary.frequency[n][last]).sum::<f64>()
        / included.len() as f64
}

/// Renders a forecast as CSV: one row per node and month.
pub fn forecast_to_csv(forecast: &Forecast) -> String {
    let groups = forecast.node_groups();
    let mut out = String::from("node,month_label,group,probability,sd,q05,q95\n");
    for (node, group) in groups.iter().enumerate() {
        for (t, month) in forecast.summary.months.iter().enumerate() {
            out.push_str(&format!(
                "{node},{month},{},{},{},{},{}\n",
                group.label(),
                forecast.summary.frequency[node][t],
                forecast.summary.sd[node][t],
                forecast.summary.q05[node][t],
                forecast.summary.q95[node][t],
            ));
        }
    }
    out
}
