//! Seasonal SIS dynamics on the plantation network.
//!
//! Time advances in monthly steps. At each step, taken synchronously from
//! the state at `t`:
//!
//! - every infected node recovers with the seasonal recovery probability;
//! - every susceptible, non-cleared node becomes infected with probability
//!   `1 − (1−θ_near)^m · (1−θ_far)^f`, where `m` counts its infected
//!   neighbors and `f` the remaining infected nodes — one independent
//!   Bernoulli attempt per infected contact;
//! - a node that recovers in a step cannot be reinfected in that step;
//! - cleared nodes (unplanted, or removed in a what-if scenario) stay
//!   susceptible forever.
//!
//! The season of a step is the season of the source month: the events
//! happen during the month leading up to the next inspection.

use serde::{Deserialize, Serialize};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::month::{Month, Season};
use crate::net::{Network, ObservationSeries};
use crate::nodeset::NodeSet;
use crate::rng::{map_tasks, task_rng, Rng};

/// A simulated trajectory has exactly the shape of an observed series: one
/// infection snapshot per month.
pub type Trajectory = ObservationSeries;

/// Column order for parameter vectors in files and reports.
pub const PARAM_NAMES: [&str; 6] = [
    "recovery_summer",
    "recovery_winter",
    "near_summer",
    "near_winter",
    "far_summer",
    "far_winter",
];

/// The six model parameters: recovery, neighbor infectivity, and
/// long-distance infectivity, each split by season.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub recovery_summer: f64,
    pub recovery_winter: f64,
    pub near_summer: f64,
    pub near_winter: f64,
    pub far_summer: f64,
    pub far_winter: f64,
}

impl ParamSet {
    pub fn new(
        recovery_summer: f64,
        recovery_winter: f64,
        near_summer: f64,
        near_winter: f64,
        far_summer: f64,
        far_winter: f64,
    ) -> Result<Self> {
        let set = ParamSet {
            recovery_summer,
            recovery_winter,
            near_summer,
            near_winter,
            far_summer,
            far_winter,
        };
        set.validate()?;
        Ok(set)
    }

    /// All six components must be probabilities.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in PARAM_NAMES.iter().zip(self.to_array()) {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {value} is not a probability in [0,1]"
                )));
            }
        }
        Ok(())
    }

    /// Components in the documented column order.
    pub fn to_array(self) -> [f64; 6] {
        [
            self.recovery_summer,
            self.recovery_winter,
            self.near_summer,
            self.near_winter,
            self.far_summer,
            self.far_winter,
        ]
    }

    pub fn from_array(values: [f64; 6]) -> Result<Self> {
        ParamSet::new(values[0], values[1], values[2], values[3], values[4], values[5])
    }

    pub fn recovery(&self, season: Season) -> f64 {
        match season {
            Season::Summer => self.recovery_summer,
            Season::Winter => self.recovery_winter,
        }
    }

    pub fn near(&self, season: Season) -> f64 {
        match season {
            Season::Summer => self.near_summer,
            Season::Winter => self.near_winter,
        }
    }

    pub fn far(&self, season: Season) -> f64 {
        match season {
            Season::Summer => self.far_summer,
            Season::Winter => self.far_winter,
        }
    }
}

/// Per-season lookup tables so the inner loop does no exponentiation.
struct SeasonTables {
    recovery: f64,
    /// `(1−θ_near)^m` for every possible infected-neighbor count.
    pow_near: Vec<f64>,
    /// `(1−θ_far)^f` for every possible infected-non-neighbor count.
    pow_far: Vec<f64>,
}

impl SeasonTables {
    fn new(params: &ParamSet, season: Season, max_degree: usize, node_count: usize) -> Self {
        let powers = |base: f64, len: usize| {
            let mut table = Vec::with_capacity(len);
            let mut acc = 1.0;
            for _ in 0..len {
                table.push(acc);
                acc *= base;
            }
            table
        };
        SeasonTables {
            recovery: params.recovery(season),
            pow_near: powers(1.0 - params.near(season), max_degree + 1),
            pow_far: powers(1.0 - params.far(season), node_count + 1),
        }
    }
}

/// Forward simulator for one (network, parameters, cleared set) triple.
///
/// Construction precomputes the per-season probability tables; stepping is
/// then allocation-free. Cheap to build, so the ABC engine constructs one
/// per proposed parameter set.
pub struct Simulator<'a> {
    network: &'a Network,
    cleared: NodeSet,
    tables: [SeasonTables; 2],
}

impl<'a> Simulator<'a> {
    /// Simulator with only the network's unplanted nodes cleared.
    pub fn new(network: &'a Network, params: ParamSet) -> Self {
        Simulator::with_cleared(network, params, &NodeSet::new(network.node_count()))
    }

    /// Simulator with additional nodes cleared (what-if scenarios).
    pub fn with_cleared(network: &'a Network, params: ParamSet, extra: &NodeSet) -> Self {
        debug_assert!(params.validate().is_ok());
        let mut cleared = network.unplanted();
        cleared.union_with(extra);
        let (d, n) = (network.max_degree(), network.node_count());
        Simulator {
            network,
            cleared,
            tables: [
                SeasonTables::new(&params, Season::Summer, d, n),
                SeasonTables::new(&params, Season::Winter, d, n),
            ],
        }
    }

    pub fn cleared(&self) -> &NodeSet {
        &self.cleared
    }

    /// One synchronous step from `src`, written into `dst`.
    ///
    /// Every non-cleared node consumes exactly one uniform draw, in
    /// ascending node order, whatever its state; this fixed alignment is
    /// what makes runs with shared seeds comparable across parameter sets.
    /// `src` must not intersect the cleared set.
    pub fn step_into(&self, src: &NodeSet, season: Season, rng: &mut Rng, dst: &mut NodeSet) {
        debug_assert!(src.is_disjoint(&self.cleared));
        let tables = &self.tables[season.index()];
        let total_infected = src.len();
        dst.clear();
        for n in 0..self.network.node_count() {
            if self.cleared.contains(n) {
                continue;
            }
            let u: f64 = rng.random();
            if src.contains(n) {
                // Recovers with probability θ_recovery; a recovered node is
                // not exposed again until the next step.
                if u >= tables.recovery {
                    dst.insert(n);
                }
            } else {
                let m = self.network.adjacency_mask(n).intersection_len(src);
                let f = total_infected - m;
                let p = 1.0 - tables.pow_near[m] * tables.pow_far[f];
                if u < p {
                    dst.insert(n);
                }
            }
        }
    }

    /// Allocating convenience wrapper around [`step_into`](Self::step_into).
    pub fn step(&self, src: &NodeSet, season: Season, rng: &mut Rng) -> NodeSet {
        let mut dst = NodeSet::new(self.network.node_count());
        self.step_into(src, season, rng, &mut dst);
        dst
    }

    /// Simulates `horizon` monthly steps from `initial`, yielding a
    /// trajectory of `horizon + 1` snapshots labelled from `start`.
    /// Cleared nodes are removed from the initial state.
    pub fn simulate(
        &self,
        initial: &NodeSet,
        start: Month,
        horizon: usize,
        rng: &mut Rng,
    ) -> Result<Trajectory> {
        if horizon < 1 {
            return Err(Error::InvalidInput("simulation horizon must be at least 1".into()));
        }
        let months = start.sequence(horizon + 1);
        let mut states = Vec::with_capacity(horizon + 1);
        let mut cur = initial.clone();
        cur.subtract(&self.cleared);
        states.push(cur.clone());
        let mut next = NodeSet::new(self.network.node_count());
        for month in &months[..horizon] {
            if cur.is_empty() {
                // The empty state is absorbing: no spontaneous infection.
                while states.len() <= horizon {
                    states.push(cur.clone());
                }
                break;
            }
            self.step_into(&cur, month.season(), rng, &mut next);
            std::mem::swap(&mut cur, &mut next);
            states.push(cur.clone());
        }
        Trajectory::new(states, months)
    }
}

/// Per-node, per-snapshot infection frequencies over an ensemble of runs,
/// with spread measures across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub months: Vec<Month>,
    pub n_runs: usize,
    /// `frequency[node][t]` = fraction of runs with the node infected at
    /// snapshot `t`.
    pub frequency: Vec<Vec<f64>>,
    /// Sample standard deviation of the 0/1 cell values across runs.
    pub sd: Vec<Vec<f64>>,
    /// 5% and 95% empirical quantiles of the 0/1 cell values across runs.
    pub q05: Vec<Vec<f64>>,
    pub q95: Vec<Vec<f64>>,
}

/// Core ensemble loop shared by `simulate_ensemble` and the forecaster:
/// run `n_runs` independent trajectories and count, per (node, snapshot)
/// cell, how many runs had the node infected.
///
/// Replicate `i` derives its own random stream from `(master_seed, i)` and
/// picks its parameters via `pick(i, rng)` before simulating, so the counts
/// do not depend on scheduling or worker count.
pub(crate) fn ensemble_counts(
    network: &Network,
    extra_cleared: &NodeSet,
    initial: &NodeSet,
    step_seasons: &[Season],
    n_runs: usize,
    master_seed: u64,
    pick: &(impl Fn(usize, &mut Rng) -> ParamSet + Sync),
) -> Vec<u64> {
    const CHUNK: usize = 64;
    let node_count = network.node_count();
    let snapshots = step_seasons.len() + 1;
    let cells = node_count * snapshots;
    let chunks = n_runs.div_ceil(CHUNK);
    let partials = map_tasks(chunks, |chunk| {
        let mut counts = vec![0u64; cells];
        let mut cur = NodeSet::new(node_count);
        let mut next = NodeSet::new(node_count);
        for run in chunk * CHUNK..((chunk + 1) * CHUNK).min(n_runs) {
            let mut rng = task_rng(master_seed, run as u64);
            let params = pick(run, &mut rng);
            let sim = Simulator::with_cleared(network, params, extra_cleared);
            cur.copy_from(initial);
            cur.subtract(&sim.cleared);
            for node in cur.iter() {
                counts[node * snapshots] += 1;
            }
            for (t, &season) in step_seasons.iter().enumerate() {
                if cur.is_empty() {
                    break;
                }
                sim.step_into(&cur, season, &mut rng, &mut next);
                std::mem::swap(&mut cur, &mut next);
                for node in cur.iter() {
                    counts[node * snapshots + t + 1] += 1;
                }
            }
        }
        counts
    });
    let mut counts = vec![0u64; cells];
    for partial in partials {
        for (total, add) in counts.iter_mut().zip(partial) {
            *total += add;
        }
    }
    counts
}

/// Turns raw ensemble counts into frequencies and spread measures. All
/// outputs are functions of the integer counts alone, keeping them exactly
/// reproducible.
pub(crate) fn summarize_counts(
    counts: &[u64],
    n_runs: usize,
    months: Vec<Month>,
) -> EnsembleSummary {
    let snapshots = months.len();
    let node_count = counts.len() / snapshots;
    let n = n_runs as f64;
    // Empirical quantile of c ones among n_runs 0/1 values, nearest-rank.
    let quantile = |c: u64, alpha: f64| {
        let rank = (alpha * n).ceil().max(1.0) as u64;
        if rank <= n_runs as u64 - c {
            0.0
        } else {
            1.0
        }
    };
    let mut summary = EnsembleSummary {
        months,
        n_runs,
        frequency: vec![Vec::with_capacity(snapshots); node_count],
        sd: vec![Vec::with_capacity(snapshots); node_count],
        q05: vec![Vec::with_capacity(snapshots); node_count],
        q95: vec![Vec::with_capacity(snapshots); node_count],
    };
    for node in 0..node_count {
        for t in 0..snapshots {
            let c = counts[node * snapshots + t];
            summary.frequency[node].push(c as f64 / n);
            let sd = if n_runs > 1 {
                ((c * (n_runs as u64 - c)) as f64 / (n * (n - 1.0))).sqrt()
            } else {
                0.0
            };
            summary.sd[node].push(sd);
            summary.q05[node].push(quantile(c, 0.05));
            summary.q95[node].push(quantile(c, 0.95));
        }
    }
    summary
}

/// Runs `n_runs` forward simulations and reports per-cell infection
/// frequencies. Run `i` uses `draws[i % draws.len()]`, so a single
/// parameter set or a whole posterior sample both work.
pub fn simulate_ensemble(
    network: &Network,
    draws: &[ParamSet],
    initial: &NodeSet,
    start: Month,
    horizon: usize,
    n_runs: usize,
    master_seed: u64,
) -> Result<EnsembleSummary> {
    if draws.is_empty() {
        return Err(Error::InvalidInput("ensemble needs at least one parameter set".into()));
    }
    if n_runs < 1 || horizon < 1 {
        return Err(Error::InvalidInput("ensemble needs n_runs ≥ 1 and horizon ≥ 1".into()));
    }
    let months = start.sequence(horizon + 1);
    let step_seasons: Vec<Season> = months[..horizon].iter().map(|m| m.season()).collect();
    let counts = ensemble_counts(
        network,
        &NodeSet::new(network.node_count()),
        initial,
        &step_seasons,
        n_runs,
        master_seed,
        &|run, _rng: &mut Rng| draws[run % draws.len()],
    );
    Ok(summarize_counts(&counts, n_runs, months))
}
