//! Likelihood-free inference: ABC likelihood estimation, rejection
//! sampling, ABC-MCMC, thinning, and tolerance re-filtering.
//!
//! All samplers share one mechanism: simulate a trajectory from the
//! observed initial snapshot under proposed parameters, summarize it, and
//! accept when the mean-squared-error discrepancy against the observed
//! summary is within the tolerance ε (a uniform indicator kernel).

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::Season;
use crate::net::{Network, ObservationSeries};
use crate::nodeset::NodeSet;
use crate::rng::{map_tasks, task_rng, Rng};
use crate::sis::{ParamSet, Simulator, PARAM_NAMES};
use crate::summary::{discrepancy, SummaryAccumulator, SummaryVector};

/// Independent uniform priors, one `[lower, upper]` interval per parameter
/// in the documented column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    lower: [f64; 6],
    upper: [f64; 6],
}

impl Prior {
    /// The default prior: uniform over the full probability cube `[0,1]⁶`.
    pub fn unit() -> Self {
        Prior { lower: [0.0; 6], upper: [1.0; 6] }
    }

    pub fn new(lower: [f64; 6], upper: [f64; 6]) -> Result<Self> {
        for i in 0..6 {
            if !(0.0..=1.0).contains(&lower[i])
                || !(0.0..=1.0).contains(&upper[i])
                || lower[i] >= upper[i]
            {
                return Err(Error::InvalidInput(format!(
                    "prior bounds for {} must satisfy 0 ≤ lower < upper ≤ 1, got [{}, {}]",
                    PARAM_NAMES[i], lower[i], upper[i]
                )));
            }
        }
        Ok(Prior { lower, upper })
    }

    pub fn lower(&self) -> [f64; 6] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 6] {
        self.upper
    }

    pub fn sample(&self, rng: &mut Rng) -> ParamSet {
        let mut values = [0.0; 6];
        for (i, value) in values.iter_mut().enumerate() {
            *value = rng.random_range(self.lower[i]..self.upper[i]);
        }
        ParamSet::from_array(values).expect("bounds are within [0,1]")
    }

    pub fn contains(&self, params: &ParamSet) -> bool {
        params.to_array().iter().enumerate().all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i])
    }
}

/// One retained parameter set with the discrepancy of the simulation that
/// admitted it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraw {
    pub iteration: u64,
    pub params: ParamSet,
    pub discrepancy: f64,
    /// Whether this state came from a freshly accepted proposal (an MCMC
    /// rejection repeats the previous state instead).
    pub accepted_proposal: bool,
}

/// ABC-MCMC settings. The defaults are the reference run: 10⁷ iterations,
/// 10⁵ burn-in, thinning 200, ε = 23 (meaningful for 44-element summaries;
/// pick ε for other datasets from the pilot discrepancy distribution).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub iterations: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub epsilon: f64,
    /// Per-parameter random-walk standard deviation; the recovery scales
    /// are an order of magnitude above the infectivity scales.
    pub proposal_sd: [f64; 6],
    pub master_seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            iterations: 10_000_000,
            burn_in: 100_000,
            thin: 200,
            epsilon: 23.0,
            proposal_sd: [0.02, 0.02, 0.005, 0.005, 0.005, 0.005],
            master_seed: 0,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidInput(format!(
                "burn_in ({}) must be below iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thin < 1 {
            return Err(Error::InvalidInput("thin must be at least 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.proposal_sd.iter().any(|&sd| sd.is_nan() || sd <= 0.0) {
            return Err(Error::InvalidInput("every proposal_sd must be positive".into()));
        }
        Ok(())
    }
}

/// Everything the samplers need to score one parameter set: the network,
/// the observed initial snapshot (restricted to planted nodes), the season
/// of each step, and the observed summary vector.
pub struct AbcContext<'a> {
    network: &'a Network,
    initial: NodeSet,
    step_seasons: Vec<Season>,
    observed: SummaryVector,
}

impl<'a> AbcContext<'a> {
    pub fn new(network: &'a Network, observed: &ObservationSeries) -> Result<Self> {
        let summary = crate::summary::summarize(observed, network)?;
        let mut initial = observed.snapshot(0).clone();
        initial.subtract(&network.unplanted());
        let step_seasons =
            observed.months()[..observed.snapshot_count() - 1].iter().map(|m| m.season()).collect();
        Ok(AbcContext { network, initial, step_seasons, observed: summary })
    }

    pub fn network(&self) -> &Network {
        self.network
    }

    pub fn observed(&self) -> &SummaryVector {
        &self.observed
    }

    pub fn initial(&self) -> &NodeSet {
        &self.initial
    }

    pub fn snapshot_count(&self) -> usize {
        self.step_seasons.len() + 1
    }

    /// Simulates one trajectory under `params` and returns its discrepancy
    /// against the observed summary. This is the inner loop of every
    /// sampler: it accumulates the summary on the fly and never stores the
    /// trajectory.
    pub fn simulate_discrepancy(&self, params: ParamSet, rng: &mut Rng) -> f64 {
        let sim = Simulator::new(self.network, params);
        let mut acc = SummaryAccumulator::new(self.network, self.snapshot_count());
        let mut cur = self.initial.clone();
        acc.push_initial(&cur);
        let mut next = NodeSet::new(self.network.node_count());
        for (t, &season) in self.step_seasons.iter().enumerate() {
            if cur.is_empty() {
                acc.push_empty_tail(self.step_seasons.len() - t);
                break;
            }
            sim.step_into(&cur, season, rng, &mut next);
            acc.push_transition(&cur, &next, season);
            std::mem::swap(&mut cur, &mut next);
        }
        let summary = acc.finish().expect("at least two snapshots by construction");
        discrepancy(&summary, &self.observed).expect("lengths match by construction")
    }
}

/// Monte-Carlo ABC likelihood: the fraction of `n` independent simulations
/// under `params` whose discrepancy is within `epsilon`.
pub fn abc_likelihood(
    ctx: &AbcContext,
    params: ParamSet,
    n: u64,
    epsilon: f64,
    rng: &mut Rng,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidInput("abc_likelihood needs n ≥ 1".into()));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    params.validate()?;
    let hits = (0..n).filter(|_| ctx.simulate_discrepancy(params, rng) <= epsilon).count();
    Ok(hits as f64 / n as f64)
}

/// Draws `n` parameter sets from the prior and simulates each once,
/// returning every draw with its discrepancy. Draw `i` uses the stream
/// derived from `(master_seed, i)`.
fn prior_predictive(
    ctx: &AbcContext,
    prior: &Prior,
    n: u64,
    master_seed: u64,
) -> Vec<(ParamSet, f64)> {
    const CHUNK: u64 = 64;
    let chunks = n.div_ceil(CHUNK);
    let partials = map_tasks(chunks as usize, |chunk| {
        let chunk = chunk as u64;
        (chunk * CHUNK..((chunk + 1) * CHUNK).min(n))
            .map(|i| {
                let mut rng = task_rng(master_seed, i);
                let params = prior.sample(&mut rng);
                let rho = ctx.simulate_discrepancy(params, &mut rng);
                (params, rho)
            })
            .collect::<Vec<_>>()
    });
    partials.into_iter().flatten().collect()
}

/// Prior-predictive discrepancies, the pilot run used to choose ε: pick a
/// low quantile of these values as the tolerance.
pub fn pilot_discrepancies(
    ctx: &AbcContext,
    prior: &Prior,
    n: u64,
    master_seed: u64,
) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::InvalidInput("pilot needs n ≥ 1".into()));
    }
    Ok(prior_predictive(ctx, prior, n, master_seed).into_iter().map(|(_, rho)| rho).collect())
}

/// Outcome of ABC rejection sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionResult {
    /// Accepted draws in attempt order. Empty when nothing was within ε —
    /// a signal to raise the tolerance, not an error.
    pub draws: Vec<PosteriorDraw>,
    pub attempted: u64,
    pub acceptance_rate: f64,
}

/// ABC rejection sampling: attempt exactly `n_draws` prior draws, keep
/// those whose simulated discrepancy is within `epsilon`.
pub fn rejection_sample(
    ctx: &AbcContext,
    prior: &Prior,
    n_draws: u64,
    epsilon: f64,
    master_seed: u64,
) -> Result<RejectionResult> {
    if n_draws < 1 {
        return Err(Error::InvalidInput("rejection sampling needs n_draws ≥ 1".into()));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let draws: Vec<PosteriorDraw> = prior_predictive(ctx, prior, n_draws, master_seed)
        .into_iter()
        .enumerate()
        .filter(|(_, (_, rho))| *rho <= epsilon)
        .map(|(i, (params, rho))| PosteriorDraw {
            iteration: i as u64,
            params,
            discrepancy: rho,
            accepted_proposal: true,
        })
        .collect();
    let acceptance_rate = draws.len() as f64 / n_draws as f64;
    Ok(RejectionResult { draws, attempted: n_draws, acceptance_rate })
}

/// ABC-MCMC as a streaming iterator over chain states, so a 10⁷-iteration
/// chain never has to live in memory; [`mcmc_chain`] collects it when the
/// scale allows.
///
/// Initialization draws from the prior until a simulation lands within ε
/// (capped). Each iteration proposes a Gaussian random-walk move; proposals
/// outside the prior box are rejected outright (prior density zero), and
/// in-box proposals are accepted exactly when one fresh simulation lands
/// within ε — the flat prior and symmetric proposal make the Metropolis
/// ratio one. Rejection repeats the current state.
pub struct McmcSampler<'a> {
    ctx: &'a AbcContext<'a>,
    prior: Prior,
    config: McmcConfig,
    rng: Rng,
    current: ParamSet,
    current_rho: f64,
    next_iteration: u64,
    accepted_proposals: u64,
}

impl<'a> McmcSampler<'a> {
    /// Prior draws attempted before initialization gives up.
    pub const INIT_ATTEMPT_CAP: u64 = 100_000;

    pub fn new(ctx: &'a AbcContext<'a>, prior: &Prior, config: &McmcConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = task_rng(config.master_seed, 0);
        let mut init = None;
        for _ in 0..Self::INIT_ATTEMPT_CAP {
            let params = prior.sample(&mut rng);
            let rho = ctx.simulate_discrepancy(params, &mut rng);
            if rho <= config.epsilon {
                init = Some((params, rho));
                break;
            }
        }
        let (current, current_rho) = init.ok_or_else(|| {
            Error::Numeric(format!(
                "MCMC initialization found no simulation within ε = {} in {} attempts; \
                 raise the tolerance (the pilot mode reports the discrepancy distribution)",
                config.epsilon,
                Self::INIT_ATTEMPT_CAP
            ))
        })?;
        Ok(McmcSampler {
            ctx,
            prior: prior.clone(),
            config: config.clone(),
            rng,
            current,
            current_rho,
            next_iteration: 0,
            accepted_proposals: 0,
        })
    }

    /// Fraction of proposals accepted so far.
    pub fn acceptance_rate(&self) -> f64 {
        if self.next_iteration <= 1 {
            return 0.0;
        }
        self.accepted_proposals as f64 / (self.next_iteration - 1) as f64
    }
}

impl Iterator for McmcSampler<'_> {
    type Item = PosteriorDraw;

    fn next(&mut self) -> Option<PosteriorDraw> {
        if self.next_iteration >= self.config.iterations {
            return None;
        }
        let iteration = self.next_iteration;
        self.next_iteration += 1;
        // State 0 is the initialization itself.
        let mut accepted = iteration == 0;
        if iteration > 0 {
            let mut proposal = self.current.to_array();
            for (value, sd) in proposal.iter_mut().zip(self.config.proposal_sd) {
                let z: f64 = self.rng.sample(StandardNormal);
                *value += sd * z;
            }
            if let Ok(params) = ParamSet::from_array(proposal) {
                if self.prior.contains(&params) {
                    let rho = self.ctx.simulate_discrepancy(params, &mut self.rng);
                    if rho <= self.config.epsilon {
                        self.current = params;
                        self.current_rho = rho;
                        self.accepted_proposals += 1;
                        accepted = true;
                    }
                }
            }
        }
        Some(PosteriorDraw {
            iteration,
            params: self.current,
            discrepancy: self.current_rho,
            accepted_proposal: accepted,
        })
    }
}

/// Runs a full chain in memory. Fine up to a few million iterations; set up
/// a [`McmcSampler`] directly to stream longer chains.
pub fn mcmc_chain(
    ctx: &AbcContext,
    prior: &Prior,
    config: &McmcConfig,
) -> Result<Vec<PosteriorDraw>> {
    Ok(McmcSampler::new(ctx, prior, config)?.collect())
}

/// Indices a chain of `len` states retains after burn-in and thinning:
/// `burn_in, burn_in + thin, burn_in + 2·thin, …`.
pub fn retained_indices(len: u64, burn_in: u64, thin: u64) -> Result<impl Iterator<Item = u64>> {
    if thin < 1 {
        return Err(Error::InvalidInput("thin must be at least 1".into()));
    }
    if burn_in >= len {
        return Err(Error::InvalidInput(format!(
            "burn_in ({burn_in}) must be below the chain length ({len})"
        )));
    }
    Ok((burn_in..len).step_by(thin as usize))
}

/// Discards `burn_in` states and keeps every `thin`-th state after.
pub fn thin_and_burn(
    chain: &[PosteriorDraw],
    burn_in: u64,
    thin: u64,
) -> Result<Vec<PosteriorDraw>> {
    Ok(retained_indices(chain.len() as u64, burn_in, thin)?.map(|i| chain[i as usize]).collect())
}

/// Re-filters draws at a stricter tolerance `epsilon_prime`, preserving
/// order. Tightening beyond the generation tolerance is the Fig-11-style
/// sensitivity mechanism; loosening is a misuse and rejected.
pub fn threshold_filter(
    draws: &[PosteriorDraw],
    epsilon_prime: f64,
    generation_epsilon: f64,
) -> Result<Vec<PosteriorDraw>> {
    if epsilon_prime > generation_epsilon {
        return Err(Error::InvalidInput(format!(
            "filter tolerance {epsilon_prime} exceeds the generation tolerance {generation_epsilon}"
        )));
    }
    Ok(draws.iter().filter(|d| d.discrepancy <= epsilon_prime).copied().collect())
}

/// CSV header for draw files: iteration, the six parameters in the
/// documented order, discrepancy, and an accepted-proposal flag.
pub fn draws_csv_header() -> String {
    format!("iteration,{},discrepancy,accepted_proposal", PARAM_NAMES.join(","))
}

/// One CSV row per draw; floats use the shortest exact representation, so
/// files round-trip bit-for-bit.
pub fn draw_csv_row(draw: &PosteriorDraw) -> String {
    let params: Vec<String> = draw.params.to_array().iter().map(f64::to_string).collect();
    format!(
        "{},{},{},{}",
        draw.iteration,
        params.join(","),
        draw.discrepancy,
        u8::from(draw.accepted_proposal)
    )
}

pub fn draws_to_csv(draws: &[PosteriorDraw]) -> String {
    let mut out = draws_csv_header();
    out.push('\n');
    for draw in draws {
        out.push_str(&draw_csv_row(draw));
        out.push('\n');
    }
    out
}

/// Parses a draw CSV, ignoring `#` metadata lines.
pub fn parse_draws_csv(text: &str) -> Result<Vec<PosteriorDraw>> {
    let mut draws = Vec::new();
    let mut saw_header = false;
    for (no, line) in text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
    {
        if line.starts_with("iteration") {
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse(format!(
                "line {no}: draw rows have 9 columns, got {}",
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {no}: bad number {:?}", fields[i])))
        };
        let mut values = [0.0; 6];
        for (i, v) in values.iter_mut().enumerate() {
            *v = num(i + 1)?;
        }
        draws.push(PosteriorDraw {
            iteration: fields[0]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {no}: bad iteration {:?}", fields[0])))?,
            params: ParamSet::from_array(values)?,
            discrepancy: num(7)?,
            accepted_proposal: match fields[8].trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Parse(format!(
                        "line {no}: accepted_proposal must be 0/1, got {other:?}"
                    )))
                }
            },
        });
    }
    if !saw_header {
        return Err(Error::Parse("draw CSV is missing its header row".into()));
    }
    Ok(draws)
}
