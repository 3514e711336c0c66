//! Test oracles and statistical helpers, shared between this crate's unit
//! tests and the CLI's acceptance suite (behind the `testkit` feature).
//!
//! The step-distribution oracle enumerates the transition kernel straight
//! from the model definition — per-node event probabilities multiplied out
//! over all next states — without touching the simulator's lookup tables or
//! bit tricks, so the two can disagree.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::month::Season;
use crate::net::Network;
use crate::nodeset::NodeSet;
use crate::sis::ParamSet;

/// Bitmask index of a state for small-network enumeration: node `i`
/// contributes bit `i`.
pub fn state_index(state: &NodeSet) -> usize {
    state.iter().map(|n| 1usize << n).sum()
}

/// Exact one-step next-state distribution, indexed by [`state_index`].
///
/// Per-node marginals come directly from the update rule: an infected node
/// stays with probability `1 − θ_recovery`; a susceptible planted node with
/// `m` infected neighbors and `f` infected non-neighbors becomes infected
/// with probability `1 − (1−θ_near)^m (1−θ_far)^f`; unplanted nodes stay
/// susceptible. Nodes update independently, so the joint distribution is
/// the product of marginals. Only practical for networks of ≤ ~16 nodes.
pub fn exact_step_distribution(
    network: &Network,
    params: &ParamSet,
    src: &NodeSet,
    season: Season,
) -> Vec<f64> {
    let n = network.node_count();
    assert!(n <= 16, "enumeration oracle is exponential in node count");
    let total_infected = src.len();
    let p_infected: Vec<f64> = network
        .node_ids()
        .map(|node| {
            if !network.is_planted(node) {
                0.0
            } else if src.contains(node.index()) {
                1.0 - params.recovery(season)
            } else {
                let m = network
                    .neighbors(node)
                    .unwrap()
                    .iter()
                    .filter(|nb| src.contains(nb.index()))
                    .count();
                let f = total_infected - m;
                1.0 - (1.0 - params.near(season)).powi(m as i32)
                    * (1.0 - params.far(season)).powi(f as i32)
            }
        })
        .collect();
    (0..1usize << n)
        .map(|state| {
            (0..n)
                .map(|i| if state >> i & 1 == 1 { p_infected[i] } else { 1.0 - p_infected[i] })
                .product()
        })
        .collect()
}

/// Outcome of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Chi-square goodness-of-fit of observed category counts against expected
/// probabilities over `n_runs` trials.
///
/// Categories with expected count below 5 are pooled into one bucket, the
/// usual validity condition. An observation in a zero-probability category
/// is an outright contradiction and yields p = 0.
pub fn chi_square_gof(observed: &[u64], expected_probs: &[f64], n_runs: u64) -> ChiSquareTest {
    assert_eq!(observed.len(), expected_probs.len());
    let n = n_runs as f64;
    let mut buckets: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut pooled = (0.0f64, 0.0f64);
    for (&obs, &p) in observed.iter().zip(expected_probs) {
        let expected = p * n;
        if p <= 0.0 {
            if obs > 0 {
                return ChiSquareTest {
                    statistic: f64::INFINITY,
                    degrees_of_freedom: 0,
                    p_value: 0.0,
                };
            }
            continue;
        }
        if expected < 5.0 {
            pooled.0 += obs as f64;
            pooled.1 += expected;
        } else {
            buckets.push((obs as f64, expected));
        }
    }
    if pooled.1 > 0.0 {
        buckets.push(pooled);
    }
    if buckets.len() < 2 {
        return ChiSquareTest { statistic: 0.0, degrees_of_freedom: 0, p_value: 1.0 };
    }
    let statistic: f64 = buckets.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = buckets.len() - 1;
    let dist = ChiSquared::new(df as f64).expect("df ≥ 1");
    ChiSquareTest { statistic, degrees_of_freedom: df, p_value: 1.0 - dist.cdf(statistic) }
}

/// Kolmogorov–Smirnov distance between a sample and the uniform
/// distribution on `[lower, upper]`.
pub fn ks_uniform_distance(samples: &[f64], lower: f64, upper: f64) -> f64 {
    assert!(!samples.is_empty() && upper > lower);
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = ((x - lower) / (upper - lower)).clamp(0.0, 1.0);
            let lo = (cdf - i as f64 / n).abs();
            let hi = (cdf - (i + 1) as f64 / n).abs();
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}
