//! Hold-out validation: one-month posterior predictions against observed
//! snapshots, scored by binomial deviance loss and ROC/AUC.

use crate::error::{Error, Result};
use crate::forecast::{posterior_forecast, Scenario, SeasonMode};
use crate::month::Month;
use crate::net::{Network, NodeId, ObservationSeries};
use crate::sis::ParamSet;

/// One scored prediction: a node's forecast probability for a hold-out
/// month against what was observed there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRecord {
    pub node: NodeId,
    pub month: Month,
    /// Already clamped into (0, 1).
    pub predicted_p: f64,
    pub actual: bool,
}

impl PredictionRecord {
    pub fn loss(&self) -> f64 {
        deviance_loss(self.actual, self.predicted_p)
    }
}

/// Binomial deviance loss: log-likelihood of the outcome under the
/// predicted probability. `log p` when infection was observed, `log(1−p)`
/// otherwise; natural logarithm, never positive.
pub fn deviance_loss(actual: bool, predicted_p: f64) -> f64 {
    if actual {
        predicted_p.ln()
    } else {
        (1.0 - predicted_p).ln()
    }
}

/// Pulls a Monte-Carlo probability off the degenerate endpoints: clamps
/// into `[δ, 1−δ]` with `δ = 1/(2·replicates)`, half the resolution of the
/// frequency estimate.
pub fn clamp_probability(p: f64, replicates: usize) -> f64 {
    let delta = 1.0 / (2.0 * replicates as f64);
    p.clamp(delta, 1.0 - delta)
}

/// Loss of a coin-flip prediction, −log 2: the reference line any useful
/// model must beat.
pub fn random_prediction_baseline() -> f64 {
    -std::f64::consts::LN_2
}

/// Mean loss over records.
pub fn mean_loss(records: &[PredictionRecord]) -> f64 {
    records.iter().map(|r| r.loss()).sum::<f64>() / records.len() as f64
}

/// Mean loss per node across its records, in ascending node order.
pub fn per_node_losses(records: &[PredictionRecord]) -> Vec<(NodeId, f64)> {
    let mut totals: std::collections::BTreeMap<u32, (f64, usize)> =
        std::collections::BTreeMap::new();
    for rec in records {
        let entry = totals.entry(rec.node.0).or_insert((0.0, 0));
        entry.0 += rec.loss();
        entry.1 += 1;
    }
    totals.into_iter().map(|(id, (sum, n))| (NodeId(id), sum / n as f64)).collect()
}

/// Hold-out validation result.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub records: Vec<PredictionRecord>,
    /// Mean loss per planted node across the hold-out months.
    pub per_node: Vec<(NodeId, f64)>,
    pub mean_loss: f64,
    /// −log 2, the random-prediction reference.
    pub baseline: f64,
    /// The clamp applied to Monte-Carlo probabilities.
    pub clamp_delta: f64,
    pub replicates: usize,
}

/// Scores the posterior against the last `holdout_months` transitions of an
/// observed series. Each hold-out month gets a fresh one-month forecast
/// anchored on the *observed* state of the previous month — not a
/// free-running long-horizon forecast — and every planted node contributes
/// one record per transition.
pub fn predictive_check(
    network: &Network,
    draws: &[ParamSet],
    series: &ObservationSeries,
    holdout_months: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<ValidationReport> {
    if series.node_count() != network.node_count() {
        return Err(Error::Data(format!(
            "series covers {} nodes, network has {}",
            series.node_count(),
            network.node_count()
        )));
    }
    if holdout_months < 1 {
        return Err(Error::InvalidInput("need at least one hold-out month".into()));
    }
    let total = series.snapshot_count();
    if holdout_months + 1 > total {
        return Err(Error::InvalidInput(format!(
            "{holdout_months} hold-out transitions need {} snapshots, series has {total}",
            holdout_months + 1
        )));
    }
    let first_anchor = total - 1 - holdout_months;
    let mut records = Vec::with_capacity(holdout_months * network.node_count());
    for k in 0..holdout_months {
        let t = first_anchor + k;
        let scenario = Scenario {
            season_mode: SeasonMode::Calendar,
            cleared_nodes: vec![],
            horizon: 1,
            start_month: series.months()[t],
            initial: series.snapshot(t).clone(),
        };
        let fc = posterior_forecast(
            network,
            draws,
            &scenario,
            replicates,
            master_seed.wrapping_add(k as u64),
        )?;
        let target_month = series.months()[t + 1];
        let actual_state = series.snapshot(t + 1);
        for node in 0..network.node_count() {
            if !network.is_planted(NodeId(node as u32)) {
                continue;
            }
            records.push(PredictionRecord {
                node: NodeId(node as u32),
                month: target_month,
                predicted_p: clamp_probability(fc.probability(node, 1), replicates),
                actual: actual_state.contains(node),
            });
        }
    }
    Ok(ValidationReport {
        per_node: per_node_losses(&records),
        mean_loss: mean_loss(&records),
        baseline: random_prediction_baseline(),
        clamp_delta: 1.0 / (2.0 * replicates as f64),
        replicates,
        records,
    })
}

/// One point of the ROC sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Classifier sweep over the distinct predicted probabilities, descending;
/// tied scores move together. Points run from (0,0) to (1,1) and the AUC is
/// the trapezoidal area under them.
pub fn roc_curve(records: &[PredictionRecord]) -> Result<RocCurve> {
    let positives = records.iter().filter(|r| r.actual).count();
    let negatives = records.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidInput(format!(
            "ROC needs both outcome classes, got {positives} positive and {negatives} negative"
        )));
    }
    let mut sorted: Vec<&PredictionRecord> = records.iter().collect();
    sorted.sort_by(|a, b| b.predicted_p.partial_cmp(&a.predicted_p).unwrap());
    let mut points = vec![RocPoint { threshold: f64::INFINITY, fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].predicted_p;
        while i < sorted.len() && sorted[i].predicted_p == threshold {
            if sorted[i].actual {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        });
    }
    let auc = points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0).sum();
    Ok(RocCurve { points, auc })
}

/// Records CSV: one scored prediction per row.
pub fn records_to_csv(records: &[PredictionRecord]) -> String {
    let mut out = String::from("node,month,predicted_p,actual,loss\n");
    for rec in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            rec.node.0,
            rec.month,
            rec.predicted_p,
            rec.actual as u8,
            rec.loss()
        ));
    }
    out
}

/// ROC CSV: the sweep points in order.
pub fn roc_to_csv(curve: &RocCurve) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.threshold, p.fpr, p.tpr));
    }
    out
}
