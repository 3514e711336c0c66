//! Summary statistics and the discrepancy measure.
//!
//! A trajectory is compressed into one proportion-infected value per
//! snapshot plus six seasonal event counts; the discrepancy between two
//! such vectors is their mean squared error over the flat concatenation.
//! Flat element order, fixed for files and the discrepancy alike:
//! `s1[0..T−1], s10_summer, s10_winter, s010_summer, s010_winter,
//! s011_summer, s011_winter`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::Season;
use crate::net::{Network, ObservationSeries};
use crate::nodeset::NodeSet;

/// Summary of one trajectory: per-snapshot infected proportions and six
/// seasonal transition counts.
///
/// Per transition `t → t+1`, attributed to the season of month `t`:
/// `s10` counts nodes infected at `t` and susceptible at `t+1` (recovered);
/// `s010` counts nodes newly infected at `t+1` with no infected neighbor at
/// `t`; `s011` the same with at least one infected neighbor. A node
/// infected at both `t` and `t+1` contributes to no count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryVector {
    pub s1: Vec<f64>,
    pub s10_summer: u32,
    pub s10_winter: u32,
    pub s010_summer: u32,
    pub s010_winter: u32,
    pub s011_summer: u32,
    pub s011_winter: u32,
}

impl SummaryVector {
    /// Total element count `k` entering the discrepancy.
    pub fn element_count(&self) -> usize {
        self.s1.len() + 6
    }

    fn counts(&self) -> [u32; 6] {
        [
            self.s10_summer,
            self.s10_winter,
            self.s010_summer,
            self.s010_winter,
            self.s011_summer,
            self.s011_winter,
        ]
    }

    /// Flat concatenation in the documented order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = self.s1.clone();
        flat.extend(self.counts().map(f64::from));
        flat
    }

    pub fn csv_header(snapshot_count: usize) -> String {
        let mut cols: Vec<String> = (0..snapshot_count).map(|t| format!("s1_{t}")).collect();
        cols.extend(COUNT_NAMES.iter().map(|s| s.to_string()));
        cols.join(",")
    }

    /// Single CSV data row in the documented column order.
    pub fn to_csv_row(&self) -> String {
        let cells: Vec<String> = self.flatten().iter().map(f64::to_string).collect();
        cells.join(",")
    }

    /// Parses a header + single-row CSV produced by
    /// [`csv_header`](Self::csv_header) and [`to_csv_row`](Self::to_csv_row).
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines =
            text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty summary CSV".into()))?;
        let row = lines.next().ok_or_else(|| Error::Parse("summary CSV has no data row".into()))?;
        let columns = header.split(',').count();
        if columns < 7 {
            return Err(Error::Parse("summary CSV needs at least one s1 column".into()));
        }
        let values: Vec<f64> = row
            .split(',')
            .map(|c| c.trim().parse().map_err(|_| Error::Parse(format!("bad summary cell {c:?}"))))
            .collect::<Result<_>>()?;
        if values.len() != columns {
            return Err(Error::Parse(format!(
                "summary CSV row has {} cells for {columns} columns",
                values.len()
            )));
        }
        let (s1, counts) = values.split_at(columns - 6);
        let count = |i: usize| counts[i] as u32;
        Ok(SummaryVector {
            s1: s1.to_vec(),
            s10_summer: count(0),
            s10_winter: count(1),
            s010_summer: count(2),
            s010_winter: count(3),
            s011_summer: count(4),
            s011_winter: count(5),
        })
    }
}

const COUNT_NAMES: [&str; 6] =
    ["s10_summer", "s10_winter", "s010_summer", "s010_winter", "s011_summer", "s011_winter"];

/// Incremental summary builder, fed one snapshot (or transition) at a time
/// so the ABC engine never materializes whole trajectories.
pub struct SummaryAccumulator<'a> {
    network: &'a Network,
    s1: Vec<f64>,
    s10: [u32; 2],
    s010: [u32; 2],
    s011: [u32; 2],
}

impl<'a> SummaryAccumulator<'a> {
    pub fn new(network: &'a Network, expected_snapshots: usize) -> Self {
        SummaryAccumulator {
            network,
            s1: Vec::with_capacity(expected_snapshots),
            s10: [0; 2],
            s010: [0; 2],
            s011: [0; 2],
        }
    }

    fn proportion(&self, state: &NodeSet) -> f64 {
        state.len() as f64 / self.network.node_count() as f64
    }

    /// Records the first snapshot.
    pub fn push_initial(&mut self, state: &NodeSet) {
        debug_assert!(self.s1.is_empty());
        self.s1.push(self.proportion(state));
    }

    /// Records the transition `src → dst` under the source month's season,
    /// plus `dst`'s snapshot proportion.
    pub fn push_transition(&mut self, src: &NodeSet, dst: &NodeSet, season: Season) {
        debug_assert!(!self.s1.is_empty(), "push_initial comes first");
        self.s1.push(self.proportion(dst));
        let s = season.index();
        self.s10[s] += src.difference_len(dst) as u32;
        for node in dst.difference_iter(src) {
            if self.network.adjacency_mask(node).intersects(src) {
                self.s011[s] += 1;
            } else {
                self.s010[s] += 1;
            }
        }
    }

    /// Records `remaining` further snapshots of the all-susceptible state,
    /// which is absorbing: its transitions carry no events, only zero
    /// proportions. Lets simulation loops stop stepping once extinct.
    pub fn push_empty_tail(&mut self, remaining: usize) {
        debug_assert!(!self.s1.is_empty(), "push_initial comes first");
        self.s1.extend(std::iter::repeat_n(0.0, remaining));
    }

    pub fn finish(self) -> Result<SummaryVector> {
        if self.s1.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "summary needs at least 2 snapshots, got {}",
                self.s1.len()
            )));
        }
        Ok(SummaryVector {
            s1: self.s1,
            s10_summer: self.s10[0],
            s10_winter: self.s10[1],
            s010_summer: self.s010[0],
            s010_winter: self.s010[1],
            s011_summer: self.s011[0],
            s011_winter: self.s011[1],
        })
    }
}

/// Summarizes a trajectory or observed series against its network.
pub fn summarize(series: &ObservationSeries, network: &Network) -> Result<SummaryVector> {
    if series.node_count() != network.node_count() {
        return Err(Error::Data(format!(
            "series covers {} nodes, network has {}",
            series.node_count(),
            network.node_count()
        )));
    }
    let mut acc = SummaryAccumulator::new(network, series.snapshot_count());
    acc.push_initial(series.snapshot(0));
    for t in 0..series.snapshot_count() - 1 {
        acc.push_transition(
            series.snapshot(t),
            series.snapshot(t + 1),
            series.months()[t].season(),
        );
    }
    acc.finish()
}

/// Mean squared error between two summary vectors over the flat
/// concatenation: `(1/k)·Σ (a_j − b_j)²`.
pub fn discrepancy(a: &SummaryVector, b: &SummaryVector) -> Result<f64> {
    if a.s1.len() != b.s1.len() {
        return Err(Error::InvalidInput(format!(
            "summary vectors have different element counts ({} vs {})",
            a.element_count(),
            b.element_count()
        )));
    }
    let mut sum = 0.0;
    for (x, y) in a.s1.iter().zip(&b.s1) {
        sum += (x - y) * (x - y);
    }
    for (x, y) in a.counts().into_iter().zip(b.counts()) {
        let d = f64::from(x) - f64::from(y);
        sum += d * d;
    }
    Ok(sum / a.element_count() as f64)
}
