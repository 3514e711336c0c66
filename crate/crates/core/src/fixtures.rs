//! Deterministic study fixture: a 60-subsection plantation with known
//! ground-truth parameters, used by tests, examples, and the bundled demo
//! data. The layout is a 6×10 grid of rectangular subsections separated by
//! paths, with two path-crossing shortcuts removed near one corner and a
//! handful of long-range borders added around one hub, so the degree
//! distribution has a unique maximum (node 43, degree 10) and a unique
//! minimum (node 54, degree 1).

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::net::{Network, ObservationSeries, Polygon};
use crate::nodeset::NodeSet;
use crate::rng::task_rng;
use crate::sis::{ParamSet, Simulator};

/// Grid shape: `ROWS * COLS` nodes, node index = `row * COLS + col`.
pub const ROWS: usize = 6;
pub const COLS: usize = 10;

/// Subsections without host plants; frozen susceptible in every simulation.
pub const UNPLANTED: [usize; 2] = [14, 37];

/// Subsections infected in the first synthetic snapshot.
pub const SEED_NODES: [usize; 6] = [46, 47, 48, 56, 57, 58];

/// Number of monthly snapshots in the synthetic training series.
pub const TRAIN_SNAPSHOTS: usize = 38;

/// Additional snapshots reserved for hold-out validation.
pub const HOLDOUT_SNAPSHOTS: usize = 7;

/// First snapshot month of the synthetic series.
pub fn start_month() -> crate::month::Month {
    crate::month::Month::new(2014, 12).unwrap()
}

fn edge_pairs() -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for r in 0..ROWS {
        for c in 0..COLS {
            let n = (r * COLS + c) as u32;
            if c + 1 < COLS {
                edges.push((n, n + 1));
            }
            if r + 1 < ROWS {
                edges.push((n, n + COLS as u32));
            }
        }
    }
    // Node 54's lateral borders are path crossings, not shared borders;
    // dropping them leaves it linked only upward to 44.
    edges.retain(|&e| e != (53, 54) && e != (54, 55));
    // Long-range borders around the hub subsection 43.
    edges.extend([(22, 43), (23, 43), (24, 43), (32, 43), (34, 43), (43, 52)]);
    edges
}

/// The fixture network with footprints attached.
pub fn fixture_network() -> Network {
    let planted: Vec<bool> = (0..ROWS * COLS).map(|i| !UNPLANTED.contains(&i)).collect();
    let mut net = Network::new(ROWS * COLS, edge_pairs(), planted)
        .expect("fixture network is valid by construction");
    let footprints = (0..ROWS * COLS)
        .map(|i| {
            let (r, c) = (i / COLS, i % COLS);
            let (x0, y0) = (c as f64 * 30.0, r as f64 * 40.0);
            let poly = Polygon::new(vec![
                (x0, y0),
                (x0 + 27.0, y0),
                (x0 + 27.0, y0 + 36.0),
                (x0, y0 + 36.0),
            ])
            .unwrap();
            (i as u32, poly)
        })
        .collect();
    net.attach_footprints(footprints).unwrap();
    net
}

/// Master seed of the bundled synthetic dataset. Chosen so the realized
/// seasonal transition counts land close to their ensemble means under the
/// ground-truth parameters: calibration against a typical draw measures
/// estimator quality rather than the luck of one realization.
pub const FIXTURE_SEED: u64 = 119;

/// Ground-truth parameters the synthetic dataset is generated from.
pub fn synthetic_params() -> ParamSet {
    ParamSet::new(0.25, 0.30, 0.06, 0.04, 0.007, 0.006).unwrap()
}

/// The full synthetic series: training snapshots plus hold-out months,
/// simulated from [`synthetic_params`] under [`FIXTURE_SEED`].
pub fn synthetic_series() -> ObservationSeries {
    let net = fixture_network();
    let sim = Simulator::new(&net, synthetic_params());
    let initial = NodeSet::from_indices(net.node_count(), SEED_NODES);
    let mut rng = task_rng(FIXTURE_SEED, 0);
    sim.simulate(&initial, start_month(), TRAIN_SNAPSHOTS + HOLDOUT_SNAPSHOTS - 1, &mut rng)
        .unwrap()
}

/// The training prefix of [`synthetic_series`].
pub fn synthetic_training_series() -> ObservationSeries {
    synthetic_series().truncated(TRAIN_SNAPSHOTS).unwrap()
}

/// Writes the fixture dataset as the toolkit's input file formats:
/// `edges.csv`, `nodes.csv`, `footprints.csv`, `snapshots_train.csv`,
/// `snapshots_full.csv` (training plus hold-out months), and `points.csv`
/// (one survey point inside the footprint of every infected subsection per
/// month, plus two stray points on the paths, so spatial binning
/// reproduces `snapshots_full.csv` exactly and exercises the reject path).
pub fn write_fixture_files(dir: &Path) -> Result<()> {
    use rand::Rng as _;

    fs::create_dir_all(dir)?;
    let net = fixture_network();
    let note = format!(
        "# synthetic fixture dataset, generated from known parameters (seed {FIXTURE_SEED})\n"
    );
    fs::write(dir.join("edges.csv"), format!("{note}{}", net.edges_to_string()))?;
    fs::write(dir.join("nodes.csv"), format!("{note}{}", net.metadata_to_string()))?;
    fs::write(dir.join("footprints.csv"), format!("{note}{}", net.footprints_to_string()))?;
    let full = synthetic_series();
    fs::write(dir.join("snapshots_full.csv"), format!("{note}{}", full.to_matrix_string()))?;
    let train = full.truncated(TRAIN_SNAPSHOTS)?;
    fs::write(dir.join("snapshots_train.csv"), format!("{note}{}", train.to_matrix_string()))?;

    let mut points = String::from("x,y,snapshot_index\n");
    let mut rng = task_rng(FIXTURE_SEED, 1);
    for (t, snapshot) in full.snapshots().iter().enumerate() {
        for node in snapshot.iter() {
            let (r, c) = (node / COLS, node % COLS);
            let x = c as f64 * 30.0 + 1.0 + rng.random::<f64>() * 25.0;
            let y = r as f64 * 40.0 + 1.0 + rng.random::<f64>() * 34.0;
            points.push_str(&format!("{x},{y},{t}\n"));
        }
    }
    points.push_str("28.5,10.0,0\n148.2,95.5,20\n");
    fs::write(dir.join("points.csv"), format!("{note}{points}"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shape() {
        let net = fixture_network();
        assert_eq!(net.node_count(), 60);
        assert_eq!(net.edge_count(), 108);
        assert!(net.has_all_footprints());
        assert_eq!(net.unplanted().len(), 2);
    }

    #[test]
    fn synthetic_series_is_a_live_epidemic() {
        // The calibration fixture is only useful if the infection neither
        // dies out nor saturates; pin its gross shape.
        let series = synthetic_series();
        assert_eq!(series.snapshot_count(), TRAIN_SNAPSHOTS + HOLDOUT_SNAPSHOTS);
        assert_eq!(series.snapshot(0).len(), SEED_NODES.len());
        assert!(!series.snapshots().last().unwrap().is_empty(), "epidemic died out");
        let peak = series.snapshots().iter().map(NodeSet::len).max().unwrap();
        assert!(peak >= 10, "epidemic never spread (peak {peak})");
        assert!(peak < 58, "epidemic saturated (peak {peak})");
        // Reproducible: the generator is a pure function of the seed.
        assert_eq!(series, synthetic_series());
    }

    #[test]
    fn fixture_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture_files(dir.path()).unwrap();
        let edges = crate::net::parse_edges(
            &std::fs::read_to_string(dir.path().join("edges.csv")).unwrap(),
        )
        .unwrap();
        let meta = crate::net::parse_node_metadata(
            &std::fs::read_to_string(dir.path().join("nodes.csv")).unwrap(),
        )
        .unwrap();
        let net = Network::from_records(&edges, &meta).unwrap();
        assert_eq!(net.edge_count(), fixture_network().edge_count());
        let train = ObservationSeries::parse_matrix(
            &std::fs::read_to_string(dir.path().join("snapshots_train.csv")).unwrap(),
            Some(60),
        )
        .unwrap();
        assert_eq!(train, synthetic_training_series());
        // Binning the survey points recovers the full snapshot series, and
        // exactly the two stray path points are rejected.
        let points = crate::net::parse_points(
            &std::fs::read_to_string(dir.path().join("points.csv")).unwrap(),
        )
        .unwrap();
        let binned = crate::net::bin_points(
            &points,
            &fixture_network(),
            TRAIN_SNAPSHOTS + HOLDOUT_SNAPSHOTS,
            start_month(),
        )
        .unwrap();
        assert_eq!(binned.series, synthetic_series());
        assert_eq!(binned.rejects.len(), 2);
    }

    #[test]
    fn footprints_are_disjoint() {
        let net = fixture_network();
        // Probe each rectangle's center; it must land in its own node only.
        for node in net.node_ids() {
            let i = node.index();
            let (r, c) = (i / COLS, i % COLS);
            let (cx, cy) = (c as f64 * 30.0 + 13.5, r as f64 * 40.0 + 18.0);
            let containing: Vec<u32> = net
                .node_ids()
                .filter(|&n| net.footprint(n).unwrap().contains(cx, cy))
                .map(|n| n.0)
                .collect();
            assert_eq!(containing, vec![node.0]);
        }
    }
}
