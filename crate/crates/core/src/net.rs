//! Plantation network data model and ingestion.
//!
//! A plantation is divided into subsections by dirt paths; each subsection
//! is a node, and nodes whose subsections border each other are linked,
//! giving an undirected network. Observed infections arrive either as a
//! node-by-month 0/1 matrix or as raw point coordinates that are binned to
//! subsections through their footprint polygons.
//!
//! File formats (all comma-separated, `#` lines ignored):
//! - edges: one `u,v` pair per line
//! - node metadata: header, then `id,planted` with planted in {0,1}
//! - footprints: `node_id,vertex_index,x,y`, vertices in order, closed
//!   implicitly
//! - snapshot matrix: header row of `YYYY-MM` labels, then one row of 0/1
//!   values per node

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::month::Month;
use crate::nodeset::NodeSet;

/// Index of a plantation subsection, contiguous in `0..node_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Simple polygon in planar metres; the last vertex connects back to the
/// first implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<(f64, f64)>,
}

impl Polygon {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Data(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Ray-casting containment test (even-odd rule, half-open edges).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let v = &self.vertices;
        let mut inside = false;
        let mut j = v.len() - 1;
        for i in 0..v.len() {
            let (xi, yi) = v[i];
            let (xj, yj) = v[j];
            if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }
}

/// Per-node metadata record from the node file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub planted: bool,
}

/// Undirected network of plantation subsections.
///
/// Immutable after construction; safe to share read-only across concurrent
/// simulations.
#[derive(Debug, Clone)]
pub struct Network {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    neighbors: Vec<Vec<NodeId>>,
    adjacency_masks: Vec<NodeSet>,
    planted: Vec<bool>,
    footprints: Vec<Option<Polygon>>,
}

impl Network {
    /// Builds a network from unordered edge pairs, validating the structural
    /// invariants: no self-loops, no duplicate edges, all endpoints in range.
    pub fn new(
        node_count: usize,
        edge_pairs: impl IntoIterator<Item = (u32, u32)>,
        planted: Vec<bool>,
    ) -> Result<Self> {
        if planted.len() != node_count {
            return Err(Error::Data(format!(
                "planted flags for {} nodes, network has {}",
                planted.len(),
                node_count
            )));
        }
        let mut edges = Vec::new();
        for (a, b) in edge_pairs {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v as usize >= node_count {
                return Err(Error::DanglingNode(v, node_count));
            }
            edges.push((NodeId(u), NodeId(v)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0 .0, w[0].1 .0));
        }

        let mut neighbors = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            neighbors[u.index()].push(v);
            neighbors[v.index()].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let adjacency_masks = neighbors
            .iter()
            .map(|list| NodeSet::from_indices(node_count, list.iter().map(|n| n.index())))
            .collect();

        Ok(Network {
            node_count,
            edges,
            neighbors,
            adjacency_masks,
            planted,
            footprints: vec![None; node_count],
        })
    }

    /// Realizes a network from parsed edge and node-metadata records.
    /// Node ids must be contiguous from 0.
    pub fn from_records(edge_records: &[(u32, u32)], node_records: &[NodeRecord]) -> Result<Self> {
        let node_count = node_records.len();
        let mut planted = vec![false; node_count];
        let mut seen = vec![false; node_count];
        for rec in node_records {
            let idx = rec.id.index();
            if idx >= node_count {
                return Err(Error::Data(format!(
                    "node id {} not contiguous in 0..{node_count}",
                    rec.id
                )));
            }
            if seen[idx] {
                return Err(Error::Data(format!("node id {} listed twice", rec.id)));
            }
            seen[idx] = true;
            planted[idx] = rec.planted;
        }
        Network::new(node_count, edge_records.iter().copied(), planted)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count as u32).map(NodeId)
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn check_node(&self, node: NodeId) -> Result<usize> {
        if node.index() >= self.node_count {
            return Err(Error::NodeOutOfRange(node.0, self.node_count));
        }
        Ok(node.index())
    }

    pub fn degree(&self, node: NodeId) -> Result<usize> {
        Ok(self.neighbors[self.check_node(node)?].len())
    }

    pub fn neighbors(&self, node: NodeId) -> Result<&[NodeId]> {
        Ok(&self.neighbors[self.check_node(node)?])
    }

    /// Count of nodes that are neither `node` itself nor its neighbors.
    pub fn non_neighbor_count(&self, node: NodeId) -> Result<usize> {
        let idx = self.check_node(node)?;
        Ok(self.node_count - 1 - self.neighbors[idx].len())
    }

    /// Bitmask of `node`'s neighbors, for the simulator inner loop.
    #[inline]
    pub fn adjacency_mask(&self, index: usize) -> &NodeSet {
        &self.adjacency_masks[index]
    }

    pub fn is_planted(&self, node: NodeId) -> bool {
        self.planted[node.index()]
    }

    /// Nodes not planted with host plants; they take no part in the dynamics.
    pub fn unplanted(&self) -> NodeSet {
        NodeSet::from_indices(self.node_count, (0..self.node_count).filter(|&i| !self.planted[i]))
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Map from degree to the number of nodes with that degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for list in &self.neighbors {
            *hist.entry(list.len()).or_insert(0) += 1;
        }
        hist
    }

    pub fn footprint(&self, node: NodeId) -> Option<&Polygon> {
        self.footprints[node.index()].as_ref()
    }

    pub fn has_all_footprints(&self) -> bool {
        self.footprints.iter().all(Option::is_some)
    }

    /// Attaches footprint polygons from `(node_id, polygon)` pairs.
    pub fn attach_footprints(&mut self, polygons: Vec<(u32, Polygon)>) -> Result<()> {
        for (id, poly) in polygons {
            let idx = self.check_node(NodeId(id))?;
            self.footprints[idx] = Some(poly);
        }
        Ok(())
    }

    // -- text formats ------------------------------------------------------

    pub fn edges_to_string(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u},{v}\n"));
        }
        out
    }

    pub fn metadata_to_string(&self) -> String {
        let mut out = String::from("id,planted\n");
        for i in 0..self.node_count {
            out.push_str(&format!("{},{}\n", i, u8::from(self.planted[i])));
        }
        out
    }

    pub fn footprints_to_string(&self) -> String {
        let mut out = String::from("node_id,vertex_index,x,y\n");
        for (i, poly) in self.footprints.iter().enumerate() {
            if let Some(poly) = poly {
                for (vi, (x, y)) in poly.vertices().iter().enumerate() {
                    out.push_str(&format!("{i},{vi},{x},{y}\n"));
                }
            }
        }
        out
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_field<T: std::str::FromStr>(field: &str, line_no: usize, what: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line_no}: invalid {what} {field:?}")))
}

/// Parses the edge file: one `u,v` pair per line.
pub fn parse_edges(text: &str) -> Result<Vec<(u32, u32)>> {
    let mut edges = Vec::new();
    for (no, line) in data_lines(text) {
        let (u, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {no}: expected \"u,v\", got {line:?}")))?;
        edges.push((parse_field(u, no, "node id")?, parse_field(v, no, "node id")?));
    }
    Ok(edges)
}

/// Parses the node metadata file: `id,planted` lines after a header.
pub fn parse_node_metadata(text: &str) -> Result<Vec<NodeRecord>> {
    let mut records = Vec::new();
    for (no, line) in data_lines(text) {
        if line.starts_with("id") {
            continue; // header
        }
        let (id, planted) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {no}: expected \"id,planted\"")))?;
        let planted: u8 = parse_field(planted, no, "planted flag")?;
        if planted > 1 {
            return Err(Error::Parse(format!("line {no}: planted flag must be 0 or 1")));
        }
        records.push(NodeRecord {
            id: NodeId(parse_field(id, no, "node id")?),
            planted: planted == 1,
        });
    }
    Ok(records)
}

/// Parses the footprint file: `node_id,vertex_index,x,y` lines after a
/// header, vertices in order per node.
pub fn parse_footprints(text: &str) -> Result<Vec<(u32, Polygon)>> {
    let mut per_node: BTreeMap<u32, Vec<(u32, f64, f64)>> = BTreeMap::new();
    for (no, line) in data_lines(text) {
        if line.starts_with("node_id") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("line {no}: expected \"node_id,vertex_index,x,y\"")));
        }
        let id: u32 = parse_field(fields[0], no, "node id")?;
        let vi: u32 = parse_field(fields[1], no, "vertex index")?;
        let x: f64 = parse_field(fields[2], no, "x coordinate")?;
        let y: f64 = parse_field(fields[3], no, "y coordinate")?;
        per_node.entry(id).or_default().push((vi, x, y));
    }
    let mut polygons = Vec::new();
    for (id, mut verts) in per_node {
        verts.sort_by_key(|&(vi, _, _)| vi);
        polygons.push((id, Polygon::new(verts.into_iter().map(|(_, x, y)| (x, y)).collect())?));
    }
    Ok(polygons)
}

/// Node-by-snapshot infection presence: `true` means the subsection held at
/// least one infected plant at that monthly inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    snapshots: Vec<NodeSet>,
    months: Vec<Month>,
}

impl ObservationSeries {
    pub fn new(snapshots: Vec<NodeSet>, months: Vec<Month>) -> Result<Self> {
        if snapshots.len() < 2 {
            return Err(Error::Data(format!(
                "observation series needs at least 2 snapshots, got {}",
                snapshots.len()
            )));
        }
        if snapshots.len() != months.len() {
            return Err(Error::Data(format!(
                "{} snapshots but {} month labels",
                snapshots.len(),
                months.len()
            )));
        }
        for w in months.windows(2) {
            if w[0].next() != w[1] {
                return Err(Error::Data(format!(
                    "month labels must increase by one month: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let cap = snapshots[0].capacity();
        if snapshots.iter().any(|s| s.capacity() != cap) {
            return Err(Error::Data("snapshots disagree on node count".into()));
        }
        Ok(ObservationSeries { snapshots, months })
    }

    pub fn node_count(&self) -> usize {
        self.snapshots[0].capacity()
    }

    pub fn snapshot_count(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshots(&self) -> &[NodeSet] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> &NodeSet {
        &self.snapshots[t]
    }

    pub fn months(&self) -> &[Month] {
        &self.months
    }

    pub fn start_month(&self) -> Month {
        self.months[0]
    }

    /// First `count` snapshots as a series (training split).
    pub fn truncated(&self, count: usize) -> Result<ObservationSeries> {
        if count > self.snapshots.len() {
            return Err(Error::Data(format!(
                "cannot truncate {}-snapshot series to {count}",
                self.snapshots.len()
            )));
        }
        ObservationSeries::new(self.snapshots[..count].to_vec(), self.months[..count].to_vec())
    }

    /// Parses the snapshot matrix format; `expected_nodes`, when given,
    /// is validated against the row count.
    pub fn parse_matrix(text: &str, expected_nodes: Option<usize>) -> Result<Self> {
        let mut lines = data_lines(text);
        let (_, header) =
            lines.next().ok_or_else(|| Error::Parse("snapshot matrix is empty".into()))?;
        let months: Vec<Month> =
            header.split(',').map(|m| m.trim().parse()).collect::<Result<_>>()?;
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for (no, line) in lines {
            let row: Vec<bool> = line
                .split(',')
                .map(|f| match f.trim() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => {
                        Err(Error::Parse(format!("line {no}: cell must be 0/1, got {other:?}")))
                    }
                })
                .collect::<Result<_>>()?;
            if row.len() != months.len() {
                return Err(Error::Parse(format!(
                    "line {no}: {} cells for {} month columns",
                    row.len(),
                    months.len()
                )));
            }
            rows.push(row);
        }
        if let Some(n) = expected_nodes {
            if rows.len() != n {
                return Err(Error::Data(format!(
                    "snapshot matrix has {} rows, network has {n} nodes",
                    rows.len()
                )));
            }
        }
        let node_count = rows.len();
        let snapshots = (0..months.len())
            .map(|t| NodeSet::from_indices(node_count, (0..node_count).filter(|&n| rows[n][t])))
            .collect();
        ObservationSeries::new(snapshots, months)
    }

    pub fn to_matrix_string(&self) -> String {
        let mut out = String::new();
        let labels: Vec<String> = self.months.iter().map(Month::to_string).collect();
        out.push_str(&labels.join(","));
        out.push('\n');
        for n in 0..self.node_count() {
            let row: Vec<&str> =
                self.snapshots.iter().map(|s| if s.contains(n) { "1" } else { "0" }).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// One georeferenced infection sighting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointObservation {
    pub x: f64,
    pub y: f64,
    pub snapshot_index: usize,
}

/// Parses the point file: `x,y,snapshot_index` lines after a header.
pub fn parse_points(text: &str) -> Result<Vec<PointObservation>> {
    let mut points = Vec::new();
    for (no, line) in data_lines(text) {
        if line.starts_with('x') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {no}: expected \"x,y,snapshot_index\"")));
        }
        points.push(PointObservation {
            x: parse_field(fields[0], no, "x coordinate")?,
            y: parse_field(fields[1], no, "y coordinate")?,
            snapshot_index: parse_field(fields[2], no, "snapshot index")?,
        });
    }
    Ok(points)
}

/// Result of binning point observations to subsections.
#[derive(Debug, Clone)]
pub struct BinnedPoints {
    pub series: ObservationSeries,
    /// Points that fell inside no footprint polygon, in input order.
    pub rejects: Vec<PointObservation>,
}

/// Bins point observations to subsections by footprint containment.
///
/// A cell `(n, t)` is set when at least one point of snapshot `t` lies in
/// node `n`'s polygon. Points claimed by several polygons (boundaries) go to
/// the lowest-index node; points inside none are reported, not fatal.
pub fn bin_points(
    points: &[PointObservation],
    network: &Network,
    snapshots: usize,
    start_month: Month,
) -> Result<BinnedPoints> {
    for node in network.node_ids() {
        if network.footprint(node).is_none() {
            return Err(Error::MissingFootprint(node.0));
        }
    }
    if snapshots < 2 {
        return Err(Error::Data("need at least 2 snapshots".into()));
    }
    let node_count = network.node_count();
    let mut states = vec![NodeSet::new(node_count); snapshots];
    let mut rejects = Vec::new();
    for point in points {
        if point.snapshot_index >= snapshots {
            return Err(Error::Data(format!(
                "point ({}, {}) has snapshot index {} outside 0..{snapshots}",
                point.x, point.y, point.snapshot_index
            )));
        }
        let hit =
            network.node_ids().find(|&n| network.footprint(n).unwrap().contains(point.x, point.y));
        match hit {
            Some(node) => states[point.snapshot_index].insert(node.index()),
            None => rejects.push(*point),
        }
    }
    let series = ObservationSeries::new(states, start_month.sequence(snapshots))?;
    Ok(BinnedPoints { series, rejects })
}
