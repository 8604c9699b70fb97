//! Instance generators. All randomness comes from an explicit seed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GeoLink, Point};
use crate::error::{Error, Result};
use crate::graph::{LinkGraph, LinkSpec};

/// A geometric link graph and the positions of its nodes.
#[derive(Clone, Debug)]
pub struct GeneratedGraph {
    pub graph: LinkGraph,
    pub positions: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WheelLinkKind {
    /// From the hub to the inner end of a spoke.
    Ordinary,
    /// Between consecutive nodes of a spoke, length 1.
    Tiny,
    /// Between the outer ends of consecutive spokes.
    Yuge,
}

/// The hub-spokes-rim instance on which the length-based MST schedules badly.
#[derive(Clone, Debug)]
pub struct Wheel {
    pub graph: LinkGraph,
    /// Kind of each link, indexed by link id.
    pub kinds: Vec<WheelLinkKind>,
    pub positions: Vec<Point>,
    pub k: usize,
    /// Nodes per spoke, `2k²`.
    pub spoke_len: usize,
}

impl Wheel {
    /// Node `v_{i,j}`; node 0 is the hub.
    pub fn node(&self, i: usize, j: usize) -> usize {
        1 + i * self.spoke_len + j
    }

    pub fn links_of(&self, kind: WheelLinkKind) -> Vec<crate::graph::LinkId> {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == kind)
            .map(|(i, _)| crate::graph::LinkId(i))
            .collect()
    }
}

/// Builds the wheel for `k ≥ 3`: spoke `i` has nodes `v_{i,j}` at angle
/// `2πi/k` and radius `k + j`, `j < 2k²`. Ordinary links join the hub to
/// `v_{i,1}`, or to `v_{i,0}` with `attach_at_zero`.
pub fn gen_wheel(k: usize, attach_at_zero: bool) -> Result<Wheel> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!(
            "wheel needs k >= 3, got {k} (k = 2 duplicates the rim links)"
        )));
    }
    let spoke_len = 2 * k * k;
    let mut positions = Vec::with_capacity(1 + k * spoke_len);
    positions.push(Point::new(0.0, 0.0));
    for i in 0..k {
        let angle = 2.0 * PI * i as f64 / k as f64;
        for j in 0..spoke_len {
            positions.push(Point::polar((k + j) as f64, angle));
        }
    }
    let node = |i: usize, j: usize| 1 + i * spoke_len + j;
    let attach = usize::from(!attach_at_zero);

    let mut pairs = Vec::new();
    let mut kinds = Vec::new();
    for i in 0..k {
        pairs.push((0, node(i, attach)));
        kinds.push(WheelLinkKind::Ordinary);
    }
    for i in 0..k {
        for j in 0..spoke_len - 1 {
            pairs.push((node(i, j), node(i, j + 1)));
            kinds.push(WheelLinkKind::Tiny);
        }
    }
    for i in 0..k {
        pairs.push((node(i, spoke_len - 1), node((i + 1) % k, spoke_len - 1)));
        kinds.push(WheelLinkKind::Yuge);
    }

    // Exact lengths keep links of equal length tied, so ids decide their order.
    let rim_radius = (k + spoke_len - 1) as f64;
    let exact = |kind: WheelLinkKind| match kind {
        WheelLinkKind::Ordinary => (k + attach) as f64,
        WheelLinkKind::Tiny => 1.0,
        WheelLinkKind::Yuge => 2.0 * rim_radius * (PI / k as f64).sin(),
    };
    let specs = pairs
        .iter()
        .zip(&kinds)
        .map(|(&(u, v), &kind)| {
            LinkSpec::new(u, v)
                .with_geometry(GeoLink::new(positions[u], positions[v]))
                .with_length(exact(kind))
        })
        .collect();
    let graph = LinkGraph::new(positions.len(), specs)?;

    let longest_ordinary = graph.links()[..k].iter().map(|l| l.length).fold(0.0, f64::max);
    let shortest_yuge = graph.links()[graph.link_count() - k..]
        .iter()
        .map(|l| l.length)
        .fold(f64::INFINITY, f64::min);
    if shortest_yuge <= longest_ordinary {
        return Err(Error::Internal(format!(
            "wheel rim link of length {shortest_yuge} is not longer than spoke attachment {longest_ordinary}"
        )));
    }
    Ok(Wheel {
        graph,
        kinds,
        positions,
        k,
        spoke_len,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomLinkParams {
    pub n: usize,
    /// Nodes are placed uniformly in `[0, side]²`.
    pub side: f64,
    /// Probability that a pair at distance in `(1, reach]` is linked.
    pub p: f64,
    /// Longest possible link; pairs within distance 1 are always linked.
    pub reach: f64,
    pub seed: u64,
    /// Placements to try before giving up on connectivity.
    pub attempts: usize,
}

impl RandomLinkParams {
    pub fn new(n: usize, side: f64, p: f64, reach: f64, seed: u64) -> Self {
        RandomLinkParams {
            n,
            side,
            p,
            reach,
            seed,
            attempts: 100,
        }
    }
}

/// Random geometric link graph with missing long links, regenerated until connected.
pub fn gen_random_missing_links(params: RandomLinkParams) -> Result<GeneratedGraph> {
    let RandomLinkParams {
        n,
        side,
        p,
        reach,
        seed,
        attempts,
    } = params;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::InvalidParameter(format!("side {side} must be positive")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} must lie in [0, 1]")));
    }
    if !(reach >= 1.0 && reach.is_finite()) {
        return Err(Error::InvalidParameter(format!("reach {reach} must be at least 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let positions: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
            .collect();
        let mut specs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let d = positions[u].distance(positions[v]);
                if d == 0.0 || d > reach {
                    continue;
                }
                if d <= 1.0 || rng.gen_bool(p) {
                    specs.push(LinkSpec::new(u, v).with_geometry(GeoLink::new(positions[u], positions[v])));
                }
            }
        }
        let graph = LinkGraph::new(n, specs)?;
        if graph.is_connected() {
            return Ok(GeneratedGraph { graph, positions });
        }
    }
    Err(Error::InvalidParameter(format!(
        "no connected instance in {attempts} attempts (n = {n}, side = {side}, p = {p}, reach = {reach}, seed = {seed})"
    )))
}

/// A `rows × cols` grid of nodes `spacing` apart with links between horizontal
/// and vertical neighbors.
pub fn gen_grid(rows: usize, cols: usize, spacing: f64) -> Result<GeneratedGraph> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidParameter(format!("grid {rows}x{cols} needs at least 2 nodes")));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidParameter(format!("spacing {spacing} must be positive")));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let positions: Vec<Point> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| Point::new(c as f64 * spacing, r as f64 * spacing)))
        .collect();
    let mut specs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let mut neighbors = Vec::new();
            if c + 1 < cols {
                neighbors.push(id(r, c + 1));
            }
            if r + 1 < rows {
                neighbors.push(id(r + 1, c));
            }
            for v in neighbors {
                let u = id(r, c);
                specs.push(
                    LinkSpec::new(u, v)
                        .with_geometry(GeoLink::new(positions[u], positions[v]))
                        .with_length(spacing),
                );
            }
        }
    }
    Ok(GeneratedGraph {
        graph: LinkGraph::new(positions.len(), specs)?,
        positions,
    })
}
