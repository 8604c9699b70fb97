//! Graph-based and range-based 0/1 conflict models.

use std::collections::HashSet;

use super::GeoLink;
use crate::conflict::{symmetric_unit_weights, ConflictGraph};
use crate::error::Result;
use crate::graph::{Link, LinkGraph, LinkId};

/// Two links conflict when they share an endpoint or some link of `g` joins
/// an endpoint of one to an endpoint of the other.
pub fn l2_conflict_graph(g: &LinkGraph) -> Result<ConflictGraph> {
    let mut adjacent: HashSet<(usize, usize)> = HashSet::new();
    for l in g.links() {
        adjacent.insert((l.u.0, l.v.0));
        adjacent.insert((l.v.0, l.u.0));
    }
    let near = |a: usize, b: usize| a == b || adjacent.contains(&(a, b));
    pairwise(g, |e, f| {
        [e.u.0, e.v.0]
            .iter()
            .any(|&a| [f.u.0, f.v.0].iter().any(|&b| near(a, b)))
    })
}

/// Two links conflict when they share an endpoint.
pub fn line_graph_conflicts(g: &LinkGraph) -> Result<ConflictGraph> {
    pairwise(g, |e, f| e.u == f.u || e.u == f.v || e.v == f.u || e.v == f.v)
}

fn pairwise<F: Fn(&Link, &Link) -> bool>(g: &LinkGraph, conflict: F) -> Result<ConflictGraph> {
    let links = g.links();
    let mut pairs = Vec::new();
    for (i, e) in links.iter().enumerate() {
        for f in &links[i + 1..] {
            if conflict(e, f) {
                pairs.push((e.id, f.id));
            }
        }
    }
    ConflictGraph::for_graph(g, symmetric_unit_weights(pairs))
}

/// Disk model: conflict iff the segments come closer than `k` times the
/// longer link's length.
pub fn disk_conflict_graph(links: &[GeoLink], k: f64) -> Result<ConflictGraph> {
    protocol_conflict_graph(links, k, 0.0)
}

/// Protocol model: conflict iff the segments come closer than
/// `k1 · longer + k2 · shorter`.
pub fn protocol_conflict_graph(links: &[GeoLink], k1: f64, k2: f64) -> Result<ConflictGraph> {
    for (name, value) in [("K1", k1), ("K2", k2)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(crate::error::Error::InvalidParameter(format!(
                "{name} = {value} must be a nonnegative number"
            )));
        }
    }
    let lengths: Vec<f64> = links.iter().map(GeoLink::length).collect();
    let mut pairs = Vec::new();
    for i in 0..links.len() {
        for j in i + 1..links.len() {
            let (long, short) = if lengths[i] >= lengths[j] {
                (lengths[i], lengths[j])
            } else {
                (lengths[j], lengths[i])
            };
            if links[i].segment_distance(&links[j]) < k1 * long + k2 * short {
                pairs.push((LinkId(i), LinkId(j)));
            }
        }
    }
    ConflictGraph::new(
        lengths.iter().enumerate().map(|(i, &len)| (LinkId(i), len)).collect(),
        symmetric_unit_weights(pairs),
    )
}

#[cfg(test)]
mod tests {
    use super::super::Point;
    use super::*;
    use crate::graph::LinkSpec;

    fn plain(n: usize, pairs: &[(usize, usize)]) -> LinkGraph {
        LinkGraph::new(n, pairs.iter().map(|&(u, v)| LinkSpec::new(u, v)).collect()).unwrap()
    }

    fn unit_link(x: f64, y: f64) -> GeoLink {
        GeoLink::new(Point::new(x, y), Point::new(x + 1.0, y))
    }

    #[test]
    fn line_graph_of_star_is_triangle() {
        let c = line_graph_conflicts(&plain(4, &[(0, 1), (0, 2), (0, 3)])).unwrap();
        assert_eq!(c.weights().count(), 6);
    }

    #[test]
    fn l2_of_path_is_complete() {
        let c = l2_conflict_graph(&plain(4, &[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(c.weight(LinkId(0), LinkId(2)), 1.0);
        assert_eq!(c.weights().count(), 6);
        // line graph of the same path misses e1-e3
        let lg = line_graph_conflicts(&plain(4, &[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(lg.weight(LinkId(0), LinkId(2)), 0.0);
    }

    #[test]
    fn l2_separate_components_do_not_conflict() {
        let c = l2_conflict_graph(&plain(4, &[(0, 1), (2, 3)])).unwrap();
        assert_eq!(c.weights().count(), 0);
    }

    #[test]
    fn disk_examples() {
        let c = disk_conflict_graph(&[unit_link(0.0, 0.0), unit_link(0.0, 0.0)], 1.0).unwrap();
        assert_eq!(c.weight(LinkId(0), LinkId(1)), 1.0);
        let c = disk_conflict_graph(&[unit_link(0.0, 0.0), unit_link(0.0, 10.0)], 2.0).unwrap();
        assert_eq!(c.weights().count(), 0);
        let c = protocol_conflict_graph(&[unit_link(0.0, 0.0), unit_link(0.0, 1.5)], 1.0, 1.0).unwrap();
        assert_eq!(c.weight(LinkId(1), LinkId(0)), 1.0);
    }
}
