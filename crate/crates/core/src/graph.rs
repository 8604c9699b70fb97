//! Link graphs: the multigraph of available links a tree must be drawn from.
//!
//! Parallel links are allowed, self-loops are not. Links carry a length that
//! defines the default precedence order, and optionally a sender/receiver
//! geometry. Link ids survive contraction, so a slot found on a contracted
//! graph is already expressed in the original graph's ids.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeoLink;
use crate::union_find::UnionFind;

/// Relative tolerance between a stored length and its sender-receiver distance.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Input description of one link for [`LinkGraph::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinkSpec {
    pub u: usize,
    pub v: usize,
    pub geometry: Option<GeoLink>,
    pub length: Option<f64>,
}

impl LinkSpec {
    pub fn new(u: usize, v: usize) -> Self {
        LinkSpec {
            u,
            v,
            geometry: None,
            length: None,
        }
    }

    pub fn with_geometry(mut self, geometry: GeoLink) -> Self {
        self.geometry = Some(geometry);
        self
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.length = Some(length);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub u: NodeId,
    pub v: NodeId,
    pub length: f64,
    pub geometry: Option<GeoLink>,
}

impl Link {
    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkGraph {
    node_count: usize,
    // sorted by id
    links: Vec<Link>,
}

/// Result of [`LinkGraph::contract`].
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: LinkGraph,
    /// `node_map[old.0]` is the node `old` was merged into.
    pub node_map: Vec<NodeId>,
}

impl LinkGraph {
    /// Builds a graph whose links get ids `0..links.len()` in input order.
    ///
    /// A link without geometry or an explicit length has length 1.
    pub fn new(node_count: usize, links: Vec<LinkSpec>) -> Result<Self> {
        let links = links
            .into_iter()
            .enumerate()
            .map(|(i, spec)| {
                let id = LinkId(i);
                for node in [spec.u, spec.v] {
                    if node >= node_count {
                        return Err(Error::EndpointOutOfRange {
                            link: id,
                            node: NodeId(node),
                            node_count,
                        });
                    }
                }
                if spec.u == spec.v {
                    return Err(Error::SelfLoop {
                        link: id,
                        node: NodeId(spec.u),
                    });
                }
                let length = resolve_length(id, spec.geometry.as_ref(), spec.length)?;
                Ok(Link {
                    id,
                    u: NodeId(spec.u),
                    v: NodeId(spec.v),
                    length,
                    geometry: spec.geometry,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinkGraph { node_count, links })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link_ids(&self) -> Vec<LinkId> {
        self.links.iter().map(|l| l.id).collect()
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links
            .binary_search_by_key(&id, |l| l.id)
            .ok()
            .map(|i| &self.links[i])
    }

    pub fn try_link(&self, id: LinkId) -> Result<&Link> {
        self.link(id).ok_or(Error::UnknownLink(id))
    }

    pub fn is_geometric(&self) -> bool {
        self.links.iter().all(|l| l.geometry.is_some())
    }

    /// Geometry of every link in id order; fails on the first link without one.
    pub fn geo_links(&self) -> Result<Vec<GeoLink>> {
        self.links
            .iter()
            .map(|l| l.geometry.ok_or(Error::MissingGeometry(l.id)))
            .collect()
    }

    /// Keeps only the given links (node set unchanged).
    pub fn subgraph(&self, keep: &[LinkId]) -> Result<LinkGraph> {
        let mut ids = keep.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let links = ids
            .iter()
            .map(|&id| self.try_link(id).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(LinkGraph {
            node_count: self.node_count,
            links,
        })
    }

    /// Contracts every link of `set`; links that become loops are discarded and
    /// the survivors keep their ids. Merged nodes are renumbered densely in
    /// order of their smallest original member.
    pub fn contract(&self, set: &[LinkId]) -> Result<Contraction> {
        let mut uf = UnionFind::new(self.node_count);
        for &id in set {
            let link = self.try_link(id)?;
            uf.union(link.u.0, link.v.0);
        }
        let mut root_to_new = vec![usize::MAX; self.node_count];
        let mut node_map = Vec::with_capacity(self.node_count);
        let mut next = 0;
        for node in 0..self.node_count {
            let root = uf.find(node);
            if root_to_new[root] == usize::MAX {
                root_to_new[root] = next;
                next += 1;
            }
            node_map.push(NodeId(root_to_new[root]));
        }
        let links = self
            .links
            .iter()
            .filter_map(|l| {
                let (u, v) = (node_map[l.u.0], node_map[l.v.0]);
                (u != v).then(|| Link {
                    u,
                    v,
                    ..l.clone()
                })
            })
            .collect();
        Ok(Contraction {
            graph: LinkGraph {
                node_count: next,
                links,
            },
            node_map,
        })
    }

    pub fn components(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.node_count);
        for l in &self.links {
            uf.union(l.u.0, l.v.0);
        }
        uf
    }

    /// Ok when connected; otherwise names node 0 and the first node outside its component.
    pub fn check_connected(&self) -> Result<()> {
        let mut uf = self.components();
        match (1..self.node_count).find(|&n| !uf.connected(0, n)) {
            Some(b) => Err(Error::Disconnected {
                a: NodeId(0),
                b: NodeId(b),
            }),
            None => Ok(()),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.check_connected().is_ok()
    }

    /// True iff `set` consists of distinct links of this graph and has no cycle.
    pub fn is_forest(&self, set: &[LinkId]) -> bool {
        let mut uf = UnionFind::new(self.node_count);
        let mut seen = std::collections::HashSet::new();
        set.iter().all(|&id| {
            seen.insert(id)
                && self
                    .link(id)
                    .is_some_and(|l| uf.union(l.u.0, l.v.0))
        })
    }

    pub fn is_spanning_tree(&self, set: &[LinkId]) -> bool {
        set.len() + 1 == self.node_count.max(1) && self.is_forest(set)
    }

    /// Minimum spanning tree by link length.
    pub fn kruskal_mst(&self) -> Result<Vec<LinkId>> {
        self.kruskal_mst_by(|l| l.length)
    }

    /// Minimum spanning tree under `key`, ties broken by ascending link id.
    pub fn kruskal_mst_by<F: Fn(&Link) -> f64>(&self, key: F) -> Result<Vec<LinkId>> {
        self.check_connected()?;
        let mut order: Vec<(f64, LinkId)> = self.links.iter().map(|l| (key(l), l.id)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut uf = UnionFind::new(self.node_count);
        let mut tree = Vec::with_capacity(self.node_count.saturating_sub(1));
        for (_, id) in order {
            let l = self.link(id).expect("id taken from this graph");
            if uf.union(l.u.0, l.v.0) {
                tree.push(id);
            }
        }
        Ok(tree)
    }
}

fn resolve_length(id: LinkId, geometry: Option<&GeoLink>, given: Option<f64>) -> Result<f64> {
    match (geometry, given) {
        (Some(g), given) => {
            let d = g.length();
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Input(format!(
                    "link {id} has degenerate geometry (length {d})"
                )));
            }
            if let Some(len) = given {
                if (len - d).abs() > LENGTH_TOLERANCE * d {
                    return Err(Error::Input(format!(
                        "link {id} stores length {len} but its endpoints are {d} apart"
                    )));
                }
                // The stored value wins so that lengths equal by construction tie exactly.
                return Ok(len);
            }
            Ok(d)
        }
        (None, Some(len)) if len >= 0.0 && len.is_finite() => Ok(len),
        (None, Some(len)) => Err(Error::Input(format!("link {id} has invalid length {len}"))),
        (None, None) => Ok(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use proptest::prelude::*;

    fn plain(n: usize, pairs: &[(usize, usize)]) -> LinkGraph {
        LinkGraph::new(n, pairs.iter().map(|&(u, v)| LinkSpec::new(u, v)).collect()).unwrap()
    }

    #[test]
    fn make_graph_examples() {
        assert_eq!(plain(2, &[(0, 1)]).link_count(), 1);
        let g = plain(3, &[(0, 1), (0, 1)]);
        assert_eq!(g.link_count(), 2);
        assert!(matches!(
            LinkGraph::new(2, vec![LinkSpec::new(0, 0)]),
            Err(Error::SelfLoop { .. })
        ));
        assert!(matches!(
            LinkGraph::new(2, vec![LinkSpec::new(0, 2)]),
            Err(Error::EndpointOutOfRange { .. })
        ));
    }

    #[test]
    fn geometric_length_must_match() {
        let geo = GeoLink::new(Point::new(0.0, 0.0), Point::new(3.0, 4.0));
        let g = LinkGraph::new(2, vec![LinkSpec::new(0, 1).with_geometry(geo)]).unwrap();
        assert_eq!(g.links()[0].length, 5.0);
        assert!(LinkGraph::new(2, vec![LinkSpec::new(0, 1).with_geometry(geo).with_length(5.1)]).is_err());
    }

    #[test]
    fn contract_path() {
        // a-b-c, contract ab
        let g = plain(3, &[(0, 1), (1, 2)]);
        let c = g.contract(&[LinkId(0)]).unwrap();
        assert_eq!(c.graph.node_count(), 2);
        assert_eq!(c.graph.link_ids(), vec![LinkId(1)]);
        assert_eq!(c.node_map, vec![NodeId(0), NodeId(0), NodeId(1)]);
    }

    #[test]
    fn contract_triangle() {
        let g = plain(3, &[(0, 1), (1, 2), (2, 0)]);
        let c = g.contract(&[LinkId(0)]).unwrap();
        assert_eq!(c.graph.node_count(), 2);
        let links = c.graph.links();
        assert_eq!(links.len(), 2);
        assert!(links.iter().all(|l| (l.u, l.v) == (NodeId(0), NodeId(1)) || (l.u, l.v) == (NodeId(1), NodeId(0))));

        let c = g.contract(&[LinkId(0), LinkId(1)]).unwrap();
        assert_eq!(c.graph.node_count(), 1);
        assert_eq!(c.graph.link_count(), 0);
    }

    #[test]
    fn contract_unknown_link() {
        let g = plain(2, &[(0, 1)]);
        assert!(matches!(g.contract(&[LinkId(5)]), Err(Error::UnknownLink(LinkId(5)))));
    }

    #[test]
    fn kruskal_examples() {
        let g = plain(2, &[(0, 1)]);
        assert_eq!(g.kruskal_mst().unwrap(), vec![LinkId(0)]);

        // 4-cycle keyed 1,2,3,4 by link index
        let g = plain(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let mut t = g.kruskal_mst_by(|l| (l.id.0 + 1) as f64).unwrap();
        t.sort();
        assert_eq!(t, vec![LinkId(0), LinkId(1), LinkId(2)]);

        let g = plain(4, &[(0, 1), (2, 3)]);
        assert!(matches!(g.kruskal_mst(), Err(Error::Disconnected { .. })));
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (2usize..9).prop_flat_map(|n| {
            let edge = (0..n, 0..n).prop_filter("no loops", |(u, v)| u != v);
            (Just(n), proptest::collection::vec(edge, 0..20))
        })
    }

    proptest! {
        #[test]
        fn contracting_a_forest_drops_one_node_per_link((n, pairs) in arb_graph(), pick in proptest::collection::vec(any::<bool>(), 20)) {
            let g = plain(n, &pairs);
            let mut uf = UnionFind::new(n);
            let forest: Vec<LinkId> = g.links().iter()
                .filter(|l| pick[l.id.0] && uf.union(l.u.0, l.v.0))
                .map(|l| l.id)
                .collect();
            let c = g.contract(&forest).unwrap();
            prop_assert_eq!(c.graph.node_count(), n - forest.len());
            prop_assert!(c.graph.link_count() <= g.link_count());
        }

        #[test]
        fn kruskal_spans((n, mut pairs) in arb_graph(), keys in proptest::collection::vec(0.0f64..10.0, 40)) {
            for i in 1..n { pairs.push((i - 1, i)); }
            let g = plain(n, &pairs);
            let t = g.kruskal_mst_by(|l| keys[l.id.0]).unwrap();
            prop_assert!(g.is_spanning_tree(&t));
            prop_assert_eq!(t.clone(), g.kruskal_mst_by(|l| keys[l.id.0]).unwrap());
        }
    }
}
