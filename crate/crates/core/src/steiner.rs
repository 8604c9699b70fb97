//! Steiner connectivity scheduling through the ℓ∞ multi-dimensional Steiner
//! tree problem.
//!
//! Every link `e` of the conflict graph is a dimension. A link `f` weighs 1 in
//! dimension `e` when `e ≺ f` and the two conflict, so the load of a tree in
//! dimension `e` counts the later tree links adjacent to `e`. With `Z` the
//! largest load, coloring the tree in reverse `≺` order needs at most `Z + 1`
//! slots.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::conflict::{ConflictGraph, Slot, Sweep};
use crate::error::{Error, Result};
use crate::geometry::length_class;
use crate::graph::{LinkGraph, LinkId, NodeId};
use crate::schedule::{verify, Schedule, Target};
use crate::union_find::UnionFind;

/// A link graph, a terminal set and a 0/1 symmetric conflict graph over its links.
#[derive(Clone, Debug)]
pub struct SteinerInstance {
    graph: LinkGraph,
    terminals: Vec<NodeId>,
    conflicts: ConflictGraph,
}

impl SteinerInstance {
    pub fn new(graph: LinkGraph, terminals: Vec<NodeId>, conflicts: ConflictGraph) -> Result<Self> {
        let mut terminals = terminals;
        terminals.sort_unstable();
        terminals.dedup();
        if terminals.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a Steiner instance needs at least 2 terminals, got {}",
                terminals.len()
            )));
        }
        if let Some(&t) = terminals.iter().find(|t| t.0 >= graph.node_count()) {
            return Err(Error::UnknownNode(t));
        }
        if let Some(l) = graph.links().iter().find(|l| !conflicts.contains(l.id)) {
            return Err(Error::UnknownLink(l.id));
        }
        conflicts.check_unweighted()?;
        Ok(SteinerInstance {
            graph,
            terminals,
            conflicts,
        })
    }

    pub fn graph(&self) -> &LinkGraph {
        &self.graph
    }

    /// Sorted and deduplicated.
    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn conflicts(&self) -> &ConflictGraph {
        &self.conflicts
    }

    /// Fails with the first terminal not reachable from the smallest one.
    pub fn check_terminals_connected(&self) -> Result<()> {
        let mut uf = self.graph.components();
        let a = self.terminals[0];
        match self.terminals.iter().find(|t| !uf.connected(a.0, t.0)) {
            Some(&b) => Err(Error::TerminalsDisconnected { a, b }),
            None => Ok(()),
        }
    }
}

/// The 0/1 weight vectors of all links, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmstWeights {
    // dims[f.0]: sorted dimensions in which link f weighs 1
    dims: Vec<Vec<LinkId>>,
    dimension_count: usize,
}

impl MmstWeights {
    /// Dimensions in which `f` weighs 1, sorted.
    pub fn of(&self, f: LinkId) -> &[LinkId] {
        self.dims.get(f.0).map_or(&[], Vec::as_slice)
    }

    pub fn weight(&self, f: LinkId, dim: LinkId) -> u32 {
        u32::from(self.of(f).binary_search(&dim).is_ok())
    }

    /// Load vector of a link set.
    pub fn load(&self, links: &[LinkId]) -> LoadVector {
        let mut load = LoadVector::zero(self.dimension_count);
        for &f in links {
            load.add(self.of(f));
        }
        load
    }
}

/// Weight vectors of the reduction. With `same_length_class_only`, links of
/// different classes `⌊log₂(len / min)⌋` weigh nothing in each other's dimension.
pub fn mmst_weights(inst: &SteinerInstance, same_length_class_only: bool) -> MmstWeights {
    let c = &inst.conflicts;
    let g = &inst.graph;
    let min = g.links().iter().map(|l| l.length).fold(f64::INFINITY, f64::min);
    let class = |id: LinkId| g.link(id).map(|l| length_class(l.length, min));
    let size = g.links().iter().map(|l| l.id.0 + 1).max().unwrap_or(0);
    let mut dims = vec![Vec::new(); size];
    for link in g.links() {
        let f = link.id;
        dims[f.0] = c
            .in_weights(f)
            .iter()
            .filter(|&&(e, w)| w == 1.0 && c.precedes(e, f))
            .filter(|&&(e, _)| !same_length_class_only || class(e) == class(f))
            .map(|&(e, _)| e)
            .collect();
    }
    let dimension_count = c.universe().iter().map(|e| e.0 + 1).max().unwrap_or(0);
    MmstWeights { dims, dimension_count }
}

/// Per-dimension integer loads with the maximum kept up to date.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadVector {
    loads: Vec<u32>,
    max: u32,
}

impl LoadVector {
    pub fn zero(dimensions: usize) -> Self {
        LoadVector {
            loads: vec![0; dimensions],
            max: 0,
        }
    }

    pub fn get(&self, dim: LinkId) -> u32 {
        self.loads.get(dim.0).copied().unwrap_or(0)
    }

    pub fn linf(&self) -> u32 {
        self.max
    }

    /// Adds a 0/1 vector given by the dimensions where it is 1.
    pub fn add(&mut self, dims: &[LinkId]) {
        for d in dims {
            if d.0 >= self.loads.len() {
                self.loads.resize(d.0 + 1, 0);
            }
            self.loads[d.0] += 1;
            self.max = self.max.max(self.loads[d.0]);
        }
    }

    /// Dimensions attaining the maximum, ascending.
    pub fn argmax(&self) -> Vec<LinkId> {
        if self.max == 0 {
            return Vec::new();
        }
        (0..self.loads.len())
            .filter(|&d| self.loads[d] == self.max)
            .map(LinkId)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinerTree {
    /// Sorted by id.
    pub links: Vec<LinkId>,
    pub load: LoadVector,
}

// Sparse path load: dimension counts added by the path so far, sorted by dimension.
type PathLoad = Vec<(LinkId, u32)>;

struct Label {
    linf: u32,
    extra: PathLoad,
    via: Option<(LinkId, usize)>,
}

/// Greedy Steiner tree for the ℓ∞ load.
///
/// Starting from the terminals as singleton components, each step connects
/// two components by the path whose addition gives the smallest ℓ∞ load,
/// then the fewest links, then the smaller link ids. Paths are found by a
/// best-first search from each component keyed on (load, hops, node).
pub fn greedy_mmst(inst: &SteinerInstance, weights: &MmstWeights) -> Result<SteinerTree> {
    inst.check_terminals_connected()?;
    let g = &inst.graph;
    let n = g.node_count();
    let mut adjacency: Vec<Vec<(LinkId, usize)>> = vec![Vec::new(); n];
    for l in g.links() {
        adjacency[l.u.0].push((l.id, l.v.0));
        adjacency[l.v.0].push((l.id, l.u.0));
    }

    let mut uf = UnionFind::new(n);
    let mut in_tree = vec![false; n];
    for t in &inst.terminals {
        in_tree[t.0] = true;
    }
    let mut tree: Vec<LinkId> = Vec::new();
    let mut load = LoadVector::zero(weights.dimension_count);

    loop {
        let mut roots: Vec<usize> = inst.terminals.iter().map(|t| uf.find(t.0)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() <= 1 {
            break;
        }
        let mut best: Option<(u32, usize, Vec<LinkId>)> = None;
        for &root in &roots {
            if let Some(candidate) = cheapest_path(root, &adjacency, &mut uf, &in_tree, &load, weights) {
                let better = match &best {
                    None => true,
                    Some((z, h, p)) => (candidate.0, candidate.1, &candidate.2) < (*z, *h, p),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        let (_, _, path) = best.ok_or_else(|| Error::Internal("no path joins two terminal components".into()))?;
        for &id in &path {
            let l = g.try_link(id)?;
            uf.union(l.u.0, l.v.0);
            in_tree[l.u.0] = true;
            in_tree[l.v.0] = true;
            load.add(weights.of(id));
            tree.push(id);
        }
    }
    tree.sort_unstable();
    Ok(SteinerTree { links: tree, load })
}

// Best path from the component of `root` to a node of another tree component.
// Returns (resulting ℓ∞, hops, sorted link ids).
fn cheapest_path(
    root: usize,
    adjacency: &[Vec<(LinkId, usize)>],
    uf: &mut UnionFind,
    in_tree: &[bool],
    load: &LoadVector,
    weights: &MmstWeights,
) -> Option<(u32, usize, Vec<LinkId>)> {
    let n = adjacency.len();
    let mut labels: Vec<Label> = Vec::new();
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    for (v, &member) in in_tree.iter().enumerate() {
        if member && uf.find(v) == root {
            labels.push(Label {
                linf: load.linf(),
                extra: Vec::new(),
                via: None,
            });
            heap.push(Reverse((load.linf(), 0usize, v, labels.len() - 1)));
        }
    }
    while let Some(Reverse((linf, hops, v, label))) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        if hops > 0 && in_tree[v] {
            // Reached another component; unwind the path.
            let mut path = Vec::with_capacity(hops);
            let mut at = label;
            while let Some((id, prev)) = labels[at].via {
                path.push(id);
                at = prev;
            }
            path.sort_unstable();
            return Some((linf, hops, path));
        }
        for &(id, w) in &adjacency[v] {
            if settled[w] || (in_tree[w] && uf.find(w) == root) {
                continue;
            }
            let (extra, next_linf) = extend(&labels[label].extra, labels[label].linf, weights.of(id), load);
            labels.push(Label {
                linf: next_linf,
                extra,
                via: Some((id, label)),
            });
            heap.push(Reverse((next_linf, hops + 1, w, labels.len() - 1)));
        }
    }
    None
}

fn extend(extra: &PathLoad, linf: u32, dims: &[LinkId], load: &LoadVector) -> (PathLoad, u32) {
    let mut merged = Vec::with_capacity(extra.len() + dims.len());
    let (mut i, mut j) = (0, 0);
    let mut linf = linf;
    while i < extra.len() || j < dims.len() {
        let entry = match (extra.get(i), dims.get(j)) {
            (Some(&(d, c)), Some(&e)) if d == e => {
                i += 1;
                j += 1;
                (d, c + 1)
            }
            (Some(&(d, c)), Some(&e)) if d < e => {
                i += 1;
                (d, c)
            }
            (Some(&(d, c)), None) => {
                i += 1;
                (d, c)
            }
            (_, Some(&e)) => {
                j += 1;
                (e, 1)
            }
            (None, None) => unreachable!(),
        };
        linf = linf.max(load.get(entry.0) + entry.1);
        merged.push(entry);
    }
    (merged, linf)
}

/// A Steiner tree, its schedule and the tree's ℓ∞ load.
#[derive(Clone, Debug)]
pub struct SteinerSchedule {
    pub schedule: Schedule,
    pub tree: SteinerTree,
    /// ℓ∞ load `Z` of the tree.
    pub z: u32,
}

/// Greedy tree under the plain reduction, colored in reverse `≺` order.
pub fn steiner_schedule(inst: &SteinerInstance) -> Result<SteinerSchedule> {
    steiner_schedule_with(inst, false)
}

/// As [`steiner_schedule`]; with `by_length_class`, each length class is
/// weighted and colored separately and the class schedules are concatenated.
pub fn steiner_schedule_with(inst: &SteinerInstance, by_length_class: bool) -> Result<SteinerSchedule> {
    let weights = mmst_weights(inst, by_length_class);
    let tree = greedy_mmst(inst, &weights)?;
    let z = tree.load.linf();
    let c = &inst.conflicts;

    let groups: Vec<Vec<LinkId>> = if by_length_class {
        let g = &inst.graph;
        let min = g.links().iter().map(|l| l.length).fold(f64::INFINITY, f64::min);
        let mut classes: std::collections::BTreeMap<u32, Vec<LinkId>> = Default::default();
        for &id in &tree.links {
            classes.entry(length_class(g.try_link(id)?.length, min)).or_default().push(id);
        }
        classes.into_values().collect()
    } else {
        vec![tree.links.clone()]
    };

    let mut slots: Vec<Slot> = Vec::new();
    for group in groups {
        let colored = c.greedy_color_in(&group, Sweep::Reverse)?;
        if colored.len() > z as usize + 1 {
            return Err(Error::Internal(format!(
                "reverse greedy used {} slots on a tree of load {z}",
                colored.len()
            )));
        }
        slots.extend(colored);
    }
    let schedule = Schedule::from_slots(slots);
    let check = verify(&inst.graph, c, &schedule, Target::Steiner(&inst.terminals));
    if let Some(v) = check.first_violation() {
        return Err(Error::Internal(format!("Steiner schedule failed verification: {v}")));
    }
    Ok(SteinerSchedule { schedule, tree, z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::symmetric_unit_weights;
    use crate::geometry::l2_conflict_graph;
    use crate::graph::LinkSpec;

    fn graph(n: usize, pairs: &[(usize, usize)]) -> LinkGraph {
        LinkGraph::new(n, pairs.iter().map(|&(u, v)| LinkSpec::new(u, v)).collect()).unwrap()
    }

    fn instance(n: usize, pairs: &[(usize, usize)], terminals: &[usize], conflicts: &[(usize, usize)]) -> SteinerInstance {
        let g = graph(n, pairs);
        let c = ConflictGraph::for_graph(
            &g,
            symmetric_unit_weights(conflicts.iter().map(|&(a, b)| (LinkId(a), LinkId(b)))),
        )
        .unwrap();
        SteinerInstance::new(g, terminals.iter().map(|&t| NodeId(t)).collect(), c).unwrap()
    }

    #[test]
    fn instance_validation() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = ConflictGraph::for_graph(&g, vec![]).unwrap();
        assert!(SteinerInstance::new(g.clone(), vec![NodeId(0)], c.clone()).is_err());
        assert!(SteinerInstance::new(g.clone(), vec![NodeId(0), NodeId(5)], c).is_err());
        let weighted = ConflictGraph::for_graph(&g, vec![(LinkId(0), LinkId(1), 0.5)]).unwrap();
        assert!(matches!(
            SteinerInstance::new(g, vec![NodeId(0), NodeId(2)], weighted),
            Err(Error::NotUnweighted { .. })
        ));
    }

    #[test]
    fn weight_examples() {
        let inst = instance(4, &[(0, 1), (1, 2), (2, 3)], &[0, 3], &[]);
        let w = mmst_weights(&inst, false);
        assert!(inst.graph.link_ids().iter().all(|&f| w.of(f).is_empty()));

        let inst = instance(3, &[(0, 1), (1, 2)], &[0, 2], &[(0, 1)]);
        let w = mmst_weights(&inst, false);
        assert_eq!(w.of(LinkId(1)), &[LinkId(0)]);
        assert!(w.of(LinkId(0)).is_empty());

        let inst = instance(4, &[(0, 1), (1, 2), (2, 3)], &[0, 3], &[(0, 1), (1, 2), (0, 2)]);
        let w = mmst_weights(&inst, false);
        assert_eq!(w.of(LinkId(1)), &[LinkId(0)]);
        assert_eq!(w.of(LinkId(2)), &[LinkId(0), LinkId(1)]);
    }

    #[test]
    fn length_classes_separate_dimensions() {
        let g = LinkGraph::new(3, vec![LinkSpec::new(0, 1).with_length(1.0), LinkSpec::new(1, 2).with_length(4.0)]).unwrap();
        let c = ConflictGraph::for_graph(&g, symmetric_unit_weights([(LinkId(0), LinkId(1))])).unwrap();
        let inst = SteinerInstance::new(g, vec![NodeId(0), NodeId(2)], c).unwrap();
        assert_eq!(mmst_weights(&inst, false).of(LinkId(1)), &[LinkId(0)]);
        assert!(mmst_weights(&inst, true).of(LinkId(1)).is_empty());
    }

    #[test]
    fn all_terminals_zero_conflicts_gives_spanning_tree() {
        let inst = instance(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], &[0, 1, 2, 3], &[]);
        let t = greedy_mmst(&inst, &mmst_weights(&inst, false)).unwrap();
        assert!(inst.graph.is_spanning_tree(&t.links));
        assert_eq!(t.load.linf(), 0);
        assert_eq!(steiner_schedule(&inst).unwrap().schedule.slot_count(), 1);
    }

    #[test]
    fn greedy_prefers_the_light_path() {
        // the two links of 0-1-3 conflict; 0-2-3 is free
        let pairs = [(0, 1), (1, 3), (0, 2), (2, 3)];
        let inst = instance(4, &pairs, &[0, 3], &[(0, 1)]);
        let t = greedy_mmst(&inst, &mmst_weights(&inst, false)).unwrap();
        assert_eq!(t.links, vec![LinkId(2), LinkId(3)]);
        assert_eq!(t.load.linf(), 0);
    }

    #[test]
    fn greedy_uses_optional_nodes() {
        // terminals 0, 2 joined only through optional node 1
        let inst = instance(3, &[(0, 1), (1, 2)], &[0, 2], &[]);
        let t = greedy_mmst(&inst, &mmst_weights(&inst, false)).unwrap();
        assert_eq!(t.links, vec![LinkId(0), LinkId(1)]);
    }

    #[test]
    fn disconnected_terminals_are_an_error() {
        let inst = instance(4, &[(0, 1), (2, 3)], &[0, 3], &[]);
        assert!(matches!(
            greedy_mmst(&inst, &mmst_weights(&inst, false)),
            Err(Error::TerminalsDisconnected { .. })
        ));
    }

    #[test]
    fn star_leaves_need_one_slot_each() {
        let m = 5;
        let pairs: Vec<(usize, usize)> = (1..=m).map(|i| (0, i)).collect();
        let g = graph(m + 1, &pairs);
        let c = crate::geometry::line_graph_conflicts(&g).unwrap();
        let inst = SteinerInstance::new(g, (1..=m).map(NodeId).collect(), c).unwrap();
        let s = steiner_schedule(&inst).unwrap();
        assert_eq!(s.schedule.slot_count(), m);
        assert!(s.schedule.slot_count() <= s.z as usize + 1);
    }

    #[test]
    fn path_under_l2() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let c = l2_conflict_graph(&g).unwrap();
        let inst = SteinerInstance::new(g, vec![NodeId(0), NodeId(4)], c).unwrap();
        let s = steiner_schedule(&inst).unwrap();
        assert_eq!(s.schedule.slot_count(), 3);
        assert_eq!(s.z, 2);
    }

    #[test]
    fn load_vector_tracks_max() {
        let mut l = LoadVector::zero(3);
        l.add(&[LinkId(0), LinkId(2)]);
        l.add(&[LinkId(2)]);
        assert_eq!(l.linf(), 2);
        assert_eq!(l.argmax(), vec![LinkId(2)]);
        assert_eq!(l.get(LinkId(1)), 0);
    }
}
