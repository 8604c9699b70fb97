//! Greedy forest selection and the connectivity scheduler built on it.
//!
//! [`cap_kruskal`] runs Kruskal in `≺` order but also rejects any link whose
//! weight exchange with the links accepted so far exceeds a threshold, then
//! keeps the accepted links that receive weight below 1. [`conn`] applies it
//! to successively contracted link graphs, one slot per round.

use crate::conflict::{ConflictGraph, Slot, FEASIBILITY_LIMIT, SEMI_FEASIBILITY_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{LinkGraph, LinkId};
use crate::schedule::Schedule;
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapKruskalOptions {
    /// Largest `W(S,e) + W(e,S)` at which a link is still accepted.
    pub threshold: f64,
    /// Keep only links that are also dual-feasible (`W(e,S) ≤ 1/2`).
    pub dual: bool,
}

impl CapKruskalOptions {
    pub const PRIMAL: CapKruskalOptions = CapKruskalOptions {
        threshold: 0.5,
        dual: false,
    };
    pub const DUAL: CapKruskalOptions = CapKruskalOptions {
        threshold: 0.25,
        dual: true,
    };

    pub fn new(dual: bool) -> Self {
        if dual {
            Self::DUAL
        } else {
            Self::PRIMAL
        }
    }
}

impl Default for CapKruskalOptions {
    fn default() -> Self {
        Self::PRIMAL
    }
}

/// Both sets computed by one [`cap_kruskal`] pass, sorted by id.
#[derive(Clone, Debug, PartialEq)]
pub struct CapKruskalRun {
    /// Links that passed the threshold and connectivity tests.
    pub accepted: Vec<LinkId>,
    /// The accepted links that survive the final load filter.
    pub forest: Vec<LinkId>,
}

pub fn cap_kruskal(g: &LinkGraph, c: &ConflictGraph, options: CapKruskalOptions) -> Result<Vec<LinkId>> {
    Ok(cap_kruskal_run(g, c, options)?.forest)
}

pub fn cap_kruskal_run(g: &LinkGraph, c: &ConflictGraph, options: CapKruskalOptions) -> Result<CapKruskalRun> {
    let mut order = g.link_ids();
    if let Some(&missing) = order.iter().find(|&&id| !c.contains(id)) {
        return Err(Error::UnknownLink(missing));
    }
    order.sort_by_key(|&id| c.rank(id));

    let mut uf = UnionFind::new(g.node_count());
    let mut accepted: Vec<LinkId> = Vec::new();
    for id in order {
        let link = g.link(id).expect("id taken from this graph");
        if uf.connected(link.u.0, link.v.0) {
            continue;
        }
        let exchange = c.w_in_sorted(&accepted, id) + c.w_out_sorted(id, &accepted);
        if exchange <= options.threshold {
            let pos = accepted.binary_search(&id).unwrap_err();
            accepted.insert(pos, id);
            uf.union(link.u.0, link.v.0);
        }
    }

    let forest = accepted
        .iter()
        .copied()
        .filter(|&e| {
            c.w_in_sorted(&accepted, e) < FEASIBILITY_LIMIT
                && (!options.dual || c.w_out_sorted(e, &accepted) <= SEMI_FEASIBILITY_LIMIT)
        })
        .collect();
    Ok(CapKruskalRun { accepted, forest })
}

/// Schedules a spanning tree of `g`: each round takes a [`cap_kruskal`]
/// forest of the current graph as the next slot and contracts it, until no
/// link is left. With `dual`, every slot is also dual-feasible and is emitted
/// twice so each link transmits in both directions.
pub fn conn(g: &LinkGraph, c: &ConflictGraph, dual: bool) -> Result<Schedule> {
    g.check_connected()?;
    let options = CapKruskalOptions::new(dual);
    let mut current = g.clone();
    let mut slots = Vec::new();
    while current.link_count() > 0 {
        let forest = cap_kruskal(&current, c, options)?;
        if forest.is_empty() {
            return Err(Error::Internal(format!(
                "round {} selected no link on a graph with {} links",
                slots.len(),
                current.link_count()
            )));
        }
        current = current.contract(&forest)?.graph;
        slots.push(Slot::new(forest));
    }
    let schedule = Schedule::from_slots(slots);
    Ok(if dual { schedule.with_dual_copies() } else { schedule })
}

/// Baseline: the minimum spanning tree by length, colored greedily in `≺` order.
pub fn mst_greedy(g: &LinkGraph, c: &ConflictGraph) -> Result<Schedule> {
    let tree = g.kruskal_mst()?;
    Ok(Schedule::from_slots(c.greedy_color(&tree)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::symmetric_unit_weights;
    use crate::graph::LinkSpec;
    use crate::schedule::{verify, Target};

    fn graph(n: usize, pairs: &[(usize, usize)]) -> LinkGraph {
        LinkGraph::new(n, pairs.iter().map(|&(u, v)| LinkSpec::new(u, v)).collect()).unwrap()
    }

    fn unit(g: &LinkGraph, pairs: &[(usize, usize)]) -> ConflictGraph {
        ConflictGraph::for_graph(g, symmetric_unit_weights(pairs.iter().map(|&(a, b)| (LinkId(a), LinkId(b))))).unwrap()
    }

    #[test]
    fn zero_weights_give_a_spanning_tree() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)]);
        let c = ConflictGraph::for_graph(&g, vec![]).unwrap();
        let forest = cap_kruskal(&g, &c, CapKruskalOptions::PRIMAL).unwrap();
        assert!(g.is_spanning_tree(&forest));
    }

    #[test]
    fn complete_conflicts_keep_only_the_first_link() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let c = unit(&g, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(cap_kruskal(&g, &c, CapKruskalOptions::PRIMAL).unwrap(), vec![LinkId(0)]);
    }

    #[test]
    fn heavy_pair_rejects_second_link() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = ConflictGraph::for_graph(
            &g,
            vec![(LinkId(0), LinkId(1), 0.6), (LinkId(1), LinkId(0), 0.6)],
        )
        .unwrap();
        let run = cap_kruskal_run(&g, &c, CapKruskalOptions::PRIMAL).unwrap();
        assert_eq!(run.accepted, vec![LinkId(0)]);
        assert_eq!(run.forest, vec![LinkId(0)]);
    }

    #[test]
    fn missing_conflict_entry_is_an_error() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = ConflictGraph::new(vec![(LinkId(0), 1.0)], vec![]).unwrap();
        assert!(matches!(
            cap_kruskal(&g, &c, CapKruskalOptions::PRIMAL),
            Err(Error::UnknownLink(LinkId(1)))
        ));
    }

    #[test]
    fn conn_examples() {
        let g = graph(2, &[(0, 1)]);
        let c = ConflictGraph::for_graph(&g, vec![]).unwrap();
        assert_eq!(conn(&g, &c, false).unwrap().slot_count(), 1);

        // path of 4 nodes under L²: all three links pairwise conflict
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = unit(&g, &[(0, 1), (1, 2), (0, 2)]);
        let s = conn(&g, &c, false).unwrap();
        assert_eq!(s.slot_count(), 3);
        assert!(verify(&g, &c, &s, Target::Spanning).ok());

        // star K_{1,5} under line-graph conflicts
        let m = 5;
        let g = graph(m + 1, &(1..=m).map(|i| (0, i)).collect::<Vec<_>>());
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
        let c = unit(&g, &pairs);
        assert_eq!(conn(&g, &c, false).unwrap().slot_count(), m);
    }

    #[test]
    fn conn_rejects_disconnected() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        let c = ConflictGraph::for_graph(&g, vec![]).unwrap();
        assert!(matches!(conn(&g, &c, false), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn dual_conn_doubles_slots_and_verifies() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]);
        let mut weights = Vec::new();
        for a in 0..6 {
            for b in 0..6 {
                if a != b {
                    weights.push((LinkId(a), LinkId(b), 0.05 * ((a + 2 * b) % 5) as f64));
                }
            }
        }
        let weights = weights.into_iter().filter(|w| w.2 > 0.0).collect();
        let c = ConflictGraph::for_graph(&g, weights).unwrap();
        let primal = conn(&g, &c, false).unwrap();
        let dual = conn(&g, &c, true).unwrap();
        assert!(dual.dual_copies);
        assert_eq!(dual.slot_count() % 2, 0);
        assert!(verify(&g, &c, &primal, Target::Spanning).ok());
        let v = verify(&g, &c, &dual, Target::Spanning);
        assert!(v.ok(), "{:?}", v.violations);
    }

    #[test]
    fn mst_greedy_zero_weights_is_one_slot() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let c = ConflictGraph::for_graph(&g, vec![]).unwrap();
        assert_eq!(mst_greedy(&g, &c).unwrap().slot_count(), 1);
    }
}
