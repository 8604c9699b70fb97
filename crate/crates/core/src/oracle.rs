//! Exponential-time optima for small instances.
//!
//! All searches rely on feasibility being inherited by subsets: dropping links
//! from a set only lowers the weight its members receive.

use crate::caps::{check_cap, Caps};
use crate::conflict::{ConflictGraph, Slot};
use crate::error::{Error, Result};
use crate::graph::{LinkGraph, LinkId};
use crate::steiner::{mmst_weights, SteinerInstance};
use crate::union_find::UnionFind;

/// Minimum number of blocks in a partition of `{0..n}` into sets accepted by
/// `good`, which must accept all singletons and be closed under subsets.
pub(crate) fn min_cover(n: usize, good: impl Fn(u32) -> bool) -> usize {
    min_partition(n, good).len()
}

/// A minimum partition as block masks, each block as large as the search finds
/// first: blocks are chosen to contain the lowest uncovered element, trying
/// larger masks before smaller ones.
pub(crate) fn min_partition(n: usize, good: impl Fn(u32) -> bool) -> Vec<u32> {
    assert!(n < 32, "partition search over {n} elements");
    let full: u32 = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let table: Vec<bool> = (0..=full).map(&good).collect();
    // best[mask] = (blocks, chosen block) for covering `mask`
    let mut best: Vec<(u8, u32)> = vec![(0, 0); full as usize + 1];
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut choice = (u8::MAX, 0);
        // submasks of `rest`, largest first, each joined with `low`
        let mut sub = rest;
        loop {
            let block = sub | low;
            if table[block as usize] {
                let count = best[(mask ^ block) as usize].0.saturating_add(1);
                if count < choice.0 {
                    choice = (count, block);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[mask as usize] = choice;
    }
    let mut blocks = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let block = best[mask as usize].1;
        blocks.push(block);
        mask ^= block;
    }
    blocks
}

/// A largest set of links that is acyclic in `g` and feasible in `c`; among
/// those, the lexicographically least by sorted ids.
pub fn max_feasible_forest(g: &LinkGraph, c: &ConflictGraph, caps: &Caps) -> Result<Vec<LinkId>> {
    check_cap("link graph for forest search", g.link_count(), caps.forest_links)?;
    let links = g.link_ids();
    if let Some(&missing) = links.iter().find(|&&id| !c.contains(id)) {
        return Err(Error::UnknownLink(missing));
    }
    let mut search = ForestSearch {
        g,
        c,
        links: &links,
        limit: g.node_count().saturating_sub(1),
        best: Vec::new(),
    };
    let mut chosen = Vec::new();
    search.run(0, &mut chosen, &UnionFind::new(g.node_count()));
    Ok(search.best)
}

struct ForestSearch<'a> {
    g: &'a LinkGraph,
    c: &'a ConflictGraph,
    links: &'a [LinkId],
    limit: usize,
    best: Vec<LinkId>,
}

impl ForestSearch<'_> {
    // Include-first in id order, so the first maximum found is lexicographically least.
    fn run(&mut self, at: usize, chosen: &mut Vec<LinkId>, uf: &UnionFind) {
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        if self.best.len() == self.limit || at == self.links.len() {
            return;
        }
        let bound = chosen.len() + (self.links.len() - at);
        if bound <= self.best.len() {
            return;
        }
        let id = self.links[at];
        let link = self.g.link(id).expect("id taken from this graph");
        if uf.find_const(link.u.0) != uf.find_const(link.v.0) {
            chosen.push(id);
            if self.c.first_infeasible(chosen).ok().flatten().is_none() {
                let mut next = uf.clone();
                next.union(link.u.0, link.v.0);
                self.run(at + 1, chosen, &next);
            }
            chosen.pop();
        }
        if self.best.len() == self.limit {
            return;
        }
        self.run(at + 1, chosen, uf);
    }
}

/// An optimal tree schedule: the spanning tree with the fewest slots.
#[derive(Clone, Debug, PartialEq)]
pub struct OptTreeSchedule {
    /// Sorted by id; the first optimal tree in include-first enumeration.
    pub tree: Vec<LinkId>,
    pub slots: Vec<Slot>,
    pub chi: usize,
}

/// Minimum slot count over all spanning trees of `g`, each tree partitioned
/// optimally into feasible sets.
pub fn opt_tree_schedule(g: &LinkGraph, c: &ConflictGraph, caps: &Caps) -> Result<OptTreeSchedule> {
    check_cap("link graph nodes for tree schedule search", g.node_count(), caps.tree_nodes)?;
    check_cap("link graph links for tree schedule search", g.link_count(), caps.tree_links)?;
    g.check_connected()?;
    let links = g.link_ids();
    if let Some(&missing) = links.iter().find(|&&id| !c.contains(id)) {
        return Err(Error::UnknownLink(missing));
    }
    let mut best: Option<OptTreeSchedule> = None;
    let need = g.node_count().saturating_sub(1);
    let mut chosen = Vec::with_capacity(need);
    for_each_spanning_tree(g, &links, 0, need, &mut chosen, &UnionFind::new(g.node_count()), &mut |tree| {
        if best.as_ref().is_some_and(|b| b.chi <= 1) {
            return;
        }
        let blocks = min_partition(tree.len(), |mask| {
            let members: Vec<LinkId> = (0..tree.len()).filter(|i| mask >> i & 1 == 1).map(|i| tree[i]).collect();
            c.first_infeasible(&members).ok().flatten().is_none()
        });
        if best.as_ref().is_none_or(|b| blocks.len() < b.chi) {
            let slots = blocks
                .iter()
                .map(|&mask| Slot::new((0..tree.len()).filter(|i| mask >> i & 1 == 1).map(|i| tree[i]).collect()))
                .collect();
            best = Some(OptTreeSchedule {
                tree: tree.to_vec(),
                slots,
                chi: blocks.len(),
            });
        }
    });
    best.ok_or_else(|| Error::Internal("connected graph without a spanning tree".into()))
}

fn for_each_spanning_tree(
    g: &LinkGraph,
    links: &[LinkId],
    at: usize,
    need: usize,
    chosen: &mut Vec<LinkId>,
    uf: &UnionFind,
    visit: &mut dyn FnMut(&[LinkId]),
) {
    if chosen.len() == need {
        visit(chosen);
        return;
    }
    if chosen.len() + (links.len() - at) < need {
        return;
    }
    let id = links[at];
    let link = g.link(id).expect("id taken from this graph");
    if uf.find_const(link.u.0) != uf.find_const(link.v.0) {
        let mut next = uf.clone();
        next.union(link.u.0, link.v.0);
        chosen.push(id);
        for_each_spanning_tree(g, links, at + 1, need, chosen, &next, visit);
        chosen.pop();
    }
    for_each_spanning_tree(g, links, at + 1, need, chosen, uf, visit);
}

/// Smallest ℓ∞ load of any tree connecting the terminals.
#[derive(Clone, Debug, PartialEq)]
pub struct OptSteiner {
    pub tree: Vec<LinkId>,
    pub z: u32,
}

pub fn opt_steiner_load(inst: &SteinerInstance, caps: &Caps) -> Result<OptSteiner> {
    let g = inst.graph();
    check_cap("link graph nodes for Steiner search", g.node_count(), caps.steiner_nodes)?;
    check_cap("link graph links for Steiner search", g.link_count(), caps.steiner_links)?;
    inst.check_terminals_connected()?;
    let weights = mmst_weights(inst, false);
    let links = g.link_ids();
    let terminals: Vec<usize> = inst.terminals().iter().map(|t| t.0).collect();
    let mut best: Option<OptSteiner> = None;
    let mut chosen = Vec::new();
    steiner_search(
        g,
        &links,
        &terminals,
        &|set: &[LinkId]| weights.load(set).linf(),
        0,
        &mut chosen,
        &UnionFind::new(g.node_count()),
        &mut best,
    );
    let mut best = best.ok_or_else(|| Error::Internal("connected terminals without a Steiner tree".into()))?;
    best.tree = prune_leaves(g, &best.tree, &terminals);
    Ok(best)
}

// Drops links hanging off non-terminal leaves; loads can only shrink.
fn prune_leaves(g: &LinkGraph, tree: &[LinkId], terminals: &[usize]) -> Vec<LinkId> {
    let mut keep: Vec<LinkId> = tree.to_vec();
    loop {
        let mut degree = vec![0usize; g.node_count()];
        for &id in &keep {
            let l = g.link(id).expect("id taken from this graph");
            degree[l.u.0] += 1;
            degree[l.v.0] += 1;
        }
        let dangling = |n: usize| degree[n] == 1 && !terminals.contains(&n);
        let before = keep.len();
        keep.retain(|&id| {
            let l = g.link(id).expect("id taken from this graph");
            !dangling(l.u.0) && !dangling(l.v.0)
        });
        if keep.len() == before {
            return keep;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn steiner_search(
    g: &LinkGraph,
    links: &[LinkId],
    terminals: &[usize],
    load: &dyn Fn(&[LinkId]) -> u32,
    at: usize,
    chosen: &mut Vec<LinkId>,
    uf: &UnionFind,
    best: &mut Option<OptSteiner>,
) {
    // Loads only grow with more links, so a set at or above the best is dead.
    let z = load(chosen);
    if best.as_ref().is_some_and(|b| z >= b.z) {
        return;
    }
    if terminals.iter().all(|&t| uf.find_const(t) == uf.find_const(terminals[0])) {
        *best = Some(OptSteiner {
            tree: chosen.clone(),
            z,
        });
        return;
    }
    if at == links.len() {
        return;
    }
    // Give up when even all remaining links cannot join the terminals.
    let mut reach = uf.clone();
    for &id in &links[at..] {
        let l = g.link(id).expect("id taken from this graph");
        reach.union(l.u.0, l.v.0);
    }
    if !terminals.iter().all(|&t| reach.find_const(t) == reach.find_const(terminals[0])) {
        return;
    }
    let id = links[at];
    let link = g.link(id).expect("id taken from this graph");
    if uf.find_const(link.u.0) != uf.find_const(link.v.0) {
        let mut next = uf.clone();
        next.union(link.u.0, link.v.0);
        chosen.push(id);
        steiner_search(g, links, terminals, load, at + 1, chosen, &next, best);
        chosen.pop();
    }
    steiner_search(g, links, terminals, load, at + 1, chosen, uf, best);
}
