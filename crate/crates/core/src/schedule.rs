//! Schedules and the independent schedule checker.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conflict::{ConflictGraph, Slot};
use crate::graph::{LinkGraph, LinkId, NodeId};
use crate::union_find::UnionFind;

/// A tree of the link graph together with a partition of its links into slots.
///
/// With `dual_copies`, every slot appears twice in a row: the second copy is
/// the same links transmitting in the reverse direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub slots: Vec<Slot>,
    /// Sorted union of the slots.
    pub tree: Vec<LinkId>,
    pub dual_copies: bool,
}

impl Schedule {
    pub fn from_slots(slots: Vec<Slot>) -> Self {
        let mut tree: Vec<LinkId> = slots.iter().flat_map(|s| s.links().iter().copied()).collect();
        tree.sort_unstable();
        tree.dedup();
        Schedule {
            slots,
            tree,
            dual_copies: false,
        }
    }

    /// Doubles every slot for the reverse-direction pass.
    pub fn with_dual_copies(mut self) -> Self {
        if !self.dual_copies {
            self.slots = self
                .slots
                .into_iter()
                .flat_map(|s| [s.clone(), s])
                .collect();
            self.dual_copies = true;
        }
        self
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_sizes(&self) -> Vec<usize> {
        self.slots.iter().map(Slot::len).collect()
    }

    /// The slots without their reverse-direction copies.
    pub fn base_slots(&self) -> Vec<&Slot> {
        let step = if self.dual_copies { 2 } else { 1 };
        self.slots.iter().step_by(step).collect()
    }
}

/// What the schedule's tree has to connect.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    /// Every node of the link graph.
    Spanning,
    /// The given terminals; other nodes are optional.
    Steiner(&'a [NodeId]),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    UnknownLink(LinkId),
    Infeasible { slot: usize, link: LinkId, load: f64 },
    NotDualFeasible { slot: usize, link: LinkId, load: f64 },
    Overlap { link: LinkId },
    NotInTree { link: LinkId },
    Uncovered { link: LinkId },
    UnpairedDualCopy { slot: usize },
    Cycle { link: LinkId },
    NotSpanning { a: NodeId, b: NodeId },
    WrongSize { links: usize, expected: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownLink(l) => write!(f, "link {l} is not in the instance"),
            Violation::Infeasible { slot, link, load } => {
                write!(f, "slot {slot} is infeasible: link {link} receives weight {load} (must be < 1)")
            }
            Violation::NotDualFeasible { slot, link, load } => {
                write!(f, "slot {slot} is not dual-feasible: link {link} sends weight {load} (must be <= 1/2)")
            }
            Violation::Overlap { link } => write!(f, "link {link} appears in more than one slot"),
            Violation::NotInTree { link } => write!(f, "slot link {link} is missing from the tree"),
            Violation::Uncovered { link } => write!(f, "tree link {link} is in no slot"),
            Violation::UnpairedDualCopy { slot } => {
                write!(f, "slot {slot} is not followed by its reverse-direction copy")
            }
            Violation::Cycle { link } => write!(f, "not spanning: link {link} closes a cycle"),
            Violation::NotSpanning { a, b } => {
                write!(f, "not spanning: {a} and {b} are not connected by the tree")
            }
            Violation::WrongSize { links, expected } => {
                write!(f, "not spanning: tree has {links} links, expected {expected}")
            }
        }
    }
}

/// Outcome of [`verify`]; each flag is recomputed from the instance alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub feasible: bool,
    pub spanning: bool,
    pub partition: bool,
    #[serde(skip)]
    pub violations: Vec<Violation>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.feasible && self.spanning && self.partition
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Checks a schedule against the instance from scratch: slots partition the
/// tree, the tree spans (or connects the terminals) without cycles, and every
/// slot is feasible (and dual-feasible for dual schedules).
pub fn verify(g: &LinkGraph, c: &ConflictGraph, schedule: &Schedule, target: Target<'_>) -> Verification {
    let mut partition = Vec::new();
    let mut feasibility = Vec::new();
    let mut spanning = Vec::new();

    let known = |id: LinkId| g.link(id).is_some() && c.contains(id);
    let unknown: Vec<LinkId> = schedule
        .slots
        .iter()
        .flat_map(|s| s.links().iter().copied())
        .chain(schedule.tree.iter().copied())
        .filter(|&id| !known(id))
        .collect();
    if let Some(&id) = unknown.first() {
        return Verification {
            feasible: false,
            spanning: false,
            partition: false,
            violations: vec![Violation::UnknownLink(id)],
        };
    }

    let slots: Vec<&Slot> = if schedule.dual_copies {
        for (i, pair) in schedule.slots.chunks(2).enumerate() {
            if pair.len() != 2 || pair[0] != pair[1] {
                partition.push(Violation::UnpairedDualCopy { slot: 2 * i });
            }
        }
        schedule.slots.iter().step_by(2).collect()
    } else {
        schedule.slots.iter().collect()
    };

    let tree: HashSet<LinkId> = schedule.tree.iter().copied().collect();
    let mut covered = HashSet::new();
    for slot in &slots {
        for &id in slot.links() {
            if !covered.insert(id) {
                partition.push(Violation::Overlap { link: id });
            }
            if !tree.contains(&id) {
                partition.push(Violation::NotInTree { link: id });
            }
        }
    }
    let mut tree_sorted: Vec<LinkId> = tree.iter().copied().collect();
    tree_sorted.sort_unstable();
    if tree_sorted.len() != schedule.tree.len() {
        partition.push(Violation::Overlap {
            link: first_duplicate(&schedule.tree),
        });
    }
    for &id in &tree_sorted {
        if !covered.contains(&id) {
            partition.push(Violation::Uncovered { link: id });
        }
    }

    for (i, slot) in slots.iter().enumerate() {
        let index = if schedule.dual_copies { 2 * i } else { i };
        let members = slot.links();
        for &e in members {
            let load: f64 = members.iter().filter(|&&f| f != e).map(|&f| c.weight(f, e)).sum();
            if load >= crate::conflict::FEASIBILITY_LIMIT {
                feasibility.push(Violation::Infeasible { slot: index, link: e, load });
            }
            if schedule.dual_copies {
                let sent: f64 = members.iter().filter(|&&f| f != e).map(|&f| c.weight(e, f)).sum();
                if sent > crate::conflict::SEMI_FEASIBILITY_LIMIT {
                    feasibility.push(Violation::NotDualFeasible { slot: index, link: e, load: sent });
                }
            }
        }
    }

    check_tree(g, &tree_sorted, target, &mut spanning);

    let ok = (partition.is_empty(), spanning.is_empty(), feasibility.is_empty());
    let mut violations = feasibility;
    violations.extend(spanning);
    violations.extend(partition);
    Verification {
        feasible: ok.2,
        spanning: ok.1,
        partition: ok.0,
        violations,
    }
}

fn first_duplicate(ids: &[LinkId]) -> LinkId {
    let mut seen = HashSet::new();
    ids.iter().copied().find(|id| !seen.insert(*id)).unwrap_or(LinkId(0))
}

fn check_tree(g: &LinkGraph, tree: &[LinkId], target: Target<'_>, out: &mut Vec<Violation>) {
    let mut uf = UnionFind::new(g.node_count());
    for &id in tree {
        let l = g.link(id).expect("ids checked above");
        if !uf.union(l.u.0, l.v.0) {
            out.push(Violation::Cycle { link: id });
            return;
        }
    }
    match target {
        Target::Spanning => {
            let expected = g.node_count().saturating_sub(1);
            if tree.len() != expected {
                out.push(Violation::WrongSize {
                    links: tree.len(),
                    expected,
                });
            }
            if let Some(b) = (1..g.node_count()).find(|&n| !uf.connected(0, n)) {
                out.push(Violation::NotSpanning { a: NodeId(0), b: NodeId(b) });
            }
        }
        Target::Steiner(terminals) => {
            if let Some((&first, rest)) = terminals.split_first() {
                if let Some(&b) = rest.iter().find(|t| !uf.connected(first.0, t.0)) {
                    out.push(Violation::NotSpanning { a: first, b });
                }
            }
            // every tree link must hang off the terminals' component
            if let Some(&first) = terminals.first() {
                for &id in tree {
                    let l = g.link(id).expect("ids checked above");
                    if !uf.connected(first.0, l.u.0) {
                        out.push(Violation::NotSpanning { a: first, b: l.u });
                        break;
                    }
                }
            }
        }
    }
}
