//! Fractional conflict graphs.
//!
//! A [`ConflictGraph`] holds a nonnegative weight `W(e, f)` for ordered pairs of
//! links (how much a transmission on `e` disturbs `f`) and a strict total
//! order `≺` over its links. A set `S` is feasible when every member `e`
//! receives `W(S, e) < 1`; a unit weight is therefore a hard conflict, which
//! makes 0/1 weight functions behave as ordinary conflict graphs.
//!
//! Every weight sum runs over the contributing links in ascending id order,
//! so two callers summing the same set always see bit-identical totals and
//! threshold decisions never depend on the order a set was assembled in.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::caps::check_cap;
use crate::error::{Error, Result};
use crate::graph::{LinkGraph, LinkId};

/// Members of a feasible set receive strictly less than this much weight.
pub const FEASIBILITY_LIMIT: f64 = 1.0;
/// Semi-feasible sets exchange at most this much with earlier links.
pub const SEMI_FEASIBILITY_LIMIT: f64 = 0.5;

/// One color class of a schedule, kept sorted by link id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Slot(Vec<LinkId>);

impl Slot {
    pub fn new(mut links: Vec<LinkId>) -> Self {
        links.sort_unstable();
        links.dedup();
        Slot(links)
    }

    pub fn links(&self) -> &[LinkId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: LinkId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    fn insert(&mut self, id: LinkId) {
        if let Err(pos) = self.0.binary_search(&id) {
            self.0.insert(pos, id);
        }
    }
}

/// Direction in which [`ConflictGraph::greedy_color_in`] visits links.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    /// Earliest link under `≺` first.
    Forward,
    /// Latest link under `≺` first.
    Reverse,
}

#[derive(Clone, Debug)]
pub struct ConflictGraph {
    /// Universe in `≺` order.
    order: Vec<LinkId>,
    /// Position in `order`, indexed by link id; `usize::MAX` for absent ids.
    rank: Vec<usize>,
    keys: Vec<f64>,
    /// Nonzero weights, indexed by link id, each list sorted by the other end.
    out: Vec<Vec<(LinkId, f64)>>,
    inc: Vec<Vec<(LinkId, f64)>>,
}

const ABSENT: usize = usize::MAX;

impl ConflictGraph {
    /// Builds a conflict graph over the links named in `keys`, ordered by
    /// ascending key with ties broken by link id. Zero weights are dropped;
    /// negative, non-finite, self and duplicate entries are rejected.
    pub fn new(keys: Vec<(LinkId, f64)>, weights: Vec<(LinkId, LinkId, f64)>) -> Result<Self> {
        let size = keys.iter().map(|(id, _)| id.0 + 1).max().unwrap_or(0);
        let mut key_of = vec![f64::NAN; size];
        let mut present = vec![false; size];
        for &(id, key) in &keys {
            if present[id.0] {
                return Err(Error::Input(format!("link {id} listed twice in the conflict universe")));
            }
            if !key.is_finite() {
                return Err(Error::Input(format!("link {id} has non-finite order key {key}")));
            }
            present[id.0] = true;
            key_of[id.0] = key;
        }
        let mut order: Vec<LinkId> = keys.iter().map(|&(id, _)| id).collect();
        order.sort_by(|a, b| key_of[a.0].total_cmp(&key_of[b.0]).then(a.cmp(b)));

        let mut out = vec![Vec::new(); size];
        let mut inc = vec![Vec::new(); size];
        for (from, to, weight) in weights {
            let known = |id: LinkId| id.0 < size && present[id.0];
            if !known(from) {
                return Err(Error::UnknownLink(from));
            }
            if !known(to) {
                return Err(Error::UnknownLink(to));
            }
            if from == to || !(weight.is_finite() && weight >= 0.0) {
                return Err(Error::InvalidWeight { from, to, weight });
            }
            if weight > 0.0 {
                out[from.0].push((to, weight));
                inc[to.0].push((from, weight));
            }
        }
        for (id, list) in out.iter_mut().enumerate() {
            list.sort_by_key(|&(to, _)| to);
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Input(format!(
                    "weight W({},{}) given twice",
                    LinkId(id),
                    w[0].0
                )));
            }
        }
        for list in &mut inc {
            list.sort_by_key(|&(from, _)| from);
        }

        let mut graph = ConflictGraph {
            order,
            rank: Vec::new(),
            keys: key_of,
            out,
            inc,
        };
        graph.rebuild_rank();
        Ok(graph)
    }

    /// Universe = the links of `g`, ordered by length.
    pub fn for_graph(g: &LinkGraph, weights: Vec<(LinkId, LinkId, f64)>) -> Result<Self> {
        ConflictGraph::new(g.links().iter().map(|l| (l.id, l.length)).collect(), weights)
    }

    /// Replaces the order with an explicit permutation of the universe.
    pub fn with_order(mut self, permutation: &[LinkId]) -> Result<Self> {
        let mut sorted = permutation.to_vec();
        sorted.sort_unstable();
        let mut current = self.order.clone();
        current.sort_unstable();
        if sorted != current {
            return Err(Error::Input(
                "explicit order must be a permutation of the conflict universe".into(),
            ));
        }
        self.order = permutation.to_vec();
        self.rebuild_rank();
        Ok(self)
    }

    fn rebuild_rank(&mut self) {
        self.rank = vec![ABSENT; self.keys.len()];
        for (pos, id) in self.order.iter().enumerate() {
            self.rank[id.0] = pos;
        }
    }

    /// Links in `≺` order.
    pub fn universe(&self) -> &[LinkId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, id: LinkId) -> bool {
        self.rank.get(id.0).is_some_and(|&r| r != ABSENT)
    }

    pub fn rank(&self, id: LinkId) -> Option<usize> {
        self.rank.get(id.0).copied().filter(|&r| r != ABSENT)
    }

    pub fn key(&self, id: LinkId) -> Option<f64> {
        self.contains(id).then(|| self.keys[id.0])
    }

    /// `a ≺ b`.
    pub fn precedes(&self, a: LinkId, b: LinkId) -> bool {
        self.rank[a.0] < self.rank[b.0]
    }

    fn check(&self, id: LinkId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::UnknownLink(id))
        }
    }

    /// Sorted, deduplicated copy of `set` after validating every id.
    pub fn canonical(&self, set: &[LinkId]) -> Result<Vec<LinkId>> {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        for &id in &s {
            self.check(id)?;
        }
        Ok(s)
    }

    pub fn weight(&self, from: LinkId, to: LinkId) -> f64 {
        self.out
            .get(from.0)
            .and_then(|list| list.binary_search_by_key(&to, |&(t, _)| t).ok().map(|i| list[i].1))
            .unwrap_or(0.0)
    }

    /// Nonzero weights `W(e, ·)`, sorted by target.
    pub fn out_weights(&self, e: LinkId) -> &[(LinkId, f64)] {
        self.out.get(e.0).map_or(&[], Vec::as_slice)
    }

    /// Nonzero weights `W(·, e)`, sorted by source.
    pub fn in_weights(&self, e: LinkId) -> &[(LinkId, f64)] {
        self.inc.get(e.0).map_or(&[], Vec::as_slice)
    }

    /// All nonzero weights as `(from, to, w)`, ordered by `from` then `to`.
    pub fn weights(&self) -> impl Iterator<Item = (LinkId, LinkId, f64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(from, list)| list.iter().map(move |&(to, w)| (LinkId(from), to, w)))
    }

    /// The subgraph on `keep`, with the global order restricted to it.
    pub fn induced(&self, keep: &[LinkId]) -> Result<ConflictGraph> {
        let keep = self.canonical(keep)?;
        let mut inside = vec![false; self.keys.len()];
        for id in &keep {
            inside[id.0] = true;
        }
        let order: Vec<LinkId> = self.order.iter().copied().filter(|id| inside[id.0]).collect();
        let filter = |lists: &Vec<Vec<(LinkId, f64)>>| -> Vec<Vec<(LinkId, f64)>> {
            lists
                .iter()
                .enumerate()
                .map(|(id, list)| {
                    if inside[id] {
                        list.iter().copied().filter(|(o, _)| inside[o.0]).collect()
                    } else {
                        Vec::new()
                    }
                })
                .collect()
        };
        let mut keys = self.keys.clone();
        for (id, key) in keys.iter_mut().enumerate() {
            if !inside[id] {
                *key = f64::NAN;
            }
        }
        let mut graph = ConflictGraph {
            order,
            rank: Vec::new(),
            keys,
            out: filter(&self.out),
            inc: filter(&self.inc),
        };
        graph.rebuild_rank();
        Ok(graph)
    }

    /// Ok iff every weight is exactly 1 and `W(e,f) = W(f,e)`.
    pub fn check_unweighted(&self) -> Result<()> {
        for (from, to, weight) in self.weights() {
            if weight != 1.0 || self.weight(to, from) != 1.0 {
                return Err(Error::NotUnweighted { from, to, weight });
            }
        }
        Ok(())
    }

    /// `e` and `f` conflict in either direction.
    pub fn adjacent(&self, e: LinkId, f: LinkId) -> bool {
        self.weight(e, f) > 0.0 || self.weight(f, e) > 0.0
    }

    // Sums over members of the sorted set `s` with a nonzero entry in `list`,
    // in ascending id order whichever side is walked.
    fn sum_over(s: &[LinkId], list: &[(LinkId, f64)], skip: LinkId) -> f64 {
        let mut total = 0.0;
        if list.len() < s.len() {
            for &(other, w) in list {
                if other != skip && s.binary_search(&other).is_ok() {
                    total += w;
                }
            }
        } else {
            for &f in s {
                if f == skip {
                    continue;
                }
                if let Ok(i) = list.binary_search_by_key(&f, |&(o, _)| o) {
                    total += list[i].1;
                }
            }
        }
        total
    }

    /// `W(s, e) = Σ_{f∈s} W(f, e)` for a set already in canonical form.
    pub(crate) fn w_in_sorted(&self, s: &[LinkId], e: LinkId) -> f64 {
        Self::sum_over(s, self.in_weights(e), e)
    }

    pub(crate) fn w_out_sorted(&self, e: LinkId, s: &[LinkId]) -> f64 {
        Self::sum_over(s, self.out_weights(e), e)
    }

    /// Total weight `W(s, e)` that `e` receives from the links of `s`.
    pub fn w_in(&self, s: &[LinkId], e: LinkId) -> Result<f64> {
        self.check(e)?;
        let s = self.canonical(s)?;
        Ok(self.w_in_sorted(&s, e))
    }

    /// Total weight `W(e, s)` that `e` sends to the links of `s`.
    pub fn w_out(&self, e: LinkId, s: &[LinkId]) -> Result<f64> {
        self.check(e)?;
        let s = self.canonical(s)?;
        Ok(self.w_out_sorted(e, &s))
    }

    pub(crate) fn directed_sums_sorted(&self, s: &[LinkId], e: LinkId) -> (f64, f64) {
        let earlier: Vec<LinkId> = s.iter().copied().filter(|&f| self.precedes(f, e)).collect();
        (self.w_in_sorted(&earlier, e), self.w_out_sorted(e, &earlier))
    }

    /// `(W⁺(s, e), W⁻(e, s))`: weight `e` receives from, and sends to, the
    /// members of `s` that precede it.
    pub fn directed_sums(&self, s: &[LinkId], e: LinkId) -> Result<(f64, f64)> {
        self.check(e)?;
        let s = self.canonical(s)?;
        Ok(self.directed_sums_sorted(&s, e))
    }

    /// First member of `s` (by id) that receives `W(s, e) ≥ 1`, with its load.
    pub fn first_infeasible(&self, s: &[LinkId]) -> Result<Option<(LinkId, f64)>> {
        let s = self.canonical(s)?;
        Ok(s.iter().find_map(|&e| {
            let load = self.w_in_sorted(&s, e);
            (load >= FEASIBILITY_LIMIT).then_some((e, load))
        }))
    }

    pub fn is_feasible(&self, s: &[LinkId]) -> Result<bool> {
        Ok(self.first_infeasible(s)?.is_none())
    }

    pub(crate) fn first_not_semi_feasible(&self, s: &[LinkId]) -> Option<(LinkId, f64)> {
        s.iter().find_map(|&e| {
            let (plus_in, minus_out) = self.directed_sums_sorted(s, e);
            let total = plus_in + minus_out;
            (total > SEMI_FEASIBILITY_LIMIT).then_some((e, total))
        })
    }

    pub fn is_semi_feasible(&self, s: &[LinkId]) -> Result<bool> {
        let s = self.canonical(s)?;
        Ok(self.first_not_semi_feasible(&s).is_none())
    }

    /// The members of a semi-feasible set that receive weight below 1.
    /// Averaging guarantees at least half of the set survives.
    pub fn extract_feasible(&self, s: &[LinkId]) -> Result<Vec<LinkId>> {
        let s = self.canonical(s)?;
        if let Some((link, total)) = self.first_not_semi_feasible(&s) {
            return Err(Error::NotSemiFeasible { link, total });
        }
        Ok(s.iter()
            .copied()
            .filter(|&e| self.w_in_sorted(&s, e) < FEASIBILITY_LIMIT)
            .collect())
    }

    /// Greedy coloring in `≺` order; see [`ConflictGraph::greedy_color_in`].
    pub fn greedy_color(&self, s: &[LinkId]) -> Result<Vec<Slot>> {
        self.greedy_color_in(s, Sweep::Forward)
    }

    /// Visits `s` in the given sweep and puts each link into the lowest slot
    /// that stays feasible with it added, opening a new slot when none does.
    pub fn greedy_color_in(&self, s: &[LinkId], sweep: Sweep) -> Result<Vec<Slot>> {
        let mut links = self.canonical(s)?;
        links.sort_by_key(|id| self.rank[id.0]);
        if sweep == Sweep::Reverse {
            links.reverse();
        }
        let mut slots: Vec<Slot> = Vec::new();
        for e in links {
            let target = slots.iter().position(|slot| self.fits(slot, e));
            match target {
                Some(i) => slots[i].insert(e),
                None => slots.push(Slot::new(vec![e])),
            }
        }
        Ok(slots)
    }

    // Only `e` and the members `e` disturbs can change status when `e` joins.
    fn fits(&self, slot: &Slot, e: LinkId) -> bool {
        let mut grown = slot.clone();
        grown.insert(e);
        let members = grown.links();
        if self.w_in_sorted(members, e) >= FEASIBILITY_LIMIT {
            return false;
        }
        self.out_weights(e)
            .iter()
            .filter(|(f, _)| slot.contains(*f))
            .all(|&(f, _)| self.w_in_sorted(members, f) < FEASIBILITY_LIMIT)
    }

    /// Exact inductive independence: the largest `W(I, e) + W(e, I)` over
    /// links `e` and feasible sets `I` of links after `e`. Exponential.
    pub fn measure_rho(&self, cap: usize) -> Result<f64> {
        check_cap("conflict universe", self.len(), cap)?;
        let mut best: f64 = 0.0;
        for (pos, &e) in self.order.iter().enumerate() {
            // Links that exchange no weight with e never raise the sum, and
            // feasibility is inherited by subsets, so they can be left out.
            let mut post: Vec<LinkId> = self.order[pos + 1..]
                .iter()
                .copied()
                .filter(|&f| self.adjacent(e, f))
                .collect();
            post.sort_unstable();
            let mut chosen = Vec::with_capacity(post.len());
            self.rho_search(e, &post, 0, &mut chosen, &mut best);
        }
        Ok(best)
    }

    fn rho_search(&self, e: LinkId, post: &[LinkId], from: usize, chosen: &mut Vec<LinkId>, best: &mut f64) {
        if !chosen.is_empty() {
            let value = self.w_in_sorted(chosen, e) + self.w_out_sorted(e, chosen);
            if value > *best {
                *best = value;
            }
        }
        for i in from..post.len() {
            chosen.push(post[i]);
            let feasible = chosen
                .iter()
                .all(|&f| self.w_in_sorted(chosen, f) < FEASIBILITY_LIMIT);
            if feasible {
                self.rho_search(e, post, i + 1, chosen, best);
            }
            chosen.pop();
        }
    }

    /// Exact simpliciality of a 0/1 conflict graph: the largest minimum clique
    /// cover of any link's post-neighborhood.
    pub fn measure_eta(&self, cap: usize) -> Result<usize> {
        self.check_unweighted()?;
        let mut eta = 0;
        for (pos, &v) in self.order.iter().enumerate() {
            let post: Vec<LinkId> = self.order[pos + 1..]
                .iter()
                .copied()
                .filter(|&f| self.adjacent(v, f))
                .collect();
            check_cap("post-neighborhood", post.len(), cap)?;
            let cover = crate::oracle::min_cover(post.len(), |mask| {
                let members: Vec<LinkId> = (0..post.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| post[i])
                    .collect();
                members
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| members[i + 1..].iter().all(|&b| self.adjacent(a, b)))
            });
            eta = eta.max(cover);
        }
        Ok(eta)
    }
}

/// Convenience for building sparse weight lists: unit weights both ways.
pub fn symmetric_unit_weights<I>(pairs: I) -> Vec<(LinkId, LinkId, f64)>
where
    I: IntoIterator<Item = (LinkId, LinkId)>,
{
    let mut seen: HashMap<(LinkId, LinkId), ()> = HashMap::new();
    let mut weights = Vec::new();
    for (a, b) in pairs {
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key, ()).is_none() {
            weights.push((a, b, 1.0));
            weights.push((b, a, 1.0));
        }
    }
    weights
}
