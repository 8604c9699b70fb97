//! Grid scheduling of equal-length link classes and the length-class MST
//! scheduler built on it.

use std::collections::BTreeMap;

use super::{GeoLink, PowerScheme, SinrModel, SinrParams};
use crate::conflict::Slot;
use crate::error::{Error, Result};
use crate::graph::{LinkGraph, LinkId};
use crate::schedule::Schedule;

const LENGTH_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridOptions {
    /// Initial separation constant `c`: same-color cells are more than `c·ℓ` apart.
    pub separation: f64,
    /// How many separations to try, doubling `c` each time.
    pub max_attempts: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            separation: 2.0,
            max_attempts: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSchedule {
    pub slots: Vec<Slot>,
    /// Separation constant of the successful attempt.
    pub separation: f64,
    /// Coloring period `⌈c⌉ + 2`; there are `period²` cell colors.
    pub period: usize,
    /// Most links any single cell received.
    pub layers: usize,
}

impl GridSchedule {
    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn into_schedule(self) -> Schedule {
        Schedule::from_slots(self.slots)
    }
}

/// Grid schedule of `links`, link `i` having id `i`. All lengths must lie in `[ell, 2·ell)`.
pub fn grid_schedule(
    links: &[GeoLink],
    ell: f64,
    params: SinrParams,
    power: PowerScheme,
    options: GridOptions,
) -> Result<GridSchedule> {
    let tagged: Vec<(LinkId, GeoLink)> = links.iter().enumerate().map(|(i, &l)| (LinkId(i), l)).collect();
    grid_schedule_subset(&tagged, ell, params, power, options)
}

/// As [`grid_schedule`], for links carrying their own ids.
pub fn grid_schedule_subset(
    links: &[(LinkId, GeoLink)],
    ell: f64,
    params: SinrParams,
    power: PowerScheme,
    options: GridOptions,
) -> Result<GridSchedule> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidParameter(format!("cell side {ell} must be positive")));
    }
    if !(options.separation > 0.0 && options.separation.is_finite()) || options.max_attempts == 0 {
        return Err(Error::InvalidParameter(format!(
            "separation {} and attempts {} must be positive",
            options.separation, options.max_attempts
        )));
    }
    for &(id, l) in links {
        let len = l.length();
        if len < ell * (1.0 - LENGTH_SLACK) || len >= 2.0 * ell * (1.0 + LENGTH_SLACK) {
            return Err(Error::InvalidParameter(format!(
                "link {id} has length {len}, outside the class [{ell}, {})",
                2.0 * ell
            )));
        }
    }
    let mut sorted: Vec<(LinkId, GeoLink)> = links.to_vec();
    sorted.sort_by_key(|&(id, _)| id);
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Input(format!("duplicate link id {}", w[0].0)));
    }

    let model = SinrModel::new(sorted.iter().map(|&(_, l)| l).collect(), params, power)?;
    let local_ids: Vec<LinkId> = (0..sorted.len()).map(LinkId).collect();
    let conflicts = model.conflict_graph_for(&local_ids)?;

    // Links per cell of the sender, in id order.
    let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, (_, l)) in sorted.iter().enumerate() {
        let cell = ((l.sender.x / ell).floor() as i64, (l.sender.y / ell).floor() as i64);
        cells.entry(cell).or_default().push(i);
    }
    let layers = cells.values().map(Vec::len).max().unwrap_or(0);

    let mut separation = options.separation;
    let mut last_failure = None;
    for _ in 0..options.max_attempts {
        let period = separation.ceil() as i64 + 2;
        let mut classes: BTreeMap<(i64, i64, usize), Vec<usize>> = BTreeMap::new();
        for (&(cx, cy), members) in &cells {
            let color = (cx.rem_euclid(period), cy.rem_euclid(period));
            for (layer, &i) in members.iter().enumerate() {
                classes.entry((color.0, color.1, layer)).or_default().push(i);
            }
        }
        let local_slots: Vec<Vec<LinkId>> = classes
            .into_values()
            .map(|mut v| {
                v.sort_unstable();
                v.into_iter().map(LinkId).collect()
            })
            .collect();

        let mut failure = None;
        for slot in &local_slots {
            if let Some((link, load)) = conflicts.first_infeasible(slot)? {
                failure = Some((slot.clone(), link, load));
                break;
            }
        }
        match failure {
            None => {
                let slots = local_slots
                    .into_iter()
                    .map(|s| Slot::new(s.into_iter().map(|l| sorted[l.0].0).collect()))
                    .collect();
                return Ok(GridSchedule {
                    slots,
                    separation,
                    period: period as usize,
                    layers,
                });
            }
            Some(f) => last_failure = Some((separation, f)),
        }
        separation *= 2.0;
    }
    let (separation, (slot, link, max_sum)) = last_failure.expect("at least one attempt ran");
    Err(Error::GridRetriesExhausted {
        attempts: options.max_attempts,
        separation,
        slot: slot.into_iter().map(|l| sorted[l.0].0).collect(),
        link: sorted[link.0].0,
        max_sum,
    })
}

/// Grid-schedules each length class `[m·2^i, m·2^(i+1))` of the minimum
/// spanning tree separately (`m` the shortest tree link) and concatenates the
/// slots, shortest class first.
pub fn mst_length_class_schedule(
    g: &LinkGraph,
    params: SinrParams,
    power: PowerScheme,
    options: GridOptions,
) -> Result<Schedule> {
    let tree = g.kruskal_mst()?;
    let mut tagged = Vec::with_capacity(tree.len());
    for &id in &tree {
        let link = g.try_link(id)?;
        tagged.push((id, link.geometry.ok_or(Error::MissingGeometry(id))?));
    }
    let Some(min) = tagged.iter().map(|(_, l)| l.length()).min_by(f64::total_cmp) else {
        return Ok(Schedule::from_slots(Vec::new()));
    };
    let mut classes: BTreeMap<u32, Vec<(LinkId, GeoLink)>> = BTreeMap::new();
    for &(id, l) in &tagged {
        classes.entry(length_class(l.length(), min)).or_default().push((id, l));
    }
    let mut slots = Vec::new();
    for (class, members) in classes {
        let ell = min * f64::from(class).exp2();
        slots.extend(grid_schedule_subset(&members, ell, params, power, options)?.slots);
    }
    Ok(Schedule::from_slots(slots))
}

/// `⌊log₂(len / min)⌋`, corrected for rounding at class boundaries.
pub(crate) fn length_class(len: f64, min: f64) -> u32 {
    let mut class = (len / min).log2().floor().max(0.0) as u32;
    while class > 0 && len < min * f64::from(class).exp2() {
        class -= 1;
    }
    while len >= min * f64::from(class + 1).exp2() {
        class += 1;
    }
    class
}

#[cfg(test)]
mod tests {
    use super::super::Point;
    use super::*;
    use crate::conflict::ConflictGraph;
    use crate::geometry::{gen_wheel, sinr_conflict_graph};
    use crate::schedule::{verify, Target};

    fn unit_link(x: f64, y: f64) -> GeoLink {
        GeoLink::new(Point::new(x, y), Point::new(x + 1.0, y))
    }

    fn params() -> SinrParams {
        SinrParams::new(3.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn single_link_is_one_slot() {
        let s = grid_schedule(&[unit_link(0.0, 0.0)], 1.0, params(), PowerScheme::Uniform, GridOptions::default()).unwrap();
        assert_eq!(s.slot_count(), 1);
    }

    #[test]
    fn spread_grid_fits_one_slot() {
        let links: Vec<GeoLink> = (0..3)
            .flat_map(|i| (0..3).map(move |j| unit_link(100.0 * i as f64, 100.0 * j as f64)))
            .collect();
        let s = grid_schedule(&links, 1.0, params(), PowerScheme::Uniform, GridOptions::default()).unwrap();
        assert_eq!(s.slot_count(), 1);
    }

    #[test]
    fn coincident_links_take_one_slot_each() {
        let links = vec![unit_link(0.0, 0.0); 4];
        let s = grid_schedule(&links, 1.0, params(), PowerScheme::Uniform, GridOptions::default()).unwrap();
        assert_eq!(s.slot_count(), 4);
        let c = sinr_conflict_graph(&links, params(), PowerScheme::Uniform).unwrap();
        for slot in &s.slots {
            assert!(c.is_feasible(slot.links()).unwrap());
        }
    }

    #[test]
    fn dense_row_needs_retries_or_more_colors() {
        // unit links every 1.5 along a line: neighbors in one slot would interfere heavily
        let links: Vec<GeoLink> = (0..12).map(|i| unit_link(1.5 * i as f64, 0.0)).collect();
        let s = grid_schedule(&links, 1.0, params(), PowerScheme::Uniform, GridOptions::default()).unwrap();
        let c = sinr_conflict_graph(&links, params(), PowerScheme::Uniform).unwrap();
        for slot in &s.slots {
            assert!(c.is_feasible(slot.links()).unwrap());
        }
        assert!(s.slot_count() <= s.period * s.period * s.layers);
    }

    #[test]
    fn retry_budget_is_reported() {
        let links = vec![unit_link(0.0, 0.0), unit_link(3.0, 0.0)];
        let options = GridOptions {
            separation: 0.1,
            max_attempts: 1,
        };
        // period 3 puts cells 0 and 3 in the same color; at distance 2 they clip
        let err = grid_schedule(&links, 1.0, SinrParams::new(2.0, 4.0, 0.0).unwrap(), PowerScheme::Uniform, options);
        assert!(matches!(err, Err(Error::GridRetriesExhausted { attempts: 1, .. })));
    }

    #[test]
    fn length_precondition() {
        let long = GeoLink::new(Point::new(0.0, 0.0), Point::new(2.5, 0.0));
        assert!(grid_schedule(&[long], 1.0, params(), PowerScheme::Uniform, GridOptions::default()).is_err());
    }

    #[test]
    fn length_classes_at_boundaries() {
        assert_eq!(length_class(1.0, 1.0), 0);
        assert_eq!(length_class(1.999, 1.0), 0);
        assert_eq!(length_class(2.0, 1.0), 1);
        assert_eq!(length_class(0.3 * 8.0, 0.3), 3);
        assert_eq!(length_class(7.9, 1.0), 2);
    }

    #[test]
    fn wheel_classes_need_k_slots() {
        let w = gen_wheel(3, false).unwrap();
        let links = w.graph.geo_links().unwrap();
        let p = params();
        let s = mst_length_class_schedule(&w.graph, p, PowerScheme::Uniform, GridOptions::default()).unwrap();
        assert!(s.slot_count() >= 3);
        let c: ConflictGraph = sinr_conflict_graph(&links, p, PowerScheme::Uniform).unwrap();
        assert!(verify(&w.graph, &c, &s, Target::Spanning).ok());
    }
}
