//! JSON instance files and schedule reports.
//!
//! Output is canonical: object keys sorted, floats in shortest round-trip
//! form, two-space indentation and a trailing newline, so reruns are
//! byte-identical.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::conflict::{ConflictGraph, Slot};
use crate::error::{Error, Result};
use crate::geometry::{
    disk_conflict_graph, l2_conflict_graph, line_graph_conflicts, protocol_conflict_graph, sinr_conflict_graph,
    GeoLink, Point, PowerScheme, SinrParams,
};
use crate::graph::{LinkGraph, LinkId, LinkSpec, NodeId};
use crate::schedule::{verify, Schedule, Target, Verification};
use crate::scheduler::{conn, mst_greedy};
use crate::steiner::{steiner_schedule, SteinerInstance};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: u32,
    pub nodes: Vec<NodeEntry>,
    pub links: Vec<LinkEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<Vec<usize>>,
    pub conflict: ConflictSpec,
    #[serde(default)]
    pub order: OrderKind,
    /// Link ids in `≺` order; required with `"order": "explicit"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

/// A link; sender and receiver coordinates default to the node positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ry: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictModel {
    Explicit,
    Sinr,
    L2,
    Disk,
    Protocol,
    Line,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConflictSpec {
    pub model: ConflictModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
}

impl ConflictSpec {
    pub fn model(model: ConflictModel) -> Self {
        ConflictSpec {
            model,
            weights: None,
            params: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub e: usize,
    pub f: usize,
    pub w: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerScheme>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "K1", default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(rename = "K2", default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    #[default]
    Length,
    Explicit,
}

/// A parsed and validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: LinkGraph,
    pub conflicts: ConflictGraph,
    pub terminals: Option<Vec<NodeId>>,
}

impl InstanceFile {
    /// Describes `g` with node positions if given, geometry as coordinates and
    /// lengths only where they differ from the geometric ones.
    pub fn from_graph(g: &LinkGraph, positions: Option<&[Point]>, conflict: ConflictSpec) -> Self {
        let nodes = (0..g.node_count())
            .map(|id| NodeEntry {
                id,
                x: positions.map(|p| p[id].x),
                y: positions.map(|p| p[id].y),
            })
            .collect();
        let links = g
            .links()
            .iter()
            .map(|l| {
                let geo = l.geometry;
                // Coordinates are implied when they coincide with the node positions.
                let implied = match (positions, geo) {
                    (Some(p), Some(geo)) => geo.sender == p[l.u.0] && geo.receiver == p[l.v.0],
                    _ => false,
                };
                let explicit = geo.filter(|_| !implied);
                LinkEntry {
                    id: l.id.0,
                    u: l.u.0,
                    v: l.v.0,
                    sx: explicit.map(|g| g.sender.x),
                    sy: explicit.map(|g| g.sender.y),
                    rx: explicit.map(|g| g.receiver.x),
                    ry: explicit.map(|g| g.receiver.y),
                    length: match geo {
                        Some(geo) if geo.length() == l.length => None,
                        _ => Some(l.length),
                    },
                }
            })
            .collect();
        InstanceFile {
            format: FORMAT_VERSION,
            nodes,
            links,
            terminals: None,
            conflict,
            order: OrderKind::Length,
            permutation: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.format != FORMAT_VERSION {
            return Err(Error::Input(format!(
                "unsupported instance format {} (expected {FORMAT_VERSION})",
                file.format
            )));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn build(&self) -> Result<Instance> {
        let n = self.nodes.len();
        let mut positions: Vec<Option<Point>> = vec![None; n];
        let mut seen = vec![false; n];
        for node in &self.nodes {
            if node.id >= n || std::mem::replace(&mut seen[node.id], true) {
                return Err(Error::Input(format!("node ids must be 0..{n}, each once; got {}", node.id)));
            }
            positions[node.id] = match (node.x, node.y) {
                (Some(x), Some(y)) => Some(Point::new(x, y)),
                (None, None) => None,
                _ => return Err(Error::Input(format!("node {} has only one coordinate", node.id))),
            };
        }

        let m = self.links.len();
        let mut entries: Vec<Option<&LinkEntry>> = vec![None; m];
        for link in &self.links {
            if link.id >= m || entries[link.id].is_some() {
                return Err(Error::Input(format!("link ids must be 0..{m}, each once; got {}", link.id)));
            }
            entries[link.id] = Some(link);
        }
        let mut specs = Vec::with_capacity(m);
        for link in entries.into_iter().flatten() {
            let mut spec = LinkSpec::new(link.u, link.v);
            if let Some(geo) = link_geometry(link, &positions)? {
                spec = spec.with_geometry(geo);
            }
            if let Some(len) = link.length {
                spec = spec.with_length(len);
            }
            specs.push(spec);
        }
        let graph = LinkGraph::new(n, specs)?;

        let mut conflicts = self.build_conflicts(&graph)?;
        match (self.order, &self.permutation) {
            (OrderKind::Length, None) => {}
            (OrderKind::Length, Some(_)) => {
                return Err(Error::Input("a permutation needs \"order\": \"explicit\"".into()));
            }
            (OrderKind::Explicit, Some(perm)) => {
                let perm: Vec<LinkId> = perm.iter().map(|&i| LinkId(i)).collect();
                conflicts = conflicts.with_order(&perm)?;
            }
            (OrderKind::Explicit, None) => {
                return Err(Error::Input("\"order\": \"explicit\" needs a permutation".into()));
            }
        }

        let terminals = match &self.terminals {
            None => None,
            Some(t) => {
                if let Some(&bad) = t.iter().find(|&&t| t >= n) {
                    return Err(Error::UnknownNode(NodeId(bad)));
                }
                Some(t.iter().map(|&t| NodeId(t)).collect())
            }
        };
        Ok(Instance {
            graph,
            conflicts,
            terminals,
        })
    }

    fn build_conflicts(&self, g: &LinkGraph) -> Result<ConflictGraph> {
        let spec = &self.conflict;
        if spec.model != ConflictModel::Explicit && spec.weights.is_some() {
            return Err(Error::Input(format!("model {:?} does not take explicit weights", spec.model)));
        }
        let params = spec.params.unwrap_or_default();
        let need = |value: Option<f64>, name: &str| {
            value.ok_or_else(|| Error::Input(format!("conflict model {:?} needs parameter {name}", spec.model)))
        };
        match spec.model {
            ConflictModel::Explicit => {
                let weights = spec
                    .weights
                    .as_deref()
                    .unwrap_or_default()
                    .iter()
                    .map(|w| (LinkId(w.e), LinkId(w.f), w.w))
                    .collect();
                ConflictGraph::for_graph(g, weights)
            }
            ConflictModel::L2 => l2_conflict_graph(g),
            ConflictModel::Line => line_graph_conflicts(g),
            ConflictModel::Sinr => {
                let sinr = SinrParams::new(
                    need(params.alpha, "alpha")?,
                    need(params.beta, "beta")?,
                    params.noise.unwrap_or(0.0),
                )?;
                let power = params.power.unwrap_or(PowerScheme::Uniform);
                sinr_conflict_graph(&g.geo_links()?, sinr, power)
            }
            ConflictModel::Disk => disk_conflict_graph(&g.geo_links()?, need(params.k, "K")?),
            ConflictModel::Protocol => {
                protocol_conflict_graph(&g.geo_links()?, need(params.k1, "K1")?, need(params.k2, "K2")?)
            }
        }
    }
}

fn link_geometry(link: &LinkEntry, positions: &[Option<Point>]) -> Result<Option<GeoLink>> {
    let position = |node: usize| positions.get(node).copied().flatten();
    let sender = match (link.sx, link.sy) {
        (Some(x), Some(y)) => Some(Point::new(x, y)),
        (None, None) => position(link.u),
        _ => return Err(Error::Input(format!("link {} has only one sender coordinate", link.id))),
    };
    let receiver = match (link.rx, link.ry) {
        (Some(x), Some(y)) => Some(Point::new(x, y)),
        (None, None) => position(link.v),
        _ => return Err(Error::Input(format!("link {} has only one receiver coordinate", link.id))),
    };
    match (sender, receiver) {
        (Some(s), Some(r)) => Ok(Some(GeoLink::new(s, r))),
        (None, None) => Ok(None),
        _ => Err(Error::Input(format!("link {} has only one located endpoint", link.id))),
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // Going through Value sorts object keys.
    let value = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Conn,
    MstGreedy,
    Steiner,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Conn => "conn",
            Algorithm::MstGreedy => "mst-greedy",
            Algorithm::Steiner => "steiner",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conn" => Ok(Algorithm::Conn),
            "mst-greedy" => Ok(Algorithm::MstGreedy),
            "steiner" => Ok(Algorithm::Steiner),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm `{other}` (expected conn, mst-greedy or steiner)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleReport {
    pub format: u32,
    pub algorithm: Algorithm,
    pub slots: Vec<Slot>,
    pub tree: Vec<LinkId>,
    pub stats: ReportStats,
    pub verification: VerificationSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportStats {
    pub slot_count: usize,
    pub dual_copies: bool,
    /// Exact inductive independence, when the conflict graph is small enough.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_estimate: Option<f64>,
    /// ℓ∞ load of the Steiner tree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_load: Option<u32>,
    /// Wall-clock time; only recorded on request since it breaks byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationSummary {
    pub feasible: bool,
    pub spanning: bool,
    pub partition: bool,
}

impl VerificationSummary {
    pub fn ok(&self) -> bool {
        self.feasible && self.spanning && self.partition
    }
}

impl From<&Verification> for VerificationSummary {
    fn from(v: &Verification) -> Self {
        VerificationSummary {
            feasible: v.feasible,
            spanning: v.spanning,
            partition: v.partition,
        }
    }
}

impl ScheduleReport {
    pub fn from_json(text: &str) -> Result<Self> {
        let report: ScheduleReport = serde_json::from_str(text)?;
        if report.format != FORMAT_VERSION {
            return Err(Error::Input(format!(
                "unsupported report format {} (expected {FORMAT_VERSION})",
                report.format
            )));
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            slots: self.slots.clone(),
            tree: self.tree.clone(),
            dual_copies: self.stats.dual_copies,
        }
    }
}

impl Instance {
    pub fn steiner(&self) -> Result<SteinerInstance> {
        let terminals = self
            .terminals
            .clone()
            .ok_or_else(|| Error::Input("the instance lists no terminals".into()))?;
        SteinerInstance::new(self.graph.clone(), terminals, self.conflicts.clone())
    }

    /// What a schedule produced by `algorithm` has to connect.
    pub fn target(&self, algorithm: Algorithm) -> Target<'_> {
        match (algorithm, &self.terminals) {
            (Algorithm::Steiner, Some(t)) => Target::Steiner(t),
            _ => Target::Spanning,
        }
    }

    /// Runs `algorithm` and reports the schedule with an independent verification.
    pub fn schedule(&self, algorithm: Algorithm, dual: bool, caps: &Caps) -> Result<ScheduleReport> {
        let mut max_load = None;
        let schedule = match algorithm {
            Algorithm::Conn => conn(&self.graph, &self.conflicts, dual)?,
            _ if dual => {
                return Err(Error::InvalidParameter(format!(
                    "the dual variant is only available for conn, not {algorithm}"
                )))
            }
            Algorithm::MstGreedy => mst_greedy(&self.graph, &self.conflicts)?,
            Algorithm::Steiner => {
                let run = steiner_schedule(&self.steiner()?)?;
                max_load = Some(run.z);
                run.schedule
            }
        };
        let rho_estimate = if self.conflicts.len() <= caps.rho_links {
            Some(self.conflicts.measure_rho(caps.rho_links)?)
        } else {
            None
        };
        let verification = verify(&self.graph, &self.conflicts, &schedule, self.target(algorithm));
        Ok(ScheduleReport {
            format: FORMAT_VERSION,
            algorithm,
            stats: ReportStats {
                slot_count: schedule.slot_count(),
                dual_copies: schedule.dual_copies,
                rho_estimate,
                max_load,
                runtime_ms: None,
            },
            verification: (&verification).into(),
            slots: schedule.slots,
            tree: schedule.tree,
        })
    }

    /// Re-derives the verification of a report against this instance.
    pub fn verify_report(&self, report: &ScheduleReport) -> Verification {
        verify(&self.graph, &self.conflicts, &report.schedule(), self.target(report.algorithm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gen_wheel;
    use proptest::prelude::*;

    fn single_edge() -> InstanceFile {
        InstanceFile::from_json(
            r#"{"format": 1, "nodes": [{"id": 0}, {"id": 1}], "links": [{"id": 0, "u": 0, "v": 1}],
                "conflict": {"model": "explicit", "weights": []}}"#,
        )
        .unwrap()
    }

    #[test]
    fn single_edge_conn_is_one_slot() {
        let inst = single_edge().build().unwrap();
        let report = inst.schedule(Algorithm::Conn, false, &Caps::default()).unwrap();
        assert_eq!(report.stats.slot_count, 1);
        assert!(report.verification.ok());
    }

    #[test]
    fn wheel_under_l2_needs_k_mst_slots() {
        let w = gen_wheel(3, false).unwrap();
        let file = InstanceFile::from_graph(&w.graph, Some(&w.positions), ConflictSpec::model(ConflictModel::L2));
        let inst = InstanceFile::from_json(&file.to_json().unwrap()).unwrap().build().unwrap();
        let report = inst.schedule(Algorithm::MstGreedy, false, &Caps::default()).unwrap();
        assert!(report.stats.slot_count >= 3);
        assert!(report.verification.ok());
    }

    #[test]
    fn malformed_inputs() {
        let mut f = single_edge();
        f.links[0].v = 5;
        assert!(matches!(f.build(), Err(Error::EndpointOutOfRange { .. })));

        let mut f = single_edge();
        f.conflict.weights = Some(vec![WeightEntry { e: 0, f: 0, w: 1.0 }]);
        assert!(f.build().is_err());

        let mut f = single_edge();
        f.conflict.weights = Some(vec![WeightEntry { e: 0, f: 1, w: -1.0 }]);
        assert!(f.build().is_err());

        let mut f = single_edge();
        f.order = OrderKind::Explicit;
        assert!(f.build().is_err());

        let mut f = single_edge();
        f.conflict = ConflictSpec::model(ConflictModel::Sinr);
        assert!(f.build().is_err());

        assert!(InstanceFile::from_json(r#"{"format": 2, "nodes": [], "links": [], "conflict": {"model": "l2"}}"#).is_err());
        assert!(InstanceFile::from_json(r#"{"format": 1, "nodes": [], "links": [], "conflict": {"model": "l2"}, "extra": 1}"#).is_err());
    }

    #[test]
    fn canonical_json_sorts_keys() {
        let text = single_edge().to_json().unwrap();
        let conflict = text.find("\"conflict\"").unwrap();
        let links = text.find("\"links\"").unwrap();
        let nodes = text.find("\"nodes\"").unwrap();
        assert!(conflict < links && links < nodes);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn sinr_instance_builds_from_positions() {
        let text = r#"{"format": 1,
            "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0}, {"id": 2, "x": 0, "y": 1}],
            "links": [{"id": 0, "u": 0, "v": 1}, {"id": 1, "u": 0, "v": 2}],
            "conflict": {"model": "sinr", "params": {"alpha": 3, "beta": 1, "noise": 0, "power": {"kind": "uniform"}}}}"#;
        let inst = InstanceFile::from_json(text).unwrap().build().unwrap();
        assert_eq!(inst.conflicts.weight(LinkId(0), LinkId(1)), 1.0);
        let report = inst.schedule(Algorithm::Conn, false, &Caps::default()).unwrap();
        assert_eq!(report.stats.slot_count, 2);
    }

    fn arb_file() -> impl Strategy<Value = InstanceFile> {
        (2usize..6, proptest::collection::vec((0usize..6, 0usize..6, 0u32..400), 1..8), any::<bool>()).prop_map(
            |(n, raw, located)| {
                let links: Vec<LinkEntry> = raw
                    .iter()
                    .enumerate()
                    .map(|(id, &(u, v, len))| LinkEntry {
                        id,
                        u: u % n,
                        v: v % n,
                        sx: None,
                        sy: None,
                        rx: None,
                        ry: None,
                        length: (!located).then_some(f64::from(len) / 7.0),
                    })
                    .collect();
                let weights = (0..links.len())
                    .flat_map(|e| (0..links.len()).map(move |f| (e, f)))
                    .filter(|&(e, f)| e != f && (e * 7 + f) % 3 == 0)
                    .map(|(e, f)| WeightEntry {
                        e,
                        f,
                        w: (e + 2 * f) as f64 / 13.0,
                    })
                    .collect();
                InstanceFile {
                    format: FORMAT_VERSION,
                    nodes: (0..n)
                        .map(|id| NodeEntry {
                            id,
                            x: located.then_some(id as f64 * 0.1),
                            y: located.then_some(1.0 / (id + 1) as f64),
                        })
                        .collect(),
                    terminals: Some(vec![0, n - 1]),
                    links,
                    conflict: ConflictSpec {
                        model: ConflictModel::Explicit,
                        weights: Some(weights),
                        params: None,
                    },
                    order: OrderKind::Length,
                    permutation: None,
                }
            },
        )
    }

    proptest! {
        #[test]
        fn instance_files_round_trip(file in arb_file()) {
            let text = file.to_json().unwrap();
            let back = InstanceFile::from_json(&text).unwrap();
            prop_assert_eq!(&back, &file);
            prop_assert_eq!(back.to_json().unwrap(), text);
        }

        #[test]
        fn reports_round_trip(slots in proptest::collection::vec(proptest::collection::vec(0usize..30, 1..5), 0..5), rho in proptest::option::of(0.0f64..40.0)) {
            let slots: Vec<Slot> = slots.into_iter().map(|s| Slot::new(s.into_iter().map(LinkId).collect())).collect();
            let schedule = Schedule::from_slots(slots);
            let report = ScheduleReport {
                format: FORMAT_VERSION,
                algorithm: Algorithm::Conn,
                stats: ReportStats { slot_count: schedule.slot_count(), dual_copies: false, rho_estimate: rho, max_load: None, runtime_ms: None },
                verification: VerificationSummary { feasible: true, spanning: false, partition: true },
                slots: schedule.slots,
                tree: schedule.tree,
            };
            let text = report.to_json().unwrap();
            prop_assert_eq!(ScheduleReport::from_json(&text).unwrap(), report);
        }
    }
}
