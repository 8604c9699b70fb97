//! Scheduling spanning trees and Steiner trees of a link graph under a
//! fractional conflict graph.
//!
//! The core objects are a [`LinkGraph`] of available links, a
//! [`ConflictGraph`] assigning each ordered pair of links an interference
//! weight, and a [`Schedule`] partitioning a tree of the link graph into
//! slots that are feasible in the conflict graph.

pub mod caps;
pub mod conflict;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod schedule;
pub mod scheduler;
pub mod steiner;
pub mod union_find;

pub use caps::Caps;
pub use conflict::{ConflictGraph, Slot, Sweep};
pub use error::{Error, Result};
pub use graph::{Link, LinkGraph, LinkId, LinkSpec, NodeId};
pub use schedule::{verify, Schedule, Target, Verification, Violation};
pub use scheduler::{cap_kruskal, cap_kruskal_run, conn, mst_greedy, CapKruskalOptions, CapKruskalRun};
pub use steiner::{greedy_mmst, mmst_weights, steiner_schedule, SteinerInstance, SteinerSchedule};
