//! Geometric instantiations of conflict graphs in the plane.

mod density;
mod generators;
mod grid;
mod models;
mod sinr;

use serde::{Deserialize, Serialize};

pub use density::{density, sparsity};
pub use generators::{
    gen_grid, gen_random_missing_links, gen_wheel, GeneratedGraph, RandomLinkParams, Wheel, WheelLinkKind,
};
pub use grid::{grid_schedule, grid_schedule_subset, mst_length_class_schedule, GridOptions, GridSchedule};
pub(crate) use grid::length_class;
pub use models::{disk_conflict_graph, l2_conflict_graph, line_graph_conflicts, protocol_conflict_graph};
pub use sinr::{sinr_conflict_graph, PowerScheme, SinrModel, SinrParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Point::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A directed link from a sender to a receiver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoLink {
    pub sender: Point,
    pub receiver: Point,
}

impl GeoLink {
    pub const fn new(sender: Point, receiver: Point) -> Self {
        GeoLink { sender, receiver }
    }

    pub fn length(&self) -> f64 {
        self.sender.distance(self.receiver)
    }

    /// Distance between the closest points of the two segments.
    pub fn segment_distance(&self, other: &GeoLink) -> f64 {
        let (a, b, c, d) = (self.sender, self.receiver, other.sender, other.receiver);
        if segments_cross(a, b, c, d) {
            return 0.0;
        }
        point_segment_distance(a, c, d)
            .min(point_segment_distance(b, c, d))
            .min(point_segment_distance(c, a, b))
            .min(point_segment_distance(d, a, b))
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

// Proper crossings only; touching and collinear overlaps are caught by the
// endpoint distances, which are zero in those cases.
fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * dx, a.y + t * dy))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> GeoLink {
        GeoLink::new(Point::new(ax, ay), Point::new(bx, by))
    }

    #[test]
    fn segment_distances() {
        assert_eq!(seg(0.0, 0.0, 1.0, 0.0).segment_distance(&seg(0.0, 3.0, 1.0, 3.0)), 3.0);
        assert_eq!(seg(0.0, 0.0, 2.0, 2.0).segment_distance(&seg(0.0, 2.0, 2.0, 0.0)), 0.0);
        assert_eq!(seg(0.0, 0.0, 1.0, 0.0).segment_distance(&seg(0.5, 0.0, 3.0, 0.0)), 0.0);
        let d = seg(0.0, 0.0, 0.0, 2.0).segment_distance(&seg(1.0, 1.0, 3.0, 1.0));
        assert_eq!(d, 1.0);
    }
}
