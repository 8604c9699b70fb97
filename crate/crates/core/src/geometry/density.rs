//! Sparsity and density of link sets: the most link endpoints any
//! axis-aligned square of a given side can contain.

use super::{GeoLink, Point};
use crate::error::{Error, Result};
use crate::graph::LinkId;

const SLACK: f64 = 1e-9;

/// Most endpoints inside one `ell`-square, for links of length at most `ell`.
pub fn sparsity(links: &[GeoLink], ell: f64) -> Result<usize> {
    check_side(ell)?;
    if let Some((i, l)) = links.iter().enumerate().find(|(_, l)| l.length() > ell * (1.0 + SLACK)) {
        return Err(Error::InvalidParameter(format!(
            "sparsity at scale {ell} needs links of length at most {ell}, but {} has length {}",
            LinkId(i),
            l.length()
        )));
    }
    Ok(max_square_hits(&endpoints(links), ell))
}

/// Most endpoints inside one `ell`-square, for links of length at least `ell`.
pub fn density(links: &[GeoLink], ell: f64) -> Result<usize> {
    check_side(ell)?;
    if let Some((i, l)) = links.iter().enumerate().find(|(_, l)| l.length() < ell * (1.0 - SLACK)) {
        return Err(Error::InvalidParameter(format!(
            "density at scale {ell} needs links of length at least {ell}, but {} has length {}",
            LinkId(i),
            l.length()
        )));
    }
    Ok(max_square_hits(&endpoints(links), ell))
}

fn check_side(ell: f64) -> Result<()> {
    if ell > 0.0 && ell.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("square side {ell} must be positive")))
    }
}

fn endpoints(links: &[GeoLink]) -> Vec<Point> {
    links.iter().flat_map(|l| [l.sender, l.receiver]).collect()
}

// A best closed square can be slid right and up until some point lies on its
// left edge and some point on its bottom edge without losing any point, so
// left edges at point x-coordinates and a sliding window over y suffice.
fn max_square_hits(points: &[Point], ell: f64) -> usize {
    let mut best = 0;
    let mut ys = Vec::with_capacity(points.len());
    for anchor in points {
        ys.clear();
        ys.extend(
            points
                .iter()
                .filter(|p| p.x >= anchor.x && p.x <= anchor.x + ell)
                .map(|p| p.y),
        );
        ys.sort_by(f64::total_cmp);
        let mut lo = 0;
        for hi in 0..ys.len() {
            while ys[hi] - ys[lo] > ell {
                lo += 1;
            }
            best = best.max(hi - lo + 1);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_link(x: f64, y: f64) -> GeoLink {
        GeoLink::new(Point::new(x, y), Point::new(x + 1.0, y))
    }

    #[test]
    fn examples() {
        assert_eq!(sparsity(&[unit_link(0.0, 0.0)], 1.0).unwrap(), 2);
        let stack = vec![unit_link(0.0, 0.0); 5];
        assert_eq!(density(&stack, 1.0).unwrap(), 10);
        let coincident: Vec<GeoLink> = (0..4)
            .map(|i| GeoLink::new(Point::new(0.0, 0.0), Point::polar(1.0, i as f64)))
            .collect();
        // four senders on one point, receivers spread around it
        assert!(density(&coincident, 1.0).unwrap() >= 4);
        assert_eq!(sparsity(&[unit_link(0.0, 0.0), unit_link(10.0, 0.0)], 1.0).unwrap(), 2);
    }

    #[test]
    fn preconditions() {
        assert!(sparsity(&[unit_link(0.0, 0.0)], 0.5).is_err());
        assert!(density(&[unit_link(0.0, 0.0)], 2.0).is_err());
        assert!(sparsity(&[], 0.0).is_err());
    }

    fn brute(points: &[Point], ell: f64) -> usize {
        // Every candidate corner from coordinate pairs, shifted by 0 and -ell.
        let mut best = 0;
        for a in points {
            for b in points {
                for dx in [0.0, -ell] {
                    for dy in [0.0, -ell] {
                        let (x0, y0) = (a.x + dx, b.y + dy);
                        let count = points
                            .iter()
                            .filter(|p| p.x >= x0 && p.x <= x0 + ell && p.y >= y0 && p.y <= y0 + ell)
                            .count();
                        best = best.max(count);
                    }
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn window_search_matches_corner_enumeration(pts in proptest::collection::vec((0i32..20, 0i32..20), 1..25), ell in 1i32..6) {
            let points: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x as f64 * 0.5, y as f64 * 0.5)).collect();
            prop_assert_eq!(max_square_hits(&points, ell as f64), brute(&points, ell as f64));
        }
    }
}
