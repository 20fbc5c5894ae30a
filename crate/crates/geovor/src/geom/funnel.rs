use super::point::{orient2d, Point};
use super::triangulate::Triangulation;
use crate::error::{GeovorError, Result};

/// A geodesic (shortest) path between two points inside a simple polygon.
/// Internal waypoints are reflex polygon vertices.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub waypoints: Vec<Point>,
    pub length: f64,
}

impl GeodesicPath {
    fn from_waypoints(mut pts: Vec<Point>) -> GeodesicPath {
        pts.dedup_by(|a, b| a.dist(*b) < 1e-12);
        let length = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
        GeodesicPath {
            waypoints: pts,
            length,
        }
    }
}

/// Shortest path between a and b via the funnel (string pulling) algorithm
/// over the triangle corridor in the dual tree.
pub fn shortest_path(tri: &Triangulation, a: Point, b: Point) -> Result<GeodesicPath> {
    let eps = 1e-9 * tri.polygon().diameter().max(1.0);
    if !tri.polygon().contains(a, eps) {
        return Err(GeovorError::PointOutsidePolygon(a.x, a.y));
    }
    if !tri.polygon().contains(b, eps) {
        return Err(GeovorError::PointOutsidePolygon(b.x, b.y));
    }
    if a.dist(b) < 1e-15 {
        return Ok(GeodesicPath {
            waypoints: vec![a],
            length: 0.0,
        });
    }
    let ta = tri
        .locate(a, 1e-9)
        .ok_or(GeovorError::PointOutsidePolygon(a.x, a.y))?;
    let tb = tri
        .locate(b, 1e-9)
        .ok_or(GeovorError::PointOutsidePolygon(b.x, b.y))?;
    shortest_path_located(tri, a, ta, b, tb)
}

/// Same as [`shortest_path`], skipping the containment checks and point
/// location when the triangles of both endpoints are already known.
pub fn shortest_path_located(
    tri: &Triangulation,
    a: Point,
    ta: usize,
    b: Point,
    tb: usize,
) -> Result<GeodesicPath> {
    if a.dist(b) < 1e-15 {
        return Ok(GeodesicPath {
            waypoints: vec![a],
            length: 0.0,
        });
    }
    if ta == tb {
        return Ok(GeodesicPath::from_waypoints(vec![a, b]));
    }

    let corridor = tri.dual_path(ta, tb);
    let mut portals: Vec<(Point, Point)> = Vec::with_capacity(corridor.len() + 1);
    for w in corridor.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let tri0 = tri.triangles()[t0];
        let tri1 = tri.triangles()[t1];
        let shared: Vec<usize> = tri0
            .iter()
            .copied()
            .filter(|v| tri1.contains(v))
            .collect();
        debug_assert_eq!(shared.len(), 2);
        let v = tri.polygon().vertices();
        let (u, w2) = (v[shared[0]], v[shared[1]]);
        let c0 = centroid(tri.triangle_points(t0));
        let c1 = centroid(tri.triangle_points(t1));
        let d = c1 - c0;
        if d.cross(u - w2) > 0.0 {
            portals.push((u, w2));
        } else {
            portals.push((w2, u));
        }
    }
    portals.push((b, b));

    Ok(GeodesicPath::from_waypoints(string_pull(a, &portals, b)))
}

fn centroid(t: [Point; 3]) -> Point {
    Point::new(
        (t[0].x + t[1].x + t[2].x) / 3.0,
        (t[0].y + t[1].y + t[2].y) / 3.0,
    )
}

/// Whether the new portal point p lands strictly beyond the opposite funnel
/// boundary point, forcing that boundary point to become the new apex.
/// Collinear ties (apex, boundary and p on one line) count as a crossing only
/// when p lies on the boundary's side of the apex and at least as far out.
/// `sign` is +1 when testing against the left boundary and -1 against the
/// right one, matching the orientation convention of the funnel.
fn crosses_boundary(apex: Point, boundary: Point, p: Point, sign: f64) -> bool {
    let o = sign * orient2d(apex, boundary, p);
    if o != 0.0 {
        return o > 0.0;
    }
    (boundary - apex).dot(p - apex) > 0.0 && (p - apex).norm_sq() >= (boundary - apex).norm_sq()
}

fn string_pull(start: Point, portals: &[(Point, Point)], goal: Point) -> Vec<Point> {
    let mut pts = vec![start];
    let mut apex = start;
    let mut left = portals[0].0;
    let mut right = portals[0].1;
    let (mut left_i, mut right_i) = (0usize, 0usize);
    let mut apex_i;

    let mut i = 1;
    while i < portals.len() {
        let (pl, pr) = portals[i];

        // Tighten the right boundary.
        if orient2d(apex, right, pr) >= 0.0 {
            if apex == right || !crosses_boundary(apex, left, pr, 1.0) {
                right = pr;
                right_i = i;
            } else {
                // Right boundary crossed over left: left becomes the new apex.
                pts.push(left);
                apex = left;
                apex_i = left_i;
                left = apex;
                right = apex;
                right_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }

        // Tighten the left boundary.
        if orient2d(apex, left, pl) <= 0.0 {
            if apex == left || !crosses_boundary(apex, right, pl, -1.0) {
                left = pl;
                left_i = i;
            } else {
                pts.push(right);
                apex = right;
                apex_i = right_i;
                left = apex;
                right = apex;
                left_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }
        i += 1;
    }
    pts.push(goal);
    pts
}

/// Length of the shortest path between a and b.
pub fn geodesic_distance(tri: &Triangulation, a: Point, b: Point) -> Result<f64> {
    Ok(shortest_path(tri, a, b)?.length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polygon::Polygon;
    use crate::geom::triangulate::triangulate;

    fn tri_of(pts: &[(f64, f64)]) -> Triangulation {
        let p = Polygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap();
        triangulate(&p).unwrap()
    }

    fn square() -> Triangulation {
        tri_of(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)])
    }

    fn l_shape() -> Triangulation {
        tri_of(&[
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 2.0),
            (2.0, 2.0),
            (2.0, 4.0),
            (0.0, 4.0),
        ])
    }

    #[test]
    fn mutually_visible_pair() {
        let t = square();
        let p = shortest_path(&t, Point::new(1.0, 1.0), Point::new(3.0, 3.0)).unwrap();
        assert_eq!(p.waypoints.len(), 2);
        assert!((p.length - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_points() {
        let t = square();
        let p = shortest_path(&t, Point::new(2.0, 2.0), Point::new(2.0, 2.0)).unwrap();
        assert_eq!(p.waypoints.len(), 1);
        assert_eq!(p.length, 0.0);
    }

    #[test]
    fn l_shape_visible_across_notch() {
        // (0.5, 3) lies on the visible side of the extension segment through
        // the notch corner, so the geodesic is the straight segment.
        let t = l_shape();
        let p = shortest_path(&t, Point::new(3.0, 0.5), Point::new(0.5, 3.0)).unwrap();
        assert_eq!(p.waypoints.len(), 2);
        assert!((p.length - 2.5 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn l_shape_corner_path() {
        let t = l_shape();
        let p = shortest_path(&t, Point::new(3.0, 0.5), Point::new(1.5, 3.5)).unwrap();
        assert_eq!(p.waypoints.len(), 3);
        assert!(p.waypoints[1].dist(Point::new(2.0, 2.0)) < 1e-12);
        assert!((p.length - (3.25f64.sqrt() + 2.5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_endpoints() {
        let t = l_shape();
        let a = Point::new(3.5, 1.5);
        let b = Point::new(0.3, 3.7);
        let p1 = shortest_path(&t, a, b).unwrap();
        let p2 = shortest_path(&t, b, a).unwrap();
        assert!((p1.length - p2.length).abs() < 1e-12);
        let rev: Vec<Point> = p2.waypoints.iter().rev().copied().collect();
        assert_eq!(p1.waypoints.len(), rev.len());
        for (x, y) in p1.waypoints.iter().zip(rev.iter()) {
            assert!(x.dist(*y) < 1e-12);
        }
    }

    #[test]
    fn start_exactly_on_triangulation_diagonal() {
        // (0.5, 0.5) lies on the diagonal (0,0)-(2,2); the funnel must not
        // emit a spurious bend at (0,0).
        let t = l_shape();
        let p = shortest_path(&t, Point::new(0.5, 0.5), Point::new(2.0, 4.0)).unwrap();
        assert_eq!(p.waypoints.len(), 2);
        assert!((p.length - Point::new(0.5, 0.5).dist(Point::new(2.0, 4.0))).abs() < 1e-12);
    }

    #[test]
    fn outside_point_rejected() {
        let t = square();
        let r = shortest_path(&t, Point::new(-1.0, 0.0), Point::new(1.0, 1.0));
        assert!(matches!(r, Err(GeovorError::PointOutsidePolygon(..))));
    }
}
