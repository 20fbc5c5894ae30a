//! Brute-force verifiers, independent of the structures they check:
//! visibility-graph Dijkstra for geodesic distances, grid labeling for
//! Voronoi cells, and time bisection for kinetic event detection.

use crate::error::{GeovorError, Result};
use crate::geom::{Point, Polygon, Triangulation};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Deterministic sampling parameters for the oracles.
#[derive(Debug, Clone, Copy)]
pub struct SamplingPlan {
    pub grid_resolution: usize,
    pub time_steps: usize,
    pub eps_time: f64,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            grid_resolution: 32,
            time_steps: 512,
            eps_time: 1e-9,
            seed: 0,
        }
    }
}

/// Shortest geodesic distance via Dijkstra over the visibility graph of
/// {a, b} and all polygon vertices. Independent of the funnel algorithm.
pub fn visibility_graph_distance(polygon: &Polygon, a: Point, b: Point) -> Result<f64> {
    let eps = 1e-9 * polygon.diameter().max(1.0);
    if !polygon.contains(a, eps) {
        return Err(GeovorError::PointOutsidePolygon(a.x, a.y));
    }
    if !polygon.contains(b, eps) {
        return Err(GeovorError::PointOutsidePolygon(b.x, b.y));
    }
    let mut nodes = vec![a, b];
    nodes.extend_from_slice(polygon.vertices());
    let n = nodes.len();

    if polygon.segment_inside(a, b, eps) {
        return Ok(a.dist(b));
    }

    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if polygon.segment_inside(nodes[i], nodes[j], eps) {
                let d = nodes[i].dist(nodes[j]);
                adj[i].push((j, d));
                adj[j].push((i, d));
            }
        }
    }

    #[derive(PartialEq)]
    struct Item(f64, usize);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> Ordering {
            other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal)
        }
    }

    let mut dist = vec![f64::INFINITY; n];
    dist[0] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, 0));
    while let Some(Item(d, u)) = heap.pop() {
        if u == 1 {
            return Ok(d);
        }
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Item(nd, v));
            }
        }
    }
    Ok(dist[1])
}

/// Nearest-site label of one probe point, or None when the point is within
/// eps of a tie (ambiguous).
pub fn nearest_site(
    tri: &Triangulation,
    sites: &[Point],
    p: Point,
    eps: f64,
) -> Result<Option<usize>> {
    let mut ds = Vec::with_capacity(sites.len());
    for &s in sites {
        ds.push(crate::geom::geodesic_distance(tri, s, p)?);
    }
    let mut best = 0;
    for i in 1..ds.len() {
        if ds[i] < ds[best] {
            best = i;
        }
    }
    for i in 0..ds.len() {
        if i != best && ds[i] - ds[best] <= eps {
            return Ok(None);
        }
    }
    Ok(Some(best))
}

/// One labeled grid point.
#[derive(Debug, Clone, Copy)]
pub struct GridLabel {
    pub point: Point,
    /// None marks an ambiguous (near-tie) probe.
    pub label: Option<usize>,
}

/// Deterministic nearest-site labeling of interior grid points.
pub fn grid_label(
    tri: &Triangulation,
    sites: &[Point],
    resolution: usize,
    eps: f64,
) -> Result<Vec<GridLabel>> {
    assert!(resolution >= 16, "resolution must be at least 16");
    let polygon = tri.polygon();
    let (lo, hi) = polygon.bounding_box();
    let mut out = Vec::new();
    for iy in 0..resolution {
        for ix in 0..resolution {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * (ix as f64 + 0.5) / resolution as f64,
                lo.y + (hi.y - lo.y) * (iy as f64 + 0.5) / resolution as f64,
            );
            if polygon.locate(p, eps) != crate::geom::Location::Inside {
                continue;
            }
            out.push(GridLabel {
                point: p,
                label: nearest_site(tri, sites, p, eps)?,
            });
        }
    }
    Ok(out)
}

/// All times in (t0, t1) at which the combinatorial fingerprint changes,
/// located by sampling followed by bisection to width eps_time.
///
/// The fingerprint type must compare exactly (symbolic tags, not floats).
pub fn detect_events_by_bisection<F, K>(
    probe: F,
    t0: f64,
    t1: f64,
    steps: usize,
    eps_time: f64,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<K>,
    K: PartialEq,
{
    assert!(steps >= 2);
    let mut events = Vec::new();
    let dt = (t1 - t0) / steps as f64;
    let mut prev_t = t0;
    let mut prev_k = probe(t0)?;
    for i in 1..=steps {
        let t = t0 + dt * i as f64;
        let k = probe(t)?;
        if k != prev_k {
            // Bisect; if the midpoint fingerprint differs from both ends the
            // interval hides more than one change, so split and recurse.
            let mut stack = vec![(prev_t, t)];
            let mut local = Vec::new();
            let mut iterations = 0usize;
            while let Some((lo, hi)) = stack.pop() {
                iterations += 1;
                if iterations > 10_000 {
                    return Err(GeovorError::ResolutionTooCoarse(format!(
                        "interval [{lo}, {hi}] keeps splitting"
                    )));
                }
                if hi - lo <= eps_time {
                    local.push(0.5 * (lo + hi));
                    continue;
                }
                let mid = 0.5 * (lo + hi);
                let km = probe(mid)?;
                let klo = probe(lo)?;
                let khi = probe(hi)?;
                if km != klo {
                    stack.push((lo, mid));
                }
                if km != khi {
                    stack.push((mid, hi));
                }
            }
            local.sort_by(|a, b| a.partial_cmp(b).unwrap());
            events.extend(local);
        }
        prev_t = t;
        prev_k = k;
    }
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.dedup_by(|a, b| (*a - *b).abs() <= eps_time);
    Ok(events)
}

/// Grid scan plus local refinement for the point equidistant to three sites,
/// minimizing the maximum pairwise geodesic distance gap. Distances come from
/// the visibility-graph Dijkstra, independent of the shortest path map.
///
/// Returns the refined point when the final gap drops below `tol`, None when
/// the three-way equidistant locus misses the polygon. Errors with
/// `ResolutionTooCoarse` when two well-separated near-minima both refine to a
/// gap below `tol` (the equidistant point would not be unique).
pub fn grid_center(
    polygon: &Polygon,
    sites: [Point; 3],
    resolution: usize,
    tol: f64,
) -> Result<Option<Point>> {
    assert!(resolution >= 16, "resolution must be at least 16");
    let diam = polygon.diameter().max(1.0);
    let eps = 1e-9 * diam;
    let gap = |x: Point| -> Result<f64> {
        let d0 = visibility_graph_distance(polygon, sites[0], x)?;
        let d1 = visibility_graph_distance(polygon, sites[1], x)?;
        let d2 = visibility_graph_distance(polygon, sites[2], x)?;
        Ok((d0 - d1).abs().max((d1 - d2).abs()).max((d0 - d2).abs()))
    };

    // Coarse scan; keep well-separated low-gap seeds.
    let (lo, hi) = polygon.bounding_box();
    let cell = ((hi.x - lo.x).max(hi.y - lo.y)) / resolution as f64;
    let mut seeds: Vec<(Point, f64)> = Vec::new();
    for iy in 0..resolution {
        for ix in 0..resolution {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * (ix as f64 + 0.5) / resolution as f64,
                lo.y + (hi.y - lo.y) * (iy as f64 + 0.5) / resolution as f64,
            );
            if polygon.locate(p, eps) != crate::geom::Location::Inside {
                continue;
            }
            let g = gap(p)?;
            if let Some(s) = seeds.iter_mut().find(|s| s.0.dist(p) <= 2.5 * cell) {
                if g < s.1 {
                    *s = (p, g);
                }
            } else {
                seeds.push((p, g));
            }
        }
    }
    seeds.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    seeds.truncate(6);

    // Pattern-search refinement of each seed.
    let mut minima: Vec<(Point, f64)> = Vec::new();
    for &(seed, seed_gap) in &seeds {
        let (mut best, mut best_gap) = (seed, seed_gap);
        let mut window = cell;
        while window > 1e-13 * diam {
            for iy in -3i32..=3 {
                for ix in -3i32..=3 {
                    let p = best + Point::new(ix as f64, iy as f64) * (window / 3.0);
                    if polygon.locate(p, eps) != crate::geom::Location::Inside {
                        continue;
                    }
                    let g = gap(p)?;
                    if g < best_gap {
                        best = p;
                        best_gap = g;
                    }
                }
            }
            window *= 0.5;
        }
        if best_gap < tol {
            minima.push((best, best_gap));
        }
    }
    minima.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    match minima.as_slice() {
        [] => Ok(None),
        [first, rest @ ..] => {
            if rest.iter().any(|m| m.0.dist(first.0) > 1e3 * tol.max(eps)) {
                return Err(GeovorError::ResolutionTooCoarse(format!(
                    "two separated equidistant minima near ({}, {}) and elsewhere",
                    first.0.x, first.0.y
                )));
            }
            Ok(Some(first.0))
        }
    }
}

/// Maximum defining residual over the given sample points.
pub fn equidistance_residual<D1, D2>(samples: &[Point], d1: D1, d2: D2) -> f64
where
    D1: Fn(Point) -> f64,
    D2: Fn(Point) -> f64,
{
    samples
        .iter()
        .map(|&p| (d1(p) - d2(p)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{triangulate, Polygon};

    fn l_shape() -> Polygon {
        Polygon::new(
            [
                (0.0, 0.0),
                (4.0, 0.0),
                (4.0, 2.0),
                (2.0, 2.0),
                (2.0, 4.0),
                (0.0, 4.0),
            ]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect(),
        )
        .unwrap()
    }

    #[test]
    fn dijkstra_matches_direct_and_corner() {
        let l = l_shape();
        let d = visibility_graph_distance(&l, Point::new(3.0, 0.5), Point::new(0.5, 3.0)).unwrap();
        assert!((d - 2.5 * 2.0f64.sqrt()).abs() < 1e-12);
        let d2 =
            visibility_graph_distance(&l, Point::new(3.0, 0.5), Point::new(1.5, 3.5)).unwrap();
        assert!((d2 - (3.25f64.sqrt() + 2.5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn grid_split_for_symmetric_sites() {
        let square = Polygon::new(
            [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect(),
        )
        .unwrap();
        let tri = triangulate(&square).unwrap();
        let labels = grid_label(
            &tri,
            &[Point::new(1.0, 2.0), Point::new(3.0, 2.0)],
            16,
            1e-9,
        )
        .unwrap();
        for gl in labels {
            if let Some(l) = gl.label {
                if gl.point.x < 2.0 - 0.26 {
                    assert_eq!(l, 0);
                }
                if gl.point.x > 2.0 + 0.26 {
                    assert_eq!(l, 1);
                }
            }
        }
    }

    #[test]
    fn bisection_finds_step_changes() {
        let probe = |t: f64| -> crate::error::Result<i32> {
            Ok(if t < 1.0 / 3.0 {
                0
            } else if t < 2.0 / 3.0 {
                1
            } else {
                2
            })
        };
        let ev = detect_events_by_bisection(probe, 0.0, 1.0, 16, 1e-9).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0] - 1.0 / 3.0).abs() < 1e-8);
        assert!((ev[1] - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn grid_center_finds_circumcenter() {
        let square = Polygon::new(
            [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect(),
        )
        .unwrap();
        let c = grid_center(
            &square,
            [
                Point::new(1.0, 1.0),
                Point::new(3.0, 1.0),
                Point::new(2.0, 3.0),
            ],
            32,
            1e-9,
        )
        .unwrap()
        .unwrap();
        assert!((c.x - 2.0).abs() < 1e-7, "{c:?}");
        assert!((c.y - 1.75).abs() < 1e-7, "{c:?}");
    }

    #[test]
    fn grid_center_absent_when_locus_misses_polygon() {
        let square = Polygon::new(
            [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect(),
        )
        .unwrap();
        // The three-way equidistant point on x=2 lies below the square.
        let c = grid_center(
            &square,
            [
                Point::new(1.0, 2.0),
                Point::new(3.0, 2.0),
                Point::new(2.0, 2.1),
            ],
            32,
            1e-9,
        )
        .unwrap();
        assert!(c.is_none(), "{c:?}");
    }

    #[test]
    fn l_shape_center_with_hidden_site() {
        let l = l_shape();
        let sites = [
            Point::new(3.9, 0.5),
            Point::new(3.9, 1.5),
            Point::new(1.9, 2.2),
        ];
        let c = grid_center(&l, sites, 32, 1e-9).unwrap().unwrap();
        println!("l-shape center: ({:.12}, {:.12})", c.x, c.y);
        // Equidistance and at least one non-straight geodesic.
        let d: Vec<f64> = sites
            .iter()
            .map(|&s| visibility_graph_distance(&l, s, c).unwrap())
            .collect();
        println!("distances: {d:?}");
        assert!((d[0] - d[1]).abs() < 1e-8 && (d[1] - d[2]).abs() < 1e-8);
        assert!(d[2] > sites[2].dist(c) + 1e-9, "path to s must bend");
    }

    #[test]
    fn static_probe_no_events() {
        let probe = |_t: f64| -> crate::error::Result<i32> { Ok(7) };
        assert!(detect_events_by_bisection(probe, 0.0, 1.0, 32, 1e-9)
            .unwrap()
            .is_empty());
    }
}
