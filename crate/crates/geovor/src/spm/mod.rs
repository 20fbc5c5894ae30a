//! Extended shortest path maps: the partition of the polygon into triangular
//! cells sharing the same last shortest-path vertex, the extension segments
//! bounding those cells, and kinetic maintenance under linear site motion.

use crate::error::{GeovorError, Result};
use crate::geom::point::ray_segment_intersection;
use crate::geom::{orient2d, shortest_path_located, Location, Point, Triangulation};
use std::sync::Arc;

/// The source of the last shortest-path edge into a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Anchor {
    Site,
    Vertex(usize),
}

/// Extension segment of a reflex vertex: the continuation of the last path
/// edge through the vertex until it hits the boundary.
#[derive(Debug, Clone)]
pub struct ExtensionSegment {
    pub vertex_index: usize,
    pub vertex: Point,
    pub endpoint: Point,
    /// Boundary edge carrying the endpoint.
    pub edge_index: usize,
}

/// One triangular cell of the refined shortest path map.
#[derive(Debug, Clone)]
pub struct SpmCell {
    pub corners: [Point; 3],
    pub anchor: Anchor,
    pub apex: Point,
    /// Geodesic distance from the site to the apex.
    pub add: f64,
}

/// Shortest path map of one static site inside a simple polygon.
#[derive(Debug, Clone)]
pub struct ExtendedSpm {
    pub site: Point,
    /// Shortest-path-tree parent of each polygon vertex.
    pub parents: Vec<Anchor>,
    /// Geodesic distance from the site to each polygon vertex.
    pub adds: Vec<f64>,
    pub extensions: Vec<Option<ExtensionSegment>>,
    pub cells: Vec<SpmCell>,
}

/// Exact combinatorial state of an SPM; equality means "same tree, same
/// extension-segment incidences".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpmFingerprint {
    pub parents: Vec<Anchor>,
    /// (vertex, boundary edge of the endpoint) per extension segment.
    pub extensions: Vec<(usize, usize)>,
}

impl ExtendedSpm {
    pub fn fingerprint(&self) -> SpmFingerprint {
        SpmFingerprint {
            parents: self.parents.clone(),
            extensions: self
                .extensions
                .iter()
                .flatten()
                .map(|e| (e.vertex_index, e.edge_index))
                .collect(),
        }
    }

    pub fn extension_segment(&self, vertex: usize) -> Option<&ExtensionSegment> {
        self.extensions[vertex].as_ref()
    }

    fn anchor_point(&self, a: Anchor, polygon_vertices: &[Point]) -> Point {
        match a {
            Anchor::Site => self.site,
            Anchor::Vertex(i) => polygon_vertices[i],
        }
    }

    /// Cell containing x, the geodesic distance to the site, and the last
    /// shortest-path vertex. On cell edges any incident cell is accepted.
    pub fn locate(&self, x: Point, eps: f64) -> Result<(usize, f64, Point)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, cell) in self.cells.iter().enumerate() {
            let d = triangle_signed_slack(&cell.corners, x);
            if d >= -eps {
                // Inside (or on the boundary of) this cell.
                return Ok((i, cell.add + x.dist(cell.apex), cell.apex));
            }
            if best.map_or(true, |(_, b)| d > b) {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, slack)) if slack >= -16.0 * eps => {
                let cell = &self.cells[i];
                Ok((i, cell.add + x.dist(cell.apex), cell.apex))
            }
            _ => Err(GeovorError::PointOutsidePolygon(x.x, x.y)),
        }
    }

    /// Sum of cell areas; equals the polygon area on a valid partition.
    pub fn total_cell_area(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| 0.5 * (c.corners[1] - c.corners[0]).cross(c.corners[2] - c.corners[0]).abs())
            .sum()
    }
}

/// Minimum signed distance-like slack of x against the triangle edges
/// (non-negative iff x is inside the triangle, any orientation).
fn triangle_signed_slack(t: &[Point; 3], x: Point) -> f64 {
    let area = orient2d(t[0], t[1], t[2]);
    let sign = if area >= 0.0 { 1.0 } else { -1.0 };
    let mut slack = f64::INFINITY;
    for i in 0..3 {
        let (a, b) = (t[i], t[(i + 1) % 3]);
        let len = a.dist(b).max(1e-300);
        slack = slack.min(sign * orient2d(a, b, x) / len);
    }
    slack
}

/// Builds the extended shortest path map of `site`.
pub fn build_spm(tri: &Triangulation, site: Point) -> Result<ExtendedSpm> {
    let polygon = tri.polygon();
    let eps = 1e-9 * polygon.diameter().max(1.0);
    match polygon.locate(site, eps) {
        Location::Inside => {}
        Location::Boundary => return Err(GeovorError::SiteOnBoundary(site.x, site.y)),
        Location::Outside => return Err(GeovorError::PointOutsidePolygon(site.x, site.y)),
    }
    let verts = polygon.vertices();
    let m = verts.len();
    let t_site = tri
        .locate(site, 1e-9)
        .ok_or(GeovorError::PointOutsidePolygon(site.x, site.y))?;
    // Any triangle incident to each polygon vertex, for located path queries.
    let mut vert_tri = vec![usize::MAX; m];
    for (ti, t) in tri.triangles().iter().enumerate() {
        for &vi in t {
            vert_tri[vi] = ti;
        }
    }

    // Shortest path tree over polygon vertices.
    let mut parents = Vec::with_capacity(m);
    let mut adds = Vec::with_capacity(m);
    for (i, &v) in verts.iter().enumerate() {
        let path = shortest_path_located(tri, site, t_site, v, vert_tri[i])?;
        adds.push(path.length);
        let w = &path.waypoints;
        let prev = if w.len() >= 2 { w[w.len() - 2] } else { site };
        parents.push(match_anchor(prev, site, verts, eps, i)?);
    }

    // Extension segments.
    let mut extensions: Vec<Option<ExtensionSegment>> = vec![None; m];
    for i in 0..m {
        if !polygon.is_reflex(i) {
            continue;
        }
        let v = verts[i];
        let parent_pt = match parents[i] {
            Anchor::Site => site,
            Anchor::Vertex(j) => verts[j],
        };
        let dir = (v - parent_pt).normalized();
        // The segment exists only when the continuation enters the interior:
        // at a reflex vertex the direction must leave the exterior cone
        // spanned by the two incident edges.
        let prev = polygon.vertex(i + m - 1);
        let next = polygon.vertex(i + 1);
        let enters_interior = (v - prev).cross(dir) > 0.0 || (next - v).cross(dir) > 0.0;
        if !enters_interior {
            continue;
        }
        let mut hit: Option<(f64, usize, f64)> = None;
        for e in 0..m {
            let (a, b) = polygon.edge(e);
            if let Some((t, u)) = ray_segment_intersection(v, dir, a, b) {
                if t > 128.0 * eps && hit.map_or(true, |(bt, _, _)| t < bt) {
                    hit = Some((t, e, u));
                }
            }
        }
        if let Some((t, e, _)) = hit {
            extensions[i] = Some(ExtensionSegment {
                vertex_index: i,
                vertex: v,
                endpoint: v + dir * t,
                edge_index: e,
            });
        }
    }

    // Cells: split each triangulation triangle along every extension segment
    // crossing it, then assign each piece to its last-vertex anchor.
    let mut spm = ExtendedSpm {
        site,
        parents,
        adds,
        extensions,
        cells: Vec::new(),
    };
    let min_area = 1e-14 * polygon.area();
    for ti in 0..tri.triangles().len() {
        let corner = tri.triangle_points(ti);
        let mut pieces: Vec<Vec<Point>> = vec![corner.to_vec()];
        for ext in spm.extensions.iter().flatten() {
            let mut next = Vec::new();
            for piece in pieces {
                if segment_crosses_convex(&piece, ext.vertex, ext.endpoint, eps) {
                    let (l, r) = split_convex(&piece, ext.vertex, ext.endpoint, eps);
                    for part in [l, r] {
                        if convex_area(&part) > min_area {
                            next.push(part);
                        }
                    }
                } else {
                    next.push(piece);
                }
            }
            pieces = next;
        }
        for piece in pieces {
            let c = convex_centroid(&piece);
            let path = shortest_path_located(tri, site, t_site, c, ti)?;
            let w = &path.waypoints;
            let prev = if w.len() >= 2 { w[w.len() - 2] } else { site };
            let anchor = match_anchor(prev, site, verts, eps, usize::MAX)?;
            let apex = spm.anchor_point(anchor, verts);
            let add = match anchor {
                Anchor::Site => 0.0,
                Anchor::Vertex(i) => spm.adds[i],
            };
            for k in 1..piece.len() - 1 {
                let t = [piece[0], piece[k], piece[k + 1]];
                if orient2d(t[0], t[1], t[2]).abs() > 2.0 * min_area {
                    spm.cells.push(SpmCell {
                        corners: t,
                        anchor,
                        apex,
                        add,
                    });
                }
            }
        }
    }
    Ok(spm)
}

fn match_anchor(
    p: Point,
    site: Point,
    verts: &[Point],
    eps: f64,
    self_index: usize,
) -> Result<Anchor> {
    if p.dist(site) <= eps {
        return Ok(Anchor::Site);
    }
    for (j, &v) in verts.iter().enumerate() {
        if j != self_index && p.dist(v) <= eps {
            return Ok(Anchor::Vertex(j));
        }
    }
    Err(GeovorError::UnknownEventPoint)
}

fn convex_area(poly: &[Point]) -> f64 {
    let mut acc = 0.0;
    for i in 1..poly.len().saturating_sub(1) {
        acc += 0.5 * (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
    }
    acc.abs()
}

fn convex_centroid(poly: &[Point]) -> Point {
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 1..poly.len() - 1 {
        let w = (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
        cx += w * (poly[0].x + poly[i].x + poly[i + 1].x) / 3.0;
        cy += w * (poly[0].y + poly[i].y + poly[i + 1].y) / 3.0;
        a += w;
    }
    if a.abs() < 1e-300 {
        let n = poly.len() as f64;
        return Point::new(
            poly.iter().map(|p| p.x).sum::<f64>() / n,
            poly.iter().map(|p| p.y).sum::<f64>() / n,
        );
    }
    Point::new(cx / a, cy / a)
}

/// Whether the open segment (a, b) crosses the interior of the convex piece.
fn segment_crosses_convex(piece: &[Point], a: Point, b: Point, eps: f64) -> bool {
    // Clip the segment parameter interval against every edge half-plane.
    let area = convex_area(piece);
    if area <= 0.0 {
        return false;
    }
    let ccw = {
        let mut s = 0.0;
        for i in 0..piece.len() {
            s += piece[i].cross(piece[(i + 1) % piece.len()]);
        }
        s > 0.0
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let d = b - a;
    for i in 0..piece.len() {
        let (p, q) = (piece[i], piece[(i + 1) % piece.len()]);
        let n = if ccw { (q - p).perp() } else { -(q - p).perp() };
        let denom = n.dot(d);
        let num = n.dot(p - a);
        if denom.abs() < 1e-300 {
            if n.dot(a - p) < 0.0 {
                return false;
            }
        } else if denom > 0.0 {
            lo = lo.max(num / denom);
        } else {
            hi = hi.min(num / denom);
        }
    }
    if hi <= lo {
        return false;
    }
    // Require an actual interior chord, not a touch along an edge or corner.
    let mid = a.lerp(b, 0.5 * (lo + hi));
    let mut slack = f64::INFINITY;
    for i in 0..piece.len() {
        let (p, q) = (piece[i], piece[(i + 1) % piece.len()]);
        slack = slack.min(crate::geom::polygon::dist_point_segment(mid, p, q));
    }
    (hi - lo) * d.norm() > 4.0 * eps && slack > eps
}

/// Splits a convex polygon by the oriented line through a and b.
fn split_convex(piece: &[Point], a: Point, b: Point, eps: f64) -> (Vec<Point>, Vec<Point>) {
    let dir = (b - a).normalized();
    let side = |p: Point| dir.cross(p - a);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let n = piece.len();
    for i in 0..n {
        let (p, q) = (piece[i], piece[(i + 1) % n]);
        let (sp, sq) = (side(p), side(q));
        if sp >= -eps {
            left.push(p);
        }
        if sp <= eps {
            right.push(p);
        }
        if (sp > eps && sq < -eps) || (sp < -eps && sq > eps) {
            let t = sp / (sp - sq);
            let x = p.lerp(q, t);
            left.push(x);
            right.push(x);
        }
    }
    (left, right)
}

// --- kinetic maintenance ----------------------------------------------------

/// Kind of combinatorial change of the SPM under site motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpmEventKind {
    VertexBecomesVisible,
    VertexBecomesHidden,
    ExtensionEndpointCrossesVertex,
}

#[derive(Debug, Clone, Copy)]
pub struct SpmEvent {
    pub time: f64,
    pub kind: SpmEventKind,
}

/// An SPM maintained along a linear site trajectory.
pub struct KineticSpm {
    pub tri: Arc<Triangulation>,
    pub pos0: Point,
    pub vel: Point,
    pub time: f64,
    pub spm: ExtendedSpm,
    eps_time: f64,
}

impl KineticSpm {
    pub fn new(tri: Arc<Triangulation>, pos0: Point, vel: Point, t0: f64, eps_time: f64) -> Result<Self> {
        let spm = build_spm(&tri, pos0 + vel * t0)?;
        Ok(KineticSpm {
            tri,
            pos0,
            vel,
            time: t0,
            spm,
            eps_time,
        })
    }

    pub fn position_at(&self, t: f64) -> Point {
        self.pos0 + self.vel * t
    }

    /// All candidate times in (now, horizon] at which the site crosses a line
    /// through two polygon vertices. Every combinatorial change of the SPM
    /// happens at such a crossing; for linear motion each pair contributes a
    /// single linear root.
    pub fn candidate_times(&self, now: f64, horizon: f64) -> Vec<f64> {
        let verts = self.tri.polygon().vertices();
        let mut ts = Vec::new();
        for i in 0..verts.len() {
            for j in (i + 1)..verts.len() {
                let (u, v) = (verts[i], verts[j]);
                let a = (u - self.pos0).cross(v - self.pos0);
                let b = self.vel.cross(u - v);
                if b.abs() > 1e-300 {
                    let t = -a / b;
                    if t > now + self.eps_time && t <= horizon {
                        ts.push(t);
                    }
                }
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() <= self.eps_time);
        ts
    }

    /// Earliest combinatorial change of the SPM after `self.time`, if any
    /// occurs by the horizon. Candidates are verified by comparing scratch
    /// rebuilds just before and after the candidate time.
    pub fn next_event(&self, horizon: f64) -> Result<Option<SpmEvent>> {
        let candidates = self.candidate_times(self.time, horizon);
        let eps = 1e-9 * self.tri.polygon().diameter().max(1.0);
        let mut prev_fp: Option<SpmFingerprint> = None;
        let mut prev_t = self.time;
        for (k, &t) in candidates.iter().enumerate() {
            // Probe safely inside the gaps to the neighboring candidates; the
            // fingerprint is constant between candidate times.
            let next_t = candidates.get(k + 1).copied().unwrap_or(horizon + 1.0);
            let delta = (0.45 * (t - prev_t).min(next_t - t)).max(0.25 * self.eps_time);
            let (tb, ta) = (t - delta, t + delta);
            for probe in [tb, ta] {
                if self.tri.polygon().locate(self.position_at(probe), eps) != Location::Inside {
                    return Err(GeovorError::SiteExitsPolygon(0, probe));
                }
            }
            let before = match prev_fp.take() {
                Some(fp) => fp,
                None => build_spm(&self.tri, self.position_at(tb))?.fingerprint(),
            };
            let after = build_spm(&self.tri, self.position_at(ta))?.fingerprint();
            if after != before {
                let kind = classify(&before, &after);
                return Ok(Some(SpmEvent { time: t, kind }));
            }
            prev_fp = Some(after);
            prev_t = t;
        }
        Ok(None)
    }

    /// Advances past an event produced by `next_event`, rebuilding the map
    /// just after the event time.
    pub fn advance(&mut self, event: &SpmEvent) -> Result<()> {
        if event.time <= self.time {
            return Err(GeovorError::StaleEvent(event.time));
        }
        // Rebuild safely inside the gap before the next candidate time.
        let next = self
            .candidate_times(event.time, f64::INFINITY)
            .first()
            .copied()
            .unwrap_or(event.time + 1.0);
        let mut delta = (0.45 * (next - event.time)).max(0.25 * self.eps_time);
        loop {
            match build_spm(&self.tri, self.position_at(event.time + delta)) {
                Ok(spm) => {
                    self.spm = spm;
                    self.time = event.time;
                    return Ok(());
                }
                // The trajectory may leave the polygon before the next
                // candidate; rebuild closer to the event instead.
                Err(_) if delta > 0.5 * self.eps_time => delta *= 0.25,
                Err(e) => return Err(e),
            }
        }
    }

    /// Scratch rebuild at an arbitrary time; oracle for kinetic soundness.
    pub fn rebuild_at(&self, t: f64) -> Result<ExtendedSpm> {
        build_spm(&self.tri, self.position_at(t))
    }
}

fn classify(before: &SpmFingerprint, after: &SpmFingerprint) -> SpmEventKind {
    let vis = |fp: &SpmFingerprint| fp.parents.iter().filter(|p| **p == Anchor::Site).count();
    let (vb, va) = (vis(before), vis(after));
    if va > vb {
        SpmEventKind::VertexBecomesVisible
    } else if va < vb {
        SpmEventKind::VertexBecomesHidden
    } else if after.extensions.len() > before.extensions.len() {
        SpmEventKind::VertexBecomesVisible
    } else if after.extensions.len() < before.extensions.len() {
        SpmEventKind::VertexBecomesHidden
    } else {
        SpmEventKind::ExtensionEndpointCrossesVertex
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{geodesic_distance, triangulate};
    use crate::scenarios::polygons;

    fn l_tri() -> Triangulation {
        triangulate(&polygons::l_shape()).unwrap()
    }

    #[test]
    fn convex_polygon_single_anchor() {
        let tri = triangulate(&polygons::square()).unwrap();
        let spm = build_spm(&tri, Point::new(2.0, 2.0)).unwrap();
        assert!(spm.cells.iter().all(|c| c.anchor == Anchor::Site));
        assert!(spm.extensions.iter().all(|e| e.is_none()));
        assert!(spm.parents.iter().all(|p| *p == Anchor::Site));
    }

    #[test]
    fn l_shape_extension_segment() {
        let tri = l_tri();
        let spm = build_spm(&tri, Point::new(3.0, 0.5)).unwrap();
        let ext = spm.extension_segment(3).expect("notch vertex extension");
        assert!(ext.vertex.dist(Point::new(2.0, 2.0)) < 1e-12);
        // Ray from (3, 0.5) through (2, 2) reaches y = 4 at x = 2/3.
        assert!(ext.endpoint.dist(Point::new(2.0 / 3.0, 4.0)) < 1e-9);
        assert_eq!(spm.extensions.iter().flatten().count(), 1);
    }

    #[test]
    fn kernel_site_has_no_extensions() {
        // (1, 1) sees the whole L-shape (it lies in the kernel), so the notch
        // vertex spawns no extension segment.
        let tri = l_tri();
        let spm = build_spm(&tri, Point::new(1.0, 1.0)).unwrap();
        assert!(spm.extensions.iter().all(|e| e.is_none()));
        assert!(spm.parents.iter().all(|p| *p == Anchor::Site));
    }

    #[test]
    fn l_shape_other_side_extension() {
        // Site in the upper-left column sees the notch vertex from the other
        // side; the continuation of the ray (0.5,3) -> (2,2) exits through
        // the right wall at (4, 2/3).
        let tri = l_tri();
        let spm = build_spm(&tri, Point::new(0.5, 3.0)).unwrap();
        let ext = spm.extension_segment(3).expect("notch vertex extension");
        assert!(ext.endpoint.dist(Point::new(4.0, 2.0 / 3.0)) < 1e-9);
    }

    #[test]
    fn locate_matches_geodesic_distance() {
        let tri = l_tri();
        let site = Point::new(3.0, 0.5);
        let spm = build_spm(&tri, site).unwrap();
        let eps = 1e-9 * tri.polygon().diameter();
        // Hidden query point: last vertex is the notch corner.
        let x = Point::new(1.5, 3.5);
        let (_, d, last) = spm.locate(x, eps).unwrap();
        assert!(last.dist(Point::new(2.0, 2.0)) < 1e-9);
        let oracle = geodesic_distance(&tri, site, x).unwrap();
        assert!((d - oracle).abs() < 1e-9);
        // Visible query point: last vertex is the site itself.
        let y = Point::new(0.5, 3.0);
        let (_, dy, lasty) = spm.locate(y, eps).unwrap();
        assert!(lasty.dist(site) < 1e-9);
        assert!((dy - 2.5 * 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn cells_partition_polygon() {
        for (name, p) in polygons::test_polygons() {
            let tri = triangulate(&p).unwrap();
            let (lo, hi) = p.bounding_box();
            let site = Point::new(lo.x + 0.43 * (hi.x - lo.x), lo.y + 0.39 * (hi.y - lo.y));
            let site = if p.locate(site, 1e-9) == Location::Inside {
                site
            } else {
                continue;
            };
            let spm = build_spm(&tri, site).unwrap();
            let err = (spm.total_cell_area() - p.area()).abs() / p.area();
            assert!(err < 1e-6, "{name}: partition area error {err}");
        }
    }

    #[test]
    fn extension_count_bounded_by_reflex_count() {
        for (name, p) in polygons::test_polygons() {
            let tri = triangulate(&p).unwrap();
            let (lo, hi) = p.bounding_box();
            let site = Point::new(lo.x + 0.43 * (hi.x - lo.x), lo.y + 0.39 * (hi.y - lo.y));
            if p.locate(site, 1e-9) != Location::Inside {
                continue;
            }
            let spm = build_spm(&tri, site).unwrap();
            let reflex = (0..p.len()).filter(|&i| p.is_reflex(i)).count();
            let exts = spm.extensions.iter().flatten().count();
            assert!(exts <= reflex, "{name}: {exts} extensions, {reflex} reflex");
        }
    }

    #[test]
    fn site_on_boundary_rejected() {
        let tri = l_tri();
        assert!(matches!(
            build_spm(&tri, Point::new(0.0, 2.0)),
            Err(GeovorError::SiteOnBoundary(..))
        ));
        assert!(matches!(
            build_spm(&tri, Point::new(3.0, 3.0)),
            Err(GeovorError::PointOutsidePolygon(..))
        ));
    }

    #[test]
    fn static_site_no_event() {
        let tri = Arc::new(l_tri());
        let kin = KineticSpm::new(tri, Point::new(3.0, 0.5), Point::new(0.0, 0.0), 0.0, 1e-9)
            .unwrap();
        assert!(kin.next_event(10.0).unwrap().is_none());
    }

    #[test]
    fn l_shape_visibility_event_at_t1() {
        // Site (3, 0.5) moving left: when it crosses the line through the
        // notch corner (2,2) and (2,4) at t = 1, the upper pocket vertex
        // becomes directly visible.
        let tri = Arc::new(l_tri());
        let kin = KineticSpm::new(tri, Point::new(3.0, 0.5), Point::new(-1.0, 0.0), 0.0, 1e-9)
            .unwrap();
        let ev = kin.next_event(2.5).unwrap().expect("expected an event");
        assert!((ev.time - 1.0).abs() < 1e-6, "event at {}", ev.time);
        assert_eq!(ev.kind, SpmEventKind::VertexBecomesVisible);
    }

    #[test]
    fn horizon_before_event_none() {
        let tri = Arc::new(l_tri());
        let kin = KineticSpm::new(tri, Point::new(3.0, 0.5), Point::new(-1.0, 0.0), 0.0, 1e-9)
            .unwrap();
        assert!(kin.next_event(0.5).unwrap().is_none());
    }

    #[test]
    fn advance_matches_rebuild() {
        let tri = Arc::new(l_tri());
        let mut kin =
            KineticSpm::new(tri.clone(), Point::new(3.0, 0.5), Point::new(-1.0, 0.0), 0.0, 1e-9)
                .unwrap();
        let horizon = 2.5;
        let mut guard = 0;
        while let Some(ev) = kin.next_event(horizon).unwrap() {
            let stale = SpmEvent {
                time: kin.time,
                kind: ev.kind,
            };
            assert!(matches!(
                kin.advance(&stale),
                Err(GeovorError::StaleEvent(_))
            ));
            kin.advance(&ev).unwrap();
            guard += 1;
            assert!(guard < 50, "too many events");
        }
        let final_fp = kin.rebuild_at(horizon).unwrap().fingerprint();
        assert_eq!(kin.spm.fingerprint(), final_fp);
        assert!(guard >= 1);
    }
}
