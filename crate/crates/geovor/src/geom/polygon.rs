use super::point::{orient2d, segments_intersect, Point};
use crate::error::{GeovorError, Result};

/// A simple polygon with counterclockwise boundary.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Point>,
}

/// Where a point lies relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl Polygon {
    /// Validates simplicity, orientation and non-degeneracy.
    ///
    /// Consecutive collinear vertices are rejected: the kinetic machinery
    /// assumes every polygon vertex is a genuine corner.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(GeovorError::TooFewVertices(m));
        }
        for v in &vertices {
            if !v.is_finite() {
                return Err(GeovorError::NonFiniteCoordinate);
            }
        }
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            if a == b {
                return Err(GeovorError::DuplicateVertex(i));
            }
        }
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            let c = vertices[(i + 2) % m];
            if orient2d(a, b, c) == 0.0 {
                return Err(GeovorError::CollinearVertices((i + 1) % m));
            }
        }
        // Non-adjacent edge pairs must not intersect.
        for i in 0..m {
            let (a, b) = (vertices[i], vertices[(i + 1) % m]);
            for j in (i + 1)..m {
                if j == i || (j + 1) % m == i || (i + 1) % m == j {
                    continue;
                }
                let (c, d) = (vertices[j], vertices[(j + 1) % m]);
                if segments_intersect(a, b, c, d) {
                    return Err(GeovorError::NonSimplePolygon(i, j));
                }
            }
        }
        let poly = Polygon { vertices };
        if poly.signed_area() <= 0.0 {
            return Err(GeovorError::NotCounterClockwise);
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge i runs from vertex i to vertex i+1.
    pub fn edge(&self, i: usize) -> (Point, Point) {
        let m = self.vertices.len();
        (self.vertices[i % m], self.vertices[(i + 1) % m])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let m = self.vertices.len();
        (0..m).map(move |i| self.edge(i))
    }

    pub fn signed_area(&self) -> f64 {
        let m = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..m {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % m];
            acc += a.cross(b);
        }
        acc / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Largest pairwise vertex distance; scale reference for tolerances.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &a) in self.vertices.iter().enumerate() {
            for &b in &self.vertices[i + 1..] {
                d = d.max(a.dist(b));
            }
        }
        d
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// Vertex i is reflex if the interior angle exceeds pi.
    pub fn is_reflex(&self, i: usize) -> bool {
        let m = self.vertices.len();
        let prev = self.vertices[(i + m - 1) % m];
        let cur = self.vertices[i];
        let next = self.vertices[(i + 1) % m];
        orient2d(prev, cur, next) < 0.0
    }

    /// Crossing-number test with an explicit boundary class.
    pub fn locate(&self, p: Point, eps: f64) -> Location {
        let m = self.vertices.len();
        for i in 0..m {
            let (a, b) = self.edge(i);
            if dist_point_segment(p, a, b) <= eps {
                return Location::Boundary;
            }
        }
        let mut inside = false;
        for i in 0..m {
            let (a, b) = self.edge(i);
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        if inside {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.locate(p, eps) != Location::Outside
    }

    /// Whether the open segment between a and b stays inside the closed
    /// polygon. Both endpoints may lie on the boundary or at vertices.
    pub fn segment_inside(&self, a: Point, b: Point, eps: f64) -> bool {
        if !self.contains(a, eps) || !self.contains(b, eps) {
            return false;
        }
        // Collect crossing parameters with the boundary, then check that the
        // midpoint of every gap is not outside.
        let mut ts = vec![0.0, 1.0];
        let dir = b - a;
        let len = dir.norm();
        if len <= eps {
            return true;
        }
        let m = self.vertices.len();
        for i in 0..m {
            let (c, d) = self.edge(i);
            let r = dir;
            let s = d - c;
            let denom = r.cross(s);
            if denom != 0.0 {
                let t = (c - a).cross(s) / denom;
                let u = (c - a).cross(r) / denom;
                if (-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) {
                    ts.push(t.clamp(0.0, 1.0));
                }
            } else {
                // Parallel: a vertex of the edge may lie on the segment.
                for &v in &[c, d] {
                    if dist_point_segment(v, a, b) <= eps {
                        let t = (v - a).dot(dir) / dir.norm_sq();
                        ts.push(t.clamp(0.0, 1.0));
                    }
                }
            }
        }
        // Vertices lying on the segment also split it.
        for &v in &self.vertices {
            if dist_point_segment(v, a, b) <= eps {
                let t = (v - a).dot(dir) / dir.norm_sq();
                ts.push(t.clamp(0.0, 1.0));
            }
        }
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in ts.windows(2) {
            if w[1] - w[0] > eps / len {
                let mid = a.lerp(b, (w[0] + w[1]) / 2.0);
                if self.locate(mid, eps) == Location::Outside {
                    return false;
                }
            }
        }
        true
    }

    /// Index of the boundary edge whose distance to p is smallest.
    pub fn closest_edge(&self, p: Point) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge(i);
            let d = dist_point_segment(p, a, b);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Arc-length parameter of p along the boundary, measured from vertex 0.
    /// p is projected onto its closest edge.
    pub fn boundary_parameter(&self, p: Point) -> f64 {
        let (e, _) = self.closest_edge(p);
        let mut acc = 0.0;
        for i in 0..e {
            let (a, b) = self.edge(i);
            acc += a.dist(b);
        }
        let (a, b) = self.edge(e);
        let t = ((p - a).dot(b - a) / (b - a).norm_sq()).clamp(0.0, 1.0);
        acc + t * a.dist(b)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }
}

/// Intersection of two convex polygons (Sutherland–Hodgman). Inputs may be
/// oriented either way; the result is CCW and may be empty.
pub fn convex_intersection(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let ccw = |poly: &[Point]| {
        let mut s = 0.0;
        for i in 0..poly.len() {
            s += poly[i].cross(poly[(i + 1) % poly.len()]);
        }
        s >= 0.0
    };
    let mut subj: Vec<Point> = subject.to_vec();
    if !ccw(&subj) {
        subj.reverse();
    }
    let mut clp: Vec<Point> = clip.to_vec();
    if !ccw(&clp) {
        clp.reverse();
    }
    for i in 0..clp.len() {
        if subj.is_empty() {
            return subj;
        }
        let (a, b) = (clp[i], clp[(i + 1) % clp.len()]);
        let mut out = Vec::with_capacity(subj.len() + 1);
        for j in 0..subj.len() {
            let (p, q) = (subj[j], subj[(j + 1) % subj.len()]);
            let (sp, sq) = (orient2d(a, b, p), orient2d(a, b, q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
                out.push(p.lerp(q, sp / (sp - sq)));
            }
        }
        subj = out;
    }
    // Collapse near-duplicate consecutive vertices introduced by cutting a
    // corner almost exactly through an existing vertex; downstream code
    // divides by edge lengths.
    let scale = subj
        .iter()
        .flat_map(|p| [p.x.abs(), p.y.abs()])
        .fold(1.0f64, f64::max);
    let tol = 1e-12 * scale;
    let mut dedup: Vec<Point> = Vec::with_capacity(subj.len());
    for p in subj {
        if dedup.last().is_none_or(|&l| l.dist(p) > tol) {
            dedup.push(p);
        }
    }
    if dedup.len() > 1 && dedup[0].dist(*dedup.last().unwrap()) <= tol {
        dedup.pop();
    }
    dedup
}

/// Distance between the closed segments ab and cd.
pub fn dist_segment_segment(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    dist_point_segment(a, c, d)
        .min(dist_point_segment(b, c, d))
        .min(dist_point_segment(c, a, b))
        .min(dist_point_segment(d, a, b))
}

/// Distance from p to the closed segment ab.
pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sq();
    if denom == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / denom).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}
