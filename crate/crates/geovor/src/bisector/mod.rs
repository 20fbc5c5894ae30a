//! Geodesic bisectors between two sites: construction by overlaying the two
//! shortest path maps, decomposition into visibility pieces, the offset
//! tournament for 2,2-events, and kinetic maintenance.

pub mod kds;
pub mod tournament;

use crate::error::{GeovorError, Result};
use crate::geom::polygon::{convex_intersection, dist_point_segment};
use crate::geom::{arc_between, HyperbolicArc, Location, Point, Triangulation};
use crate::spm::{Anchor, ExtendedSpm};

pub use kds::{BisectorEvent, BisectorEventKind, BisectorKds, Mode};
pub use tournament::{EventPoint, OffsetTournament};

/// Which of the two sites owns a structure element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SiteTag {
    P,
    Q,
}

/// A degree-2 vertex of the bisector: the crossing of an extension segment.
#[derive(Debug, Clone)]
pub struct BisectorVertex {
    pub point: Point,
    /// Site owning the extension segment this vertex lies on.
    pub site: SiteTag,
    /// Polygon vertex spawning that extension segment.
    pub vertex_index: usize,
}

/// One maximal arc of the bisector between consecutive degree-2 vertices,
/// oriented along the chain.
#[derive(Debug, Clone)]
pub struct BisectorArc {
    pub arc: HyperbolicArc,
    pub start: Point,
    pub end: Point,
    pub anchor_p: Anchor,
    pub anchor_q: Anchor,
}

/// The geodesic bisector B_pq: a simple curve between two boundary points,
/// oriented so that p lies to its right.
#[derive(Debug, Clone)]
pub struct Bisector {
    /// (point, boundary edge id) for b_pq and b_qp in chain order.
    pub endpoints: [(Point, usize); 2],
    /// Degree-2 vertices in chain order; vertices[i] joins arcs[i], arcs[i+1].
    pub vertices: Vec<BisectorVertex>,
    pub arcs: Vec<BisectorArc>,
}

/// Combinatorial state of a bisector: endpoint edges, vertex tags, and the
/// anchor pair of every arc, all in chain order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectorFingerprint {
    pub endpoint_edges: [usize; 2],
    pub vertices: Vec<(SiteTag, usize)>,
    pub arc_anchors: Vec<(Anchor, Anchor)>,
}

impl Bisector {
    pub fn fingerprint(&self) -> BisectorFingerprint {
        BisectorFingerprint {
            endpoint_edges: [self.endpoints[0].1, self.endpoints[1].1],
            vertices: self
                .vertices
                .iter()
                .map(|v| (v.site, v.vertex_index))
                .collect(),
            arc_anchors: self.arcs.iter().map(|a| (a.anchor_p, a.anchor_q)).collect(),
        }
    }

    /// Largest equidistance defect over n samples per arc, using the actual
    /// geodesic distances.
    pub fn max_residual(&self, tri: &Triangulation, p: Point, q: Point, n: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for ba in &self.arcs {
            for x in ba.arc.samples(n) {
                let dp = crate::geom::geodesic_distance(tri, p, x)?;
                let dq = crate::geom::geodesic_distance(tri, q, x)?;
                worst = worst.max((dp - dq).abs());
            }
        }
        Ok(worst)
    }
}

/// Visibility class of one bisector arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceClass {
    DoubleVisible,
    SingleVisible,
    NonVisible,
}

/// The decomposition of a bisector into maximal visibility pieces.
#[derive(Debug, Clone)]
pub struct BisectorPieces {
    /// (class, arc index range) in chain order.
    pub runs: Vec<(PieceClass, std::ops::Range<usize>)>,
    /// Degree-2 vertices separating consecutive pieces.
    pub separators: Vec<Point>,
}

impl BisectorPieces {
    pub fn double_visible(&self) -> Option<&(PieceClass, std::ops::Range<usize>)> {
        self.runs.iter().find(|(c, _)| *c == PieceClass::DoubleVisible)
    }

    pub fn count(&self) -> usize {
        self.runs.len()
    }
}

fn arc_class(a: &BisectorArc) -> PieceClass {
    match (a.anchor_p == Anchor::Site, a.anchor_q == Anchor::Site) {
        (true, true) => PieceClass::DoubleVisible,
        (false, false) => PieceClass::NonVisible,
        _ => PieceClass::SingleVisible,
    }
}

/// Splits a bisector into its visibility pieces (at most five).
pub fn decompose_pieces(bisector: &Bisector) -> BisectorPieces {
    let mut runs: Vec<(PieceClass, std::ops::Range<usize>)> = Vec::new();
    let mut separators = Vec::new();
    for (i, a) in bisector.arcs.iter().enumerate() {
        let c = arc_class(a);
        match runs.last_mut() {
            Some((lc, r)) if *lc == c => r.end = i + 1,
            _ => {
                if !runs.is_empty() {
                    separators.push(a.start);
                }
                runs.push((c, i..i + 1));
            }
        }
    }
    BisectorPieces { runs, separators }
}

/// Constructs the geodesic bisector of the two sites from their shortest
/// path maps by overlaying the cell partitions.
pub fn build_bisector(
    tri: &Triangulation,
    spm_p: &ExtendedSpm,
    spm_q: &ExtendedSpm,
) -> Result<Bisector> {
    let polygon = tri.polygon();
    let diam = polygon.diameter().max(1.0);
    let eps = 1e-9 * diam;

    if spm_p.site.dist(spm_q.site) <= eps {
        return Err(GeovorError::IdenticalDistanceFields);
    }
    for i in 0..polygon.len() {
        if (spm_p.adds[i] - spm_q.adds[i]).abs() <= eps {
            return Err(GeovorError::DegenerateEquidistantVertex);
        }
    }

    // Overlay: one hyperbolic arc piece per overlapping cell pair. A bounding
    // box prefilter skips the vast majority of the quadratic pair count.
    let bbox = |corners: &[Point]| {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for c in corners {
            lo = Point::new(lo.x.min(c.x), lo.y.min(c.y));
            hi = Point::new(hi.x.max(c.x), hi.y.max(c.y));
        }
        (lo, hi)
    };
    let boxes_p: Vec<_> = spm_p.cells.iter().map(|c| bbox(&c.corners)).collect();
    let boxes_q: Vec<_> = spm_q.cells.iter().map(|c| bbox(&c.corners)).collect();

    // Bucket q's cells in a uniform grid so each p cell only visits nearby
    // q cells instead of the full quadratic pair set.
    let (blo, bhi) = polygon.bounding_box();
    let g = 24usize;
    let step = Point::new(
        ((bhi.x - blo.x) / g as f64).max(1e-12),
        ((bhi.y - blo.y) / g as f64).max(1e-12),
    );
    let cell_of = |v: f64, lo: f64, s: f64| (((v - lo) / s).floor() as isize).clamp(0, g as isize - 1) as usize;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); g * g];
    for (qi, bq) in boxes_q.iter().enumerate() {
        let (x0, x1) = (cell_of(bq.0.x, blo.x, step.x), cell_of(bq.1.x, blo.x, step.x));
        let (y0, y1) = (cell_of(bq.0.y, blo.y, step.y), cell_of(bq.1.y, blo.y, step.y));
        for gx in x0..=x1 {
            for gy in y0..=y1 {
                buckets[gy * g + gx].push(qi);
            }
        }
    }

    let min_area = 1e-13 * polygon.area();
    let mut raw: Vec<BisectorArc> = Vec::new();
    let mut stamp = vec![usize::MAX; spm_q.cells.len()];
    for (pi, (cp, bp)) in spm_p.cells.iter().zip(&boxes_p).enumerate() {
        let (x0, x1) = (cell_of(bp.0.x, blo.x, step.x), cell_of(bp.1.x, blo.x, step.x));
        let (y0, y1) = (cell_of(bp.0.y, blo.y, step.y), cell_of(bp.1.y, blo.y, step.y));
        let mut candidates: Vec<usize> = Vec::new();
        for gx in x0..=x1 {
            for gy in y0..=y1 {
                for &qi in &buckets[gy * g + gx] {
                    if stamp[qi] != pi {
                        stamp[qi] = pi;
                        candidates.push(qi);
                    }
                }
            }
        }
        for qi in candidates {
            let (cq, bq) = (&spm_q.cells[qi], &boxes_q[qi]);
            if bp.0.x > bq.1.x + eps
                || bq.0.x > bp.1.x + eps
                || bp.0.y > bq.1.y + eps
                || bq.0.y > bp.1.y + eps
            {
                continue;
            }
            // The locus d_p = d_q can only pass through the pair if the two
            // distance ranges over the common bounding rectangle overlap.
            // Both fields are convex, so the maximum is attained at a corner
            // and the minimum at the closest rectangle point to the apex.
            let lo = Point::new(bp.0.x.max(bq.0.x), bp.0.y.max(bq.0.y));
            // Boxes touching only within the eps slack can give an inverted
            // rectangle; widen it instead of rejecting to keep the filter
            // conservative.
            let hi = Point::new(bp.1.x.min(bq.1.x).max(lo.x), bp.1.y.min(bq.1.y).max(lo.y));
            let range = |apex: Point, add: f64| {
                let near = Point::new(apex.x.clamp(lo.x, hi.x), apex.y.clamp(lo.y, hi.y));
                let far = [lo, hi, Point::new(lo.x, hi.y), Point::new(hi.x, lo.y)]
                    .into_iter()
                    .map(|c| apex.dist(c))
                    .fold(0.0f64, f64::max);
                (add + apex.dist(near), add + far)
            };
            let (p_lo, p_hi) = range(cp.apex, cp.add);
            let (q_lo, q_hi) = range(cq.apex, cq.add);
            if p_hi < q_lo - eps || q_hi < p_lo - eps {
                continue;
            }
            let clip = convex_intersection(&cp.corners, &cq.corners);
            if clip.len() < 3 || poly_area(&clip) < min_area {
                continue;
            }
            for arc in arc_between(cp.apex, cp.add, cq.apex, cq.add, &clip, eps)? {
                let (s, e) = (arc.start(), arc.end());
                if s.dist(e) <= 8.0 * eps {
                    continue;
                }
                raw.push(BisectorArc {
                    start: s,
                    end: e,
                    arc,
                    anchor_p: cp.anchor,
                    anchor_q: cq.anchor,
                });
            }
        }
    }
    if raw.is_empty() {
        return Err(GeovorError::DegeneracyDetected(
            f64::NAN,
            "bisector locus not found in any overlay cell".into(),
        ));
    }

    // Drop duplicated pieces lying exactly on shared cell boundaries.
    let tol = 1e-7 * diam;
    let mut keep: Vec<BisectorArc> = Vec::new();
    'outer: for a in raw {
        for k in &keep {
            if a.arc.same_support(&k.arc, tol)
                && a.arc.midpoint().dist(k.arc.midpoint()) <= tol
            {
                continue 'outer;
            }
        }
        keep.push(a);
    }

    // Clipping can lose a sliver piece where the locus grazes a cell edge,
    // leaving a gap slightly above the base tolerance. Retry the chain walk
    // with escalating tolerance before giving up.
    let mut chain = chain_arcs(keep.clone(), tol);
    let mut merge_tol = tol;
    while chain.is_err() && merge_tol < 1e-4 * diam {
        merge_tol *= 10.0;
        chain = chain_arcs(keep.clone(), merge_tol);
    }
    let chain = orient_chain(chain?, tri, spm_p, spm_q, eps)?;
    finalize(chain, tri, spm_p, spm_q, tol)
}

fn poly_area(poly: &[Point]) -> f64 {
    let mut s = 0.0;
    for i in 0..poly.len() {
        s += poly[i].cross(poly[(i + 1) % poly.len()]);
    }
    0.5 * s.abs()
}

/// Orders the raw arc pieces into a single chain, merging pieces that share
/// a support curve.
fn chain_arcs(arcs: Vec<BisectorArc>, tol: f64) -> Result<Vec<BisectorArc>> {
    // Cluster endpoints.
    let mut points: Vec<Point> = Vec::new();
    let cluster = |p: Point, points: &mut Vec<Point>| -> usize {
        for (i, &c) in points.iter().enumerate() {
            if c.dist(p) <= tol {
                return i;
            }
        }
        points.push(p);
        points.len() - 1
    };
    let ends: Vec<(usize, usize)> = arcs
        .iter()
        .map(|a| (cluster(a.start, &mut points), cluster(a.end, &mut points)))
        .collect();
    let mut degree = vec![0usize; points.len()];
    for &(s, e) in &ends {
        degree[s] += 1;
        degree[e] += 1;
    }
    let odd: Vec<usize> = (0..points.len()).filter(|&i| degree[i] % 2 == 1).collect();
    if odd.len() != 2 {
        let locs: Vec<String> = odd
            .iter()
            .map(|&i| format!("({:.9}, {:.9})", points[i].x, points[i].y))
            .collect();
        return Err(GeovorError::DegeneracyDetected(
            f64::NAN,
            format!(
                "bisector pieces do not form a chain ({} loose ends at {})",
                odd.len(),
                locs.join(", ")
            ),
        ));
    }

    // Walk from one loose end. A cluster can merge four arc ends when the
    // chain passes within tol of itself, so the walk backtracks at such
    // junctions instead of committing to the first incident arc.
    fn walk(
        at: usize,
        ends: &[(usize, usize)],
        used: &mut [bool],
        order: &mut Vec<(usize, bool)>,
    ) -> bool {
        if order.len() == ends.len() {
            return true;
        }
        for i in 0..ends.len() {
            if used[i] {
                continue;
            }
            let flip = if ends[i].0 == at {
                false
            } else if ends[i].1 == at {
                true
            } else {
                continue;
            };
            used[i] = true;
            order.push((i, flip));
            let next = if flip { ends[i].0 } else { ends[i].1 };
            if walk(next, ends, used, order) {
                return true;
            }
            order.pop();
            used[i] = false;
        }
        false
    }
    let mut used = vec![false; arcs.len()];
    let mut order: Vec<(usize, bool)> = Vec::new();
    if !walk(odd[0], &ends, &mut used, &mut order) {
        return Err(GeovorError::DegeneracyDetected(
            f64::NAN,
            "bisector pieces admit no chain walk".into(),
        ));
    }

    let mut chain: Vec<BisectorArc> = Vec::new();
    for (i, flip) in order {
        let mut a = arcs[i].clone();
        if flip {
            std::mem::swap(&mut a.start, &mut a.end);
        }
        // Merge with the previous piece when the support curve is unchanged.
        if let Some(prev) = chain.last_mut() {
            if prev.arc.same_support(&a.arc, tol) {
                prev.end = a.end;
                prev.arc.t_range = (
                    prev.arc.t_range.0.min(a.arc.t_range.0),
                    prev.arc.t_range.1.max(a.arc.t_range.1),
                );
                continue;
            }
        }
        chain.push(a);
    }
    Ok(chain)
}

/// Reverses the chain if needed so that p lies to the right when walking it.
fn orient_chain(
    mut chain: Vec<BisectorArc>,
    tri: &Triangulation,
    spm_p: &ExtendedSpm,
    spm_q: &ExtendedSpm,
    eps: f64,
) -> Result<Vec<BisectorArc>> {
    let polygon = tri.polygon();
    // Probe sideways from the longest arc's midpoint.
    let longest = chain
        .iter()
        .enumerate()
        .max_by(|a, b| {
            let la = a.1.start.dist(a.1.end);
            let lb = b.1.start.dist(b.1.end);
            la.partial_cmp(&lb).unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let a = &chain[longest];
    let mid = a.arc.midpoint();
    let dir = (a.end - a.start).normalized();
    let right = Point::new(dir.y, -dir.x);
    let mut delta = 1e-4 * polygon.diameter().max(1.0);
    loop {
        let probe = mid + right * delta;
        if polygon.locate(probe, eps) == Location::Inside {
            let (_, dp, _) = spm_p.locate(probe, eps)?;
            let (_, dq, _) = spm_q.locate(probe, eps)?;
            if (dp - dq).abs() > eps {
                if dp > dq {
                    chain.reverse();
                    for c in &mut chain {
                        std::mem::swap(&mut c.start, &mut c.end);
                    }
                }
                return Ok(chain);
            }
        }
        delta *= 2.0;
        if delta > polygon.diameter() {
            return Err(GeovorError::DegeneracyDetected(
                f64::NAN,
                "cannot determine bisector orientation".into(),
            ));
        }
    }
}

/// Tags junctions with the extension segments carrying them and assembles
/// the final structure.
fn finalize(
    mut chain: Vec<BisectorArc>,
    tri: &Triangulation,
    spm_p: &ExtendedSpm,
    spm_q: &ExtendedSpm,
    tol: f64,
) -> Result<Bisector> {
    let polygon = tri.polygon();
    // Align each arc's parameter direction with the chain direction so that
    // parameter order, sub-arcs, and signed integrals follow the chain.
    for c in &mut chain {
        if c.arc.start().dist(c.start) > c.arc.end().dist(c.start) {
            c.arc.t_range = (c.arc.t_range.1, c.arc.t_range.0);
        }
    }
    let mut vertices = Vec::new();
    for w in chain.windows(2) {
        let j = w[1].start;
        let mut tagged = None;
        for (site, spm) in [(SiteTag::P, spm_p), (SiteTag::Q, spm_q)] {
            for ext in spm.extensions.iter().flatten() {
                if dist_point_segment(j, ext.vertex, ext.endpoint) <= 4.0 * tol {
                    tagged = Some(BisectorVertex {
                        point: j,
                        site,
                        vertex_index: ext.vertex_index,
                    });
                    break;
                }
            }
            if tagged.is_some() {
                break;
            }
        }
        vertices.push(tagged.ok_or_else(|| {
            GeovorError::DegeneracyDetected(
                f64::NAN,
                format!("bisector vertex at ({}, {}) on no extension segment", j.x, j.y),
            )
        })?);
    }
    let first = chain.first().unwrap().start;
    let last = chain.last().unwrap().end;
    let endpoints = [
        (first, polygon.closest_edge(first).0),
        (last, polygon.closest_edge(last).0),
    ];
    Ok(Bisector {
        endpoints,
        vertices,
        arcs: chain,
    })
}
