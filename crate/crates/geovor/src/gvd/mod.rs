//! The full geodesic Voronoi diagram of n sites: static construction by
//! trimming pairwise bisectors to the region where both sites are jointly
//! nearest, and kinetic maintenance under the full event taxonomy.

pub mod forest;
pub mod kds;

pub use forest::DynamicSpmForest;
pub use kds::{run_simulation, DiagramEvent, DiagramEventKind, GvdKds};

use crate::bisector::{build_bisector, Bisector, SiteTag};
use crate::error::{GeovorError, Result};
use crate::geom::{HyperbolicArc, Point, Triangulation};
use crate::spm::{build_spm, ExtendedSpm, SpmFingerprint};

/// A diagram vertex with its combinatorial type.
#[derive(Debug, Clone)]
pub enum GvdVertexKind {
    /// Degree 1: a bisector endpoint on ∂P.
    Boundary { pair: (usize, usize), edge: usize },
    /// Degree 2: a bisector crossing the extension segment of a polygon
    /// vertex in the owner's shortest path map.
    Extension {
        pair: (usize, usize),
        owner: usize,
        vertex: usize,
    },
    /// Degree 3: the Voronoi center of three sites.
    Center { triple: [usize; 3] },
}

#[derive(Debug, Clone)]
pub struct GvdVertex {
    pub point: Point,
    pub kind: GvdVertexKind,
}

impl GvdVertex {
    pub fn degree(&self) -> usize {
        match self.kind {
            GvdVertexKind::Boundary { .. } => 1,
            GvdVertexKind::Extension { .. } => 2,
            GvdVertexKind::Center { .. } => 3,
        }
    }
}

/// One diagram edge: a single hyperbolic arc between two diagram vertices,
/// equidistant to the two sites of `pair` and strictly closer than all
/// others in its interior.
#[derive(Debug, Clone)]
pub struct GvdEdge {
    pub pair: (usize, usize),
    pub arc: HyperbolicArc,
    /// Vertex ids into `GeodesicVoronoiDiagram::vertices`.
    pub start: usize,
    pub end: usize,
}

/// Combinatorial state of the diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GvdFingerprint {
    pub spms: Vec<SpmFingerprint>,
    /// Per pair in index order: the feature chain of every active interval.
    pub pairs: Vec<((usize, usize), Vec<IntervalFingerprint>)>,
    /// Cyclic order of degree-1 vertices on ∂P: (pair, boundary edge),
    /// rotated so the smallest element comes first.
    pub boundary_order: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalFingerprint {
    pub start: EndTag,
    pub end: EndTag,
    /// Interior degree-2 vertices in chain order: (owner site, polygon
    /// vertex).
    pub deg2: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndTag {
    Boundary(usize),
    Center([usize; 3]),
}

#[derive(Debug, Clone)]
pub struct GeodesicVoronoiDiagram {
    pub sites: Vec<Point>,
    pub spms: Vec<ExtendedSpm>,
    pub vertices: Vec<GvdVertex>,
    pub edges: Vec<GvdEdge>,
    /// Analytic area of each site's Voronoi cell.
    pub cell_areas: Vec<f64>,
    /// Site pairs sharing at least one edge.
    pub adjacency: Vec<(usize, usize)>,
    fingerprint: GvdFingerprint,
}

/// Position along a bisector chain: arc index plus normalized sub-parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ChainPos {
    arc: usize,
    s: f64,
}

impl ChainPos {
    fn key(self) -> f64 {
        self.arc as f64 + self.s
    }
}

/// A point where a third site becomes co-nearest on the bisector: a Voronoi
/// center candidate.
#[derive(Debug, Clone, Copy)]
struct ChainCut {
    pos: ChainPos,
    third: usize,
    point: Point,
}

impl GeodesicVoronoiDiagram {
    pub fn fingerprint(&self) -> &GvdFingerprint {
        &self.fingerprint
    }

    /// Vertex counts by degree: (degree-1, degree-2, degree-3).
    pub fn degree_census(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for v in &self.vertices {
            match v.degree() {
                1 => c.0 += 1,
                2 => c.1 += 1,
                _ => c.2 += 1,
            }
        }
        c
    }

    /// The site owning x (nearest site); errs ties within eps.
    pub fn owner_of(&self, x: Point, eps: f64) -> Result<Option<usize>> {
        let mut ds = Vec::with_capacity(self.spms.len());
        for spm in &self.spms {
            ds.push(spm.locate(x, eps)?.1);
        }
        let mut best = 0;
        for i in 1..ds.len() {
            if ds[i] < ds[best] {
                best = i;
            }
        }
        for (i, &d) in ds.iter().enumerate() {
            if i != best && d - ds[best] <= eps {
                return Ok(None);
            }
        }
        Ok(Some(best))
    }
}

/// Distance to site k at x.
fn dist_to(spms: &[ExtendedSpm], k: usize, x: Point, eps: f64) -> Option<f64> {
    spms[k].locate(x, eps).ok().map(|(_, d, _)| d)
}

fn sub_arc(arc: &HyperbolicArc, s0: f64, s1: f64) -> HyperbolicArc {
    let (t0, t1) = arc.t_range;
    let mut a = arc.clone();
    a.t_range = (t0 + (t1 - t0) * s0, t0 + (t1 - t0) * s1);
    a
}

fn point_on(arc: &HyperbolicArc, s: f64) -> Point {
    let (t0, t1) = arc.t_range;
    arc.point_at(t0 + (t1 - t0) * s)
}

/// All positions along the chain of `bis` where some third site becomes
/// equidistant with the pair, refined by bisection.
fn chain_cuts(
    bis: &Bisector,
    spms: &[ExtendedSpm],
    pair: (usize, usize),
    eps: f64,
    diam: f64,
) -> Result<Vec<ChainCut>> {
    let mut cuts: Vec<ChainCut> = Vec::new();
    for (ai, ba) in bis.arcs.iter().enumerate() {
        let n = 33;
        let pts: Vec<Point> = (0..=n)
            .map(|k| point_on(&ba.arc, k as f64 / n as f64))
            .collect();
        for k in 0..spms.len() {
            if k == pair.0 || k == pair.1 {
                continue;
            }
            let g = |x: Point| -> Option<f64> {
                Some(dist_to(spms, k, x, eps)? - dist_to(spms, pair.0, x, eps)?)
            };
            let vals: Vec<Option<f64>> = pts.iter().map(|&x| g(x)).collect();
            for w in 0..n {
                let (Some(a), Some(b)) = (vals[w], vals[w + 1]) else {
                    continue;
                };
                if a == 0.0 || a.signum() == b.signum() {
                    continue;
                }
                let (mut sa, mut sb) = (w as f64 / n as f64, (w + 1) as f64 / n as f64);
                for _ in 0..100 {
                    let sm = 0.5 * (sa + sb);
                    let Some(vm) = g(point_on(&ba.arc, sm)) else {
                        break;
                    };
                    if vm == 0.0 || sb - sa < 1e-15 {
                        sa = sm;
                        sb = sm;
                        break;
                    }
                    if vm.signum() == a.signum() {
                        sa = sm;
                    } else {
                        sb = sm;
                    }
                }
                let s = 0.5 * (sa + sb);
                let x = point_on(&ba.arc, s);
                // A fourth site equidistant at a center is degenerate.
                for l in 0..spms.len() {
                    if l == pair.0 || l == pair.1 || l == k {
                        continue;
                    }
                    let (Some(dl), Some(d0)) =
                        (dist_to(spms, l, x, eps), dist_to(spms, pair.0, x, eps))
                    else {
                        continue;
                    };
                    if (dl - d0).abs() < 1e-9 * diam {
                        return Err(GeovorError::DegenerateCocircularSites);
                    }
                }
                cuts.push(ChainCut {
                    pos: ChainPos { arc: ai, s },
                    third: k,
                    point: x,
                });
            }
        }
    }
    cuts.sort_by(|a, b| a.pos.key().partial_cmp(&b.pos.key()).unwrap());
    cuts.dedup_by(|a, b| {
        (a.pos.key() - b.pos.key()).abs() < 1e-12 && a.third == b.third
    });
    Ok(cuts)
}

/// Builds the geodesic Voronoi diagram of static sites.
pub fn build_gvd(tri: &Triangulation, sites: &[Point]) -> Result<GeodesicVoronoiDiagram> {
    let polygon = tri.polygon();
    let diam = polygon.diameter().max(1.0);
    let eps = 1e-9 * diam;
    let n = sites.len();
    let mut spms = Vec::with_capacity(n);
    for &s in sites {
        spms.push(build_spm(tri, s)?);
    }

    let mut vertices: Vec<GvdVertex> = Vec::new();
    let mut edges: Vec<GvdEdge> = Vec::new();
    let mut pair_fps: Vec<((usize, usize), Vec<IntervalFingerprint>)> = Vec::new();
    let mut center_ids: std::collections::BTreeMap<[usize; 3], usize> =
        std::collections::BTreeMap::new();

    for i in 0..n {
        for j in (i + 1)..n {
            let bis = build_bisector(tri, &spms[i], &spms[j])?;
            let cuts = chain_cuts(&bis, &spms, (i, j), eps, diam)?;

            // Split positions: chain start, cuts, chain end; arcs boundaries
            // are implicit (bisector vertices).
            let last_arc = bis.arcs.len() - 1;
            let mut stops: Vec<(ChainPos, Option<ChainCut>)> =
                vec![(ChainPos { arc: 0, s: 0.0 }, None)];
            for &c in &cuts {
                stops.push((c.pos, Some(c)));
            }
            stops.push((ChainPos { arc: last_arc, s: 1.0 }, None));

            // Activity of each span between consecutive stops.
            let active = |p0: ChainPos, p1: ChainPos| -> bool {
                // Midpoint along the chain key.
                let key = 0.5 * (p0.key() + p1.key());
                let arc = (key.floor() as usize).min(last_arc);
                let s = key - arc as f64;
                let x = point_on(&bis.arcs[arc].arc, s);
                let Some(di) = dist_to(&spms, i, x, eps) else {
                    return false;
                };
                (0..n)
                    .filter(|&k| k != i && k != j)
                    .all(|k| dist_to(&spms, k, x, eps).map_or(true, |dk| dk - di > 0.0))
            };

            let mut intervals: Vec<IntervalFingerprint> = Vec::new();
            let mut w = 0;
            while w + 1 < stops.len() {
                if !active(stops[w].0, stops[w + 1].0) {
                    w += 1;
                    continue;
                }
                // Maximal active run [w, r].
                let mut r = w + 1;
                while r + 1 < stops.len() && active(stops[r].0, stops[r + 1].0) {
                    r += 1;
                }

                let mut chain_vertices: Vec<usize> = Vec::new();
                let make_end = |vertices: &mut Vec<GvdVertex>,
                                center_ids: &mut std::collections::BTreeMap<[usize; 3], usize>,
                                stop: &(ChainPos, Option<ChainCut>),
                                chain_end: usize|
                 -> usize {
                    match stop.1 {
                        Some(cut) => {
                            let mut triple = [i, j, cut.third];
                            triple.sort_unstable();
                            *center_ids.entry(triple).or_insert_with(|| {
                                vertices.push(GvdVertex {
                                    point: cut.point,
                                    kind: GvdVertexKind::Center { triple },
                                });
                                vertices.len() - 1
                            })
                        }
                        None => {
                            let (pt, edge) = bis.endpoints[chain_end];
                            vertices.push(GvdVertex {
                                point: pt,
                                kind: GvdVertexKind::Boundary {
                                    pair: (i, j),
                                    edge,
                                },
                            });
                            vertices.len() - 1
                        }
                    }
                };
                let start_id = make_end(&mut vertices, &mut center_ids, &stops[w], 0);
                chain_vertices.push(start_id);

                // Interior degree-2 vertices: bisector vertices at arc
                // boundaries strictly inside (start arc .. end arc).
                let mut deg2 = Vec::new();
                let (p0, p1) = (stops[w].0, stops[r].0);
                for bv in 0..bis.vertices.len() {
                    // Vertex bv sits at the end of arc bv.
                    let key = (bv + 1) as f64;
                    if key > p0.key() + 1e-12 && key < p1.key() - 1e-12 {
                        let v = &bis.vertices[bv];
                        let owner = match v.site {
                            SiteTag::P => i,
                            SiteTag::Q => j,
                        };
                        vertices.push(GvdVertex {
                            point: v.point,
                            kind: GvdVertexKind::Extension {
                                pair: (i, j),
                                owner,
                                vertex: v.vertex_index,
                            },
                        });
                        chain_vertices.push(vertices.len() - 1);
                        deg2.push((owner, v.vertex_index));
                    }
                }
                let end_id = make_end(&mut vertices, &mut center_ids, &stops[r], 1);
                chain_vertices.push(end_id);

                // Edges between consecutive chain vertices: sub-arcs.
                let mut marks: Vec<ChainPos> = vec![p0];
                for bv in 0..bis.vertices.len() {
                    let key = (bv + 1) as f64;
                    if key > p0.key() + 1e-12 && key < p1.key() - 1e-12 {
                        marks.push(ChainPos { arc: bv, s: 1.0 });
                    }
                }
                marks.push(p1);
                for (e, win) in marks.windows(2).enumerate() {
                    let (a, b) = (win[0], win[1]);
                    // A span crossing arc boundaries is a whole-arc span.
                    let arc = if a.arc == b.arc {
                        sub_arc(&bis.arcs[a.arc].arc, a.s, b.s)
                    } else if (a.s - 1.0).abs() < 1e-12 {
                        sub_arc(&bis.arcs[b.arc].arc, 0.0, b.s)
                    } else {
                        sub_arc(&bis.arcs[a.arc].arc, a.s, 1.0)
                    };
                    edges.push(GvdEdge {
                        pair: (i, j),
                        arc,
                        start: chain_vertices[e],
                        end: chain_vertices[e + 1],
                    });
                }

                intervals.push(IntervalFingerprint {
                    start: end_tag(&vertices[start_id]),
                    end: end_tag(&vertices[end_id]),
                    deg2,
                });
                w = r + 1;
            }
            if !intervals.is_empty() {
                pair_fps.push(((i, j), intervals));
            }
        }
    }

    // Cyclic order of degree-1 vertices on ∂P.
    let mut deg1: Vec<(f64, usize, usize, usize)> = vertices
        .iter()
        .filter_map(|v| match v.kind {
            GvdVertexKind::Boundary { pair, edge } => Some((
                polygon.boundary_parameter(v.point),
                pair.0,
                pair.1,
                edge,
            )),
            _ => None,
        })
        .collect();
    deg1.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut boundary_order: Vec<(usize, usize, usize)> =
        deg1.iter().map(|&(_, a, b, e)| (a, b, e)).collect();
    if let Some(min_pos) = (0..boundary_order.len()).min_by_key(|&k| boundary_order[k]) {
        boundary_order.rotate_left(min_pos);
    }

    let adjacency: Vec<(usize, usize)> = pair_fps.iter().map(|&(p, _)| p).collect();
    let fingerprint = GvdFingerprint {
        spms: spms.iter().map(|s| s.fingerprint()).collect(),
        pairs: pair_fps,
        boundary_order,
    };
    let cell_areas = cell_areas(tri, sites, &spms, &vertices, &edges, eps)?;
    Ok(GeodesicVoronoiDiagram {
        sites: sites.to_vec(),
        spms,
        vertices,
        edges,
        cell_areas,
        adjacency,
        fingerprint,
    })
}

fn end_tag(v: &GvdVertex) -> EndTag {
    match v.kind {
        GvdVertexKind::Boundary { edge, .. } => EndTag::Boundary(edge),
        GvdVertexKind::Center { triple } => EndTag::Center(triple),
        GvdVertexKind::Extension { .. } => unreachable!("interval ends are degree 1 or 3"),
    }
}

/// Analytic cell areas by Green's theorem: every cell boundary consists of
/// diagram arcs (each shared by two cells) and the polygon boundary portions
/// owned by the cell's site.
fn cell_areas(
    tri: &Triangulation,
    sites: &[Point],
    spms: &[ExtendedSpm],
    vertices: &[GvdVertex],
    edges: &[GvdEdge],
    eps: f64,
) -> Result<Vec<f64>> {
    let polygon = tri.polygon();
    let n = sites.len();
    let mut areas = vec![0.0f64; n];

    // Arc contributions. The bisector chain is oriented with pair.0 on its
    // right: traversing forward keeps pair.1 on the left (CCW for pair.1's
    // cell), so pair.1 gets +integral and pair.0 gets −integral.
    for e in edges {
        let a = e.arc.area_integral();
        areas[e.pair.1] += a;
        areas[e.pair.0] -= a;
    }

    // Boundary portions between consecutive degree-1 vertices, each owned by
    // the nearest site of its midpoint.
    let mut params: Vec<f64> = vertices
        .iter()
        .filter_map(|v| match v.kind {
            GvdVertexKind::Boundary { .. } => Some(polygon.boundary_parameter(v.point)),
            _ => None,
        })
        .collect();
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let perimeter = polygon.perimeter();
    if params.is_empty() {
        params.push(0.0);
    }

    // Walk ∂P from parameter a to b (CCW, wrapping), accumulating the Green
    // integral and returning it.
    let verts = polygon.vertices();
    let m = verts.len();
    let mut edge_start_param = vec![0.0f64; m + 1];
    for i in 0..m {
        edge_start_param[i + 1] =
            edge_start_param[i] + verts[i].dist(verts[(i + 1) % m]);
    }
    let point_at = |p: f64| -> Point {
        let p = p.rem_euclid(perimeter);
        let i = match edge_start_param[..m].binary_search_by(|x| x.partial_cmp(&p).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let len = edge_start_param[i + 1] - edge_start_param[i];
        verts[i].lerp(verts[(i + 1) % m], ((p - edge_start_param[i]) / len).clamp(0.0, 1.0))
    };
    let green_walk = |a: f64, b: f64| -> f64 {
        let b = if b <= a + 1e-12 { b + perimeter } else { b };
        // Breakpoints: every polygon vertex parameter in (a, b), unwrapped.
        let mut stops = vec![a];
        for lap in 0..2 {
            for &vp in &edge_start_param[..m] {
                let c = vp + lap as f64 * perimeter;
                if c > a + 1e-12 && c < b - 1e-12 {
                    stops.push(c);
                }
            }
        }
        stops.push(b);
        stops.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut acc = 0.0;
        for w in stops.windows(2) {
            acc += 0.5 * point_at(w[0]).cross(point_at(w[1]));
        }
        acc
    };

    let k = params.len();
    for w in 0..k {
        let a = params[w];
        let b = if k == 1 { a + perimeter } else { params[(w + 1) % k] };
        let span = if k == 1 {
            perimeter
        } else {
            (b - a).rem_euclid(perimeter)
        };
        let mid = point_at(a + 0.5 * span);
        // Nudge inward for SPM location.
        let (ei, _) = polygon.closest_edge(mid);
        let (va, vb) = polygon.edge(ei);
        let inward = {
            let t = (vb - va).normalized();
            Point::new(-t.y, t.x)
        };
        let probe = mid + inward * (1e-7 * polygon.diameter());
        let mut owner = 0;
        let mut best = f64::MAX;
        for (s, spm) in spms.iter().enumerate() {
            if let Ok((_, d, _)) = spm.locate(probe, eps) {
                if d < best {
                    best = d;
                    owner = s;
                }
            }
        }
        areas[owner] += green_walk(a, a + span);
    }
    Ok(areas)
}
