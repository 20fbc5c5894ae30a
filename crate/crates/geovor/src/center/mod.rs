//! The Voronoi center of three sites: the unique point (if any) equidistant
//! to all three, computed as the zero of d_s − d_p along the bisector B_pq
//! and tracked kinetically through three certificate classes: shortest path
//! map structure, center-in-cell, and bisector-endpoint cyclic order.

use crate::bisector::{build_bisector, Bisector};
use crate::error::{GeovorError, Result};
use crate::geom::{Location, Point, Triangulation};
use crate::spm::{build_spm, Anchor, ExtendedSpm, SpmFingerprint};
use std::sync::Arc;

/// Site index pairs owning the three bisectors, in fixed order.
const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// The combinatorial changes the center undergoes (§4 taxonomy).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterEventKind {
    /// The center collides with the polygon boundary and disappears.
    Collapse13,
    /// The center appears on the polygon boundary.
    Expand13,
    /// A bisector endpoint sweeps across a polygon vertex, or an SPM changes
    /// structure without affecting the center's cells.
    Vertex,
    /// The center's geodesic path to one site loses a vertex.
    Collapse23,
    /// The center's geodesic path to one site gains a vertex.
    Expand23,
}

#[derive(Debug, Clone)]
pub struct CenterEvent {
    pub time: f64,
    pub kind: CenterEventKind,
    pub detail: String,
    /// Time just past the event at which the post-event combinatorics is
    /// fully expressed.
    pub resume: f64,
}

/// Certificate classes of §4.2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CenterCertificateKind {
    /// Type (i): the SPM structure of one site.
    SpmStructure(usize),
    /// Type (ii): the center stays in its current cell of one SPM.
    CenterInCell(usize),
    /// Type (iii): endpoint cells and the cyclic endpoint order on ∂P.
    EndpointOrder,
}

#[derive(Debug, Clone)]
pub struct CenterCertificate {
    pub id: String,
    pub kind: CenterCertificateKind,
    pub failure_time: Option<f64>,
}

/// A bisector endpoint on ∂P with its cyclic position and SPM cells.
#[derive(Debug, Clone)]
pub struct BoundaryEndpoint {
    /// Site indices of the owning bisector.
    pub pair: (usize, usize),
    pub point: Point,
    /// Boundary edge carrying the endpoint.
    pub edge: usize,
    /// Position along ∂P (edge index plus fraction).
    pub param: f64,
    /// Anchors of the SPM cells of the two owning sites at the endpoint.
    pub cells: (Anchor, Anchor),
}

/// Combinatorial state of the whole three-site configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterFingerprint {
    pub spms: [SpmFingerprint; 3],
    /// Anchors of the cells containing the center, when it exists.
    pub center_anchors: Option<[Anchor; 3]>,
    /// Endpoint boundary edges per bisector, in chain order.
    pub endpoint_edges: [[usize; 2]; 3],
    /// Cyclic order of the six endpoints on ∂P: (bisector, end index),
    /// rotated so the smallest tag comes first.
    pub cyclic_order: Vec<(u8, u8)>,
}

/// One linear site trajectory.
#[derive(Debug, Clone, Copy)]
pub struct SiteTrajectory {
    pub pos0: Point,
    pub vel: Point,
}

struct Snapshot {
    spms: [ExtendedSpm; 3],
    bisectors: [Bisector; 3],
    center: Option<Point>,
    center_cells: Option<[usize; 3]>,
    endpoints: Vec<BoundaryEndpoint>,
    fingerprint: CenterFingerprint,
}

pub struct VoronoiCenterTracker {
    tri: Arc<Triangulation>,
    sites: [SiteTrajectory; 3],
    t_ref: f64,
    /// Time of the last rebuild.
    pub time: f64,
    pub eps_time: f64,
    pub eps_geom: f64,
    pub spms: [ExtendedSpm; 3],
    pub bisectors: [Bisector; 3],
    pub center: Option<Point>,
    /// Cell indices containing the center, one per SPM.
    pub center_cells: Option<[usize; 3]>,
    pub boundary_endpoints: Vec<BoundaryEndpoint>,
    fingerprint: CenterFingerprint,
    /// Shortest-path vertex chains from the center's cell apex back to each
    /// site, frozen at the last rebuild; they define the maintained center.
    center_chains: Option<[Vec<usize>; 3]>,
}

/// Piecewise trajectory of the center between combinatorial events.
#[derive(Debug, Clone)]
pub struct CenterInterval {
    pub start: f64,
    pub end: f64,
    /// Sampled polyline; empty when the center is absent on this interval.
    pub samples: Vec<(f64, Point)>,
}

#[derive(Debug, Clone)]
pub struct CenterTrace {
    pub events: Vec<CenterEvent>,
    pub intervals: Vec<CenterInterval>,
}

/// The point on B_pq (built from `spm_p`, `spm_q`) equidistant to the third
/// site, or None when the three-way equidistant locus misses the polygon.
pub fn compute_center(
    tri: &Triangulation,
    spm_p: &ExtendedSpm,
    spm_q: &ExtendedSpm,
    spm_s: &ExtendedSpm,
) -> Result<Option<Point>> {
    let bis = build_bisector(tri, spm_p, spm_q)?;
    center_on_bisector(tri, &bis, spm_p, spm_s)
}

/// Zero of d_s − d_p along an already built bisector of p and q.
fn center_on_bisector(
    tri: &Triangulation,
    bis: &Bisector,
    spm_p: &ExtendedSpm,
    spm_s: &ExtendedSpm,
) -> Result<Option<Point>> {
    let diam = tri.polygon().diameter().max(1.0);
    let eps = 1e-9 * diam;
    let g = |x: Point| -> Option<f64> {
        let (_, dp, _) = spm_p.locate(x, eps).ok()?;
        let (_, ds, _) = spm_s.locate(x, eps).ok()?;
        Some(ds - dp)
    };
    let mut roots: Vec<Point> = Vec::new();
    for ba in &bis.arcs {
        let pts = ba.arc.samples(33);
        let vals: Vec<Option<f64>> = pts.iter().map(|&x| g(x)).collect();
        for w in 0..pts.len() - 1 {
            let (Some(a), Some(b)) = (vals[w], vals[w + 1]) else {
                continue;
            };
            if a == 0.0 || a.signum() == b.signum() {
                continue;
            }
            // Bisect on the support parameter.
            let (mut ua, mut ub) = (ba.arc.param_of(pts[w]), ba.arc.param_of(pts[w + 1]));
            for _ in 0..200 {
                if (ub - ua).abs() <= 1e-15 * (1.0 + ua.abs().max(ub.abs())) {
                    break;
                }
                let um = 0.5 * (ua + ub);
                let Some(vm) = g(ba.arc.point_at(um)) else {
                    break;
                };
                if vm == 0.0 {
                    ua = um;
                    ub = um;
                    break;
                }
                if vm.signum() == a.signum() {
                    ua = um;
                } else {
                    ub = um;
                }
            }
            roots.push(ba.arc.point_at(0.5 * (ua + ub)));
        }
    }
    roots.dedup_by(|a, b| a.dist(*b) <= 1e-6 * diam);
    match roots.as_slice() {
        [] => Ok(None),
        [c] => {
            if g(*c).map(f64::abs).unwrap_or(f64::MAX) > 1e-6 * diam {
                return Err(GeovorError::DegenerateCollinearCocircular);
            }
            Ok(Some(*c))
        }
        _ => Err(GeovorError::DegenerateCollinearCocircular),
    }
}

/// Number of path vertices between the site and a cell anchored at `a`.
fn waypoint_depth(spm: &ExtendedSpm, a: Anchor) -> usize {
    match a {
        Anchor::Site => 0,
        Anchor::Vertex(i) => 1 + waypoint_depth(spm, spm.parents[i]),
    }
}

fn build_snapshot(tri: &Triangulation, spms: [ExtendedSpm; 3]) -> Result<Snapshot> {
    let polygon = tri.polygon();
    let eps = 1e-9 * polygon.diameter().max(1.0);
    let bisectors = [
        build_bisector(tri, &spms[0], &spms[1])?,
        build_bisector(tri, &spms[0], &spms[2])?,
        build_bisector(tri, &spms[1], &spms[2])?,
    ];
    let center = center_on_bisector(tri, &bisectors[0], &spms[0], &spms[2])?;
    let (center_cells, center_anchors) = match center {
        Some(c) => {
            let mut cells = [0usize; 3];
            let mut anchors = [Anchor::Site; 3];
            for i in 0..3 {
                let (idx, _, _) = spms[i].locate(c, eps)?;
                cells[i] = idx;
                anchors[i] = spms[i].cells[idx].anchor;
            }
            (Some(cells), Some(anchors))
        }
        None => (None, None),
    };
    let mut endpoints = Vec::with_capacity(6);
    let mut endpoint_edges = [[0usize; 2]; 3];
    for (bi, bis) in bisectors.iter().enumerate() {
        let (a, b) = (PAIRS[bi].0, PAIRS[bi].1);
        for (end, &(pt, edge)) in bis.endpoints.iter().enumerate() {
            endpoint_edges[bi][end] = edge;
            // Nudge inward for cell location.
            let inset = pt.lerp(bis.arcs[if end == 0 { 0 } else { bis.arcs.len() - 1 }]
                .arc
                .midpoint(), 1e-9);
            let ca = spms[a].locate(inset, eps).map(|(i, _, _)| spms[a].cells[i].anchor)?;
            let cb = spms[b].locate(inset, eps).map(|(i, _, _)| spms[b].cells[i].anchor)?;
            endpoints.push(BoundaryEndpoint {
                pair: PAIRS[bi],
                point: pt,
                edge,
                param: polygon.boundary_parameter(pt),
                cells: (ca, cb),
            });
        }
    }
    let mut order: Vec<(f64, u8, u8)> = endpoints
        .iter()
        .enumerate()
        .map(|(k, e)| (e.param, (k / 2) as u8, (k % 2) as u8))
        .collect();
    order.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut cyclic: Vec<(u8, u8)> = order.iter().map(|&(_, b, e)| (b, e)).collect();
    if let Some(min_pos) = (0..cyclic.len()).min_by_key(|&i| cyclic[i]) {
        cyclic.rotate_left(min_pos);
    }
    let fingerprint = CenterFingerprint {
        spms: [
            spms[0].fingerprint(),
            spms[1].fingerprint(),
            spms[2].fingerprint(),
        ],
        center_anchors,
        endpoint_edges,
        cyclic_order: cyclic,
    };
    Ok(Snapshot {
        spms,
        bisectors,
        center,
        center_cells,
        endpoints,
        fingerprint,
    })
}

impl VoronoiCenterTracker {
    pub fn new(
        tri: Arc<Triangulation>,
        sites: [SiteTrajectory; 3],
        t0: f64,
        eps_time: f64,
        eps_geom: f64,
    ) -> Result<Self> {
        let snap = {
            let spms = build_spms_at(&tri, &sites, t0, t0)?;
            build_snapshot(&tri, spms)?
        };
        let mut tracker = VoronoiCenterTracker {
            tri,
            sites,
            t_ref: t0,
            time: t0,
            eps_time,
            eps_geom,
            spms: snap.spms,
            bisectors: snap.bisectors,
            center: snap.center,
            center_cells: snap.center_cells,
            boundary_endpoints: snap.endpoints,
            fingerprint: snap.fingerprint,
            center_chains: None,
        };
        tracker.freeze_chains();
        Ok(tracker)
    }

    pub fn fingerprint(&self) -> &CenterFingerprint {
        &self.fingerprint
    }

    pub fn site_position(&self, i: usize, t: f64) -> Point {
        self.sites[i].pos0 + self.sites[i].vel * (t - self.t_ref)
    }

    fn freeze_chains(&mut self) {
        self.center_chains = self.center_cells.map(|cells| {
            let mut chains: [Vec<usize>; 3] = Default::default();
            for i in 0..3 {
                let mut a = self.spms[i].cells[cells[i]].anchor;
                while let Anchor::Vertex(v) = a {
                    chains[i].push(v);
                    a = self.spms[i].parents[v];
                }
            }
            chains
        });
    }

    /// The maintained center position at time t, evaluated from the frozen
    /// anchor chains by Newton iteration. None when the center is absent.
    pub fn center_at(&self, t: f64) -> Option<Point> {
        let chains = self.center_chains.as_ref()?;
        let verts = self.tri.polygon().vertices();
        let mut anchors = [Point::new(0.0, 0.0); 3];
        let mut adds = [0.0f64; 3];
        for i in 0..3 {
            let site = self.site_position(i, t);
            if chains[i].is_empty() {
                anchors[i] = site;
            } else {
                anchors[i] = verts[chains[i][0]];
                let mut add = 0.0;
                for w in chains[i].windows(2) {
                    add += verts[w[0]].dist(verts[w[1]]);
                }
                add += verts[*chains[i].last().unwrap()].dist(site);
                adds[i] = add;
            }
        }
        let mut x = self.center?;
        for _ in 0..100 {
            let d: Vec<f64> = (0..3).map(|i| (x - anchors[i]).norm() + adds[i]).collect();
            let u: Vec<Point> = (0..3)
                .map(|i| (x - anchors[i]) * (1.0 / (x - anchors[i]).norm().max(1e-300)))
                .collect();
            let f = (d[0] - d[1], d[1] - d[2]);
            if f.0.abs().max(f.1.abs()) < 1e-14 * (1.0 + d[0]) {
                break;
            }
            let (a, b) = (u[0] - u[1], u[1] - u[2]);
            let det = a.x * b.y - a.y * b.x;
            if det.abs() < 1e-300 {
                break;
            }
            let dx = Point::new(
                (f.0 * b.y - f.1 * a.y) / det,
                (f.1 * a.x - f.0 * b.x) / det,
            );
            x = x - dx;
        }
        Some(x)
    }

    fn build_spms(&self, t: f64) -> Result<[ExtendedSpm; 3]> {
        build_spms_at(&self.tri, &self.sites, self.t_ref, t)
    }

    /// Fingerprint from fresh builds at t. Momentary degenerate states (the
    /// exact event times) map to None.
    fn probe(&self, t: f64) -> Result<Option<CenterFingerprint>> {
        let spms = self.build_spms(t)?;
        match build_snapshot(&self.tri, spms) {
            Ok(s) => Ok(Some(s.fingerprint)),
            Err(
                GeovorError::DegeneracyDetected(..)
                | GeovorError::DegenerateEquidistantVertex
                | GeovorError::DegenerateCollinearCocircular
                | GeovorError::IdenticalDistanceFields,
            ) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Times in (now, horizon] when any site crosses a line through two
    /// polygon vertices — the superset of all SPM change times.
    fn spm_candidates(&self, now: f64, horizon: f64) -> Vec<f64> {
        let verts = self.tri.polygon().vertices();
        let mut ts = Vec::new();
        for i in 0..3 {
            let pos = self.site_position(i, now);
            let vel = self.sites[i].vel;
            for a in 0..verts.len() {
                for b in (a + 1)..verts.len() {
                    let (u, v) = (verts[a], verts[b]);
                    let num = (u - pos).cross(v - pos);
                    let den = vel.cross(u - v);
                    if den.abs() > 1e-300 {
                        let t = now - num / den;
                        if t > now + self.eps_time && t <= horizon {
                            ts.push(t);
                        }
                    }
                }
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() <= self.eps_time);
        ts
    }

    fn sample_times(&self, now: f64, horizon: f64) -> Vec<f64> {
        let mut bounds = vec![now];
        bounds.extend(self.spm_candidates(now, horizon));
        bounds.push(horizon);
        let mut ts = Vec::new();
        for w in bounds.windows(2) {
            ts.push(0.5 * (w[0] + w[1]));
        }
        let n = 64;
        for k in 1..=n {
            ts.push(now + (horizon - now) * k as f64 / n as f64);
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() <= 0.25 * self.eps_time);
        ts
    }

    /// Earliest probe change in (now, horizon], to within eps_time.
    fn first_probe_change(&self, now: f64, horizon: f64) -> Result<Option<f64>> {
        let base = self.probe(now)?;
        let mut lo = now;
        let mut hi = None;
        for t in self.sample_times(now, horizon) {
            if self.probe(t)? == base {
                lo = t;
            } else {
                hi = Some(t);
                break;
            }
        }
        let Some(mut hi) = hi else {
            return Ok(None);
        };
        while hi - lo > self.eps_time {
            let mid = 0.5 * (lo + hi);
            if self.probe(mid)? == base {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(0.5 * (lo + hi)))
    }

    /// First stable fingerprint past t: (settle time, fingerprint).
    fn settle_past(&self, t: f64, horizon: f64) -> Result<(f64, CenterFingerprint)> {
        let next_candidate = self
            .spm_candidates(t + self.eps_time, horizon)
            .first()
            .copied()
            .unwrap_or(horizon);
        let delta_max = (0.45 * (t - self.time).min(next_candidate - t))
            .max(2.0 * self.eps_time);
        let mut delta = (4.0 * self.eps_time).max(1e-12).min(delta_max);
        loop {
            if let Some(fp) = self.probe(t + delta)? {
                return Ok((t + delta, fp));
            }
            if delta >= delta_max {
                return Err(GeovorError::DegeneracyDetected(
                    t,
                    "no valid configuration past the detected change".into(),
                ));
            }
            delta = (delta * 4.0).min(delta_max);
        }
    }

    fn classify(&self, t: f64, resume: f64, after: &CenterFingerprint) -> CenterEvent {
        let before = &self.fingerprint;
        let (kind, detail) = match (&before.center_anchors, &after.center_anchors) {
            (Some(_), None) => (
                CenterEventKind::Collapse13,
                "center collides with the polygon boundary".to_string(),
            ),
            (None, Some(_)) => (
                CenterEventKind::Expand13,
                "center appears on the polygon boundary".to_string(),
            ),
            (Some(ba), Some(aa)) if ba != aa => {
                let mut kind = CenterEventKind::Vertex;
                let mut detail = String::new();
                for i in 0..3 {
                    if ba[i] == aa[i] {
                        continue;
                    }
                    // Depth diff needs the matching SPM; the maintained one
                    // serves for the before state, the change is ±1 vertex.
                    let db = waypoint_depth(&self.spms[i], ba[i]);
                    let da = match aa[i] {
                        Anchor::Site => 0,
                        Anchor::Vertex(v) => {
                            // Parent chains are stable across a 2,3-event
                            // except at the changed cell itself.
                            1 + waypoint_depth(&self.spms[i], self.spms[i].parents[v])
                        }
                    };
                    if da < db {
                        kind = CenterEventKind::Collapse23;
                        detail = format!("path to site {i} loses a vertex");
                    } else if da > db {
                        kind = CenterEventKind::Expand23;
                        detail = format!("path to site {i} gains a vertex");
                    }
                }
                if detail.is_empty() {
                    detail = "center cell change without depth change".into();
                }
                (kind, detail)
            }
            _ => {
                let detail = if before.spms != after.spms {
                    "shortest path map structure change".to_string()
                } else if before.endpoint_edges != after.endpoint_edges {
                    "bisector endpoint crosses a polygon vertex".to_string()
                } else {
                    "cyclic endpoint order change on the boundary".to_string()
                };
                (CenterEventKind::Vertex, detail)
            }
        };
        CenterEvent {
            time: t,
            kind,
            detail,
            resume,
        }
    }

    /// Earliest combinatorial event in (time, horizon], or None.
    pub fn next_center_event(&self, horizon: f64) -> Result<Option<CenterEvent>> {
        let mut now = self.time;
        for _ in 0..10_000 {
            let Some(t) = self.first_probe_change(now, horizon)? else {
                return Ok(None);
            };
            let (ta, after) = self.settle_past(t, horizon)?;
            if after != self.fingerprint {
                return Ok(Some(self.classify(t, ta, &after)));
            }
            // Transient flicker: the settled state equals the maintained one.
            now = ta;
        }
        Err(GeovorError::DegeneracyDetected(
            now,
            "event detection failed to make progress".into(),
        ))
    }

    fn rebuild(&mut self, t: f64) -> Result<()> {
        let spms = self.build_spms(t)?;
        let snap = build_snapshot(&self.tri, spms)?;
        self.spms = snap.spms;
        self.bisectors = snap.bisectors;
        self.center = snap.center;
        self.center_cells = snap.center_cells;
        self.boundary_endpoints = snap.endpoints;
        self.fingerprint = snap.fingerprint;
        self.time = t;
        self.freeze_chains();
        Ok(())
    }

    /// Advances the tracker just past `ev`.
    pub fn handle_center_event(&mut self, ev: &CenterEvent) -> Result<()> {
        if ev.time <= self.time {
            return Err(GeovorError::StaleEvent(ev.time));
        }
        let mut at = ev.resume.max(ev.time + (4.0 * self.eps_time).max(1e-12));
        for _ in 0..24 {
            match self.rebuild(at) {
                Ok(()) => return Ok(()),
                Err(
                    GeovorError::DegeneracyDetected(..)
                    | GeovorError::DegenerateEquidistantVertex
                    | GeovorError::DegenerateCollinearCocircular
                    | GeovorError::IdenticalDistanceFields,
                ) => {
                    at += at - ev.time;
                }
                Err(e) => return Err(e),
            }
        }
        Err(GeovorError::DegeneracyDetected(
            ev.time,
            "no valid rebuild past the event".into(),
        ))
    }

    /// Certificates of all three classes with their first failure time in
    /// (time, horizon], located by the same scan-and-bisect schedule the
    /// event detection uses.
    pub fn certificates(&self, horizon: f64) -> Result<Vec<CenterCertificate>> {
        // Project the fingerprint per class; a class certificate fails at the
        // first time its projection changes.
        let mut changes: [Option<f64>; 3] = [None; 3];
        let base = self.probe(self.time)?;
        let proj = |fp: &Option<CenterFingerprint>, class: usize| -> Option<Vec<u8>> {
            let fp = fp.as_ref()?;
            let mut key = Vec::new();
            match class {
                0 => key.extend(format!("{:?}", fp.spms).bytes()),
                1 => key.extend(format!("{:?}", fp.center_anchors).bytes()),
                _ => key.extend(
                    format!("{:?}{:?}", fp.endpoint_edges, fp.cyclic_order).bytes(),
                ),
            }
            Some(key)
        };
        for class in 0..3 {
            let base_key = proj(&base, class);
            let mut lo = self.time;
            let mut hi = None;
            for t in self.sample_times(self.time, horizon) {
                if proj(&self.probe(t)?, class) == base_key {
                    lo = t;
                } else {
                    hi = Some(t);
                    break;
                }
            }
            if let Some(mut hi) = hi {
                while hi - lo > self.eps_time {
                    let mid = 0.5 * (lo + hi);
                    if proj(&self.probe(mid)?, class) == base_key {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                changes[class] = Some(0.5 * (lo + hi));
            }
        }
        let mut out = Vec::new();
        for i in 0..3 {
            out.push(CenterCertificate {
                id: format!("spm-structure-{i}"),
                kind: CenterCertificateKind::SpmStructure(i),
                failure_time: changes[0],
            });
        }
        if self.center.is_some() {
            for i in 0..3 {
                out.push(CenterCertificate {
                    id: format!("center-in-cell-{i}"),
                    kind: CenterCertificateKind::CenterInCell(i),
                    failure_time: changes[1],
                });
            }
        }
        out.push(CenterCertificate {
            id: "endpoint-order".into(),
            kind: CenterCertificateKind::EndpointOrder,
            failure_time: changes[2],
        });
        Ok(out)
    }

    /// Advances from t0 to t1, collecting events and a sampled polyline of
    /// the center on each event-free interval.
    pub fn trace_center(&mut self, t0: f64, t1: f64, max_events: usize) -> Result<CenterTrace> {
        assert!(t0 < t1);
        self.rebuild(t0)?;
        let mut events = Vec::new();
        let mut intervals = Vec::new();
        loop {
            let start = self.time;
            let ev = self.next_center_event(t1)?;
            let end = ev.as_ref().map_or(t1, |e| e.time);
            let mut samples = Vec::new();
            if self.center.is_some() {
                let n = 8;
                for k in 0..=n {
                    let t = start + (end - start) * (k as f64 + 0.5) / (n as f64 + 1.0);
                    if let Some(c) = self.center_at(t) {
                        samples.push((t, c));
                    }
                }
            }
            intervals.push(CenterInterval {
                start,
                end,
                samples,
            });
            match ev {
                Some(ev) => {
                    if events.len() >= max_events {
                        return Err(GeovorError::EventBudgetExceeded(max_events));
                    }
                    self.handle_center_event(&ev)?;
                    events.push(ev);
                }
                None => break,
            }
        }
        Ok(CenterTrace { events, intervals })
    }
}

fn build_spms_at(
    tri: &Triangulation,
    sites: &[SiteTrajectory; 3],
    t_ref: f64,
    t: f64,
) -> Result<[ExtendedSpm; 3]> {
    let polygon = tri.polygon();
    let eps = 1e-12 * polygon.diameter().max(1.0);
    let mut out: Vec<ExtendedSpm> = Vec::with_capacity(3);
    for (i, s) in sites.iter().enumerate() {
        let pos = s.pos0 + s.vel * (t - t_ref);
        if polygon.locate(pos, eps) != Location::Inside {
            return Err(GeovorError::SiteExitsPolygon(i, t));
        }
        let spm = build_spm(tri, pos).map_err(|e| match e {
            GeovorError::SiteOnBoundary(..) | GeovorError::PointOutsidePolygon(..) => {
                GeovorError::SiteExitsPolygon(i, t)
            }
            e => e,
        })?;
        out.push(spm);
    }
    Ok(out.try_into().map_err(|_| GeovorError::NonFiniteCoordinate).unwrap())
}
