//! Kinetic maintenance of the full geodesic Voronoi diagram: event detection
//! by combinatorial-fingerprint bisection over the superset of SPM change
//! times, classification into the full degree-pair taxonomy, and shortest
//! path tree maintenance via link/cut transplants in a dynamic forest.

use super::forest::DynamicSpmForest;
use super::{build_gvd, GeodesicVoronoiDiagram, GvdFingerprint};
use crate::center::SiteTrajectory;
use crate::error::{GeovorError, Result};
use crate::geom::{Location, Point, Triangulation};
use crate::scenarios::Scenario;
use crate::spm::Anchor;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Table 1 taxonomy: two diagram vertices of the named degrees collide
/// (collapse) or separate (expand), plus vertex events of the underlying
/// shortest path maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagramEventKind {
    Vertex,
    Collapse12,
    Expand12,
    Collapse13,
    Expand13,
    Collapse22,
    Expand22,
    Collapse23,
    Expand23,
    Collapse33,
    Expand33,
}

impl DiagramEventKind {
    pub fn name(self) -> &'static str {
        match self {
            DiagramEventKind::Vertex => "vertex",
            DiagramEventKind::Collapse12 => "collapse12",
            DiagramEventKind::Expand12 => "expand12",
            DiagramEventKind::Collapse13 => "collapse13",
            DiagramEventKind::Expand13 => "expand13",
            DiagramEventKind::Collapse22 => "collapse22",
            DiagramEventKind::Expand22 => "expand22",
            DiagramEventKind::Collapse23 => "collapse23",
            DiagramEventKind::Expand23 => "expand23",
            DiagramEventKind::Collapse33 => "collapse33",
            DiagramEventKind::Expand33 => "expand33",
        }
    }

    pub fn all() -> [DiagramEventKind; 11] {
        [
            DiagramEventKind::Vertex,
            DiagramEventKind::Collapse12,
            DiagramEventKind::Expand12,
            DiagramEventKind::Collapse13,
            DiagramEventKind::Expand13,
            DiagramEventKind::Collapse22,
            DiagramEventKind::Expand22,
            DiagramEventKind::Collapse23,
            DiagramEventKind::Expand23,
            DiagramEventKind::Collapse33,
            DiagramEventKind::Expand33,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct DiagramEvent {
    pub time: f64,
    pub kind: DiagramEventKind,
    /// Sites involved in the changed feature.
    pub sites: Vec<usize>,
    pub detail: String,
    /// Time just past the event with fully expressed combinatorics.
    pub resume: f64,
    /// Set on the collapse half of an instantaneous flip, which is
    /// immediately followed by the matching expansion.
    pub paired_flip: bool,
}

impl DiagramEvent {
    /// The expansion half of an instantaneous flip event, if any: an edge
    /// flip is a collapse immediately followed by the matching expand.
    pub fn expansion_twin(&self) -> Option<DiagramEvent> {
        if !self.paired_flip {
            return None;
        }
        let (kind, detail) = match self.kind {
            DiagramEventKind::Collapse33 => (
                DiagramEventKind::Expand33,
                "edge flip: re-expansion with swapped adjacency".to_string(),
            ),
            DiagramEventKind::Collapse22 => (
                DiagramEventKind::Expand22,
                "adjacent transposition: re-expansion in swapped order".to_string(),
            ),
            _ => return None,
        };
        Some(DiagramEvent {
            time: self.time,
            kind,
            sites: self.sites.clone(),
            detail,
            resume: self.resume,
            paired_flip: false,
        })
    }
}

pub struct GvdKds {
    tri: Arc<Triangulation>,
    sites: Vec<SiteTrajectory>,
    t_ref: f64,
    /// Time of the last rebuild.
    pub time: f64,
    pub eps_time: f64,
    pub diagram: GeodesicVoronoiDiagram,
    /// Forest over polygon vertices (0..m) and site roots (m..m+n); each
    /// vertex hangs under its shortest-path-tree parent in the owning
    /// (nearest) site's map.
    pub forest: DynamicSpmForest,
    /// Current owner of each polygon vertex.
    pub owners: Vec<usize>,
}

impl GvdKds {
    pub fn new(
        tri: Arc<Triangulation>,
        sites: Vec<SiteTrajectory>,
        t0: f64,
        eps_time: f64,
    ) -> Result<Self> {
        let positions = site_positions(&tri, &sites, t0, t0)?;
        let diagram = build_gvd(&tri, &positions)?;
        let m = tri.polygon().len();
        let mut forest_positions: Vec<Point> = tri.polygon().vertices().to_vec();
        forest_positions.extend(&positions);
        let forest = DynamicSpmForest::new(forest_positions);
        let mut kds = GvdKds {
            tri,
            sites,
            t_ref: t0,
            time: t0,
            eps_time,
            diagram,
            forest,
            owners: vec![0; m],
        };
        kds.sync_forest();
        Ok(kds)
    }

    pub fn site_position(&self, i: usize, t: f64) -> Point {
        self.sites[i].pos0 + self.sites[i].vel * (t - self.t_ref)
    }

    pub fn fingerprint(&self) -> &GvdFingerprint {
        self.diagram.fingerprint()
    }

    /// Re-bases the forest on the current diagram: vertices whose owner or
    /// tree parent changed are transplanted by cut + link.
    fn sync_forest(&mut self) {
        let m = self.tri.polygon().len();
        let n = self.sites.len();
        for i in 0..n {
            self.forest
                .set_position(m + i, self.site_position(i, self.time));
        }
        let desired: Vec<(usize, usize)> = (0..m)
            .map(|v| {
                let owner = (0..n)
                    .min_by(|&a, &b| {
                        self.diagram.spms[a].adds[v]
                            .partial_cmp(&self.diagram.spms[b].adds[v])
                            .unwrap()
                    })
                    .unwrap();
                let parent = match self.diagram.spms[owner].parents[v] {
                    Anchor::Site => m + owner,
                    Anchor::Vertex(w) => w,
                };
                (owner, parent)
            })
            .collect();
        // Cut every stale vertex first so links never see leftover cycles.
        for v in 0..m {
            if self.forest.parent(v) != Some(desired[v].1) && self.forest.parent(v).is_some() {
                self.forest.cut(v).expect("non-root vertex");
            }
        }
        for v in 0..m {
            if self.forest.parent(v).is_none() {
                self.forest
                    .link(desired[v].1, v)
                    .expect("tree parents are acyclic");
            }
            self.owners[v] = desired[v].0;
        }
    }

    /// Fingerprint from a fresh build at t; momentary degenerate states map
    /// to None.
    pub fn probe(&self, t: f64) -> Result<Option<GvdFingerprint>> {
        let positions = site_positions(&self.tri, &self.sites, self.t_ref, t)?;
        match build_gvd(&self.tri, &positions) {
            Ok(d) => Ok(Some(d.fingerprint().clone())),
            Err(
                GeovorError::DegeneracyDetected(..)
                | GeovorError::DegenerateEquidistantVertex
                | GeovorError::DegenerateCollinearCocircular
                | GeovorError::DegenerateCocircularSites
                | GeovorError::IdenticalDistanceFields,
            ) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn diagram_at(&self, t: f64) -> Result<GeodesicVoronoiDiagram> {
        let positions = site_positions(&self.tri, &self.sites, self.t_ref, t)?;
        build_gvd(&self.tri, &positions)
    }

    fn spm_candidates(&self, now: f64, horizon: f64) -> Vec<f64> {
        let verts = self.tri.polygon().vertices();
        let mut ts = Vec::new();
        for i in 0..self.sites.len() {
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

    fn settle_past(&self, t: f64, horizon: f64) -> Result<(f64, GvdFingerprint)> {
        let next_candidate = self
            .spm_candidates(t + self.eps_time, horizon)
            .first()
            .copied()
            .unwrap_or(horizon);
        let mut delta_max =
            (0.45 * (t - self.time).min(next_candidate - t)).max(2.0 * self.eps_time);
        let mut delta = (4.0 * self.eps_time).max(1e-12).min(delta_max);
        loop {
            if let Some(fp) = self.probe(t + delta)? {
                return Ok((t + delta, fp));
            }
            if delta >= delta_max {
                // The degenerate window straddles the next SPM candidate time
                // (the event sits exactly on it); raise the cap past it.
                let ahead = self.spm_candidates(t + delta + self.eps_time, horizon);
                let beyond = ahead.get(1).copied().unwrap_or(horizon);
                let raised = (0.45 * (beyond - t)).max(2.0 * self.eps_time);
                if raised <= delta_max {
                    return Err(GeovorError::DegeneracyDetected(
                        t,
                        "no valid diagram past the detected change".into(),
                    ));
                }
                delta_max = raised;
            }
            delta = (delta * 4.0).min(delta_max);
        }
    }

    pub fn next_diagram_event(&self, horizon: f64) -> Result<Option<DiagramEvent>> {
        let mut now = self.time;
        for _ in 0..10_000 {
            let Some(t) = self.first_probe_change(now, horizon)? else {
                return Ok(None);
            };
            let (ta, after) = self.settle_past(t, horizon)?;
            if after != *self.fingerprint() {
                return Ok(Some(classify(self.fingerprint(), &after, t, ta)));
            }
            now = ta;
        }
        Err(GeovorError::DegeneracyDetected(
            now,
            "event detection failed to make progress".into(),
        ))
    }

    fn rebuild(&mut self, t: f64) -> Result<()> {
        let positions = site_positions(&self.tri, &self.sites, self.t_ref, t)?;
        self.diagram = build_gvd(&self.tri, &positions)?;
        self.time = t;
        self.sync_forest();
        Ok(())
    }

    pub fn handle_diagram_event(&mut self, ev: &DiagramEvent) -> Result<()> {
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
                    | GeovorError::DegenerateCocircularSites
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
}

fn site_positions(
    tri: &Triangulation,
    sites: &[SiteTrajectory],
    t_ref: f64,
    t: f64,
) -> Result<Vec<Point>> {
    let polygon = tri.polygon();
    let eps = 1e-12 * polygon.diameter().max(1.0);
    let mut out = Vec::with_capacity(sites.len());
    for (i, s) in sites.iter().enumerate() {
        let pos = s.pos0 + s.vel * (t - t_ref);
        if polygon.locate(pos, eps) != Location::Inside {
            return Err(GeovorError::SiteExitsPolygon(i, t));
        }
        out.push(pos);
    }
    Ok(out)
}

/// Triples of the degree-3 vertices recorded in a fingerprint.
fn triples(fp: &GvdFingerprint) -> BTreeSet<[usize; 3]> {
    let mut out = BTreeSet::new();
    for (_, intervals) in &fp.pairs {
        for iv in intervals {
            for tag in [&iv.start, &iv.end] {
                if let super::EndTag::Center(t) = tag {
                    out.insert(*t);
                }
            }
        }
    }
    out
}

/// Degree-2 tags per pair, flattened in chain order.
fn deg2_tags(fp: &GvdFingerprint) -> Vec<((usize, usize), Vec<(usize, usize)>)> {
    fp.pairs
        .iter()
        .map(|(p, ivs)| {
            (
                *p,
                ivs.iter().flat_map(|iv| iv.deg2.iter().copied()).collect(),
            )
        })
        .collect()
}

fn classify(before: &GvdFingerprint, after: &GvdFingerprint, t: f64, resume: f64) -> DiagramEvent {
    let (tb, ta) = (triples(before), triples(after));
    if tb != ta {
        let gained: Vec<[usize; 3]> = ta.difference(&tb).copied().collect();
        let lost: Vec<[usize; 3]> = tb.difference(&ta).copied().collect();
        let mut sites: BTreeSet<usize> = BTreeSet::new();
        for t3 in gained.iter().chain(&lost) {
            sites.extend(t3.iter().copied());
        }
        let sites: Vec<usize> = sites.into_iter().collect();
        let (kind, detail) = if gained.len() > lost.len() {
            (
                DiagramEventKind::Expand13,
                "center appears on the polygon boundary".to_string(),
            )
        } else if lost.len() > gained.len() {
            (
                DiagramEventKind::Collapse13,
                "center collides with the polygon boundary".to_string(),
            )
        } else {
            (
                DiagramEventKind::Collapse33,
                "edge flip: 3,3-collapse immediately followed by an expand".to_string(),
            )
        };
        let paired_flip = kind == DiagramEventKind::Collapse33;
        return DiagramEvent {
            time: t,
            kind,
            sites,
            detail,
            resume,
            paired_flip,
        };
    }

    let (d2b, d2a) = (deg2_tags(before), deg2_tags(after));
    if d2b != d2a {
        // Locate the changed pair.
        for (pb, pa) in d2b.iter().zip(&d2a) {
            if pb == pa {
                continue;
            }
            let pair = pb.0;
            let delta = pa.1.len() as isize - pb.1.len() as isize;
            let (kind, detail) = match delta {
                1 | -1 => {
                    // Adjacent to a boundary endpoint → 1,2; to a center → 2,3.
                    let (longer, ivs) = if delta == 1 {
                        (&pa.1, interval_of(after, pair))
                    } else {
                        (&pb.1, interval_of(before, pair))
                    };
                    let (shorter, _) = if delta == 1 {
                        (&pb.1, ())
                    } else {
                        (&pa.1, ())
                    };
                    let idx = first_divergence(shorter, longer);
                    let at_boundary = touches_boundary(&ivs, idx, longer.len());
                    match (delta, at_boundary) {
                        (1, true) => (
                            DiagramEventKind::Expand12,
                            "degree-2 vertex emerges from a boundary endpoint".to_string(),
                        ),
                        (1, false) => (
                            DiagramEventKind::Expand23,
                            "degree-2 vertex emerges from a center".to_string(),
                        ),
                        (_, true) => (
                            DiagramEventKind::Collapse12,
                            "degree-2 vertex vanishes into a boundary endpoint".to_string(),
                        ),
                        (_, false) => (
                            DiagramEventKind::Collapse23,
                            "degree-2 vertex vanishes into a center".to_string(),
                        ),
                    }
                }
                d if d >= 2 => (
                    DiagramEventKind::Expand22,
                    "two degree-2 vertices appear at an event point".to_string(),
                ),
                d if d <= -2 => (
                    DiagramEventKind::Collapse22,
                    "two degree-2 vertices merge at an event point".to_string(),
                ),
                _ => (
                    DiagramEventKind::Collapse22,
                    "adjacent transposition: 2,2-collapse immediately followed by an expand"
                        .to_string(),
                ),
            };
            let paired_flip = detail.starts_with("adjacent transposition");
            return DiagramEvent {
                time: t,
                kind,
                sites: vec![pair.0, pair.1],
                detail,
                resume,
                paired_flip,
            };
        }
    }

    // Structural change without vertex-count change: an SPM tree flip, a
    // boundary endpoint crossing a polygon vertex, or an endpoint-order swap.
    let detail = if before.spms != after.spms {
        "shortest path map structure change".to_string()
    } else if before.boundary_order != after.boundary_order {
        "boundary endpoint order or edge change".to_string()
    } else {
        "interval restructuring without vertex change".to_string()
    };
    let mut sites: BTreeSet<usize> = BTreeSet::new();
    for (i, (sb, sa)) in before.spms.iter().zip(&after.spms).enumerate() {
        if sb != sa {
            sites.insert(i);
        }
    }
    DiagramEvent {
        time: t,
        kind: DiagramEventKind::Vertex,
        sites: sites.into_iter().collect(),
        detail,
        resume,
        paired_flip: false,
    }
}

/// The interval list of one pair.
fn interval_of(fp: &GvdFingerprint, pair: (usize, usize)) -> Vec<super::IntervalFingerprint> {
    fp.pairs
        .iter()
        .find(|(p, _)| *p == pair)
        .map(|(_, ivs)| ivs.clone())
        .unwrap_or_default()
}

/// Index at which two tag lists first diverge.
fn first_divergence(short: &[(usize, usize)], long: &[(usize, usize)]) -> usize {
    let mut i = 0;
    while i < short.len() && short[i] == long[i] {
        i += 1;
    }
    i
}

/// Whether the flattened degree-2 index `idx` sits next to a boundary end of
/// its interval rather than a center end.
fn touches_boundary(ivs: &[super::IntervalFingerprint], idx: usize, total: usize) -> bool {
    let mut offset = 0;
    for iv in ivs {
        let len = iv.deg2.len();
        if idx <= offset + len {
            let at_front = idx == offset;
            let at_back = idx + 1 >= offset + len;
            let front_boundary = matches!(iv.start, super::EndTag::Boundary(_));
            let back_boundary = matches!(iv.end, super::EndTag::Boundary(_));
            return (at_front && front_boundary) || (at_back && back_boundary);
        }
        offset += len;
    }
    let _ = total;
    false
}

/// Runs a scenario to its horizon, returning the ordered event log and the
/// final diagram.
pub fn run_simulation(
    scenario: &Scenario,
    budget: usize,
    eps_time: f64,
) -> Result<(Vec<DiagramEvent>, GeodesicVoronoiDiagram)> {
    let tri = Arc::new(crate::geom::triangulate(&scenario.polygon)?);
    let (t0, t1) = scenario.time;
    let sites: Vec<SiteTrajectory> = scenario
        .sites
        .iter()
        .map(|s| SiteTrajectory {
            pos0: s.position_at(t0),
            vel: s.vel,
        })
        .collect();
    let mut kds = GvdKds::new(tri, sites, t0, eps_time)?;
    let mut log = Vec::new();
    while let Some(ev) = kds.next_diagram_event(t1)? {
        if log.len() >= budget {
            return Err(GeovorError::EventBudgetExceeded(budget));
        }
        kds.handle_diagram_event(&ev)?;
        let twin = ev.expansion_twin();
        log.push(ev);
        if let Some(twin) = twin {
            log.push(twin);
        }
    }
    Ok((log, kds.diagram))
}
