//! Deterministic generators for the stress constructions: polygons whose
//! reflex chains force many kinetic events, with sites on tuned linear
//! trajectories. Chain curvatures, speeds and separations are exposed as
//! constants chosen so that the intended event pattern is realized.

use super::{Scenario, Site};
use crate::error::{GeovorError, Result};
use crate::geom::{Point, Polygon};

/// `count` points on the circular arc of `radius` around `center`, sweeping
/// from angle `a0` to `a1` (degrees), endpoints included.
fn arc(center: Point, radius: f64, a0: f64, a1: f64, count: usize) -> Vec<Point> {
    assert!(count >= 2);
    (0..count)
        .map(|k| {
            let a = (a0 + (a1 - a0) * k as f64 / (count - 1) as f64).to_radians();
            center + Point::new(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

fn poly(pts: Vec<Point>) -> Result<Polygon> {
    Polygon::new(pts).map_err(|e| {
        GeovorError::InvalidScenario(format!("generator produced an invalid polygon: {e}"))
    })
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(GeovorError::InvalidScenario(what.to_string()))
    }
}

/// Two sites in two floor wells of a chamber. The inner well lips are reflex
/// chains of `m_chain` vertices each whose extension fans cross in the middle
/// of the chamber, forming a quadratic grid of event points; the outer lips
/// carry the alternation chains. Both sites drift right, so the bisector
/// sweeps across the grid and its degree-2 vertices collide repeatedly.
pub fn gen_wineglass(m_chain: usize) -> Result<Scenario> {
    require(m_chain >= 2, "gen_wineglass requires m_chain >= 2")?;
    let polygon = wineglass_polygon(m_chain)?;
    let sites = vec![
        Site::new("p", Point::new(-2.6, 0.5), Point::new(1.0, 0.0)),
        Site::new("q", Point::new(1.5, 0.5), Point::new(1.0, 0.0)),
    ];
    Scenario::new(polygon, sites, (0.0, 1.25))
}

fn wineglass_polygon(m_chain: usize) -> Result<Polygon> {
    let (w, h, floor) = (4.0, 9.0, 2.0); // chamber half-width, top, floor
    let mut pts: Vec<Point> = vec![
        Point::new(w, floor),
        Point::new(w, h),
        Point::new(-w, h),
        Point::new(-w, floor),
    ];
    pts.extend(wineglass_wells(m_chain, floor));
    poly(pts)
}

/// Angular span (degrees) of the inner lip chains of the wells.
const LIP_SPAN_DEG: f64 = 30.0;

/// Angular span (degrees) of the right inner lip in the mirrored-glasses
/// polygon. Much wider than [`LIP_SPAN_DEG`] so that both the tangent from
/// the right sites and the tangent towards the central band touch the chain
/// strictly in its interior for the whole motion.
const MIRROR_LIP_SPAN_DEG: f64 = 70.0;

/// Boundary chain of the two wells, traversed left to right: it starts and
/// ends at floor level (just inside x = ±4) and dips to y = floor − 2.
fn wineglass_wells(m_chain: usize, floor: f64) -> Vec<Point> {
    wineglass_wells_custom(m_chain, floor, LIP_SPAN_DEG, 0.0)
}

/// Same chain with the right inner lip inscribed in a `right_span`-degree arc
/// of its carrier circle, with its vertices advanced by `right_phase` chain
/// steps along the arc. The arc itself (and hence the chain's neighbours in
/// the polygon) is independent of the phase, so two chains that differ only
/// in phase agree everywhere except in where their vertices sample the arc.
fn wineglass_wells_custom(
    m_chain: usize,
    floor: f64,
    right_span: f64,
    right_phase: f64,
) -> Vec<Point> {
    let m = m_chain;
    let r_in = 0.5; // upper (inner lip) chain radius
    let r_out = 0.4; // lower (outer lip) alternation chain radius
    let m_low = 4; // alternation chains have a fixed vertex count
    // Narrow angular span near 90 degrees: all extensions leave the lip
    // nearly horizontally, so the two fans cross in a band around x = 0
    // that the bisector sweeps entirely.
    let span = LIP_SPAN_DEG;
    let base = floor - 2.0;

    // Left well outer lip (alternation chain): tangent turns from +x to -y.
    let mut pts = arc(
        Point::new(-3.0 - r_out, floor - r_out),
        r_out,
        90.0,
        0.0,
        m_low,
    );
    pts.push(Point::new(-3.0, base));
    pts.push(Point::new(-1.0, base));
    // Left well inner lip (upper chain): wall joins the arc below the floor.
    pts.push(Point::new(-1.0, floor - r_in));
    pts.extend(arc(
        Point::new(-1.0 + r_in, floor - r_in),
        r_in,
        90.0 + span,
        90.0,
        m,
    ));
    // Right well inner lip, phase-offset by half a step against the left one.
    let right_lip: Vec<Point> = (0..m)
        .map(|k| {
            let a = (90.0 - right_span * (k as f64 + 0.5 + right_phase) / m as f64).to_radians();
            Point::new(1.0 - r_in, floor - r_in) + Point::new(r_in * a.cos(), r_in * a.sin())
        })
        .collect();
    pts.extend(right_lip);
    pts.push(Point::new(1.0, floor - r_in));
    pts.push(Point::new(1.0, base));
    pts.push(Point::new(3.0, base));
    // Right well outer lip.
    pts.extend(arc(
        Point::new(3.0 + r_out, floor - r_out),
        r_out,
        180.0,
        90.0,
        m_low,
    ));
    pts
}

/// Two static sites mirrored across the chamber's two wells, plus a third
/// site descending through the chamber above them. The three-way center
/// rides the near-vertical bisector of the static pair downward through both
/// extension fans, so its geodesic paths gain and lose chain vertices once
/// per fan segment crossed.
pub fn gen_center_swing(m_chain: usize) -> Result<Scenario> {
    require(m_chain >= 2, "gen_center_swing requires m_chain >= 2")?;
    let polygon = wineglass_polygon(m_chain)?;
    let sites = vec![
        Site::new("p", Point::new(-2.0, 0.5), Point::new(0.0, 0.0)),
        Site::new("q", Point::new(2.0, 0.5), Point::new(0.0, 0.0)),
        Site::new("s", Point::new(0.0, 8.0), Point::new(0.0, -3.2)),
    ];
    Scenario::new(polygon, sites, (0.0, 1.0))
}

/// A wide pit whose floor carries `m` T-shaped teeth, with `n/2` site pairs
/// stacked above them, all drifting right. Each pair's bisector foot sweeps
/// across every tooth, crossing its eight corners in turn, so the boundary
/// endpoints generate Θ(mn) vertex and 1,2-events.
pub fn gen_pit_tshapes(m_teeth: usize, n_sites: usize) -> Result<Scenario> {
    require(m_teeth >= 1, "gen_pit_tshapes requires m_teeth >= 1")?;
    require(
        n_sites >= 2 && n_sites % 2 == 0,
        "gen_pit_tshapes requires an even n_sites >= 2",
    )?;
    let (m, pairs) = (m_teeth, n_sites / 2);
    let w = 10.0;
    let h = 3.0 + 0.8 * pairs as f64;
    let u = 8.0 / (2 * m + 1) as f64; // tooth pitch within x in [1, 9]
    let (h1, h2) = (0.5, 0.8); // stem and cap heights

    let mut pts = vec![Point::new(0.0, 0.0)];
    for k in 0..m {
        let a = 1.0 + u * (2 * k + 1) as f64;
        let (s0, s1) = (a + 0.25 * u, a + 0.75 * u); // stem sides
        let (c0, c1) = (a + 0.05 * u, a + 0.95 * u); // cap sides
        pts.extend([
            Point::new(s0, 0.0),
            Point::new(s0, h1),
            Point::new(c0, h1),
            Point::new(c0, h2),
            Point::new(c1, h2),
            Point::new(c1, h1),
            Point::new(s1, h1),
            Point::new(s1, 0.0),
        ]);
    }
    pts.extend([
        Point::new(w, 0.0),
        Point::new(w, h),
        Point::new(0.0, h),
    ]);
    let polygon = poly(pts)?;

    let mut sites = Vec::new();
    for i in 0..pairs {
        let y = 2.0 + 0.8 * i as f64;
        // Stagger the pairs horizontally and in width: perfectly stacked
        // pairs would be co-circular.
        let x = 1.0 + 0.13 * i as f64;
        let sep = 0.9 + 0.07 * i as f64;
        sites.push(Site::new(
            format!("p{i}"),
            Point::new(x, y),
            Point::new(3.5, 0.0),
        ));
        sites.push(Site::new(
            format!("q{i}"),
            Point::new(x + sep, y),
            Point::new(3.5, 0.0),
        ));
    }
    Scenario::new(polygon, sites, (0.0, 2.0))
}

/// Which degenerate collision the spike pit is tuned to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikeVariant {
    /// Voronoi vertices repeatedly hit the boundary at the floor spikes.
    Deg13,
    /// Voronoi vertices repeatedly collide pairwise over a flat floor.
    Deg33,
}

/// A box whose floor carries `m` spikes (for [`SpikeVariant::Deg13`]) or
/// whose ceiling carries `m` bumps (for [`SpikeVariant::Deg33`]), with one
/// diagonally drifting pair and `n - 2` static sites. For `Deg13` the pair's
/// Voronoi vertex with each static site dips across the spike tips; for
/// `Deg33` the pair's sweeping bisector flips the adjacency between
/// consecutive static sites.
pub fn gen_pit_spikes(m_spikes: usize, n_sites: usize, variant: SpikeVariant) -> Result<Scenario> {
    require(m_spikes >= 2, "gen_pit_spikes requires m_spikes >= 2")?;
    require(n_sites >= 3, "gen_pit_spikes requires n_sites >= 3")?;
    let (w, h) = (10.0, 6.0);
    let m = m_spikes;
    let statics = n_sites - 2;

    let mut pts = vec![Point::new(0.0, 0.0)];
    match variant {
        SpikeVariant::Deg13 => {
            // Tall floor spikes across x in [2, 8]; the static sites sit in
            // the gaps, so their Voronoi vertices with the pair live below
            // the tips and die on a flank whenever the pair's bisector foot
            // passes from one gap to the next.
            let u = 6.0 / m as f64;
            for k in 0..m {
                let a = 2.0 + u * k as f64;
                pts.extend([
                    Point::new(a + 0.15 * u, 0.0),
                    Point::new(a + 0.5 * u, 2.8),
                    Point::new(a + 0.85 * u, 0.0),
                ]);
            }
            pts.extend([Point::new(w, 0.0), Point::new(w, h)]);
            pts.push(Point::new(0.0, h));
        }
        SpikeVariant::Deg33 => {
            // Flat floor; shallow ceiling bumps keep the map complexity
            // growing with m without touching the vertex trajectories.
            pts.extend([Point::new(w, 0.0), Point::new(w, h)]);
            let u = 6.0 / m as f64;
            for k in (0..m).rev() {
                let a = 2.0 + u * k as f64;
                pts.extend([
                    Point::new(a + 0.8 * u, h),
                    Point::new(a + 0.5 * u, h - 0.4),
                    Point::new(a + 0.2 * u, h),
                ]);
            }
            pts.push(Point::new(0.0, h));
        }
    }
    let polygon = poly(pts)?;

    let mut sites = Vec::new();
    match variant {
        SpikeVariant::Deg13 => {
            sites.push(Site::new("p", Point::new(1.4, 4.5), Point::new(2.5, 0.0)));
            sites.push(Site::new("q", Point::new(2.3, 4.5), Point::new(2.5, 0.0)));
            // One static per inter-spike gap, wrapping into a second layer
            // when there are more statics than gaps.
            let gaps = m.max(2) - 1;
            let u = 6.0 / m as f64;
            for j in 0..statics {
                let (gap, layer) = (j % gaps, j / gaps);
                sites.push(Site::new(
                    format!("r{j}"),
                    Point::new(2.0 + u * (gap + 1) as f64, 0.5 + 0.6 * layer as f64),
                    Point::new(0.0, 0.0),
                ));
            }
        }
        SpikeVariant::Deg33 => {
            sites.push(Site::new("p", Point::new(1.0, 4.0), Point::new(2.5, 0.0)));
            sites.push(Site::new("q", Point::new(1.9, 4.0), Point::new(2.5, 0.0)));
            let du = 6.0 / statics as f64;
            for j in 0..statics {
                sites.push(Site::new(
                    format!("r{j}"),
                    Point::new(2.0 + du * j as f64, 1.0 + 0.11 * j as f64),
                    Point::new(0.0, 0.0),
                ));
            }
        }
    }
    // The Deg13 window opens just before the first Voronoi vertex reaches a
    // spike flank, so the boundary collision family leads the log.
    let t0 = match variant {
        SpikeVariant::Deg13 => 0.215,
        SpikeVariant::Deg33 => 0.0,
    };
    Scenario::new(polygon, sites, (t0, 2.0))
}

/// A box split by a ceiling-mounted wall whose bottom corner is an
/// `m`-vertex reflex chain. `n - 1` static sites sit in a column at the left
/// wall; their adjacent horizontal bisectors cross the chain's extension fan
/// in the upper-left quadrant, forming the event grid. One site drops just
/// right of the wall: its geodesics into the upper-left wrap the chain, so
/// as its growing cell sweeps the grid each triple point crosses one
/// extension segment per chain vertex, emitting a 2,3-event per crossing.
pub fn gen_grid_sweep(m_chain: usize, n_sites: usize) -> Result<Scenario> {
    require(m_chain >= 2, "gen_grid_sweep requires m_chain >= 2")?;
    require(n_sites >= 2, "gen_grid_sweep requires n_sites >= 2")?;
    let (w, h) = (10.0, 8.0);
    let r = 0.35;
    // Wall at x in [4.8, 5.2] hanging from the ceiling down to y = 4; the
    // bottom-left corner is replaced by a chain bulging into the passage.
    // The chain arc ends exactly at (4.8, 4 + r), closing the wall's left
    // side.
    let mut pts = vec![
        Point::new(0.0, 0.0),
        Point::new(w, 0.0),
        Point::new(w, h),
        Point::new(5.2, h),
        Point::new(5.2, 4.0),
    ];
    pts.extend(arc(
        Point::new(4.8 + r, 4.0 + r),
        r,
        270.0,
        180.0,
        m_chain,
    ));
    pts.extend([Point::new(4.8, h), Point::new(0.0, h)]);
    let polygon = poly(pts)?;

    let mut sites = Vec::new();
    let statics = n_sites - 1;
    for j in 0..statics {
        // A column hugging the left wall: each adjacent pair's bisector is a
        // horizontal line running right through the extension fan.
        let y = if statics > 1 {
            4.6 + 2.6 * j as f64 / (statics - 1) as f64
        } else {
            6.0
        };
        sites.push(Site::new(
            format!("r{j}"),
            Point::new(0.6, y),
            Point::new(0.0, 0.0),
        ));
    }
    // The dropped site starts high, fully screened from the upper-left by
    // the wall, and ends low enough that its wrapped paths undercut the
    // column throughout the fan.
    sites.push(Site::new("s", Point::new(5.5, 7.6), Point::new(0.0, -3.0)));
    Scenario::new(polygon, sites, (0.0, 2.0))
}

/// Two wineglasses mirrored across a thin shared slab, with all four sites
/// exactly mirrored and drifting right together. The left halves stay exact
/// mirror images, so the left pair's bisector is the horizontal mid-line and
/// its diagram endpoint sweeps the central band. The two right lips sample
/// the same mirrored carrier arc with vertices staggered by half a chain
/// step, so the smooth parts of the two right distance functions cancel
/// exactly and only their interleaved chain-versus-arc sampling errors
/// remain: the nearer of the two right sites alternates as the tangent
/// vertices advance, and each alternation the sweeping endpoint crosses
/// flips the central diagram edge in a 3,3-event pair.
pub fn gen_mirrored_wineglasses(m_chain: usize, n_sites: usize) -> Result<Scenario> {
    require(m_chain >= 2, "gen_mirrored_wineglasses requires m_chain >= 2")?;
    require(n_sites >= 4, "gen_mirrored_wineglasses requires n_sites >= 4")?;
    let polygon = mirrored_glasses_polygon(m_chain, 0.5)?;
    let top = MIRROR_AXIS * 2.0;
    let sites = vec![
        Site::new("a", Point::new(-2.6, 0.5), Point::new(1.0, 0.0)),
        Site::new("b", Point::new(1.5, 0.5), Point::new(1.0, 0.0)),
        Site::new("a'", Point::new(-2.6, top - 0.5), Point::new(1.0, 0.0)),
        Site::new("b'", Point::new(1.5, top - 0.5), Point::new(1.0, 0.0)),
    ];
    // Stop before the right sites gain straight-line sight of the slab:
    // past that the exactly mirrored quadruple is continuously co-circular.
    Scenario::new(polygon, sites, (0.0, 0.8))
}

/// Height of the mirror axis of [`mirrored_glasses_polygon`].
pub const MIRROR_AXIS: f64 = 2.4;

/// The mirrored-glasses polygon: bottom wells at y in [0, 2], a slab up to
/// y = 2.8, and the mirror image of the wells above. Both right inner lips
/// are inscribed in the same (mirrored) wide circular arc; `perturb` is the
/// phase stagger between their vertices in chain steps, split evenly between
/// the two halves. 0 gives the exact mirror image; 0.5 interleaves the two
/// vertex sets halfway.
pub fn mirrored_glasses_polygon(m_chain: usize, perturb: f64) -> Result<Polygon> {
    let floor = 2.0;
    let top = 2.0 * MIRROR_AXIS - floor;
    let bottom = wineglass_wells_custom(m_chain, floor, MIRROR_LIP_SPAN_DEG, -0.5 * perturb);
    let mirrored = wineglass_wells_custom(m_chain, floor, MIRROR_LIP_SPAN_DEG, 0.5 * perturb);
    let mut pts = vec![Point::new(-4.0, floor)];
    pts.extend(bottom.iter().copied());
    pts.extend([Point::new(4.0, floor), Point::new(4.0, top)]);
    pts.extend(
        mirrored
            .iter()
            .rev()
            .map(|p| Point::new(p.x, 2.0 * MIRROR_AXIS - p.y)),
    );
    pts.push(Point::new(-4.0, top));
    poly(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wineglass_rejects_degenerate_chain() {
        assert!(gen_wineglass(1).is_err());
    }

    #[test]
    fn wineglass_is_valid_for_all_sizes() {
        for m in [2, 4, 8, 16] {
            let sc = gen_wineglass(m).unwrap();
            assert_eq!(sc.sites.len(), 2);
            assert!(sc.polygon.len() >= 2 * m + 10);
        }
    }

    #[test]
    fn all_generators_valid_at_small_sizes() {
        for m in [2, 4] {
            assert_eq!(gen_center_swing(m).unwrap().sites.len(), 3);
            assert_eq!(gen_pit_tshapes(m, 4).unwrap().sites.len(), 4);
            assert_eq!(
                gen_pit_spikes(m, 4, SpikeVariant::Deg13).unwrap().sites.len(),
                4
            );
            assert_eq!(
                gen_pit_spikes(m, 4, SpikeVariant::Deg33).unwrap().sites.len(),
                4
            );
            assert_eq!(gen_grid_sweep(m, 3).unwrap().sites.len(), 3);
            assert_eq!(gen_mirrored_wineglasses(m, 4).unwrap().sites.len(), 4);
        }
    }

    #[test]
    fn polygon_size_grows_with_m() {
        for (a, b) in [(2usize, 4usize), (4, 8)] {
            assert!(wineglass_polygon(b).unwrap().len() > wineglass_polygon(a).unwrap().len());
            assert!(
                gen_pit_tshapes(b, 2).unwrap().polygon.len()
                    > gen_pit_tshapes(a, 2).unwrap().polygon.len()
            );
            assert!(
                gen_pit_spikes(b, 3, SpikeVariant::Deg13).unwrap().polygon.len()
                    > gen_pit_spikes(a, 3, SpikeVariant::Deg13).unwrap().polygon.len()
            );
            assert!(
                gen_grid_sweep(b, 2).unwrap().polygon.len()
                    > gen_grid_sweep(a, 2).unwrap().polygon.len()
            );
            assert!(
                mirrored_glasses_polygon(b, 0.03).unwrap().len()
                    > mirrored_glasses_polygon(a, 0.03).unwrap().len()
            );
        }
    }

    #[test]
    fn preconditions_rejected() {
        assert!(gen_center_swing(1).is_err());
        assert!(gen_pit_tshapes(0, 2).is_err());
        assert!(gen_pit_tshapes(2, 3).is_err()); // odd site count
        assert!(gen_pit_spikes(1, 3, SpikeVariant::Deg13).is_err());
        assert!(gen_pit_spikes(2, 2, SpikeVariant::Deg33).is_err());
        assert!(gen_grid_sweep(1, 2).is_err());
        assert!(gen_mirrored_wineglasses(2, 3).is_err());
    }

    /// The spike pit opens its window just before the pair's Voronoi vertex
    /// with a static site reaches a spike flank: the first event is a
    /// 1,3-event whose time the bisection oracle confirms.
    #[test]
    fn spikes13_first_event_is_a_13_event_matching_oracle() {
        use crate::center::SiteTrajectory;
        use crate::geom::triangulate;
        use crate::gvd::{DiagramEventKind, GvdKds};
        use std::sync::Arc;

        let sc = gen_pit_spikes(8, 3, SpikeVariant::Deg13).unwrap();
        let t0 = sc.time.0;
        let horizon = t0 + 0.02;
        let tri = Arc::new(triangulate(&sc.polygon).unwrap());
        let sites: Vec<SiteTrajectory> = sc
            .sites
            .iter()
            .map(|s| SiteTrajectory {
                pos0: s.position_at(t0),
                vel: s.vel,
            })
            .collect();
        let kds = GvdKds::new(tri, sites, t0, 1e-9).unwrap();
        let ev = kds.next_diagram_event(horizon).unwrap().unwrap();
        assert!(
            matches!(
                ev.kind,
                DiagramEventKind::Collapse13 | DiagramEventKind::Expand13
            ),
            "{ev:?}"
        );
        let oracle = crate::oracle::detect_events_by_bisection(
            |t| kds.probe(t),
            t0,
            horizon,
            64,
            1e-9,
        )
        .unwrap();
        assert!(
            oracle.iter().any(|&t| (t - ev.time).abs() < 1e-6),
            "first event at {} unconfirmed by oracle {oracle:?}",
            ev.time
        );
    }

    /// With zero perturbation and an exactly mirrored pair, the bisector is
    /// the mirror axis itself.
    #[test]
    fn mirrored_unperturbed_pair_bisector_is_horizontal() {
        use crate::bisector::build_bisector;
        use crate::geom::triangulate;
        use crate::spm::build_spm;

        let polygon = mirrored_glasses_polygon(4, 0.0).unwrap();
        let tri = triangulate(&polygon).unwrap();
        let a = Point::new(-2.6, 0.5);
        let a_mirror = Point::new(-2.6, 2.0 * MIRROR_AXIS - 0.5);
        let spm_a = build_spm(&tri, a).unwrap();
        let spm_m = build_spm(&tri, a_mirror).unwrap();
        let bis = build_bisector(&tri, &spm_a, &spm_m).unwrap();
        assert!(!bis.arcs.is_empty());
        for ba in &bis.arcs {
            for p in ba.arc.samples(16) {
                assert!(
                    (p.y - MIRROR_AXIS).abs() < 1e-9,
                    "bisector leaves the mirror axis at {p:?}"
                );
            }
        }
    }

    /// Counts sign changes of d(b, x) − d(b', x) at the point of the mirror
    /// line where the left site stops being nearest, sampled over the
    /// scenario window: the per-sweep alternation count behind the mirrored
    /// generator's 3,3-events.
    fn mirrored_alternations(m_chain: usize, samples: usize) -> usize {
        use crate::geom::geodesic_distance;

        let sc = gen_mirrored_wineglasses(m_chain, 4).unwrap();
        let tri = crate::geom::triangulate(&sc.polygon).unwrap();
        let d = |s: Point, x: f64| geodesic_distance(&tri, s, Point::new(x, MIRROR_AXIS)).unwrap();
        let (t0, t1) = sc.time;
        let mut crossings = 0usize;
        let mut prev_sign = 0i32;
        for k in 0..=samples {
            let t = t0 + (t1 - t0) * k as f64 / samples as f64;
            let pos = sc.site_positions(t);
            let (a, b, bp) = (pos[0], pos[1], pos[3]);
            let g = |x: f64| d(a, x) - d(b, x).min(d(bp, x));
            let (mut lo, mut hi) = (-2.0, 2.0);
            if g(lo) > 0.0 || g(hi) < 0.0 {
                prev_sign = 0;
                continue;
            }
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if g(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let diff = d(b, 0.5 * (lo + hi)) - d(bp, 0.5 * (lo + hi));
            let s = if diff > 0.0 { 1 } else { -1 };
            if prev_sign != 0 && s != prev_sign {
                crossings += 1;
            }
            prev_sign = s;
        }
        crossings
    }

    /// The nearer of the two right sites must alternate along the swept
    /// segment, more often for finer chains. (Full-simulation 3,3-event
    /// counts, measured once with the event log: 2, 4, 10 for m = 2, 4, 8.)
    #[test]
    fn mirrored_right_site_alternation_grows_with_m() {
        let c4 = mirrored_alternations(4, 160);
        let c8 = mirrored_alternations(8, 160);
        assert!(c4 >= 1, "no alternation at m=4");
        assert!(c8 > c4, "alternations m=8 ({c8}) <= m=4 ({c4})");
    }
}

#[cfg(test)]
mod tuning {
    use super::*;
    use crate::bisector::{BisectorKds, Mode};
    use crate::geom::triangulate;
    use std::sync::Arc;

    fn gvd_counts(label: &str, sc: &Scenario) {
        let t0 = std::time::Instant::now();
        match crate::gvd::kds::run_simulation(sc, 100_000, 1e-9) {
            Ok((log, _)) => {
                let mut counts = std::collections::BTreeMap::new();
                for ev in &log {
                    *counts.entry(ev.kind.name()).or_insert(0usize) += 1;
                }
                println!(
                    "{label}: events = {}, {counts:?}, elapsed = {:.1?}",
                    log.len(),
                    t0.elapsed()
                );
            }
            Err(e) => println!("{label}: error {e:?} after {:.1?}", t0.elapsed()),
        }
    }

    #[test]
    #[ignore]
    fn measure_pit_tshapes_counts() {
        for (m, n) in [(1, 2), (2, 2), (4, 2), (2, 4), (4, 4)] {
            gvd_counts(
                &format!("tshapes m={m} n={n}"),
                &gen_pit_tshapes(m, n).unwrap(),
            );
        }
    }

    #[test]
    #[ignore]
    fn measure_pit_spikes_counts() {
        for (m, n) in [(2, 3), (4, 3), (8, 3)] {
            gvd_counts(
                &format!("spikes13 m={m} n={n}"),
                &gen_pit_spikes(m, n, SpikeVariant::Deg13).unwrap(),
            );
        }
        for (m, n) in [(2, 4), (2, 6), (4, 6)] {
            gvd_counts(
                &format!("spikes33 m={m} n={n}"),
                &gen_pit_spikes(m, n, SpikeVariant::Deg33).unwrap(),
            );
        }
    }

    #[test]
    #[ignore]
    fn measure_grid_sweep_counts() {
        for (m, n) in [(2, 2), (4, 2), (4, 3), (8, 3)] {
            gvd_counts(
                &format!("gridsweep m={m} n={n}"),
                &gen_grid_sweep(m, n).unwrap(),
            );
        }
    }

    #[test]
    #[ignore]
    fn measure_mirrored_counts() {
        for m in [2usize, 4, 8] {
            gvd_counts(
                &format!("mirrored m={m}"),
                &gen_mirrored_wineglasses(m, 4).unwrap(),
            );
        }
    }

    #[test]
    #[ignore]
    fn measure_center_swing_counts() {
        for m in [2usize, 4, 8] {
            let t0 = std::time::Instant::now();
            let sc = gen_center_swing(m).unwrap();
            let tri = Arc::new(triangulate(&sc.polygon).unwrap());
            let st = |i: usize| crate::center::SiteTrajectory {
                pos0: sc.sites[i].pos,
                vel: sc.sites[i].vel,
            };
            let mut tracker = crate::center::VoronoiCenterTracker::new(
                tri,
                [st(0), st(1), st(2)],
                sc.time.0,
                1e-9,
                1e-9,
            )
            .unwrap();
            match tracker.trace_center(sc.time.0, sc.time.1, 10_000) {
                Ok(trace) => {
                    let mut counts = std::collections::BTreeMap::new();
                    for ev in &trace.events {
                        *counts.entry(format!("{:?}", ev.kind)).or_insert(0usize) += 1;
                    }
                    println!(
                        "m={m}: events = {}, {counts:?}, elapsed = {:.1?}",
                        trace.events.len(),
                        t0.elapsed()
                    );
                }
                Err(e) => println!("m={m}: trace error {e:?}"),
            }
        }
    }

    #[test]
    #[ignore]
    fn measure_wineglass_counts() {
        for m in [2usize, 4, 8, 16] {
            let t0 = std::time::Instant::now();
            let sc = gen_wineglass(m).unwrap();
            let tri = Arc::new(triangulate(&sc.polygon).unwrap());
            let mut k = BisectorKds::new(
                tri,
                sc.sites[0].pos,
                sc.sites[0].vel,
                sc.sites[1].pos,
                sc.sites[1].vel,
                sc.time.0,
                Mode::Naive,
                1e-9,
            )
            .unwrap();
            let mut counts = std::collections::BTreeMap::new();
            loop {
                match k.next_bisector_event(sc.time.1) {
                    Ok(Some(ev)) => {
                        *counts.entry(format!("{:?}", ev.kind)).or_insert(0usize) += 1;
                        if let Err(e) = k.handle_bisector_event(&ev) {
                            println!("m={m}: handle error {e:?}");
                            break;
                        }
                    }
                    Ok(None) => break,
                    Err(e) => {
                        println!("m={m}: detect error {e:?}");
                        break;
                    }
                }
            }
            let c22 = counts.get("Collapse22").copied().unwrap_or(0)
                + counts.get("Expand22").copied().unwrap_or(0);
            println!(
                "m={m}: 2,2 = {c22}, all = {counts:?}, elapsed = {:.1?}",
                t0.elapsed()
            );
        }
    }

    /// Proxy for the mirrored 3,3-flip count: sweep the junction of the left
    /// pair's horizontal bisector with the right cells and count sign changes
    /// of the right-pair distance difference there.
    #[test]
    #[ignore]
    fn search_mirrored_split() {
        use crate::geom::geodesic_distance;

        let top = 2.0 * MIRROR_AXIS;
        for m in [4usize, 8, 16] {
            let polygon = mirrored_glasses_polygon(m, 0.5).unwrap();
            let tri = crate::geom::triangulate(&polygon).unwrap();
            let d =
                |s: Point, x: f64| geodesic_distance(&tri, s, Point::new(x, MIRROR_AXIS)).unwrap();
            let mut crossings = 0usize;
            let mut prev_sign = 0i32;
            let n = 400;
            for k in 0..=n {
                let t = 0.8 * k as f64 / n as f64;
                let a = Point::new(-2.6 + t, 0.5);
                let b = Point::new(1.5 + t, 0.5);
                let bp = Point::new(1.5 + t, top - 0.5);
                // x_u: the junction where the left site stops being
                // nearest along the mirror line.
                let g = |x: f64| d(a, x) - d(b, x).min(d(bp, x));
                let (mut lo, mut hi) = (-2.0, 2.0);
                if g(lo) > 0.0 || g(hi) < 0.0 {
                    prev_sign = 0;
                    continue;
                }
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) <= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let xu = 0.5 * (lo + hi);
                let diff = d(b, xu) - d(bp, xu);
                if k % 25 == 0 {
                    println!("  m={m} t={t:.3} xu={xu:.3} diff={diff:+.3e}");
                }
                let s = if diff > 0.0 { 1 } else { -1 };
                if prev_sign != 0 && s != prev_sign {
                    crossings += 1;
                }
                prev_sign = s;
            }
            println!("m={m}: crossings={crossings}");
        }
    }
}
