//! Property tests for shortest path maps on the polygon corpus: partition
//! area, distance agreement against the funnel, and kinetic soundness of the
//! event-driven maintenance against scratch rebuilds.

use geovor::geom::{geodesic_distance, triangulate, Location, Point, Polygon};
use geovor::scenarios::test_polygons;
use geovor::spm::{build_spm, KineticSpm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn random_interior(polygon: &Polygon, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let (lo, hi) = polygon.bounding_box();
    let eps = 1e-7 * polygon.diameter();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if polygon.locate(p, eps) == Location::Inside {
            out.push(p);
        }
    }
    out
}

#[test]
fn partition_and_distance_agreement_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (name, polygon) in test_polygons() {
        let tri = triangulate(&polygon).unwrap();
        let eps = 1e-9 * polygon.diameter();
        for site in random_interior(&polygon, 3, &mut rng) {
            let spm = build_spm(&tri, site).unwrap();
            let area_err = (spm.total_cell_area() - polygon.area()).abs() / polygon.area();
            assert!(area_err < 1e-6, "{name}: partition area error {area_err}");
            for x in random_interior(&polygon, 100, &mut rng) {
                let (_, d, _) = spm.locate(x, eps).unwrap();
                let oracle = geodesic_distance(&tri, site, x).unwrap();
                assert!(
                    (d - oracle).abs() <= 1e-7 * polygon.diameter(),
                    "{name}: spm {d} vs funnel {oracle} at {x:?}, site {site:?}"
                );
            }
        }
    }
}

#[test]
fn kinetic_spm_matches_scratch_rebuild() {
    // Drive a site across the L-shape and the comb; between consecutive
    // events the maintained SPM must be combinatorially identical to a
    // scratch rebuild at random intermediate times.
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let cases = [
        ("l_shape", geovor::scenarios::polygons::l_shape(), Point::new(3.0, 0.5), Point::new(-1.0, 0.0), 2.4),
        ("u_shape", geovor::scenarios::polygons::u_shape(), Point::new(1.0, 1.0), Point::new(1.6, 0.2), 2.5),
        ("comb", geovor::scenarios::polygons::comb(), Point::new(0.5, 0.5), Point::new(2.0, 0.05), 3.0),
    ];
    for (name, polygon, pos0, vel, horizon) in cases {
        let tri = Arc::new(triangulate(&polygon).unwrap());
        let mut kin = KineticSpm::new(tri, pos0, vel, 0.0, 1e-9).unwrap();
        let mut events = Vec::new();
        while let Some(ev) = kin.next_event(horizon).unwrap() {
            // Check agreement at random times inside the previous interval.
            for _ in 0..20 {
                let t = rng.gen_range(kin.time..ev.time - 1e-7);
                let scratch = kin.rebuild_at(t).unwrap().fingerprint();
                assert_eq!(kin.spm.fingerprint(), scratch, "{name}: mismatch at t={t}");
            }
            kin.advance(&ev).unwrap();
            events.push(ev.time);
            assert!(events.len() < 200, "{name}: runaway event stream");
        }
        for _ in 0..20 {
            let t = rng.gen_range(kin.time..horizon);
            let scratch = kin.rebuild_at(t).unwrap().fingerprint();
            assert_eq!(kin.spm.fingerprint(), scratch, "{name}: tail mismatch at t={t}");
        }
        assert!(
            events.windows(2).all(|w| w[0] <= w[1]),
            "{name}: event times not sorted"
        );
        assert!(!events.is_empty(), "{name}: expected at least one event");
    }
}
