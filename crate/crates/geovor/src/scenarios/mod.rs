//! Scenario model (polygon + linearly moving sites + time window), file I/O,
//! deterministic generators for the stress constructions, and a fixed corpus
//! of test polygons.

pub mod generators;
pub mod polygons;

use crate::error::{GeovorError, Result};
use crate::geom::polygon::dist_segment_segment;
use crate::geom::{Location, Point, Polygon};
use serde::{Deserialize, Serialize};

pub use polygons::test_polygons;

/// A point site moving with constant velocity.
#[derive(Debug, Clone)]
pub struct Site {
    pub id: String,
    pub pos: Point,
    pub vel: Point,
}

impl Site {
    pub fn new(id: impl Into<String>, pos: Point, vel: Point) -> Self {
        Site {
            id: id.into(),
            pos,
            vel,
        }
    }

    pub fn position_at(&self, t: f64) -> Point {
        self.pos + self.vel * t
    }
}

/// A validated simulation input: static polygon, moving sites, time window.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub polygon: Polygon,
    pub sites: Vec<Site>,
    pub time: (f64, f64),
}

impl Scenario {
    /// Builds and validates: the time window is proper, site ids are unique,
    /// sites are pairwise distinct at t0, and every site path stays strictly
    /// inside the polygon over the whole window.
    pub fn new(polygon: Polygon, sites: Vec<Site>, time: (f64, f64)) -> Result<Self> {
        let (t0, t1) = time;
        if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
            return Err(GeovorError::InvalidScenario(format!(
                "time window [{t0}, {t1}] is not a proper interval"
            )));
        }
        let eps = 1e-9 * polygon.diameter().max(1.0);
        for (i, s) in sites.iter().enumerate() {
            if !s.pos.is_finite() || !s.vel.is_finite() {
                return Err(GeovorError::NonFiniteCoordinate);
            }
            for other in &sites[..i] {
                if other.id == s.id {
                    return Err(GeovorError::InvalidScenario(format!(
                        "duplicate site id {:?}",
                        s.id
                    )));
                }
                if other.pos.dist(s.pos) <= eps {
                    return Err(GeovorError::InvalidScenario(format!(
                        "sites {:?} and {:?} coincide at t0",
                        other.id, s.id
                    )));
                }
            }
            let a = s.position_at(t0);
            let b = s.position_at(t1);
            let inside = polygon.locate(a, eps) == Location::Inside
                && polygon.locate(b, eps) == Location::Inside
                && polygon
                    .edges()
                    .all(|(c, d)| dist_segment_segment(a, b, c, d) > eps);
            if !inside {
                let t_exit = first_exit_time(&polygon, s, t0, t1, eps);
                return Err(GeovorError::SiteExitsPolygon(i, t_exit));
            }
        }
        Ok(Scenario {
            polygon,
            sites,
            time,
        })
    }

    pub fn site_positions(&self, t: f64) -> Vec<Point> {
        self.sites.iter().map(|s| s.position_at(t)).collect()
    }

    pub fn horizon(&self) -> f64 {
        self.time.1 - self.time.0
    }
}

/// Earliest sampled time at which the site leaves the strict interior.
fn first_exit_time(polygon: &Polygon, site: &Site, t0: f64, t1: f64, eps: f64) -> f64 {
    const STEPS: usize = 4096;
    for i in 0..=STEPS {
        let t = t0 + (t1 - t0) * i as f64 / STEPS as f64;
        if polygon.locate(site.position_at(t), eps) != Location::Inside {
            return t;
        }
    }
    t1
}

// --- file format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    polygon: Vec<[f64; 2]>,
    sites: Vec<SiteFile>,
    time: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteFile {
    id: String,
    pos: [f64; 2],
    vel: [f64; 2],
}

/// Parses and validates a UTF-8 JSON scenario file.
pub fn load_scenario(bytes: &[u8]) -> Result<Scenario> {
    let file: ScenarioFile =
        serde_json::from_slice(bytes).map_err(|e| GeovorError::InvalidScenario(e.to_string()))?;
    let polygon = Polygon::new(
        file.polygon
            .iter()
            .map(|&[x, y]| Point::new(x, y))
            .collect(),
    )?;
    let sites = file
        .sites
        .into_iter()
        .map(|s| Site::new(s.id, Point::new(s.pos[0], s.pos[1]), Point::new(s.vel[0], s.vel[1])))
        .collect();
    Scenario::new(polygon, sites, (file.time[0], file.time[1]))
}

/// Serializes a scenario; `load_scenario` round-trips the output.
pub fn save_scenario(scenario: &Scenario) -> Vec<u8> {
    let file = ScenarioFile {
        polygon: scenario
            .polygon
            .vertices()
            .iter()
            .map(|p| [p.x, p.y])
            .collect(),
        sites: scenario
            .sites
            .iter()
            .map(|s| SiteFile {
                id: s.id.clone(),
                pos: [s.pos.x, s.pos.y],
                vel: [s.vel.x, s.vel.y],
            })
            .collect(),
        time: [scenario.time.0, scenario.time.1],
    };
    serde_json::to_vec_pretty(&file).expect("scenario serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_scenario() -> Scenario {
        Scenario::new(
            polygons::square(),
            vec![
                Site::new("p", Point::new(1.0, 2.0), Point::new(0.5, 0.0)),
                Site::new("q", Point::new(3.0, 2.0), Point::new(-0.5, 0.0)),
            ],
            (0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let s = square_scenario();
        let bytes = save_scenario(&s);
        let s2 = load_scenario(&bytes).unwrap();
        assert_eq!(s2.sites.len(), 2);
        assert_eq!(s2.sites[0].id, "p");
        assert_eq!(s2.time, (0.0, 1.0));
        assert_eq!(save_scenario(&s2), bytes);
    }

    #[test]
    fn unknown_key_rejected() {
        let json = br#"{"polygon": [[0,0],[4,0],[4,4],[0,4]], "sites": [], "time": [0,1], "extra": 1}"#;
        assert!(matches!(
            load_scenario(json),
            Err(GeovorError::InvalidScenario(_))
        ));
    }

    #[test]
    fn hand_written_square_parses() {
        let json = br#"{
            "polygon": [[0,0],[4,0],[4,4],[0,4]],
            "sites": [
                {"id": "a", "pos": [1, 1], "vel": [0.1, 0]},
                {"id": "b", "pos": [3, 3], "vel": [0, -0.1]}
            ],
            "time": [0, 2]
        }"#;
        let s = load_scenario(json).unwrap();
        assert_eq!(s.sites.len(), 2);
    }

    #[test]
    fn escaping_site_rejected() {
        let r = Scenario::new(
            polygons::square(),
            vec![Site::new("p", Point::new(3.0, 2.0), Point::new(2.0, 0.0))],
            (0.0, 1.0),
        );
        match r {
            Err(GeovorError::SiteExitsPolygon(0, t)) => assert!((t - 0.5).abs() < 1e-2),
            other => panic!("expected exit error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let r = Scenario::new(
            polygons::square(),
            vec![
                Site::new("p", Point::new(1.0, 1.0), Point::new(0.0, 0.0)),
                Site::new("p", Point::new(2.0, 2.0), Point::new(0.0, 0.0)),
            ],
            (0.0, 1.0),
        );
        assert!(matches!(r, Err(GeovorError::InvalidScenario(_))));
    }
}
