/// Geometric and temporal tolerances, scaled to the scene.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub eps_geom: f64,
    pub eps_time: f64,
}

impl Tolerance {
    pub fn new(eps_geom: f64, eps_time: f64) -> Self {
        assert!(eps_geom > 0.0 && eps_time > 0.0, "tolerances must be positive");
        Tolerance { eps_geom, eps_time }
    }

    /// Default: 1e-9 of the scene diameter and of the horizon length.
    pub fn for_scene(diameter: f64, horizon: f64) -> Self {
        Tolerance::new(1e-9 * diameter.max(1e-300), 1e-9 * horizon.max(1e-300))
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-9, 1e-9)
    }
}
