//! Planar geometry kernel: polygons, triangulation, funnel shortest paths,
//! geodesic distances, and hyperbolic-arc primitives.

pub mod arc;
pub mod funnel;
pub mod point;
pub mod polygon;
pub mod rootfind;
pub mod tolerance;
pub mod triangulate;

pub use arc::{arc_between, HyperbolicArc};
pub use funnel::{geodesic_distance, shortest_path, shortest_path_located, GeodesicPath};
pub use point::{orient2d, Point};
pub use polygon::{Location, Polygon};
pub use tolerance::Tolerance;
pub use triangulate::{triangulate, Triangulation};
