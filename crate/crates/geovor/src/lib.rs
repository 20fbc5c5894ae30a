//! Geodesic Voronoi diagrams of point sites moving linearly inside a static
//! simple polygon, maintained kinetically and validated against brute-force
//! oracles.

pub mod bisector;
pub mod center;
pub mod cli;
pub mod error;
pub mod gvd;
pub mod geom;
pub mod oracle;
pub mod scenarios;
pub mod spm;

pub use error::{GeovorError, Result};
