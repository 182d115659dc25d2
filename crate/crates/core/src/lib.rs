//! Randomized Manhattan city generator and air-to-ground line-of-sight and
//! path-loss simulator for aerial base stations.
//!
//! - [`citygen`] builds seeded city layouts from `(α, β, γ)` built-up parameters.
//! - [`geometry`] classifies one ABS–user link as LoS or NLoS by obstacle type.
//! - [`montecarlo`] sweeps elevation angles over many cities.
//! - [`pathloss`] composes path loss and fits `A + 10·B·log10(d)`.
//! - [`cli`] drives the `urbanlos` binary.
//! - [`io`] reads and writes the CSV / JSON / TOML artifacts.

pub mod citygen;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
pub mod montecarlo;
pub mod oracle;
pub mod pathloss;
pub mod rng;
pub mod shapes;

pub use citygen::{
    generate_city, BuiltUpParams, CityLayout, Environment, GenConfig,
};
pub use error::{Error, Result};
pub use geometry::{classify_link, Link, LinkClass, ObstacleKind, ObstacleSet};
pub use montecarlo::{run_sweep, PLoSCurve, Scenario, SweepConfig, SweepOutput};
pub use pathloss::{fit_ab, FitResult, VegetationParams};
pub use shapes::Point;
