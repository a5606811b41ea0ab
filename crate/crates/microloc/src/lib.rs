//! Microlocal machinery on curved spacetimes: null bicharacteristic flow,
//! polarization transport along Dencker's connection, wave front set
//! predictors for two-point functions, and a windowed-Fourier wave front
//! detector for sampled distributions.

pub mod config;
pub mod flow;
pub mod geometry;
pub mod hadamard;
pub mod ode;
pub mod report;
pub mod spin;
pub mod symbols;
pub mod verify;
pub mod wfdetect;

pub use geometry::{CausalClass, GeometryCache, MetricSpec, PhasePoint};
