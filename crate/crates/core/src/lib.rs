//! Planckian quantum-geometrical position noise: the noncommuting position
//! algebra, the predicted interferometer displacement spectrum, time-series
//! synthesis, dual-interferometer simulation and the cross-correlation
//! detection pipeline.

pub mod algebra;
pub mod analysis;
pub mod cli;
pub mod constants;
pub mod error;
pub mod interferometer;
pub mod io;
pub mod noise_model;
pub mod synthesis;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use noise_model::HolographicSpectrum;
pub use synthesis::{SynthesisConfig, SynthesisMethod, TimeSeries};
