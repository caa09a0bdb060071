//! Frequency-domain simulator of optical sideband separation.
//!
//! An unbalanced Mach-Zehnder interferometer with a quarter-period arm delay
//! sends the upper and lower modulation sidebands of one beam to two distinct
//! spatial outputs. The library models Gaussian sideband states (squeezed,
//! modulated coherent, vacuum), propagates them through passive networks,
//! and evaluates homodyne, direct-detection and interferometric Bell-type
//! measurements, with a Monte-Carlo sampling oracle as an independent check.
//!
//! Everything is generic over the working scalar ([`Real`], `f32` or `f64`);
//! the `*64` aliases below are the types most code wants.

pub mod detection;
pub mod error;
pub mod network;
pub mod oracle;
pub mod scalar;
pub mod scenario;
pub mod spectrum;
pub mod state;
pub mod timing;
pub mod umzi;

pub use error::{Error, Result};
pub use scalar::{from_db, reduce_angle, to_db, Real};

/// Default working scalar.
pub type Scalar = f64;

pub type SidebandState64 = state::SidebandState<f64>;
pub type SidebandState32 = state::SidebandState<f32>;
pub type OpticalNetwork64 = network::OpticalNetwork<f64>;
pub type OpticalNetwork32 = network::OpticalNetwork<f32>;
pub type UmziConfig64 = umzi::UmziConfig<f64>;
pub type AnalysisSetup64 = state::AnalysisSetup<f64>;
pub type FabryPerotSpec64 = spectrum::FabryPerotSpec<f64>;
pub type Trace64 = spectrum::Trace<f64>;
