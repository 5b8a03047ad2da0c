//! Evolve feature-diverse sets of easy and hard Euclidean TSP instances for
//! 2-OPT and measure how well hard and easy instances separate in feature
//! space.

pub mod classifier;
pub mod diversity;
pub mod ea;
pub mod error;
pub mod features;
pub mod harness;
pub mod instance;
mod io_util;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use features::{FeatureId, FeatureVector};
pub use instance::{Point, Tour, TspInstance};
pub use rng::RandomSource;
