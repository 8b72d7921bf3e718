//! Self-optimized pilot-power control for femtocells.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod interference;
pub mod montecarlo;
pub mod powerctrl;
pub mod propagation;

pub use error::{Error, Result};
