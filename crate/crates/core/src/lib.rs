//! Light propagation and light-pulse atom interferometry in a weak, linear
//! gravitational potential with an oscillating dilaton background.

pub mod closed_forms;
pub mod context;
pub mod dilaton;
pub mod error;
pub mod geometry;
pub mod optics;
pub mod oracle;
pub mod phase_engine;
pub mod special;

pub use context::PhysicalContext;
pub use dilaton::DilatonParams;
pub use error::{Error, Result};
