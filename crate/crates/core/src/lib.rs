//! Exact and high-precision tunneling expansions of ground states, with the
//! classical quantities and fits that describe their large-order growth.

pub mod asymptotics;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod oracle;
pub mod poly;
pub mod quadrature;
pub mod scenario;
pub mod series;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
