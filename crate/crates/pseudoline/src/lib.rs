//! Pseudoline arrangements, their dual graphs, and long dual paths.

pub mod bicolored;
pub mod bitset;
pub mod cli;
pub mod dual;
pub mod error;
pub mod exact;
pub mod geom;
pub mod longpath;
pub mod oracle;
pub mod path;
pub mod plane;
pub mod render;
pub mod tunnel;
pub mod wiring;

pub use error::{Error, Result};
