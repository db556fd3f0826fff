pub mod error;
pub mod padic;
pub mod series;
pub mod witt;
pub mod formal_group;
pub mod tower;
pub mod exponentials;

pub use error::{LtError, Result};
