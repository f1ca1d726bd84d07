pub mod choi;
pub mod error;
pub mod families;
pub mod linalg;
pub mod peel;
pub mod positivity;
pub mod random;
pub mod split;
pub mod states;

pub use error::{Error, Result};
