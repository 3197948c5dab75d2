pub mod asymptotics;
pub mod error;
pub mod criterion;
pub mod densities;
pub mod experiments;
pub mod families;
pub mod numerics;
pub mod solvers;

pub use error::{Error, Result};
