//! Numerical laboratory for the power-type approximation `F_p` of the
//! Moser–Trudinger functional on the unit ball.

pub mod cli;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod families;
pub mod functional;
pub mod maximizer;
pub mod output;
pub mod radial;
pub mod specfun;

pub use error::{Error, Result};
