//! Riemann-Roch bases and Weierstrass semigroups on the tower
//! x_{j+1}^2 = (x_j^2 + 1) / (2 x_j) over F_{p^2}.

pub mod error;
pub mod field;
pub mod funcrep;
pub mod ladder;
pub mod semigroup;
pub mod cli;
pub mod codes;
pub mod series;
pub mod tower;

pub use error::{Error, Result};
