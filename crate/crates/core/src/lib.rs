//! Exact arithmetic for Drinfeld modules of rank 1 and 2 over F_q[T].

pub mod algebra;
pub mod error;
pub mod skew;
pub mod drinfeld;
pub mod weil;
pub mod tate;
pub mod reduction;
pub mod cusps;
pub mod exec;
pub mod cli;

pub use error::{Error, Result};
