//! Effective bounds and exhaustive search for Cullen-type equations
//! `U_{n_1} + ... + U_{n_k} = l x^l + Q(x)` over linear recurrences.

pub mod error;
pub mod interval;
pub mod poly;
pub mod roots;
pub mod factor;
pub mod recurrence;
pub mod height;
pub mod baker;
pub mod lattice;
pub mod reduction;
pub mod search;

pub use error::{Error, Result};
