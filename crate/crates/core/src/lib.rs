//! Numerical laboratory for fractional Sobolev spaces `H^s`, `0 <= s < 3/2`:
//! Gagliardo seminorms, the Nemytskii operators `|u|`, `u+`, `u-`, Hardy-type
//! inequalities, extension operators, and the studies that measure them.

pub mod domains;
pub mod error;
pub mod experiments;
pub mod extension;
pub mod hardy;
pub mod nemytskii;
pub mod norms;
pub mod numeric;

pub use error::{Error, Result};
