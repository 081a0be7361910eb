//! Exact computations in typical ramified degree-p extensions `L = K(x)`,
//! `x^p - alpha^((p-1)/d) x = beta`, over `K = kappa((pi))`, and in their
//! Galois closure `M = K(x, y)`, `y^d = alpha`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod ffield;
pub mod galois;
pub mod hopf;
mod linalg;
pub mod modstruct;
pub mod ramprofile;
pub mod scaffold;
pub mod series;
pub mod tower;

pub use error::{Error, ParamClause, Result};
pub use ffield::{FFElem, FieldDesc};
pub use num_rational::Ratio;
pub use series::{LaurentField, LaurentSeries};

/// Exact rational number.
pub type Rational = Ratio<i64>;
