//! Magnetic relativistic Schrodinger operators.
//!
//! The crate has two halves that are meant to be checked against each other.
//! [`lattice`] builds the three quantizations `H1`, `H2`, `H3` of
//! `sqrt((xi - A(x))^2 + m^2)` as dense Hermitian matrices on a periodic grid and
//! evaluates their heat semigroups exactly.  [`paths`], [`actions`] and
//! [`estimator`] evaluate the same semigroups by Monte Carlo over Levy paths
//! weighted with `exp(-S)`.
//!
//! [`specfun`] supplies the Bessel-function kernels, the Levy density and the
//! first-passage subordinator, and [`fields`] the vector and scalar potentials.

pub mod actions;
pub mod error;
pub mod estimator;
pub mod fields;
pub mod lattice;
pub mod paths;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use specfun::MassDim;
