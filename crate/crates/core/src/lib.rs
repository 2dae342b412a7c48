#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical tools for the limit distribution of scattering resonances of
//! compactly supported potentials in odd dimensions, and for computing the
//! resonances of radial step potentials to compare against it.

pub mod chebyshev;
pub mod complexfn;
pub mod counting;
pub mod error;
pub mod io_store;
pub mod metric;
pub mod mzdist;
pub mod quadrature;
pub mod resonator;
pub mod window;

pub use error::{Error, Result};
