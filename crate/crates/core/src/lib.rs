//! Normal traces and Gauss-Green formulas for bounded divergence-measure
//! fields on rough, possibly cracked, domains.
//!
//! Domains are rasterized onto uniform Cartesian grids ([`domain`]), their
//! boundaries are split by density ([`measure`]), approximated from inside and
//! outside ([`approx`]), and fields on them are traced and paired against test
//! functions ([`dmfield`]). [`divsolve`] goes the other way and builds a field
//! with prescribed trace.

pub mod acceptance;
pub mod approx;
pub mod cli;
pub mod divsolve;
pub mod dmfield;
pub mod domain;
pub mod error;
pub mod io;
pub mod measure;

pub use error::{Error, Result};
