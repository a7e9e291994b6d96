//! Bound states of one-dimensional Schrödinger operators with complex
//! potentials and real spectra.
//!
//! The crate covers four pieces that are used together:
//!
//! * [`potentials`]: the catalog of complex potentials plus sampled ones,
//!   with evaluation, PT checks, class labels and the total-area integral.
//! * [`solver`]: RK4 integration of `-ψ'' + V ψ = E ψ`, transfer matrices for
//!   short-range wells and two-sided shooting for confining potentials.
//! * [`darboux`]: complex Darboux partners of real seeds built from a closed
//!   form Ermakov solution.
//! * [`analysis`]: zeros of `Re ψ` and `Im ψ`, interlacing, the
//!   Wronskian identity and density extrema.
//!
//! [`reproduce`] drives all of it against the tabulated reference values in
//! `data/tables.json`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a > b)` deliberately rejects NaN

pub mod analysis;
pub mod darboux;
pub mod error;
pub mod grid;
pub mod io;
pub mod ode;
pub mod potentials;
pub mod quad;
pub mod reproduce;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use grid::Grid;
pub use num_complex::Complex64 as C64;
pub use potentials::PotentialSpec;
