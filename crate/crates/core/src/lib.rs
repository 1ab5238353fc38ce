//! Spectral geometry of differential forms on long warped spheres.
//!
//! The crate builds the one-parameter family of metrics on `S^m` obtained by
//! inserting a flat cylinder `S^p × [0, L] × S^{m-p-1}` between two
//! non-negatively curved caps, and checks eigenvalue estimates for the Hodge
//! and rough Laplacians on `p`-forms against it:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`profiles`] | warping function, doubly warped metric, volume data |
//! | [`closed_form`] | round-sphere form spectra, interval spectra, Künneth sums, Betti numbers |
//! | [`sl_solver`] | staggered finite differences + Sturm bisection for weighted 1D problems |
//! | [`bounds`] | test-form quotients, normalized upper bounds, cover lower bounds, gluing constants |
//! | [`warped_spectra`] | numeric spectra of the warped metrics |
//! | [`cli`] | sweep runner behind the `warped-forms` binary |
//!
//! Everything is deterministic: no randomness, order-stable parallel sweeps.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod closed_form;
mod error;
pub mod profiles;
pub mod quadrature;
pub mod sl_solver;
pub mod spectrum;
pub mod warped_spectra;

pub use error::{Error, Result};
pub use spectrum::{Completeness, Label, Provenance, SpectrumEntry, SpectrumTable};
