//! Explicit eigenvalue bounds and the bookkeeping that makes them auditable.
//!
//! Every bound comes back as a [`BoundReport`]: the value, the named inputs it
//! was computed from, a trail of intermediate values, and a [`Formula`] that
//! recomputes the value from the inputs alone.

mod cover;
mod gluing;
mod report;
mod upper;

pub use cover::{
    build_cover, cover_nu1_u2, is_exceptional, mcgowan_lower, overlap_surrogate, theorem41_report,
    CapInputs, CoverDescriptor, CoverOverlap, CoverPiece, LowerFit, Theorem41Report,
    DEFAULT_GRADIENT_BOUND,
};
pub use gluing::{
    cutoff_energy, glue_budget, length_threshold, trace_bound, trace_constant, TRACE_RADIUS,
};
pub use report::{BoundReport, Check, Formula, QuotientKind, TrailStep};
pub use upper::{normalized_upper, test_form_quotient, QUADRATURE_TOL};
