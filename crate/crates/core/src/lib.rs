//! Weak-value analysis of Hardy's paradox with finite-strength pointer models.
//!
//! The library is organized bottom-up:
//!
//! * [`qcore`] holds the small dense linear-algebra layer: kets, operators,
//!   density matrices, and spectral (eigenvalue/projector) forms over
//!   `Complex64`, with tensor products and partial traces for bipartite
//!   systems.
//! * [`weakval`] computes weak values for pre- and post-selected ensembles,
//!   plus sum-rule and product-rule diagnostics and vector-valued observables.
//! * [`stateprep`] contrasts a which-path-leaking preparation of the Hardy
//!   state against a Schmidt-based preparation that produces the pure state.
//! * [`pointer`] implements von Neumann measurement with Gaussian pointers in
//!   closed form (no grids), weak-limit estimators with Richardson
//!   extrapolation, and the strong-coupling regime.
//! * [`hardy`] assembles the scenario: the pre/post states, the weak-value
//!   table, the vector-operator analysis, and the strong-vs-weak comparison.
//!
//! All computations are deterministic: fixed basis conventions, fixed branch
//! orderings, and closed-form eigendecompositions with pinned phase and
//! tie-breaking rules.

pub mod error;
pub mod hardy;
pub mod pointer;
pub mod qcore;
pub mod stateprep;
pub mod weakval;

pub use error::{Error, Result};
