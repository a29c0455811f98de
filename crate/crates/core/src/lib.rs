//! Evaluation of framed links in the genus-2 handlebody.
//!
//! A link is given as arrays of its passes around the two strands that stand
//! for the handlebody's holes, together with the signs of its
//! self-crossings. The pipeline smooths every crossing, sorts each strand by
//! inducing and smoothing further crossings, and classifies the remaining
//! curves as the basis curves `x`, `y`, `z` or trivial loops. The result is
//! a polynomial in those curves with Laurent polynomial coefficients in `t`.

pub mod arrayops;
pub mod classifier;
pub mod diagram;
pub mod engine;
pub mod laurent;
pub mod oracle;
pub mod resolver;
pub mod sorter;
pub mod trace;

pub use classifier::DeltaMode;
pub use diagram::{canonical_form, Component, CrossingId, Expression, PassEntry, SkeinDiagram, Term};
pub use engine::{dedup, run_pipeline, Error, PipelineOptions};
pub use laurent::{BasisMonomial, LaurentPoly, SkeinPolynomial};
