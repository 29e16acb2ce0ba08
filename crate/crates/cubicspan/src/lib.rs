//! Exact arithmetic and geometry on smooth cubic surfaces over small finite
//! fields.
//!
//! The crate builds up from field arithmetic (`gf`) through projective
//! geometry in P^3 (`projgeom`) and cubic/quadratic form manipulation
//! (`forms`) to a Groebner-basis smoothness test (`smoothcheck`), a cached
//! surface model with the full classification of plane sections through a
//! rational line (`surface`), the tangent/secant span-closure machinery
//! (`span`), and a corpus/verification harness with serialization (`harness`,
//! `io`).
//!
//! Everything is deterministic: canonical representatives everywhere, fixed
//! enumeration orders, and counter-based seeding for randomized corpora.

pub mod forms;
pub mod gf;
pub mod harness;
pub mod io;
pub mod projgeom;
pub mod smoothcheck;
pub mod span;
pub mod surface;
#[cfg(test)]
pub(crate) mod testutil;

pub use forms::CubicForm;
pub use gf::{Field, FieldElement};
pub use span::{span_closure, SpanClosure};
pub use surface::SurfaceModel;
