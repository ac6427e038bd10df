//! Exact origami constructions over imaginary quadratic fields.
//!
//! Starting from the seed points 0 and 1 in the complex plane, one may draw
//! lines ("folds") through already-constructed points in a fixed set of
//! allowed directions, and add every intersection of two such lines to the
//! set. For well-chosen direction sets this process generates the full ring
//! of algebraic integers of an imaginary quadratic field `Q(sqrt(m))`,
//! `m < 0` squarefree. This crate implements that construction end to end,
//! entirely in exact rational arithmetic:
//!
//! - [`quadfield`] — arbitrary-precision rationals, elements of `Q(sqrt(m))`,
//!   and fold directions canonicalized as primitive integer vectors.
//! - [`intersect`] — the closed-form two-line intersection operator and its
//!   algebraic identities.
//! - [`closure`] — generation-by-generation expansion of the constructed
//!   point set, with per-point construction distance.
//! - [`targets`] — membership predicates for the ring of integers and the
//!   direction sets that generate it, plus the per-direction-pair
//!   intersection formulas used as cross-checks.
//! - [`planner`] — explicit, replayable step sequences that construct any
//!   given algebraic integer from the seeds.
//! - [`approx`] — a floating-point engine for direction sets that are not
//!   representable in `Q(sqrt(m))` (e.g. cyclotomic angle sets).
//! - [`render`] — deterministic SVG scatter output.
//! - [`cli`] — the `origami` command-line front end.
//!
//! Runnable demonstrations of each capability live in `examples/`.

pub mod approx;
pub mod cli;
pub mod closure;
pub mod intersect;
pub mod planner;
pub mod quadfield;
pub mod render;
pub mod targets;

pub use closure::{run_closure, OrigamiConfig, PointSet};
pub use intersect::{intersect, Line};
pub use planner::{plan, replay, Trace};
pub use quadfield::{bracket, Direction, FieldTag, QuadElem, Rational};
pub use targets::{direction_set, is_integer, ring_class};
