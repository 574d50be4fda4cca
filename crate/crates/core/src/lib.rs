//! Symbolic dynamics on finite directed graphs: topological Markov shifts
//! and their suspension flows with finite-range rational roof functions.
//!
//! The crate keeps orbit arithmetic exact. Points of the shift are
//! eventually periodic bi-infinite sequences, roof values and Birkhoff sums
//! are rationals, and flow evolution resolves roof crossings by exact
//! accumulation. Floats appear only where the mathematics is analytic:
//! metric values, pressure, entropy, and growth predictors.
//!
//! Module map:
//!
//! - [`graph`], [`point`], [`enumerate`], [`recode`]: the base shift — finite
//!   graphs, exact points, the shift map and base metric, periodic-point and
//!   cycle enumeration, higher-block recoding.
//! - [`roof`]: finite-range rational roof functions, two-sided Birkhoff
//!   cocycles, Hölder variation bounds, induced first-return systems.
//! - [`flow`]: the suspension flow, closed orbits, and the exact
//!   simple-orbit length spectrum.
//! - [`bw`]: the Bowen–Walters metric as certified intervals, with checkers
//!   for its continuity and flow-Hölder bounds.
//! - [`thermo`]: pressure, equilibrium Markov measures, entropy, and the
//!   measure of maximal entropy of the flow via Abramov's formula.
//! - [`counting`]: the closed-orbit census — exact window counts, lattice
//!   sums, loop-count asymptotics, growth tables.
//! - [`dichotomy`]: cycle-weight lattice detection, transfer-function
//!   solving, and recoding to a constant-roof flow.
//! - [`model`]: the JSON model format shared by the library and the CLI.
//!
//! Enumeration-heavy operations run data-parallel under the default
//! `parallel` feature and have `_serial` reference twins; output order is
//! canonical either way.

pub mod bw;
pub mod counting;
pub mod dichotomy;
pub mod enumerate;
pub mod error;
pub mod flow;
pub mod graph;
pub mod model;
pub mod point;
pub mod rational;
pub mod recode;
pub mod roof;
pub mod thermo;

mod par;

#[doc(hidden)]
pub mod test_support;

pub use error::{Error, Result};
pub use graph::{Graph, VertexId};
pub use point::{CycleClass, SeqPoint};
pub use rational::Rational;
