//! Simulation and verification engine for the ℏ → 0 limit of one-mode
//! quantum mechanics.
//!
//! The crate builds polynomial Hamiltonians in creation/annihilation
//! symbols, realizes them on truncated Fock spaces, integrates the matching
//! classical and linearized (Bogoliubov) dynamics, and measures how fast
//! quantum expectations and the displacement-framed propagator converge to
//! their classical and quadratic limits as ℏ shrinks.
//!
//! Modules:
//! - [`ncpoly`]: noncommutative polynomial algebra, symbols, shift
//!   expansion, normal ordering, and the text grammar.
//! - [`classical`]: Hamilton's equation, the linearized flow, and the
//!   accumulated phase, integrated jointly with dense output.
//! - [`fock`]: ladder matrices, polynomial operators with ℏ-scaling,
//!   truncations, weighted norms and exact finite operator norms.
//! - [`evolution`]: spectral, Weyl, and Magnus-stepped propagators, and
//!   the displacement-framed family they assemble into.
//! - [`correlators`]: multi-time Heisenberg correlation functions and
//!   their classical/fluctuation predictions.
//! - [`harness`]: configuration, ℏ-sweeps with rate fits, the numeric
//!   spectral-domination screen, invariant ledger, and CSV reports.

pub mod classical;
pub mod correlators;
pub mod evolution;
pub mod fock;
pub mod harness;
pub mod linalg;
pub mod ncpoly;
pub mod ode;
