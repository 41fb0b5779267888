//! Implicit learning in PAC-Semantics over linear real arithmetic.
//!
//! Examples arrive as blurred observations (per-variable intervals, with
//! masking as the unbounded special case). A query is accepted when, for
//! all but an `ε` fraction of the examples, the knowledge base together
//! with the grounded example entails it. Nothing is learned explicitly:
//! every answer is a sequence of exact feasibility checks.
//!
//! - [`linarith`]: expressions, atoms and conjunctions over exact rationals.
//! - [`feasibility`]: simplex-based satisfiability and entailment, plus a
//!   Fourier–Motzkin cross-check.
//! - [`pac`]: blurring, grounding, sample sizes and the accept/reject
//!   decision.
//! - [`optimise`]: objective-bound search built on repeated decisions.
//! - [`bench`]: benchmark problems, datasets, file formats and the
//!   experiment grid.
//! - [`cli`]: the `pac-implicit` command line.

pub mod bench;
pub mod cli;
pub mod feasibility;
pub mod linarith;
pub mod optimise;
pub mod pac;
pub mod rational;

pub use rational::Rational;
