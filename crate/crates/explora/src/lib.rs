//! Fixed-confidence active exploration in Gaussian bandits.
//!
//! Given `K` unit-variance Gaussian arms and a partition of mean vectors into
//! classes (a threshold set, a best arm, or a common sign), the goal is to
//! identify the true instance's class from as few samples as possible while
//! keeping the error probability below a confidence level `delta`.
//!
//! The crate provides:
//!
//! - [`problems`]: the three task families with closed-form value functions,
//!   sub-gradients, likelihood-ratio statistics, characteristic times, and
//!   oracle sampling proportions;
//! - [`ascent`]: an anytime online lazy mirror ascent on the simplex, the
//!   engine of the headline sampling rule;
//! - [`sampling`]: that rule plus the classical competitors (best challenger,
//!   direct tracking, top-two Thompson sampling, conditional gradient,
//!   uniform) behind one interface;
//! - [`stopping`]: the likelihood-ratio stopping rule with practical and
//!   theoretical thresholds, and the decision rule;
//! - [`oracle`]: brute-force grid references for validating the closed
//!   forms;
//! - [`harness`]: a deterministic episode runner, a parallel Monte-Carlo
//!   benchmark, and CSV/JSON exporters.

pub mod ascent;
pub mod bandit;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod problems;
pub mod sampling;
pub mod stopping;

mod util;

pub use error::{Error, Result};
