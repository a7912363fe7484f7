//! Numerical laboratory for sampling and isoperimetry of logconcave
//! distributions over convex bodies.
//!
//! The crate bundles four interacting pieces:
//!
//! - [`bodies`]: convex bodies (ball, cube, truncated cone), logconcave
//!   densities, and weighted-sample statistics shared by everything else.
//! - [`ballwalk`]: the ball walk Markov chain with a Metropolis filter,
//!   proper-step accounting, local conductance, and the truncated-cone
//!   mixing/drift experiments.
//! - [`localization`]: a particle simulator for the tilting process
//!   p_t(x) ∝ exp(c_tᵀx − (t/2)‖x‖²) p(x) driven by dc_t = dW_t + μ_t dt,
//!   with martingale, band, and quadratic-variation checks on set measures.
//! - [`barrier`]: the Stieltjes-type potential u(X) solving
//!   tr((uI − X)^{−q}) = Φ, its exact first/second directional derivatives,
//!   and the tensor-shift inequality tr(A^αΔA^βΔ) ≤ tr(A^{α+β}Δ²).
//! - [`isoperimetry`]: exact 1-d Gaussian interval profiles, empirical
//!   log-Cheeger estimates, concentration and small-ball experiments, and
//!   the analytic truncated-cone upper bound.
//!
//! Experiments are driven through [`config`]/[`runner`] (also exposed by the
//! `locwalk` binary). Every operation takes an explicit RNG; parallel runs
//! derive one ChaCha stream per unit of work from `(seed, stream)`, so output
//! is byte-identical across reruns regardless of scheduling.

// `!(x > 0)`-style guards intentionally reject NaN; explicit indices keep
// the matrix kernels close to their formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod ballwalk;
pub mod barrier;
pub mod bodies;
pub mod config;
pub mod isoperimetry;
pub mod linalg;
pub mod localization;
pub mod report;
pub mod rng;
pub mod runner;
pub mod special;

mod error;
mod util;

pub use error::{Error, Result};
