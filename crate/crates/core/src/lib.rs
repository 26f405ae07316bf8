//! Simulation and analytics for jagged reliability landscapes.
//!
//! The model: a scalar truth process evolves as driftless Brownian motion over
//! a task interval, and an agent knows its exact value at a random set of
//! anchor points. Between anchors the conditional law is a Brownian bridge, so
//! predictive variance rises and falls in arcs between anchors. Task positions
//! are drawn independently of the anchors, which length-biases the gap they
//! land in. Everything else in the crate builds on that core object:
//!
//! - [`landscape`]: anchor sampling, bridge posteriors, containing gaps.
//! - [`reliability`]: value of delegation under blind and calibrated use,
//!   cost-of-blindness curves, use shares, marginal returns.
//! - [`coverage`]: scaling anchors, non-exponential gap families, length-bias
//!   multipliers, discrete audits, and a planar size-bias check.
//! - [`reasoning`]: a second, slower mode that shrinks variance at a cost;
//!   cutoff policies and option value.
//! - [`mastery`]: Gaussian-process error maps, uncertainty sampling,
//!   safe-set delegation, and learning speed limits.
//! - [`applications`]: convex stakes, provider sorting, adoption and
//!   delegation misalignment, verification decisions.
//! - [`benchadjust`]: benchmark score tables, deployment reweighting, and
//!   jaggedness diagnostics.
//!
//! Monte Carlo estimators return `(estimate, standard error, sample count)`
//! and are seed-deterministic, including under multi-worker execution
//! ([`mc`]). Quadrature ([`quad`]) and the modified Bessel functions
//! ([`bessel`]) back the closed-form curves.

pub mod applications;
pub mod benchadjust;
pub mod bessel;
pub mod coverage;
pub mod landscape;
pub mod mastery;
pub mod mc;
pub mod quad;
pub mod reasoning;
pub mod reliability;
pub mod rng;
