//! Kernel functions on hyperelliptic Riemann surfaces and an exact jet calculus
//! for opers and matrix opers.
//!
//! * [`theta`]: Riemann theta functions with characteristics and derivatives.
//! * [`curve`]: hyperelliptic curves, period matrices, Abel map, local expansions.
//! * [`kernels`]: prime form, Bergman, Szego and Klein kernels, Wirtinger
//!   connections, identity checks and finiteness probes.
//! * [`jets`]: truncated kernels along the diagonal and the operator dictionary.
//! * [`verify`]: identity suites with per-check residuals.
//! * [`parse`]: JSON ingestion of curve specs, complex vectors and matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curve;
pub mod jets;
pub mod kernels;
pub mod parse;
pub mod theta;
pub mod verify;

pub type C64 = num_complex::Complex<f64>;
