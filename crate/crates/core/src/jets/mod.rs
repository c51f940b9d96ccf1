//! Exact jet calculus along the diagonal of a formal disk.
//!
//! Kernels are truncated Laurent expansions in `z1 - z2` with series coefficients in
//! `z1`. Everything is generic over [`Coeff`]: [`Exact`] (complex rationals, the
//! default for identities) or `Complex<f64>` for interop with numeric curve data.
//!
//! The residue pairing is normalized so that the weight-2 canonical kernel maps to
//! the de Rham differential `d`.

mod bivar;
mod coeff;
mod connection;
mod kernel;
mod matrix;
mod matrix_oper;
mod oper;
mod operator;
mod series;

pub use bivar::Bivar;
pub use coeff::{binomial_ratio, exact, factorial, rational, Coeff, Exact};
pub use connection::{
    companion_connection, connection_from_kernel, flat_extension, solve_flat, solve_scalar,
    ConnectionJet,
};
pub use kernel::JetKernel;
pub use matrix::SeriesMatrix;
pub use matrix_oper::{det_kernel, higgs_deformation, matrix_oper, quadratic_s, trace_map, TraceSelector};
pub use oper::{
    build_oper, gamma_from_projective, gamma_from_solutions, hitchin_action, projective_coordinate,
    rescale_shift, sturm_liouville_basis, unshift,
};
pub use operator::{kernel_to_operator, operator_to_kernel, residue_pairing, DiffOperator};
pub use series::Series;

use thiserror::Error;

/// Default number of known series coefficients.
pub const DEFAULT_SERIES_LEN: usize = 17;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("coordinate change is not invertible (needs w(0) = 0 and w'(0) != 0)")]
    NonInvertibleChart,
    #[error("weight mismatch: expected {expected}, found {found}")]
    WeightMismatch { expected: i64, found: i64 },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("kernel is not monic on the diagonal")]
    NotMonic,
    #[error("kernel is not monic on second-order jets")]
    NotMonicOn2Delta,
    #[error("slot {slot} is not traceless")]
    TraceNotZero { slot: usize },
    #[error("need {needed} jets, only {available} known")]
    TruncationUnderflow { needed: usize, available: usize },
    #[error("diagonal value differs from the declared multiple of the identity")]
    DiagonalValueMismatch,
    #[error("the quadratic slot must vanish on a projective structure")]
    QuadraticSlotNonZero,
    #[error("expected {expected} slots, found {found}")]
    SlotCount { expected: usize, found: usize },
}
