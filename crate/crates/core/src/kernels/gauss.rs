use nalgebra::DMatrix;
use serde::Serialize;

use super::{gradient_norm, gradient_scale, limits::richardson, KernelError};
use crate::curve::HyperellipticCurve;
use crate::theta::{theta_jet, Characteristic, ThetaConfig};
use crate::C64;

/// Outcome of approaching a smooth point of the theta divisor.
#[derive(Debug, Clone, Serialize)]
pub struct GaussReport {
    pub e0: Vec<C64>,
    pub direction: Vec<C64>,
    /// Step sizes, largest first.
    pub steps: Vec<f64>,
    /// `max |theta^2 c - L| / max |L|` at each step.
    pub deviations: Vec<f64>,
    /// `L = -grad theta(e0) grad theta(e0)^T`, row-major.
    pub target: Vec<Vec<C64>>,
    /// Richardson extrapolation of `theta(e_t)^2 c(e_t)` to `t = 0`.
    pub extrapolated: Vec<Vec<C64>>,
    pub extrapolated_deviation: f64,
    /// Second singular value over the first for the extrapolated matrix (0 in genus one).
    pub singular_ratio: f64,
}

/// The theta zero `Omega alpha + beta` carried by an odd characteristic.
pub fn odd_half_period(curve: &HyperellipticCurve, delta: &Characteristic) -> Vec<C64> {
    let omega = curve.riemann_matrix();
    omega.lattice_vector(&delta.alpha(), &delta.beta())
}

/// Checks `theta(e_t)^2 d^2 log theta(e_t) -> -grad theta grad theta^T` for
/// `e_t = e0 + t direction`, `t = t0, t0/2, ...` (`levels` values).
pub fn gauss_limit_check(
    curve: &HyperellipticCurve,
    e0: &[C64],
    direction: &[C64],
    t0: f64,
    levels: usize,
    config: &ThetaConfig,
) -> Result<GaussReport, KernelError> {
    let omega = curve.riemann_matrix();
    let g = omega.genus();
    super::check_len(g, e0.len())?;
    super::check_len(g, direction.len())?;
    if !(t0 > 0.0) || levels == 0 {
        return Err(KernelError::InvalidArgument("step and level count must be positive".into()));
    }
    let zero = Characteristic::zero(g);
    let base = theta_jet(e0, &zero, omega, 1, config.tol)?;
    let ratio = base.zero_ratio();
    let gradient = gradient_norm(&base);
    if ratio > config.zero_floor || gradient <= 1e-8 * gradient_scale(&base) {
        return Err(KernelError::NotOnThetaSmoothLocus { ratio, gradient });
    }
    let target = DMatrix::from_fn(g, g, |i, j| -base.gradient[i] * base.gradient[j]);
    let size = target.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let deviation = |m: &DMatrix<C64>| (m - &target).iter().map(|z| z.norm()).fold(0.0, f64::max) / size;

    let mut samples: Vec<DMatrix<C64>> = Vec::with_capacity(levels);
    let mut steps = Vec::with_capacity(levels);
    for k in 0..levels {
        let t = t0 / 2f64.powi(k as i32);
        let e: Vec<C64> = e0.iter().zip(direction).map(|(a, d)| a + d * t).collect();
        let jet = theta_jet(&e, &zero, omega, 2, config.tol)?;
        // theta^2 c = theta theta_ij - theta_i theta_j, in the units of the base point
        let rescale = (2.0 * (jet.log_scale - base.log_scale)).exp();
        samples.push(DMatrix::from_fn(g, g, |i, j| {
            (jet.value * jet.hessian[(i, j)] - jet.gradient[i] * jet.gradient[j]) * rescale
        }));
        steps.push(t);
    }
    let deviations: Vec<f64> = samples.iter().map(&deviation).collect();
    let extrapolated = DMatrix::from_fn(g, g, |i, j| {
        richardson(levels, t0, |t| {
            let k = (t0 / t).log2().round() as usize;
            Ok::<_, KernelError>(samples[k][(i, j)])
        })
        .expect("samples are precomputed")
    });
    let singular_ratio = if g > 1 {
        let sv = extrapolated.clone().singular_values();
        let mut v: Vec<f64> = sv.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v[0] > 0.0 {
            v[1] / v[0]
        } else {
            f64::INFINITY
        }
    } else {
        0.0
    };
    let rows = |m: &DMatrix<C64>| m.row_iter().map(|r| r.iter().copied().collect()).collect();
    Ok(GaussReport {
        e0: e0.to_vec(),
        direction: direction.to_vec(),
        steps,
        deviations,
        target: rows(&target),
        extrapolated_deviation: deviation(&extrapolated),
        extrapolated: rows(&extrapolated),
        singular_ratio,
    })
}
