//! Riemann theta functions with half-integer characteristics.
//!
//! The lattice sum is truncated to an ellipsoid whose radius comes from a
//! Gaussian tail bound, so every returned value carries an absolute error of at
//! most `tol * exp(pi y^T Im(Omega)^{-1} y)`, `y = Im z`. Derivatives up to order
//! three are summed term by term inside the same ellipsoid.

mod characteristic;
mod lattice;
mod riemann_matrix;
mod scaled;

pub use characteristic::Characteristic;
pub use lattice::lattice_points;
pub use riemann_matrix::RiemannMatrix;
pub use scaled::ScaledComplex;

use nalgebra::DMatrix;
use statrs::function::gamma::gamma_ui;
use std::f64::consts::PI;
use thiserror::Error;

use crate::C64;

pub const DEFAULT_THETA_TOL: f64 = 1e-12;
pub const DEFAULT_ZERO_FLOOR: f64 = 1e-8;
pub const MAX_DERIVATIVE_ORDER: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("imaginary part of the period matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("tolerance {tol:e} is below the floating-point floor {floor:e} of the accumulated sum")]
    ToleranceTooSmall { tol: f64, floor: f64 },
    #[error("derivative order {0} exceeds the supported maximum of 3")]
    DerivativeOrderTooHigh(usize),
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("point lies on the theta divisor (|theta| / max term = {ratio:e})")]
    PointOnTheta { ratio: f64 },
}

/// Tolerances shared by every theta evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaConfig {
    pub tol: f64,
    /// `|theta(e)| < zero_floor * (largest term)` is treated as `e` on the divisor.
    pub zero_floor: f64,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_THETA_TOL,
            zero_floor: DEFAULT_ZERO_FLOOR,
        }
    }
}

/// One theta evaluation: argument, characteristic, derivative multi-index and tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRequest {
    pub z: Vec<C64>,
    pub characteristic: Characteristic,
    /// Number of derivatives along each coordinate; total at most 3.
    pub deriv: Vec<usize>,
    pub tol: f64,
}

impl ThetaRequest {
    pub fn value(z: Vec<C64>, characteristic: Characteristic, tol: f64) -> Self {
        let g = z.len();
        Self {
            z,
            characteristic,
            deriv: vec![0; g],
            tol,
        }
    }

    fn validate(&self, g: usize) -> Result<usize, ThetaError> {
        for len in [self.z.len(), self.deriv.len(), self.characteristic.genus()] {
            if len != g {
                return Err(ThetaError::DimensionMismatch {
                    expected: g,
                    found: len,
                });
            }
        }
        check_tol(self.tol)?;
        let order: usize = self.deriv.iter().sum();
        if order > MAX_DERIVATIVE_ORDER {
            return Err(ThetaError::DerivativeOrderTooHigh(order));
        }
        Ok(order)
    }
}

fn check_tol(tol: f64) -> Result<(), ThetaError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(ThetaError::InvalidTolerance(tol));
    }
    Ok(())
}

/// Theta value and all partial derivatives up to `order`, sharing one scale factor.
///
/// Stored numbers are in units of `exp(log_scale)`.
#[derive(Debug, Clone)]
pub struct ThetaJet {
    pub order: usize,
    pub log_scale: f64,
    /// Largest single term magnitude (same units), the reference for zero tests.
    pub max_term: f64,
    pub value: C64,
    pub gradient: Vec<C64>,
    pub hessian: DMatrix<C64>,
    /// `third[(i * g + j) * g + k] = d^3 theta / dz_i dz_j dz_k`.
    pub third: Vec<C64>,
    pub radius: f64,
    pub terms: usize,
}

impl ThetaJet {
    pub fn genus(&self) -> usize {
        self.gradient.len()
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> C64 {
        let g = self.genus();
        self.third[(i * g + j) * g + k]
    }

    pub fn scaled_value(&self) -> ScaledComplex {
        ScaledComplex::new(self.value, self.log_scale)
    }

    /// Derivative for a multi-index given as per-coordinate counts.
    pub fn derivative(&self, counts: &[usize]) -> C64 {
        let mut idx = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            idx.extend(std::iter::repeat_n(i, c));
        }
        match idx.len() {
            0 => self.value,
            1 => self.gradient[idx[0]],
            2 => self.hessian[(idx[0], idx[1])],
            _ => self.third(idx[0], idx[1], idx[2]),
        }
    }

    /// `|theta| / max term`: small values mean the point is close to the divisor.
    pub fn zero_ratio(&self) -> f64 {
        if self.max_term > 0.0 {
            self.value.norm() / self.max_term
        } else {
            0.0
        }
    }
}

/// Upper bound on the truncation error (in units of the scale factor) when the
/// sum is cut at `radius`, for derivatives of total order `order` and
/// `shift = ||Im(Omega)^{-1} Im z||`.
pub fn truncation_bound(omega: &RiemannMatrix, shift: f64, order: usize, radius: f64) -> f64 {
    let g = omega.genus() as f64;
    let rho = omega.shortest_vector();
    let x = radius - rho;
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let inv = omega.cholesky_inverse_norm();
    let lead = (2.0 * PI).powi(order as i32) * (g / 4.0) * (4.0 / rho).powf(g);
    let mut sum = 0.0;
    for k in 0..=order {
        let binom = binomial(order, k);
        let a = (k as f64 + g) / 2.0;
        sum += binom * inv.powi(k as i32) * shift.powi((order - k) as i32) * gamma_ui(a, x * x);
    }
    lead * sum
}

/// Smallest radius (on a 0.05 grid) whose tail bound is below `tol`.
pub fn truncation_radius(omega: &RiemannMatrix, shift: f64, order: usize, tol: f64) -> f64 {
    let g = omega.genus() as f64;
    let rho = omega.shortest_vector();
    let mut r = 1.5 * rho + ((order as f64 + g) / 2.0).sqrt();
    while truncation_bound(omega, shift, order, r) > tol && r < 200.0 {
        r += 0.05;
    }
    r
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Evaluates theta and its derivatives through `order` at `z`.
pub fn theta_jet(
    z: &[C64],
    characteristic: &Characteristic,
    omega: &RiemannMatrix,
    order: usize,
    tol: f64,
) -> Result<ThetaJet, ThetaError> {
    let g = omega.genus();
    if z.len() != g || characteristic.genus() != g {
        return Err(ThetaError::DimensionMismatch {
            expected: g,
            found: z.len().min(characteristic.genus()),
        });
    }
    check_tol(tol)?;
    if order > MAX_DERIVATIVE_ORDER {
        return Err(ThetaError::DerivativeOrderTooHigh(order));
    }
    let entries = omega.entries();
    let re = entries.map(|c| c.re);
    let im = entries.map(|c| c.im);
    let alpha = characteristic.alpha();
    let beta = characteristic.beta();
    let y = nalgebra::DVector::from_fn(g, |i, _| z[i].im);
    let yshift = omega.im_inverse() * &y;
    let log_scale = PI * y.dot(&yshift);
    let center: Vec<f64> = (0..g).map(|i| alpha[i] + yshift[i]).collect();
    let radius = truncation_radius(omega, yshift.norm(), order, tol);
    let points = lattice::enumerate(omega.cholesky(), &center, radius);

    let mut value = C64::new(0.0, 0.0);
    let mut gradient = vec![C64::new(0.0, 0.0); g];
    let mut hessian = DMatrix::from_element(g, g, C64::new(0.0, 0.0));
    let mut third = vec![C64::new(0.0, 0.0); if order >= 3 { g * g * g } else { 0 }];
    let mut abs_sum = 0.0;
    let mut max_term = 0.0f64;
    let mut w = vec![0.0; g];
    let mut v = vec![0.0; g];
    let mut factor = vec![C64::new(0.0, 0.0); g];
    for n in &points {
        for i in 0..g {
            w[i] = n[i] as f64 + alpha[i];
            v[i] = w[i] + yshift[i];
        }
        let mut quad = 0.0;
        let mut phase = 0.0;
        for i in 0..g {
            let mut qi = 0.0;
            let mut pi_ = 0.0;
            for j in 0..g {
                qi += im[(i, j)] * v[j];
                pi_ += re[(i, j)] * w[j];
            }
            quad += v[i] * qi;
            phase += w[i] * pi_ + 2.0 * w[i] * (z[i].re + beta[i]);
        }
        let mag = (-PI * quad).exp();
        let term = C64::from_polar(mag, PI * phase);
        value += term;
        abs_sum += mag;
        max_term = max_term.max(mag);
        if order == 0 {
            continue;
        }
        for i in 0..g {
            factor[i] = C64::new(0.0, 2.0 * PI * w[i]);
        }
        for i in 0..g {
            let ti = term * factor[i];
            gradient[i] += ti;
            if order >= 2 {
                for j in i..g {
                    let tij = ti * factor[j];
                    hessian[(i, j)] += tij;
                    if order >= 3 {
                        for k in j..g {
                            third[(i * g + j) * g + k] += tij * factor[k];
                        }
                    }
                }
            }
        }
    }
    let floor = 1e3 * f64::EPSILON * abs_sum;
    if tol < floor {
        return Err(ThetaError::ToleranceTooSmall { tol, floor });
    }
    // fill symmetric entries
    for i in 0..g {
        for j in 0..i {
            hessian[(i, j)] = hessian[(j, i)];
        }
    }
    if order >= 3 {
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    let mut s = [i, j, k];
                    s.sort();
                    third[(i * g + j) * g + k] = third[(s[0] * g + s[1]) * g + s[2]];
                }
            }
        }
    }
    Ok(ThetaJet {
        order,
        log_scale,
        max_term,
        value,
        gradient,
        hessian,
        third,
        radius,
        terms: points.len(),
    })
}

/// Theta (or one of its partial derivatives) for a single request.
pub fn theta(req: &ThetaRequest, omega: &RiemannMatrix) -> Result<ScaledComplex, ThetaError> {
    let order = req.validate(omega.genus())?;
    let jet = theta_jet(&req.z, &req.characteristic, omega, order, req.tol)?;
    Ok(ScaledComplex::new(jet.derivative(&req.deriv), jet.log_scale))
}

/// `d^2 log theta / dz_i dz_j` at `e` (zero characteristic).
pub fn log_theta_hessian(
    e: &[C64],
    omega: &RiemannMatrix,
    config: &ThetaConfig,
) -> Result<DMatrix<C64>, ThetaError> {
    let jet = theta_jet(e, &Characteristic::zero(omega.genus()), omega, 2, config.tol)?;
    log_hessian_from_jet(&jet, config.zero_floor)
}

pub(crate) fn log_hessian_from_jet(jet: &ThetaJet, floor: f64) -> Result<DMatrix<C64>, ThetaError> {
    let ratio = jet.zero_ratio();
    if ratio < floor {
        return Err(ThetaError::PointOnTheta { ratio });
    }
    let g = jet.genus();
    let t = jet.value;
    Ok(DMatrix::from_fn(g, g, |i, j| {
        (t * jet.hessian[(i, j)] - jet.gradient[i] * jet.gradient[j]) / (t * t)
    }))
}

/// Second-order theta functions `theta[sigma; 0](2z, 2 Omega)`, lexicographic in `sigma`.
pub fn second_order_theta_basis(
    z: &[C64],
    omega: &RiemannMatrix,
    tol: f64,
) -> Result<Vec<ScaledComplex>, ThetaError> {
    let g = omega.genus();
    let doubled = omega.scaled(2.0)?;
    let z2: Vec<C64> = z.iter().map(|c| c * 2.0).collect();
    Characteristic::second_order(g)
        .iter()
        .map(|ch| {
            let jet = theta_jet(&z2, ch, &doubled, 0, tol)?;
            Ok(jet.scaled_value())
        })
        .collect()
}
