//! Kernel functions on a hyperelliptic curve built from theta functions: the prime
//! form, Bergman, Szegő and Klein kernels, Klein coordinates and the Wirtinger
//! projective connection, plus numeric checks of the identities relating them.
//!
//! Values are computed in the charts `t = x - x0` and then rescaled to the requested
//! charts by the weight law of the kernel.

mod gauss;
mod limits;
mod probe;
mod wirtinger;

pub use gauss::{gauss_limit_check, odd_half_period, GaussReport};
pub use limits::{richardson, DiagonalKernel};
pub use probe::{finiteness_probe, Collision, CollisionKind, ProbeConfig, ProbeReport, ProbeSample};
pub use wirtinger::MIN_SERIES_ORDER;

use std::sync::Mutex;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{Chart, CurveError, HyperellipticCurve, SurfacePoint};
use crate::theta::{theta_jet, Characteristic, ThetaConfig, ThetaError, ThetaJet};
use crate::C64;

/// Lattice-sum distance below which a tuple of Jacobian points counts as summing to zero.
pub const SUM_TOLERANCE: f64 = 1e-8;
/// `|h^2|` below this fraction of its natural size leaves the square-root branch undefined.
const BRANCH_FLOOR: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("no odd characteristic has a nonzero theta gradient at the origin")]
    NoNonsingularOddCharacteristic,
    #[error("characteristic is even or has the wrong genus")]
    NotAnOddCharacteristic,
    #[error("the two points coincide")]
    OnDiagonal,
    #[error("the half-differential vanishes at x = {re} + {im}i; its square-root branch is undefined")]
    SquareRootBranchUnresolvable { re: f64, im: f64 },
    #[error("point lies on the theta divisor (|theta| / max term = {ratio:e})")]
    PointOnTheta { ratio: f64 },
    #[error("the Jacobian points do not sum to zero (lattice distance {distance:e})")]
    ConstraintViolation { distance: f64 },
    #[error("series order {found} is below the required {needed}")]
    SeriesOrderInsufficient { needed: usize, found: usize },
    #[error("point is not on the smooth part of the theta divisor (|theta| ratio {ratio:e}, gradient {gradient:e})")]
    NotOnThetaSmoothLocus { ratio: f64, gradient: f64 },
    #[error("expected {expected} components, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl KernelError {
    /// Whether the failure means some argument lies on the theta divisor.
    pub fn is_on_theta(&self) -> bool {
        matches!(
            self,
            KernelError::PointOnTheta { .. } | KernelError::Theta(ThetaError::PointOnTheta { .. })
        )
    }
}

/// A kernel value in the charts `t_x`, `t_y`, as the coefficient of
/// `dt_x^{weight.0} dt_y^{weight.1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: C64,
    pub chart_x: Chart,
    pub chart_y: Chart,
    pub weight: (f64, f64),
    /// Order of the pole along the diagonal (negative for a zero).
    pub pole: i32,
}

/// A point of the Jacobian, `e = a + Omega b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianPoint {
    pub e: Vec<C64>,
    /// Whether `e` is the canonical representative modulo the lattice.
    pub reduced: bool,
}

impl JacobianPoint {
    pub fn new(e: Vec<C64>) -> Self {
        Self { e, reduced: false }
    }

    pub fn reduced(curve: &HyperellipticCurve, e: &[C64]) -> Self {
        Self {
            e: curve.reduce_mod_lattice(e),
            reduced: true,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            e: self.e.iter().map(|z| -z).collect(),
            reduced: false,
        }
    }

    /// `|theta(e)|` relative to the largest term of its series.
    pub fn theta_ratio(&self, curve: &HyperellipticCurve, config: &ThetaConfig) -> Result<f64, KernelError> {
        let omega = curve.riemann_matrix();
        check_len(omega.genus(), self.e.len())?;
        Ok(theta_jet(&self.e, &Characteristic::zero(omega.genus()), omega, 0, config.tol)?.zero_ratio())
    }
}

/// Second logarithmic derivatives of theta at `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct KleinCoordinates {
    pub matrix: DMatrix<C64>,
}

impl KleinCoordinates {
    /// Upper triangle, row by row: the coordinate vector in `C^{g(g+1)/2}`.
    pub fn upper_triangle(&self) -> Vec<C64> {
        let g = self.matrix.nrows();
        (0..g)
            .flat_map(|i| (i..g).map(move |j| (i, j)))
            .map(|(i, j)| self.matrix[(i, j)])
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_len(expected: usize, found: usize) -> Result<(), KernelError> {
    if expected != found {
        return Err(KernelError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `theta` jet at `e`, rejecting points on the divisor.
fn theta_off_divisor(
    curve: &HyperellipticCurve,
    e: &[C64],
    order: usize,
    config: &ThetaConfig,
) -> Result<ThetaJet, KernelError> {
    let omega = curve.riemann_matrix();
    check_len(omega.genus(), e.len())?;
    let jet = theta_jet(e, &Characteristic::zero(omega.genus()), omega, order, config.tol)?;
    let ratio = jet.zero_ratio();
    if ratio < config.zero_floor {
        return Err(KernelError::PointOnTheta { ratio });
    }
    Ok(jet)
}

/// `d^2 log theta(e)`.
pub fn klein_coordinates(
    curve: &HyperellipticCurve,
    e: &[C64],
    config: &ThetaConfig,
) -> Result<KleinCoordinates, KernelError> {
    let jet = theta_off_divisor(curve, e, 2, config)?;
    let g = jet.genus();
    let t = jet.value;
    Ok(KleinCoordinates {
        matrix: DMatrix::from_fn(g, g, |i, j| {
            (t * jet.hessian[(i, j)] - jet.gradient[i] * jet.gradient[j]) / (t * t)
        }),
    })
}

/// The odd characteristics whose theta gradient at the origin is nonzero, lexicographic.
pub fn nonsingular_odd_characteristics(
    curve: &HyperellipticCurve,
    config: &ThetaConfig,
) -> Result<Vec<Characteristic>, KernelError> {
    let omega = curve.riemann_matrix();
    let g = omega.genus();
    let zero = vec![C64::new(0.0, 0.0); g];
    let mut out = Vec::new();
    for ch in Characteristic::all(g).into_iter().filter(|c| c.is_odd()) {
        let jet = theta_jet(&zero, &ch, omega, 1, config.tol)?;
        if gradient_norm(&jet) > 1e-8 * gradient_scale(&jet) {
            out.push(ch);
        }
    }
    Ok(out)
}

/// The first nonsingular odd characteristic in lexicographic order.
pub fn select_odd_characteristic(
    curve: &HyperellipticCurve,
    config: &ThetaConfig,
) -> Result<Characteristic, KernelError> {
    nonsingular_odd_characteristics(curve, config)?
        .into_iter()
        .next()
        .ok_or(KernelError::NoNonsingularOddCharacteristic)
}

fn gradient_norm(jet: &ThetaJet) -> f64 {
    jet.gradient.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Natural size of a gradient: each term carries a factor of about `2 pi`.
fn gradient_scale(jet: &ThetaJet) -> f64 {
    2.0 * std::f64::consts::PI * jet.max_term
}

fn weight_power(c: C64, w: f64) -> C64 {
    if w.fract() == 0.0 {
        c.powi(w as i32)
    } else {
        c.powf(w)
    }
}

#[derive(Debug, Clone, Copy)]
struct Branch {
    x: C64,
    y: C64,
    h: C64,
}

/// Evaluator for the kernels of one curve with a fixed odd characteristic.
///
/// The square root `h` of the half-differential in the prime form is chosen at the
/// first evaluation near a point and reused by continuity afterwards, so repeated
/// evaluations in one session are consistent.
#[derive(Debug)]
pub struct Kernels<'a> {
    curve: &'a HyperellipticCurve,
    config: ThetaConfig,
    delta: Characteristic,
    /// Theta jet of the odd characteristic at the origin, through third order.
    delta_jet: ThetaJet,
    branches: Mutex<Vec<Branch>>,
}

impl<'a> Kernels<'a> {
    pub fn new(curve: &'a HyperellipticCurve) -> Result<Self, KernelError> {
        Self::with_config(curve, ThetaConfig::default())
    }

    pub fn with_config(curve: &'a HyperellipticCurve, config: ThetaConfig) -> Result<Self, KernelError> {
        let delta = select_odd_characteristic(curve, &config)?;
        Self::with_characteristic(curve, delta, config)
    }

    pub fn with_characteristic(
        curve: &'a HyperellipticCurve,
        delta: Characteristic,
        config: ThetaConfig,
    ) -> Result<Self, KernelError> {
        let omega = curve.riemann_matrix();
        if delta.genus() != omega.genus() || !delta.is_odd() {
            return Err(KernelError::NotAnOddCharacteristic);
        }
        let zero = vec![C64::new(0.0, 0.0); omega.genus()];
        let delta_jet = theta_jet(&zero, &delta, omega, 3, config.tol)?;
        if gradient_norm(&delta_jet) <= 1e-8 * gradient_scale(&delta_jet) {
            return Err(KernelError::NoNonsingularOddCharacteristic);
        }
        Ok(Self {
            curve,
            config,
            delta,
            delta_jet,
            branches: Mutex::new(Vec::new()),
        })
    }

    pub fn curve(&self) -> &HyperellipticCurve {
        self.curve
    }

    pub fn characteristic(&self) -> &Characteristic {
        &self.delta
    }

    pub fn config(&self) -> &ThetaConfig {
        &self.config
    }

    /// `dx/dt` at `p` for a chart centered there.
    pub fn dx_dt(&self, p: &SurfacePoint, chart: Chart) -> Result<C64, KernelError> {
        match chart {
            Chart::Linear { scale } => {
                if scale.norm() == 0.0 || !scale.is_finite() {
                    return Err(CurveError::DegenerateChart.into());
                }
                Ok(scale)
            }
            Chart::Abelian { index } => {
                let w = self.curve.omega_dx(p);
                let wi = w.get(index).copied().ok_or(CurveError::DegenerateChart)?;
                if wi.norm() == 0.0 {
                    return Err(CurveError::DegenerateChart.into());
                }
                Ok(C64::new(1.0, 0.0) / wi)
            }
        }
    }

    /// Rescales a value computed in the `dx` charts to the given charts.
    fn charted(
        &self,
        value: C64,
        x: &SurfacePoint,
        y: &SurfacePoint,
        charts: [Chart; 2],
        weight: (f64, f64),
        pole: i32,
    ) -> Result<KernelValue, KernelError> {
        let fx = weight_power(self.dx_dt(x, charts[0])?, weight.0);
        let fy = weight_power(self.dx_dt(y, charts[1])?, weight.1);
        Ok(KernelValue {
            value: value * fx * fy,
            chart_x: charts[0],
            chart_y: charts[1],
            weight,
            pole,
        })
    }

    fn off_diagonal(&self, x: &SurfacePoint, y: &SurfacePoint) -> Result<(), KernelError> {
        if x == y {
            return Err(KernelError::OnDiagonal);
        }
        Ok(())
    }

    /// `h(p)^2 = sum_i d_i theta[delta](0) omega_i(p) / dx`.
    pub fn half_form_squared(&self, p: &SurfacePoint) -> C64 {
        let w = self.curve.omega_dx(p);
        self.delta_jet.gradient.iter().zip(&w).map(|(a, b)| a * b).sum()
    }

    /// Session-consistent square root of [`half_form_squared`](Self::half_form_squared).
    pub fn half_form(&self, p: &SurfacePoint) -> Result<C64, KernelError> {
        let h2 = self.half_form_squared(p);
        let w = self.curve.omega_dx(p);
        let size = gradient_norm(&self.delta_jet) * w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(h2.norm() > BRANCH_FLOOR * size) {
            return Err(KernelError::SquareRootBranchUnresolvable { re: p.x.re, im: p.x.im });
        }
        let y = self.curve.y(p);
        let reach = 0.25 * self.curve.branch_distance(p.x);
        let mut cache = self.branches.lock().expect("branch cache poisoned");
        let nearest = cache
            .iter()
            .filter(|b| (b.y - y).norm() < (b.y + y).norm())
            .map(|b| ((b.x - p.x).norm(), b))
            .filter(|(d, _)| *d <= reach)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(d, b)| (d, *b));
        let root = h2.sqrt();
        let h = match nearest {
            Some((0.0, b)) => return Ok(b.h),
            Some((_, b)) if (root + b.h).norm() < (root - b.h).norm() => -root,
            _ => root,
        };
        cache.push(Branch { x: p.x, y, h });
        Ok(h)
    }

    /// `A(x) - A(y)`.
    pub fn difference(&self, x: &SurfacePoint, y: &SurfacePoint) -> Result<Vec<C64>, KernelError> {
        Ok(self.curve.abel_difference(x, y)?)
    }

    fn delta_theta(&self, z: &[C64], order: usize) -> Result<ThetaJet, KernelError> {
        Ok(theta_jet(z, &self.delta, self.curve.riemann_matrix(), order, self.config.tol)?)
    }

    /// `E(x, y) = theta[delta](A(x) - A(y)) / (h(x) h(y))`, weight `(-1/2, -1/2)`.
    pub fn prime_form(&self, x: &SurfacePoint, y: &SurfacePoint, charts: [Chart; 2]) -> Result<KernelValue, KernelError> {
        self.off_diagonal(x, y)?;
        let d = self.difference(x, y)?;
        let e = self.prime_form_dx(x, y, &d)?;
        self.charted(e, x, y, charts, (-0.5, -0.5), -1)
    }

    fn prime_form_dx(&self, x: &SurfacePoint, y: &SurfacePoint, d: &[C64]) -> Result<C64, KernelError> {
        let jet = self.delta_theta(d, 0)?;
        let hx = self.half_form(x)?;
        let hy = self.half_form(y)?;
        Ok(jet.scaled_value().to_c64() / (hx * hy))
    }

    /// `d_x d_y log E(x, y) = -sum_ij d_i d_j log theta[delta](A(x) - A(y)) omega_i(x) omega_j(y)`.
    pub fn bergman(&self, x: &SurfacePoint, y: &SurfacePoint, charts: [Chart; 2]) -> Result<KernelValue, KernelError> {
        self.off_diagonal(x, y)?;
        let d = self.difference(x, y)?;
        let v = self.bergman_dx(x, y, &d)?;
        self.charted(v, x, y, charts, (1.0, 1.0), 2)
    }

    fn bergman_dx(&self, x: &SurfacePoint, y: &SurfacePoint, d: &[C64]) -> Result<C64, KernelError> {
        let jet = self.delta_theta(d, 2)?;
        if jet.value.norm() == 0.0 {
            return Err(KernelError::OnDiagonal);
        }
        let wx = self.curve.omega_dx(x);
        let wy = self.curve.omega_dx(y);
        Ok(-contract(&log_hessian(&jet), &wx, &wy))
    }

    /// `theta(A(y) - A(x) + e) / (theta(e) E(x, y))`, weight `(1/2, 1/2)`.
    pub fn szego(&self, e: &[C64], x: &SurfacePoint, y: &SurfacePoint, charts: [Chart; 2]) -> Result<KernelValue, KernelError> {
        self.klein_with(&[e.to_vec()], x, y, charts)
    }

    /// `prod_i sigma_{e_i}(x, y)` for `sum_i e_i = 0` modulo the lattice.
    pub fn klein(&self, es: &[Vec<C64>], x: &SurfacePoint, y: &SurfacePoint, charts: [Chart; 2]) -> Result<KernelValue, KernelError> {
        if es.is_empty() {
            return Err(KernelError::InvalidArgument("empty list of Jacobian points".into()));
        }
        let g = self.curve.genus();
        let mut sum = vec![C64::new(0.0, 0.0); g];
        for e in es {
            check_len(g, e.len())?;
            for (s, z) in sum.iter_mut().zip(e) {
                *s += z;
            }
        }
        let distance = self.curve.riemann_matrix().lattice_distance(&sum);
        if distance > SUM_TOLERANCE {
            return Err(KernelError::ConstraintViolation { distance });
        }
        self.klein_with(es, x, y, charts)
    }

    fn klein_with(&self, es: &[Vec<C64>], x: &SurfacePoint, y: &SurfacePoint, charts: [Chart; 2]) -> Result<KernelValue, KernelError> {
        self.off_diagonal(x, y)?;
        let d = self.difference(x, y)?;
        let e_xy = self.prime_form_dx(x, y, &d)?;
        let mut value = C64::new(1.0, 0.0);
        for e in es {
            value *= self.theta_ratio(e, &d)? / e_xy;
        }
        let n = es.len() as f64;
        self.charted(value, x, y, charts, (n / 2.0, n / 2.0), es.len() as i32)
    }

    /// `theta(e - d) / theta(e)` with `d = A(x) - A(y)`.
    fn theta_ratio(&self, e: &[C64], d: &[C64]) -> Result<C64, KernelError> {
        let base = theta_off_divisor(self.curve, e, 0, &self.config)?;
        let shifted: Vec<C64> = e.iter().zip(d).map(|(a, b)| a - b).collect();
        let top = theta_jet(
            &shifted,
            &Characteristic::zero(e.len()),
            self.curve.riemann_matrix(),
            0,
            self.config.tol,
        )?;
        Ok(top.value / base.value * (top.log_scale - base.log_scale).exp())
    }

    /// Klein coordinates `d^2 log theta(e)`.
    pub fn klein_coordinates(&self, e: &[C64]) -> Result<KleinCoordinates, KernelError> {
        klein_coordinates(self.curve, e, &self.config)
    }

    /// The right-hand side of Fay's identity for `Kl(e, -e)`:
    /// `omega_B(x, y) + sum_ij c_ij(e) omega_i(x) omega_j(y)`, in the `dx` charts.
    pub fn fay_rhs(&self, e: &[C64], x: &SurfacePoint, y: &SurfacePoint) -> Result<C64, KernelError> {
        self.off_diagonal(x, y)?;
        let c = self.klein_coordinates(e)?;
        let d = self.difference(x, y)?;
        let wx = self.curve.omega_dx(x);
        let wy = self.curve.omega_dx(y);
        Ok(self.bergman_dx(x, y, &d)? + contract(&c.matrix, &wx, &wy))
    }

    /// Relative Fay residual `|Kl(e, -e) - omega_B - sum c_ij omega_i omega_j| / |Kl(e, -e)|`.
    pub fn fay_residual(&self, e: &[C64], x: &SurfacePoint, y: &SurfacePoint) -> Result<f64, KernelError> {
        let minus: Vec<C64> = e.iter().map(|z| -z).collect();
        let kl = self.klein(&[e.to_vec(), minus], x, y, [Chart::default(); 2])?.value;
        let rhs = self.fay_rhs(e, x, y)?;
        Ok((kl - rhs).norm() / kl.norm())
    }

    /// `oint_{A_k} omega_B(x, .)` by the periodic trapezoid rule with `nodes` points.
    ///
    /// The Abel map along the cycle is the running integral of the normalized
    /// differentials, integrated spectrally from their discrete Fourier series.
    pub fn bergman_a_period(&self, x: &SurfacePoint, k: usize, nodes: usize) -> Result<C64, KernelError> {
        let g = self.curve.genus();
        if k >= g || nodes < 4 {
            return Err(KernelError::InvalidArgument(format!("cycle {k} with {nodes} nodes")));
        }
        let step = 2.0 * std::f64::consts::PI / nodes as f64;
        let thetas: Vec<f64> = (0..nodes).map(|m| (m as f64 + 0.5) * step).collect();
        let forms: Vec<Vec<C64>> = thetas.iter().map(|&t| self.curve.a_cycle_forms(k, t)).collect();
        let start = self.curve.abel_of_branch(2 * k + 1)?;
        let ax = self.curve.abel(x)?;
        let wx = self.curve.omega_dx(x);
        let running: Vec<Vec<C64>> = (0..g)
            .map(|i| {
                let samples: Vec<C64> = forms.iter().map(|f| f[i]).collect();
                periodic_antiderivative(&samples, &thetas)
            })
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for (m, f) in forms.iter().enumerate() {
            let d: Vec<C64> = (0..g).map(|i| ax[i] - start[i] - running[i][m]).collect();
            let jet = self.delta_theta(&d, 2)?;
            total -= contract(&log_hessian(&jet), &wx, f) * step;
        }
        Ok(total * self.curve.a_cycle_orientation(k))
    }

    /// `(t_x - t_y)^pole K(x, y)` extrapolated to the diagonal from separations
    /// `s, s/2, s/4` along `direction` in the linear chart `t = x - x0`.
    pub fn diagonal_limit(
        &self,
        kernel: &DiagonalKernel,
        x: &SurfacePoint,
        direction: C64,
        s: f64,
    ) -> Result<C64, KernelError> {
        limits::diagonal_limit(self, kernel, x, direction, s)
    }
}

/// `d^2 log theta` from a jet, scale-free.
fn log_hessian(jet: &ThetaJet) -> DMatrix<C64> {
    let g = jet.genus();
    let t = jet.value;
    DMatrix::from_fn(g, g, |i, j| (t * jet.hessian[(i, j)] - jet.gradient[i] * jet.gradient[j]) / (t * t))
}

/// `u^T c v`.
fn contract(c: &DMatrix<C64>, u: &[C64], v: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..u.len() {
        for j in 0..v.len() {
            acc += c[(i, j)] * u[i] * v[j];
        }
    }
    acc
}

/// Values at `thetas` of `int_0^theta f` for `f` sampled on the uniform grid `thetas`
/// (offset by half a step), from its discrete Fourier series.
fn periodic_antiderivative(samples: &[C64], thetas: &[f64]) -> Vec<C64> {
    let n = samples.len();
    let half = (n / 2) as i64;
    let modes: Vec<(i64, C64)> = (-half..=half)
        .filter(|&m| !(n.is_multiple_of(2) && m == half))
        .map(|m| {
            let c: C64 = samples
                .iter()
                .zip(thetas)
                .map(|(f, &t)| f * C64::from_polar(1.0, -(m as f64) * t))
                .sum::<C64>()
                / n as f64;
            (m, c)
        })
        .collect();
    thetas
        .iter()
        .map(|&t| {
            modes
                .iter()
                .map(|&(m, c)| {
                    if m == 0 {
                        c * t
                    } else {
                        let im = C64::new(0.0, m as f64);
                        c * (C64::from_polar(1.0, m as f64 * t) - 1.0) / im
                    }
                })
                .sum()
        })
        .collect()
}
