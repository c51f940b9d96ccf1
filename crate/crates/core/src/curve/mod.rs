//! Hyperelliptic curves `y^2 = f(x)`: branch points, holomorphic differentials,
//! period matrices, the Abel map and local series expansions.
//!
//! Homology convention: finite branch points are sorted lexicographically
//! (real part, then imaginary part) and `infinity` is appended for odd degree.
//! Cuts join consecutive pairs `(b1 b2), (b3 b4), ...`; `A_k` encircles the `k`-th
//! cut and `B_k` encircles the branch points `b_{2k} .. b_{2g+1}`, so it runs from
//! cut `k` to cut `g + 1` on one sheet and back on the other. The orientations
//! are the ones making `Omega` symmetric with positive imaginary part.
//!
//! The Abel map is based at `b1`.

mod abel;
mod expansion;
mod periods;
pub mod quadrature;
pub mod roots;

pub use expansion::{Chart, LocalExpansion};
pub use periods::Periods;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::theta::{RiemannMatrix, ThetaError};
use crate::C64;

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-11;
pub const DEFAULT_MARGIN: f64 = 1e-3;
/// Largest order accepted by [`HyperellipticCurve::local_expansion`].
pub const MAX_EXPANSION_ORDER: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("degree {0} is below 3")]
    DegreeTooSmall(usize),
    #[error("f is not squarefree (closest roots {distance:e} apart, relative slope {slope:e})")]
    NonSquarefree { distance: f64, slope: f64 },
    #[error("root finding failed")]
    RootFinding,
    #[error("coefficient {0} is not finite")]
    NonFinite(usize),
    #[error("period quadrature did not converge with {nodes} nodes (last change {change:e})")]
    QuadratureNonConvergent { nodes: usize, change: f64 },
    #[error("no orientation of the B-cycles satisfies the Riemann relations")]
    RiemannRelations,
    #[error("no admissible path avoids the branch points near ({re}, {im})")]
    PathThroughBranchPoint { re: f64, im: f64 },
    #[error("point is {distance:e} from a branch point, inside the margin {margin:e}")]
    InadmissiblePoint { distance: f64, margin: f64 },
    #[error("sheet must be +1 or -1, got {0}")]
    InvalidSheet(i8),
    #[error("expansion order {0} outside 1..=32")]
    OrderOutOfRange(usize),
    #[error("chart is degenerate at this point")]
    DegenerateChart,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveConfig {
    /// Successive node doublings must agree to this (relative) tolerance.
    pub quadrature_tol: f64,
    /// Admissible points and paths stay this far (times the root scale) from branch points.
    pub margin: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            quadrature_tol: DEFAULT_QUADRATURE_TOL,
            margin: DEFAULT_MARGIN,
        }
    }
}

/// A point `(x, y)` with `y = sheet * sqrt(f(x))`, principal square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub x: C64,
    pub sheet: i8,
}

impl SurfacePoint {
    pub fn new(x: C64, sheet: i8) -> Self {
        Self { x, sheet }
    }

    /// The image under the hyperelliptic involution `(x, y) -> (x, -y)`.
    pub fn involution(&self) -> Self {
        Self {
            x: self.x,
            sheet: -self.sheet,
        }
    }
}

/// `sum_j coeffs[j] x^j dx / y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Differential {
    pub coeffs: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BranchPoint {
    Finite(C64),
    Infinity(&'static str),
}

#[derive(Debug, Clone)]
pub struct HyperellipticCurve {
    coeffs: Vec<C64>,
    genus: usize,
    /// Finite branch points in lexicographic order.
    roots: Vec<C64>,
    scale: f64,
    config: CurveConfig,
    periods: Periods,
}

impl HyperellipticCurve {
    pub fn new(f_coeffs: &[C64]) -> Result<Self, CurveError> {
        Self::with_config(f_coeffs, CurveConfig::default())
    }

    pub fn with_config(f_coeffs: &[C64], config: CurveConfig) -> Result<Self, CurveError> {
        if !(config.quadrature_tol > 0.0) || !(config.margin > 0.0) {
            return Err(CurveError::InvalidConfig("tolerances must be positive"));
        }
        if let Some(k) = f_coeffs.iter().position(|c| !c.is_finite()) {
            return Err(CurveError::NonFinite(k));
        }
        let coeffs = roots::trim(f_coeffs);
        let degree = coeffs.len().saturating_sub(1);
        if degree < 3 {
            return Err(CurveError::DegreeTooSmall(degree));
        }
        let mut found = roots::roots(&coeffs).ok_or(CurveError::RootFinding)?;
        if found.iter().any(|r| !r.is_finite()) {
            return Err(CurveError::RootFinding);
        }
        roots::sort_lex(&mut found);
        let scale = found.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let mut distance = f64::INFINITY;
        for i in 0..found.len() {
            for j in i + 1..found.len() {
                distance = distance.min((found[i] - found[j]).norm());
            }
        }
        let slope = found
            .iter()
            .map(|&r| roots::relative_slope(&coeffs, r))
            .fold(f64::INFINITY, f64::min);
        // a multiple root only resolves to ~sqrt(eps) in floating point, so the
        // separation test alone cannot see it
        if !(scale > 0.0) || distance <= 1e-10 * scale || slope < 1e-7 {
            return Err(CurveError::NonSquarefree { distance, slope });
        }
        let genus = (degree - 1) / 2;
        let lead = coeffs[degree];
        let periods = periods::compute(lead, &found, genus, config.quadrature_tol)?;
        Ok(Self {
            coeffs,
            genus,
            roots: found,
            scale,
            config,
            periods,
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn config(&self) -> &CurveConfig {
        &self.config
    }

    /// Largest root modulus.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn finite_branch_points(&self) -> &[C64] {
        &self.roots
    }

    pub fn branch_at_infinity(&self) -> bool {
        self.degree() % 2 == 1
    }

    pub fn branch_points(&self) -> Vec<BranchPoint> {
        let mut out: Vec<BranchPoint> = self.roots.iter().map(|&r| BranchPoint::Finite(r)).collect();
        if self.branch_at_infinity() {
            out.push(BranchPoint::Infinity("inf"));
        }
        out
    }

    fn lead(&self) -> C64 {
        self.coeffs[self.degree()]
    }

    /// `f(x)` from its factored form, accurate near the roots.
    pub fn f(&self, x: C64) -> C64 {
        self.roots.iter().fold(self.lead(), |acc, r| acc * (x - r))
    }

    /// `f(x) / (x - root_m)`.
    pub(crate) fn f_without(&self, x: C64, m: usize) -> C64 {
        self.roots
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != m)
            .fold(self.lead(), |acc, (_, r)| acc * (x - r))
    }

    pub fn y(&self, p: &SurfacePoint) -> C64 {
        self.f(p.x).sqrt() * p.sheet as f64
    }

    /// Distance from `x` to the nearest finite branch point.
    pub fn branch_distance(&self, x: C64) -> f64 {
        self.roots.iter().map(|r| (x - r).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Validates a point: finite, regular, at least `margin * scale` from the branch points.
    pub fn point(&self, x: C64, sheet: i8) -> Result<SurfacePoint, CurveError> {
        if sheet != 1 && sheet != -1 {
            return Err(CurveError::InvalidSheet(sheet));
        }
        let margin = self.config.margin * self.scale;
        let distance = self.branch_distance(x);
        if !x.is_finite() || distance < margin {
            return Err(CurveError::InadmissiblePoint { distance, margin });
        }
        Ok(SurfacePoint { x, sheet })
    }

    /// The raw basis `x^{i-1} dx / y`, `i = 1..g`.
    pub fn raw_differentials(&self) -> Vec<Differential> {
        (0..self.genus)
            .map(|i| Differential {
                coeffs: (0..self.genus)
                    .map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect(),
            })
            .collect()
    }

    /// The basis with A-periods the identity.
    pub fn normalized_differentials(&self) -> Vec<Differential> {
        let c = &self.periods.normalization;
        (0..self.genus)
            .map(|i| Differential {
                coeffs: (0..self.genus).map(|j| c[(i, j)]).collect(),
            })
            .collect()
    }

    pub fn periods(&self) -> &Periods {
        &self.periods
    }

    pub fn riemann_matrix(&self) -> &RiemannMatrix {
        &self.periods.omega
    }

    /// Raw differentials `x^j / y` at a point, `j < g`.
    pub(crate) fn raw_at(&self, x: C64, y: C64) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.genus);
        let mut xp = C64::new(1.0, 0.0) / y;
        for _ in 0..self.genus {
            out.push(xp);
            xp *= x;
        }
        out
    }

    pub(crate) fn normalize(&self, raw: &[C64]) -> Vec<C64> {
        let c = &self.periods.normalization;
        (0..self.genus)
            .map(|i| (0..self.genus).map(|j| c[(i, j)] * raw[j]).sum())
            .collect()
    }

    /// `omega_i / dx` of the normalized differentials at `p`.
    pub fn omega_dx(&self, p: &SurfacePoint) -> Vec<C64> {
        self.normalize(&self.raw_at(p.x, self.y(p)))
    }

    /// Canonical representative of `z` modulo `Z^g + Omega Z^g`.
    pub fn reduce_mod_lattice(&self, z: &[C64]) -> Vec<C64> {
        self.periods.omega.reduce(z)
    }

    /// Point on the `k`-th A-cycle collapsed onto its cut, `x = mid + half cos(theta)`.
    /// At `theta = 0` it sits on the branch point with index `2k + 1`.
    pub fn a_cycle_point(&self, k: usize, theta: f64) -> (C64, C64) {
        let seg = periods::Segment::new(self.lead(), &self.roots, 2 * k);
        (seg.point(theta.cos()), seg.loop_y(theta))
    }

    /// Normalized differentials along the `k`-th A-cycle, per unit `theta`.
    pub fn a_cycle_forms(&self, k: usize, theta: f64) -> Vec<C64> {
        let seg = periods::Segment::new(self.lead(), &self.roots, 2 * k);
        self.normalize(&seg.loop_forms(theta, self.genus))
    }

    /// `+1` or `-1`: the loop of [`a_cycle_forms`](Self::a_cycle_forms), taken with this sign,
    /// has periods `e_k`.
    pub fn a_cycle_orientation(&self, k: usize) -> f64 {
        -self.periods.cut_signs[k]
    }

    /// A-periods of the normalized differentials, recomputed by quadrature with `nodes`
    /// Chebyshev nodes.
    pub fn normalized_a_periods(&self, nodes: usize) -> DMatrix<C64> {
        let raw = periods::a_periods(&self.roots, self.lead(), self.genus, &self.periods, nodes);
        &self.periods.normalization * raw
    }
}
