use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::quadrature::chebyshev_nodes;
use super::CurveError;
use crate::theta::RiemannMatrix;
use crate::C64;

const FIRST_NODES: usize = 32;
const MAX_NODES: usize = 4096;
const ARC_STEPS: usize = 512;

/// Period data of a curve.
#[derive(Debug, Clone)]
pub struct Periods {
    /// `a[(i, j)]` is the integral of `x^i dx / y` over `A_j`.
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
    pub omega: RiemannMatrix,
    /// `A^{-1}`: row `i` holds the raw coordinates of the `i`-th normalized differential.
    pub normalization: DMatrix<C64>,
    /// `max |Omega - Omega^T|` before symmetrization.
    pub asymmetry: f64,
    /// Chebyshev nodes used by the converged rule.
    pub nodes: usize,
    /// Sign of `y` on each cut relative to its reference branch.
    pub(crate) cut_signs: Vec<f64>,
}

/// Straight segment between consecutive branch points `a -> b` with
/// `y = i (b - a)/2 sqrt(1 - s^2) K h(s)` on its reference branch.
pub(crate) struct Segment {
    pub a: C64,
    pub b: C64,
    others: Vec<C64>,
    k: C64,
}

impl Segment {
    pub fn new(lead: C64, roots: &[C64], i: usize) -> Self {
        let (a, b) = (roots[i], roots[i + 1]);
        let others: Vec<C64> = roots
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != i + 1)
            .map(|(_, &r)| r)
            .collect();
        let k = others.iter().fold(lead, |acc, e| acc * (a - e)).sqrt();
        Self { a, b, others, k }
    }

    fn half(&self) -> C64 {
        (self.b - self.a) * 0.5
    }

    pub fn point(&self, s: f64) -> C64 {
        (self.a + self.b) * 0.5 + self.half() * s
    }

    /// Continuous along the segment since no other root lies on it.
    fn h(&self, s: f64) -> C64 {
        let x = self.point(s);
        self.others
            .iter()
            .fold(C64::new(1.0, 0.0), |acc, e| acc * ((x - e) / (self.a - e)).sqrt())
    }

    pub fn y(&self, s: f64) -> C64 {
        C64::new(0.0, 1.0) * self.half() * (1.0 - s * s).max(0.0).sqrt() * self.k * self.h(s)
    }

    /// `y` on the closed loop around the segment: `x = mid + half cos(theta)`.
    pub fn loop_y(&self, theta: f64) -> C64 {
        C64::new(0.0, 1.0) * self.half() * theta.sin() * self.k * self.h(theta.cos())
    }

    /// `x^j (dx / dtheta) / y` on the loop, `j < g`; the `sin(theta)` factors cancel.
    pub fn loop_forms(&self, theta: f64, g: usize) -> Vec<C64> {
        let x = self.point(theta.cos());
        let mut term = C64::new(0.0, 1.0) / (self.k * self.h(theta.cos()));
        let mut out = Vec::with_capacity(g);
        for _ in 0..g {
            out.push(term);
            term *= x;
        }
        out
    }

    /// Integrals of `x^j dx / y`, `j < g`, over the segment on the reference branch.
    pub fn integrals(&self, g: usize, n: usize) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); g];
        for s in chebyshev_nodes(n) {
            let x = self.point(s);
            let mut term = C64::new(1.0, 0.0) / self.h(s);
            for a in acc.iter_mut() {
                *a += term;
                term *= x;
            }
        }
        let factor = C64::new(PI / n as f64, 0.0) / (C64::new(0.0, 1.0) * self.k);
        acc.iter().map(|a| a * factor).collect()
    }
}

pub(crate) fn sqrt_near(v: C64, prev: C64) -> C64 {
    let s = v.sqrt();
    if (s - prev).norm() <= (s + prev).norm() {
        s
    } else {
        -s
    }
}

fn f_at(lead: C64, roots: &[C64], x: C64) -> C64 {
    roots.iter().fold(lead, |acc, r| acc * (x - r))
}

/// Relative sign of the reference branches of consecutive chain segments when `y` is
/// continued past their shared vertex with the vertex on the right.
fn vertex_sign(lead: C64, roots: &[C64], left: &Segment, right: &Segment) -> f64 {
    let v = left.b;
    let near = roots
        .iter()
        .filter(|&&r| r != v)
        .map(|r| (r - v).norm())
        .fold(f64::INFINITY, f64::min);
    let rho = 0.25 * near.min((left.b - left.a).norm()).min((right.b - right.a).norm());
    let phi0 = (left.a - v).arg();
    let phi1 = (right.b - v).arg();
    let sweep = -(phi0 - phi1).rem_euclid(2.0 * PI);
    let sweep = if sweep == 0.0 { -2.0 * PI } else { sweep };
    let mut y = left.y(1.0 - 2.0 * rho / (left.b - left.a).norm());
    for k in 1..=ARC_STEPS {
        let phi = phi0 + sweep * k as f64 / ARC_STEPS as f64;
        let x = v + C64::from_polar(rho, phi);
        y = sqrt_near(f_at(lead, roots, x), y);
    }
    let reference = right.y(-1.0 + 2.0 * rho / (right.b - right.a).norm());
    if (y * reference.conj()).re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn chain(lead: C64, roots: &[C64], genus: usize) -> Vec<Segment> {
    (0..2 * genus).map(|i| Segment::new(lead, roots, i)).collect()
}

pub(crate) fn compute(lead: C64, roots: &[C64], genus: usize, tol: f64) -> Result<Periods, CurveError> {
    let segments = chain(lead, roots, genus);
    let mut signs = vec![1.0];
    for w in segments.windows(2) {
        let last = *signs.last().expect("nonempty");
        signs.push(last * vertex_sign(lead, roots, &w[0], &w[1]));
    }

    let mut n = FIRST_NODES;
    let mut prev: Vec<Vec<C64>> = segments.iter().map(|s| s.integrals(genus, n)).collect();
    let integrals = loop {
        let next_n = 2 * n;
        let next: Vec<Vec<C64>> = segments.iter().map(|s| s.integrals(genus, next_n)).collect();
        let mut change = 0.0f64;
        let mut size = 0.0f64;
        for (p, q) in prev.iter().zip(&next) {
            for (a, b) in p.iter().zip(q) {
                change = change.max((a - b).norm());
                size = size.max(b.norm());
            }
        }
        n = next_n;
        if change <= tol * size.max(1e-300) {
            break next;
        }
        if n >= MAX_NODES {
            return Err(CurveError::QuadratureNonConvergent {
                nodes: n,
                change: change / size.max(1e-300),
            });
        }
        prev = next;
    };

    let g = genus;
    let a = DMatrix::from_fn(g, g, |i, k| integrals[2 * k][i] * 2.0 * signs[2 * k]);
    let b = DMatrix::from_fn(g, g, |i, k| {
        (k..g).map(|j| integrals[2 * j + 1][i] * signs[2 * j + 1]).sum::<C64>() * 2.0
    });
    let normalization = a.clone().try_inverse().ok_or(CurveError::RiemannRelations)?;
    let tau = &normalization * &b;

    // orient the B-cycles so that the Riemann relations hold
    let mut best: Option<(f64, RiemannMatrix, Vec<f64>)> = None;
    for mask in 0..(1usize << g) {
        let flips: Vec<f64> = (0..g).map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let candidate = DMatrix::from_fn(g, g, |i, k| tau[(i, k)] * flips[k]);
        let asym = (0..g)
            .flat_map(|i| (0..g).map(move |k| (i, k)))
            .map(|(i, k)| (candidate[(i, k)] - candidate[(k, i)]).norm())
            .fold(0.0, f64::max);
        if let Ok(rm) = RiemannMatrix::new(candidate) {
            if best.as_ref().is_none_or(|(a, _, _)| asym < *a) {
                best = Some((asym, rm, flips));
            }
        }
    }
    let (asymmetry, omega, flips) = best.ok_or(CurveError::RiemannRelations)?;
    let b = DMatrix::from_fn(g, g, |i, k| b[(i, k)] * flips[k]);
    Ok(Periods {
        a,
        b,
        omega,
        normalization,
        asymmetry,
        nodes: n,
        cut_signs: (0..g).map(|k| signs[2 * k]).collect(),
    })
}

/// Raw A-periods recomputed with a fixed number of nodes.
pub(crate) fn a_periods(roots: &[C64], lead: C64, genus: usize, periods: &Periods, n: usize) -> DMatrix<C64> {
    let segments = chain(lead, roots, genus);
    DMatrix::from_fn(genus, genus, |i, k| {
        segments[2 * k].integrals(genus, n)[i] * 2.0 * periods.cut_signs[k]
    })
}
