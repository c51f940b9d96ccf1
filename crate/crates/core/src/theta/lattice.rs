//! Enumeration of integer points inside the ellipsoid `||T (n + c)|| <= R`.

use nalgebra::DMatrix;

use super::{RiemannMatrix, ThetaError};

/// Integer vectors `n` with `||T (n + center)|| <= radius`, where `T` is the
/// Cholesky factor of `pi * Im(Omega)`. Lexicographically sorted.
pub fn lattice_points(
    omega: &RiemannMatrix,
    center: &[f64],
    radius: f64,
) -> Result<Vec<Vec<i64>>, ThetaError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(ThetaError::InvalidRadius(radius));
    }
    if center.len() != omega.genus() {
        return Err(ThetaError::DimensionMismatch {
            expected: omega.genus(),
            found: center.len(),
        });
    }
    Ok(enumerate(omega.cholesky(), center, radius))
}

pub(crate) fn enumerate(t: &DMatrix<f64>, center: &[f64], radius: f64) -> Vec<Vec<i64>> {
    let g = t.nrows();
    let mut out = Vec::new();
    let mut n = vec![0i64; g];
    descend(t, center, radius * radius, g, 0.0, &mut n, &mut out);
    out.retain(|p| norm_sq(t, center, p) <= radius * radius);
    out.sort();
    out
}

fn descend(
    t: &DMatrix<f64>,
    c: &[f64],
    r2: f64,
    level: usize,
    used: f64,
    n: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if level == 0 {
        out.push(n.clone());
        return;
    }
    let i = level - 1;
    let mut s = 0.0;
    for j in (i + 1)..t.ncols() {
        s += t[(i, j)] * (n[j] as f64 + c[j]);
    }
    let rem = (r2 - used).max(0.0).sqrt();
    let d = t[(i, i)];
    // widen slightly so boundary points survive rounding; the exact filter runs afterwards
    let slack = 1e-9 * (1.0 + rem);
    let lo = ((-rem - slack - s) / d - c[i]).ceil() as i64;
    let hi = ((rem + slack - s) / d - c[i]).floor() as i64;
    for k in lo..=hi {
        n[i] = k;
        let v = d * (k as f64 + c[i]) + s;
        let u = used + v * v;
        if u <= r2 * (1.0 + 1e-12) + 1e-300 {
            descend(t, c, r2, i, u, n, out);
        }
    }
    n[i] = 0;
}

fn norm_sq(t: &DMatrix<f64>, c: &[f64], n: &[i64]) -> f64 {
    let g = t.nrows();
    (0..g)
        .map(|i| {
            let s: f64 = (i..g).map(|j| t[(i, j)] * (n[j] as f64 + c[j])).sum();
            s * s
        })
        .sum()
}

/// Length of the shortest nonzero vector of `T Z^g`.
pub(crate) fn shortest_vector_length(t: &DMatrix<f64>) -> f64 {
    let g = t.nrows();
    let zero = vec![0.0; g];
    // any column norm bounds the minimum from above
    let bound = (0..g)
        .map(|j| t.column(j).norm())
        .fold(f64::INFINITY, f64::min);
    enumerate(t, &zero, bound * (1.0 + 1e-9))
        .into_iter()
        .filter(|p| p.iter().any(|&k| k != 0))
        .map(|p| norm_sq(t, &zero, &p).sqrt())
        .fold(bound, f64::min)
}
