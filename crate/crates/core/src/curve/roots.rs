use nalgebra::DMatrix;

use crate::C64;

/// `sum_k c_k x^k`.
pub fn eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
}

pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Drops trailing zero coefficients.
pub fn trim(coeffs: &[C64]) -> Vec<C64> {
    let mut out = coeffs.to_vec();
    while out.last().is_some_and(|c| c.norm() == 0.0) {
        out.pop();
    }
    out
}

/// Roots of a polynomial of degree >= 1: companion-matrix eigenvalues polished by Newton.
/// Falls back to Aberth-Ehrlich iteration when the Schur iteration stalls.
pub fn roots(coeffs: &[C64]) -> Option<Vec<C64>> {
    let n = coeffs.len().checked_sub(1)?;
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 || coeffs.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let d = derivative(coeffs);
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let eig = companion
        .try_schur(f64::EPSILON, 100 * n)
        .and_then(|s| s.eigenvalues())
        .filter(|e| e.iter().all(|z| z.is_finite()));
    let start = match eig {
        Some(e) => e.iter().copied().collect(),
        None => aberth(coeffs, &d)?,
    };
    Some(start.into_iter().map(|r| polish(coeffs, &d, r)).collect())
}

fn aberth(coeffs: &[C64], d: &[C64]) -> Option<Vec<C64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let radius = (0..n)
        .map(|k| (coeffs[k] / lead).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..MAX_ITERATIONS {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = eval(coeffs, z[i]) / eval(d, z[i]);
            if !ratio.is_finite() || ratio.norm() == 0.0 {
                continue;
            }
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(radius * 1e-3));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z.iter().all(|r| r.is_finite()).then_some(z)
}

const MAX_ITERATIONS: usize = 500;

fn polish(p: &[C64], dp: &[C64], mut x: C64) -> C64 {
    let mut fx = eval(p, x).norm();
    for _ in 0..50 {
        let step = eval(p, x) / eval(dp, x);
        if !step.is_finite() {
            break;
        }
        let next = x - step;
        let fnext = eval(p, next).norm();
        if fnext >= fx {
            break;
        }
        x = next;
        fx = fnext;
        if step.norm() <= 1e-16 * x.norm().max(1e-300) {
            break;
        }
    }
    x
}

/// `|p'(r)|` relative to the size of the terms making it up.
pub fn relative_slope(coeffs: &[C64], r: C64) -> f64 {
    let d = derivative(coeffs);
    let mag: f64 = d
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * r.norm().powi(k as i32))
        .sum();
    if mag == 0.0 {
        return 0.0;
    }
    eval(&d, r).norm() / mag
}

/// Lexicographic order by real then imaginary part.
pub fn sort_lex(points: &mut [C64]) {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(c: &[f64]) -> Vec<C64> {
        c.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn cubic_roots() {
        let mut r = roots(&real(&[0.0, -1.0, 0.0, 1.0])).unwrap();
        sort_lex(&mut r);
        for (got, want) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - C64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn roots_of_unity() {
        let r = roots(&real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        for z in r {
            assert!((z.powu(5) - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn symmetric_quartic() {
        let r = roots(&real(&[1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.len(), 4);
        for z in &r {
            assert!((z.powu(4) + 1.0).norm() < 1e-13);
        }
        let mut re: Vec<f64> = r.iter().map(|z| z.re.signum() + 2.0 * z.im.signum()).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![-3.0, -1.0, 1.0, 3.0]);
    }

    #[test]
    fn aberth_alone_finds_roots() {
        let p = real(&[-6.0, 11.0, -6.0, 1.0]);
        let mut r: Vec<f64> = aberth(&p, &derivative(&p)).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn double_root_has_flat_slope() {
        let p = real(&[0.0, 1.0, -2.0, 1.0]);
        let r = roots(&p).unwrap();
        let flat = r.iter().filter(|&&z| relative_slope(&p, z) < 1e-6).count();
        assert_eq!(flat, 2);
    }
}
