use super::{KernelError, Kernels};
use crate::curve::{Chart, SurfacePoint};
use crate::C64;

/// A kernel with a normalized singularity on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalKernel {
    /// `E(x, y) / (t_x - t_y)`.
    Prime,
    /// `(t_x - t_y)^2 omega_B(x, y)`.
    Bergman,
    /// `(t_x - t_y) sigma_e(x, y)`.
    Szego(Vec<C64>),
    /// `(t_x - t_y)^n prod_i sigma_{e_i}(x, y)`.
    Klein(Vec<Vec<C64>>),
}

/// Extrapolates `f(s) = L + c_1 s + c_2 s^2 + ...` to `s = 0` from the samples
/// `f(s), f(s/2), ..., f(s/2^(levels-1))`.
pub fn richardson<E>(levels: usize, s: f64, mut f: impl FnMut(f64) -> Result<C64, E>) -> Result<C64, E> {
    let mut row: Vec<C64> = Vec::with_capacity(levels);
    for i in 0..levels.max(1) {
        let mut next = vec![f(s / 2f64.powi(i as i32))?];
        for j in 1..=i {
            let factor = 2f64.powi(j as i32) - 1.0;
            let v = next[j - 1] + (next[j - 1] - row[j - 1]) / factor;
            next.push(v);
        }
        row = next;
    }
    Ok(*row.last().expect("at least one level"))
}

pub(super) fn diagonal_limit(
    kernels: &Kernels,
    kernel: &DiagonalKernel,
    x: &SurfacePoint,
    direction: C64,
    s: f64,
) -> Result<C64, KernelError> {
    if !(s > 0.0) || direction.norm() == 0.0 {
        return Err(KernelError::InvalidArgument("separation and direction must be nonzero".into()));
    }
    let direction = direction / direction.norm();
    let charts = [Chart::default(); 2];
    richardson(3, s, |h| {
        let y = kernels.curve().neighbor(x, x.x + direction * h)?;
        let dt = -direction * h;
        Ok(match kernel {
            DiagonalKernel::Prime => kernels.prime_form(x, &y, charts)?.value / dt,
            DiagonalKernel::Bergman => kernels.bergman(x, &y, charts)?.value * dt * dt,
            DiagonalKernel::Szego(e) => kernels.szego(e, x, &y, charts)?.value * dt,
            DiagonalKernel::Klein(es) => kernels.klein(es, x, &y, charts)?.value * dt.powi(es.len() as i32),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_polynomial_error() {
        let f = |s: f64| Ok::<_, ()>(C64::new(2.0 + 3.0 * s - 5.0 * s * s, s));
        let v = richardson(3, 0.1, f).unwrap();
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn single_level_is_the_sample() {
        let v = richardson(1, 0.5, |s| Ok::<_, ()>(C64::new(s, 0.0))).unwrap();
        assert_eq!(v, C64::new(0.5, 0.0));
    }
}
