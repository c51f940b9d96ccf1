use nalgebra::DMatrix;

use super::{contract, KernelError, Kernels};
use crate::curve::{Chart, SurfacePoint};
use crate::jets::Series;
use crate::C64;

/// Smallest local expansion order accepted for diagonal expansions.
pub const MIN_SERIES_ORDER: usize = 6;

/// Terms kept in `eps`: enough for the constant term of the regular part.
const LEN: usize = 3;

impl Kernels<'_> {
    /// The value `R` at `p` in `chart` of the projective connection of `Kl(e, -e)`:
    /// with `x` at `t = eps` and `y` at `t = -eps`,
    /// `Kl(e, -e) = [1 / (t_x - t_y)^2 + R / 6 + O(eps^2)] dt_x dt_y`.
    pub fn wirtinger(&self, e: &[C64], p: &SurfacePoint, order: usize, chart: Chart) -> Result<C64, KernelError> {
        let c = self.klein_coordinates(e)?;
        self.projective_value(Some(&c.matrix), p, order, chart)
    }

    /// `6 sum_ij c_ij omega_i omega_j / dt^2` at `p`: how the Wirtinger value moves when
    /// the Klein coordinates change by `c`.
    pub fn wirtinger_shift(&self, c: &DMatrix<C64>, p: &SurfacePoint, chart: Chart) -> Result<C64, KernelError> {
        let w = self.curve.omega_dx(p);
        let f = self.dx_dt(p, chart)?;
        Ok(contract(c, &w, &w) * f * f * 6.0)
    }

    /// The same expansion for the Bergman kernel alone.
    pub fn bergman_connection(&self, p: &SurfacePoint, order: usize, chart: Chart) -> Result<C64, KernelError> {
        self.projective_value(None, p, order, chart)
    }

    fn projective_value(
        &self,
        c: Option<&DMatrix<C64>>,
        p: &SurfacePoint,
        order: usize,
        chart: Chart,
    ) -> Result<C64, KernelError> {
        if order < MIN_SERIES_ORDER {
            return Err(KernelError::SeriesOrderInsufficient {
                needed: MIN_SERIES_ORDER,
                found: order,
            });
        }
        let exp = self.curve.local_expansion(p, order, chart)?;
        let g = self.curve.genus();
        // A(-eps) - A(eps) = eps u(eps)
        let u: Vec<Series<C64>> = exp
            .abel
            .iter()
            .map(|a| {
                Series::from_coeffs(
                    (0..LEN)
                        .map(|k| if k % 2 == 0 { a.coeff(k + 1) * -2.0 } else { C64::new(0.0, 0.0) })
                        .collect(),
                )
            })
            .collect();
        let grad = &self.delta_jet.gradient;
        // theta[delta](eps u) = eps P(eps) through relative order eps^2
        let mut linear = Series::zero(LEN);
        for i in 0..g {
            linear = &linear + &u[i].scale(&grad[i]);
        }
        let mut cubic = Series::zero(LEN);
        for i in 0..g {
            for j in 0..g {
                let uij = &u[i] * &u[j];
                for k in 0..g {
                    cubic = &cubic + &(&uij * &u[k]).scale(&(self.delta_jet.third(i, j, k) / 6.0));
                }
            }
        }
        let pe = &linear + &shift(&cubic, 2);
        // theta(e + z) theta(e - z) / theta(e)^2 = 1 + sum c_ij z_i z_j + O(z^4)
        let mut even = Series::one(LEN);
        if let Some(c) = c {
            let mut quad = Series::zero(LEN);
            for i in 0..g {
                for j in 0..g {
                    quad = &quad + &(&u[i] * &u[j]).scale(&c[(i, j)]);
                }
            }
            even = &even + &shift(&quad, 2);
        }
        // h(x)^2 h(y)^2 in the chart
        let mut h2 = Series::zero(LEN);
        for i in 0..g {
            h2 = &h2 + &exp.omega[i].truncate(LEN).scale(&grad[i]);
        }
        let h2_minus = reflect(&h2);
        let hh = &h2 * &h2_minus;
        let pe_inv = (&pe * &pe)
            .inverse()
            .filter(|s| s.coeff(0).is_finite() && pe.coeff(0).norm() > 0.0)
            .ok_or(KernelError::SquareRootBranchUnresolvable { re: p.x.re, im: p.x.im })?;
        // 4 eps^2 Kl = 1 + (2/3) R eps^2 + ...
        let q = (&(&even * &hh) * &pe_inv).scale(&C64::new(4.0, 0.0));
        Ok(q.coeff(2) * 1.5)
    }
}

/// `eps^k s(eps)`, truncated to the same length.
fn shift(s: &Series<C64>, k: usize) -> Series<C64> {
    let n = s.len();
    Series::from_coeffs(
        (0..n)
            .map(|i| if i >= k { *s.coeff(i - k) } else { C64::new(0.0, 0.0) })
            .collect(),
    )
}

/// `s(-eps)`.
fn reflect(s: &Series<C64>) -> Series<C64> {
    Series::from_coeffs(
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c } else { *c })
            .collect(),
    )
}
