use serde::Serialize;

use super::{CurveError, HyperellipticCurve, SurfacePoint, MAX_EXPANSION_ORDER};
use crate::jets::Series;
use crate::C64;

/// Local parameter `t` at a point, vanishing there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Chart {
    /// `t = (x - x0) / scale`.
    Linear { scale: C64 },
    /// `t = A_index(x) - A_index(x0)`, flat for the normalized differentials.
    Abelian { index: usize },
}

impl Default for Chart {
    fn default() -> Self {
        Chart::Linear {
            scale: C64::new(1.0, 0.0),
        }
    }
}

/// Series in the chart parameter `t` through `t^order`.
#[derive(Debug, Clone)]
pub struct LocalExpansion {
    pub order: usize,
    pub center: SurfacePoint,
    pub chart: Chart,
    pub x: Series<C64>,
    pub y: Series<C64>,
    /// `omega_i / dt` of the normalized differentials.
    pub omega: Vec<Series<C64>>,
    /// `A_i(t)`, with `A_i(0)` the Abel image of the center.
    pub abel: Vec<Series<C64>>,
}

/// Square root with prescribed constant term, `y0^2 = f_0`.
pub fn series_sqrt(f: &Series<C64>, y0: C64) -> Series<C64> {
    let n = f.len();
    let mut y = vec![C64::new(0.0, 0.0); n];
    if n == 0 {
        return Series::from_coeffs(y);
    }
    y[0] = y0;
    for k in 1..n {
        let mut acc = *f.coeff(k);
        for j in 1..k {
            acc -= y[j] * y[k - j];
        }
        y[k] = acc / (y0 * 2.0);
    }
    Series::from_coeffs(y)
}

impl HyperellipticCurve {
    pub fn local_expansion(&self, p: &SurfacePoint, order: usize, chart: Chart) -> Result<LocalExpansion, CurveError> {
        if order == 0 || order > MAX_EXPANSION_ORDER {
            return Err(CurveError::OrderOutOfRange(order));
        }
        let p = self.point(p.x, p.sheet)?;
        let len = order + 1;
        // series in s = x - x0
        let mut f = Series::constant(self.lead(), len);
        for r in &self.roots {
            f = &f * &Series::polynomial(&[p.x - r, C64::new(1.0, 0.0)], len);
        }
        let y = series_sqrt(&f, self.y(&p));
        let x = Series::polynomial(&[p.x, C64::new(1.0, 0.0)], len);
        let y_inv = y.inverse().ok_or(CurveError::DegenerateChart)?;
        let mut raw = Vec::with_capacity(self.genus);
        let mut term = y_inv;
        for _ in 0..self.genus {
            raw.push(term.clone());
            term = &term * &x;
        }
        let c = &self.periods.normalization;
        let omega: Vec<Series<C64>> = (0..self.genus)
            .map(|i| {
                raw.iter().enumerate().fold(Series::zero(len), |acc, (j, u)| {
                    &acc + &u.scale(&c[(i, j)])
                })
            })
            .collect();
        let base = self.abel(&p)?;
        let abel: Vec<Series<C64>> = omega
            .iter()
            .zip(&base)
            .map(|(w, a0)| &w.integral().truncate(len) + &Series::constant(*a0, len))
            .collect();

        let (s_of_t, ds) = match chart {
            Chart::Linear { scale } => {
                if scale.norm() == 0.0 || !scale.is_finite() {
                    return Err(CurveError::DegenerateChart);
                }
                (
                    Series::polynomial(&[C64::new(0.0, 0.0), scale], len),
                    Series::constant(scale, len),
                )
            }
            Chart::Abelian { index } => {
                let a = abel.get(index).ok_or(CurveError::DegenerateChart)?;
                if a.coeff(1).norm() < 1e-300 {
                    return Err(CurveError::DegenerateChart);
                }
                let phi = a - &Series::constant(*a.coeff(0), len);
                let s_of_t = phi.reversion().ok_or(CurveError::DegenerateChart)?;
                // ds/dt = 1 / omega_index(s(t))
                let ds = omega[index]
                    .compose(&s_of_t)
                    .and_then(|w| w.inverse())
                    .ok_or(CurveError::DegenerateChart)?;
                (s_of_t, ds)
            }
        };
        let pull = |s: &Series<C64>| s.compose(&s_of_t).expect("s(0) = 0");
        let pull_form = |s: &Series<C64>| &pull(s) * &ds;
        Ok(LocalExpansion {
            order,
            center: p,
            chart,
            x: pull(&x),
            y: pull(&y),
            omega: omega.iter().map(pull_form).collect(),
            abel: abel.iter().map(pull).collect(),
        })
    }
}
