use super::bivar::Bivar;
use super::coeff::Coeff;
use super::connection::solve_scalar;
use super::kernel::JetKernel;
use super::operator::DiffOperator;
use super::series::Series;
use super::JetError;

/// Two independent formal solutions of `f'' = q f` with Wronskian 1:
/// `(f1(0), f1'(0)) = (1, 0)` and `(f2(0), f2'(0)) = (0, 1)`.
pub fn sturm_liouville_basis<C: Coeff>(q: &Series<C>) -> (Series<C>, Series<C>) {
    let len = q.len() + 2;
    let op = DiffOperator::scalar(vec![Series::zero(q.len()), q.clone()]);
    let f1 = solve_scalar(&op, &[C::one(), C::zero()], len);
    let f2 = solve_scalar(&op, &[C::zero(), C::one()], len);
    (f1, f2)
}

/// The projective coordinate `w = f2 / f1 - f2(0)/f1(0)` of a solution pair.
pub fn projective_coordinate<C: Coeff>(f1: &Series<C>, f2: &Series<C>) -> Result<Series<C>, JetError> {
    let inv = f1.inverse().ok_or(JetError::NonInvertibleChart)?;
    let mut w = f2 * &inv;
    let c0 = w.coeff(0).clone();
    w = &w - &Series::constant(c0, w.len());
    if w.len() < 2 || w.coeff(1).is_zero() {
        return Err(JetError::NonInvertibleChart);
    }
    Ok(w)
}

/// `dw1^{nu/2} dw2^{nu/2} / (w1 - w2)^nu` for the projective coordinate of a solution
/// pair, expanded in the base chart.
pub fn gamma_from_solutions<C: Coeff>(
    f1: &Series<C>,
    f2: &Series<C>,
    nu: i64,
    m: usize,
) -> Result<JetKernel<C>, JetError> {
    let w = projective_coordinate(f1, f2)?;
    JetKernel::mu(nu, m, w.len()).change_coordinate_with(&w)
}

/// The canonical weight-`nu` kernel of the projective structure `f'' = q f`.
pub fn gamma_from_projective<C: Coeff>(q: &Series<C>, nu: i64, m: usize) -> Result<JetKernel<C>, JetError> {
    let (f1, f2) = sturm_liouville_basis(q);
    gamma_from_solutions(&f1, &f2, nu, m)
}

/// The order-two deviation of a kernel monic on the second-order jets, divided by its weight
/// `k`: identifies weight-`k` projective data with weight one.
pub fn rescale_shift<C: Coeff>(s: &JetKernel<C>, k: i64) -> Result<Series<C>, JetError> {
    if s.rank() != 1 {
        return Err(JetError::RankMismatch {
            expected: 1,
            found: s.rank(),
        });
    }
    if s.jet() < 3 {
        return Err(JetError::TruncationUnderflow {
            needed: 3,
            available: s.jet(),
        });
    }
    if k == 0 {
        return Err(JetError::WeightMismatch {
            expected: s.weight(),
            found: k,
        });
    }
    let b = s.numerator();
    let len = b.term(0).len();
    if !b.term(0).agrees(&Series::one(len)) || !b.term(1).is_zero() {
        return Err(JetError::NotMonicOn2Delta);
    }
    Ok(b.term(2).scale(&C::from_ratio(1, k)))
}

/// Inverse of [`rescale_shift`]: the weight-`k` kernel on 3-jets with deviation `k * q`.
pub fn unshift<C: Coeff>(q: &Series<C>, k: i64) -> JetKernel<C> {
    let len = q.len();
    JetKernel::scalar(
        k,
        k,
        Bivar::new(vec![Series::one(len), Series::zero(len), q.scale(&C::from_int(k))]),
    )
}

/// The oper of order `n` on the projective structure `q` shifted by the Hitchin-base
/// data `v = (v_2, ..., v_n)`, with `v_2 = 0`:
/// `gamma_{n+1} (1 + sum_{i>=3} v_i (w1 - w2)^i)` in the projective chart `w`.
pub fn build_oper<C: Coeff>(
    q: &Series<C>,
    v: &[Series<C>],
    n: usize,
    m: usize,
) -> Result<JetKernel<C>, JetError> {
    if v.len() + 1 != n {
        return Err(JetError::SlotCount {
            expected: n.saturating_sub(1),
            found: v.len(),
        });
    }
    if let Some(v2) = v.first() {
        if !v2.is_zero() {
            return Err(JetError::QuadraticSlotNonZero);
        }
    }
    let (f1, f2) = sturm_liouville_basis(q);
    let w = projective_coordinate(&f1, &f2)?;
    let nu = n as i64 + 1;
    let gamma = JetKernel::mu(nu, m, w.len()).change_coordinate_with(&w)?;
    // v_i dz^i reads v_i / w'^i dw^i in the projective chart, and
    // (w1 - w2)^i = (Q d)^i with Q = (w(z1) - w(z2)) / (z1 - z2), so the slot term is
    // v_i(z1) (Q / w'(z1))^i d^i
    let dw_inv = w.derivative().inverse().ok_or(JetError::NonInvertibleChart)?;
    let ratio = difference_quotient(&w, m).mul_series(&dw_inv).shift_up(1);
    let mut factor = ratio.clone();
    let mut shift = Bivar::one(m, w.len());
    for (idx, vi) in v.iter().enumerate() {
        factor = factor.mul(&ratio);
        let i = idx + 2;
        if idx == 0 || i >= m {
            continue;
        }
        shift = shift.add(&factor.mul_series(vi));
    }
    Ok(JetKernel::scalar(nu, nu, gamma.numerator().mul(&shift)))
}

/// `(f(z1) - f(z2)) / (z1 - z2)`: the `d^k` term is `(-1)^k f^{(k+1)} / (k+1)!`.
pub(crate) fn difference_quotient<C: Coeff>(f: &Series<C>, m: usize) -> Bivar<C> {
    let mut terms = Vec::with_capacity(m);
    let mut deriv = f.derivative();
    let mut fact = C::one();
    for k in 0..m {
        fact = fact * C::from_int(k as i64 + 1);
        let sign = if k % 2 == 0 { C::one() } else { -C::one() };
        terms.push(deriv.scale(&(sign * fact.inv().expect("invertible"))));
        deriv = deriv.derivative();
    }
    Bivar::new(terms)
}

/// Acts on an oper kernel by Hitchin-base data `v`: adds `build_oper(q, v) - build_oper(q, 0)`.
pub fn hitchin_action<C: Coeff>(
    s: &JetKernel<C>,
    q: &Series<C>,
    v: &[Series<C>],
    n: usize,
) -> Result<JetKernel<C>, JetError> {
    let m = s.jet();
    let zero: Vec<Series<C>> = v.iter().map(|x| Series::zero(x.len())).collect();
    let shifted = build_oper(q, v, n, m)?;
    let base = build_oper(q, &zero, n, m)?;
    s.add(&shifted.sub(&base)?)
}
