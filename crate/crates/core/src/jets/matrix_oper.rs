use super::bivar::Bivar;
use super::coeff::Coeff;
use super::connection::{connection_from_kernel, flat_extension, ConnectionJet};
use super::kernel::JetKernel;
use super::matrix::SeriesMatrix;
use super::series::Series;
use super::JetError;

/// Matrix oper `(o Id + mu sum_{i>=2} eta_i (z1 - z2)^i) kappa` from a connection, a scalar
/// oper kernel `o` and traceless polydifferential slots `eta = (eta_2, ..., eta_n)`.
pub fn matrix_oper<C: Coeff>(
    conn: &ConnectionJet<C>,
    oper: &JetKernel<C>,
    eta: &[SeriesMatrix<C>],
) -> Result<JetKernel<C>, JetError> {
    if oper.rank() != 1 {
        return Err(JetError::RankMismatch {
            expected: 1,
            found: oper.rank(),
        });
    }
    let r = conn.rank();
    for (idx, e) in eta.iter().enumerate() {
        if e.rank() != r {
            return Err(JetError::RankMismatch {
                expected: r,
                found: e.rank(),
            });
        }
        if !e.trace().is_zero() {
            return Err(JetError::TraceNotZero { slot: idx + 2 });
        }
    }
    let m = oper.jet();
    let num = oper.numerator();
    let len = num.term(0).len();
    let entries = (0..r * r)
        .map(|e| {
            let (i, j) = (e / r, e % r);
            let mut b = if i == j { num.clone() } else { Bivar::zero(m, len) };
            for (idx, eta_i) in eta.iter().enumerate() {
                let slot = idx + 2;
                if slot < m {
                    let add = Bivar::from_series(eta_i.get(i, j).clone(), m).shift_up(slot);
                    b = b.add(&add);
                }
            }
            b
        })
        .collect();
    let x = JetKernel::from_entries(r, oper.weight(), oper.pole(), entries);
    x.matmul(&flat_extension(conn, m))
}

/// Invariant polynomial applied by [`trace_map`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSelector {
    /// `tr / rank`: the projection to scalar opers.
    NormalizedTrace,
    Determinant,
    /// `tr(T^k)`.
    PowerTrace(usize),
}

/// Transports `s` to an endomorphism-valued kernel with the flat kernel of its own connection,
/// `T = s(z1, z2) kappa(z2, z1)`, then applies the selected invariant polynomial.
pub fn trace_map<C: Coeff>(s: &JetKernel<C>, selector: TraceSelector) -> Result<JetKernel<C>, JetError> {
    let conn = connection_from_kernel(s)?;
    let m = s.jet();
    let t = s.matmul(&flat_extension(&conn, m).swap())?;
    match selector {
        TraceSelector::NormalizedTrace => Ok(t.trace().scale(&C::from_ratio(1, s.rank() as i64))),
        TraceSelector::Determinant => t.det(m),
        TraceSelector::PowerTrace(k) => {
            if k == 0 {
                return Err(JetError::SlotCount { expected: 1, found: 0 });
            }
            let mut p = t.clone();
            for _ in 1..k {
                p = p.matmul(&t)?;
            }
            Ok(p.trace())
        }
    }
}

/// Determinant kernel on `m` jets; errors if `s` is known on fewer jets.
pub fn det_kernel<C: Coeff>(s: &JetKernel<C>, m: usize) -> Result<JetKernel<C>, JetError> {
    s.det(m)
}

/// The extended-connection family `(lambda rho Id + mu eta (z1 - z2)) kappa` built from a scalar
/// kernel `rho`, a connection and a traceless Higgs field `eta`.
pub fn higgs_deformation<C: Coeff>(
    rho: &JetKernel<C>,
    conn: &ConnectionJet<C>,
    eta: &SeriesMatrix<C>,
    lambda: &C,
) -> Result<JetKernel<C>, JetError> {
    if !eta.trace().is_zero() {
        return Err(JetError::TraceNotZero { slot: 1 });
    }
    let r = conn.rank();
    let m = rho.jet();
    let num = rho.numerator().scale(lambda);
    let len = num.term(0).len();
    let entries = (0..r * r)
        .map(|e| {
            let (i, j) = (e / r, e % r);
            let b = if i == j { num.clone() } else { Bivar::zero(m, len) };
            b.add(&Bivar::from_series(eta.get(i, j).clone(), m).shift_up(1))
        })
        .collect();
    JetKernel::from_entries(r, rho.weight(), rho.pole(), entries).matmul(&flat_extension(conn, m))
}

/// The quadratic map `(-1)^nu tr(s(z1, z2) s(z2, z1))` on 3-jets, for `s` with diagonal value
/// `lambda Id`.
///
/// For `lambda != 0` the result is normalized by `rank lambda^2` and returned as a weight-one
/// projective deviation (see [`super::rescale_shift`]). For `lambda = 0` the result vanishes on
/// 2-jets and the returned series is `tr(eta^2)` of the Higgs field `eta = a_1`.
pub fn quadratic_s<C: Coeff>(s: &JetKernel<C>, lambda: &C) -> Result<Series<C>, JetError> {
    if s.jet() < 3 {
        return Err(JetError::TruncationUnderflow {
            needed: 3,
            available: s.jet(),
        });
    }
    let s3 = s.restrict(3);
    let a0 = s3.coeff(0);
    let expected = SeriesMatrix::identity(s3.rank(), a0.len()).scale(lambda);
    if !a0.agrees(&expected) {
        return Err(JetError::DiagonalValueMismatch);
    }
    let mut p = s3.matmul(&s3.swap())?.trace();
    if s3.weight().rem_euclid(2) == 1 {
        p = p.scale(&-C::one());
    }
    match lambda.inv() {
        Some(inv) => {
            let norm = inv.clone() * inv * C::from_ratio(1, s3.rank() as i64);
            super::oper::rescale_shift(&p.scale(&norm), p.weight())
        }
        None => Ok(-p.numerator().term(2)),
    }
}
