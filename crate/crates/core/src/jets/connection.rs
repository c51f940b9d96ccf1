use super::bivar::Bivar;
use super::coeff::Coeff;
use super::kernel::JetKernel;
use super::matrix::SeriesMatrix;
use super::operator::DiffOperator;
use super::series::Series;
use super::JetError;

/// Connection `d - Gamma dz` on a trivialized rank-`r` bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionJet<C> {
    pub gamma: SeriesMatrix<C>,
}

impl<C: Coeff> ConnectionJet<C> {
    pub fn new(gamma: SeriesMatrix<C>) -> Self {
        Self { gamma }
    }

    pub fn trivial(rank: usize, len: usize) -> Self {
        Self::new(SeriesMatrix::zero(rank, len))
    }

    pub fn rank(&self) -> usize {
        self.gamma.rank()
    }

    /// Covariant derivative `v' - Gamma v` of a vector of series.
    pub fn covariant_derivative(&self, v: &[Series<C>]) -> Vec<Series<C>> {
        let gv = self.gamma.apply(v);
        v.iter().zip(&gv).map(|(a, b)| &a.derivative() - b).collect()
    }

    /// Connection induced on the determinant line: `tr Gamma`.
    pub fn determinant(&self) -> Self {
        Self::new(SeriesMatrix::scalar(self.gamma.trace()))
    }
}

/// Reads the connection off a kernel whose diagonal value is the identity:
/// `Gamma` is the first-order coefficient.
pub fn connection_from_kernel<C: Coeff>(s: &JetKernel<C>) -> Result<ConnectionJet<C>, JetError> {
    if s.jet() < 2 {
        return Err(JetError::TruncationUnderflow {
            needed: 2,
            available: s.jet(),
        });
    }
    if !s.is_monic() {
        return Err(JetError::NotMonic);
    }
    Ok(ConnectionJet::new(s.coeff(1)))
}

/// The flat kernel `kappa(z1, z2)` (parallel transport from `z2` to `z1`) on `m`-jets,
/// from `(j+1) K_{j+1} = Gamma K_j - K_j'`, `K_0 = Id`.
pub fn flat_extension<C: Coeff>(conn: &ConnectionJet<C>, m: usize) -> JetKernel<C> {
    let r = conn.rank();
    let len = conn.gamma.len() + 1;
    let mut k = SeriesMatrix::identity(r, len);
    let mut coeffs = Vec::with_capacity(m);
    for j in 0..m {
        coeffs.push(k.clone());
        let next = conn.gamma.mul(&k).sub(&k.derivative());
        k = next.scale(&C::from_ratio(1, j as i64 + 1));
    }
    let entries = (0..r * r)
        .map(|e| Bivar::new(coeffs.iter().map(|c| c.get(e / r, e % r).clone()).collect()))
        .collect();
    JetKernel::from_entries(r, 0, 0, entries)
}

/// Companion connection of a scalar operator: first row `(q_1, ..., q_n)`, ones on the
/// subdiagonal. Flat sections are `(f^{(n-1)}, ..., f', f)` for solutions `L f = 0`.
pub fn companion_connection<C: Coeff>(op: &DiffOperator<C>) -> Result<ConnectionJet<C>, JetError> {
    if op.rank() != 1 {
        return Err(JetError::RankMismatch {
            expected: 1,
            found: op.rank(),
        });
    }
    let n = op.order();
    let len = (1..=n).map(|k| op.q(k).len()).min().unwrap_or(1);
    Ok(ConnectionJet::new(SeriesMatrix::from_fn(n, |i, j| {
        if i == 0 {
            op.q(j + 1).get(0, 0).truncate(len)
        } else if i == j + 1 {
            Series::one(len)
        } else {
            Series::zero(len)
        }
    })))
}

/// Formal solution of `L f = 0` with `f^{(k)}(0) = initial[k]`, `k < n`.
pub fn solve_scalar<C: Coeff>(op: &DiffOperator<C>, initial: &[C], len: usize) -> Series<C> {
    let n = op.order();
    let mut f = vec![C::zero(); len];
    let mut fact = C::one();
    for (k, c) in initial.iter().enumerate().take(n.min(len)) {
        if k > 0 {
            fact = fact * C::from_int(k as i64);
        }
        f[k] = c.clone() * fact.inv().expect("invertible");
    }
    // f^{(n)} = sum_k q_k f^{(n-k)}; fix coefficient t^{i+n} from lower ones
    for i in 0..len.saturating_sub(n) {
        let cur = Series::from_coeffs(f[..i + n].to_vec());
        let mut rhs = C::zero();
        for k in 1..=n {
            let d = cur.nth_derivative(n - k);
            let q = op.q(k).get(0, 0);
            for a in 0..=i {
                if a < q.len() && i - a < d.len() {
                    rhs = rhs + q.coeff(a).clone() * d.coeff(i - a).clone();
                }
            }
        }
        // coefficient of t^i in f^{(n)} is (i+n)!/i! f_{i+n}
        let mut falling = C::one();
        for t in 1..=n {
            falling = falling * C::from_int((i + t) as i64);
        }
        f[i + n] = rhs * falling.inv().expect("invertible");
    }
    Series::from_coeffs(f)
}

/// Formal flat section `Y' = Gamma Y` with `Y(0) = initial`.
pub fn solve_flat<C: Coeff>(conn: &ConnectionJet<C>, initial: &[C], len: usize) -> Vec<Series<C>> {
    let r = conn.rank();
    let mut y: Vec<Vec<C>> = (0..r).map(|i| vec![initial[i].clone()]).collect();
    for k in 0..len.saturating_sub(1) {
        // (k+1) Y_{k+1} = sum_a Gamma_a Y_{k-a}
        for i in 0..r {
            let mut acc = C::zero();
            for j in 0..r {
                let g = conn.gamma.get(i, j);
                for a in 0..=k.min(g.len().saturating_sub(1)) {
                    acc = acc + g.coeff(a).clone() * y[j][k - a].clone();
                }
            }
            y[i].push(acc * C::from_ratio(1, k as i64 + 1));
        }
    }
    y.into_iter().map(Series::from_coeffs).collect()
}
