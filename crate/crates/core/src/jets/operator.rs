use super::bivar::Bivar;
use super::coeff::{factorial, Coeff};
use super::kernel::JetKernel;
use super::matrix::SeriesMatrix;
use super::series::Series;
use super::JetError;

/// Monic operator `d^n - q_1 d^{n-1} - ... - q_n` with matrix coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator<C> {
    order: usize,
    rank: usize,
    /// `q[k - 1] = q_k`.
    q: Vec<SeriesMatrix<C>>,
}

impl<C: Coeff> DiffOperator<C> {
    pub fn new(q: Vec<SeriesMatrix<C>>) -> Result<Self, JetError> {
        let rank = q.first().map_or(1, |m| m.rank());
        if let Some(bad) = q.iter().find(|m| m.rank() != rank) {
            return Err(JetError::RankMismatch {
                expected: rank,
                found: bad.rank(),
            });
        }
        Ok(Self {
            order: q.len(),
            rank,
            q,
        })
    }

    pub fn scalar(q: Vec<Series<C>>) -> Self {
        Self {
            order: q.len(),
            rank: 1,
            q: q.into_iter().map(SeriesMatrix::scalar).collect(),
        }
    }

    /// `d^n` acting on rank-`rank` vectors.
    pub fn power_of_d(n: usize, rank: usize, len: usize) -> Self {
        Self {
            order: n,
            rank,
            q: vec![SeriesMatrix::zero(rank, len); n],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `q_k`, `1 <= k <= order`.
    pub fn q(&self, k: usize) -> &SeriesMatrix<C> {
        &self.q[k - 1]
    }

    /// Vanishing subprincipal symbol: `tr q_1 = 0`.
    pub fn is_sl(&self) -> bool {
        self.order == 0 || self.q[0].trace().is_zero()
    }

    pub fn agrees(&self, other: &Self) -> bool {
        self.order == other.order
            && self.rank == other.rank
            && self.q.iter().zip(&other.q).all(|(a, b)| a.agrees(b))
    }

    /// `L f` for a vector of series `f`.
    pub fn apply(&self, f: &[Series<C>]) -> Vec<Series<C>> {
        let derivs: Vec<Vec<Series<C>>> = (0..=self.order)
            .map(|k| f.iter().map(|s| s.nth_derivative(k)).collect())
            .collect();
        let mut out = derivs[self.order].clone();
        for k in 1..=self.order {
            let t = self.q[k - 1].apply(&derivs[self.order - k]);
            for (o, t) in out.iter_mut().zip(&t) {
                *o = &*o - t;
            }
        }
        out
    }

    /// Coefficient `c_i` of `f^{(i)}` in `L f = sum_i c_i f^{(i)}`.
    fn c(&self, i: usize, len: usize) -> SeriesMatrix<C> {
        if i == self.order {
            SeriesMatrix::identity(self.rank, len)
        } else {
            self.q[self.order - i - 1].scale(&-C::one())
        }
    }
}

/// The residue pairing `f -> n! Res_{z1 = z2} f(z1) s(z1, z2)` read as an operator on
/// test series `f`, with `n + 1` the pole order; `n!` normalizes the canonical
/// weight-2 kernel to the de Rham differential.
pub fn residue_pairing<C: Coeff>(s: &JetKernel<C>, f: &[Series<C>]) -> Result<Vec<Series<C>>, JetError> {
    let n = operator_order(s)?;
    let nf = factorial::<C>(n);
    let mut out: Option<Vec<Series<C>>> = None;
    for j in 0..=n {
        let a = s.coeff(j);
        let k = n - j;
        let scale = nf.clone() * factorial::<C>(k).inv().expect("invertible");
        let term: Vec<Series<C>> = a
            .apply(f)
            .iter()
            .map(|t| t.nth_derivative(k).scale(&scale))
            .collect();
        out = Some(match out {
            None => term,
            Some(prev) => prev.iter().zip(&term).map(|(a, b)| a + b).collect(),
        });
    }
    Ok(out.expect("at least one term"))
}

fn operator_order<C: Coeff>(s: &JetKernel<C>) -> Result<usize, JetError> {
    if s.pole() < 1 || s.weight() != s.pole() {
        return Err(JetError::WeightMismatch {
            expected: s.pole(),
            found: s.weight(),
        });
    }
    let n = (s.pole() - 1) as usize;
    if s.jet() < n + 1 {
        return Err(JetError::TruncationUnderflow {
            needed: n + 1,
            available: s.jet(),
        });
    }
    Ok(n)
}

/// The monic order-`n` operator of a weight-`(n+1)` kernel on `(n+1)`-jets.
pub fn kernel_to_operator<C: Coeff>(s: &JetKernel<C>) -> Result<DiffOperator<C>, JetError> {
    let n = operator_order(s)?;
    if !s.is_monic() {
        return Err(JetError::NotMonic);
    }
    let nf = factorial::<C>(n);
    let mut q = Vec::with_capacity(n);
    // c_i = sum_j n! / (i! (n-i-j)!) a_j^{(n-i-j)}; q_k = -c_{n-k}
    for k in 1..=n {
        let i = n - k;
        let mut c: Option<SeriesMatrix<C>> = None;
        for j in 0..=(n - i) {
            let d = n - i - j;
            let scale = nf.clone()
                * (factorial::<C>(i) * factorial::<C>(d))
                    .inv()
                    .expect("invertible");
            let mut a = s.coeff(j);
            for _ in 0..d {
                a = a.derivative();
            }
            let t = a.scale(&scale);
            c = Some(match c {
                None => t,
                Some(prev) => prev.add(&t),
            });
        }
        q.push(c.expect("nonempty").scale(&-C::one()));
    }
    DiffOperator::new(q).map(|mut op| {
        op.rank = s.rank();
        op
    })
}

/// Inverse of [`kernel_to_operator`]: the weight-`(n+1)` kernel on `(n+1)`-jets.
pub fn operator_to_kernel<C: Coeff>(op: &DiffOperator<C>, len: usize) -> JetKernel<C> {
    let n = op.order;
    let nf = factorial::<C>(n);
    let mut a: Vec<SeriesMatrix<C>> = Vec::with_capacity(n + 1);
    for i in (0..=n).rev() {
        let j_top = n - i;
        let mut rest = op.c(i, len);
        for (j, aj) in a.iter().enumerate() {
            let d = n - i - j;
            let scale = nf.clone()
                * (factorial::<C>(i) * factorial::<C>(d))
                    .inv()
                    .expect("invertible");
            let mut t = aj.clone();
            for _ in 0..d {
                t = t.derivative();
            }
            rest = rest.sub(&t.scale(&scale));
        }
        let lead = factorial::<C>(i) * nf.inv().expect("invertible");
        debug_assert_eq!(a.len(), j_top);
        a.push(rest.scale(&lead));
    }
    let rank = op.rank;
    let m = n + 1;
    let entries = (0..rank * rank)
        .map(|e| Bivar::new(a.iter().map(|c| c.get(e / rank, e % rank).clone()).collect()))
        .collect::<Vec<_>>();
    debug_assert!(entries.iter().all(|b| b.jet() == m));
    JetKernel::from_entries(rank, m as i64, m as i64, entries)
}
