use super::bivar::Bivar;
use super::coeff::Coeff;
use super::matrix::SeriesMatrix;
use super::series::Series;
use super::JetError;

/// Truncated expansion of a kernel along the diagonal, in one chart:
///
/// `s = sum_{j < jet} a_j(z1) (z1 - z2)^{j - pole} (dz1)^{weight/2} (dz2)^{weight/2}`
///
/// with each `a_j` an `rank x rank` matrix of series in `z1`. The entries are
/// stored as bivariate numerators `sum_j a_j d^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetKernel<C> {
    rank: usize,
    weight: i64,
    pole: i64,
    entries: Vec<Bivar<C>>,
}

impl<C: Coeff> JetKernel<C> {
    /// Builds a kernel from its numerators, row-major; all must share one jet order.
    pub fn from_entries(rank: usize, weight: i64, pole: i64, entries: Vec<Bivar<C>>) -> Self {
        assert_eq!(entries.len(), rank * rank, "entry count must be rank^2");
        let m = entries.iter().map(|b| b.jet()).min().unwrap_or(0);
        let entries = entries.into_iter().map(|b| b.restrict(m)).collect();
        Self {
            rank,
            weight,
            pole,
            entries,
        }
    }

    pub fn scalar(weight: i64, pole: i64, numerator: Bivar<C>) -> Self {
        Self::from_entries(1, weight, pole, vec![numerator])
    }

    /// Builds a kernel from its coefficient matrices `a_0, ..., a_{m-1}`.
    pub fn from_coeffs(weight: i64, pole: i64, coeffs: &[SeriesMatrix<C>]) -> Self {
        let rank = coeffs[0].rank();
        let entries = (0..rank * rank)
            .map(|e| {
                Bivar::new(
                    coeffs
                        .iter()
                        .map(|a| a.get(e / rank, e % rank).clone())
                        .collect(),
                )
            })
            .collect();
        Self::from_entries(rank, weight, pole, entries)
    }

    /// The canonical kernel `dz1^{nu/2} dz2^{nu/2} / (z1 - z2)^nu` on `m`-th order jets.
    pub fn mu(nu: i64, m: usize, len: usize) -> Self {
        Self::scalar(nu, nu, Bivar::one(m, len))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn pole(&self) -> i64 {
        self.pole
    }

    pub fn jet(&self) -> usize {
        self.entries.first().map_or(0, |b| b.jet())
    }

    pub fn entry(&self, i: usize, j: usize) -> &Bivar<C> {
        &self.entries[i * self.rank + j]
    }

    pub fn entries(&self) -> &[Bivar<C>] {
        &self.entries
    }

    /// Coefficient matrix `a_j`.
    pub fn coeff(&self, j: usize) -> SeriesMatrix<C> {
        SeriesMatrix::from_fn(self.rank, |a, b| self.entry(a, b).term(j).clone())
    }

    /// Numerator of a rank-one kernel.
    pub fn numerator(&self) -> &Bivar<C> {
        &self.entries[0]
    }

    /// Restriction from `jet` to `m` jets.
    pub fn restrict(&self, m: usize) -> Self {
        Self {
            entries: self.entries.iter().map(|b| b.restrict(m)).collect(),
            ..self.clone()
        }
    }

    /// Same rank, weight and pole, and equal on every commonly known coefficient.
    pub fn agrees(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.weight == other.weight
            && self.pole == other.pole
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.agrees(b))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }

    /// `a_0` is the identity matrix.
    pub fn is_monic(&self) -> bool {
        self.jet() > 0 && self.coeff(0).is_identity()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), JetError> {
        if self.rank != other.rank {
            return Err(JetError::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        if self.weight != other.weight || self.pole != other.pole {
            return Err(JetError::WeightMismatch {
                expected: self.weight,
                found: other.weight,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, JetError> {
        self.check_compatible(other)?;
        Ok(Self::from_entries(
            self.rank,
            self.weight,
            self.pole,
            self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check_compatible(other)?;
        Ok(Self::from_entries(
            self.rank,
            self.weight,
            self.pole,
            self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect(),
        ))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            entries: self.entries.iter().map(|b| b.scale(c)).collect(),
            ..self.clone()
        }
    }

    /// Swaps the variables, `s(z2, z1)`, without transposing the matrix.
    pub fn swap(&self) -> Self {
        let sign_odd = self.pole.rem_euclid(2) == 1;
        let entries = self
            .entries
            .iter()
            .map(|b| {
                let s = b.swap();
                if sign_odd {
                    s.neg()
                } else {
                    s
                }
            })
            .collect();
        Self {
            entries,
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> Self {
        let r = self.rank;
        Self {
            entries: (0..r * r).map(|e| self.entry(e % r, e / r).clone()).collect(),
            ..self.clone()
        }
    }

    /// Tensor product. Rank-one factors act as scalars; otherwise Kronecker product.
    pub fn tensor(&self, other: &Self) -> Self {
        let weight = self.weight + other.weight;
        let pole = self.pole + other.pole;
        let (r1, r2) = (self.rank, other.rank);
        let r = r1 * r2;
        let entries = (0..r * r)
            .map(|e| {
                let (i, j) = (e / r, e % r);
                self.entry(i / r2, j / r2).mul(other.entry(i % r2, j % r2))
            })
            .collect();
        Self::from_entries(r, weight, pole, entries)
    }

    /// Composition `s(x, y) t(y, x')` contracted on the middle index, as a matrix product of
    /// numerators: weights and poles add.
    pub fn matmul(&self, other: &Self) -> Result<Self, JetError> {
        if self.rank != other.rank {
            return Err(JetError::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let r = self.rank;
        let entries = (0..r * r)
            .map(|e| {
                let (i, k) = (e / r, e % r);
                let mut acc = self.entry(i, 0).mul(other.entry(0, k));
                for l in 1..r {
                    acc = acc.add(&self.entry(i, l).mul(other.entry(l, k)));
                }
                acc
            })
            .collect();
        Ok(Self::from_entries(
            r,
            self.weight + other.weight,
            self.pole + other.pole,
            entries,
        ))
    }

    /// Matrix trace, a rank-one kernel.
    pub fn trace(&self) -> Self {
        let mut acc = self.entry(0, 0).clone();
        for i in 1..self.rank {
            acc = acc.add(self.entry(i, i));
        }
        Self::scalar(self.weight, self.pole, acc)
    }

    /// Determinant kernel (top exterior power) on `m` jets: weight and pole multiply by the rank.
    pub fn det(&self, m: usize) -> Result<Self, JetError> {
        if m > self.jet() {
            return Err(JetError::TruncationUnderflow {
                needed: m,
                available: self.jet(),
            });
        }
        let r = self.rank;
        let s = self.restrict(m);
        let mut acc: Option<Bivar<C>> = None;
        for (perm, sign) in permutations(r) {
            let mut term = s.entry(0, perm[0]).clone();
            for (i, &p) in perm.iter().enumerate().skip(1) {
                term = term.mul(s.entry(i, p));
            }
            if sign < 0 {
                term = term.neg();
            }
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        Ok(Self::scalar(
            self.weight * r as i64,
            self.pole * r as i64,
            acc.expect("rank is positive"),
        ))
    }

    /// Re-expands the kernel in the chart `w = new_of_old(z)`; requires `w(0) = 0`, `w'(0) != 0`.
    pub fn change_coordinate(&self, new_of_old: &Series<C>) -> Result<Self, JetError> {
        let old_of_new = new_of_old.reversion().ok_or(JetError::NonInvertibleChart)?;
        self.change_coordinate_with(&old_of_new)
    }

    /// Same as [`change_coordinate`](Self::change_coordinate) but takes the old coordinate as a
    /// function of the new one.
    pub fn change_coordinate_with(&self, old_of_new: &Series<C>) -> Result<Self, JetError> {
        let z = old_of_new;
        if z.len() < 2 || !z.coeff(0).is_zero() || z.coeff(1).is_zero() {
            return Err(JetError::NonInvertibleChart);
        }
        let m = self.jet();
        let dz = z.derivative();
        let q = super::oper::difference_quotient(z, m);
        let q_inv = q.inverse().ok_or(JetError::NonInvertibleChart)?;
        // R = z'(w1) z'(w2) / Q^2 = 1 + O(d^2)
        let r = Bivar::from_series(dz.clone(), m)
            .mul(&Bivar::from_second(&dz, m))
            .mul(&q_inv)
            .mul(&q_inv);
        // the diagonal value is identically one; pin it so floating charts stay admissible
        let mut r_terms = r.terms().to_vec();
        if let Some(t0) = r_terms.first_mut() {
            *t0 = Series::one(t0.len());
        }
        let r = Bivar::new(r_terms);
        let r_pow = r
            .pow_ratio(self.weight, 2)
            .ok_or(JetError::NonInvertibleChart)?;
        let base = q
            .powi(self.weight - self.pole)
            .ok_or(JetError::NonInvertibleChart)?
            .mul(&r_pow);
        let q_step = q.shift_up(1);
        let mut entries = Vec::with_capacity(self.entries.len());
        for b in &self.entries {
            let composed = b.compose_terms(z).ok_or(JetError::NonInvertibleChart)?;
            // sum_j a_j(z(w1)) Q^j d^j
            let mut acc = Bivar::from_series(composed.term(0).clone(), m);
            let mut power = Bivar::one(m, z.len());
            for j in 1..m {
                power = power.mul(&q_step);
                acc = acc.add(&power.mul_series(composed.term(j)));
            }
            entries.push(acc.mul(&base));
        }
        Ok(Self::from_entries(self.rank, self.weight, self.pole, entries))
    }
}

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, 1, &mut out);
    out
}

fn permute(perm: &mut Vec<usize>, k: usize, sign: i32, out: &mut Vec<(Vec<usize>, i32)>) {
    if k == perm.len() {
        out.push((perm.clone(), sign));
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, if i == k { sign } else { -sign }, out);
        perm.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<i32>(), 0);
        for (perm, sign) in p {
            let inversions = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            assert_eq!(sign, if inversions % 2 == 0 { 1 } else { -1 });
        }
    }
}
