use super::coeff::{binomial_ratio, factorial, Coeff};
use super::series::Series;

/// `sum_j terms[j](z1) * d^j + O(d^m)` with `d = z1 - z2`, anchored at `z1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivar<C> {
    terms: Vec<Series<C>>,
}

impl<C: Coeff> Bivar<C> {
    pub fn new(terms: Vec<Series<C>>) -> Self {
        Self { terms }
    }

    pub fn zero(m: usize, len: usize) -> Self {
        Self {
            terms: vec![Series::zero(len); m],
        }
    }

    /// A function of `z1` alone.
    pub fn from_series(s: Series<C>, m: usize) -> Self {
        let len = s.len();
        let mut terms = vec![Series::zero(len); m];
        if m > 0 {
            terms[0] = s;
        }
        Self { terms }
    }

    pub fn one(m: usize, len: usize) -> Self {
        Self::from_series(Series::one(len), m)
    }

    /// A function of `z2` alone, re-expanded around `z1`: `f(z1 - d)`.
    pub fn from_second(s: &Series<C>, m: usize) -> Self {
        let mut terms = Vec::with_capacity(m);
        let mut deriv = s.clone();
        for k in 0..m {
            let sign = if k % 2 == 0 { C::one() } else { -C::one() };
            let scale = sign * factorial::<C>(k).inv().expect("factorial is invertible");
            terms.push(deriv.scale(&scale));
            deriv = deriv.derivative();
        }
        Self { terms }
    }

    pub fn jet(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Series<C>] {
        &self.terms
    }

    pub fn term(&self, j: usize) -> &Series<C> {
        &self.terms[j]
    }

    pub fn restrict(&self, m: usize) -> Self {
        Self {
            terms: self.terms[..m.min(self.jet())].to_vec(),
        }
    }

    pub fn agrees(&self, other: &Self) -> bool {
        self.terms.iter().zip(&other.terms).all(|(a, b)| a.agrees(b))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_zero())
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            terms: self.terms.iter().zip(&other.terms).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            terms: self.terms.iter().zip(&other.terms).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            terms: self.terms.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn mul_series(&self, s: &Series<C>) -> Self {
        Self {
            terms: self.terms.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.jet().min(other.jet());
        let terms = (0..m)
            .map(|n| {
                let mut acc = &self.terms[0] * &other.terms[n];
                for i in 1..=n {
                    acc = &acc + &(&self.terms[i] * &other.terms[n - i]);
                }
                acc
            })
            .collect();
        Self { terms }
    }

    /// Multiplies by `d^k`, dropping terms beyond the jet.
    pub fn shift_up(&self, k: usize) -> Self {
        let m = self.jet();
        let len = self.terms.first().map_or(0, |t| t.len());
        let mut terms = vec![Series::zero(len); m];
        let keep = m.saturating_sub(k);
        terms[k.min(m)..].clone_from_slice(&self.terms[..keep]);
        Self { terms }
    }

    pub fn inverse(&self) -> Option<Self> {
        let m = self.jet();
        if m == 0 {
            return Some(self.clone());
        }
        let inv0 = self.terms[0].inverse()?;
        let mut out: Vec<Series<C>> = Vec::with_capacity(m);
        out.push(inv0.clone());
        for n in 1..m {
            let mut acc = &self.terms[1] * &out[n - 1];
            for i in 2..=n {
                acc = &acc + &(&self.terms[i] * &out[n - i]);
            }
            out.push(-&(&acc * &inv0));
        }
        Some(Self { terms: out })
    }

    pub fn powi(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let len = self.terms.first().map_or(0, |t| t.len());
        let mut acc = Self::one(self.jet(), len);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// `self^(num/den)` for `self = 1 + O(d)`, by the binomial series.
    pub fn pow_ratio(&self, num: i64, den: i64) -> Option<Self> {
        let m = self.jet();
        if m == 0 {
            return Some(self.clone());
        }
        let len = self.terms[0].len();
        if !self.terms[0].agrees(&Series::one(len)) {
            return None;
        }
        let mut u = self.clone();
        u.terms[0] = Series::zero(len);
        let mut power = Self::one(m, len);
        let mut acc = Self::one(m, len);
        for k in 1..m {
            power = power.mul(&u);
            acc = acc.add(&power.scale(&binomial_ratio(num, den, k)));
        }
        Some(acc)
    }

    /// Applies `f -> f(g)` to every term; requires `g(0) = 0`.
    pub fn compose_terms(&self, g: &Series<C>) -> Option<Self> {
        Some(Self {
            terms: self
                .terms
                .iter()
                .map(|t| t.compose(g))
                .collect::<Option<Vec<_>>>()?,
        })
    }

    /// Swaps the two variables: `F(z2, z1)` re-expanded around `z1`.
    pub fn swap(&self) -> Self {
        let m = self.jet();
        let mut terms: Vec<Option<Series<C>>> = vec![None; m];
        for (j, t) in self.terms.iter().enumerate() {
            // t(z2) (-d)^j = sum_k t^{(k)}(z1) (-d)^{j+k} / k!
            let shifted = Self::from_second(t, m - j);
            for (k, s) in shifted.terms.iter().enumerate() {
                let s = if j % 2 == 0 { s.clone() } else { -s };
                let slot = &mut terms[j + k];
                *slot = Some(match slot.take() {
                    None => s,
                    Some(prev) => &prev + &s,
                });
            }
        }
        Self {
            terms: terms.into_iter().map(|t| t.expect("every slot filled")).collect(),
        }
    }

    /// Value on the diagonal: the `d^0` term.
    pub fn diagonal(&self) -> &Series<C> {
        &self.terms[0]
    }
}

#[cfg(test)]
mod tests {
    use super::super::coeff::Exact;
    use super::*;

    fn s(c: &[i64], len: usize) -> Series<Exact> {
        let cs: Vec<Exact> = c.iter().map(|&k| Exact::from_int(k)).collect();
        Series::polynomial(&cs, len)
    }

    #[test]
    fn second_variable_expansion() {
        // z2^2 = (z1 - d)^2 = z1^2 - 2 z1 d + d^2
        let b = Bivar::from_second(&s(&[0, 0, 1], 6), 3);
        assert!(b.term(0).agrees(&s(&[0, 0, 1], 6)));
        assert!(b.term(1).agrees(&s(&[0, -2], 6)));
        assert!(b.term(2).agrees(&s(&[1], 6)));
    }

    #[test]
    fn swap_is_an_involution() {
        let b = Bivar::new(vec![s(&[1, 2, 3], 10), s(&[0, 1], 10), s(&[5, 0, 1], 10), s(&[2], 10)]);
        assert!(b.swap().swap().agrees(&b));
    }

    #[test]
    fn swap_of_difference_is_negation() {
        // d itself: z1 - z2
        let d = Bivar::<Exact>::one(4, 8).shift_up(1);
        assert!(d.swap().agrees(&d.neg()));
    }

    #[test]
    fn pow_ratio_squares_back() {
        let b = Bivar::new(vec![s(&[1], 8), s(&[0, 1], 8), s(&[3, 1], 8), s(&[1, 0, 2], 8)]);
        let r = b.pow_ratio(1, 2).unwrap();
        assert!(r.mul(&r).agrees(&b));
    }
}
