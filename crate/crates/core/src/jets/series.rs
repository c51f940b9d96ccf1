use std::ops::{Add, Mul, Neg, Sub};

use super::coeff::Coeff;

/// Truncated power series `c_0 + c_1 z + ... + c_{n-1} z^{n-1} + O(z^n)`.
///
/// `len()` is the number of known coefficients; arithmetic keeps the minimum
/// of the operands' known lengths, so lost precision is never silently invented.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> Series<C> {
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        Self { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        Self {
            coeffs: vec![C::zero(); len],
        }
    }

    pub fn constant(c: C, len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(len: usize) -> Self {
        Self::constant(C::one(), len)
    }

    /// The coordinate function `z`.
    pub fn var(len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 1 {
            s.coeffs[1] = C::one();
        }
        s
    }

    /// A polynomial padded with zeros to `len` known coefficients.
    pub fn polynomial(coeffs: &[C], len: usize) -> Self {
        let mut s = Self::zero(len);
        for (k, c) in coeffs.iter().enumerate().take(len) {
            s.coeffs[k] = c.clone();
        }
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn truncate(&self, len: usize) -> Self {
        Self {
            coeffs: self.coeffs[..len.min(self.len())].to_vec(),
        }
    }

    /// All known coefficients are zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Equal on the common known prefix.
    pub fn agrees(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }

    /// Largest coefficient difference on the common prefix.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).to_c64().norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeffs: (1..self.len())
                .map(|k| self.coeffs[k].clone() * C::from_int(k as i64))
                .collect(),
        }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |s, _| s.derivative())
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.len() + 1);
        coeffs.push(C::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() * C::from_ratio(1, k as i64 + 1));
        }
        Self { coeffs }
    }

    /// Multiplicative inverse; `None` if the constant term is not invertible.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.len();
        if n == 0 {
            return Some(self.clone());
        }
        let inv0 = self.coeffs[0].inv()?;
        let mut out = vec![C::zero(); n];
        out[0] = inv0.clone();
        for k in 1..n {
            let mut acc = C::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out[k] = -(acc * inv0.clone());
        }
        Some(Self { coeffs: out })
    }

    pub fn powi(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::one(self.len());
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    /// `self(g(z))`; requires `g(0) = 0`.
    pub fn compose(&self, g: &Self) -> Option<Self> {
        if g.is_empty() || !g.coeffs[0].is_zero() {
            return None;
        }
        let n = self.len().min(g.len());
        let g = g.truncate(n);
        let mut acc = Self::zero(n);
        for c in self.coeffs[..n].iter().rev() {
            acc = &acc * &g;
            acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
        }
        Some(acc)
    }

    /// Compositional inverse; requires `g(0) = 0` and invertible `g'(0)`.
    pub fn reversion(&self) -> Option<Self> {
        let n = self.len();
        if n < 2 || !self.coeffs[0].is_zero() {
            return None;
        }
        self.coeffs[1].inv()?;
        // Newton on g(h) = z doubles the number of correct coefficients per step
        let z = Self::var(n);
        let dg = self.derivative();
        let mut h = Self::var(n).scale(&self.coeffs[1].inv()?);
        let mut correct = 2;
        while correct < n {
            correct *= 2;
            let residual = &self.compose(&h)? - &z;
            let slope = dg.compose(&h)?;
            let slope = Self::from_coeffs(
                (0..n)
                    .map(|k| slope.coeffs.get(k).cloned().unwrap_or_else(C::zero))
                    .collect(),
            );
            h = &h - &(&residual * &slope.inverse()?);
        }
        Some(h)
    }

    /// Evaluates the known polynomial part at `x`.
    pub fn eval(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}

impl<C: Coeff> Add for &Series<C> {
    type Output = Series<C>;
    fn add(self, rhs: Self) -> Series<C> {
        let n = self.len().min(rhs.len());
        Series {
            coeffs: (0..n)
                .map(|k| self.coeffs[k].clone() + rhs.coeffs[k].clone())
                .collect(),
        }
    }
}

impl<C: Coeff> Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: Self) -> Series<C> {
        let n = self.len().min(rhs.len());
        Series {
            coeffs: (0..n)
                .map(|k| self.coeffs[k].clone() - rhs.coeffs[k].clone())
                .collect(),
        }
    }
}

impl<C: Coeff> Mul for &Series<C> {
    type Output = Series<C>;
    fn mul(self, rhs: Self) -> Series<C> {
        let n = self.len().min(rhs.len());
        let mut coeffs = vec![C::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..(n - i) {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].clone() + self.coeffs[i].clone() * rhs.coeffs[j].clone();
            }
        }
        Series { coeffs }
    }
}

impl<C: Coeff> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::coeff::{exact, Exact};
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64], len: usize) -> Series<Exact> {
        let cs: Vec<Exact> = c.iter().map(|&k| Exact::from_int(k)).collect();
        Series::polynomial(&cs, len)
    }

    #[test]
    fn geometric_inverse() {
        let s = poly(&[1, -1], 8);
        let inv = s.inverse().unwrap();
        assert!(inv.coeffs().iter().all(|c| *c == Exact::from_int(1)));
    }

    #[test]
    fn reversion_of_z_plus_z_squared() {
        // inverse of z + z^2 has Catalan coefficients (-1)^k C_k
        let s = poly(&[0, 1, 1], 8);
        let r = s.reversion().unwrap();
        let expected = [0, 1, -1, 2, -5, 14, -42, 132];
        assert_eq!(r, poly(&expected, 8));
    }

    #[test]
    fn derivative_and_integral() {
        let s = poly(&[3, 2, 1], 5);
        assert!(s.integral().derivative().agrees(&s));
        assert_eq!(s.derivative(), poly(&[2, 2], 4));
    }

    #[test]
    fn lengths_shrink_to_common_prefix() {
        let a = poly(&[1, 1], 6);
        let b = poly(&[1, 1], 4);
        assert_eq!((&a * &b).len(), 4);
        assert_eq!(a.derivative().len(), 5);
    }

    #[test]
    fn eval_is_horner() {
        let s = poly(&[1, 2, 3], 3);
        assert_eq!(s.eval(&exact((1, 2), (0, 1))), exact((11, 4), (0, 1)));
    }

    proptest! {
        #[test]
        fn reversion_round_trip(c2 in -3i64..4, c3 in -3i64..4, c1 in 1i64..4) {
            let s = poly(&[0, c1, c2, c3], 10);
            let r = s.reversion().unwrap();
            prop_assert_eq!(s.compose(&r).unwrap(), Series::var(10));
            prop_assert_eq!(r.compose(&s).unwrap(), Series::var(10));
        }

        #[test]
        fn inverse_round_trip(c0 in 1i64..5, c1 in -4i64..5, c2 in -4i64..5) {
            let s = poly(&[c0, c1, c2], 9);
            prop_assert_eq!(&s * &s.inverse().unwrap(), Series::one(9));
        }
    }
}
