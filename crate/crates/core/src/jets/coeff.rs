use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// Exact complex rational coefficient.
pub type Exact = Complex<BigRational>;

/// Coefficient field for truncated series: exact rational-complex or `f64` complex.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    fn to_c64(&self) -> C64;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Coeff for Exact {
    fn zero() -> Self {
        <Exact as Zero>::zero()
    }

    fn one() -> Self {
        <Exact as One>::one()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(rational(num, den), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(<Exact as One>::one() / self.clone())
        }
    }

    fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }

    fn one() -> Self {
        C64::new(1.0, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(C64::new(1.0, 0.0) / self)
        }
    }

    fn to_c64(&self) -> C64 {
        *self
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `re_num/re_den + i im_num/im_den` as an exact coefficient.
pub fn exact(re: (i64, i64), im: (i64, i64)) -> Exact {
    Complex::new(rational(re.0, re.1), rational(im.0, im.1))
}

/// Generalized binomial coefficient `binom(num/den, k)`.
pub fn binomial_ratio<C: Coeff>(num: i64, den: i64, k: usize) -> C {
    let mut acc = C::one();
    for i in 0..k as i64 {
        acc = acc * C::from_ratio(num - i * den, den * (i + 1));
    }
    acc
}

pub fn factorial<C: Coeff>(n: usize) -> C {
    (1..=n as i64).fold(C::one(), |acc, k| acc * C::from_int(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_binomials() {
        // binom(1/2, 2) = -1/8
        let b: Exact = binomial_ratio(1, 2, 2);
        assert_eq!(b, exact((-1, 8), (0, 1)));
        let b: Exact = binomial_ratio(3, 1, 2);
        assert_eq!(b, Exact::from_int(3));
    }

    #[test]
    fn exact_inverse() {
        let z = exact((1, 2), (3, 1));
        let w = Coeff::inv(&z).unwrap();
        assert_eq!(z * w, <Exact as Coeff>::one());
        assert!(Coeff::inv(&<Exact as Coeff>::zero()).is_none());
    }
}
