use serde::{Deserialize, Serialize};
use std::ops::{Div, Mul, Neg};

use crate::C64;

/// A complex number stored as `mantissa * exp(exponent)`.
///
/// Theta values grow like `exp(pi y^T Im(Omega)^{-1} y)` deep in the Jacobian; the
/// exponent carries that growth so the mantissa stays in `[0.5, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    pub mantissa: C64,
    pub exponent: f64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: C64 { re: 0.0, im: 0.0 },
        exponent: 0.0,
    };

    /// `value * exp(log_scale)`, normalized.
    pub fn new(value: C64, log_scale: f64) -> Self {
        let m = value.norm();
        if m == 0.0 || !m.is_finite() {
            if m == 0.0 {
                return Self::ZERO;
            }
            return Self {
                mantissa: value,
                exponent: log_scale,
            };
        }
        Self {
            mantissa: value / m,
            exponent: log_scale + m.ln(),
        }
    }

    pub fn from_c64(value: C64) -> Self {
        Self::new(value, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == C64::new(0.0, 0.0)
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.exponent + self.mantissa.norm().ln()
        }
    }

    pub fn to_c64(&self) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        self.mantissa * self.exponent.exp()
    }

    /// Value with the factor `exp(log_scale)` removed, i.e. in units of `exp(log_scale)`.
    pub fn relative_to(&self, log_scale: f64) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        self.mantissa * (self.exponent - log_scale).exp()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let e = self.exponent.max(other.exponent);
        Self::new(self.relative_to(e) + other.relative_to(e), e)
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}
