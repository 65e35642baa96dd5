//! Exact Clebsch–Gordan arithmetic for integer angular momenta.
//!
//! Coefficients are evaluated with the Racah sum in arbitrary-precision
//! rationals and carried as `sign * sqrt(square)`, so selection-rule zeros
//! come out exactly zero rather than merely small.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A real number of the form `sign * sqrt(square)` with `square` rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtRational {
    negative: bool,
    square: BigRational,
}

impl SqrtRational {
    pub fn zero() -> Self {
        Self { negative: false, square: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self { negative: false, square: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    /// The exact square of the value.
    pub fn square(&self) -> &BigRational {
        &self.square
    }

    pub fn is_negative(&self) -> bool {
        self.negative && !self.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let mag = self.square.to_f64().unwrap_or(f64::NAN).sqrt();
        if self.is_negative() {
            -mag
        } else {
            mag
        }
    }

    pub fn abs(&self) -> Self {
        Self { negative: false, square: self.square.clone() }
    }
}

impl std::ops::Mul for &SqrtRational {
    type Output = SqrtRational;

    fn mul(self, rhs: &SqrtRational) -> SqrtRational {
        SqrtRational { negative: self.negative ^ rhs.negative, square: &self.square * &rhs.square }
    }
}

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0);
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `<j1 m1; j2 m2 | j m>` in the Condon–Shortley phase convention.
///
/// Returns exact zero for any combination forbidden by the triangle rule,
/// projection bounds, or `m1 + m2 != m`.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> SqrtRational {
    if j1 < 0 || j2 < 0 || j < 0 {
        return SqrtRational::zero();
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j || m1 + m2 != m {
        return SqrtRational::zero();
    }
    if j < (j1 - j2).abs() || j > j1 + j2 {
        return SqrtRational::zero();
    }

    let prefactor_num = BigInt::from(2 * j + 1)
        * factorial(j + j1 - j2)
        * factorial(j - j1 + j2)
        * factorial(j1 + j2 - j)
        * factorial(j + m)
        * factorial(j - m)
        * factorial(j1 - m1)
        * factorial(j1 + m1)
        * factorial(j2 - m2)
        * factorial(j2 + m2);
    let prefactor = BigRational::new(prefactor_num, factorial(j1 + j2 + j + 1));

    let k_min = 0.max(j2 - j - m1).max(j1 - j + m2);
    let k_max = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(j1 + j2 - j - k)
            * factorial(j1 - m1 - k)
            * factorial(j2 + m2 - k)
            * factorial(j - j2 + m1 + k)
            * factorial(j - j1 - m2 + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }

    SqrtRational { negative: sum.is_negative(), square: prefactor * &sum * &sum }
}
