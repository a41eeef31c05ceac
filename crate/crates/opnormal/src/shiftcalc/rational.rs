//! Complex numbers with exact rational parts.
//!
//! Shift verdicts compare long products of sequence entries for equality;
//! doing that in floating point would turn an exact question into a zoned
//! one, and fixed-width rationals overflow on window-length products. Both
//! parts are therefore `BigRational`.

use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: BigRational::from_integer(1.into()),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re^2 + im^2`, an exact nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        GaussianRational {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    /// Nearest floating-point value, for diagnostics only.
    pub fn to_f64_parts(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        &self + &rhs
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        &self - &rhs
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn g(rn: i64, rd: i64, inum: i64, id: i64) -> GaussianRational {
        GaussianRational::new(q(rn, rd), q(inum, id))
    }

    #[test]
    fn multiplication_follows_i_squared_is_minus_one() {
        let i = g(0, 1, 1, 1);
        assert_eq!(&i * &i, g(-1, 1, 0, 1));
        let z = g(1, 2, 1, 3);
        let w = g(2, 1, -1, 1);
        // (1/2 + i/3)(2 - i) = 1 + 1/3 + i(2/3 - 1/2)
        assert_eq!(&z * &w, g(4, 3, 1, 6));
    }

    #[test]
    fn norm_sqr_matches_conjugate_product() {
        let z = g(3, 4, -2, 5);
        let via_conj = &z * &z.conj();
        assert!(via_conj.is_real());
        assert_eq!(via_conj.re, z.norm_sqr());
    }

    #[test]
    fn display_keeps_rational_parts_exact() {
        assert_eq!(g(1, 3, 0, 1).to_string(), "1/3");
        assert_eq!(g(0, 1, -2, 7).to_string(), "-2/7i");
        assert_eq!(g(5, 1, 1, 2).to_string(), "5 + 1/2i");
    }
}
