//! Real-number contract shared by every numerical kernel.
//!
//! Kernels are generic over [`Real`]. Two backends exist: native `f64`
//! (53-bit mantissa) and [`Mp`], an MPFR float with a compile-time mantissa
//! width. The runtime precision switch (`53 | 128 | 256`) is a dispatch over
//! these monomorphised types, so precision is uniform within one run and all
//! arithmetic is correctly rounded, hence deterministic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

/// Arithmetic and elementary functions at a fixed mantissa width.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    /// Mantissa width in bits.
    const BITS: u32;

    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Parses a decimal literal, rounding once to this precision.
    fn parse_decimal(s: &str) -> Option<Self>;

    fn pi() -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn powf(&self, e: &Self) -> Self;

    /// Scientific notation with `digits` significant digits.
    fn to_sci(&self, digits: usize) -> String;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// -1, 0 or 1.
    fn sign(&self) -> i32 {
        match self.partial_cmp(&Self::zero()) {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        }
    }

    /// Unit roundoff 2^-BITS as an `f64`.
    fn unit_roundoff() -> f64 {
        (-(Self::BITS as f64)).exp2()
    }

    /// Integer part toward minus infinity, for moderate magnitudes.
    fn floor_i64(&self) -> i64 {
        self.floor().to_f64() as i64
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Real for f64 {
    const BITS: u32 = 53;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn to_sci(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
}

/// MPFR-backed real with a `BITS`-bit mantissa.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp<const BITS: u32>(pub Float);

/// 128-bit mantissa.
pub type R128 = Mp<128>;
/// 256-bit mantissa.
pub type R256 = Mp<256>;

impl<const BITS: u32> Mp<BITS> {
    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl<const BITS: u32> fmt::Debug for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp<{}>({})", BITS, self.to_sci(12))
    }
}

impl<const BITS: u32> fmt::Display for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident) => {
        impl<const BITS: u32> $tr for Mp<BITS> {
            type Output = Self;
            #[inline]
            fn $method(mut self, rhs: Self) -> Self {
                self.0.$amethod(&rhs.0);
                self
            }
        }
        impl<'a, const BITS: u32> $tr<&'a Mp<BITS>> for Mp<BITS> {
            type Output = Self;
            #[inline]
            fn $method(mut self, rhs: &'a Self) -> Self {
                self.0.$amethod(&rhs.0);
                self
            }
        }
        impl<const BITS: u32> $atr for Mp<BITS> {
            #[inline]
            fn $amethod(&mut self, rhs: Self) {
                self.0.$amethod(&rhs.0);
            }
        }
        impl<'a, const BITS: u32> $atr<&'a Mp<BITS>> for Mp<BITS> {
            #[inline]
            fn $amethod(&mut self, rhs: &'a Self) {
                self.0.$amethod(&rhs.0);
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign);
mp_binop!(Sub, sub, SubAssign, sub_assign);
mp_binop!(Mul, mul, MulAssign, mul_assign);
mp_binop!(Div, div, DivAssign, div_assign);

impl<const BITS: u32> Neg for Mp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Mp(-self.0)
    }
}

impl<const BITS: u32> Real for Mp<BITS> {
    const BITS: u32 = BITS;

    fn from_f64(v: f64) -> Self {
        Mp(Float::with_val(BITS, v))
    }
    fn from_i64(v: i64) -> Self {
        Mp(Float::with_val(BITS, v))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(Mp(Float::with_val(BITS, parsed)))
    }
    fn pi() -> Self {
        Mp(Float::with_val(BITS, rug::float::Constant::Pi))
    }
    fn sin(&self) -> Self {
        Mp(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mp(self.0.clone().cos())
    }
    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    fn floor(&self) -> Self {
        Mp(self.0.clone().floor())
    }
    fn powi(&self, n: i32) -> Self {
        Mp(self.0.clone().pow(n))
    }
    fn powf(&self, e: &Self) -> Self {
        Mp(self.0.clone().pow(&e.0))
    }
    fn to_sci(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return format!("{:.*e}", digits.saturating_sub(1), 0.0f64);
        }
        let (neg, mantissa, exp) =
            self.0
                .to_sign_string_exp_round(10, Some(digits.max(1)), Round::Nearest);
        let exp = exp.unwrap_or(0) - 1;
        let mut out = String::with_capacity(digits + 8);
        if neg {
            out.push('-');
        }
        let mut chars = mantissa.chars();
        if let Some(first) = chars.next() {
            out.push(first);
        }
        let rest: String = chars.collect();
        if !rest.is_empty() {
            out.push('.');
            out.push_str(&rest);
        }
        out.push('e');
        out.push_str(&exp.to_string());
        out
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_formatting_matches_between_backends() {
        assert_eq!(1.5f64.to_sci(4), "1.500e0");
        assert_eq!(R128::from_f64(1.5).to_sci(4), "1.500e0");
        assert_eq!(R128::from_f64(-0.00125).to_sci(3), "-1.25e-3");
        assert_eq!((-0.00125f64).to_sci(3), "-1.25e-3");
        assert_eq!(R256::zero().to_sci(3), "0.00e0");
    }

    #[test]
    fn mp_precision_is_carried() {
        let third = R128::ratio(1, 3);
        assert_eq!(third.0.prec(), 128);
        let err = (third * R128::from_i64(3) - R128::one()).abs();
        assert!(err.to_f64() < 1e-37);
        let pi = R256::pi();
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn parse_keeps_digits_beyond_f64() {
        let x = R128::parse_decimal("0.1000000000000000000000000001").unwrap();
        let y = R128::parse_decimal("0.1").unwrap();
        let d = (x - y).to_f64();
        assert!((d - 1e-28).abs() < 1e-40);
        assert!(f64::parse_decimal("nope").is_none());
    }

    #[test]
    fn sign_and_floor() {
        assert_eq!(R128::from_f64(-2.5).floor_i64(), -3);
        assert_eq!((-2.5f64).floor_i64(), -3);
        assert_eq!(R128::zero().sign(), 0);
        assert_eq!(R128::from_f64(-1e-40).sign(), -1);
    }
}
