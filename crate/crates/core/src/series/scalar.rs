use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::IBig;
use dashu_ratio::RBig;

use crate::error::{Error, Result};

/// Binary arbitrary-precision float used for the float arithmetic mode.
pub type BigFloat = FBig<HalfEven, 2>;

/// Smallest precision accepted for float-mode computations.
pub const MIN_FLOAT_BITS: usize = 128;

/// Arithmetic mode shared by every coefficient of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float { bits: usize },
}

impl Mode {
    pub fn float(bits: usize) -> Result<Mode> {
        if bits < MIN_FLOAT_BITS {
            return Err(Error::config(
                "precision_bits",
                format!("float mode needs at least {MIN_FLOAT_BITS} bits, got {bits}"),
            ));
        }
        Ok(Mode::Float { bits })
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::Exact)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float { bits } => write!(f, "float{bits}"),
        }
    }
}

/// A number that is either an exact rational in lowest terms or a big float.
///
/// Mixed operations promote the exact operand to the float's precision; the
/// series layer refuses mixed modes before they reach this point.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(RBig),
    Float(BigFloat),
}

pub(crate) fn float_from_rational(r: &RBig, bits: usize) -> BigFloat {
    r.to_float::<HalfEven, 2>(bits).value()
}

pub(crate) fn float_from_int(i: i64, bits: usize) -> BigFloat {
    BigFloat::from(IBig::from(i)).with_precision(bits).value()
}

pub(crate) fn float_from_f64(x: f64, bits: usize) -> BigFloat {
    BigFloat::try_from(x)
        .expect("finite f64")
        .with_precision(bits)
        .value()
}

impl Scalar {
    pub fn zero(mode: Mode) -> Scalar {
        Scalar::from_int(0, mode)
    }

    pub fn one(mode: Mode) -> Scalar {
        Scalar::from_int(1, mode)
    }

    pub fn from_int(i: i64, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(RBig::from(i)),
            Mode::Float { bits } => Scalar::Float(float_from_int(i, bits)),
        }
    }

    /// `num/den` in the requested mode. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64, mode: Mode) -> Scalar {
        assert!(den != 0, "zero denominator");
        let r = RBig::from_parts_signed(IBig::from(num), IBig::from(den));
        Scalar::from_rational(r, mode)
    }

    pub fn from_rational(r: RBig, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(r),
            Mode::Float { bits } => Scalar::Float(float_from_rational(&r, bits)),
        }
    }

    pub fn from_f64(x: f64, bits: usize) -> Scalar {
        Scalar::Float(float_from_f64(x, bits))
    }

    /// Parses `"p/q"`, `"p"` or a decimal literal such as `"0.3"` as an exact rational.
    pub fn parse_rational(text: &str) -> Option<RBig> {
        let t = text.trim();
        if let Ok(r) = t.parse::<RBig>() {
            return Some(r);
        }
        // decimal literal
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.')?;
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let num: IBig = digits.parse().ok()?;
        let den = IBig::from(10).pow(frac_part.len());
        let r = RBig::from_parts_signed(if neg { -num } else { num }, den);
        Some(r)
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(f) => Mode::Float {
                bits: f.precision(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.numerator().is_zero(),
            Scalar::Float(f) => f.repr().significand().is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.numerator() < &IBig::ZERO,
            Scalar::Float(f) => f.repr().significand() < &IBig::ZERO,
        }
    }

    pub fn as_exact(&self) -> Option<&RBig> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().value(),
            Scalar::Float(f) => f.to_f64().value(),
        }
    }

    /// Converts to a float of the given precision (exact values are rounded once).
    pub fn to_float(&self, bits: usize) -> BigFloat {
        match self {
            Scalar::Exact(r) => float_from_rational(r, bits),
            Scalar::Float(f) => f.clone().with_precision(bits).value(),
        }
    }

    pub fn to_mode(&self, mode: Mode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(_), Mode::Exact) => self.clone(),
            (Scalar::Float(f), Mode::Exact) => {
                // only used for diagnostics; floats are dyadic rationals
                let repr = f.repr();
                let sig = repr.significand().clone();
                let exp = repr.exponent();
                let r = if exp >= 0 {
                    RBig::from(sig << exp as usize)
                } else {
                    RBig::from_parts_signed(sig, IBig::ONE << (-exp) as usize)
                };
                Scalar::Exact(r)
            }
            (_, Mode::Float { bits }) => Scalar::Float(self.to_float(bits)),
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn mul_int(&self, k: i64) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r * RBig::from(k)),
            Scalar::Float(f) => Scalar::Float(f * BigFloat::from(IBig::from(k))),
        }
    }

    pub fn div_int(&self, k: i64) -> Scalar {
        assert!(k != 0, "division by zero");
        match self {
            Scalar::Exact(r) => Scalar::Exact(r / RBig::from(k)),
            Scalar::Float(f) => {
                let d = float_from_int(k, f.precision());
                Scalar::Float(f / d)
            }
        }
    }

    /// Natural log of the magnitude as an f64, valid far outside the f64 range.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self {
            Scalar::Exact(r) => ln_abs_int(r.numerator()) - ln_abs_uint(r.denominator()),
            Scalar::Float(f) => {
                let repr = f.repr();
                ln_abs_int(repr.significand()) + repr.exponent() as f64 * std::f64::consts::LN_2
            }
        }
    }
}

fn ln_abs_int(i: &IBig) -> f64 {
    let bits = i.unsigned_abs().bit_len();
    if bits <= 1000 {
        let f: f64 = i.to_f64().value();
        return f.abs().ln();
    }
    let shift = bits - 64;
    let top: f64 = (i.unsigned_abs() >> shift).to_f64().value();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_abs_uint(u: &dashu_int::UBig) -> f64 {
    ln_abs_int(&IBig::from(u.clone()))
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self - other).is_zero(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            _ => {
                let d = self - other;
                Some(if d.is_zero() {
                    Ordering::Equal
                } else if d.is_negative() {
                    Ordering::Less
                } else {
                    Ordering::Greater
                })
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => {
                let v = x.to_f64().value();
                if v.is_finite() {
                    write!(f, "{v:e}")
                } else {
                    let sign = if self.is_negative() { "-" } else { "" };
                    write!(f, "{sign}exp({:.12})", self.ln_abs())
                }
            }
        }
    }
}

impl From<RBig> for Scalar {
    fn from(r: RBig) -> Self {
        Scalar::Exact(r)
    }
}

fn promote(a: &Scalar, b: &Scalar) -> (BigFloat, BigFloat) {
    let bits = match (a, b) {
        (Scalar::Float(x), Scalar::Float(y)) => x.precision().max(y.precision()),
        (Scalar::Float(x), _) | (_, Scalar::Float(x)) => x.precision(),
        _ => unreachable!("promote called on two exact scalars"),
    };
    (a.to_float(bits), b.to_float(bits))
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) if a.precision() == b.precision() => {
                        Scalar::Float(a $op b)
                    }
                    _ => {
                        let (a, b) = promote(self, rhs);
                        Scalar::Float(a $op b)
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r.clone()),
            Scalar::Float(f) => Scalar::Float(-f.clone()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values_are_reduced() {
        let a = Scalar::ratio(6, -8, Mode::Exact);
        assert_eq!(a.to_string(), "-3/4");
        let b = &a * &Scalar::ratio(-4, 3, Mode::Exact);
        assert_eq!(b.to_string(), "1");
    }

    #[test]
    fn float_mode_needs_enough_bits() {
        assert!(Mode::float(64).is_err());
        assert!(Mode::float(128).is_ok());
    }

    #[test]
    fn parses_decimals_exactly() {
        let r = Scalar::parse_rational("0.3").unwrap();
        assert_eq!(Scalar::Exact(r).to_string(), "3/10");
        let r = Scalar::parse_rational("-1/2").unwrap();
        assert_eq!(Scalar::Exact(r).to_string(), "-1/2");
        assert!(Scalar::parse_rational("abc").is_none());
        assert!(Scalar::parse_rational("1e-3").is_none());
    }

    #[test]
    fn mixed_operations_promote_to_float() {
        let a = Scalar::ratio(1, 3, Mode::Exact);
        let b = Scalar::one(Mode::Float { bits: 128 });
        let c = &a + &b;
        assert_eq!(c.mode(), Mode::Float { bits: 128 });
        assert!((c.to_f64() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_magnitude_of_huge_rationals() {
        let big = RBig::from(IBig::from(10).pow(500));
        let s = Scalar::Exact(big);
        assert!((s.ln_abs() - 500.0 * 10f64.ln()).abs() < 1e-9);
        let f = Scalar::Float(s.to_float(200));
        assert!((f.ln_abs() - 500.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn float_to_exact_is_dyadic() {
        let f = Scalar::from_f64(0.375, 128);
        assert_eq!(f.to_mode(Mode::Exact).to_string(), "3/8");
    }
}
