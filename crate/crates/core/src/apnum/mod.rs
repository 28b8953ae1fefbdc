//! Configurable-precision complex arithmetic.
//!
//! [`APComplex`] wraps an MPC complex number whose real and imaginary parts
//! always share one precision. Everything in the crate that touches a
//! section coefficient, a zero, or a curve point goes through this type.

mod erfc;
mod gamma;
mod quad;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};

pub use erfc::erfc;
pub use gamma::{gamma, log_gamma};
pub use quad::{integrate_ts, integrate_ts_f64, integrate_ts_vec, Abscissa, QuadOptions};

/// Lowest precision any value is allowed to carry.
pub const MIN_BITS: u32 = 53;

/// Complex number with `precision_bits` of mantissa in each component.
#[derive(Clone, PartialEq)]
pub struct APComplex(Complex);

impl APComplex {
    pub fn new(re: f64, im: f64, bits: u32) -> Self {
        APComplex(Complex::with_val(bits.max(MIN_BITS), (re, im)))
    }

    pub fn from_real(re: &Float, bits: u32) -> Self {
        APComplex(Complex::with_val(bits.max(MIN_BITS), (re, 0)))
    }

    pub fn from_parts(re: &Float, im: &Float, bits: u32) -> Self {
        APComplex(Complex::with_val(bits.max(MIN_BITS), (re, im)))
    }

    pub fn zero(bits: u32) -> Self {
        APComplex(Complex::new(bits.max(MIN_BITS)))
    }

    pub fn one(bits: u32) -> Self {
        APComplex(Complex::with_val(bits.max(MIN_BITS), 1))
    }

    /// Wraps a raw MPC value, rejecting NaN and infinities.
    pub fn try_from_complex(c: Complex, what: &'static str) -> Result<Self> {
        if c.real().is_finite() && c.imag().is_finite() {
            Ok(APComplex(c))
        } else {
            Err(Error::NonFinite(what))
        }
    }

    /// Wraps without the finiteness check; for values built from finite
    /// inputs by operations that cannot overflow.
    pub(crate) fn from_complex_unchecked(c: Complex) -> Self {
        APComplex(c)
    }

    pub fn ensure_finite(self, what: &'static str) -> Result<Self> {
        Self::try_from_complex(self.0, what)
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec().0
    }

    pub fn with_precision(&self, bits: u32) -> Self {
        APComplex(Complex::with_val(bits.max(MIN_BITS), &self.0))
    }

    pub fn as_complex(&self) -> &Complex {
        &self.0
    }

    pub fn into_complex(self) -> Complex {
        self.0
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    pub fn re_f64(&self) -> f64 {
        self.0.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.0.imag().to_f64()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re_f64(), self.im_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.precision_bits(), self.0.abs_ref())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        Float::with_val(self.precision_bits(), self.0.arg_ref())
    }

    pub fn arg_f64(&self) -> f64 {
        self.arg().to_f64()
    }

    pub fn conj(&self) -> Self {
        APComplex(Complex::with_val(self.precision_bits(), self.0.conj_ref()))
    }

    pub fn exp(&self) -> Self {
        APComplex(Complex::with_val(self.precision_bits(), self.0.exp_ref()))
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        APComplex(Complex::with_val(self.precision_bits(), self.0.ln_ref()))
    }

    pub fn sqrt(&self) -> Self {
        APComplex(Complex::with_val(self.precision_bits(), self.0.sqrt_ref()))
    }

    /// Principal branch of `self^exponent`.
    pub fn pow(&self, exponent: &APComplex) -> Self {
        let bits = self.precision_bits().max(exponent.precision_bits());
        APComplex(Complex::with_val(bits, (&self.0).pow(&exponent.0)))
    }

    pub fn powi(&self, k: i32) -> Self {
        APComplex(Complex::with_val(self.precision_bits(), (&self.0).pow(k)))
    }

    pub fn recip(&self) -> Result<Self> {
        APComplex(Complex::with_val(self.precision_bits(), self.0.recip_ref()))
            .ensure_finite("recip")
    }

    pub fn scale(&self, factor: &Float) -> Self {
        APComplex(Complex::with_val(self.precision_bits(), &self.0 * factor))
    }

    /// Decimal strings of (re, im) with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (
            fmt_decimal(self.0.real(), digits),
            fmt_decimal(self.0.imag(), digits),
        )
    }
}

impl fmt::Debug for APComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_decimal(20);
        write!(f, "APComplex({re}, {im}; {} bits)", self.precision_bits())
    }
}

impl fmt::Display for APComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_decimal(20);
        write!(f, "({re}, {im})")
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a APComplex> for &'a APComplex {
            type Output = APComplex;
            fn $method(self, rhs: &'a APComplex) -> APComplex {
                let bits = self.precision_bits().max(rhs.precision_bits());
                APComplex(Complex::with_val(bits, &self.0 $op &rhs.0))
            }
        }
        impl $tr<APComplex> for APComplex {
            type Output = APComplex;
            fn $method(self, rhs: APComplex) -> APComplex {
                &self $op &rhs
            }
        }
        impl<'a> $tr<&'a APComplex> for APComplex {
            type Output = APComplex;
            fn $method(self, rhs: &'a APComplex) -> APComplex {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for APComplex {
    type Output = APComplex;
    fn neg(self) -> APComplex {
        APComplex(-self.0)
    }
}

impl Neg for &APComplex {
    type Output = APComplex;
    fn neg(self) -> APComplex {
        APComplex(Complex::with_val(self.precision_bits(), -&self.0))
    }
}

/// Precision escalation schedule for iterative solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
    /// Relative agreement required between two successive precision levels.
    pub agreement_tol: f64,
}

impl PrecisionPolicy {
    pub fn new(start_bits: u32, max_bits: u32, agreement_tol: f64) -> Result<Self> {
        if start_bits < MIN_BITS {
            return Err(Error::InvalidPolicy(format!(
                "start_bits {start_bits} below {MIN_BITS}"
            )));
        }
        if max_bits < start_bits {
            return Err(Error::InvalidPolicy(format!(
                "max_bits {max_bits} below start_bits {start_bits}"
            )));
        }
        if !(agreement_tol > 0.0) {
            return Err(Error::InvalidPolicy(format!(
                "agreement_tol must be positive, got {agreement_tol}"
            )));
        }
        Ok(PrecisionPolicy {
            start_bits,
            max_bits,
            agreement_tol,
        })
    }

    /// Default for degree-`n` work: exp-type coefficients scaled by n^k/k!
    /// span roughly 2^(1.44 n), so the start precision grows with n.
    pub fn for_degree(n: usize) -> Self {
        let start_bits = (4 * n as u32).max(128);
        PrecisionPolicy {
            start_bits,
            max_bits: 16 * start_bits,
            agreement_tol: 1e-12,
        }
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy::for_degree(0)
    }
}

pub(crate) fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

/// 2^e as a Float.
pub(crate) fn pow2(bits: u32, e: i32) -> Float {
    Float::with_val(bits, Float::i_exp(1, e))
}

/// Formats a Float with `digits` significant decimal digits.
///
/// Output looks like `-1.2345e-3`; exact zero prints as `0`.
pub fn fmt_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let s = x.to_string_radix(10, Some(digits));
    s
}

/// Parses a decimal or rational ("17/36") string at the given precision.
pub fn parse_real(text: &str, bits: u32) -> Result<Float> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let q = rug::Rational::from_str_radix(&format!("{}/{}", num.trim(), den.trim()), 10)
            .map_err(|e| Error::Parse(format!("{text}: {e}")))?;
        return Ok(Float::with_val(bits, &q));
    }
    let parsed = Float::parse(text).map_err(|e| Error::Parse(format!("{text}: {e}")))?;
    Ok(Float::with_val(bits, parsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_validation() {
        assert!(PrecisionPolicy::new(52, 100, 1e-12).is_err());
        assert!(PrecisionPolicy::new(128, 64, 1e-12).is_err());
        assert!(PrecisionPolicy::new(128, 256, 0.0).is_err());
        let p = PrecisionPolicy::for_degree(200);
        assert_eq!(p.start_bits, 800);
        assert_eq!(p.max_bits, 12800);
        assert_eq!(PrecisionPolicy::for_degree(10).start_bits, 128);
    }

    #[test]
    fn arithmetic_keeps_precision() {
        let a = APComplex::new(1.0, 2.0, 200);
        let b = APComplex::new(-0.5, 0.25, 200);
        let c = &a * &b;
        assert_eq!(c.precision_bits(), 200);
        assert_eq!(c.to_f64_pair(), (-1.0, -0.75));
        let d = (&c / &b).ensure_finite("div").unwrap();
        assert_eq!(d.to_f64_pair(), (1.0, 2.0));
    }

    #[test]
    fn division_by_zero_is_rejected() {
        let z = APComplex::zero(64);
        assert!(z.recip().is_err());
        let q = &APComplex::one(64) / &z;
        assert!(q.ensure_finite("div").is_err());
    }

    #[test]
    fn decimal_formatting_is_stable() {
        let x = Float::with_val(128, 1.5);
        assert_eq!(fmt_decimal(&x, 5), "1.5000");
        assert_eq!(fmt_decimal(&Float::new(64), 30), "0");
        let third = parse_real("1/3", 200).unwrap();
        assert!(fmt_decimal(&third, 30).starts_with("3.33333333333333333333333333333e-1"));
    }

    #[test]
    fn parse_rational_is_exact_at_precision() {
        let a = parse_real("17/36", 300).unwrap();
        let back = Float::with_val(300, &a * 36u32);
        assert_eq!(back, 17);
    }
}
