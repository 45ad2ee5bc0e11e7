//! Precision-controlled real and complex arithmetic.
//!
//! Values are MPFR/MPC numbers carrying their own mantissa precision. Every
//! numerical routine in the crate takes a [`Precision`] and builds all of its
//! intermediates at that precision, so an expression tree never mixes
//! precisions. Exact scalars use GMP rationals, which are always kept in
//! canonical reduced form with a positive denominator.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Arbitrary-precision real value.
pub type HpReal = Float;
/// Arbitrary-precision complex value.
pub type HpComplex = Complex;
/// Exact rational scalar (canonical, reduced, positive denominator).
pub type ExactRational = Rational;

/// Fixed guard factor applied by [`tolerance_for`].
pub const GUARD_BITS: u32 = 16;

/// Binary mantissa precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 64;
    /// Working precision used unless a caller asks for something else.
    pub const DEFAULT: Precision = Precision(192);
    /// Precision used to re-validate exported results.
    pub const VALIDATION: Precision = Precision(256);

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Domain(format!("precision must be at least {} bits, got {bits}", Self::MIN_BITS)));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn doubled(self) -> Precision {
        Precision(self.0 * 2)
    }

    /// Significant decimal digits matching this precision, ⌈bits·log₁₀2⌉.
    pub fn decimal_digits(self) -> usize {
        (self.0 as f64 * std::f64::consts::LOG10_2).ceil() as usize
    }

    pub fn max(self, other: Precision) -> Precision {
        Precision(self.0.max(other.0))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// `2^(−bits) · condition · 2^16`.
///
/// `condition` is the caller's amplification estimate (typically the number
/// of summed terms) and must be at least 1.
pub fn tolerance_for(prec: Precision, condition: f64) -> HpReal {
    let condition = if condition.is_finite() { condition.max(1.0) } else { f64::MAX };
    let mut tol = Float::with_val(prec.bits(), condition);
    tol <<= GUARD_BITS as i32 - prec.bits() as i32;
    tol
}

pub fn real(prec: Precision, value: f64) -> HpReal {
    Float::with_val(prec.bits(), value)
}

pub fn real_from_int(prec: Precision, value: i64) -> HpReal {
    Float::with_val(prec.bits(), value)
}

pub fn rational_to_real(prec: Precision, value: &Rational) -> HpReal {
    Float::with_val(prec.bits(), value)
}

pub fn complex(prec: Precision, re: f64, im: f64) -> HpComplex {
    Complex::with_val(prec.bits(), (re, im))
}

pub fn complex_from_real(value: &HpReal) -> HpComplex {
    Complex::with_val(value.prec(), (value, 0))
}

pub fn zero(prec: Precision) -> HpComplex {
    Complex::with_val(prec.bits(), 0)
}

pub fn one(prec: Precision) -> HpComplex {
    Complex::with_val(prec.bits(), 1)
}

pub fn pi(prec: Precision) -> HpReal {
    Float::with_val(prec.bits(), Constant::Pi)
}

/// Precision a complex value was built at (the larger of its two parts).
pub fn precision_of(z: &HpComplex) -> Precision {
    let (a, b) = z.prec();
    Precision(a.max(b))
}

pub fn abs(z: &HpComplex) -> HpReal {
    Float::with_val(precision_of(z).bits(), z.abs_ref())
}

pub fn arg(z: &HpComplex) -> HpReal {
    Float::with_val(precision_of(z).bits(), z.arg_ref())
}

pub fn is_finite(z: &HpComplex) -> bool {
    z.real().is_finite() && z.imag().is_finite()
}

/// Aborts with an error on NaN or infinite components.
pub fn ensure_finite(z: HpComplex, context: &'static str) -> Result<HpComplex> {
    if is_finite(&z) {
        Ok(z)
    } else {
        Err(Error::NonFinite(context))
    }
}

/// `|a − b| ≤ tol`.
pub fn approx_eq(a: &HpComplex, b: &HpComplex, tol: &HpReal) -> bool {
    let diff = Complex::with_val(precision_of(a).max(precision_of(b)).bits(), a - b);
    abs(&diff) <= *tol
}

/// `base^exponent = exp(exponent · ln base)` with the real logarithm.
pub fn complex_pow(base: &HpReal, exponent: &HpComplex) -> Result<HpComplex> {
    if !base.is_finite() || *base <= 0 {
        return Err(Error::Domain(format!("complex_pow needs a positive finite base, got {}", base.to_f64())));
    }
    let prec = precision_of(exponent).bits().max(base.prec());
    let ln = Float::with_val(prec, base.ln_ref());
    let w = Complex::with_val(prec, exponent * &ln);
    ensure_finite(w.exp(), "complex_pow")
}

/// `n^exponent` for a positive integer base.
pub fn int_pow(n: u64, exponent: &HpComplex) -> Result<HpComplex> {
    let base = Float::with_val(precision_of(exponent).bits(), n);
    complex_pow(&base, exponent)
}

/// `exp(2πi·k/m)`; exact for the quarter-turn cases.
pub fn unit_root(prec: Precision, k: i64, m: u64) -> HpComplex {
    assert!(m > 0, "root of unity order must be positive");
    let k = k.rem_euclid(m as i64) as u64;
    if (4 * k).is_multiple_of(m) {
        return match 4 * k / m {
            0 => complex(prec, 1.0, 0.0),
            1 => complex(prec, 0.0, 1.0),
            2 => complex(prec, -1.0, 0.0),
            _ => complex(prec, 0.0, -1.0),
        };
    }
    let mut angle = pi(prec) * 2u32;
    angle *= Rational::from((k, m));
    let (s, c) = angle.sin_cos(Float::new(prec.bits()));
    Complex::with_val(prec.bits(), (c, s))
}

/// Principal branch `exp(alpha · Ln z)`; integer exponents are exact powers.
pub fn principal_power(z: &HpComplex, alpha: &Rational) -> Result<HpComplex> {
    let prec = precision_of(z);
    if alpha.denom() == &1 {
        let e = alpha.numer().to_i32().ok_or_else(|| Error::Domain("integer exponent out of range".into()))?;
        if e < 0 && z.is_zero() {
            return Err(Error::Domain("negative power of zero".into()));
        }
        return ensure_finite(Complex::with_val(prec.bits(), (z).pow(e)), "principal_power");
    }
    if z.is_zero() {
        return if *alpha > 0 { Ok(zero(prec)) } else { Err(Error::Domain("non-positive power of zero".into())) };
    }
    let ln = Complex::with_val(prec.bits(), z.ln_ref());
    let w = ln * rational_to_real(prec, alpha);
    ensure_finite(w.exp(), "principal_power")
}

/// Floor of a finite real as an integer.
pub fn floor_to_integer(x: &HpReal) -> Result<Integer> {
    Float::with_val(x.prec(), x.floor_ref()).to_integer().ok_or(Error::NonFinite("floor"))
}

pub fn to_f64_pair(z: &HpComplex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// Scientific-notation decimal string with `digits` significant digits.
pub fn format_real(x: &HpReal, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

pub fn parse_real(prec: Precision, text: &str) -> Result<HpReal> {
    let parsed = Float::parse(text.trim()).map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
    Ok(Float::with_val(prec.bits(), parsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Taylor-series exp and trig, independent of MPFR's transcendental code.
    fn taylor_exp_i(prec: Precision, re: &Float, im: &Float) -> Complex {
        let bits = prec.bits() + 32;
        let series = |x: &Float, alternate_odd: bool| -> (Float, Float) {
            // returns (even part, odd part) of the exponential-type series
            let mut even = Float::with_val(bits, 1);
            let mut odd = Float::with_val(bits, 0);
            let mut term = Float::with_val(bits, 1);
            for k in 1..400u32 {
                term *= x;
                term /= k;
                let sign_flip = alternate_odd && (k / 2) % 2 == 1;
                let mut t = term.clone();
                if sign_flip {
                    t = -t;
                }
                if k % 2 == 0 {
                    even += &t;
                } else {
                    odd += &t;
                }
                if term.is_zero() || term.clone().abs() < Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 8)) {
                    break;
                }
            }
            (even, odd)
        };
        // exp(re) via halving to keep the series short
        let mut halvings = 0;
        let mut r = Float::with_val(bits, re);
        while r.clone().abs() > 0.5 {
            r /= 2;
            halvings += 1;
        }
        let (e, o) = series(&r, false);
        let mut mag = e + o;
        for _ in 0..halvings {
            mag.square_mut();
        }
        let (c, s) = series(&Float::with_val(bits, im), true);
        Complex::with_val(prec.bits(), (Float::with_val(bits, &mag * &c), Float::with_val(bits, &mag * &s)))
    }

    #[test]
    fn tolerance_matches_definition() {
        let p = Precision::DEFAULT;
        assert_eq!(tolerance_for(p, 1.0), Float::with_val(192, Float::i_exp(1, -176)));
        let t = tolerance_for(Precision::new(128).unwrap(), 1e3).log2().to_f64();
        assert!((t - (-112.0 + 1e3f64.log2())).abs() < 1e-9);
        assert!((t + 102.0).abs() < 0.1);
        let t = tolerance_for(p, 1e6).log2().to_f64();
        assert!((t + 156.0).abs() < 0.1);
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(63).is_err());
        assert_eq!(Precision::new(64).unwrap().bits(), 64);
        assert_eq!(Precision::DEFAULT.decimal_digits(), 58);
    }

    #[test]
    fn pow_identity_cases() {
        let p = Precision::DEFAULT;
        let s = complex(p, 0.3, -7.5);
        let one_to_s = int_pow(1, &s).unwrap();
        assert!(approx_eq(&one_to_s, &one(p), &tolerance_for(p, 1.0)));
        let two_to_zero = int_pow(2, &zero(p)).unwrap();
        assert!(approx_eq(&two_to_zero, &one(p), &tolerance_for(p, 1.0)));
    }

    #[test]
    fn pow_matches_taylor_composition() {
        let p = Precision::DEFAULT;
        let s = complex(p, 1.0, 1.0);
        let got = int_pow(2, &s).unwrap();
        let ln2 = Float::with_val(p.bits() + 32, Float::ln_u(2));
        let expect = taylor_exp_i(p, &ln2, &ln2);
        let diff = abs(&Complex::with_val(192, &got - &expect));
        assert!(diff < Float::with_val(192, Float::i_exp(1, -180)), "diff {diff}");
    }

    #[test]
    fn pow_rejects_non_positive_base() {
        let p = Precision::DEFAULT;
        assert!(complex_pow(&real(p, 0.0), &one(p)).is_err());
        assert!(complex_pow(&real(p, -2.0), &one(p)).is_err());
    }

    #[test]
    fn modulus_of_pow() {
        let p = Precision::DEFAULT;
        let s = complex(p, -0.75, 31.0);
        let w = int_pow(7, &s).unwrap();
        let expect = Float::with_val(192, 7).pow(-0.75f64);
        let rel = (abs(&w) - &expect).abs() / expect;
        assert!(rel < tolerance_for(p, 4.0));
    }

    #[test]
    fn unit_roots_are_exact_on_quarters() {
        let p = Precision::DEFAULT;
        assert_eq!(unit_root(p, 1, 4), complex(p, 0.0, 1.0));
        assert_eq!(unit_root(p, 3, 6), complex(p, -1.0, 0.0));
        let w = unit_root(p, 1, 3);
        let cube = Complex::with_val(192, (&w).pow(3));
        assert!(approx_eq(&cube, &one(p), &tolerance_for(p, 4.0)));
    }

    #[test]
    fn format_round_trip() {
        let p = Precision::DEFAULT;
        let x = pi(p) / 7u32;
        let text = format_real(&x, p.decimal_digits());
        let back = parse_real(p, &text).unwrap();
        assert_eq!(format_real(&back, p.decimal_digits()), text);
        let rel = (back - &x).abs() / x;
        assert!(rel < Float::with_val(192, Float::i_exp(1, -185)));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn rational_inverse_round_trip(a in -10_000i64..10_000, b in 1i64..10_000) {
                prop_assume!(a != 0);
                let r = Rational::from((a, b));
                let inv = Rational::from((b, a));
                prop_assert_eq!(r * inv, Rational::from(1));
            }

            #[test]
            fn pow_is_additive_in_exponent(
                n in 1u64..5000,
                a in -2.0f64..2.0, b in -50.0f64..50.0,
                c in -2.0f64..2.0, d in -50.0f64..50.0,
            ) {
                let p = Precision::DEFAULT;
                let s1 = complex(p, a, b);
                let s2 = complex(p, c, d);
                let sum = Complex::with_val(192, &s1 + &s2);
                let lhs = int_pow(n, &sum).unwrap();
                let rhs = int_pow(n, &s1).unwrap() * int_pow(n, &s2).unwrap();
                let scale = abs(&lhs).max(&Float::with_val(192, 1));
                let tol = tolerance_for(p, 4.0) * scale;
                prop_assert!(approx_eq(&lhs, &rhs, &tol));
            }
        }
    }
}
