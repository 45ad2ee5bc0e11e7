//! Truncation points as exact monomials.
//!
//! A point is `Π p^(e_p) · B^β` with rational exponents, where `B = |t|/2π`
//! is either an exact rational (then folded into the prime exponents) or a
//! generic transcendental real. Products, quotients and rational powers stay
//! exact, so "is ℓ·m an integer" is decided without rounding: a monomial is an
//! integer only when β = 0 and every prime exponent is a non-negative integer.
//! With a generic base a nonzero β makes the value transcendental.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal, Precision};

/// Trial division bound when factoring the rational parts of a point.
const FACTOR_LIMIT: u64 = 10_000_000;

/// The value of `|t|/2π` that truncation products are built from.
#[derive(Clone, Debug)]
pub enum TruncBase {
    /// t = 0: every truncation product vanishes.
    Zero,
    /// `B` known exactly (t = 2πB for a rational B).
    Exact(Rational),
    /// `B = |t|/2π` for a t given numerically; treated as transcendental.
    Generic(Arc<HpReal>),
}

impl TruncBase {
    /// Base for the point s = σ + it.
    pub fn from_s(s: &HpComplex) -> TruncBase {
        let t = Float::with_val(hp::precision_of(s).bits() + 32, s.imag().abs_ref());
        if t.is_zero() {
            return TruncBase::Zero;
        }
        let two_pi = Float::with_val(t.prec(), rug::float::Constant::Pi) * 2u32;
        TruncBase::Generic(Arc::new(t / two_pi))
    }

    /// `B^exponent` as a truncation point.
    pub fn power(&self, exponent: &Rational) -> Result<TruncPoint> {
        match self {
            TruncBase::Zero if *exponent > 0 => Ok(TruncPoint::zero()),
            TruncBase::Zero if *exponent == 0 => Ok(TruncPoint::one()),
            TruncBase::Zero => Err(Error::Domain("negative power of a zero truncation base".into())),
            TruncBase::Exact(b) => TruncPoint::rational(b)?.pow(exponent),
            TruncBase::Generic(b) => Ok(TruncPoint {
                repr: Repr::Mono { primes: BTreeMap::new(), base_exp: exponent.clone(), base: Some(b.clone()) },
            }),
        }
    }

    pub fn value(&self, prec: Precision) -> HpReal {
        match self {
            TruncBase::Zero => Float::new(prec.bits()),
            TruncBase::Exact(b) => hp::rational_to_real(prec, b),
            TruncBase::Generic(b) => Float::with_val(prec.bits(), &**b),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Zero,
    Mono { primes: BTreeMap<u64, Rational>, base_exp: Rational, base: Option<Arc<HpReal>> },
}

#[derive(Clone, Debug)]
pub struct TruncPoint {
    repr: Repr,
}

fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if p > FACTOR_LIMIT {
            return Err(Error::Range(format!("cannot factor {n} by trial division")));
        }
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

fn factor_integer(n: &Integer) -> Result<Vec<(u64, u32)>> {
    let v = n.to_u64().ok_or_else(|| Error::Range(format!("truncation component {n} exceeds 64 bits")))?;
    factor_u64(v)
}

impl TruncPoint {
    pub fn zero() -> TruncPoint {
        TruncPoint { repr: Repr::Zero }
    }

    pub fn one() -> TruncPoint {
        TruncPoint { repr: Repr::Mono { primes: BTreeMap::new(), base_exp: Rational::new(), base: None } }
    }

    pub fn integer(n: u64) -> Result<TruncPoint> {
        TruncPoint::rational(&Rational::from(n))
    }

    /// Exact rational point; 0 gives the zero point.
    pub fn rational(r: &Rational) -> Result<TruncPoint> {
        if *r < 0 {
            return Err(Error::Domain(format!("negative truncation point {r}")));
        }
        if *r == 0 {
            return Ok(TruncPoint::zero());
        }
        let mut primes = BTreeMap::new();
        for (p, k) in factor_integer(r.numer())? {
            primes.insert(p, Rational::from(k));
        }
        for (p, k) in factor_integer(r.denom())? {
            primes.insert(p, -Rational::from(k));
        }
        Ok(TruncPoint { repr: Repr::Mono { primes, base_exp: Rational::new(), base: None } })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn mul(&self, other: &TruncPoint) -> TruncPoint {
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => TruncPoint::zero(),
            (Repr::Mono { primes: pa, base_exp: ba, base: sa }, Repr::Mono { primes: pb, base_exp: bb, base: sb }) => {
                let mut primes = pa.clone();
                for (p, e) in pb {
                    let entry = primes.entry(*p).or_insert_with(Rational::new);
                    *entry += e;
                }
                primes.retain(|_, e| *e != 0);
                let base_exp = Rational::from(ba + bb);
                let base = sa.clone().or_else(|| sb.clone());
                TruncPoint { repr: Repr::Mono { primes, base_exp, base } }
            }
        }
    }

    pub fn recip(&self) -> Result<TruncPoint> {
        self.pow(&Rational::from(-1))
    }

    pub fn div(&self, other: &TruncPoint) -> Result<TruncPoint> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn scale(&self, r: &Rational) -> Result<TruncPoint> {
        Ok(self.mul(&TruncPoint::rational(r)?))
    }

    pub fn pow(&self, e: &Rational) -> Result<TruncPoint> {
        match &self.repr {
            Repr::Zero if *e > 0 => Ok(TruncPoint::zero()),
            Repr::Zero => Err(Error::Domain("non-positive power of a zero truncation point".into())),
            Repr::Mono { primes, base_exp, base } => {
                let mut out = BTreeMap::new();
                for (p, k) in primes {
                    let v = Rational::from(k * e);
                    if v != 0 {
                        out.insert(*p, v);
                    }
                }
                let base_exp = Rational::from(base_exp * e);
                Ok(TruncPoint { repr: Repr::Mono { primes: out, base_exp, base: base.clone() } })
            }
        }
    }

    /// The exact value when the point is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match &self.repr {
            Repr::Zero => Some(Rational::new()),
            Repr::Mono { primes, base_exp, .. } => {
                if *base_exp != 0 || primes.values().any(|e| *e.denom() != 1) {
                    return None;
                }
                let mut num = Integer::from(1);
                let mut den = Integer::from(1);
                for (p, e) in primes {
                    let k = e.numer().to_u32().unwrap_or(0);
                    if *e > 0 {
                        num *= Integer::from(*p).pow(k);
                    } else {
                        let k = Integer::from(-e.numer()).to_u32().unwrap_or(0);
                        den *= Integer::from(*p).pow(k);
                    }
                }
                Some(Rational::from((num, den)))
            }
        }
    }

    /// Some(n) exactly when the point is the positive integer n.
    pub fn exact_integer(&self) -> Option<u64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Mono { .. } => {
                let r = self.as_rational()?;
                if *r.denom() == 1 {
                    r.numer().to_u64()
                } else {
                    None
                }
            }
        }
    }

    /// Natural logarithm; the zero point has none.
    pub fn ln(&self, prec: Precision) -> Result<HpReal> {
        let work = prec.bits() + 32;
        match &self.repr {
            Repr::Zero => Err(Error::Domain("logarithm of a zero truncation point".into())),
            Repr::Mono { primes, base_exp, base } => {
                let mut acc = Float::new(work);
                for (p, e) in primes {
                    let lp = Float::with_val(work, *p).ln();
                    acc += lp * Float::with_val(work, e);
                }
                if *base_exp != 0 {
                    let b = base.as_ref().ok_or_else(|| Error::Domain("base power without a base".into()))?;
                    let lb = Float::with_val(work, b.ln_ref());
                    acc += lb * Float::with_val(work, base_exp);
                }
                Ok(Float::with_val(prec.bits(), acc))
            }
        }
    }

    pub fn value(&self, prec: Precision) -> Result<HpReal> {
        if self.is_zero() {
            return Ok(Float::new(prec.bits()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(hp::rational_to_real(prec, &r));
        }
        let lnv = self.ln(Precision::new(prec.bits() + 32)?)?;
        Ok(Float::with_val(prec.bits(), lnv.exp()))
    }

    /// ⌊x⌋, exact for rational points. Irrational points closer than
    /// 2^(−prec/2)·max(1, x) to an integer are rejected as ambiguous.
    pub fn floor(&self, prec: Precision) -> Result<u64> {
        if let Some(r) = self.as_rational() {
            let f = Integer::from(r.floor_ref());
            return f.to_u64().ok_or_else(|| Error::Range(format!("truncation point {r} too large")));
        }
        let work = Precision::new(prec.bits() + 64)?;
        let v = self.value(work)?;
        let f = hp::floor_to_integer(&v)?;
        let below = Float::with_val(work.bits(), &v - &f);
        let above = Float::with_val(work.bits(), 1 - below.clone());
        let gap = if below < above { below } else { above };
        let mut guard = Float::with_val(work.bits(), 1u32) >> (prec.bits() / 2);
        if v > 1u32 {
            guard *= &v;
        }
        if gap < guard {
            return Err(Error::AmbiguousBoundary(format!("{self} ≈ {}", v.to_f64())));
        }
        f.to_u64().ok_or_else(|| Error::Range(format!("truncation point {} too large", v.to_f64())))
    }
}

impl fmt::Display for TruncPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Mono { primes, base_exp, .. } => {
                if let Some(r) = self.as_rational() {
                    return write!(f, "{r}");
                }
                let mut parts: Vec<String> = primes.iter().map(|(p, e)| format!("{p}^({e})")).collect();
                if *base_exp != 0 {
                    parts.push(format!("B^({base_exp})"));
                }
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Precision = Precision::DEFAULT;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn rational_points_are_exact() {
        let x = TruncPoint::rational(&q(7, 3)).unwrap();
        let y = TruncPoint::rational(&q(3, 14)).unwrap();
        assert_eq!(x.mul(&y).as_rational(), Some(q(1, 2)));
        assert_eq!(x.mul(&y).floor(P).unwrap(), 0);
        assert_eq!(x.floor(P).unwrap(), 2);
        assert_eq!(
            TruncPoint::integer(12).unwrap().div(&TruncPoint::integer(4).unwrap()).unwrap().exact_integer(),
            Some(3)
        );
    }

    #[test]
    fn irrational_powers_are_never_integers() {
        let r2 = TruncPoint::integer(2).unwrap().pow(&q(1, 2)).unwrap();
        assert_eq!(r2.exact_integer(), None);
        assert_eq!(r2.mul(&r2).exact_integer(), Some(2));
        let v = r2.value(P).unwrap();
        assert!((v.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(r2.scale(&q(10, 1)).unwrap().floor(P).unwrap(), 14);
    }

    #[test]
    fn generic_base_cancels_exactly() {
        let s = hp::complex(P, 0.5, 40.0);
        let base = TruncBase::from_s(&s);
        let t = base.power(&q(1, 1)).unwrap();
        let x = base.power(&q(1, 2)).unwrap();
        let y = t.div(&x).unwrap();
        let ell = x.div(&y).unwrap();
        assert_eq!(ell.exact_integer(), Some(1));
        assert_eq!(x.exact_integer(), None);
        let tv = t.value(P).unwrap().to_f64();
        assert!((tv - 40.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert_eq!(t.floor(P).unwrap(), 6);
    }

    #[test]
    fn exact_base_folds_into_primes() {
        let base = TruncBase::Exact(q(9, 1));
        let x = base.power(&q(1, 2)).unwrap();
        assert_eq!(x.exact_integer(), Some(3));
        assert!(matches!(TruncBase::Zero.power(&q(1, 2)).unwrap().floor(P), Ok(0)));
    }

    #[test]
    fn near_integer_irrational_is_ambiguous() {
        let b = Float::with_val(P.bits(), 5u32) + (Float::with_val(P.bits(), 1u32) >> 150u32);
        let base = TruncBase::Generic(Arc::new(b));
        let x = base.power(&q(1, 1)).unwrap();
        assert!(matches!(x.floor(P), Err(Error::AmbiguousBoundary(_))));
        assert_eq!(base.power(&q(1, 2)).unwrap().floor(P).unwrap(), 2);
    }
}
