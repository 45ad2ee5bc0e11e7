//! Exact arithmetic in cyclotomic fields ℚ(ζ_m).
//!
//! Elements are polynomials in ζ_m of degree below φ(m) with rational
//! coefficients, always reduced modulo the m-th cyclotomic polynomial, so
//! equal field elements have equal representations.

use std::fmt;
use std::sync::Arc;

use rug::{Complex, Integer, Rational};

use crate::hp::{self, HpComplex, Precision};

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Integer coefficients of Φ_m, lowest degree first.
fn cyclotomic_poly(m: u64) -> Vec<Integer> {
    // Φ_d = (x^d − 1) / Π_{e | d, e < d} Φ_e, built up over the divisors of m
    let divisors: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    let mut built: Vec<(u64, Vec<Integer>)> = Vec::with_capacity(divisors.len());
    for &d in &divisors {
        let mut num = vec![Integer::new(); d as usize + 1];
        num[0] = Integer::from(-1);
        num[d as usize] = Integer::from(1);
        for (e, phi_e) in &built {
            if d % e == 0 {
                num = exact_divide(&num, phi_e);
            }
        }
        built.push((d, num));
    }
    built.pop().expect("m has divisors").1
}

fn exact_divide(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let mut rem: Vec<Integer> = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quo = vec![Integer::new(); nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd].clone();
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= Integer::from(&c * dj);
        }
        quo[i] = c;
    }
    debug_assert!(rem.iter().all(|r| *r == 0));
    quo
}

/// ℚ(ζ_m) with its reduced power basis.
#[derive(Debug)]
pub struct CycloField {
    m: u64,
    phi: Vec<Integer>,
    powers: Vec<Vec<Rational>>,
}

impl CycloField {
    pub fn new(m: u64) -> Arc<CycloField> {
        assert!(m > 0, "cyclotomic order must be positive");
        let phi = cyclotomic_poly(m);
        let degree = phi.len() - 1;
        let mut field = CycloField { m, phi, powers: Vec::with_capacity(m as usize) };
        let mut current = vec![Rational::new(); degree];
        current[0] = Rational::from(1);
        for _ in 0..m {
            field.powers.push(current.clone());
            // multiply by ζ: shift up one degree and reduce
            let mut next = vec![Rational::new()];
            next.extend(current);
            current = field.reduce(next);
        }
        Arc::new(field)
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut p: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        while p.len() > d {
            let top = p.pop().expect("non-empty");
            if top != 0 {
                let shift = p.len() - d;
                for (j, c) in self.phi[..d].iter().enumerate() {
                    p[shift + j] -= Rational::from(&top * c);
                }
            }
        }
        p.resize(d, Rational::new());
        p
    }
}

#[derive(Clone)]
pub struct Cyclo {
    field: Arc<CycloField>,
    coeffs: Vec<Rational>,
}

impl Cyclo {
    pub fn zero(field: &Arc<CycloField>) -> Cyclo {
        Cyclo { field: field.clone(), coeffs: vec![Rational::new(); field.degree()] }
    }

    pub fn from_rational(field: &Arc<CycloField>, r: Rational) -> Cyclo {
        let mut z = Cyclo::zero(field);
        z.coeffs[0] = r;
        z
    }

    /// ζ_m^e.
    pub fn root(field: &Arc<CycloField>, e: i64) -> Cyclo {
        let e = e.rem_euclid(field.m as i64) as usize;
        Cyclo { field: field.clone(), coeffs: field.powers[e].clone() }
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// The value as a rational, when it lies in ℚ.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(|c| *c == 0) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Same element viewed in ℚ(ζ_M) for a multiple M of m.
    pub fn lift(&self, target: &Arc<CycloField>) -> Cyclo {
        if Arc::ptr_eq(&self.field, target) || target.m == self.field.m {
            return Cyclo { field: target.clone(), coeffs: self.coeffs.clone() };
        }
        assert!(target.m.is_multiple_of(self.field.m), "lift needs a multiple of the order");
        let step = (target.m / self.field.m) as usize;
        let mut acc = Cyclo::zero(target);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                acc = acc.add(&Cyclo::root(target, (i * step) as i64).scale(c));
            }
        }
        acc
    }

    fn common(&self, other: &Cyclo) -> (Cyclo, Cyclo) {
        if self.field.m == other.field.m {
            return (self.clone(), other.lift(&self.field));
        }
        let field = CycloField::new(lcm(self.field.m, other.field.m));
        (self.lift(&field), other.lift(&field))
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        let (mut a, b) = self.common(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Cyclo {
        Cyclo { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| Rational::from(c * r)).collect() }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        let (a, b) = self.common(other);
        let d = a.field.degree();
        if d == 1 {
            return Cyclo::from_rational(&a.field, Rational::from(&a.coeffs[0] * &b.coeffs[0]));
        }
        let mut p = vec![Rational::new(); 2 * d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if *y != 0 {
                    p[i + j] += Rational::from(x * y);
                }
            }
        }
        Cyclo { coeffs: a.field.reduce(p), field: a.field }
    }

    /// Complex conjugate (ζ ↦ ζ^(−1)).
    pub fn conj(&self) -> Cyclo {
        let mut acc = Cyclo::zero(&self.field);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                acc = acc.add(&Cyclo::root(&self.field, -(i as i64)).scale(c));
            }
        }
        acc
    }

    pub fn to_complex(&self, prec: Precision) -> HpComplex {
        let mut acc = hp::zero(prec);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                let w = hp::unit_root(prec, i as i64, self.field.m);
                acc += Complex::with_val(prec.bits(), w * hp::rational_to_real(prec, c));
            }
        }
        acc
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Cyclo) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})ζ{}^{i}", self.field.m)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_poly(5).len(), 5);
    }

    #[test]
    fn roots_multiply_by_adding_exponents() {
        let f = CycloField::new(12);
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(Cyclo::root(&f, a).mul(&Cyclo::root(&f, b)), Cyclo::root(&f, a + b));
            }
        }
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for m in [2u64, 3, 4, 5, 8, 12] {
            let f = CycloField::new(m);
            let mut acc = Cyclo::zero(&f);
            for e in 0..m as i64 {
                acc = acc.add(&Cyclo::root(&f, e));
            }
            assert!(acc.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn lift_and_mixed_arithmetic() {
        let f4 = CycloField::new(4);
        let f3 = CycloField::new(3);
        let i = Cyclo::root(&f4, 1);
        let w = Cyclo::root(&f3, 1);
        let product = i.mul(&w);
        let f12 = CycloField::new(12);
        assert_eq!(product, Cyclo::root(&f12, 3 + 4));
        assert_eq!(i.mul(&i).as_rational(), Some(Rational::from(-1)));
        assert_eq!(w.conj(), Cyclo::root(&f3, 2));
    }

    #[test]
    fn numeric_value_matches_unit_root() {
        let p = Precision::DEFAULT;
        let f = CycloField::new(5);
        let z = Cyclo::root(&f, 3);
        let diff = Complex::with_val(192, z.to_complex(p) - hp::unit_root(p, 3, 5));
        assert!(hp::abs(&diff) < hp::tolerance_for(p, 8.0));
    }
}
