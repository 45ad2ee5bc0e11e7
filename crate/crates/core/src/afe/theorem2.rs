//! Structural identity for the square of L(s, χ) at X = Y = qt/2π.
//!
//! ψ(1−s,χ̄)E₂(s, qt/2π, χ) = 2{ψ(1−s,χ̄)M(s,χ) + ψ(s,χ)M(1−s,χ̄) + Σ'_{n≤√(qt/2π)} 1/n} +
//!   ψ(1−s,χ̄)E₁(s, √(qt/2π), χ)²,
//! M(s,χ) = Σ_{n≤√(qt/2π)} χ(n)n^(−s)E₁(s, (qt/2π)/n, χ), Σ' over gcd(n, q) = 1.

use rug::{Complex, Rational};

use super::spec::{AfeSpec, PointAfe};
use super::theorem1::reflected_point;
use super::trunc::TruncPoint;
use crate::characters::Character;
use crate::cyclo::gcd;
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal};

#[derive(Clone, Debug)]
pub struct Theorem2Report {
    pub s: HpComplex,
    pub q: u64,
    /// ψ(1−s,χ̄)E₂(s, qt/2π, χ), E₂ by direct subtraction.
    pub lhs: HpComplex,
    pub rhs: HpComplex,
    pub residual: HpReal,
    pub tolerance: HpReal,
    /// Right-hand side with E₁(s, qt/2π, χ) in M (no division by n).
    pub rhs_without_n: HpComplex,
    pub residual_without_n: HpReal,
    /// |ψ(1−s,χ̄)E₁(s, √(qt/2π), χ)²|.
    pub tail: HpReal,
    /// Σ'_{n≤√(qt/2π)} 1/n.
    pub coprime_harmonic: HpComplex,
}

impl Theorem2Report {
    pub fn passes(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Σ_{n≤x} c(n)n^(−s)·E(s, z_n) over a point's main terms.
fn m_sum(p: &mut PointAfe, x_floor: usize, big_x: &TruncPoint, divide: bool) -> Result<HpComplex> {
    let bits = p.prec().bits();
    let mut acc = hp::zero(p.prec());
    let fixed = if divide { None } else { Some(p.remainder(big_x)?) };
    for n in 1..=x_floor {
        if p.a(n)?.is_zero() {
            continue;
        }
        let e = match &fixed {
            Some(e) => e.clone(),
            None => p.remainder(&big_x.div(&TruncPoint::integer(n as u64)?)?)?,
        };
        acc += Complex::with_val(bits, p.main_term(n)? * e);
    }
    Ok(acc)
}

/// Both sides of the identity for primitive χ at s (t ≠ 0).
pub fn theorem2_check(chi: &Character, s: &HpComplex) -> Result<Theorem2Report> {
    let prec = hp::precision_of(s);
    let bits = prec.bits();
    let mut p = PointAfe::new(&AfeSpec::dirichlet_l(chi)?, s)?;
    let big_x = p.trunc_product().clone();
    if big_x.is_zero() {
        return Err(Error::Domain("the identity needs t ≠ 0".into()));
    }
    let x = big_x.pow(&Rational::from((1, 2)))?;
    let x_floor = p.floor(&x)?;
    if x_floor == 0 {
        return Err(Error::Domain("√(qt/2π) < 1: every sum is empty".into()));
    }
    let mut r = reflected_point(&p)?;
    let mut square = PointAfe::with_base(&AfeSpec::power_family(Rational::from(2), chi)?, s, p.base().clone())?;
    let e2 = square.remainder(&big_x)?;
    let psi_r = r.psi().clone();
    let lhs = Complex::with_val(bits, &psi_r * &e2);

    let q = chi.modulus();
    let mut harmonic = hp::zero(prec);
    for n in 1..=x_floor as u64 {
        if gcd(n, q) == 1 {
            harmonic += hp::rational_to_real(prec, &Rational::from((1, n)));
        }
    }
    let e1 = p.remainder(&x)?;
    let tail_c = Complex::with_val(bits, &psi_r * Complex::with_val(bits, &e1 * &e1));

    let assemble = |m: &HpComplex, m_r: &HpComplex, psi: &HpComplex| {
        let mut v = Complex::with_val(bits, &psi_r * m);
        v += Complex::with_val(bits, psi * m_r);
        v += &harmonic;
        v *= 2u32;
        v += &tail_c;
        v
    };
    let psi = p.psi().clone();
    let m = m_sum(&mut p, x_floor, &big_x, true)?;
    let m_r = m_sum(&mut r, x_floor, &big_x, true)?;
    let rhs = assemble(&m, &m_r, &psi);
    let m0 = m_sum(&mut p, x_floor, &big_x, false)?;
    let m0_r = m_sum(&mut r, x_floor, &big_x, false)?;
    let rhs_without_n = assemble(&m0, &m0_r, &psi);

    let residual = hp::abs(&Complex::with_val(bits, &lhs - &rhs));
    let residual_without_n = hp::abs(&Complex::with_val(bits, &lhs - &rhs_without_n));
    let terms = 4 * p.floor(&big_x)? + 16;
    let scale = hp::abs(&lhs).to_f64().max(1.0);
    Ok(Theorem2Report {
        s: s.clone(),
        q,
        lhs,
        rhs,
        residual,
        tolerance: hp::tolerance_for(prec, terms as f64 * scale),
        rhs_without_n,
        residual_without_n,
        tail: hp::abs(&tail_c),
        coprime_harmonic: harmonic,
    })
}
