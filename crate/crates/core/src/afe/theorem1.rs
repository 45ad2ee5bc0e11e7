//! Explicit remainder of a product of two AFEs and its square specialization.

use rug::{Complex, Float, Rational};

use super::spec::{AfeSpec, PointAfe};
use super::trunc::{TruncBase, TruncPoint};
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal, Precision};

/// Components I₁…I₅, L₁, L₂ of E₁,₂(s, x₁x₂) next to the direct value
/// f₁f₂ − Σ_{n≤x₁x₂} A(n)n^(−s) − ψ₁ψ₂Σ_{n≤y₁y₂} B(n)n^(s−δ).
#[derive(Clone, Debug)]
pub struct RemainderBreakdown {
    pub s: HpComplex,
    pub x1: TruncPoint,
    pub x2: TruncPoint,
    pub y1: HpReal,
    pub y2: HpReal,
    pub i1: HpComplex,
    pub i2: HpComplex,
    pub i3: HpComplex,
    pub i4: HpComplex,
    pub i5: HpComplex,
    pub l1: HpComplex,
    pub l2: HpComplex,
    pub total: HpComplex,
    pub direct: HpComplex,
    /// |total − direct|.
    pub residual: HpReal,
    /// Number of (m, ℓ₂m) pairs with ℓ₂m ∈ ℤ, and likewise for L₂.
    pub l1_terms: usize,
    pub l2_terms: usize,
    /// Terms summed on both sides, the amplification used for tolerances.
    pub terms: usize,
}

pub const CSV_HEADER: &str = "s_re,s_im,x1,x2,I1_re,I1_im,I2_re,I2_im,I3_re,I3_im,I4_re,I4_im,I5_re,I5_im,L1_re,L1_im,L2_re,L2_im,total_re,total_im,direct_re,direct_im,residual";

impl RemainderBreakdown {
    pub fn prec(&self) -> Precision {
        hp::precision_of(&self.s)
    }

    /// |total − direct| / max(1, |direct|).
    pub fn relative_residual(&self) -> HpReal {
        let scale = hp::abs(&self.direct);
        if scale > 1u32 {
            Float::with_val(self.prec().bits(), &self.residual / scale)
        } else {
            self.residual.clone()
        }
    }

    /// tolerance_for(prec, terms) scaled by max(1, |direct|).
    pub fn tolerance(&self) -> HpReal {
        let scale = hp::abs(&self.direct).to_f64().max(1.0);
        hp::tolerance_for(self.prec(), (self.terms.max(1) as f64) * scale)
    }

    pub fn passes(&self) -> bool {
        self.residual <= self.tolerance()
    }

    /// |total − L₁ − L₂ − direct|: the residual if the L-terms were dropped.
    pub fn residual_without_l(&self) -> HpReal {
        let bits = self.prec().bits();
        let mut t = Complex::with_val(bits, &self.total - &self.l1);
        t -= &self.l2;
        t -= &self.direct;
        hp::abs(&t)
    }

    pub fn csv_row(&self, digits: usize) -> String {
        let mut cells = Vec::with_capacity(23);
        let push_c = |cells: &mut Vec<String>, z: &HpComplex| {
            cells.push(hp::format_real(z.real(), digits));
            cells.push(hp::format_real(z.imag(), digits));
        };
        push_c(&mut cells, &self.s);
        let p = self.prec();
        for x in [&self.x1, &self.x2] {
            cells.push(x.value(p).map(|v| hp::format_real(&v, digits)).unwrap_or_else(|_| "nan".into()));
        }
        for z in [&self.i1, &self.i2, &self.i3, &self.i4, &self.i5, &self.l1, &self.l2, &self.total, &self.direct] {
            push_c(&mut cells, z);
        }
        cells.push(hp::format_real(&self.residual, digits));
        cells.join(",")
    }
}

fn add_mul(acc: &mut HpComplex, a: &HpComplex, b: &HpComplex) {
    let bits = hp::precision_of(acc).bits();
    *acc += Complex::with_val(bits, a * b);
}

/// Σ_{n≤⌊x_outer⌋} a_outer(n)n^(−s)·E_inner(s, xx/n).
pub(crate) fn hyperbola_part(
    outer: &mut PointAfe,
    inner: &mut PointAfe,
    x_outer: &TruncPoint,
    xx: &TruncPoint,
) -> Result<(HpComplex, usize)> {
    let n_max = outer.floor(x_outer)?;
    let mut acc = hp::zero(outer.prec());
    for n in 1..=n_max {
        let a = outer.a(n)?;
        if a.is_zero() {
            continue;
        }
        let z = xx.div(&TruncPoint::integer(n as u64)?)?;
        let e = inner.remainder(&z)?;
        add_mul(&mut acc, &outer.main_term(n)?, &e);
    }
    Ok((acc, n_max))
}

/// Σ_{m≤⌊y_outer⌋} b_outer(m)m^(s−δ)·E_inner(s, m·x_inner/y_outer), without ψ_outer.
pub(crate) fn dual_part(
    outer: &mut PointAfe,
    inner: &mut PointAfe,
    y_outer: &TruncPoint,
    x_inner: &TruncPoint,
) -> Result<(HpComplex, usize)> {
    let mut acc = hp::zero(outer.prec());
    if y_outer.is_zero() {
        return Ok((acc, 0));
    }
    let m_max = outer.floor(y_outer)?;
    let ratio = x_inner.div(y_outer)?;
    for m in 1..=m_max {
        let b = outer.b(m)?;
        if b.is_zero() {
            continue;
        }
        let z = ratio.mul(&TruncPoint::integer(m as u64)?);
        let e = inner.remainder(&z)?;
        add_mul(&mut acc, &outer.dual_term(m)?, &e);
    }
    Ok((acc, m_max))
}

/// ℓ^(−s)Σ_{m≤⌊y_outer⌋, ℓm∈ℤ} b_outer(m)a_inner(ℓm)m^(−δ), without ψ_outer,
/// and the number of integral ℓm.
pub(crate) fn l_part(
    outer: &mut PointAfe,
    inner: &mut PointAfe,
    y_outer: &TruncPoint,
    ell: &TruncPoint,
) -> Result<(HpComplex, usize)> {
    let prec = outer.prec();
    let mut acc = hp::zero(prec);
    if y_outer.is_zero() {
        return Ok((acc, 0));
    }
    let m_max = outer.floor(y_outer)?;
    let neg_delta = Complex::with_val(prec.bits(), -outer.delta());
    let mut count = 0;
    for m in 1..=m_max {
        let Some(k) = ell.mul(&TruncPoint::integer(m as u64)?).exact_integer() else {
            continue;
        };
        count += 1;
        let b = outer.b(m)?;
        let a = inner.a(k as usize)?;
        let mut term = Complex::with_val(prec.bits(), &b * &a);
        term *= hp::int_pow(m as u64, &neg_delta)?;
        acc += term;
    }
    if count > 0 {
        let ln_ell = ell.ln(prec)?;
        let w = Complex::with_val(prec.bits(), outer.s() * &ln_ell);
        acc *= Complex::with_val(prec.bits(), -w).exp();
    }
    Ok((acc, count))
}

fn same_point(p1: &PointAfe, p2: &PointAfe) -> Result<()> {
    let bits = p1.prec().bits().max(p2.prec().bits());
    let gap = hp::abs(&Complex::with_val(bits, p1.s() - p2.s()));
    if !gap.is_zero() {
        return Err(Error::Domain("product AFE needs both factors at the same s".into()));
    }
    let dgap = hp::abs(&Complex::with_val(bits, p1.delta() - p2.delta()));
    if !dgap.is_zero() {
        return Err(Error::Domain("product AFE needs equal δ".into()));
    }
    Ok(())
}

/// Dirichlet convolution of numeric coefficient tables (index 0 unused).
fn convolve_numeric(a: &[HpComplex], b: &[HpComplex], n: usize, prec: Precision) -> Vec<HpComplex> {
    let mut out = vec![hp::zero(prec); n + 1];
    for d in 1..=n {
        if a[d].is_zero() {
            continue;
        }
        for k in 1..=n / d {
            if !b[k].is_zero() {
                add_mul(&mut out[d * k], &a[d], &b[k]);
            }
        }
    }
    out
}

/// f₁f₂ − Σ_{n≤x₁x₂}A(n)n^(−s) − ψ₁ψ₂Σ_{n≤y₁y₂}B(n)n^(s−δ) with A = a₁∗a₂, B = b₁∗b₂.
pub fn product_remainder(
    p1: &mut PointAfe,
    p2: &mut PointAfe,
    x1: &TruncPoint,
    x2: &TruncPoint,
) -> Result<(HpComplex, usize)> {
    same_point(p1, p2)?;
    let prec = p1.prec();
    let xx = x1.mul(x2);
    let yy = p1.dual_point(x1)?.mul(&p2.dual_point(x2)?);
    let n = p1.floor(&xx)?;
    let m = p1.floor(&yy)?;
    let a1: Vec<HpComplex> =
        (0..=n).map(|k| if k == 0 { Ok(hp::zero(prec)) } else { p1.a(k) }).collect::<Result<_>>()?;
    let a2: Vec<HpComplex> =
        (0..=n).map(|k| if k == 0 { Ok(hp::zero(prec)) } else { p2.a(k) }).collect::<Result<_>>()?;
    let big_a = convolve_numeric(&a1, &a2, n, prec);
    let mut value = Complex::with_val(prec.bits(), p1.f() * p2.f());
    for (k, c) in big_a.iter().enumerate().skip(1) {
        if !c.is_zero() {
            value -= Complex::with_val(prec.bits(), c * &p1.main_power(k)?);
        }
    }
    if m >= 1 {
        let b1: Vec<HpComplex> =
            (0..=m).map(|k| if k == 0 { Ok(hp::zero(prec)) } else { p1.b(k) }).collect::<Result<_>>()?;
        let b2: Vec<HpComplex> =
            (0..=m).map(|k| if k == 0 { Ok(hp::zero(prec)) } else { p2.b(k) }).collect::<Result<_>>()?;
        let big_b = convolve_numeric(&b1, &b2, m, prec);
        let mut dual = hp::zero(prec);
        for (k, c) in big_b.iter().enumerate().skip(1) {
            if !c.is_zero() {
                add_mul(&mut dual, c, &p1.dual_power(k)?);
            }
        }
        dual *= Complex::with_val(prec.bits(), p1.psi() * p2.psi());
        value -= dual;
    }
    Ok((hp::ensure_finite(value, "product_remainder")?, n + m))
}

/// Theorem-1 assembly for points already evaluated at a common s.
pub fn theorem1_points(
    p1: &mut PointAfe,
    p2: &mut PointAfe,
    x1: &TruncPoint,
    x2: &TruncPoint,
) -> Result<RemainderBreakdown> {
    same_point(p1, p2)?;
    let prec = p1.prec();
    let bits = prec.bits();
    let y1 = p1.dual_point(x1)?;
    let y2 = p2.dual_point(x2)?;
    let xx = x1.mul(x2);

    let (i1, n1) = hyperbola_part(p1, p2, x1, &xx)?;
    let (i2, n2) = hyperbola_part(p2, p1, x2, &xx)?;
    let (mut i3, m1) = dual_part(p1, p2, &y1, x2)?;
    i3 *= p1.psi();
    let (mut i4, m2) = dual_part(p2, p1, &y2, x1)?;
    i4 *= p2.psi();
    let i5 = Complex::with_val(bits, p1.remainder(x1)? * p2.remainder(x2)?);
    let (mut l1, l1_terms) = if y1.is_zero() {
        (hp::zero(prec), 0)
    } else {
        let ell2 = x2.div(&y1)?;
        l_part(p1, p2, &y1, &ell2)?
    };
    l1 *= p1.psi();
    let (mut l2, l2_terms) = if y2.is_zero() {
        (hp::zero(prec), 0)
    } else {
        let ell1 = x1.div(&y2)?;
        l_part(p2, p1, &y2, &ell1)?
    };
    l2 *= p2.psi();

    let mut total = hp::zero(prec);
    for part in [&i1, &i2, &i3, &i4, &i5, &l1, &l2] {
        total += part;
    }
    let (direct, direct_terms) = product_remainder(p1, p2, x1, x2)?;
    let residual = hp::abs(&Complex::with_val(bits, &total - &direct));
    Ok(RemainderBreakdown {
        s: p1.s().clone(),
        x1: x1.clone(),
        x2: x2.clone(),
        y1: y1.value(prec)?,
        y2: y2.value(prec)?,
        i1,
        i2,
        i3,
        i4,
        i5,
        l1,
        l2,
        total,
        direct,
        residual,
        l1_terms,
        l2_terms,
        terms: direct_terms + n1 + n2 + m1 + m2 + 2,
    })
}

/// Theorem 1: E₁,₂(s, x₁x₂) = I₁ + I₂ + I₃ + I₄ + I₅ + L₁ + L₂ with every E
/// evaluated by direct subtraction, next to the direct product remainder.
pub fn theorem1_assemble(
    spec1: &AfeSpec,
    spec2: &AfeSpec,
    s: &HpComplex,
    x1: &TruncPoint,
    x2: &TruncPoint,
) -> Result<RemainderBreakdown> {
    let mut p1 = PointAfe::new(spec1, s)?;
    let mut p2 = PointAfe::new(spec2, s)?;
    theorem1_points(&mut p1, &mut p2, x1, x2)
}

/// Theorem 1 at x_i = ρ_i·√T_i(s).
pub fn theorem1_balanced(
    spec1: &AfeSpec,
    spec2: &AfeSpec,
    s: &HpComplex,
    rho1: &Rational,
    rho2: &Rational,
) -> Result<RemainderBreakdown> {
    let mut p1 = PointAfe::new(spec1, s)?;
    let mut p2 = PointAfe::new(spec2, s)?;
    let x1 = p1.balanced(rho1)?;
    let x2 = p2.balanced(rho2)?;
    theorem1_points(&mut p1, &mut p2, &x1, &x2)
}

/// Point of the reflected AFE (f at δ − s) sharing this point's base.
pub fn reflected_point(p: &PointAfe) -> Result<PointAfe> {
    let spec =
        p.spec().reflected().ok_or_else(|| Error::Domain(format!("{} has no reflected form", p.spec().label())))?;
    let s = Complex::with_val(p.prec().bits(), p.delta() - p.s());
    PointAfe::with_base(&spec, &s, p.base().clone())
}

/// I₃ and I₄ in functional-equation form,
/// ψ₁ψ₂Σ_{m≤y₁} b₁(m)m^(s−δ)E₂(δ−s, y₁y₂/m) and its mirror, where r1, r2 are
/// the reflected points of p1, p2.
pub fn fe_dual_parts(
    p1: &mut PointAfe,
    p2: &mut PointAfe,
    r1: &mut PointAfe,
    r2: &mut PointAfe,
    x1: &TruncPoint,
    x2: &TruncPoint,
) -> Result<(HpComplex, HpComplex)> {
    let prec = p1.prec();
    let y1 = p1.dual_point(x1)?;
    let y2 = p2.dual_point(x2)?;
    let psi12 = Complex::with_val(prec.bits(), p1.psi() * p2.psi());
    let yy = y1.mul(&y2);
    let mut parts = [hp::zero(prec), hp::zero(prec)];
    for (slot, (outer, inner, y_outer)) in parts.iter_mut().zip([(&mut *p1, &mut *r2, &y1), (&mut *p2, &mut *r1, &y2)])
    {
        if y_outer.is_zero() {
            continue;
        }
        let m_max = outer.floor(y_outer)?;
        for m in 1..=m_max {
            if outer.b(m)?.is_zero() {
                continue;
            }
            let z = yy.div(&TruncPoint::integer(m as u64)?)?;
            let e = inner.remainder(&z)?;
            add_mul(slot, &outer.dual_term(m)?, &e);
        }
        *slot *= &psi12;
    }
    let [i3, i4] = parts;
    Ok((i3, i4))
}

/// Square specialization f = f₁ = f₂ at x₁ = x₂ = x.
#[derive(Clone, Debug)]
pub struct SquareRemainder {
    pub generic: RemainderBreakdown,
    /// 2{Σ_{n≤x} a(n)n^(−s)E(s,x²/n) + ψΣ_{n≤y} b(n)n^(s−δ)E(s,nx/y) + L} + E(s,x)².
    pub symmetric: HpComplex,
    /// The same with the dual part in functional-equation form, when f has one.
    pub fe_form: Option<HpComplex>,
}

impl SquareRemainder {
    pub fn symmetric_gap(&self) -> HpReal {
        let bits = self.generic.prec().bits();
        hp::abs(&Complex::with_val(bits, &self.symmetric - &self.generic.total))
    }

    pub fn fe_gap(&self) -> Option<HpReal> {
        let bits = self.generic.prec().bits();
        self.fe_form.as_ref().map(|v| hp::abs(&Complex::with_val(bits, v - &self.generic.direct)))
    }
}

/// 2{Σ_{n≤x} a(n)n^(−s)E(s,x²/n) + dual + L} + E(s,x)² for one point; `reflected`
/// selects the functional-equation form of the dual part.
pub(crate) fn square_total(p: &mut PointAfe, reflected: Option<&mut PointAfe>, x: &TruncPoint) -> Result<HpComplex> {
    let prec = p.prec();
    let bits = prec.bits();
    let mut twin = p.clone();
    let y = p.dual_point(x)?;
    let xx = x.mul(x);
    let (main, _) = hyperbola_part(p, &mut twin, x, &xx)?;
    let dual = match reflected {
        None => {
            let (d, _) = dual_part(p, &mut twin, &y, x)?;
            Complex::with_val(bits, &d * p.psi())
        }
        Some(r) => {
            let mut acc = hp::zero(prec);
            if !y.is_zero() {
                let yy = y.mul(&y);
                for m in 1..=p.floor(&y)? {
                    if p.b(m)?.is_zero() {
                        continue;
                    }
                    let e = r.remainder(&yy.div(&TruncPoint::integer(m as u64)?)?)?;
                    add_mul(&mut acc, &p.dual_term(m)?, &e);
                }
            }
            let psi2 = Complex::with_val(bits, p.psi() * p.psi());
            acc * psi2
        }
    };
    let l = if y.is_zero() {
        hp::zero(prec)
    } else {
        let ell = x.div(&y)?;
        let (v, _) = l_part(p, &mut twin, &y, &ell)?;
        Complex::with_val(bits, &v * p.psi())
    };
    let e = p.remainder(x)?;
    let mut total = main;
    total += dual;
    total += l;
    total *= 2u32;
    total += Complex::with_val(bits, &e * &e);
    Ok(total)
}

/// Corollary 1: the square AFE remainder by the generic product assembly,
/// the symmetric factor-2 form, and the functional-equation form.
pub fn corollary1_square(spec: &AfeSpec, s: &HpComplex, x: &TruncPoint) -> Result<SquareRemainder> {
    let mut p = PointAfe::new(spec, s)?;
    let mut twin = p.clone();
    let generic = theorem1_points(&mut p, &mut twin, x, x)?;
    let symmetric = square_total(&mut p, None, x)?;
    let fe_form = match (spec.reflected(), p.trunc_product().is_zero()) {
        (Some(_), false) => {
            let mut r = reflected_point(&p)?;
            Some(square_total(&mut p, Some(&mut r), x)?)
        }
        _ => None,
    };
    Ok(SquareRemainder { generic, symmetric, fe_form })
}

/// Balanced truncation ρ·√T for a spec at s without keeping the point.
pub fn balanced_point(spec: &AfeSpec, s: &HpComplex, rho: &Rational) -> Result<TruncPoint> {
    let t = spec.trunc_product(&TruncBase::from_s(s))?;
    if t.is_zero() {
        return Err(Error::Domain("balanced truncation needs T(s) > 0".into()));
    }
    t.pow(&Rational::from((1, 2)))?.scale(rho)
}
