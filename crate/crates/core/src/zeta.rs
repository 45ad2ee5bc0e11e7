//! Hurwitz and Riemann zeta by Euler–Maclaurin summation, the partial
//! fraction pieces z(s, a, q), and the closed-form remainder of the real-s
//! approximate functional equation.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::bernoulli;
use crate::error::{Error, Result};
use crate::hp::{self, ExactRational, HpComplex, HpReal, Precision};
use crate::special;

const EXTRA_BITS: u32 = 32;
const MAX_DOUBLINGS: u32 = 6;

#[derive(Clone, Debug)]
pub struct HurwitzParams {
    pub alpha: ExactRational,
    pub s: HpComplex,
    pub prec: Precision,
}

impl HurwitzParams {
    pub fn new(s: &HpComplex, alpha: ExactRational, prec: Precision) -> Result<Self> {
        if alpha <= 0 || alpha > 1 {
            return Err(Error::Domain(format!("Hurwitz parameter must lie in (0, 1], got {alpha}")));
        }
        Ok(HurwitzParams { alpha, s: Complex::with_val(prec.bits(), s), prec })
    }
}

fn is_one(s: &HpComplex) -> bool {
    s.imag().is_zero() && *s.real() == 1
}

/// ζ(s, α) for rational 0 < α ≤ 1.
pub fn hurwitz_zeta(p: &HurwitzParams) -> Result<HpComplex> {
    if p.alpha <= 0 || p.alpha > 1 {
        return Err(Error::Domain(format!("Hurwitz parameter must lie in (0, 1], got {}", p.alpha)));
    }
    let alpha = hp::rational_to_real(Precision::new(p.prec.bits() + EXTRA_BITS)?, &p.alpha);
    let s = Complex::with_val(p.prec.bits(), &p.s);
    hurwitz_real_shift(&s, &alpha)
}

/// ζ(s) = ζ(s, 1).
pub fn riemann_zeta(s: &HpComplex) -> Result<HpComplex> {
    let prec = hp::precision_of(s);
    hurwitz_zeta(&HurwitzParams { alpha: Rational::from(1), s: s.clone(), prec })
}

/// z(s, a, q) = q^(−s) ζ(s, a/q).
pub fn z_line(s: &HpComplex, a: u64, q: u64) -> Result<HpComplex> {
    if q == 0 || a == 0 || a > q {
        return Err(Error::Domain(format!("z_line needs 1 ≤ a ≤ q, got a = {a}, q = {q}")));
    }
    let prec = hp::precision_of(s);
    let h = hurwitz_zeta(&HurwitzParams { alpha: Rational::from((a, q)), s: s.clone(), prec })?;
    let neg = Complex::with_val(prec.bits(), -s);
    Ok(h * hp::int_pow(q, &neg)?)
}

/// Σ_{n ≥ 0} (n + β)^(−s) for any real β > 0, at the precision of `s`.
pub fn hurwitz_real_shift(s: &HpComplex, beta: &HpReal) -> Result<HpComplex> {
    if is_one(s) {
        return Err(Error::Pole("Hurwitz zeta at s = 1".into()));
    }
    if *beta <= 0 {
        return Err(Error::Domain("Hurwitz shift must be positive".into()));
    }
    let prec = hp::precision_of(s);
    let work = prec.bits() + EXTRA_BITS;
    let s = Complex::with_val(work, s);
    let beta = Float::with_val(work, beta);
    let abs_s = hp::abs(&s).to_f64();
    let t = s.imag().to_f64().abs();
    let base_cut = (2.0 * abs_s.ceil()).max(t.ceil()).max(16.0) as u64;
    let neg_s = Complex::with_val(work, -&s);

    let mut direct = Complex::with_val(work, 0);
    let mut summed = 0u64;
    for doubling in 0..=MAX_DOUBLINGS {
        let cut = base_cut << doubling;
        while summed < cut {
            let base = Float::with_val(work, &beta + summed);
            direct += hp::complex_pow(&base, &neg_s)?;
            summed += 1;
        }
        let w = Float::with_val(work, &beta + cut);
        if let Some(tail) = em_tail(&s, &w, prec.bits(), &direct)? {
            let value = Complex::with_val(prec.bits(), direct + tail);
            return hp::ensure_finite(value, "hurwitz_zeta");
        }
    }
    Err(Error::Precision(format!("Euler–Maclaurin tail did not converge to {} bits at |s| = {abs_s}", prec.bits())))
}

/// w^(1−s)/(s−1) + w^(−s)/2 + Σ_k B_2k/(2k)! (s)_(2k−1) w^(−s−2k+1), or `None`
/// if the Bernoulli terms stop decreasing before reaching the target.
fn em_tail(s: &Complex, w: &Float, bits: u32, partial: &Complex) -> Result<Option<Complex>> {
    let work = hp::precision_of(s).bits();
    let neg_s = Complex::with_val(work, -s);
    let w_neg_s = hp::complex_pow(w, &neg_s)?;
    let s_minus_1 = Complex::with_val(work, s - 1u32);
    let mut tail = Complex::with_val(work, &w_neg_s * w) / s_minus_1;
    tail += Complex::with_val(work, &w_neg_s / 2u32);

    let sigma = s.real().to_f64();
    let w_inv = Float::with_val(work, w.recip_ref());
    let w_inv_sq = Float::with_val(work, w_inv.square_ref());
    let mut w_pow = Complex::with_val(work, &w_neg_s * &w_inv); // w^(−s−1)
    let mut poch = Complex::with_val(work, s); // (s)_1
    let mut factorial = Integer::from(2u32); // (2k)!
    let mut previous = f64::INFINITY;
    for k in 1..=bernoulli::MAX_HALF_INDEX {
        let b = bernoulli::even(k).expect("index within table");
        let coef = Float::with_val(work, b) / Float::with_val(work, &factorial);
        let term = Complex::with_val(work, &poch * &w_pow) * coef;
        tail += &term;
        let size = hp::abs(&term);
        // next-term factor bound for the Euler–Maclaurin remainder
        let growth = {
            let shifted = Complex::with_val(work, s + (2 * k - 1) as u32);
            hp::abs(&shifted).to_f64() / (sigma + (2 * k - 1) as f64).max(1.0)
        };
        let scale = Float::with_val(work, hp::abs(partial)).max(&Float::with_val(work, 1));
        let bound = Float::with_val(work, &size * growth);
        let target = Float::with_val(work, Float::i_exp(1, -(bits as i32) - 4)) * scale;
        if bound < target {
            return Ok(Some(tail));
        }
        let size = size.to_f64();
        if size > previous && k > 2 {
            return Ok(None);
        }
        previous = size;
        let a = Complex::with_val(work, s + (2 * k - 1) as u32);
        let b2 = Complex::with_val(work, s + (2 * k) as u32);
        poch *= a;
        poch *= b2;
        w_pow *= &w_inv_sq;
        factorial *= ((2 * k + 1) * (2 * k + 2)) as u64;
    }
    Ok(None)
}

/// Euler's constant γ from the constant term of ζ at s = 1.
pub fn euler_gamma(prec: Precision) -> HpReal {
    let work = prec.bits() + EXTRA_BITS;
    let n = 64u32.max(prec.bits() / 4);
    let mut h = Float::with_val(work, 0);
    for k in 1..n {
        h += Float::with_val(work, 1) / k;
    }
    let nf = Float::with_val(work, n);
    h -= Float::with_val(work, nf.ln_ref());
    h += Float::with_val(work, nf.recip_ref()) / 2u32;
    let n_sq = Float::with_val(work, nf.square_ref());
    let mut pow = Float::with_val(work, n_sq.recip_ref());
    let target = Float::with_val(work, Float::i_exp(1, -(work as i32)));
    for k in 1..=bernoulli::MAX_HALF_INDEX {
        let b = bernoulli::even(k).expect("index within table");
        let term = Float::with_val(work, b) / (2 * k) as u32 * &pow;
        h += &term;
        if term.abs() < target {
            break;
        }
        pow /= &n_sq;
    }
    Float::with_val(prec.bits(), h)
}

/// Digamma ψ₀(β) for real β > 0; −ψ₀(β) is the finite part of ζ(s, β) at s = 1.
pub fn digamma(beta: &HpReal) -> Result<HpReal> {
    if *beta <= 0 {
        return Err(Error::Domain("digamma needs a positive argument".into()));
    }
    let bits = beta.prec();
    let work = bits + EXTRA_BITS;
    let n = 64u32.max(bits / 4);
    let mut acc = Float::with_val(work, 0);
    for k in 0..n {
        acc -= Float::with_val(work, beta + k).recip();
    }
    let w = Float::with_val(work, beta + n);
    acc += Float::with_val(work, w.ln_ref());
    acc -= Float::with_val(work, w.recip_ref()) / 2u32;
    let w_sq = Float::with_val(work, w.square_ref());
    let mut pow = Float::with_val(work, w_sq.recip_ref());
    let target = Float::with_val(work, Float::i_exp(1, -(work as i32)));
    for k in 1..=bernoulli::MAX_HALF_INDEX {
        let b = bernoulli::even(k).expect("index within table");
        let term = Float::with_val(work, b) / (2 * k) as u32 * &pow;
        acc -= &term;
        if term.abs() < target {
            return Ok(Float::with_val(bits, acc));
        }
        pow /= &w_sq;
    }
    Err(Error::Precision("digamma series did not converge".into()))
}

/// Bernoulli polynomial B_k(v) at a rational point, exactly.
fn bernoulli_poly(k: usize, v: &Rational) -> Rational {
    let mut acc = Rational::new();
    let mut binom = Integer::from(1);
    let mut v_pow = Rational::from(1);
    // Σ_i C(k, i) B_{k−i} v^i, walking i upwards
    for i in 0..=k {
        let j = k - i;
        let b = match j {
            0 => Some(Rational::from(1)),
            1 => Some(Rational::from((-1, 2))),
            _ if j % 2 == 1 => None,
            _ => bernoulli::even(j / 2).cloned(),
        };
        if let Some(b) = b {
            acc += Rational::from(&b * &v_pow) * &binom;
        }
        v_pow *= v;
        binom *= (k - i) as u64;
        binom /= (i + 1) as u64;
    }
    acc
}

/// s ∫_x^∞ ψ(u − α) u^(−s−1) du for Re s > 0.
///
/// Exact antiderivatives on each linear piece of the sawtooth from x to a cut
/// N, then repeated integration by parts against the periodic Bernoulli
/// functions from N to ∞ until the remainder bound falls below tolerance.
pub fn sawtooth_tail(s: &HpComplex, x: &HpReal, alpha: &ExactRational) -> Result<HpComplex> {
    if *s.real() <= 0 {
        return Err(Error::Domain("sawtooth_tail needs Re s > 0".into()));
    }
    if *x <= 0 {
        return Err(Error::Domain("sawtooth_tail needs x > 0".into()));
    }
    let prec = hp::precision_of(s);
    let work = prec.bits() + EXTRA_BITS;
    let s = Complex::with_val(work, s);
    let x = Float::with_val(work, x);
    let alpha_f = Float::with_val(work, alpha);
    let abs_s = hp::abs(&s).to_f64();
    let sigma = s.real().to_f64();
    let neg_s = Complex::with_val(work, -&s);
    let one_minus_s = Complex::with_val(work, 1 - &s);

    let cut = {
        let lower = x.to_f64().ceil().max(64.0).max(4.0 * (abs_s + 1.0));
        lower as u64
    };
    let cut_f = Float::with_val(work, cut);

    // Σ over pieces [a, b] with ψ(u − α) = u − c: s ∫ u^(−s) − c (a^(−s) − b^(−s))
    let integral_u_neg_s = |a: &Float, b: &Float| -> Result<Complex> {
        if is_one(&s) {
            let ratio = Float::with_val(work, b / a);
            return Ok(Complex::with_val(work, (ratio.ln(), 0)));
        }
        let bp = Complex::with_val(work, hp::complex_pow(b, &one_minus_s)?);
        let ap = hp::complex_pow(a, &one_minus_s)?;
        Ok((bp - ap) / &one_minus_s)
    };
    let mut acc = Complex::with_val(work, &s * integral_u_neg_s(&x, &cut_f)?);
    // first breakpoint α + m strictly above x
    let first_m = {
        let d = Float::with_val(work, &x - &alpha_f);
        let f = hp::floor_to_integer(&d)?;
        f + 1
    };
    let mut left_pow = hp::complex_pow(&x, &neg_s)?;
    let mut m = first_m;
    loop {
        let bp = Float::with_val(work, &alpha_f + &m);
        let right = if bp < cut_f { bp } else { cut_f.clone() };
        // on (left, right): ⌊u − α⌋ = m − 1, so c = α + m − 1 + 1/2
        let c = Float::with_val(work, &alpha_f + &m) - 0.5f64;
        let right_pow = hp::complex_pow(&right, &neg_s)?;
        acc -= Complex::with_val(work, &left_pow - &right_pow) * &c;
        if right == cut_f {
            break;
        }
        left_pow = right_pow;
        m += 1;
    }

    // tail from N: Σ_j −(s)(s+1)_j P_{j+2}(N) N^(−s−1−j), P_k = B̃_k(u − α)/k!
    let frac = {
        let v = Rational::from(cut) - alpha;
        &v - Rational::from(v.floor_ref())
    };
    let target = Float::with_val(work, Float::i_exp(1, -(prec.bits() as i32) - 8));
    let n_inv = Float::with_val(work, cut_f.recip_ref());
    let mut n_pow = Complex::with_val(work, hp::complex_pow(&cut_f, &neg_s)? * &n_inv); // N^(−s−1)
    let mut poch = Complex::with_val(work, &s); // s·(s+1)_j
    let mut factorial = Integer::from(2u32); // (j+2)!
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    let max_k = 2 * bernoulli::MAX_HALF_INDEX;
    for j in 0.. {
        let k = j + 2;
        if k > max_k {
            return Err(Error::Precision("sawtooth tail expansion exhausted".into()));
        }
        let pk = bernoulli_poly(k, &frac) / &factorial;
        let term = Complex::with_val(work, &poch * &n_pow) * Float::with_val(work, &pk);
        acc -= &term;
        // |P_{k+1}| ≤ 4/(2π)^(k+1); remainder ≤ |s (s+1)_{j+1}| sup|P_{k+1}| N^(−σ−k)/(σ+k)
        let next_poch = Complex::with_val(work, &poch * Complex::with_val(work, &s + (j + 1) as u32));
        let sup = Float::with_val(work, 4) / Float::with_val(work, (&two_pi).pow((k + 1) as u32));
        let bound = hp::abs(&next_poch) * sup * hp::abs(&n_pow) * &n_inv / (sigma + k as f64);
        if bound < target {
            break;
        }
        poch = next_poch;
        n_pow *= &n_inv;
        factorial *= (k + 1) as u64;
    }
    hp::ensure_finite(Complex::with_val(prec.bits(), acc), "sawtooth_tail")
}

/// E(s, x, α) = x^(1−s)/(s−1) + ψ(x − α)x^(−s) − s∫_x^∞ ψ(u − α)u^(−s−1)du.
///
/// Equals ζ(s, α) − Σ_{0 ≤ n ≤ x − α}(n + α)^(−s). Stated for real s > 0 but
/// valid for any Re s > 0, s ≠ 1.
pub fn real_afe_remainder(s: &HpComplex, x: &ExactRational, alpha: &ExactRational) -> Result<HpComplex> {
    if is_one(s) {
        return Err(Error::Pole("AFE remainder at s = 1".into()));
    }
    if *x <= 0 {
        return Err(Error::Domain("AFE remainder needs x > 0".into()));
    }
    let prec = hp::precision_of(s);
    let work = prec.bits() + EXTRA_BITS;
    let sw = Complex::with_val(work, s);
    let xf = Float::with_val(work, x);
    let one_minus_s = Complex::with_val(work, 1 - &sw);
    let neg_s = Complex::with_val(work, -&sw);
    let x_pow = hp::complex_pow(&xf, &one_minus_s)?;
    let mut value = x_pow / Complex::with_val(work, &sw - 1u32);
    let saw = special::sawtooth_rational(&Rational::from(x - alpha));
    value += hp::complex_pow(&xf, &neg_s)? * Float::with_val(work, &saw);
    value -= sawtooth_tail(&sw, &xf, alpha)?;
    hp::ensure_finite(Complex::with_val(prec.bits(), value), "real_afe_remainder")
}
