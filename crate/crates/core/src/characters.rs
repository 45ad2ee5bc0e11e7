//! Dirichlet characters, Gauss sums, L(s, χ) assembled from z(s, a, q), and
//! the L-function functional-equation factor ψ(s, χ).

use std::fmt;
use std::sync::Arc;

use rug::{Complex, Float, Rational};

use crate::cyclo::{gcd, lcm, Cyclo, CycloField};
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal, Precision};
use crate::special;
use crate::zeta;

/// A Dirichlet character mod q with values ζ_r^e stored as exponents.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Character {
    q: u64,
    order: u64,
    exps: Vec<Option<u64>>,
    parity: i8,
    primitive: bool,
    conductor: u64,
    index: usize,
}

impl Character {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Order r of the character; values are r-th roots of unity.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exponent e with χ(n) = ζ_r^e, or `None` when gcd(n, q) > 1.
    pub fn exponent(&self, n: u64) -> Option<u64> {
        self.exps[(n % self.q) as usize]
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_even(&self) -> bool {
        self.parity == 1
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Position in [`enumerate_characters`] order.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> String {
        format!("chi{}.{}", self.q, self.index)
    }

    pub fn conj(&self) -> Character {
        let r = self.order;
        let exps = self.exps.iter().map(|e| e.map(|e| (r - e) % r)).collect();
        let index = if r <= 2 { self.index } else { conj_index(self) };
        Character { exps, index, ..self.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn field(&self) -> Arc<CycloField> {
        CycloField::new(self.order)
    }

    /// χ(n) as an exact cyclotomic number in `field` (a multiple of the order).
    pub fn value_exact(&self, n: u64, field: &Arc<CycloField>) -> Cyclo {
        match self.exponent(n) {
            None => Cyclo::zero(field),
            Some(e) => {
                assert!(field.order().is_multiple_of(self.order), "field must contain the character values");
                Cyclo::root(field, (e * (field.order() / self.order)) as i64)
            }
        }
    }

    pub fn value(&self, n: u64, prec: Precision) -> HpComplex {
        match self.exponent(n) {
            None => hp::zero(prec),
            Some(e) => hp::unit_root(prec, e as i64, self.order),
        }
    }

    /// χ(n) for signed n (χ(−1) = parity).
    pub fn value_signed(&self, n: i64, prec: Precision) -> HpComplex {
        let m = n.rem_euclid(self.q as i64) as u64;
        self.value(m, prec)
    }
}

fn conj_index(chi: &Character) -> usize {
    let all = enumerate_characters(chi.q);
    let r = chi.order;
    let target: Vec<Option<u64>> = chi.exps.iter().map(|e| e.map(|e| (r - e) % r)).collect();
    all.iter().find(|c| c.order == r && c.exps == target).map(|c| c.index).expect("conjugate character exists")
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Character({}, order {}, {}, {})",
            self.label(),
            self.order,
            if self.parity == 1 { "even" } else { "odd" },
            if self.primitive { "primitive" } else { "imprimitive" }
        )
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// One cyclic factor of (ℤ/p^e)^×: generator g of the given order.
struct CyclicFactor {
    modulus: u64,
    generator: u64,
    order: u64,
}

fn cyclic_factors(q: u64) -> Vec<CyclicFactor> {
    let mut out = Vec::new();
    for (p, e) in factorize(q) {
        let pe = p.pow(e);
        if p == 2 {
            if e >= 2 {
                out.push(CyclicFactor { modulus: pe, generator: pe - 1, order: 2 });
            }
            if e >= 3 {
                out.push(CyclicFactor { modulus: pe, generator: 5, order: pe / 4 });
            }
        } else {
            let order = pe / p * (p - 1);
            let generator = (2..pe)
                .find(|&g| gcd(g, p) == 1 && multiplicative_order(g, pe) == order)
                .expect("odd prime powers have primitive roots");
            out.push(CyclicFactor { modulus: pe, generator, order });
        }
    }
    out
}

fn multiplicative_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 {
        x = x * g % m;
        k += 1;
    }
    k
}

/// Discrete-log vectors of every unit mod q with respect to the cyclic factors.
fn unit_logs(q: u64, factors: &[CyclicFactor]) -> Vec<Option<Vec<u64>>> {
    let mut logs: Vec<Option<Vec<u64>>> = vec![None; q as usize];
    // enumerate products of generator powers; CRT-combined residues
    let mut exps = vec![0u64; factors.len()];
    loop {
        let mut residue_by_modulus: Vec<(u64, u64)> = Vec::new();
        for (f, &k) in factors.iter().zip(&exps) {
            let mut v = 1u64;
            for _ in 0..k {
                v = v * f.generator % f.modulus;
            }
            match residue_by_modulus.iter_mut().find(|(m, _)| *m == f.modulus) {
                Some((m, r)) => *r = *r * v % *m,
                None => residue_by_modulus.push((f.modulus, v)),
            }
        }
        let n = crt(q, &residue_by_modulus);
        logs[n as usize] = Some(exps.clone());
        let mut i = 0;
        loop {
            if i == factors.len() {
                return logs;
            }
            exps[i] += 1;
            if exps[i] < factors[i].order {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

fn crt(q: u64, parts: &[(u64, u64)]) -> u64 {
    // unit mod q equal to r_i mod m_i; the remaining part of q (a factor 2) is odd
    (1..=q)
        .map(|n| n % q)
        .find(|&n| gcd(n, q) == 1 && parts.iter().all(|&(m, r)| n % m == r % m))
        .expect("CRT solution exists")
}

/// All φ(q) characters mod q; the principal character comes first.
pub fn enumerate_characters(q: u64) -> Vec<Character> {
    assert!(q >= 1, "modulus must be positive");
    let factors = cyclic_factors(q);
    let logs = unit_logs(q, &factors);
    let exponent = factors.iter().fold(1, |acc, f| lcm(acc, f.order));
    let mut out = Vec::new();
    let mut js = vec![0u64; factors.len()];
    loop {
        let raw: Vec<Option<u64>> = logs
            .iter()
            .map(|l| {
                l.as_ref().map(|ks| {
                    let mut e = 0;
                    for ((f, &j), &k) in factors.iter().zip(&js).zip(ks) {
                        e += j * k * (exponent / f.order);
                    }
                    e % exponent
                })
            })
            .collect();
        // reduce to the character's own order
        let g = raw.iter().flatten().fold(exponent, |acc, &e| gcd(acc, e));
        let order = exponent / g;
        let exps: Vec<Option<u64>> = raw.iter().map(|e| e.map(|e| e / g)).collect();
        let minus_one = exps[((q + q - 1) % q) as usize].unwrap_or(0);
        let parity = if minus_one == 0 { 1 } else { -1 };
        let conductor = conductor_of(q, &exps);
        out.push(Character { q, order, exps, parity, primitive: conductor == q, conductor, index: out.len() });
        let mut i = 0;
        loop {
            if i == factors.len() {
                return out;
            }
            js[i] += 1;
            if js[i] < factors[i].order {
                break;
            }
            js[i] = 0;
            i += 1;
        }
    }
}

/// Smallest d | q with χ(n) = 1 whenever n ≡ 1 (mod d) and gcd(n, q) = 1.
fn conductor_of(q: u64, exps: &[Option<u64>]) -> u64 {
    (1..=q)
        .filter(|d| q.is_multiple_of(*d))
        .find(|&d| (0..q).all(|n| n % d != 1 % d || exps[n as usize].is_none_or(|e| e == 0)))
        .unwrap_or(q)
}

pub fn principal(q: u64) -> Character {
    enumerate_characters(q).swap_remove(0)
}

pub fn primitive_characters(q: u64) -> Vec<Character> {
    enumerate_characters(q).into_iter().filter(|c| c.is_primitive()).collect()
}

/// τ(χ, n) = Σ_{a=1}^{q} χ(a) e^(2πina/q).
pub fn gauss_sum(chi: &Character, n: i64, prec: Precision) -> HpComplex {
    let q = chi.modulus();
    let mut acc = hp::zero(prec);
    for a in 1..=q {
        if let Some(e) = chi.exponent(a) {
            let w = hp::unit_root(prec, e as i64, chi.order());
            let phase = hp::unit_root(prec, n.rem_euclid(q as i64) * a as i64, q);
            acc += w * phase;
        }
    }
    acc
}

/// Exact Gauss sum in ℚ(ζ_lcm(r, q)).
pub fn gauss_sum_exact(chi: &Character, n: i64) -> Cyclo {
    let q = chi.modulus();
    let field = CycloField::new(lcm(chi.order(), q));
    let char_step = field.order() / chi.order();
    let phase_step = field.order() / q;
    let n = n.rem_euclid(q as i64) as u64;
    let mut coeffs = vec![0i64; field.order() as usize];
    for a in 1..=q {
        if let Some(e) = chi.exponent(a) {
            let k = (e * char_step + (n * a % q) * phase_step) % field.order();
            coeffs[k as usize] += 1;
        }
    }
    let mut acc = Cyclo::zero(&field);
    for (k, c) in coeffs.iter().enumerate() {
        if *c != 0 {
            acc = acc.add(&Cyclo::root(&field, k as i64).scale(&Rational::from(*c)));
        }
    }
    acc
}

/// L(s, χ) = Σ_a χ(a) z(s, a, q).
pub fn l_function(s: &HpComplex, chi: &Character) -> Result<HpComplex> {
    let prec = hp::precision_of(s);
    let q = chi.modulus();
    if q == 1 {
        return zeta::riemann_zeta(s);
    }
    let at_one = s.imag().is_zero() && *s.real() == 1;
    if at_one {
        if chi.is_principal() {
            return Err(Error::Pole("L(s, χ₀) at s = 1".into()));
        }
        // L(1, χ) = −(1/q) Σ χ(a) ψ₀(a/q)
        let mut acc = hp::zero(prec);
        for a in 1..=q {
            if chi.exponent(a).is_some() {
                let beta = hp::rational_to_real(prec, &Rational::from((a, q)));
                let d = zeta::digamma(&beta)?;
                acc -= chi.value(a, prec) * d;
            }
        }
        return Ok(acc / q as u32);
    }
    let mut acc = hp::zero(prec);
    for a in 1..=q {
        if chi.exponent(a).is_some() {
            acc += chi.value(a, prec) * zeta::z_line(s, a, q)?;
        }
    }
    hp::ensure_finite(acc, "l_function")
}

/// ψ(s, χ) with L(s, χ) = ψ(s, χ) L(1 − s, χ̄).
#[derive(Clone, Debug)]
pub struct LFactor {
    pub s: HpComplex,
    pub chi: Character,
    pub value: HpComplex,
}

/// ε(χ) = τ(χ)/(i^κ √q), κ = (1 − χ(−1))/2; |ε| = 1 for primitive χ.
pub fn root_number(chi: &Character, prec: Precision) -> HpComplex {
    let tau = gauss_sum(chi, 1, prec);
    let sqrt_q = Float::with_val(prec.bits(), chi.modulus()).sqrt();
    let i_kappa = if chi.is_even() { hp::one(prec) } else { hp::complex(prec, 0.0, 1.0) };
    tau / i_kappa / sqrt_q
}

/// ε(χ) 2^s π^(s−1) q^(1/2−s) Γ(1−s) · {sin(πs/2) even, cos(πs/2) odd}.
pub fn l_psi_factor(s: &HpComplex, chi: &Character) -> Result<LFactor> {
    if !chi.is_primitive() {
        return Err(Error::Domain(format!("{} is not primitive", chi.label())));
    }
    let prec = hp::precision_of(s);
    let value = if chi.modulus() == 1 {
        special::chi_factor(s)?
    } else {
        let work = prec.bits() + 32;
        let z = Complex::with_val(work, s);
        let pi = Float::with_val(work, rug::float::Constant::Pi);
        let two = Float::with_val(work, 2);
        let q = Float::with_val(work, chi.modulus());
        let mut prefactor = hp::complex_pow(&two, &z)?;
        prefactor *= hp::complex_pow(&pi, &Complex::with_val(work, &z - 1u32))?;
        prefactor *= hp::complex_pow(&q, &Complex::with_val(work, 0.5f64 - &z))?;
        let half_angle = Complex::with_val(work, &z * &pi) / 2u32;
        let trig = if chi.is_even() { half_angle.sin() } else { half_angle.cos() };
        let g = special::gamma(&Complex::with_val(work, 1 - &z))?;
        let eps = root_number(chi, Precision::new(work)?);
        Complex::with_val(prec.bits(), prefactor * trig * g * eps)
    };
    Ok(LFactor { s: s.clone(), chi: chi.clone(), value: hp::ensure_finite(value, "l_psi_factor")? })
}

/// ψ(s, χ) together with the ratio cross-check |ψ − L(s,χ)/L(1−s,χ̄)|, the
/// latter skipped (None) when L(1−s, χ̄) is below tolerance.
pub fn l_psi_factor_checked(s: &HpComplex, chi: &Character) -> Result<(LFactor, Option<HpReal>)> {
    let factor = l_psi_factor(s, chi)?;
    let prec = hp::precision_of(s);
    let reflected = Complex::with_val(prec.bits(), 1 - s);
    let denominator = l_function(&reflected, &chi.conj())?;
    if hp::abs(&denominator) < hp::tolerance_for(prec, 1e6) {
        return Ok((factor, None));
    }
    let ratio = l_function(s, chi)? / denominator;
    let gap = hp::abs(&Complex::with_val(prec.bits(), &ratio - &factor.value));
    Ok((factor, Some(gap)))
}
