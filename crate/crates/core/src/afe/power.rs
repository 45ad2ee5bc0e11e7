//! Tables of n^e and numeric coefficient prefixes, grown on demand.

use rug::{Complex, Rational};

use crate::characters::Character;
use crate::coeffs::{power_binomial, CoeffSeq};
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, Precision};
use crate::sieve::Sieve;

/// `n^e` for 1 ≤ n ≤ limit. Primes cost one exp/log, composites one
/// multiplication (n^e is completely multiplicative in n).
#[derive(Clone, Debug)]
pub struct PowerTable {
    exponent: HpComplex,
    values: Vec<HpComplex>,
}

impl PowerTable {
    pub fn new(exponent: &HpComplex) -> PowerTable {
        let prec = hp::precision_of(exponent);
        PowerTable { exponent: exponent.clone(), values: vec![hp::zero(prec), hp::one(prec)] }
    }

    pub fn with_limit(exponent: &HpComplex, limit: usize) -> Result<PowerTable> {
        let mut t = PowerTable::new(exponent);
        t.ensure(limit)?;
        Ok(t)
    }

    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    pub fn ensure(&mut self, n: usize) -> Result<()> {
        let old = self.limit();
        if n <= old {
            return Ok(());
        }
        let target = n.max(2 * old).max(16);
        let sieve = Sieve::new(target);
        let bits = hp::precision_of(&self.exponent).bits();
        self.values.reserve(target - old);
        for k in old + 1..=target {
            let p = sieve.smallest_factor(k);
            let v = if p == k {
                hp::int_pow(k as u64, &self.exponent)?
            } else {
                Complex::with_val(bits, &self.values[p] * &self.values[k / p])
            };
            self.values.push(v);
        }
        Ok(())
    }

    /// n^e; panics when n is beyond the table (call `ensure` first).
    pub fn get(&self, n: usize) -> &HpComplex {
        &self.values[n]
    }
}

/// Numeric coefficients c(1..=n_max) with a placeholder zero at index 0.
#[derive(Clone, Debug)]
pub enum CoeffSource {
    /// r_α(n)·χ(n): coefficients of L(s, χ)^α.
    Family { alpha: Rational, chi: Character },
    /// A fixed finite sequence.
    Seq(CoeffSeq),
}

impl CoeffSource {
    pub fn numeric(&self, n_max: usize, prec: Precision) -> Result<Vec<HpComplex>> {
        match self {
            CoeffSource::Seq(c) => {
                if c.n_max() < n_max {
                    return Err(Error::Length { needed: n_max, available: c.n_max() });
                }
                let mut out = Vec::with_capacity(n_max + 1);
                out.push(hp::zero(prec));
                out.extend((1..=n_max).map(|n| c.get(n).to_complex(prec)));
                Ok(out)
            }
            CoeffSource::Family { alpha, chi } => family_coeffs(alpha, chi, n_max, prec),
        }
    }

    /// Upper bound on the usable length (None when unbounded).
    pub fn available(&self) -> Option<usize> {
        match self {
            CoeffSource::Seq(c) => Some(c.n_max()),
            CoeffSource::Family { .. } => None,
        }
    }
}

fn family_coeffs(alpha: &Rational, chi: &Character, n_max: usize, prec: Precision) -> Result<Vec<HpComplex>> {
    let sieve = Sieve::new(n_max.max(1));
    let order = chi.order();
    let roots: Vec<HpComplex> = (0..order).map(|k| hp::unit_root(prec, k as i64, order)).collect();
    // r_α(n) is multiplicative with r_α(p^k) = C(α+k−1, k)
    let unit_alpha = *alpha == 1;
    let mut r: Vec<Rational> = Vec::new();
    if !unit_alpha {
        r = vec![Rational::new(); n_max + 1];
        if n_max >= 1 {
            r[1] = Rational::from(1);
        }
        for n in 2..=n_max {
            let p = sieve.smallest_factor(n);
            let mut m = n;
            let mut k = 0u32;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            r[n] = Rational::from(&r[m] * &power_binomial(alpha, k));
        }
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(hp::zero(prec));
    for n in 1..=n_max {
        let v = match chi.exponent(n as u64) {
            None => hp::zero(prec),
            Some(e) if unit_alpha => roots[e as usize].clone(),
            Some(e) => Complex::with_val(prec.bits(), &roots[e as usize] * hp::rational_to_real(prec, &r[n])),
        };
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::coeffs::{sqrt_l_coeffs, zeta_power_coeffs};

    const P: Precision = Precision::DEFAULT;

    #[test]
    fn table_matches_direct_powers() {
        let e = hp::complex(P, -0.5, 13.25);
        let t = PowerTable::with_limit(&e, 300).unwrap();
        let tol = hp::tolerance_for(P, 64.0);
        for n in [1usize, 2, 6, 64, 210, 289, 300] {
            let direct = hp::int_pow(n as u64, &e).unwrap();
            let scale = hp::abs(&direct);
            assert!(hp::approx_eq(t.get(n), &direct, &(tol.clone() * scale)), "n = {n}");
        }
    }

    #[test]
    fn table_grows() {
        let e = hp::complex(P, 1.0, 0.0);
        let mut t = PowerTable::new(&e);
        t.ensure(5).unwrap();
        t.ensure(1000).unwrap();
        assert!(t.limit() >= 1000);
        assert_eq!(t.get(997).real().to_f64(), 997.0);
    }

    #[test]
    fn family_coefficients_match_exact_sequences() {
        let half = Rational::from((1, 2));
        let chi = enumerate_characters(5)[1].clone();
        let numeric = CoeffSource::Family { alpha: half.clone(), chi: chi.clone() }.numeric(120, P).unwrap();
        let exact = CoeffSource::Seq(sqrt_l_coeffs(&chi, 120)).numeric(120, P).unwrap();
        let tol = hp::tolerance_for(P, 16.0);
        for n in 1..=120 {
            assert!(hp::approx_eq(&numeric[n], &exact[n], &tol), "n = {n}");
        }
        let trivial = enumerate_characters(1)[0].clone();
        let d3 = CoeffSource::Family { alpha: Rational::from(3), chi: trivial }.numeric(60, P).unwrap();
        let d3_exact = CoeffSource::Seq(zeta_power_coeffs(&Rational::from(3), 60)).numeric(60, P).unwrap();
        for n in 1..=60 {
            assert!(hp::approx_eq(&d3[n], &d3_exact[n], &tol));
        }
    }

    #[test]
    fn short_sequences_report_length() {
        let c = CoeffSource::Seq(CoeffSeq::ones(10));
        assert!(matches!(c.numeric(11, P), Err(Error::Length { needed: 11, available: 10 })));
    }
}
