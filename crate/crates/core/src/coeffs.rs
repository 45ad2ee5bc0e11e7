//! Exact Dirichlet-series coefficient algebra: convolution, rational powers,
//! generalized divisor functions, and character twists.

use std::io::Write;
use std::sync::Arc;

use rug::{Integer, Rational};

use crate::characters::Character;
use crate::cyclo::{lcm, Cyclo, CycloField};
use crate::error::{Error, Result};
use crate::hp::{HpComplex, Precision};
use crate::sieve::Sieve;

/// Finite prefix a(1..=n_max) of a coefficient sequence with values in a
/// cyclotomic field (ℚ itself for rational sequences).
#[derive(Clone, Debug)]
pub struct CoeffSeq {
    label: String,
    field: Arc<CycloField>,
    values: Vec<Cyclo>,
}

impl CoeffSeq {
    pub fn new(label: impl Into<String>, field: &Arc<CycloField>, values: Vec<Cyclo>) -> CoeffSeq {
        let values = values.into_iter().map(|v| v.lift(field)).collect();
        CoeffSeq { label: label.into(), field: field.clone(), values }
    }

    pub fn from_rationals(label: impl Into<String>, values: Vec<Rational>) -> CoeffSeq {
        let field = CycloField::new(1);
        let values = values.into_iter().map(|r| Cyclo::from_rational(&field, r)).collect();
        CoeffSeq { label: label.into(), field, values }
    }

    pub fn from_fn(label: impl Into<String>, n_max: usize, f: impl Fn(usize) -> Rational) -> CoeffSeq {
        CoeffSeq::from_rationals(label, (1..=n_max).map(f).collect())
    }

    /// ζ(s): a(n) = 1.
    pub fn ones(n_max: usize) -> CoeffSeq {
        CoeffSeq::from_fn("ones", n_max, |_| Rational::from(1))
    }

    /// Indicator of n = 1, the convolution identity.
    pub fn unit(n_max: usize) -> CoeffSeq {
        CoeffSeq::from_fn("unit", n_max, |n| Rational::from(u32::from(n == 1)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> CoeffSeq {
        self.label = label.into();
        self
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    /// a(n), 1-based.
    pub fn get(&self, n: usize) -> &Cyclo {
        &self.values[n - 1]
    }

    pub fn values(&self) -> &[Cyclo] {
        &self.values
    }

    pub fn is_rational(&self) -> bool {
        self.values.iter().all(|v| v.as_rational().is_some())
    }

    pub fn rational(&self, n: usize) -> Option<Rational> {
        self.get(n).as_rational()
    }

    pub fn truncated(&self, n_max: usize) -> Result<CoeffSeq> {
        self.require(n_max)?;
        Ok(CoeffSeq { label: self.label.clone(), field: self.field.clone(), values: self.values[..n_max].to_vec() })
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.n_max() < needed {
            return Err(Error::Length { needed, available: self.n_max() });
        }
        Ok(())
    }

    pub fn to_complex(&self, prec: Precision) -> Vec<HpComplex> {
        self.values.iter().map(|v| v.to_complex(prec)).collect()
    }

    /// CSV rows `n,value_num,value_den,label`; only rational sequences.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,value_num,value_den,label")?;
        for (i, v) in self.values.iter().enumerate() {
            let r =
                v.as_rational().ok_or_else(|| Error::Domain(format!("{}({}) is not rational", self.label, i + 1)))?;
            writeln!(out, "{},{},{},{}", i + 1, r.numer(), r.denom(), self.label)?;
        }
        Ok(())
    }
}

impl PartialEq for CoeffSeq {
    fn eq(&self, other: &CoeffSeq) -> bool {
        self.values == other.values
    }
}

/// (a ∗ b)(n) = Σ_{uv=n} a(u)b(v) for n ≤ N.
pub fn convolve(a: &CoeffSeq, b: &CoeffSeq, n_max: usize) -> Result<CoeffSeq> {
    a.require(n_max)?;
    b.require(n_max)?;
    let field = if a.field.order() == b.field.order() {
        a.field.clone()
    } else {
        CycloField::new(lcm(a.field.order(), b.field.order()))
    };
    let a_vals: Vec<Cyclo> = a.values[..n_max].iter().map(|v| v.lift(&field)).collect();
    let b_vals: Vec<Cyclo> = b.values[..n_max].iter().map(|v| v.lift(&field)).collect();
    let mut out = vec![Cyclo::zero(&field); n_max];
    for u in 1..=n_max {
        let au = &a_vals[u - 1];
        if au.is_zero() {
            continue;
        }
        for v in 1..=n_max / u {
            let bv = &b_vals[v - 1];
            if !bv.is_zero() {
                out[u * v - 1] = out[u * v - 1].add(&au.mul(bv));
            }
        }
    }
    Ok(CoeffSeq { label: format!("({})*({})", a.label, b.label), field, values: out })
}

/// Coefficients of (Σ a(n) n^(−s))^α up to N, for a(1) = 1.
///
/// Uses the derivation D f(n) = Ω(n) f(n), which satisfies the Leibniz rule
/// for Dirichlet convolution because Ω is completely additive. From
/// D(F^α) ∗ F = α F^α ∗ D(F):
/// Ω(n) c(n) = Σ_{uv=n, v>1} c(u) a(v) (αΩ(v) − Ω(u)).
pub fn dirichlet_power(a: &CoeffSeq, alpha: &Rational, n_max: usize) -> Result<CoeffSeq> {
    a.require(n_max.max(1))?;
    if a.get(1).as_rational() != Some(Rational::from(1)) {
        return Err(Error::Domain("dirichlet_power needs a(1) = 1".into()));
    }
    let field = a.field.clone();
    let sieve = Sieve::new(n_max);
    let omega: Vec<u32> = (0..=n_max).map(|n| if n < 2 { 0 } else { sieve.big_omega(n) }).collect();
    let mut c = vec![Cyclo::zero(&field); n_max];
    c[0] = Cyclo::from_rational(&field, Rational::from(1));
    // divisor lists, built once
    let mut divisors: Vec<Vec<usize>> = vec![Vec::new(); n_max + 1];
    for d in 1..=n_max {
        let mut m = d;
        while m <= n_max {
            divisors[m].push(d);
            m += d;
        }
    }
    for n in 2..=n_max {
        let mut acc = Cyclo::zero(&field);
        for &v in &divisors[n] {
            if v == 1 {
                continue;
            }
            let av = a.get(v);
            if av.is_zero() {
                continue;
            }
            let u = n / v;
            let weight = Rational::from(alpha * omega[v]) - omega[u];
            if weight == 0 || c[u - 1].is_zero() {
                continue;
            }
            acc = acc.add(&c[u - 1].mul(av).scale(&weight));
        }
        c[n - 1] = acc.scale(&Rational::from((1, omega[n])));
    }
    Ok(CoeffSeq { label: format!("({})^({alpha})", a.label), field, values: c })
}

/// Generalized binomial C(α + k − 1, k), the coefficient of p^(−ks) in ζ(s)^α.
pub fn power_binomial(alpha: &Rational, k: u32) -> Rational {
    let mut acc = Rational::from(1);
    for j in 0..k {
        acc *= Rational::from(alpha + j);
        acc /= j + 1;
    }
    acc
}

/// Coefficients of ζ(s)^α: multiplicative with a(p^k) = C(α+k−1, k).
pub fn zeta_power_coeffs(alpha: &Rational, n_max: usize) -> CoeffSeq {
    let sieve = Sieve::new(n_max);
    let table: Vec<Rational> = (0..=32).map(|k| power_binomial(alpha, k)).collect();
    CoeffSeq::from_fn(format!("zeta^({alpha})"), n_max, |n| {
        sieve.factorize(n).iter().fold(Rational::from(1), |acc, &(_, k)| acc * &table[k as usize])
    })
}

/// d_r(n), the number of ordered r-fold factorizations of n.
pub fn divisor_coeffs(r: u32, n_max: usize) -> Result<CoeffSeq> {
    if r == 0 {
        return Err(Error::Domain("divisor_coeffs needs r ≥ 1".into()));
    }
    Ok(zeta_power_coeffs(&Rational::from(r), n_max).with_label(format!("d{r}")))
}

/// (a·χ)(n) = a(n) χ(n).
pub fn twist(a: &CoeffSeq, chi: &Character) -> CoeffSeq {
    let field = CycloField::new(lcm(a.field.order(), chi.order()));
    let values =
        a.values.iter().enumerate().map(|(i, v)| v.lift(&field).mul(&chi.value_exact(i as u64 + 1, &field))).collect();
    CoeffSeq { label: format!("{}.{}", a.label, chi.label()), field, values }
}

/// √ζ coefficients, a(p^k) = C(2k, k)/4^k.
pub fn sqrt_zeta_coeffs(n_max: usize) -> CoeffSeq {
    zeta_power_coeffs(&Rational::from((1, 2)), n_max).with_label("sqrt_zeta")
}

/// √L(·, χ) coefficients a(n, χ) = a(n) χ(n).
pub fn sqrt_l_coeffs(chi: &Character, n_max: usize) -> CoeffSeq {
    twist(&sqrt_zeta_coeffs(n_max), chi).with_label(format!("sqrt_L.{}", chi.label()))
}

/// C(2k, k)/4^k.
pub fn central_binomial_over_four_pow(k: u32) -> Rational {
    let c = Integer::from(Integer::binomial_u(2 * k, k));
    Rational::from((c, Integer::from(1) << (2 * k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_characters, primitive_characters};

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    /// Coefficients of F^α for integer α ≥ 0 by expanding the α-fold product.
    fn brute_power(a: &[Rational], alpha: u32, n_max: usize) -> Vec<Rational> {
        let mut acc = vec![Rational::new(); n_max];
        acc[0] = r(1);
        for _ in 0..alpha {
            let mut next = vec![Rational::new(); n_max];
            for u in 1..=n_max {
                for v in 1..=n_max / u {
                    next[u * v - 1] += Rational::from(&acc[u - 1] * &a[v - 1]);
                }
            }
            acc = next;
        }
        acc
    }

    #[test]
    fn convolution_basics() {
        let ones = CoeffSeq::ones(50);
        let d = convolve(&ones, &ones, 50).unwrap();
        assert_eq!(d.rational(6), Some(r(4)));
        let delta = CoeffSeq::unit(50);
        let a = CoeffSeq::from_fn("a", 50, |n| Rational::from((n as i64 * 7 - 3, n as i64 + 1)));
        assert_eq!(convolve(&a, &delta, 50).unwrap(), a);
        assert!(matches!(convolve(&a, &delta, 60), Err(Error::Length { needed: 60, available: 50 })));
    }

    #[test]
    fn twisted_convolution_is_sum_over_divisors() {
        let chi = &enumerate_characters(4)[1];
        let ones = CoeffSeq::ones(100);
        let a = convolve(&ones, &twist(&ones, chi), 100).unwrap();
        let f = chi.field();
        for n in 1..=100u64 {
            let mut expect = Cyclo::zero(&f);
            for d in (1..=n).filter(|d| n % d == 0) {
                expect = expect.add(&chi.value_exact(d, &f));
            }
            assert_eq!(a.get(n as usize), &expect);
        }
    }

    #[test]
    fn twisted_convolutions_match_brute_force() {
        for (q1, q2) in [(3u64, 4u64), (4, 5), (5, 5), (3, 5)] {
            for c1 in enumerate_characters(q1) {
                for c2 in enumerate_characters(q2) {
                    let ones = CoeffSeq::ones(50);
                    let conv = convolve(&twist(&ones, &c1), &twist(&ones, &c2), 50).unwrap();
                    let field = CycloField::new(lcm(c1.order(), c2.order()));
                    for n in 1..=50u64 {
                        let mut expect = Cyclo::zero(&field);
                        for u in (1..=n).filter(|u| n % u == 0) {
                            expect = expect.add(&c1.value_exact(u, &field).mul(&c2.value_exact(n / u, &field)));
                        }
                        assert_eq!(conv.get(n as usize), &expect);
                    }
                }
            }
        }
    }

    #[test]
    fn twist_examples() {
        let d = divisor_coeffs(2, 20).unwrap();
        let one = &enumerate_characters(1)[0];
        assert_eq!(twist(&d, one), d);
        let chi4 = &enumerate_characters(4)[1];
        assert!(twist(&d, chi4).get(6).is_zero());
        assert_eq!(twist(&d, chi4).rational(3), Some(r(-2)));
    }

    #[test]
    fn power_identity_and_square() {
        let a = CoeffSeq::from_fn("a", 64, |n| if n == 1 { r(1) } else { Rational::from((n as i64 % 5 - 2, 3)) });
        assert_eq!(dirichlet_power(&a, &r(1), 64).unwrap(), a);
        let ones = CoeffSeq::ones(64);
        let d = dirichlet_power(&ones, &r(2), 64).unwrap();
        assert_eq!(d.rational(12), Some(r(6)));
        let bad = CoeffSeq::from_fn("b", 10, |_| r(2));
        assert!(dirichlet_power(&bad, &r(2), 10).is_err());
    }

    #[test]
    fn power_matches_multinomial_expansion() {
        let vals: Vec<Rational> = (1..=64)
            .map(|n| if n == 1 { r(1) } else { Rational::from(((n * 37 % 11) as i64 - 5, (n % 4 + 1) as i64)) })
            .collect();
        let a = CoeffSeq::from_rationals("a", vals.clone());
        for alpha in [0u32, 2, 3, 4] {
            let got = dirichlet_power(&a, &r(alpha as i64), 64).unwrap();
            let expect = brute_power(&vals, alpha, 64);
            for n in 1..=64 {
                assert_eq!(got.rational(n).unwrap(), expect[n - 1], "α = {alpha}, n = {n}");
            }
        }
    }

    #[test]
    fn power_round_trips() {
        let a = CoeffSeq::from_fn("a", 200, |n| if n == 1 { r(1) } else { Rational::from(((n % 7) as i64 - 3, 2)) });
        for alpha in [r(2), r(3), Rational::from((1, 2)), Rational::from((1, 3))] {
            let inv = Rational::from(alpha.recip_ref());
            let b = dirichlet_power(&a, &alpha, 200).unwrap();
            let back = dirichlet_power(&b, &inv, 200).unwrap();
            assert_eq!(back, a, "α = {alpha}");
        }
    }

    #[test]
    fn sqrt_zeta_is_a_dirichlet_square_root() {
        let a = sqrt_zeta_coeffs(500);
        let sq = convolve(&a, &a, 500).unwrap();
        assert_eq!(sq, CoeffSeq::ones(500));
        assert_eq!(a.rational(2), Some(Rational::from((1, 2))));
        assert_eq!(a.rational(4), Some(Rational::from((3, 8))));
        let by_power = dirichlet_power(&CoeffSeq::ones(500), &Rational::from((1, 2)), 500).unwrap();
        assert_eq!(by_power, a);
        let sieve = Sieve::new(500);
        for n in 2..=500 {
            let f = sieve.factorize(n);
            if f.len() == 1 {
                assert_eq!(a.rational(n).unwrap(), central_binomial_over_four_pow(f[0].1));
            }
        }
    }

    #[test]
    fn sqrt_zeta_is_multiplicative() {
        let a = sqrt_zeta_coeffs(10_000);
        for m in 1..=100usize {
            for n in 1..=100usize {
                if crate::cyclo::gcd(m as u64, n as u64) == 1 {
                    let prod = a.rational(m).unwrap() * a.rational(n).unwrap();
                    assert_eq!(a.rational(m * n).unwrap(), prod);
                }
            }
        }
    }

    #[test]
    fn sqrt_l_squares_to_twisted_ones() {
        for q in [3u64, 4, 5] {
            for chi in primitive_characters(q) {
                let a = sqrt_l_coeffs(&chi, 200);
                let sq = convolve(&a, &a, 200).unwrap();
                assert_eq!(sq, twist(&CoeffSeq::ones(200), &chi));
            }
        }
    }

    #[test]
    fn divisor_functions() {
        let d1 = divisor_coeffs(1, 100).unwrap();
        assert_eq!(d1, CoeffSeq::ones(100));
        let d3 = divisor_coeffs(3, 100).unwrap();
        assert_eq!(d3.rational(4), Some(r(6)));
        assert_eq!(d3.rational(12), Some(r(18)));
        assert!(divisor_coeffs(0, 10).is_err());
        for rr in 1..=4u32 {
            let dr = divisor_coeffs(rr, 100).unwrap();
            let mut conv = CoeffSeq::unit(100);
            for _ in 0..rr {
                conv = convolve(&conv, &CoeffSeq::ones(100), 100).unwrap();
            }
            assert_eq!(dr, conv);
            for n in 1..=100u64 {
                assert_eq!(dr.rational(n as usize).unwrap(), r(ordered_factorizations(n, rr) as i64));
            }
        }
    }

    fn ordered_factorizations(n: u64, r: u32) -> u64 {
        if r == 1 {
            return 1;
        }
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| ordered_factorizations(n / d, r - 1)).sum()
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        sqrt_zeta_coeffs(4).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,value_num,value_den,label\n1,1,1,sqrt_zeta\n2,1,2,sqrt_zeta\n3,1,2,sqrt_zeta\n4,3,8,sqrt_zeta\n"
        );
        let chi = &enumerate_characters(5)[1];
        assert!(twist(&CoeffSeq::ones(4), chi).write_csv(Vec::new()).is_err());
    }
}
