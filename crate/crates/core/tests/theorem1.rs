use afe_core::afe::{
    corollary1_square, fe_dual_parts, reflected_point, theorem1_assemble, theorem1_balanced, theorem1_points, AfeSpec,
    PointAfe, TruncBase, TruncPoint,
};
use afe_core::characters::{enumerate_characters, primitive_characters};
use afe_core::coeffs::{convolve, twist, CoeffSeq};
use afe_core::cyclo::{Cyclo, CycloField};
use afe_core::hp::{self, Precision};
use afe_core::sieve::divisor_counts;
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

const P: Precision = Precision::DEFAULT;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn chi(q: u64) -> afe_core::characters::Character {
    primitive_characters(q)[0].clone()
}

#[test]
fn real_s_product_has_no_dual_terms() {
    let s = hp::complex(P, 3.0, 0.0);
    let z = AfeSpec::zeta();
    let five = TruncPoint::integer(5).unwrap();
    let b = theorem1_assemble(&z, &z, &s, &five, &five).unwrap();
    for part in [&b.i3, &b.i4, &b.l1, &b.l2] {
        assert!(part.is_zero());
    }
    // ζ(3)² from MPFR, d(n) from the additive sieve
    let z3 = Float::with_val(192, 3u32).zeta();
    let d = divisor_counts(25);
    let mut expect = Float::with_val(192, &z3 * &z3);
    for n in 1..=25u32 {
        expect -= Float::with_val(192, d[n as usize]) / Float::with_val(192, n).pow(3u32);
    }
    let expect = hp::complex_from_real(&expect);
    assert!(hp::approx_eq(&b.total, &expect, &hp::tolerance_for(P, 100.0)));
    assert!(b.passes());
}

#[test]
fn zeta_zeta_balanced_needs_l_terms() {
    let s = hp::complex(P, 0.5, 40.0);
    let z = AfeSpec::zeta();
    let b = theorem1_balanced(&z, &z, &s, &q(1, 1), &q(1, 1)).unwrap();
    assert!(b.residual < hp::tolerance_for(P, 1e4));
    assert!(b.l1_terms > 0 && b.l2_terms > 0);
    let tol = b.tolerance();
    assert!(b.residual_without_l() > Float::with_val(192, &tol * 1e10f64));
}

#[test]
fn irrational_ell_gives_no_l_terms() {
    // ℓ₂ = ρ₁ρ₂·√(5/1): irrational, so no ℓ₂m is an integer
    let s = hp::complex(P, 0.4, 90.0);
    let b =
        theorem1_balanced(&AfeSpec::zeta(), &AfeSpec::dirichlet_l(&chi(5)).unwrap(), &s, &q(1, 1), &q(1, 1)).unwrap();
    assert_eq!((b.l1_terms, b.l2_terms), (0, 0));
    assert!(b.l1.is_zero() && b.l2.is_zero());
    assert!(b.passes());
}

#[test]
fn non_integral_rational_ell_gives_no_l_terms() {
    // ℓ = 1/97 with y < 97: ℓm is never an integer
    let s = hp::complex(P, 0.5, 200.0);
    let z = AfeSpec::zeta();
    let b = theorem1_balanced(&z, &z, &s, &q(1, 1), &q(1, 97)).unwrap();
    assert!(b.y1.to_f64() < 97.0 && b.y2.to_f64() < 97.0 * 97.0);
    assert_eq!(b.l1_terms, 0);
    assert!(b.passes());
}

#[test]
fn empty_dual_sums_when_y_below_one() {
    let s = hp::complex(P, 0.5, 25.0);
    let z = AfeSpec::zeta();
    let mut p1 = PointAfe::new(&z, &s).unwrap();
    let mut p2 = p1.clone();
    let t = p1.trunc_product().clone();
    // x = 2T makes y = 1/2
    let x = t.scale(&q(2, 1)).unwrap();
    let b = theorem1_points(&mut p1, &mut p2, &x, &x).unwrap();
    assert!(b.i3.is_zero() && b.i4.is_zero() && b.l1.is_zero() && b.l2.is_zero());
    assert!(b.passes());
}

#[test]
fn functional_equation_form_of_dual_parts() {
    let s = hp::complex(P, 0.35, 57.0);
    let specs = [AfeSpec::zeta(), AfeSpec::dirichlet_l(&chi(4)).unwrap()];
    let mut p1 = PointAfe::new(&specs[0], &s).unwrap();
    let mut p2 = PointAfe::new(&specs[1], &s).unwrap();
    let mut r1 = reflected_point(&p1).unwrap();
    let mut r2 = reflected_point(&p2).unwrap();
    let x1 = p1.balanced(&q(2, 1)).unwrap();
    let x2 = p2.balanced(&q(1, 2)).unwrap();
    let (i3, i4) = fe_dual_parts(&mut p1, &mut p2, &mut r1, &mut r2, &x1, &x2).unwrap();
    let b = theorem1_points(&mut p1, &mut p2, &x1, &x2).unwrap();
    let tol = b.tolerance();
    assert!(hp::approx_eq(&i3, &b.i3, &tol));
    assert!(hp::approx_eq(&i4, &b.i4, &tol));
    // pointwise: E₂(s, z) = ψ₂(s)E₂*(1−s, T₂/z)
    let z = TruncPoint::integer(3).unwrap().mul(&x2);
    let direct = p2.remainder(&z).unwrap();
    let via_fe = Complex::with_val(192, p2.psi() * r2.remainder(&p2.dual_point(&z).unwrap()).unwrap());
    assert!(hp::approx_eq(&direct, &via_fe, &hp::tolerance_for(P, 1e4)));
}

#[test]
fn square_paths_agree() {
    let z = AfeSpec::zeta();
    let s = hp::complex(P, 0.5, 30.0);
    let x = afe_core::afe::balanced_point(&z, &s, &q(1, 1)).unwrap();
    let sq = corollary1_square(&z, &s, &x).unwrap();
    let tol = sq.generic.tolerance();
    assert!(sq.generic.passes());
    assert!(sq.symmetric_gap() < tol);
    assert!(sq.fe_gap().unwrap() < tol);
    // real s: 2Σ_{n≤x} n^(−s)E(s, x²/n) + E(s, x)²
    let s = hp::complex(P, 2.5, 0.0);
    let x = TruncPoint::integer(6).unwrap();
    let sq = corollary1_square(&z, &s, &x).unwrap();
    assert!(sq.fe_form.is_none());
    assert!(sq.generic.passes() && sq.symmetric_gap() < sq.generic.tolerance());
}

#[test]
fn sqrt_l_square_paths_agree() {
    let spec = AfeSpec::sqrt_l(&chi(5)).unwrap();
    let s = hp::complex(P, 0.6, 75.0);
    let x = afe_core::afe::balanced_point(&spec, &s, &q(7, 3)).unwrap();
    let sq = corollary1_square(&spec, &s, &x).unwrap();
    assert!(sq.generic.passes());
    assert!(sq.symmetric_gap() < sq.generic.tolerance());
}

#[test]
fn exact_base_grid() {
    // t = 2π·9: T = 9 for ζ, so x = √T = 3 is an exact integer
    let prec = P;
    let two_pi = Float::with_val(prec.bits(), rug::float::Constant::Pi) * 18u32;
    let s = Complex::with_val(prec.bits(), (Float::with_val(prec.bits(), 0.5), two_pi));
    let z = AfeSpec::zeta();
    let base = TruncBase::Exact(Rational::from(9));
    let mut p1 = PointAfe::with_base(&z, &s, base.clone()).unwrap();
    let mut p2 = PointAfe::with_base(&z, &s, base).unwrap();
    let x = p1.balanced(&q(1, 1)).unwrap();
    assert_eq!(x.exact_integer(), Some(3));
    let b = theorem1_points(&mut p1, &mut p2, &x, &x).unwrap();
    assert!(b.passes(), "residual {}", b.residual.to_f64());
}

#[test]
fn precision_doubling_agrees() {
    let z = AfeSpec::zeta();
    let l4 = AfeSpec::dirichlet_l(&chi(4)).unwrap();
    let lo = theorem1_balanced(&z, &l4, &hp::complex(P, 0.5, 64.5), &q(1, 1), &q(2, 1)).unwrap();
    let v = Precision::VALIDATION;
    let hi = theorem1_balanced(&z, &l4, &hp::complex(v, 0.5, 64.5), &q(1, 1), &q(2, 1)).unwrap();
    assert!(hi.passes());
    let gap = Complex::with_val(256, &hi.direct - &lo.direct);
    assert!(hp::abs(&gap) < lo.tolerance());
}

#[test]
fn product_coefficients_of_zeta_times_l() {
    for chi in enumerate_characters(12).into_iter().filter(|c| !c.is_principal()) {
        let ones = CoeffSeq::ones(120);
        let a = convolve(&ones, &twist(&ones, &chi), 120).unwrap();
        let field = CycloField::new(chi.order());
        for n in 1..=120u64 {
            let mut acc = Cyclo::zero(&field);
            for d in (1..=n).filter(|d| n % d == 0) {
                acc = acc.add(&chi.value_exact(d, &field));
            }
            assert_eq!(*a.get(n as usize), acc, "n = {n}");
        }
    }
}

fn spec_pair(k: usize) -> (AfeSpec, AfeSpec) {
    match k {
        0 => (AfeSpec::zeta(), AfeSpec::zeta()),
        1 => (AfeSpec::zeta(), AfeSpec::dirichlet_l(&chi(4)).unwrap()),
        2 => (AfeSpec::dirichlet_l(&chi(3)).unwrap(), AfeSpec::dirichlet_l(&chi(5)).unwrap()),
        3 => (AfeSpec::sqrt_zeta(), AfeSpec::sqrt_zeta()),
        _ => (AfeSpec::sqrt_l(&chi(4)).unwrap(), AfeSpec::sqrt_l(&chi(4)).unwrap()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn assembled_total_matches_product_remainder(
        pair in 0usize..5,
        sigma in 0.05f64..0.95,
        t in 20.0f64..150.0,
        r1 in prop::sample::select(vec![(1i64, 2i64), (1, 1), (2, 1), (7, 3), (3, 5)]),
        r2 in prop::sample::select(vec![(1i64, 2i64), (1, 1), (2, 1), (7, 3), (5, 4)]),
    ) {
        let (a, b) = spec_pair(pair);
        let s = hp::complex(P, sigma, t);
        let br = theorem1_balanced(&a, &b, &s, &q(r1.0, r1.1), &q(r2.0, r2.1)).unwrap();
        prop_assert!(br.passes(), "residual {:e} tolerance {:e}", br.residual.to_f64(), br.tolerance().to_f64());
    }
}
