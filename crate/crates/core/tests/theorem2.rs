use afe_core::afe::theorem2_check;
use afe_core::characters::primitive_characters;
use afe_core::hp::{self, Precision};
use afe_core::Error;

const P: Precision = Precision::DEFAULT;

#[test]
fn zeta_case() {
    let chi = primitive_characters(1)[0].clone();
    let r = theorem2_check(&chi, &hp::complex(P, 0.5, 60.0)).unwrap();
    assert!(r.passes(), "{:e}", r.residual.to_f64());
    assert!(r.residual_without_n > r.tolerance);
}

#[test]
fn mod_four() {
    let chi = primitive_characters(4)[0].clone();
    let r = theorem2_check(&chi, &hp::complex(P, 0.5, 40.0)).unwrap();
    assert!(r.passes(), "{:e}", r.residual.to_f64());
    // Σ' over odd n ≤ √(160/2π) ≈ 5.05: 1 + 1/3 + 1/5
    let h = r.coprime_harmonic.real().to_f64();
    assert!((h - (1.0 + 1.0 / 3.0 + 0.2)).abs() < 1e-15);
}

#[test]
fn off_line_and_all_characters_mod_five() {
    for chi in primitive_characters(5) {
        let r = theorem2_check(&chi, &hp::complex(P, 0.3, 55.0)).unwrap();
        assert!(r.passes());
    }
}

#[test]
fn tiny_t_is_rejected() {
    let chi = primitive_characters(1)[0].clone();
    assert!(matches!(theorem2_check(&chi, &hp::complex(P, 0.5, 3.0)), Err(Error::Domain(_))));
}
