//! Gamma function, the zeta functional-equation factor χ(s), the sawtooth
//! ψ(u) = u − ⌊u⌋ − 1/2, and branch-tracked roots.

use std::f64::consts::PI;

use rug::float::Constant;
use rug::{Complex, Float, Rational};

use crate::bernoulli;
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal};

const EXTRA_BITS: u32 = 32;

fn is_nonpositive_integer(s: &HpComplex) -> bool {
    s.imag().is_zero() && s.real().is_integer() && *s.real() <= 0
}

/// Γ(s) for s off the non-positive integers.
pub fn gamma(s: &HpComplex) -> Result<HpComplex> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole(format!("gamma at {}", s.real().to_f64())));
    }
    let prec = hp::precision_of(s);
    let work = prec.bits() + EXTRA_BITS;
    let z = Complex::with_val(work, s);
    let value = if *z.real() < 0.5 {
        // Γ(s) = π / (sin(πs) Γ(1−s))
        let pi = Float::with_val(work, Constant::Pi);
        let pi_s = Complex::with_val(work, &z * &pi);
        let sin = pi_s.sin();
        let reflected = gamma_right_half(&Complex::with_val(work, 1 - &z))?;
        Complex::with_val(work, pi / (sin * reflected))
    } else {
        gamma_right_half(&z)?
    };
    hp::ensure_finite(Complex::with_val(prec.bits(), value), "gamma")
}

/// Γ(z) for Re z ≥ 1/2 by shifting up and applying the Stirling series.
fn gamma_right_half(z: &Complex) -> Result<Complex> {
    let work = hp::precision_of(z).bits();
    let radius = (20.0f64).max(work as f64 * std::f64::consts::LN_2 / (2.0 * PI) + 4.0);
    let modulus = hp::abs(z).to_f64();
    let shift = if modulus < radius { (radius - z.real().to_f64()).ceil().max(0.0) as u32 } else { 0 };
    let shifted = Complex::with_val(work, z + shift);
    let ln_g = ln_gamma_stirling(&shifted)?;
    let mut value = ln_g.exp();
    if shift > 0 {
        let mut denom = Complex::with_val(work, z);
        for j in 1..shift {
            denom *= Complex::with_val(work, z + j);
        }
        value /= denom;
    }
    Ok(value)
}

fn ln_gamma_stirling(z: &Complex) -> Result<Complex> {
    let work = hp::precision_of(z).bits();
    let ln_z = Complex::with_val(work, z.ln_ref());
    let half = Float::with_val(work, 0.5);
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    let mut acc = Complex::with_val(work, z - &half) * &ln_z;
    acc -= z;
    acc += two_pi.ln() / 2u32;

    let target = Float::with_val(work, Float::i_exp(1, -(work as i32) - 8));
    let z_inv = Complex::with_val(work, z.recip_ref());
    let z_inv_sq = Complex::with_val(work, z_inv.square_ref());
    let mut z_pow = z_inv; // z^{-(2k-1)}
    let mut previous = f64::INFINITY;
    for k in 1..=bernoulli::MAX_HALF_INDEX {
        let b = bernoulli::even(k).expect("index within table");
        let coef = b / Rational::from((2 * k * (2 * k - 1)) as u64);
        let term = Complex::with_val(work, &z_pow * Float::with_val(work, &coef));
        let size = hp::abs(&term);
        acc += &term;
        if size < target {
            return Ok(acc);
        }
        let size = size.to_f64();
        if size > previous {
            break;
        }
        previous = size;
        z_pow *= &z_inv_sq;
    }
    Err(Error::Precision(format!("Stirling series did not reach 2^-{work} at |z| = {}", hp::abs(z).to_f64())))
}

/// χ(s) = 2^s π^(s−1) sin(πs/2) Γ(1−s), the factor in ζ(s) = χ(s)ζ(1−s).
pub fn chi_factor(s: &HpComplex) -> Result<HpComplex> {
    let prec = hp::precision_of(s);
    if s.imag().is_zero() && s.real().is_integer() && *s.real() >= 1 {
        let n = s.real().to_f64();
        if n == 1.0 || (n as i64) % 2 == 1 {
            return Err(Error::Pole(format!("chi_factor at s = {n}")));
        }
        // even n ≥ 2: sin(πs/2) and Γ(1−s) degenerate; use χ(s)χ(1−s) = 1
        let reflected = chi_factor(&Complex::with_val(prec.bits(), 1 - s))?;
        return hp::ensure_finite(reflected.recip(), "chi_factor");
    }
    let work = prec.bits() + EXTRA_BITS;
    let z = Complex::with_val(work, s);
    let pi = Float::with_val(work, Constant::Pi);
    let ln2 = Float::with_val(work, Constant::Log2);
    let ln_pi = Float::with_val(work, pi.ln_ref());
    let mut log_prefactor = Complex::with_val(work, &z * &ln2);
    log_prefactor += Complex::with_val(work, &z - 1u32) * &ln_pi;
    let sin = (Complex::with_val(work, &z * &pi) / 2u32).sin();
    let g = gamma(&Complex::with_val(work, 1 - &z))?;
    let value = log_prefactor.exp() * sin * g;
    hp::ensure_finite(Complex::with_val(prec.bits(), value), "chi_factor")
}

/// ψ(u) = u − ⌊u⌋ − 1/2; at integers ψ = −1/2.
pub fn sawtooth(u: &HpReal) -> HpReal {
    let floor = Float::with_val(u.prec(), u.floor_ref());
    Float::with_val(u.prec(), u - floor) - 0.5f64
}

/// Exact sawtooth of a rational argument.
pub fn sawtooth_rational(u: &Rational) -> Rational {
    let floor = Rational::from(u.floor_ref());
    (u - floor) - Rational::from((1, 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchMode {
    /// Root with argument in (−π/r, π/r].
    Principal,
    /// Root whose phase is nearest the previously returned one.
    ContinuousSweep,
}

impl BranchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchMode::Principal => "principal",
            BranchMode::ContinuousSweep => "sweep",
        }
    }
}

impl std::str::FromStr for BranchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "principal" => Ok(BranchMode::Principal),
            "sweep" | "continuous" | "continuous-sweep" => Ok(BranchMode::ContinuousSweep),
            other => Err(Error::Parse(format!("unknown branch mode {other:?}"))),
        }
    }
}

/// Single-owner state for choosing roots continuously along a path.
///
/// `last_phase` is the unwrapped argument (radians) of the last root handed
/// out, so consecutive outputs in sweep mode differ in phase by at most π/r.
#[derive(Clone, Debug)]
pub struct BranchTracker {
    mode: BranchMode,
    last_phase: Option<f64>,
    max_jump: f64,
}

impl BranchTracker {
    pub fn new(mode: BranchMode) -> Self {
        BranchTracker { mode, last_phase: None, max_jump: 0.0 }
    }

    /// Tracker pre-seeded so the next root is the one nearest `phase`.
    pub fn seeded(phase: f64) -> Self {
        BranchTracker { mode: BranchMode::ContinuousSweep, last_phase: Some(phase), max_jump: 0.0 }
    }

    pub fn mode(&self) -> BranchMode {
        self.mode
    }

    pub fn last_phase(&self) -> Option<f64> {
        self.last_phase
    }

    /// Largest phase step seen since construction.
    pub fn max_jump(&self) -> f64 {
        self.max_jump
    }
}

/// r-th root of `z`, principal or continued along a tracker's path.
pub fn principal_root(z: &HpComplex, r: u32, tracker: Option<&mut BranchTracker>) -> Result<HpComplex> {
    if z.is_zero() {
        return Err(Error::Domain("root of zero has no branch".into()));
    }
    if r == 0 {
        return Err(Error::Domain("root order must be positive".into()));
    }
    let prec = hp::precision_of(z);
    let root = hp::principal_power(z, &Rational::from((1, r)))?;
    let phase0 = hp::arg(z).to_f64() / r as f64;
    let Some(tracker) = tracker else {
        return Ok(root);
    };
    match (tracker.mode, tracker.last_phase) {
        (BranchMode::ContinuousSweep, Some(last)) => {
            let k = ((last - phase0) * r as f64 / (2.0 * PI)).round() as i64;
            let phase = phase0 + 2.0 * PI * k as f64 / r as f64;
            tracker.max_jump = tracker.max_jump.max((phase - last).abs());
            tracker.last_phase = Some(phase);
            Ok(root * hp::unit_root(prec, k, r as u64))
        }
        _ => {
            tracker.last_phase = Some(phase0);
            Ok(root)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::{approx_eq, complex, tolerance_for, Precision};
    use rug::ops::Pow;

    const P: Precision = Precision::DEFAULT;

    fn tol() -> HpReal {
        tolerance_for(P, 64.0)
    }

    #[test]
    fn gamma_small_values() {
        let one = complex(P, 1.0, 0.0);
        assert!(approx_eq(&gamma(&one).unwrap(), &one, &tol()));
        let g5 = gamma(&complex(P, 5.0, 0.0)).unwrap();
        assert!(approx_eq(&g5, &complex(P, 24.0, 0.0), &(tol() * 24u32)));
        let half = gamma(&complex(P, 0.5, 0.0)).unwrap();
        let sqrt_pi = Complex::with_val(192, (hp::pi(P).sqrt(), 0));
        assert!(approx_eq(&half, &sqrt_pi, &tol()));
    }

    #[test]
    fn gamma_poles() {
        for n in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma(&complex(P, n, 0.0)), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn gamma_recurrence_and_reflection() {
        for (re, im) in [(0.3, 2.0), (-2.7, 0.4), (4.1, -30.0), (0.5, 120.0)] {
            let s = complex(P, re, im);
            let g = gamma(&s).unwrap();
            let g1 = gamma(&Complex::with_val(192, &s + 1u32)).unwrap();
            let lhs = Complex::with_val(192, &g * &s);
            let scale = hp::abs(&g1);
            assert!(approx_eq(&lhs, &g1, &(tol() * scale)), "Γ(s+1) = sΓ(s) at {re}+{im}i");
        }
    }

    #[test]
    fn gamma_against_mpfr_on_real_axis() {
        for x in [0.1, 2.5, 7.25, 33.0, -3.5] {
            let g = gamma(&complex(P, x, 0.0)).unwrap();
            let reference = Float::with_val(192, x).gamma();
            let rel = Float::with_val(192, g.real() - &reference).abs() / reference.abs();
            assert!(rel < tol(), "x = {x}");
            assert!(g.imag().is_zero() || g.imag().clone().abs() < tol());
        }
    }

    #[test]
    fn chi_at_half_is_one() {
        let c = chi_factor(&complex(P, 0.5, 0.0)).unwrap();
        let sq = Complex::with_val(192, c.square_ref());
        assert!(approx_eq(&sq, &hp::one(P), &tol()));
    }

    #[test]
    fn chi_at_minus_one() {
        let c = chi_factor(&complex(P, -1.0, 0.0)).unwrap();
        let pi = hp::pi(P);
        let expect = -(Float::with_val(192, 1) / (Float::with_val(192, pi.square_ref()) * 2u32));
        assert!(approx_eq(&c, &hp::complex_from_real(&expect), &tol()));
    }

    #[test]
    fn chi_poles_and_even_integers() {
        assert!(matches!(chi_factor(&complex(P, 1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(chi_factor(&complex(P, 3.0, 0.0)), Err(Error::Pole(_))));
        // χ(2) = 1/χ(−1) = −2π²
        let c = chi_factor(&complex(P, 2.0, 0.0)).unwrap();
        let expect = -(Float::with_val(192, hp::pi(P).square_ref()) * 2u32);
        assert!(approx_eq(&c, &hp::complex_from_real(&expect), &(tol() * 20u32)));
    }

    #[test]
    fn chi_has_unit_modulus_on_critical_line() {
        for t in [1.0, 5.0, 20.0, 100.0] {
            let c = chi_factor(&complex(P, 0.5, t)).unwrap();
            let m = hp::abs(&c) - 1u32;
            assert!(m.abs() < tol(), "t = {t}");
        }
    }

    #[test]
    fn chi_involution_at_random_strip_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = complex(P, rng.gen_range(0.01..0.99), rng.gen_range(-200.0..200.0));
            let a = chi_factor(&s).unwrap();
            let b = chi_factor(&Complex::with_val(192, 1 - &s)).unwrap();
            let prod = a * b;
            assert!(approx_eq(&prod, &hp::one(P), &tolerance_for(P, 1e4)));
        }
    }

    #[test]
    fn sawtooth_values() {
        let r = |x: f64| sawtooth(&Float::with_val(192, x)).to_f64();
        assert_eq!(r(0.5), 0.0);
        assert_eq!(r(3.0), -0.5);
        assert_eq!(r(2.25), -0.25);
        assert_eq!(r(-0.25), 0.25);
        assert_eq!(sawtooth_rational(&Rational::from((9, 4))), Rational::from((-1, 4)));
        assert_eq!(sawtooth_rational(&Rational::from(3)), Rational::from((-1, 2)));
    }

    #[test]
    fn sawtooth_has_zero_mean_per_period() {
        // ∫_k^{k+1} ψ = [u²/2 − (k + 1/2)u]_k^{k+1} = 0 exactly for every k
        for k in -3i64..4 {
            let k = Rational::from(k);
            let antiderivative = |u: &Rational| {
                let c = &k + Rational::from((1, 2));
                Rational::from(u * u) / 2u32 - c * u
            };
            let upper = Rational::from(&k + 1u32);
            assert_eq!(antiderivative(&upper) - antiderivative(&k), Rational::new());
        }
    }

    #[test]
    fn roots_principal() {
        let one = hp::one(P);
        assert_eq!(principal_root(&one, 2, None).unwrap(), one);
        let minus_one = complex(P, -1.0, 0.0);
        let r = principal_root(&minus_one, 2, None).unwrap();
        assert!(approx_eq(&r, &complex(P, 0.0, 1.0), &tol()));
        assert!(principal_root(&hp::zero(P), 2, None).is_err());
    }

    #[test]
    fn sweep_root_of_chi_is_continuous() {
        let mut tracker = BranchTracker::new(BranchMode::ContinuousSweep);
        let mut prev: Option<HpComplex> = None;
        let mut max_step = 0.0f64;
        for i in 0..=100 {
            let t = 10.0 + i as f64 / 100.0;
            let c = chi_factor(&complex(P, 0.5, t)).unwrap();
            let r = principal_root(&c, 2, Some(&mut tracker)).unwrap();
            if let Some(p) = &prev {
                let ratio = Complex::with_val(192, &r / p);
                max_step = max_step.max(hp::arg(&ratio).to_f64().abs());
            }
            prev = Some(r);
        }
        assert!(max_step < 0.2, "max phase step {max_step}");
        assert!(tracker.max_jump() < 0.2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]
            #[test]
            fn root_power_recovers_input(re in -50.0f64..50.0, im in -50.0f64..50.0, r in 1u32..7) {
                prop_assume!(re.abs() + im.abs() > 1e-6);
                let z = complex(P, re, im);
                let w = principal_root(&z, r, None).unwrap();
                let back = Complex::with_val(192, (&w).pow(r));
                let scale = hp::abs(&z);
                prop_assert!(approx_eq(&back, &z, &(tolerance_for(P, 16.0) * scale)));
            }
        }
    }
}
