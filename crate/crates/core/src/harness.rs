//! Parameter sweeps and empirical support for the ≪ bounds on AFE remainders.
//!
//! A bound E ≪ P cannot be falsified by finite data. Each claim is sampled on
//! a log-spaced grid, the ratio |E|/P is recorded, and the claim is supported
//! when the least-squares slope of log ratio against log t (or log X) is at
//! most [`TREND_LIMIT`]. The largest ratio C_max is reported, not thresholded.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::afe::{product_remainder, theorem1_balanced, AfeSpec, PointAfe, RemainderBreakdown, TruncPoint};
use crate::characters::{self, Character};
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal, Precision};
use crate::sieve::{divisor_counts, isqrt};
use crate::special::BranchMode;
use crate::zeta;

/// Largest log-log slope of |E|/P that still supports a claim.
pub const TREND_LIMIT: f64 = 0.05;

/// Fewest samples `fit_bound` accepts.
pub const MIN_SAMPLES: usize = 10;

/// Added to every log-spaced t so that grids avoid integral y by default.
pub const T_JITTER: f64 = 113.0 / 355.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClaimKind {
    Corollary2,
    Corollary3I,
    Corollary3II,
    Corollary4,
    Corollary5,
    Corollary6I,
    Corollary6II,
    Result1Shell,
    Result2Shell,
    Theorem2Tail,
    RealS,
}

impl ClaimKind {
    pub const ALL: [ClaimKind; 11] = [
        ClaimKind::Corollary2,
        ClaimKind::Corollary3I,
        ClaimKind::Corollary3II,
        ClaimKind::Corollary4,
        ClaimKind::Corollary5,
        ClaimKind::Corollary6I,
        ClaimKind::Corollary6II,
        ClaimKind::Result1Shell,
        ClaimKind::Result2Shell,
        ClaimKind::Theorem2Tail,
        ClaimKind::RealS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClaimKind::Corollary2 => "corollary2",
            ClaimKind::Corollary3I => "corollary3-i",
            ClaimKind::Corollary3II => "corollary3-ii",
            ClaimKind::Corollary4 => "corollary4",
            ClaimKind::Corollary5 => "corollary5",
            ClaimKind::Corollary6I => "corollary6-i",
            ClaimKind::Corollary6II => "corollary6-ii",
            ClaimKind::Result1Shell => "result1-shell",
            ClaimKind::Result2Shell => "result2-shell",
            ClaimKind::Theorem2Tail => "theorem2-tail",
            ClaimKind::RealS => "real-s",
        }
    }
}

impl fmt::Display for ClaimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClaimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClaimKind> {
        let key = s.to_ascii_lowercase().replace(['_', ' '], "-");
        ClaimKind::ALL
            .into_iter()
            .find(|k| k.name() == key || k.name().replace('-', "") == key.replace('-', ""))
            .ok_or_else(|| Error::Parse(format!("unknown claim {s:?}")))
    }
}

/// Abscissa of the trend fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrendVar {
    T,
    X,
}

/// One ≪ claim with its free parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundClaim {
    pub kind: ClaimKind,
    /// Modulus of χ (of χ₁ for the two-character claim).
    pub q: u64,
    /// Modulus of χ₂ for the two-character claim.
    pub q2: u64,
    /// Exponent of the t^ε factor.
    pub epsilon: f64,
    /// The constant c > 1 in X > (cqt/2π)².
    pub c: f64,
}

impl BoundClaim {
    pub fn new(kind: ClaimKind) -> BoundClaim {
        let q = match kind {
            ClaimKind::Corollary2 | ClaimKind::Corollary3I | ClaimKind::Corollary6I | ClaimKind::Corollary6II => 1,
            ClaimKind::Result1Shell => 1,
            ClaimKind::Corollary3II | ClaimKind::Corollary4 => 3,
            ClaimKind::Result2Shell => 5,
            ClaimKind::Corollary5 | ClaimKind::Theorem2Tail | ClaimKind::RealS => 4,
        };
        let c = if kind == ClaimKind::Corollary3II { 1.25 } else { 2.0 };
        BoundClaim { kind, q, q2: 4, epsilon: 0.05, c }
    }

    pub fn with_q(mut self, q: u64) -> BoundClaim {
        self.q = q;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> BoundClaim {
        self.epsilon = epsilon;
        self
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// The bound being supported.
    pub fn statement(&self) -> &'static str {
        match self.kind {
            ClaimKind::Corollary2 => "E₂(s, X, χ) ≪ (q^½X^½ + X/√(qt) + √(qt) + q)X^(−σ) log q(t+3), sampled at X = qt/2π",
            ClaimKind::Corollary3I => "ζ²(s) − Σ_{n≤X} d(n)n^(−s) − 2X^(1−s)/(s−1)·Σ_{n≤√X} 1/n ≪ X^(½−σ) for X > (ct/2π)²",
            ClaimKind::Corollary3II => "L²(s, χ) − Σ_{n≤X} d(n)χ(n)n^(−s) ≪ q^½X^(½−σ) for X > (cqt/2π)²",
            ClaimKind::Corollary4 => "E(s, x₁x₂, χ₁, χ₂) ≪ (x₁x₂)^(−σ) log q₁q₂(t+2)·{x₁√q₂ + x₂√q₁ + x₁x₂t^(−½)(q₁^(−½) + q₂^(−½)) + √(q₁t) + √(q₂t) + √(q₁q₂)}",
            ClaimKind::Corollary5 => "E(s, x₁x₂, χ) ≪ (√q·x₁ + x₂ + x₁x₂/√t + √(qt))(x₁x₂)^(−σ) log q(t+2) for ζ(s)L(s, χ)",
            ClaimKind::Corollary6I => "E₃(s, X) ≪ (X^(2/3) + X/√t + √t + t^(1−σ))X^(−σ) log²(t+2), sampled at X = (t/2π)^(3/2)",
            ClaimKind::Corollary6II => "E₄(s, X) ≪ (X^(3/4) + tX^(1/4))X^(−σ)t^ε, sampled at X = (t/2π)²",
            ClaimKind::Result1Shell => "E₁(s, X) ≪ X^(−σ) + X^(1−σ)/√t, sampled at X = √(t/2π)",
            ClaimKind::Result2Shell => "E₁(s, X, χ) ≪ q^½X^(−σ) + X^(1−σ)/√(qt), sampled at X = √(qt/2π)",
            ClaimKind::Theorem2Tail => "ψ(1−s, χ̄)E₁²(s, √(qt/2π), χ) ≪ q^½t^(−½)",
            ClaimKind::RealS => "E₁(s, X, χ) ≪ qX^(−s) for real s > 0 (y = 0), less X^(1−s)/(s−1) when q = 1",
        }
    }

    pub fn trend_var(&self) -> TrendVar {
        if self.kind == ClaimKind::RealS {
            TrendVar::X
        } else {
            TrendVar::T
        }
    }

    /// Default sampling range of the trend variable.
    pub fn default_range(&self) -> (f64, f64) {
        match self.kind {
            ClaimKind::Corollary6I | ClaimKind::Corollary6II => (50.0, 800.0),
            ClaimKind::RealS => (10.0, 10_000.0),
            _ => (50.0, 2000.0),
        }
    }

    fn character(q: u64) -> Result<Character> {
        if q == 1 {
            return Ok(characters::principal(1));
        }
        characters::primitive_characters(q)
            .into_iter()
            .next()
            .ok_or_else(|| Error::Domain(format!("no primitive character mod {q}")))
    }

    /// One sample at σ + it (or at real s = σ and X = v for the real-s claim).
    pub fn sample(&self, sigma: f64, v: f64, prec: Precision, seed: u64) -> Result<RemainderSample> {
        let bits = prec.bits();
        let one = Rational::from(1);
        let (s, e, x, y, q) = match self.kind {
            ClaimKind::RealS => {
                let chi = BoundClaim::character(self.q)?;
                let s = hp::complex(prec, sigma, 0.0);
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Domain(format!("real-s claim needs X > 0, got {v}")));
                }
                let big_x = Rational::from(((v * 1000.0).round() as u64, 1000u64));
                let mut p = PointAfe::new(&AfeSpec::dirichlet_l(&chi)?, &s)?;
                let x = TruncPoint::rational(&big_x)?;
                let mut e = p.remainder(&x)?;
                if self.q == 1 {
                    let xv = hp::rational_to_real(prec, &big_x);
                    let one_minus = Complex::with_val(bits, 1 - &s);
                    let mut pole = hp::complex_pow(&xv, &one_minus)?;
                    pole /= Complex::with_val(bits, &s - 1u32);
                    e -= pole;
                }
                (s, e, hp::rational_to_real(prec, &big_x), Float::new(bits), self.q)
            }
            ClaimKind::Corollary3I | ClaimKind::Corollary3II => {
                let s = hp::complex(prec, sigma, v);
                let (e, x) = self.large_x_square(&s, v, prec)?;
                (s, e, x, Float::new(bits), self.q)
            }
            ClaimKind::Corollary4 | ClaimKind::Corollary5 => {
                let s = hp::complex(prec, sigma, v);
                let (spec1, spec2) = if self.kind == ClaimKind::Corollary4 {
                    (
                        AfeSpec::dirichlet_l(&BoundClaim::character(self.q)?)?,
                        AfeSpec::dirichlet_l(&BoundClaim::character(self.q2)?)?,
                    )
                } else {
                    (AfeSpec::dirichlet_l(&BoundClaim::character(self.q)?)?, AfeSpec::zeta())
                };
                let mut p1 = PointAfe::new(&spec1, &s)?;
                let mut p2 = PointAfe::new(&spec2, &s)?;
                let x1 = p1.balanced(&one)?;
                let x2 = p2.balanced(&one)?;
                let y = p1.dual_point(&x1)?.mul(&p2.dual_point(&x2)?);
                let (e, _) = product_remainder(&mut p1, &mut p2, &x1, &x2)?;
                let x1v = x1.value(prec)?;
                let x2v = x2.value(prec)?;
                let predictor = self.product_predictor(sigma, v, &x1v, &x2v, prec);
                let sample = RemainderSample::new(
                    self.name(),
                    s,
                    Float::with_val(bits, &x1v * &x2v),
                    y.value(prec)?,
                    self.q,
                    e,
                    predictor,
                    seed,
                )?;
                return Ok(sample);
            }
            _ => {
                let s = hp::complex(prec, sigma, v);
                let spec = match self.kind {
                    ClaimKind::Corollary2 => AfeSpec::power_family(Rational::from(2), &BoundClaim::character(self.q)?)?,
                    ClaimKind::Corollary6I => AfeSpec::zeta_power(3),
                    ClaimKind::Corollary6II => AfeSpec::zeta_power(4),
                    ClaimKind::Result1Shell => AfeSpec::zeta(),
                    _ => AfeSpec::dirichlet_l(&BoundClaim::character(self.q)?)?,
                };
                let mut p = PointAfe::new(&spec, &s)?;
                let x = p.balanced(&one)?;
                let y = p.dual_point(&x)?;
                let mut e = p.remainder(&x)?;
                if self.kind == ClaimKind::Theorem2Tail {
                    let chi = BoundClaim::character(self.q)?;
                    let r = Complex::with_val(bits, 1 - &s);
                    let factor = characters::l_psi_factor(&r, &chi.conj())?.value;
                    e = Complex::with_val(bits, &e * &e) * factor;
                }
                (s, e, x.value(prec)?, y.value(prec)?, self.q)
            }
        };
        let predictor = self.predictor(sigma, v, &x, prec);
        RemainderSample::new(self.name(), s, x, y, q, e, predictor, seed)
    }

    /// The residual of the large-X square claims and the X used.
    fn large_x_square(&self, s: &HpComplex, t: f64, prec: Precision) -> Result<(HpComplex, HpReal)> {
        let bits = prec.bits();
        let q = if self.kind == ClaimKind::Corollary3I { 1 } else { self.q };
        let chi = BoundClaim::character(q)?;
        // X = ⌈(cqt/2π)²⌉ + 1/2
        let mut bound = Float::with_val(bits, self.c * q as f64 * t);
        bound /= Float::with_val(bits, 2u32) * hp::pi(prec);
        bound.square_mut();
        let n = hp::floor_to_integer(&bound)? + 1u32;
        let n = n.to_u64().ok_or_else(|| Error::Range("X too large".into()))?;
        let big_x = Rational::from((Integer::from(2 * n + 1), 2));
        let d = divisor_counts(n as usize);
        let chi_values: Vec<HpComplex> = (0..q).map(|k| chi.value(k, prec)).collect();
        let neg_s = Complex::with_val(bits, -s);
        let mut sum = hp::zero(prec);
        for k in 1..=n {
            let c = &chi_values[(k % q) as usize];
            if c.is_zero() {
                continue;
            }
            let mut term = hp::int_pow(k, &neg_s)?;
            term *= c;
            term *= d[k as usize];
            sum += term;
        }
        let f = if q == 1 { zeta::riemann_zeta(s)? } else { characters::l_function(s, &chi)? };
        let mut e = Complex::with_val(bits, &f * &f);
        e -= sum;
        let xv = hp::rational_to_real(prec, &big_x);
        if q == 1 {
            let r = isqrt(n);
            let mut harmonic = Float::new(bits);
            for k in 1..=r {
                harmonic += Float::with_val(bits, 1u32) / k;
            }
            let one_minus = Complex::with_val(bits, 1 - s);
            let mut corr = hp::complex_pow(&xv, &one_minus)?;
            corr /= Complex::with_val(bits, s - 1u32);
            corr *= harmonic;
            corr *= 2u32;
            e -= corr;
        }
        Ok((hp::ensure_finite(e, "large-X square residual")?, xv))
    }

    /// The predictor P(σ, t, q, X) for single-AFE claims.
    pub fn predictor(&self, sigma: f64, v: f64, x: &HpReal, prec: Precision) -> HpReal {
        let bits = prec.bits();
        let f = |v: f64| Float::with_val(bits, v);
        let q = f(self.q as f64);
        let t = f(v);
        let xs = Float::with_val(bits, x.pow(-sigma));
        let sqrt = |z: &Float| Float::with_val(bits, z.sqrt_ref());
        let ln = |z: Float| z.ln();
        match self.kind {
            ClaimKind::Corollary2 => {
                let qt = Float::with_val(bits, &q * &t);
                let mut p = Float::with_val(bits, sqrt(&q) * sqrt(x));
                p += Float::with_val(bits, x / sqrt(&qt));
                p += sqrt(&qt);
                p += &q;
                p * xs * ln(q * (t + 3u32))
            }
            ClaimKind::Corollary3I | ClaimKind::Corollary3II => {
                let q = if self.kind == ClaimKind::Corollary3I { f(1.0) } else { q };
                sqrt(&q) * Float::with_val(bits, x.pow(0.5 - sigma))
            }
            ClaimKind::Corollary6I => {
                let mut p = Float::with_val(bits, x.pow(2.0 / 3.0));
                p += Float::with_val(bits, x / sqrt(&t));
                p += sqrt(&t);
                p += Float::with_val(bits, t.clone().pow(1.0 - sigma));
                let l = ln(t + 2u32);
                p * xs * Float::with_val(bits, l.square_ref())
            }
            ClaimKind::Corollary6II => {
                let mut p = Float::with_val(bits, x.pow(0.75));
                p += Float::with_val(bits, &t * Float::with_val(bits, x.pow(0.25)));
                p * xs * t.pow(self.epsilon)
            }
            ClaimKind::Result1Shell | ClaimKind::Result2Shell => {
                let q = if self.kind == ClaimKind::Result1Shell { f(1.0) } else { q };
                let qt = Float::with_val(bits, &q * &t);
                let first = sqrt(&q) * &xs;
                let second = Float::with_val(bits, x.pow(1.0 - sigma)) / sqrt(&qt);
                first + second
            }
            ClaimKind::Theorem2Tail => sqrt(&q) / sqrt(&t),
            ClaimKind::RealS => q * xs,
            ClaimKind::Corollary4 | ClaimKind::Corollary5 => {
                unreachable!("two-point claims use product_predictor")
            }
        }
    }

    fn product_predictor(&self, sigma: f64, t: f64, x1: &HpReal, x2: &HpReal, prec: Precision) -> HpReal {
        let bits = prec.bits();
        let f = |v: f64| Float::with_val(bits, v);
        let sqrt = |z: &Float| Float::with_val(bits, z.sqrt_ref());
        let q1 = f(self.q as f64);
        let t = f(t);
        let xx = Float::with_val(bits, x1 * x2);
        let xs = Float::with_val(bits, (&xx).pow(-sigma));
        if self.kind == ClaimKind::Corollary4 {
            let q2 = f(self.q2 as f64);
            let mut p = Float::with_val(bits, x1 * sqrt(&q2));
            p += Float::with_val(bits, x2 * sqrt(&q1));
            let inv = Float::with_val(bits, sqrt(&q1).recip_ref()) + Float::with_val(bits, sqrt(&q2).recip_ref());
            p += Float::with_val(bits, &xx / sqrt(&t)) * inv;
            p += sqrt(&Float::with_val(bits, &q1 * &t));
            p += sqrt(&Float::with_val(bits, &q2 * &t));
            p += sqrt(&Float::with_val(bits, &q1 * &q2));
            p * xs * (q1 * q2 * (t + 2u32)).ln()
        } else {
            let mut p = Float::with_val(bits, sqrt(&q1) * x1);
            p += x2;
            p += Float::with_val(bits, &xx / sqrt(&t));
            p += sqrt(&Float::with_val(bits, &q1 * &t));
            p * xs * (q1 * (t + 2u32)).ln()
        }
    }
}

/// One claim of every kind with default parameters.
pub fn registry() -> Vec<BoundClaim> {
    ClaimKind::ALL.into_iter().map(BoundClaim::new).collect()
}

/// One remainder next to its predicted size.
#[derive(Clone, Debug)]
pub struct RemainderSample {
    pub claim: String,
    pub s: HpComplex,
    /// Main truncation (x₁x₂ for products).
    pub x: HpReal,
    /// Dual truncation (y₁y₂ for products; 0 when there is no dual sum).
    pub y: HpReal,
    pub q: u64,
    pub e: HpComplex,
    pub predictor: HpReal,
    pub ratio: HpReal,
    pub branch_mode: BranchMode,
    pub seed: u64,
}

pub const SAMPLE_CSV_HEADER: &str = "claim,s_re,s_im,x,y,q,E_re,E_im,predictor,ratio,branch_mode,seed";

impl RemainderSample {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        claim: &str,
        s: HpComplex,
        x: HpReal,
        y: HpReal,
        q: u64,
        e: HpComplex,
        predictor: HpReal,
        seed: u64,
    ) -> Result<RemainderSample> {
        if !(predictor.is_finite() && predictor > 0) {
            return Err(Error::NonFinite("predictor must be positive"));
        }
        let ratio = Float::with_val(predictor.prec(), hp::abs(&e) / &predictor);
        if !ratio.is_finite() {
            return Err(Error::NonFinite("ratio"));
        }
        Ok(RemainderSample {
            claim: claim.to_string(),
            s,
            x,
            y,
            q,
            e,
            predictor,
            ratio,
            branch_mode: BranchMode::Principal,
            seed,
        })
    }

    pub fn t(&self) -> f64 {
        self.s.imag().to_f64()
    }

    pub fn csv_row(&self, digits: usize) -> String {
        let r = |x: &HpReal| hp::format_real(x, digits);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.claim,
            r(self.s.real()),
            r(self.s.imag()),
            r(&self.x),
            r(&self.y),
            self.q,
            r(self.e.real()),
            r(self.e.imag()),
            r(&self.predictor),
            r(&self.ratio),
            self.branch_mode.as_str(),
            self.seed
        )
    }

    /// Inverse of `csv_row`.
    pub fn from_csv_row(line: &str, prec: Precision) -> Result<RemainderSample> {
        let cells: Vec<&str> = line.trim_end().split(',').collect();
        if cells.len() != 12 {
            return Err(Error::Parse(format!("expected 12 cells, found {}", cells.len())));
        }
        let r = |k: usize| hp::parse_real(prec, cells[k]);
        let c = |k: usize| -> Result<HpComplex> { Ok(Complex::with_val(prec.bits(), (r(k)?, r(k + 1)?))) };
        let int = |k: usize| cells[k].parse::<u64>().map_err(|e| Error::Parse(format!("{}: {e}", cells[k])));
        Ok(RemainderSample {
            claim: cells[0].to_string(),
            s: c(1)?,
            x: r(3)?,
            y: r(4)?,
            q: int(5)?,
            e: c(6)?,
            predictor: r(8)?,
            ratio: r(9)?,
            branch_mode: cells[10].parse()?,
            seed: int(11)?,
        })
    }
}

/// n log-spaced values in [lo, hi], each shifted by [`T_JITTER`].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo + T_JITTER],
        _ => {
            let ratio = (hi / lo).ln();
            (0..n).map(|k| lo * (ratio * k as f64 / (n - 1) as f64).exp() + T_JITTER).collect()
        }
    }
}

/// Evaluate a claim along a grid; output order follows the grid.
pub fn sweep_claim(
    claim: &BoundClaim,
    sigma: f64,
    grid: &[f64],
    prec: Precision,
    seed: u64,
) -> Result<Vec<RemainderSample>> {
    grid.par_iter().map(|&v| claim.sample(sigma, v, prec, seed)).collect()
}

/// Fitted constant and trend of |E|/P.
#[derive(Clone, Debug)]
pub struct BoundFit {
    pub claim: String,
    pub samples: usize,
    pub c_max: HpReal,
    pub trend_slope: f64,
}

impl BoundFit {
    pub fn passes(&self) -> bool {
        self.c_max.is_finite() && self.trend_slope <= TREND_LIMIT
    }
}

/// Least-squares slope of y against x.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn fit_bound(samples: &[RemainderSample], claim: &BoundClaim) -> Result<BoundFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!("{} samples, need {MIN_SAMPLES}", samples.len())));
    }
    let mut c_max = samples[0].ratio.clone();
    let mut points = Vec::with_capacity(samples.len());
    for s in samples {
        if s.ratio > c_max {
            c_max = s.ratio.clone();
        }
        let abscissa = match claim.trend_var() {
            TrendVar::T => s.t(),
            TrendVar::X => s.x.to_f64(),
        };
        let log_ratio = s.ratio.clone().ln().to_f64();
        if !log_ratio.is_finite() {
            return Err(Error::NonFinite("log ratio"));
        }
        points.push((abscissa.ln(), log_ratio));
    }
    Ok(BoundFit {
        claim: claim.name().to_string(),
        samples: samples.len(),
        c_max,
        trend_slope: least_squares_slope(&points),
    })
}

/// σ-major grid of (σ, t, ρ) points.
#[derive(Clone, Debug, Default)]
pub struct SweepGrid {
    pub sigmas: Vec<f64>,
    pub ts: Vec<f64>,
    pub rhos: Vec<Rational>,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<(f64, f64, Rational)> {
        let mut out = Vec::with_capacity(self.sigmas.len() * self.ts.len() * self.rhos.len());
        for &sigma in &self.sigmas {
            for &t in &self.ts {
                for rho in &self.rhos {
                    out.push((sigma, t, rho.clone()));
                }
            }
        }
        out
    }
}

/// E(s, ρ√T) for one AFE over a grid, against q^½x^(−σ) + x^(1−σ)/√(qt).
pub fn remainder_sweep(spec: &AfeSpec, grid: &SweepGrid, prec: Precision, seed: u64) -> Result<Vec<RemainderSample>> {
    let q = spec.family().map_or(1, |(_, chi)| chi.modulus());
    let shell = BoundClaim::new(ClaimKind::Result2Shell).with_q(q);
    grid.points()
        .par_iter()
        .map(|(sigma, t, rho)| {
            let s = hp::complex(prec, *sigma, *t);
            let mut p = PointAfe::new(spec, &s)?;
            let x = p.balanced(rho)?;
            let y = p.dual_point(&x)?;
            let e = p.remainder(&x)?;
            let xv = x.value(prec)?;
            let predictor = shell.predictor(*sigma, *t, &xv, prec);
            RemainderSample::new(spec.label(), s, xv, y.value(prec)?, q, e, predictor, seed)
        })
        .collect()
}

/// Product remainders with their full breakdown, ρ₁ = ρ₂ = ρ, over a grid.
pub fn product_sweep(
    spec1: &AfeSpec,
    spec2: &AfeSpec,
    grid: &SweepGrid,
    prec: Precision,
) -> Result<Vec<RemainderBreakdown>> {
    grid.points()
        .par_iter()
        .map(|(sigma, t, rho)| theorem1_balanced(spec1, spec2, &hp::complex(prec, *sigma, *t), rho, rho))
        .collect()
}

/// Pairs exercised by the product-remainder master test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductPair {
    ZetaZeta,
    ZetaL4,
    L3L5,
    SqrtZetaSqrtZeta,
}

impl ProductPair {
    pub const ALL: [ProductPair; 4] =
        [ProductPair::ZetaZeta, ProductPair::ZetaL4, ProductPair::L3L5, ProductPair::SqrtZetaSqrtZeta];

    pub fn label(self) -> &'static str {
        match self {
            ProductPair::ZetaZeta => "zeta,zeta",
            ProductPair::ZetaL4 => "zeta,l4",
            ProductPair::L3L5 => "l3,l5",
            ProductPair::SqrtZetaSqrtZeta => "sqrt-zeta,sqrt-zeta",
        }
    }

    pub fn specs(self) -> Result<(AfeSpec, AfeSpec)> {
        let l = |q: u64| AfeSpec::dirichlet_l(&BoundClaim::character(q)?);
        Ok(match self {
            ProductPair::ZetaZeta => (AfeSpec::zeta(), AfeSpec::zeta()),
            ProductPair::ZetaL4 => (AfeSpec::zeta(), l(4)?),
            ProductPair::L3L5 => (l(3)?, l(5)?),
            ProductPair::SqrtZetaSqrtZeta => (AfeSpec::sqrt_zeta(), AfeSpec::sqrt_zeta()),
        })
    }
}

/// Truncation scales ρ for the master test.
pub fn rho_choices() -> [Rational; 4] {
    [Rational::from((1, 2)), Rational::from(1), Rational::from(2), Rational::from((7, 3))]
}

#[derive(Clone, Debug)]
pub struct Theorem1Config {
    pub pair: ProductPair,
    pub sigma: f64,
    pub t: f64,
    pub rho1: Rational,
    pub rho2: Rational,
    pub seed: u64,
}

/// `count` configurations cycling through every pair and (ρ₁, ρ₂) choice, with
/// σ ∈ [0.05, 0.95] and t ∈ [20, 500] drawn from seed + k.
pub fn theorem1_configs(count: usize, seed: u64) -> Vec<Theorem1Config> {
    let rhos = rho_choices();
    (0..count)
        .map(|k| {
            let s = seed.wrapping_add(k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            Theorem1Config {
                pair: ProductPair::ALL[k % 4],
                sigma: rng.gen_range(0.05..=0.95),
                t: rng.gen_range(20.0..=500.0),
                rho1: rhos[(k / 4) % 4].clone(),
                rho2: rhos[(k / 16) % 4].clone(),
                seed: s,
            }
        })
        .collect()
}

pub fn run_theorem1(configs: &[Theorem1Config], prec: Precision) -> Result<Vec<RemainderBreakdown>> {
    configs
        .par_iter()
        .map(|c| {
            let (a, b) = c.pair.specs()?;
            theorem1_balanced(&a, &b, &hp::complex(prec, c.sigma, c.t), &c.rho1, &c.rho2)
        })
        .collect()
}
