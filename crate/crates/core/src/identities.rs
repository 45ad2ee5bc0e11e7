//! Exact lattice identities: the generalized hyperbola decomposition,
//! Motohashi's divisor identity and Dirichlet's device.
//!
//! All comparisons λ ≤ x are between exact rationals; no floating point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::afe::divisor_summatory;
use crate::coeffs::CoeffSeq;
use crate::error::{Error, Result};
use crate::sieve::{divisor_counts, isqrt};

/// Strictly increasing positive λ₁ < λ₂ < … (finite prefix).
#[derive(Clone, Debug)]
pub struct LambdaSeq {
    values: Vec<Rational>,
}

impl LambdaSeq {
    pub fn new(values: Vec<Rational>) -> Result<LambdaSeq> {
        if values.is_empty() || values[0] <= 0 {
            return Err(Error::Domain("λ must be a non-empty positive sequence".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("λ must be strictly increasing".into()));
        }
        Ok(LambdaSeq { values })
    }

    /// λₙ = n + offset for n = 1..=len.
    pub fn shifted(offset: &Rational, len: usize) -> Result<LambdaSeq> {
        LambdaSeq::new((1..=len).map(|n| Rational::from(offset + n as u64)).collect())
    }

    pub fn integers(len: usize) -> LambdaSeq {
        LambdaSeq { values: (1..=len as u64).map(Rational::from).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// λ_i, 1-based.
    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i - 1]
    }

    /// Number of indices with λ_i ≤ x.
    fn count_le(&self, x: &Rational) -> usize {
        self.values.partition_point(|v| v <= x)
    }
}

/// φ(m, n) on 1 ≤ m, n ≤ size.
#[derive(Clone, Debug)]
pub struct WeightTable {
    size: usize,
    values: Vec<Rational>,
}

impl WeightTable {
    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> Rational) -> WeightTable {
        let mut values = Vec::with_capacity(size * size);
        for m in 1..=size {
            for n in 1..=size {
                values.push(f(m, n));
            }
        }
        WeightTable { size, values }
    }

    pub fn constant(size: usize, c: Rational) -> WeightTable {
        WeightTable::from_fn(size, |_, _| c.clone())
    }

    /// Uniform random integers in [−bound, bound].
    pub fn random(size: usize, bound: i64, rng: &mut impl Rng) -> WeightTable {
        let mut values = Vec::with_capacity(size * size);
        for _ in 0..size * size {
            values.push(Rational::from(rng.gen_range(-bound..=bound)));
        }
        WeightTable { size, values }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, m: usize, n: usize) -> &Rational {
        &self.values[(m - 1) * self.size + (n - 1)]
    }
}

/// Σ φ(m, n) over m in [m_lo, m_hi], n with lo < λn ≤ hi(m) (exclusive lower
/// bound when given).
fn strip_sum(
    phi: &WeightTable,
    lambda: &LambdaSeq,
    m_range: std::ops::RangeInclusive<usize>,
    n_lower: Option<&Rational>,
    n_upper: impl Fn(usize) -> Rational,
    swap: bool,
) -> Rational {
    let mut acc = Rational::new();
    for m in m_range {
        let hi = lambda.count_le(&n_upper(m));
        let lo = n_lower.map_or(0, |x| lambda.count_le(x));
        for n in lo + 1..=hi {
            acc += if swap { phi.get(n, m) } else { phi.get(m, n) };
        }
    }
    acc
}

/// LHS − RHS of identity II:
/// Σ_{λm≤x₁}Σ_{λn≤x₂}φ = Σ_{λmλn≤x₁x₂}φ − Σ_{λm≤x₁}Σ_{x₂<λn≤x₁x₂/λm}φ − Σ_{λn≤x₂}Σ_{x₁<λm≤x₁x₂/λn}φ.
pub fn hyperbola_residual(phi: &WeightTable, lambda: &LambdaSeq, x1: &Rational, x2: &Rational) -> Result<Rational> {
    if *x1 < 0 || *x2 < 0 {
        return Err(Error::Domain("hyperbola identity needs x₁, x₂ ≥ 0".into()));
    }
    let xx = Rational::from(x1 * x2);
    let reach = Rational::from(&xx / lambda.get(1));
    if *lambda.get(lambda.len()) <= reach {
        return Err(Error::Range(format!(
            "λ prefix ends at {} but must pass x₁x₂/λ₁ = {reach}",
            lambda.get(lambda.len())
        )));
    }
    let needed = lambda.count_le(&reach);
    if needed > phi.size() {
        return Err(Error::Range(format!("φ table covers {} indices, need {needed}", phi.size())));
    }
    let m1 = lambda.count_le(x1);
    let n2 = lambda.count_le(x2);
    let over = |m: usize| Rational::from(&xx / lambda.get(m));

    let lhs = strip_sum(phi, lambda, 1..=m1, None, |_| x2.clone(), false);
    let all = strip_sum(phi, lambda, 1..=needed, None, over, false);
    let strip_n = strip_sum(phi, lambda, 1..=m1, Some(x2), over, false);
    let strip_m = strip_sum(phi, lambda, 1..=n2, Some(x1), over, true);
    Ok(lhs - (all - strip_n - strip_m))
}

/// Identity I in its corrected form on the integer lattice:
/// Σ_{mn≤x₁x₂}φ − [Σ_{m≤x₁}Σ_{n≤x₁x₂/m}φ + Σ_{n≤x₂}Σ_{m≤x₁x₂/n}φ − Σ_{m≤x₁}Σ_{n≤x₂}φ].
pub fn identity_one_residual(phi: &WeightTable, x1: &Rational, x2: &Rational) -> Result<Rational> {
    let lambda = LambdaSeq::integers(phi.size());
    let xx = Rational::from(x1 * x2);
    if phi.size() <= xx {
        return Err(Error::Range(format!("φ table of size {} does not pass x₁x₂ = {xx}", phi.size())));
    }
    let m1 = lambda.count_le(x1);
    let n2 = lambda.count_le(x2);
    let mm = lambda.count_le(&xx);
    let over = |m: usize| Rational::from(&xx / lambda.get(m));
    let all = strip_sum(phi, &lambda, 1..=mm, None, over, false);
    let by_m = strip_sum(phi, &lambda, 1..=m1, None, over, false);
    let by_n = strip_sum(phi, &lambda, 1..=n2, None, over, true);
    let square = strip_sum(phi, &lambda, 1..=m1, None, |_| x2.clone(), false);
    Ok(all - (by_m + by_n - square))
}

fn rational_values(a: &CoeffSeq, n: usize) -> Result<Vec<Rational>> {
    if a.n_max() < n {
        return Err(Error::Length { needed: n, available: a.n_max() });
    }
    let mut out = vec![Rational::new()];
    for k in 1..=n {
        out.push(
            a.rational(k).ok_or_else(|| Error::Domain("Motohashi's identity is checked for rational a(n)".into()))?,
        );
    }
    Ok(out)
}

/// Both sides of Σ_{n≤N} d(n)a(n) = 2Σ_{n≤√N}Σ_{m≤N/n} a(mn) − Σ_{m,n≤√N} a(mn).
pub fn motohashi_sides(a: &CoeffSeq, n: u64) -> Result<(Rational, Rational)> {
    let v = rational_values(a, n as usize)?;
    let d = divisor_counts(n as usize);
    let mut lhs = Rational::new();
    for k in 1..=n as usize {
        if v[k] != 0 {
            lhs += Rational::from(&v[k] * d[k]);
        }
    }
    let r = isqrt(n);
    let mut strips = Rational::new();
    for j in 1..=r {
        for m in 1..=n / j {
            strips += &v[(m * j) as usize];
        }
    }
    let mut square = Rational::new();
    for m in 1..=r {
        for j in 1..=r {
            square += &v[(m * j) as usize];
        }
    }
    Ok((lhs, strips * 2u32 - square))
}

/// LHS − RHS of Motohashi's identity; exactly 0.
pub fn motohashi_residual(a: &CoeffSeq, n: u64) -> Result<Rational> {
    let (lhs, rhs) = motohashi_sides(a, n)?;
    Ok(lhs - rhs)
}

/// The chain identity II → Motohashi → Dirichlet's device at one N.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub n: u64,
    /// Identity II with λₙ = n, φ(m, n) = a(mn), x₁ = x₂ = √N: its two sides.
    pub identity2_lhs: Rational,
    pub identity2_rhs: Rational,
    /// Σ_{mn≤N} a(mn), identity II's first sum.
    pub lattice_sum: Rational,
    pub motohashi_lhs: Rational,
    pub motohashi_rhs: Rational,
    /// 2Σ_{n≤√N}⌊N/n⌋ − ⌊√N⌋² and the sieve Σ_{n≤N} d(n); they equal the
    /// Motohashi sides when a ≡ 1.
    pub device: u64,
    pub sieve: u64,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.identity2_lhs == self.identity2_rhs
            && self.lattice_sum == self.motohashi_lhs
            && self.motohashi_lhs == self.motohashi_rhs
            && self.device == self.sieve
    }
}

/// Identity II specialized to λₙ = n, φ(m,n) = a(mn), x₁ = x₂ = √N, compared
/// term by term with Motohashi's two sides; then a ≡ 1 gives the device count.
pub fn specialization_chain(a: &CoeffSeq, n: u64) -> Result<ChainReport> {
    let v = rational_values(a, n as usize)?;
    let r = isqrt(n);
    // λm ≤ √N ⟺ m ≤ ⌊√N⌋ and λmλn ≤ N ⟺ mn ≤ N, all exact
    let mut square = Rational::new();
    for m in 1..=r {
        for j in 1..=r {
            square += &v[(m * j) as usize];
        }
    }
    let mut lattice = Rational::new();
    for m in 1..=n {
        for j in 1..=n / m {
            lattice += &v[(m * j) as usize];
        }
    }
    // Σ_{m≤√N}Σ_{√N<n≤N/m}, identical for the mirrored strip since φ is symmetric
    let mut strip = Rational::new();
    for m in 1..=r {
        for j in r + 1..=n / m {
            strip += &v[(m * j) as usize];
        }
    }
    let identity2_rhs = Rational::from(&lattice - &strip) - &strip;
    let (motohashi_lhs, motohashi_rhs) = motohashi_sides(a, n)?;
    let d = divisor_counts(n as usize);
    let sieve = d.iter().map(|&k| u64::from(k)).sum();
    Ok(ChainReport {
        n,
        identity2_lhs: square,
        identity2_rhs,
        lattice_sum: lattice,
        motohashi_lhs,
        motohashi_rhs,
        device: divisor_summatory(n),
        sieve,
    })
}

/// Device count against the d(n) sieve for every N ≤ limit; returns mismatches.
pub fn device_mismatches(limit: u64) -> Vec<u64> {
    let d = divisor_counts(limit as usize);
    let mut acc = 0u64;
    let mut bad = Vec::new();
    for n in 1..=limit {
        acc += u64::from(d[n as usize]);
        if divisor_summatory(n) != acc {
            bad.push(n);
        }
    }
    bad
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialKind {
    HyperbolaInteger,
    HyperbolaShifted,
    Motohashi,
}

impl TrialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialKind::HyperbolaInteger => "hyperbola-integer",
            TrialKind::HyperbolaShifted => "hyperbola-shifted",
            TrialKind::Motohashi => "motohashi",
        }
    }
}

/// One seeded random instance and its exact residual.
#[derive(Clone, Debug)]
pub struct IdentityTrial {
    pub trial: usize,
    pub seed: u64,
    pub kind: TrialKind,
    /// N for Motohashi trials, x₁x₂ for hyperbola trials.
    pub size: Rational,
    pub residual: Rational,
}

pub const TRIAL_CSV_HEADER: &str = "trial,seed,N_or_x1x2,residual";

impl IdentityTrial {
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.trial, self.seed, self.size, self.residual)
    }
}

fn random_point(rng: &mut ChaCha8Rng, max: &Rational) -> Rational {
    let den: u64 = rng.gen_range(1..=12);
    let cap = Integer::from(max.numer() * den) / max.denom();
    let cap = cap.to_u64().unwrap_or(1).max(1);
    Rational::from((rng.gen_range(1..=cap), den))
}

/// Hyperbola instance on a 20×20 grid: λₙ = n (integer) or n + 1/3.
fn hyperbola_trial(trial: usize, seed: u64, shifted: bool) -> Result<IdentityTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 20;
    let phi = WeightTable::random(size, 50, &mut rng);
    let (lambda, limit) = if shifted {
        let third = Rational::from((1, 3));
        // need x₁x₂/λ₁ < λ₂₀ = 20 + 1/3, i.e. x₁x₂ < (4/3)(61/3)
        (LambdaSeq::shifted(&third, size)?, Rational::from((244, 9)))
    } else {
        (LambdaSeq::integers(size), Rational::from(20))
    };
    let bound = Rational::from((22, 5));
    let (x1, x2) = loop {
        let x1 = random_point(&mut rng, &bound);
        let x2 = random_point(&mut rng, &bound);
        if Rational::from(&x1 * &x2) < limit {
            break (x1, x2);
        }
    };
    let residual = hyperbola_residual(&phi, &lambda, &x1, &x2)?;
    let kind = if shifted { TrialKind::HyperbolaShifted } else { TrialKind::HyperbolaInteger };
    Ok(IdentityTrial { trial, seed, kind, size: x1 * x2, residual })
}

fn motohashi_trial(trial: usize, seed: u64, max_n: u64) -> Result<IdentityTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let values: Vec<Rational> = (0..n).map(|_| Rational::from(rng.gen_range(-100i64..=100))).collect();
    let a = CoeffSeq::from_rationals("random", values);
    let residual = motohashi_residual(&a, n)?;
    Ok(IdentityTrial { trial, seed, kind: TrialKind::Motohashi, size: Rational::from(n), residual })
}

/// `hyperbola` hyperbola trials (alternating integer and shifted λ) followed by
/// `motohashi` Motohashi trials with N ≤ max_n; trial k uses seed + k.
pub fn run_trials(hyperbola: usize, motohashi: usize, max_n: u64, seed: u64) -> Result<Vec<IdentityTrial>> {
    (0..hyperbola + motohashi)
        .into_par_iter()
        .map(|k| {
            let s = seed.wrapping_add(k as u64);
            if k < hyperbola {
                hyperbola_trial(k, s, k % 2 == 1)
            } else {
                motohashi_trial(k, s, max_n)
            }
        })
        .collect()
}
