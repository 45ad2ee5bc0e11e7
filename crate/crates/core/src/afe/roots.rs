//! Square-root AFEs: √L(s, χ) squared back into the AFE of L(s, χ).
//!
//! With f = √L, ψ_f = √ψ and x = √X, y = √Y the squared AFE reads
//! E₁(s, X, χ) = 2{Σ_{n≤x} a(n,χ)n^(−s)E_½(s, X/n, χ) +
//!   ψ(s,χ)Σ_{n≤y} a(n,χ̄)n^(s−1)E_½(1−s, Y/n, χ̄) + L} + E_½(s, x, χ)²,
//! L = √ψ·ℓ^(−s)Σ_{n≤y} a(n,χ̄)a(ℓn,χ)/n, ℓ = x/y. The four roots √L(s),
//! √ψ(s), √L(1−s), √ψ(1−s) must be mutually consistent for the identity to
//! hold, which continuous tracking along a path provides.

use rug::{Complex, Rational};

use super::spec::{AfeSpec, PointAfe};
use super::theorem1::{l_part, square_total};
use super::trunc::TruncBase;
use crate::characters::{self, Character};
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal, Precision};
use crate::special::{self, BranchMode, BranchTracker};

/// Chosen roots √L(s,χ), √ψ(s,χ), √L(1−s,χ̄), √ψ(1−s,χ̄).
#[derive(Clone, Debug)]
pub struct RootBranches {
    pub f: HpComplex,
    pub psi: HpComplex,
    pub f_reflected: HpComplex,
    pub psi_reflected: HpComplex,
}

fn raw_values(chi: &Character, s: &HpComplex) -> Result<[HpComplex; 4]> {
    let prec = hp::precision_of(s);
    let r = Complex::with_val(prec.bits(), 1 - s);
    let bar = chi.conj();
    Ok([
        characters::l_function(s, chi)?,
        characters::l_psi_factor(s, chi)?.value,
        characters::l_function(&r, &bar)?,
        characters::l_psi_factor(&r, &bar)?.value,
    ])
}

/// Principal square roots of the four values, chosen independently.
pub fn principal_branches(chi: &Character, s: &HpComplex) -> Result<RootBranches> {
    let [l, psi, lr, psir] = raw_values(chi, s)?;
    Ok(RootBranches {
        f: special::principal_root(&l, 2, None)?,
        psi: special::principal_root(&psi, 2, None)?,
        f_reflected: special::principal_root(&lr, 2, None)?,
        psi_reflected: special::principal_root(&psir, 2, None)?,
    })
}

/// Roots continued along the horizontal path s = σ + it, t increasing.
#[derive(Clone, Debug)]
pub struct RootPath {
    chi: Character,
    sigma: f64,
    t: f64,
    prec: Precision,
    trackers: [BranchTracker; 4],
    raw: [HpComplex; 4],
    current: RootBranches,
    steps: usize,
}

/// Largest accepted phase change of an underlying value per step.
const MAX_PHASE_STEP: f64 = 0.5;

fn phase_change(new: &HpComplex, old: &HpComplex) -> f64 {
    let ratio = Complex::with_val(hp::precision_of(new).bits(), new / old);
    hp::arg(&ratio).to_f64().abs()
}

impl RootPath {
    /// Start at σ + it₀ with principal √L(s) and √ψ(s), and reflected roots
    /// chosen so that √ψ(s)√ψ(1−s) = 1 and √L(s) = √ψ(s)√L(1−s).
    pub fn start(chi: &Character, sigma: f64, t0: f64, prec: Precision) -> Result<RootPath> {
        let s = hp::complex(prec, sigma, t0);
        let raw = raw_values(chi, &s)?;
        let mut trackers = [
            BranchTracker::new(BranchMode::ContinuousSweep),
            BranchTracker::new(BranchMode::ContinuousSweep),
            BranchTracker::new(BranchMode::ContinuousSweep),
            BranchTracker::new(BranchMode::ContinuousSweep),
        ];
        let f = special::principal_root(&raw[0], 2, Some(&mut trackers[0]))?;
        let psi = special::principal_root(&raw[1], 2, Some(&mut trackers[1]))?;
        let phase_f = trackers[0].last_phase().unwrap_or(0.0);
        let phase_psi = trackers[1].last_phase().unwrap_or(0.0);
        trackers[2] = BranchTracker::seeded(phase_f - phase_psi);
        trackers[3] = BranchTracker::seeded(-phase_psi);
        let f_reflected = special::principal_root(&raw[2], 2, Some(&mut trackers[2]))?;
        let psi_reflected = special::principal_root(&raw[3], 2, Some(&mut trackers[3]))?;
        let current = RootBranches { f, psi, f_reflected, psi_reflected };
        Ok(RootPath { chi: chi.clone(), sigma, t: t0, prec, trackers, raw, current, steps: 0 })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn current(&self) -> &RootBranches {
        &self.current
    }

    /// Steps taken so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Largest root phase jump seen by any tracker.
    pub fn max_jump(&self) -> f64 {
        self.trackers.iter().map(BranchTracker::max_jump).fold(0.0, f64::max)
    }

    /// Continue to t (≥ the current t) with adaptive steps.
    pub fn advance(&mut self, t: f64) -> Result<RootBranches> {
        if t < self.t {
            return Err(Error::Domain(format!("path runs forward only ({} → {t})", self.t)));
        }
        let mut h = (t - self.t).min(1.0);
        while self.t < t {
            let next_t = (self.t + h).min(t);
            let s = hp::complex(self.prec, self.sigma, next_t);
            let raw = raw_values(&self.chi, &s)?;
            let worst = raw.iter().zip(&self.raw).map(|(n, o)| phase_change(n, o)).fold(0.0, f64::max);
            if worst > MAX_PHASE_STEP {
                h /= 2.0;
                if h < 1e-9 {
                    return Err(Error::Domain(format!("root path passes too close to a zero near t = {next_t}")));
                }
                continue;
            }
            let mut roots = Vec::with_capacity(4);
            for (value, tracker) in raw.iter().zip(self.trackers.iter_mut()) {
                roots.push(special::principal_root(value, 2, Some(tracker))?);
            }
            let mut it = roots.into_iter();
            self.current = RootBranches {
                f: it.next().expect("four roots"),
                psi: it.next().expect("four roots"),
                f_reflected: it.next().expect("four roots"),
                psi_reflected: it.next().expect("four roots"),
            };
            self.raw = raw;
            self.t = next_t;
            self.steps += 1;
            if worst < MAX_PHASE_STEP / 4.0 {
                h *= 2.0;
            }
        }
        Ok(self.current.clone())
    }
}

/// One evaluation of the squared square-root AFE.
#[derive(Clone, Debug)]
pub struct RootCheck {
    pub s: HpComplex,
    pub q: u64,
    pub rho: Rational,
    pub mode: BranchMode,
    /// E₁(s, X, χ) by direct subtraction.
    pub lhs: HpComplex,
    /// The assembled right-hand side.
    pub rhs: HpComplex,
    pub residual: HpReal,
    pub tolerance: HpReal,
    /// Integral ℓn in the L-term.
    pub l_terms: usize,
    /// Residual when the L-term runs over n ≤ x instead of n ≤ y.
    pub residual_l_over_x: HpReal,
    /// |√L(s) − √ψ(s)√L(1−s)| + |√ψ(s)√ψ(1−s) − 1|: branch consistency defect.
    pub branch_defect: HpReal,
}

impl RootCheck {
    pub fn passes(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn branch_defect(b: &RootBranches) -> HpReal {
    let bits = hp::precision_of(&b.f).bits();
    let fe = Complex::with_val(bits, &b.psi * &b.f_reflected);
    let d1 = hp::abs(&Complex::with_val(bits, &b.f - &fe));
    let one = Complex::with_val(bits, &b.psi * &b.psi_reflected) - 1u32;
    d1 + hp::abs(&one)
}

/// Evaluate the squared √L(·, χ) AFE at x = ρ·√T_½(s), X = x².
pub fn root_square_check(
    chi: &Character,
    s: &HpComplex,
    rho: &Rational,
    branches: &RootBranches,
    mode: BranchMode,
) -> Result<RootCheck> {
    let prec = hp::precision_of(s);
    let bits = prec.bits();
    let half = AfeSpec::power_family(Rational::from((1, 2)), chi)?;
    let reflected_spec = half.reflected().expect("power families reflect");
    let base = TruncBase::from_s(s);
    if matches!(base, TruncBase::Zero) {
        return Err(Error::Domain("the square-root AFE check needs t ≠ 0".into()));
    }
    let mut p = PointAfe::with_values(&half, s, base.clone(), branches.f.clone(), branches.psi.clone())?;
    let s_reflected = Complex::with_val(bits, 1 - s);
    let mut r = PointAfe::with_values(
        &reflected_spec,
        &s_reflected,
        base.clone(),
        branches.f_reflected.clone(),
        branches.psi_reflected.clone(),
    )?;
    let x = p.balanced(rho)?;
    let y = p.dual_point(&x)?;
    let big_x = x.mul(&x);
    let rhs = square_total(&mut p, Some(&mut r), &x)?;

    let mut l_point = PointAfe::with_base(&AfeSpec::dirichlet_l(chi)?, s, base)?;
    let lhs = l_point.remainder(&big_x)?;
    let residual = hp::abs(&Complex::with_val(bits, &lhs - &rhs));

    let ell = x.div(&y)?;
    let mut twin = p.clone();
    let (l_y, l_terms) = l_part(&mut p, &mut twin, &y, &ell)?;
    let (l_x, _) = l_part(&mut p, &mut twin, &x, &ell)?;
    let mut shifted = Complex::with_val(bits, &l_x - &l_y);
    shifted *= p.psi();
    shifted *= 2u32;
    shifted += &rhs;
    let residual_l_over_x = hp::abs(&Complex::with_val(bits, &lhs - &shifted));

    let terms = (p.floor(&big_x)? + p.floor(&y.mul(&y))? + 16) as f64;
    let scale = hp::abs(&lhs).to_f64().max(1.0);
    Ok(RootCheck {
        s: s.clone(),
        q: chi.modulus(),
        rho: rho.clone(),
        mode,
        lhs,
        rhs,
        residual,
        tolerance: hp::tolerance_for(prec, terms * scale),
        l_terms,
        residual_l_over_x,
        branch_defect: branch_defect(branches),
    })
}

/// The check at σ + it for each t (increasing), with roots chosen by `mode`.
pub fn root_checks(
    chi: &Character,
    sigma: f64,
    ts: &[f64],
    rho: &Rational,
    prec: Precision,
    mode: BranchMode,
) -> Result<Vec<RootCheck>> {
    let mut out = Vec::with_capacity(ts.len());
    let mut path = match (mode, ts.first()) {
        (BranchMode::ContinuousSweep, Some(&t0)) => Some(RootPath::start(chi, sigma, t0, prec)?),
        _ => None,
    };
    for &t in ts {
        let s = hp::complex(prec, sigma, t);
        let branches = match path.as_mut() {
            Some(path) => path.advance(t)?,
            None => principal_branches(chi, &s)?,
        };
        out.push(root_square_check(chi, &s, rho, &branches, mode)?);
    }
    Ok(out)
}
