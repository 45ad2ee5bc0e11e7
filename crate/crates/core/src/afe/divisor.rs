//! The divisor problem: Δ(X) = Σ_{n≤X} d(n) − X log X − (2γ − 1)X − 1/4 and
//! its sawtooth approximation −2Σ_{n≤√X} ψ(X/n).

use rug::Float;

use crate::error::{Error, Result};
use crate::hp::{self, HpReal, Precision};
use crate::sieve::{divisor_counts, isqrt};
use crate::special;
use crate::zeta;

/// D(N) = Σ_{n≤N} d(n) by Dirichlet's device 2Σ_{n≤√N}⌊N/n⌋ − ⌊√N⌋².
pub fn divisor_summatory(n: u64) -> u64 {
    let r = isqrt(n);
    2 * (1..=r).map(|k| n / k).sum::<u64>() - r * r
}

#[derive(Clone, Debug)]
pub struct DivisorDelta {
    pub delta: HpReal,
    pub delta_via_sawtooth: HpReal,
}

impl DivisorDelta {
    /// |Δ(X) + 2Σ_{n≤√X} ψ(X/n)|.
    pub fn gap(&self) -> HpReal {
        Float::with_val(self.delta.prec(), &self.delta - &self.delta_via_sawtooth).abs()
    }
}

fn main_term(x: &HpReal, gamma: &HpReal) -> HpReal {
    let bits = x.prec();
    let mut m = Float::with_val(bits, x * Float::with_val(bits, x.ln_ref()));
    let c = Float::with_val(bits, gamma * 2u32) - 1u32;
    m += c * x;
    m + Float::with_val(bits, 0.25)
}

/// Δ(X) and −2Σ_{n≤√X} ψ(X/n) for real X ≥ 1.
pub fn divisor_delta(x: &HpReal) -> Result<DivisorDelta> {
    if !x.is_finite() || *x < 1u32 {
        return Err(Error::Domain("divisor_delta needs X ≥ 1".into()));
    }
    let prec = Precision::new(x.prec())?;
    let n = hp::floor_to_integer(x)?.to_u64().ok_or_else(|| Error::Range("X too large".into()))?;
    let gamma = zeta::euler_gamma(prec);
    let count = Float::with_val(prec.bits(), divisor_summatory(n));
    let delta = count - main_term(x, &gamma);
    let mut saw = Float::new(prec.bits());
    for k in 1..=isqrt(n) {
        let u = Float::with_val(prec.bits(), x / k);
        saw += special::sawtooth(&u);
    }
    Ok(DivisorDelta { delta, delta_via_sawtooth: saw * -2i32 })
}

/// Exhaustive sweep over integers 1 ≤ X ≤ limit.
#[derive(Clone, Debug)]
pub struct DivisorSweep {
    pub limit: u64,
    /// max |Δ(X) + 2Σψ(X/n)| and where it occurs.
    pub max_gap: f64,
    pub argmax: u64,
    /// max |Δ(X)| for scale.
    pub max_delta: f64,
    /// X with device count ≠ sieve count.
    pub device_mismatches: Vec<u64>,
}

pub fn divisor_sweep(limit: u64, prec: Precision) -> DivisorSweep {
    let d = divisor_counts(limit as usize);
    let gamma = zeta::euler_gamma(prec);
    let bits = prec.bits();
    let mut sieve_sum = 0u64;
    let mut out = DivisorSweep { limit, max_gap: 0.0, argmax: 0, max_delta: 0.0, device_mismatches: Vec::new() };
    for x in 1..=limit {
        sieve_sum += u64::from(d[x as usize]);
        let device = divisor_summatory(x);
        if device != sieve_sum {
            out.device_mismatches.push(x);
        }
        let xf = Float::with_val(bits, x);
        let delta = Float::with_val(bits, sieve_sum) - main_term(&xf, &gamma);
        // ψ(X/n) = (X mod n)/n − 1/2 exactly for integer X
        let r = isqrt(x);
        let mut frac = Float::new(bits);
        for k in 1..=r {
            frac += Float::with_val(bits, x % k) / k;
        }
        let saw = (frac - Float::with_val(bits, r) / 2u32) * -2i32;
        let gap = Float::with_val(bits, &delta - &saw).abs().to_f64();
        if gap > out.max_gap {
            out.max_gap = gap;
            out.argmax = x;
        }
        out.max_delta = out.max_delta.max(delta.abs().to_f64());
    }
    out
}
