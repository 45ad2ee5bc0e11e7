//! AFE data for one Dirichlet series and its evaluation at a point.

use std::fmt;
use std::sync::Arc;

use rug::{Complex, Rational};

use super::power::{CoeffSource, PowerTable};
use super::trunc::{TruncBase, TruncPoint};
use crate::characters::{self, Character};
use crate::coeffs::CoeffSeq;
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex, HpReal, Precision};

/// Evaluators behind a custom AFE: the function, its dual factor and its
/// truncation product.
pub trait AfeModel: Send + Sync {
    fn reference(&self, s: &HpComplex) -> Result<HpComplex>;
    fn dual_factor(&self, s: &HpComplex) -> Result<HpComplex>;
    fn trunc_product(&self, base: &TruncBase) -> Result<TruncPoint>;
}

#[derive(Clone)]
enum Model {
    /// L(s, χ)^α with principal branches; T = (qB)^α.
    Family {
        alpha: Rational,
        chi: Character,
    },
    Custom(Arc<dyn AfeModel>),
}

/// f(s) = Σ a(n)n^(−s), f(s) ≈ Σ_{n≤x} a(n)n^(−s) + ψ(s)Σ_{n≤y} b(n)n^(s−δ), xy = T(s).
#[derive(Clone)]
pub struct AfeSpec {
    label: String,
    main: CoeffSource,
    dual: CoeffSource,
    delta: (Rational, Rational),
    model: Model,
}

impl fmt::Debug for AfeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AfeSpec").field("label", &self.label).finish_non_exhaustive()
    }
}

impl AfeSpec {
    /// L(s, χ)^α for primitive χ (q = 1 gives powers of ζ).
    pub fn power_family(alpha: Rational, chi: &Character) -> Result<AfeSpec> {
        if !chi.is_primitive() {
            return Err(Error::Domain(format!("{} is not primitive", chi.label())));
        }
        if alpha == 0 {
            return Err(Error::Domain("power family needs α ≠ 0".into()));
        }
        let name = if chi.modulus() == 1 { "zeta".to_string() } else { format!("L({})", chi.label()) };
        let label = if alpha == 1 { name } else { format!("{name}^({alpha})") };
        Ok(AfeSpec {
            label,
            main: CoeffSource::Family { alpha: alpha.clone(), chi: chi.clone() },
            dual: CoeffSource::Family { alpha: alpha.clone(), chi: chi.conj() },
            delta: (Rational::from(1), Rational::new()),
            model: Model::Family { alpha, chi: chi.clone() },
        })
    }

    pub fn zeta() -> AfeSpec {
        AfeSpec::power_family(Rational::from(1), &characters::principal(1)).expect("trivial character is primitive")
    }

    pub fn dirichlet_l(chi: &Character) -> Result<AfeSpec> {
        AfeSpec::power_family(Rational::from(1), chi)
    }

    pub fn sqrt_zeta() -> AfeSpec {
        AfeSpec::power_family(Rational::from((1, 2)), &characters::principal(1))
            .expect("trivial character is primitive")
    }

    pub fn sqrt_l(chi: &Character) -> Result<AfeSpec> {
        AfeSpec::power_family(Rational::from((1, 2)), chi)
    }

    /// ζ^r with coefficients d_r(n).
    pub fn zeta_power(r: u32) -> AfeSpec {
        AfeSpec::power_family(Rational::from(r), &characters::principal(1)).expect("trivial character is primitive")
    }

    /// AFE with explicit coefficients and evaluators.
    pub fn custom(
        label: impl Into<String>,
        main: CoeffSeq,
        dual: CoeffSeq,
        delta: (Rational, Rational),
        model: Arc<dyn AfeModel>,
    ) -> AfeSpec {
        AfeSpec {
            label: label.into(),
            main: CoeffSource::Seq(main),
            dual: CoeffSource::Seq(dual),
            delta,
            model: Model::Custom(model),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn main_source(&self) -> &CoeffSource {
        &self.main
    }

    pub fn dual_source(&self) -> &CoeffSource {
        &self.dual
    }

    pub fn delta(&self, prec: Precision) -> HpComplex {
        Complex::with_val(
            prec.bits(),
            (hp::rational_to_real(prec, &self.delta.0), hp::rational_to_real(prec, &self.delta.1)),
        )
    }

    /// (α, χ) for power-family specs.
    pub fn family(&self) -> Option<(&Rational, &Character)> {
        match &self.model {
            Model::Family { alpha, chi } => Some((alpha, chi)),
            Model::Custom(_) => None,
        }
    }

    /// The AFE of f(δ − s), L(·, χ̄)^α, for power families.
    pub fn reflected(&self) -> Option<AfeSpec> {
        let (alpha, chi) = self.family()?;
        AfeSpec::power_family(alpha.clone(), &chi.conj()).ok()
    }

    pub fn reference(&self, s: &HpComplex) -> Result<HpComplex> {
        match &self.model {
            Model::Family { alpha, chi } => hp::principal_power(&characters::l_function(s, chi)?, alpha),
            Model::Custom(m) => m.reference(s),
        }
    }

    pub fn dual_factor(&self, s: &HpComplex) -> Result<HpComplex> {
        match &self.model {
            Model::Family { alpha, chi } => hp::principal_power(&characters::l_psi_factor(s, chi)?.value, alpha),
            Model::Custom(m) => m.dual_factor(s),
        }
    }

    pub fn trunc_product(&self, base: &TruncBase) -> Result<TruncPoint> {
        match &self.model {
            Model::Family { alpha, chi } => {
                let q = TruncPoint::integer(chi.modulus())?;
                Ok(q.pow(alpha)?.mul(&base.power(alpha)?))
            }
            Model::Custom(m) => m.trunc_product(base),
        }
    }
}

/// An AFE evaluated at one s: f, ψ, T and lazily grown prefix sums
/// P[k] = Σ_{n≤k} a(n)n^(−s) and Q[k] = Σ_{n≤k} b(n)n^(s−δ).
#[derive(Clone)]
pub struct PointAfe {
    spec: AfeSpec,
    s: HpComplex,
    prec: Precision,
    delta: HpComplex,
    f: HpComplex,
    psi: HpComplex,
    base: TruncBase,
    t_prod: TruncPoint,
    a: Vec<HpComplex>,
    b: Vec<HpComplex>,
    main_pow: PowerTable,
    dual_pow: PowerTable,
    p: Vec<HpComplex>,
    q: Vec<HpComplex>,
}

impl fmt::Debug for PointAfe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointAfe").field("spec", &self.spec.label).field("s", &self.s).finish_non_exhaustive()
    }
}

impl PointAfe {
    /// Evaluate `spec` at `s` with the base B = |t|/2π taken from s.
    pub fn new(spec: &AfeSpec, s: &HpComplex) -> Result<PointAfe> {
        PointAfe::with_base(spec, s, TruncBase::from_s(s))
    }

    pub fn with_base(spec: &AfeSpec, s: &HpComplex, base: TruncBase) -> Result<PointAfe> {
        let f = spec.reference(s)?;
        let t_prod = spec.trunc_product(&base)?;
        // ψ is never needed when T = 0 (every dual sum is empty)
        let psi = if t_prod.is_zero() { hp::zero(hp::precision_of(s)) } else { spec.dual_factor(s)? };
        PointAfe::with_values(spec, s, base, f, psi)
    }

    /// Evaluate with caller-chosen f(s) and ψ(s) (e.g. tracked branches).
    pub fn with_values(
        spec: &AfeSpec,
        s: &HpComplex,
        base: TruncBase,
        f: HpComplex,
        psi: HpComplex,
    ) -> Result<PointAfe> {
        let prec = hp::precision_of(s);
        let delta = spec.delta(prec);
        let t_prod = spec.trunc_product(&base)?;
        let dual_exp = Complex::with_val(prec.bits(), s - &delta);
        let neg_s = Complex::with_val(prec.bits(), -s);
        Ok(PointAfe {
            spec: spec.clone(),
            s: s.clone(),
            prec,
            delta,
            f,
            psi,
            base,
            t_prod,
            a: vec![hp::zero(prec)],
            b: vec![hp::zero(prec)],
            main_pow: PowerTable::new(&neg_s),
            dual_pow: PowerTable::new(&dual_exp),
            p: vec![hp::zero(prec)],
            q: vec![hp::zero(prec)],
        })
    }

    pub fn spec(&self) -> &AfeSpec {
        &self.spec
    }

    pub fn s(&self) -> &HpComplex {
        &self.s
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn f(&self) -> &HpComplex {
        &self.f
    }

    pub fn psi(&self) -> &HpComplex {
        &self.psi
    }

    pub fn delta(&self) -> &HpComplex {
        &self.delta
    }

    pub fn base(&self) -> &TruncBase {
        &self.base
    }

    /// T(s), the product xy of main and dual truncations.
    pub fn trunc_product(&self) -> &TruncPoint {
        &self.t_prod
    }

    /// x = ρ·√T(s), the balanced truncation scaled by ρ.
    pub fn balanced(&self, rho: &Rational) -> Result<TruncPoint> {
        if self.t_prod.is_zero() {
            return Err(Error::Domain("balanced truncation needs T(s) > 0".into()));
        }
        self.t_prod.pow(&Rational::from((1, 2)))?.scale(rho)
    }

    /// y = T(s)/x.
    pub fn dual_point(&self, x: &TruncPoint) -> Result<TruncPoint> {
        if x.is_zero() {
            return Err(Error::Domain("truncation point x must be positive".into()));
        }
        self.t_prod.div(x)
    }

    pub fn floor(&self, x: &TruncPoint) -> Result<usize> {
        Ok(x.floor(self.prec)? as usize)
    }

    fn grow(source: &CoeffSource, have: &mut Vec<HpComplex>, n: usize, prec: Precision) -> Result<()> {
        if n < have.len() {
            return Ok(());
        }
        let mut target = n.max(2 * (have.len() - 1)).max(16);
        if let Some(avail) = source.available() {
            if avail < n {
                return Err(Error::Length { needed: n, available: avail });
            }
            target = target.min(avail);
        }
        *have = source.numeric(target, prec)?;
        Ok(())
    }

    fn ensure_main(&mut self, k: usize) -> Result<()> {
        if k < self.p.len() {
            return Ok(());
        }
        PointAfe::grow(&self.spec.main, &mut self.a, k, self.prec)?;
        let limit = k.max(2 * (self.p.len() - 1)).min(self.a.len() - 1);
        self.main_pow.ensure(limit)?;
        for n in self.p.len()..=limit {
            let term = Complex::with_val(self.prec.bits(), &self.a[n] * self.main_pow.get(n));
            let next = Complex::with_val(self.prec.bits(), &self.p[n - 1] + &term);
            self.p.push(next);
        }
        Ok(())
    }

    fn ensure_dual(&mut self, k: usize) -> Result<()> {
        if k < self.q.len() {
            return Ok(());
        }
        PointAfe::grow(&self.spec.dual, &mut self.b, k, self.prec)?;
        let limit = k.max(2 * (self.q.len() - 1)).min(self.b.len() - 1);
        self.dual_pow.ensure(limit)?;
        for n in self.q.len()..=limit {
            let term = Complex::with_val(self.prec.bits(), &self.b[n] * self.dual_pow.get(n));
            let next = Complex::with_val(self.prec.bits(), &self.q[n - 1] + &term);
            self.q.push(next);
        }
        Ok(())
    }

    /// a(n).
    pub fn a(&mut self, n: usize) -> Result<HpComplex> {
        PointAfe::grow(&self.spec.main, &mut self.a, n, self.prec)?;
        Ok(self.a[n].clone())
    }

    /// b(n).
    pub fn b(&mut self, n: usize) -> Result<HpComplex> {
        PointAfe::grow(&self.spec.dual, &mut self.b, n, self.prec)?;
        Ok(self.b[n].clone())
    }

    /// a(n)n^(−s).
    pub fn main_term(&mut self, n: usize) -> Result<HpComplex> {
        self.ensure_main(n)?;
        Ok(Complex::with_val(self.prec.bits(), &self.a[n] * self.main_pow.get(n)))
    }

    /// b(n)n^(s−δ).
    pub fn dual_term(&mut self, n: usize) -> Result<HpComplex> {
        self.ensure_dual(n)?;
        Ok(Complex::with_val(self.prec.bits(), &self.b[n] * self.dual_pow.get(n)))
    }

    /// n^(−s).
    pub fn main_power(&mut self, n: usize) -> Result<HpComplex> {
        self.main_pow.ensure(n)?;
        Ok(self.main_pow.get(n).clone())
    }

    /// n^(s−δ).
    pub fn dual_power(&mut self, n: usize) -> Result<HpComplex> {
        self.dual_pow.ensure(n)?;
        Ok(self.dual_pow.get(n).clone())
    }

    /// Σ_{n≤k} a(n)n^(−s).
    pub fn main_prefix(&mut self, k: usize) -> Result<HpComplex> {
        self.ensure_main(k)?;
        Ok(self.p[k].clone())
    }

    /// Σ_{n≤k} b(n)n^(s−δ), without ψ.
    pub fn dual_prefix(&mut self, k: usize) -> Result<HpComplex> {
        self.ensure_dual(k)?;
        Ok(self.q[k].clone())
    }

    /// Σ_{n≤x} a(n)n^(−s).
    pub fn main_sum(&mut self, x: &TruncPoint) -> Result<HpComplex> {
        let k = self.floor(x)?;
        self.main_prefix(k)
    }

    /// ψ(s)Σ_{n≤y} b(n)n^(s−δ); exactly zero for y < 1.
    pub fn dual_sum(&mut self, y: &TruncPoint) -> Result<HpComplex> {
        let k = self.floor(y)?;
        if k == 0 {
            return Ok(hp::zero(self.prec));
        }
        let q = self.dual_prefix(k)?;
        Ok(Complex::with_val(self.prec.bits(), &self.psi * &q))
    }

    /// E(s, x) = f(s) − Σ_{n≤x} a(n)n^(−s) − ψ(s)Σ_{n≤T/x} b(n)n^(s−δ).
    pub fn remainder(&mut self, x: &TruncPoint) -> Result<HpComplex> {
        let y = self.dual_point(x)?;
        let main = self.main_sum(x)?;
        let dual = self.dual_sum(&y)?;
        let mut e = self.f.clone();
        e -= main;
        e -= dual;
        hp::ensure_finite(e, "remainder")
    }
}

/// Which truncated sum `truncated_sum` forms.
#[derive(Clone, Copy, Debug)]
pub enum Side<'a> {
    /// Σ c(n)n^(−s).
    Main,
    /// ψ·Σ c(n)n^(s−δ).
    Dual { psi: &'a HpComplex, delta: &'a HpComplex },
}

/// Σ_{n≤limit} of the chosen side; limits below 1 give exactly 0.
pub fn truncated_sum(c: &CoeffSeq, s: &HpComplex, limit: &HpReal, side: Side<'_>) -> Result<HpComplex> {
    let prec = hp::precision_of(s);
    if *limit < 1u32 {
        return Ok(hp::zero(prec));
    }
    let k = hp::floor_to_integer(limit)?.to_usize().ok_or_else(|| Error::Range("truncation limit too large".into()))?;
    if k > c.n_max() {
        return Err(Error::Length { needed: k, available: c.n_max() });
    }
    let exponent = match side {
        Side::Main => Complex::with_val(prec.bits(), -s),
        Side::Dual { delta, .. } => Complex::with_val(prec.bits(), s - delta),
    };
    let table = PowerTable::with_limit(&exponent, k)?;
    let mut acc = hp::zero(prec);
    for n in 1..=k {
        let v = c.get(n);
        if !v.is_zero() {
            acc += Complex::with_val(prec.bits(), v.to_complex(prec) * table.get(n));
        }
    }
    if let Side::Dual { psi, .. } = side {
        acc *= psi;
    }
    hp::ensure_finite(acc, "truncated_sum")
}

/// E(s, x) by subtraction: reference(s) minus both truncated sums.
pub fn direct_remainder(spec: &AfeSpec, s: &HpComplex, x: &TruncPoint) -> Result<HpComplex> {
    PointAfe::new(spec, s)?.remainder(x)
}
