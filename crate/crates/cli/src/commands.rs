use afe_core::afe::{self, balanced_point, corollary1_square, theorem2_check, CSV_HEADER};
use afe_core::characters::{self, Character};
use afe_core::harness::{self, BoundClaim, ClaimKind, SweepGrid, SAMPLE_CSV_HEADER};
use afe_core::hp::{self, HpComplex, HpReal, Precision};
use afe_core::identities::{self, TRIAL_CSV_HEADER};
use afe_core::special::BranchMode;
use anyhow::{anyhow, Result};
use rug::Rational;
use serde_json::{json, Value};

use crate::args::{
    pair_specs, parse_family, BoundsArgs, Corollary1Args, DivisorArgs, Global, IdentitiesArgs, PointArgs, SweepArgs,
    Theorem1Args, Theorem2Args,
};
use crate::output::{Outputs, Plot};

/// Result of one subcommand: whether every contract held, and what to report.
pub struct Outcome {
    pub ok: bool,
    pub summary: Value,
    pub lines: Vec<String>,
}

struct Ctx<'a> {
    prec: Precision,
    digits: usize,
    seed: u64,
    branch: BranchMode,
    out: &'a mut Outputs,
}

impl Ctx<'_> {
    fn r(&self, x: &HpReal) -> String {
        hp::format_real(x, self.digits)
    }

    fn c(&self, z: &HpComplex) -> String {
        format!("{},{}", self.r(z.real()), self.r(z.imag()))
    }
}

pub fn run(command: &crate::args::Command, global: &Global, out: &mut Outputs) -> Result<Outcome> {
    use crate::args::Command;
    let prec = Precision::new(global.prec)?;
    let mut ctx = Ctx { prec, digits: prec.decimal_digits(), seed: global.seed, branch: global.branch, out };
    match command {
        Command::Identities(a) => identities_cmd(&mut ctx, a),
        Command::Remainder(a) => remainder_cmd(&mut ctx, a),
        Command::Theorem1(a) => theorem1_cmd(&mut ctx, a),
        Command::Corollary1(a) => corollary1_cmd(&mut ctx, a),
        Command::Theorem2(a) => theorem2_cmd(&mut ctx, a),
        Command::Divisor(a) => divisor_cmd(&mut ctx, a),
        Command::Bounds(a) => bounds_cmd(&mut ctx, a),
        Command::Sweep(a) => sweep_cmd(&mut ctx, a),
    }
}

fn family(text: &str) -> Result<afe::AfeSpec> {
    parse_family(text).map_err(|e| anyhow!(e))
}

fn character(q: u64) -> Result<Character> {
    if q == 1 {
        return Ok(characters::principal(1));
    }
    characters::primitive_characters(q).into_iter().next().ok_or_else(|| anyhow!("no primitive character mod {q}"))
}

fn identities_cmd(ctx: &mut Ctx<'_>, a: &IdentitiesArgs) -> Result<Outcome> {
    let motohashi = a.motohashi.unwrap_or(a.trials / 2);
    let trials = identities::run_trials(a.trials, motohashi, a.max_n, ctx.seed)?;
    let mismatches = identities::device_mismatches(a.device_limit);
    ctx.out.csv("identities.csv", TRIAL_CSV_HEADER, trials.iter().map(|t| t.csv_row()))?;
    let nonzero = trials.iter().filter(|t| t.residual != 0).count();
    let ok = nonzero == 0 && mismatches.is_empty();
    Ok(Outcome {
        ok,
        summary: json!({
            "hyperbola_trials": a.trials,
            "motohashi_trials": motohashi,
            "nonzero_residuals": nonzero,
            "device_limit": a.device_limit,
            "device_mismatches": mismatches,
        }),
        lines: vec![
            format!("{} identity instances, {nonzero} nonzero residuals", trials.len()),
            format!("device vs sieve for N <= {}: {} mismatches", a.device_limit, mismatches.len()),
        ],
    })
}

fn remainder_cmd(ctx: &mut Ctx<'_>, a: &PointArgs) -> Result<Outcome> {
    let spec = family(&a.family)?;
    let grid = SweepGrid { sigmas: vec![a.sigma], ts: vec![a.t], rhos: vec![a.rho.clone()] };
    let samples = harness::remainder_sweep(&spec, &grid, ctx.prec, ctx.seed)?;
    let digits = ctx.digits;
    ctx.out.csv("remainder.csv", SAMPLE_CSV_HEADER, samples.iter().map(|s| s.csv_row(digits)))?;
    let s = &samples[0];
    Ok(Outcome {
        ok: true,
        summary: json!({ "family": spec.label(), "E_abs": hp::abs(&s.e).to_f64(), "x": s.x.to_f64(), "y": s.y.to_f64() }),
        lines: vec![format!("{}: E = {} at x = {}", spec.label(), ctx.c(&s.e), ctx.r(&s.x))],
    })
}

fn theorem1_cmd(ctx: &mut Ctx<'_>, a: &Theorem1Args) -> Result<Outcome> {
    let digits = ctx.digits;
    if let Some(count) = a.configs {
        let configs = harness::theorem1_configs(count, ctx.seed);
        let rows = harness::run_theorem1(&configs, ctx.prec)?;
        ctx.out.csv("theorem1.csv", CSV_HEADER, rows.iter().map(|r| r.csv_row(digits)))?;
        let index_rows = configs.iter().zip(&rows).enumerate().map(|(k, (c, r))| {
            format!(
                "{k},\"{}\",{},{},{},{},{},{},{}",
                c.pair.label(),
                c.sigma,
                c.t,
                c.rho1,
                c.rho2,
                c.seed,
                hp::format_real(&r.relative_residual(), 6),
                r.passes()
            )
        });
        ctx.out.csv(
            "theorem1_configs.csv",
            "index,pair,sigma,t,rho1,rho2,seed,relative_residual,passes",
            index_rows,
        )?;
        let failed = rows.iter().filter(|r| !r.passes()).count();
        let worst = rows.iter().map(|r| r.relative_residual().to_f64()).fold(0.0, f64::max);
        return Ok(Outcome {
            ok: failed == 0,
            summary: json!({ "configs": count, "failed": failed, "max_relative_residual": worst }),
            lines: vec![format!("{count} configurations, {failed} failed, max relative residual {worst:.3e}")],
        });
    }
    let (spec1, spec2) = pair_specs(&a.pair).map_err(|e| anyhow!(e))?;
    let s = hp::complex(ctx.prec, a.sigma, a.t);
    let row = afe::theorem1_balanced(&spec1, &spec2, &s, &a.rho1, &a.rho2)?;
    ctx.out.csv("theorem1.csv", CSV_HEADER, [row.csv_row(digits)])?;
    Ok(Outcome {
        ok: row.passes(),
        summary: json!({
            "pair": a.pair,
            "relative_residual": row.relative_residual().to_f64(),
            "tolerance": row.tolerance().to_f64(),
            "l1_terms": row.l1_terms,
            "l2_terms": row.l2_terms,
            "residual_without_l": row.residual_without_l().to_f64(),
        }),
        lines: vec![format!(
            "{}: |total - direct| = {} (tolerance {}), L-terms {}+{}",
            a.pair,
            hp::format_real(&row.residual, 6),
            hp::format_real(&row.tolerance(), 6),
            row.l1_terms,
            row.l2_terms
        )],
    })
}

fn corollary1_cmd(ctx: &mut Ctx<'_>, a: &Corollary1Args) -> Result<Outcome> {
    let p = &a.point;
    let spec = family(&p.family)?;
    let s = hp::complex(ctx.prec, p.sigma, p.t);
    let x = balanced_point(&spec, &s, &p.rho)?;
    let sq = corollary1_square(&spec, &s, &x)?;
    let tol = sq.generic.tolerance();
    let sym_gap = sq.symmetric_gap();
    let fe_gap = sq.fe_gap();
    let root_family = spec.family().filter(|(alpha, _)| **alpha == Rational::from((1, 2))).map(|(_, chi)| chi.clone());
    let fe_ok = root_family.is_some() || fe_gap.as_ref().is_none_or(|g| *g <= tol);
    let mut ok = sq.generic.passes() && sym_gap <= tol && fe_ok;
    let fe_cells = sq.fe_form.as_ref().map_or_else(|| ",".to_string(), |z| ctx.c(z));
    let row = format!(
        "{},{},{},{},{},{},{},{},{}",
        ctx.c(&s),
        x.value(ctx.prec).map(|v| ctx.r(&v))?,
        ctx.c(&sq.generic.total),
        ctx.c(&sq.generic.direct),
        ctx.c(&sq.symmetric),
        fe_cells,
        ctx.r(&sq.generic.residual),
        ctx.r(&sym_gap),
        fe_gap.as_ref().map(|g| ctx.r(g)).unwrap_or_default(),
    );
    ctx.out.csv(
        "corollary1.csv",
        "s_re,s_im,x,generic_re,generic_im,direct_re,direct_im,symmetric_re,symmetric_im,fe_re,fe_im,generic_residual,symmetric_gap,fe_gap",
        [row],
    )?;
    let mut lines = vec![format!(
        "{}: generic residual {}, symmetric gap {}, tolerance {}",
        spec.label(),
        hp::format_real(&sq.generic.residual, 6),
        hp::format_real(&sym_gap, 6),
        hp::format_real(&tol, 6)
    )];
    let mut summary = json!({
        "family": spec.label(),
        "generic_residual": sq.generic.residual.to_f64(),
        "symmetric_gap": sym_gap.to_f64(),
        "fe_gap": fe_gap.as_ref().map(|g| g.to_f64()),
        "tolerance": tol.to_f64(),
    });

    if let Some(chi) = &root_family {
        let ts: Vec<f64> = match ctx.branch {
            BranchMode::ContinuousSweep if a.t_start < p.t => vec![a.t_start, p.t],
            _ => vec![p.t],
        };
        let checks = afe::root_checks(chi, p.sigma, &ts, &p.rho, ctx.prec, ctx.branch)?;
        let rows: Vec<String> = checks
            .iter()
            .map(|c| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    ctx.c(&c.s),
                    c.q,
                    c.rho,
                    c.mode.as_str(),
                    ctx.c(&c.lhs),
                    ctx.c(&c.rhs),
                    ctx.r(&c.residual),
                    ctx.r(&c.tolerance),
                    ctx.r(&c.residual_l_over_x),
                    ctx.r(&c.branch_defect)
                )
            })
            .collect();
        ctx.out.csv(
            "roots.csv",
            "s_re,s_im,q,rho,mode,lhs_re,lhs_im,rhs_re,rhs_im,residual,tolerance,residual_l_over_x,branch_defect",
            rows,
        )?;
        let last = checks.last().expect("at least one height");
        ok &= checks.iter().all(|c| c.passes());
        lines.push(format!(
            "squared square-root AFE ({} branches): residual {} (tolerance {})",
            ctx.branch.as_str(),
            hp::format_real(&last.residual, 6),
            hp::format_real(&last.tolerance, 6)
        ));
        summary["root_residual"] = json!(last.residual.to_f64());
        summary["root_passes"] = json!(checks.iter().all(|c| c.passes()));
    }
    Ok(Outcome { ok, summary, lines })
}

fn theorem2_cmd(ctx: &mut Ctx<'_>, a: &Theorem2Args) -> Result<Outcome> {
    let chi = character(a.q)?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    let mut worst_without_n: f64 = 0.0;
    for &t in &a.t {
        let rep = theorem2_check(&chi, &hp::complex(ctx.prec, a.sigma, t))?;
        ok &= rep.passes();
        worst_without_n = worst_without_n.max(rep.residual_without_n.to_f64());
        rows.push(format!(
            "{},{},{},{},{},{},{},{}",
            a.q,
            ctx.c(&rep.s),
            ctx.c(&rep.lhs),
            ctx.c(&rep.rhs),
            ctx.r(&rep.residual),
            ctx.r(&rep.tolerance),
            ctx.r(&rep.residual_without_n),
            ctx.r(&rep.tail)
        ));
        lines.push(format!(
            "q = {}, t = {t}: residual {} (tolerance {}); without 1/n: {}",
            a.q,
            hp::format_real(&rep.residual, 6),
            hp::format_real(&rep.tolerance, 6),
            hp::format_real(&rep.residual_without_n, 6)
        ));
    }
    ctx.out.csv(
        "theorem2.csv",
        "q,s_re,s_im,lhs_re,lhs_im,rhs_re,rhs_im,residual,tolerance,residual_without_n,tail",
        rows,
    )?;
    Ok(Outcome { ok, summary: json!({ "q": a.q, "max_residual_without_n": worst_without_n }), lines })
}

fn divisor_cmd(ctx: &mut Ctx<'_>, a: &DivisorArgs) -> Result<Outcome> {
    let sweep = afe::divisor_sweep(a.limit, ctx.prec);
    ctx.out.csv(
        "divisor.csv",
        "limit,max_gap,argmax,max_delta,device_mismatches",
        [format!(
            "{},{},{},{},{}",
            sweep.limit,
            sweep.max_gap,
            sweep.argmax,
            sweep.max_delta,
            sweep.device_mismatches.len()
        )],
    )?;
    let ok = sweep.max_gap < 3.0 && sweep.device_mismatches.is_empty();
    Ok(Outcome {
        ok,
        summary: json!({
            "limit": sweep.limit,
            "max_gap": sweep.max_gap,
            "argmax": sweep.argmax,
            "max_delta": sweep.max_delta,
            "device_mismatches": sweep.device_mismatches,
        }),
        lines: vec![format!(
            "X <= {}: max |Delta(X) + 2 sum psi(X/n)| = {:.4} at X = {}, max |Delta| = {:.2}, device mismatches {}",
            sweep.limit,
            sweep.max_gap,
            sweep.argmax,
            sweep.max_delta,
            sweep.device_mismatches.len()
        )],
    })
}

fn bounds_cmd(ctx: &mut Ctx<'_>, a: &BoundsArgs) -> Result<Outcome> {
    let mut claim = BoundClaim::new(a.claim).with_epsilon(a.epsilon);
    if let Some(q) = a.q {
        claim = claim.with_q(q);
    }
    let (lo, hi) = claim.default_range();
    let grid = harness::log_grid(a.t_min.unwrap_or(lo), a.t_max.unwrap_or(hi), a.points);
    let samples = harness::sweep_claim(&claim, a.sigma, &grid, ctx.prec, ctx.seed)?;
    let digits = ctx.digits;
    ctx.out.csv("bounds.csv", SAMPLE_CSV_HEADER, samples.iter().map(|s| s.csv_row(digits)))?;
    let real_s = claim.trend_var() == harness::TrendVar::X;
    ctx.out.plot(
        "bounds.gp",
        "bounds.csv",
        &Plot {
            title: claim.name(),
            x_col: if real_s { 4 } else { 3 },
            y_col: 10,
            x_label: if real_s { "X" } else { "t" },
            y_label: "|E| / predictor",
        },
    )?;
    let mut summary = json!({
        "claim": claim.name(),
        "statement": claim.statement(),
        "q": claim.q,
        "sigma": a.sigma,
        "samples": samples.len(),
        "trend_limit": harness::TREND_LIMIT,
        "note": "finite samples support a bound of this shape; they cannot prove it",
    });
    let mut lines = vec![format!("{}: {}", claim.name(), claim.statement())];
    let ok = match harness::fit_bound(&samples, &claim) {
        Ok(fit) => {
            summary["c_max"] = json!(fit.c_max.to_f64());
            summary["trend_slope"] = json!(fit.trend_slope);
            summary["passes"] = json!(fit.passes());
            lines.push(format!(
                "{} samples: C_max = {:.4e}, trend slope = {:.4} -> {}",
                fit.samples,
                fit.c_max.to_f64(),
                fit.trend_slope,
                if fit.passes() { "supported" } else { "not supported" }
            ));
            if claim.kind == ClaimKind::Corollary6II {
                let mut sensitivity = serde_json::Map::new();
                for eps in [0.01, 0.1] {
                    let c = claim.clone().with_epsilon(eps);
                    let s = harness::sweep_claim(&c, a.sigma, &grid, ctx.prec, ctx.seed)?;
                    let f = harness::fit_bound(&s, &c)?;
                    lines.push(format!("  epsilon = {eps}: trend slope = {:.4}", f.trend_slope));
                    sensitivity.insert(eps.to_string(), json!(f.trend_slope));
                }
                summary["epsilon_sensitivity"] = Value::Object(sensitivity);
            }
            fit.passes()
        }
        Err(e) => {
            lines.push(format!("no fit: {e}"));
            summary["passes"] = json!(false);
            false
        }
    };
    lines.push("finite samples support a bound of this shape; they cannot prove it".to_string());
    Ok(Outcome { ok, summary, lines })
}

fn sweep_cmd(ctx: &mut Ctx<'_>, a: &SweepArgs) -> Result<Outcome> {
    let grid =
        SweepGrid { sigmas: a.sigma.clone(), ts: harness::log_grid(a.t_min, a.t_max, a.points), rhos: a.rho.clone() };
    let digits = ctx.digits;
    if a.family.contains(',') {
        let (spec1, spec2) = pair_specs(&a.family).map_err(|e| anyhow!(e))?;
        let rows = harness::product_sweep(&spec1, &spec2, &grid, ctx.prec)?;
        ctx.out.csv("sweep.csv", CSV_HEADER, rows.iter().map(|r| r.csv_row(digits)))?;
        ctx.out.plot(
            "sweep.gp",
            "sweep.csv",
            &Plot { title: &a.family, x_col: 2, y_col: 23, x_label: "t", y_label: "|total - direct|" },
        )?;
        let failed = rows.iter().filter(|r| !r.passes()).count();
        return Ok(Outcome {
            ok: failed == 0,
            summary: json!({ "pair": a.family, "rows": rows.len(), "failed": failed }),
            lines: vec![format!("{} product breakdowns, {failed} outside tolerance", rows.len())],
        });
    }
    let spec = family(&a.family)?;
    let samples = harness::remainder_sweep(&spec, &grid, ctx.prec, ctx.seed)?;
    ctx.out.csv("sweep.csv", SAMPLE_CSV_HEADER, samples.iter().map(|s| s.csv_row(digits)))?;
    ctx.out.plot(
        "sweep.gp",
        "sweep.csv",
        &Plot { title: spec.label(), x_col: 3, y_col: 10, x_label: "t", y_label: "|E| / predictor" },
    )?;
    Ok(Outcome {
        ok: true,
        summary: json!({ "family": spec.label(), "samples": samples.len() }),
        lines: vec![format!("{} samples of {}", samples.len(), spec.label())],
    })
}
