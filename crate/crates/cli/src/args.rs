use std::path::PathBuf;

use afe_core::afe::AfeSpec;
use afe_core::characters::{self, Character};
use afe_core::harness::ClaimKind;
use afe_core::special::BranchMode;
use clap::{Args, Parser, Subcommand};
use rug::Rational;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "afe",
    version,
    about = "Verify approximate functional equations of Dirichlet series at high precision"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 192, value_parser = clap::value_parser!(u32).range(64..))]
    pub prec: u32,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// How square roots are chosen: principal or sweep.
    #[arg(long, global = true, default_value = "sweep", value_parser = parse_branch)]
    #[serde(serialize_with = "branch_name")]
    pub branch: BranchMode,
}

fn branch_name<S: serde::Serializer>(b: &BranchMode, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(b.as_str())
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Exact hyperbola, Motohashi and device identities on seeded random instances.
    Identities(IdentitiesArgs),
    /// One AFE remainder E(s, ρ√T).
    Remainder(PointArgs),
    /// Product remainder assembled from its seven parts, next to the direct value.
    Theorem1(Theorem1Args),
    /// Square remainder in generic, symmetric and functional-equation form.
    Corollary1(Corollary1Args),
    /// The E₂(s, qt/2π, χ) structural identity.
    Theorem2(Theorem2Args),
    /// Divisor problem: Δ(X) against its sawtooth form, device against sieve.
    Divisor(DivisorArgs),
    /// Empirical support for one ≪ bound.
    Bounds(BoundsArgs),
    /// Remainders of one AFE, or of a product, over a grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct IdentitiesArgs {
    /// Hyperbola-identity instances.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Motohashi instances (default: half the hyperbola trials).
    #[arg(long)]
    pub motohashi: Option<usize>,
    /// Largest N for Motohashi instances.
    #[arg(long, default_value_t = 10_000)]
    pub max_n: u64,
    /// Check the device count against the sieve for every N up to this.
    #[arg(long, default_value_t = 10_000)]
    pub device_limit: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct PointArgs {
    /// zeta, zeta^r, sqrt-zeta, l<q>[.k], sqrt-l<q>[.k], l<q>^a/b.
    #[arg(long, default_value = "zeta", value_parser = check_family)]
    pub family: String,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    #[serde(serialize_with = "rational_text")]
    pub rho: Rational,
}

fn rational_text<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn rational_list<S: serde::Serializer>(r: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(r.iter().map(|v| v.to_string()))
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem1Args {
    /// Two families separated by a comma, e.g. zeta,l4.
    #[arg(long, default_value = "zeta,zeta", value_parser = check_pair)]
    pub pair: String,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 40.0)]
    pub t: f64,
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    #[serde(serialize_with = "rational_text")]
    pub rho1: Rational,
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    #[serde(serialize_with = "rational_text")]
    pub rho2: Rational,
    /// Run this many generated configurations over the standard pairs instead.
    #[arg(long)]
    pub configs: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct Corollary1Args {
    #[command(flatten)]
    pub point: PointArgs,
    /// Start of the continuation path for square-root families in sweep mode.
    #[arg(long, default_value_t = 10.0)]
    pub t_start: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem2Args {
    #[arg(long, default_value_t = 1)]
    pub q: u64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Comma-separated heights.
    #[arg(long, value_delimiter = ',', default_value = "40,80,160")]
    pub t: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DivisorArgs {
    #[arg(long, default_value_t = 100_000)]
    pub limit: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_parser = parse_claim)]
    #[serde(serialize_with = "claim_name")]
    pub claim: ClaimKind,
    /// Modulus of χ (claim default when omitted).
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    /// Lower end of the t range (X range for the real-s claim).
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Exponent of the t^ε factor.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
}

fn claim_name<S: serde::Serializer>(c: &ClaimKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(c.name())
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// One family, or two separated by a comma for a product breakdown.
    #[arg(long, default_value = "zeta", value_parser = check_families)]
    pub family: String,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub sigma: Vec<f64>,
    #[arg(long, default_value_t = 50.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = parse_rational)]
    #[serde(serialize_with = "rational_list")]
    pub rho: Vec<Rational>,
}

fn check_families(s: &str) -> Result<String, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() > 2 {
        return Err(format!("expected one or two families, got {}", parts.len()));
    }
    for part in parts {
        parse_family(part)?;
    }
    Ok(s.to_string())
}

fn check_family(s: &str) -> Result<String, String> {
    if s.contains(',') {
        return Err("expected a single family".into());
    }
    check_families(s)
}

fn check_pair(s: &str) -> Result<String, String> {
    if s.split(',').count() != 2 {
        return Err("expected two families separated by a comma".into());
    }
    check_families(s)
}

/// The two AFEs of a validated pair.
pub fn pair_specs(s: &str) -> Result<(AfeSpec, AfeSpec), String> {
    let (a, b) = s.split_once(',').ok_or("expected two families")?;
    Ok((parse_family(a)?, parse_family(b)?))
}

fn parse_branch(s: &str) -> Result<BranchMode, String> {
    s.parse().map_err(|e: afe_core::Error| e.to_string())
}

fn parse_claim(s: &str) -> Result<ClaimKind, String> {
    s.parse().map_err(|e: afe_core::Error| e.to_string())
}

/// "7/3", "2" or a terminating decimal such as "0.5".
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = format!("{whole}{frac}");
        let num: rug::Integer = digits.parse().map_err(|_| format!("not a number: {s:?}"))?;
        let den = rug::Integer::from(rug::Integer::u_pow_u(10, frac.len() as u32));
        return Ok(Rational::from((num, den)));
    }
    s.parse::<Rational>().map_err(|_| format!("not a rational: {s:?}"))
}

fn character(q: u64, index: usize) -> Result<Character, String> {
    if q == 1 {
        return Ok(characters::principal(1));
    }
    let prim = characters::primitive_characters(q);
    if prim.is_empty() {
        return Err(format!("no primitive character mod {q}"));
    }
    prim.get(index).cloned().ok_or_else(|| format!("mod {q} has {} primitive characters", prim.len()))
}

/// Parse a family name into its AFE.
pub fn parse_family(text: &str) -> Result<AfeSpec, String> {
    let text = text.trim().to_ascii_lowercase();
    let (base, alpha) = match text.split_once('^') {
        Some((b, a)) => (b.to_string(), parse_rational(a.trim_matches(|c| c == '(' || c == ')'))?),
        None => (text.clone(), Rational::from(1)),
    };
    let (base, alpha) = match base.strip_prefix("sqrt-") {
        Some(rest) => (rest.to_string(), alpha / 2u32),
        None => (base, alpha),
    };
    let chi = if base == "zeta" {
        characters::principal(1)
    } else if let Some(rest) = base.strip_prefix('l') {
        let (q, k) = match rest.split_once('.') {
            Some((q, k)) => (q, k.parse::<usize>().map_err(|_| format!("bad character index in {text:?}"))?),
            None => (rest, 0),
        };
        let q: u64 = q.parse().map_err(|_| format!("bad modulus in {text:?}"))?;
        character(q, k)?
    } else {
        return Err(format!("unknown family {text:?}"));
    };
    AfeSpec::power_family(alpha, &chi).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("7/3").unwrap(), Rational::from((7, 3)));
        assert_eq!(parse_rational("0.5").unwrap(), Rational::from((1, 2)));
        assert_eq!(parse_rational("2").unwrap(), Rational::from(2));
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn families() {
        assert_eq!(parse_family("zeta").unwrap().family().unwrap().0, &Rational::from(1));
        assert_eq!(parse_family("sqrt-zeta").unwrap().family().unwrap().0, &Rational::from((1, 2)));
        assert_eq!(parse_family("zeta^3").unwrap().family().unwrap().0, &Rational::from(3));
        let (alpha, chi) = parse_family("sqrt-l5.1").unwrap().family().map(|(a, c)| (a.clone(), c.clone())).unwrap();
        assert_eq!((alpha, chi.modulus()), (Rational::from((1, 2)), 5));
        assert!(parse_family("l6").is_err());
        assert!(parse_family("l5.9").is_err());
        assert!(parse_family("eta").is_err());
    }
}
