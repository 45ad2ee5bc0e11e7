use std::sync::Arc;

use afe_core::afe::{AfeModel, AfeSpec, TruncBase, TruncPoint};
use afe_core::coeffs::CoeffSeq;
use afe_core::harness::{
    fit_bound, log_grid, product_sweep, remainder_sweep, sweep_claim, BoundClaim, ClaimKind, RemainderSample,
    SweepGrid, SAMPLE_CSV_HEADER,
};
use afe_core::hp::{HpComplex, Precision};
use afe_core::{special, zeta, Error, Result};
use rug::Rational;

fn p128() -> Precision {
    Precision::new(128).unwrap()
}

fn zeta_grid(points: usize) -> SweepGrid {
    SweepGrid { sigmas: vec![0.5], ts: log_grid(50.0, 2000.0, points), rhos: vec![Rational::from(1)] }
}

#[test]
fn zeta_sweep_has_one_sample_per_point() {
    let samples = remainder_sweep(&AfeSpec::zeta(), &zeta_grid(40), p128(), 0).unwrap();
    assert_eq!(samples.len(), 40);
    assert!(samples.windows(2).all(|w| w[0].t() < w[1].t()));
    assert!(samples.iter().all(|s| s.predictor > 0 && s.ratio.is_finite()));
}

#[test]
fn zeta_squared_sweep_has_breakdowns() {
    let rows = product_sweep(&AfeSpec::zeta(), &AfeSpec::zeta(), &zeta_grid(40), p128()).unwrap();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.passes()));
}

#[test]
fn empty_grid_gives_no_samples() {
    let grid = SweepGrid { sigmas: vec![0.5], ts: Vec::new(), rhos: vec![Rational::from(1)] };
    assert!(remainder_sweep(&AfeSpec::zeta(), &grid, p128(), 0).unwrap().is_empty());
}

struct ZetaModel;

impl AfeModel for ZetaModel {
    fn reference(&self, s: &HpComplex) -> Result<HpComplex> {
        zeta::riemann_zeta(s)
    }

    fn dual_factor(&self, s: &HpComplex) -> Result<HpComplex> {
        special::chi_factor(s)
    }

    fn trunc_product(&self, base: &TruncBase) -> Result<TruncPoint> {
        base.power(&Rational::from(1))
    }
}

#[test]
fn coefficient_shortage_reports_the_needed_length() {
    let spec = AfeSpec::custom(
        "short zeta",
        CoeffSeq::ones(10),
        CoeffSeq::ones(10),
        (Rational::from(1), Rational::new()),
        Arc::new(ZetaModel),
    );
    let err = remainder_sweep(&spec, &zeta_grid(3), p128(), 0).unwrap_err();
    assert!(matches!(err, Error::Length { available: 10, needed } if needed > 10), "{err:?}");
}

fn csv(samples: &[RemainderSample]) -> String {
    let digits = p128().decimal_digits();
    let mut out = String::from(SAMPLE_CSV_HEADER);
    for s in samples {
        out.push('\n');
        out.push_str(&s.csv_row(digits));
    }
    out
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let claim = BoundClaim::new(ClaimKind::Corollary5);
    let grid = log_grid(50.0, 400.0, 12);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| csv(&sweep_claim(&claim, 0.5, &grid, p128(), 3).unwrap()))
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn csv_rows_reload_losslessly() {
    let claim = BoundClaim::new(ClaimKind::Theorem2Tail);
    let digits = p128().decimal_digits();
    for sample in sweep_claim(&claim, 0.5, &log_grid(50.0, 200.0, 4), p128(), 1).unwrap() {
        let row = sample.csv_row(digits);
        let back = RemainderSample::from_csv_row(&row, p128()).unwrap();
        assert_eq!(back.csv_row(digits), row);
    }
}

#[test]
fn zeta_squared_at_the_symmetric_point_is_supported() {
    let claim = BoundClaim::new(ClaimKind::Corollary2);
    let (lo, hi) = claim.default_range();
    let samples = sweep_claim(&claim, 0.5, &log_grid(lo, hi, 24), p128(), 0).unwrap();
    let fit = fit_bound(&samples, &claim).unwrap();
    assert!(fit.passes(), "slope {}", fit.trend_slope);
}

#[test]
fn zeta_cubed_trend_is_not_increasing() {
    let claim = BoundClaim::new(ClaimKind::Corollary6I);
    let samples = sweep_claim(&claim, 0.5, &log_grid(100.0, 1500.0, 40), p128(), 0).unwrap();
    let fit = fit_bound(&samples, &claim).unwrap();
    assert!(fit.trend_slope <= 0.0, "slope {}", fit.trend_slope);
}

#[test]
fn epsilon_shifts_the_trend_by_its_change() {
    let base = BoundClaim::new(ClaimKind::Corollary6II);
    let grid = log_grid(50.0, 300.0, 10);
    let slope = |eps: f64| {
        let claim = base.clone().with_epsilon(eps);
        fit_bound(&sweep_claim(&claim, 0.5, &grid, p128(), 0).unwrap(), &claim).unwrap().trend_slope
    };
    let (a, b) = (slope(0.01), slope(0.1));
    assert!((a - b - 0.09).abs() < 1e-9, "{a} {b}");
}
