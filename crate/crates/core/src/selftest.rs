//! A quick invariant suite at reduced sizes, for smoke-testing a build.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    continuity_bound, half_indicator_symbol, invertibility_check, multiplier_necessity_witness, necessity_chain,
    neumann_inverse_apply, neumann_terms_for, power_iteration_lenient, PowerOptions,
};
use crate::error::Result;
use crate::gabor::{frame_operator_direct, stft, symbol_operator, GaborSystem, StftGrid, SymbolResolution};
use crate::lattice::{MultiIndex, PeriodMatrix, PhasePoint};
use crate::operator::{
    apply_oracle, apply_series, AnalyticSignal, CompiledOperator, HermiteAtom, LinearOperator, OperatorSpec, OracleOptions,
};
use crate::signal::{dft, tfs_apply, Direction, GridSpec};
use crate::symbol::{fourier_coefficients, partition_of_unity, periodize, random_symbol, GaussianWindow, PeriodicSymbol};
use crate::weights::PolynomialWeight;

pub const SELFTEST_SEED: u64 = 0x5e1f_7e57;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured discrepancy (or margin, for inequality checks).
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn check(name: &'static str, measured: f64, tolerance: f64) -> CheckResult {
    CheckResult { name, passed: measured <= tolerance, measured, tolerance }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity(grid: GridSpec) -> Result<CheckResult> {
    let p = PeriodicSymbol::constant(PeriodMatrix::identity(2), c(1.0, 0.0));
    let f = AnalyticSignal::Atom(HermiteAtom { order: 2, ..HermiteAtom::gaussian(0.3, -0.7, 1.1) }).sample(grid)?;
    let mut worst = 0.0f64;
    for tau in [0.0, 0.5, 1.0] {
        worst = worst.max(apply_series(&OperatorSpec::from_symbol(p.clone(), tau)?, &f)?.relative_distance(&f));
    }
    Ok(check("identity", worst, 1e-12))
}

fn series_vs_oracle(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let lattices = [PeriodMatrix::identity(2), PeriodMatrix::diagonal(&[2.0, 0.5])?];
    let mut worst = 0.0f64;
    for l in &lattices {
        let p = random_symbol(l, 2, 4, rng);
        let f = AnalyticSignal::Atom(HermiteAtom { order: 1, ..HermiteAtom::gaussian(0.2, 0.4, 0.9) });
        for tau in [0.0, 0.5, 1.0] {
            let series = apply_series(&OperatorSpec::from_symbol(p.clone(), tau)?, &f.sample(grid)?)?;
            let oracle = apply_oracle(&p, tau, &f, grid, OracleOptions::default())?;
            worst = worst.max(series.relative_distance(&oracle));
        }
    }
    Ok(check("series_vs_oracle", worst, 1e-7))
}

fn continuity(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..5 {
        let p = random_symbol(&PeriodMatrix::identity(2), 2, 5, rng);
        let bound = continuity_bound(&p, &PolynomialWeight::unit(), 1.0)?.bound;
        for tau in [0.0, 1.0] {
            let op = CompiledOperator::new(&OperatorSpec::from_symbol(p.clone(), tau)?, grid)?;
            let (estimate, _) = power_iteration_lenient(&op, PowerOptions { max_iterations: 200, ..PowerOptions::default() })?;
            worst = worst.max(estimate.norm - bound);
        }
    }
    Ok(check("continuity_bound", worst, 0.0))
}

/// Random symbol rescaled so that `Σ_{κ≠0} |c_κ| = ratio · |c₀|`.
pub fn symbol_with_ratio(lattice: &PeriodMatrix, radius: usize, terms: usize, ratio: f64, rng: &mut impl Rng) -> PeriodicSymbol {
    let zero = MultiIndex::zero(lattice.dim());
    let mut p = random_symbol(lattice, radius, terms, rng);
    let c0 = p.c0();
    let tail: f64 = p.iter().filter(|(k, _)| **k != zero).map(|(_, v)| v.norm()).sum();
    let phase = Complex64::cis(rng.random_range(0.0..2.0 * PI));
    p.insert(zero, phase * (tail / ratio) - c0).expect("matching dimension");
    p
}

fn inversion(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let p = symbol_with_ratio(&PeriodMatrix::identity(2), 2, 6, 0.4, rng);
    let f = AnalyticSignal::Atom(HermiteAtom::gaussian(-0.2, 0.3, 1.0)).sample(grid)?;
    let terms = neumann_terms_for(0.4, 1e-6) + 2;
    let out = neumann_inverse_apply(&OperatorSpec::from_symbol(p, 0.5)?, &f, terms)?;
    Ok(check("neumann_inverse", out.residual, 1e-6))
}

fn stft_checks(grid: GridSpec) -> Result<[CheckResult; 2]> {
    let g = GaussianWindow::new(1).sample(grid);
    let f = AnalyticSignal::Atom(HermiteAtom { order: 3, ..HermiteAtom::gaussian(0.5, -0.5, 1.2) }).sample(grid)?;
    let iso = stft(&f, &g, StftGrid::default())?.l2_norm();
    let expected = f.l2_norm() * g.l2_norm();
    let table = stft(&g, &g, StftGrid { time_stride: 2, freq_stride: 2 })?;
    let mut worst = 0.0f64;
    for (i, x) in table.times.iter().enumerate() {
        for (k, w) in table.freqs.iter().enumerate() {
            let exact = (-PI * (x[0] * x[0] + w[0] * w[0]) / 2.0).exp();
            worst = worst.max((table.get(i, k).norm() - exact).abs());
        }
    }
    Ok([check("stft_isometry", (iso - expected).abs() / expected, 1e-4), check("stft_gaussian", worst, 1e-8)])
}

fn periodization() -> Result<[CheckResult; 2]> {
    let l = PeriodMatrix::identity(1);
    let phi = |x: &[f64]| c((-PI * x[0] * x[0]).exp(), 0.0);
    let coeffs = fourier_coefficients(&periodize(phi, &l, 8).samples(32)?, 4)?;
    let worst = (-4..=4)
        .map(|k: i64| (coeffs.get(&MultiIndex(vec![k])) - c((-PI * (k * k) as f64).exp(), 0.0)).norm())
        .fold(0.0, f64::max);
    let pou = periodize(|x: &[f64]| c(partition_of_unity(x), 0.0), &l, 3);
    let pou_err = (0..97).map(|j| (pou.eval(&[j as f64 / 97.0]) - 1.0).norm()).fold(0.0, f64::max);
    Ok([check("periodization", worst, 1e-10), check("partition_of_unity", pou_err, 1e-12)])
}

fn tfs_algebra(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = AnalyticSignal::Atom(HermiteAtom::gaussian(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 1.0)).sample(grid)?;
        let z1 = PhasePoint::new(vec![rng.random_range(-2.0..2.0)], vec![rng.random_range(-2.0..2.0)]);
        let z2 = PhasePoint::new(vec![rng.random_range(-2.0..2.0)], vec![rng.random_range(-2.0..2.0)]);
        let a = tfs_apply(&tfs_apply(&f, &z2), &z1);
        let b = tfs_apply(&tfs_apply(&f, &z1), &z2).scale(Complex64::cis(2.0 * PI * (z2.x[0] * z1.omega[0] - z1.x[0] * z2.omega[0])));
        worst = worst.max(a.relative_distance(&b));
        let lhs = dft(&tfs_apply(&f, &z1), Direction::Forward);
        let zt = PhasePoint::new(vec![z1.omega[0]], vec![-z1.x[0]]);
        let rhs = tfs_apply(&dft(&f, Direction::Forward), &zt).scale(Complex64::cis(2.0 * PI * z1.x[0] * z1.omega[0]));
        worst = worst.max(lhs.relative_distance(&rhs));
    }
    Ok(check("tfs_algebra", worst, 1e-9))
}

fn gabor_identification(grid: GridSpec) -> Result<CheckResult> {
    let sys = GaborSystem::gaussian(grid, 0.5, 0.5, 8)?;
    let (_, op) = symbol_operator(&sys, SymbolResolution::default())?;
    let f = AnalyticSignal::Atom(HermiteAtom { order: 1, ..HermiteAtom::gaussian(0.4, 0.6, 1.0) }).sample(grid)?;
    Ok(check("gabor_identification", op.apply(&f).relative_distance(&frame_operator_direct(&sys, &f)), 1e-4))
}

fn necessity(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let p = PeriodMatrix::identity(1);
    let v = PolynomialWeight::new(1.0)?;
    let witness = multiplier_necessity_witness(&p, &v, grid)?;
    let sigma = random_symbol(&p, 3, 4, rng);
    let report = necessity_chain(&sigma, &witness, 1e-6)?;
    Ok(check("multiplier_necessity", report.rhs - 1e-6 - report.lhs, 0.0))
}

fn counterexample_growth() -> CheckResult {
    let sums: Vec<f64> = [4, 16, 64, 256].iter().map(|&h| half_indicator_symbol(h).ell1()).collect();
    let smallest_step = sums.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    check("counterexample_growth", 0.2 - smallest_step, 0.0)
}

fn criterion_consistency(rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let p = symbol_with_ratio(&PeriodMatrix::diagonal(&[2.0, 0.5])?, 2, 5, 0.4, rng);
    let report = invertibility_check(&p, &PolynomialWeight::unit(), 1.0)?;
    Ok(check("invertibility_ratio", (report.ratio - 0.4).abs(), 1e-12))
}

/// Runs every check; numerical refusals propagate as errors.
pub fn run() -> Result<SelftestReport> {
    let grid = GridSpec::new(1, 16.0, 256)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED);
    let mut checks = vec![
        identity(grid)?,
        series_vs_oracle(grid, &mut rng)?,
        continuity(grid, &mut rng)?,
        inversion(grid, &mut rng)?,
        criterion_consistency(&mut rng)?,
    ];
    checks.extend(stft_checks(grid)?);
    checks.extend(periodization()?);
    checks.push(tfs_algebra(grid, &mut rng)?);
    checks.push(gabor_identification(grid)?);
    checks.push(necessity(GridSpec::new(1, 16.0, 512)?, &mut rng)?);
    checks.push(counterexample_growth());
    let passed = checks.iter().all(|c| c.passed);
    Ok(SelftestReport { checks, passed })
}
