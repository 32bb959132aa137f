//! Acceptance suite. Runs ten criteria and prints one PASS/FAIL line each;
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use periodic_pdo::analysis::{
    continuity_bound, counterexample_demo, invertibility_check, multiplier_necessity_witness, necessity_chain,
    neumann_inverse_apply, power_iteration_lenient, CounterexampleOptions, NeumannInverse,
    PowerOptions, WeightedOperator,
};
use periodic_pdo::gabor::{
    dual_window, frame_operator_direct, linspace, reconstruct, scan, stft, symbol_operator, GaborSystem, ScanOptions,
    StftGrid, SymbolResolution,
};
use periodic_pdo::lattice::{dual_point, symplectic_transpose_apply};
use periodic_pdo::operator::{apply_oracle, apply_series, AnalyticSignal, HermiteAtom, OracleOptions};
use periodic_pdo::selftest::symbol_with_ratio;
use periodic_pdo::signal::{dft, tfs_apply, Direction};
use periodic_pdo::symbol::{fourier_coefficients, partition_of_unity, periodize, random_symbol, GaussianWindow};
use periodic_pdo::weights::{integer_grid_pairs, moderation_check, DEFAULT_MODERATION_RADIUS};
use periodic_pdo::{
    CompiledOperator, Complex64, GridSpec, LinearOperator, ModerateWeight, MultiIndex, OperatorSpec,
    PeriodMatrix, PeriodicSymbol, PhasePoint, PolynomialWeight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), periodic_pdo::Error>;

const TAUS: [f64; 3] = [0.0, 0.5, 1.0];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lattices() -> [PeriodMatrix; 3] {
    [
        PeriodMatrix::identity(2),
        PeriodMatrix::diagonal(&[2.0, 0.5]).unwrap(),
        PeriodMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap(),
    ]
}

fn random_atom(rng: &mut impl Rng, order: u32) -> AnalyticSignal {
    AnalyticSignal::Atom(HermiteAtom {
        center: rng.random_range(-1.0..1.0),
        modulation: rng.random_range(-1.0..1.0),
        scale: rng.random_range(0.7..1.4),
        order,
        amplitude: Complex64::cis(rng.random_range(0.0..2.0 * PI)),
    })
}

/// Series against the quadrature oracle.
fn criterion_1() -> Outcome {
    let grid = GridSpec::new(1, 24.0, 768)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lattices = lattices();
    let mut worst = 0.0f64;
    for i in 0..25 {
        let p = random_symbol(&lattices[i % 3], 3, 5, &mut rng);
        let f = if i % 5 == 4 {
            AnalyticSignal::Sum(vec![random_atom(&mut rng, 0), random_atom(&mut rng, 2)])
        } else {
            random_atom(&mut rng, (i % 4) as u32)
        };
        let samples = f.sample(grid)?;
        for tau in TAUS {
            let series = apply_series(&OperatorSpec::from_symbol(p.clone(), tau)?, &samples)?;
            let oracle = apply_oracle(&p, tau, &f, grid, OracleOptions::default())?;
            worst = worst.max(series.relative_distance(&oracle));
        }
    }
    Ok((worst <= 1e-7, format!("75 cases, max relative L2 discrepancy {worst:.3e} (tol 1e-7)")))
}

/// `p ≡ 1` is the identity.
fn criterion_2() -> Outcome {
    let grid = GridSpec::new(1, 16.0, 512)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for l in lattices() {
        let p = PeriodicSymbol::constant(l, c(1.0, 0.0));
        for order in 0..4 {
            let f = random_atom(&mut rng, order).sample(grid)?;
            for tau in TAUS {
                let out = apply_series(&OperatorSpec::from_symbol(p.clone(), tau)?, &f)?;
                worst = worst.max(out.relative_distance(&f));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max relative error {worst:.3e} (tol 1e-12)")))
}

fn lenient_norm(op: &dyn LinearOperator) -> Result<f64, periodic_pdo::Error> {
    Ok(power_iteration_lenient(op, PowerOptions { max_iterations: 300, ..PowerOptions::default() })?.0.norm)
}

/// Continuity bound on `L²` and on `L²_m`, `m = v₂`.
fn criterion_3() -> Outcome {
    let grid = GridSpec::new(1, 16.0, 512)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lattices = lattices();
    let unit = PolynomialWeight::unit();
    let m = ModerateWeight::polynomial(2.0)?;
    let v = m.reference();
    let mut violations = 0;
    let mut bound_mismatch = 0;
    let mut worst_ratio = 0.0f64;
    for i in 0..50 {
        let p = random_symbol(&lattices[i % 3], 3, 5, &mut rng);
        let bounds: Vec<f64> = TAUS
            .iter()
            .map(|&tau| Ok(continuity_bound(OperatorSpec::from_symbol(p.clone(), tau)?.symbol(), &unit, 1.0)?.bound))
            .collect::<Result<_, periodic_pdo::Error>>()?;
        if bounds.iter().any(|b| *b != bounds[0]) {
            bound_mismatch += 1;
        }
        for tau in TAUS {
            let op = CompiledOperator::new(&OperatorSpec::from_symbol(p.clone(), tau)?, grid)?;
            let norm = lenient_norm(&op)?;
            worst_ratio = worst_ratio.max(norm / bounds[0]);
            if norm > bounds[0] {
                violations += 1;
            }
        }
        // Weighted case on grid-aligned lattices: the weight ratio across a
        // shift is then exactly a ratio of node values.
        if i % 3 != 2 {
            let mut pairs = integer_grid_pairs(2, DEFAULT_MODERATION_RADIUS);
            for (k, _) in p.iter() {
                let mu = dual_point(p.lattice(), k);
                for t in grid.axis() {
                    pairs.push((vec![-mu[1], 0.0], vec![t + mu[1], 0.0]));
                }
            }
            let constant = moderation_check(&m, &pairs)?.max_ratio.max(1.0);
            let bound = continuity_bound(&p, &v, constant)?.bound;
            for tau in TAUS {
                let op = CompiledOperator::new(&OperatorSpec::from_symbol(p.clone(), tau)?, grid)?;
                let norm = lenient_norm(&WeightedOperator::new(&op, &m))?;
                worst_ratio = worst_ratio.max(norm / bound);
                if norm > bound {
                    violations += 1;
                }
            }
        }
    }
    Ok((
        violations == 0 && bound_mismatch == 0,
        format!("{violations} violations, {bound_mismatch} τ-dependent bounds, max norm/bound {worst_ratio:.4}"),
    ))
}

/// Neumann inversion at ratio 0.4.
fn criterion_4() -> Outcome {
    let grid = GridSpec::new(1, 16.0, 512)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lattices = lattices();
    let terms = ((1e-6f64).ln() / 0.4f64.ln()).ceil() as usize + 2;
    let mut worst_residual = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut verdict_mismatch = 0;
    for i in 0..20 {
        let p = symbol_with_ratio(&lattices[i % 3], 3, 5, 0.4, &mut rng);
        let f = random_atom(&mut rng, (i % 3) as u32).sample(grid)?;
        let mut verdicts = Vec::new();
        for tau in TAUS {
            let spec = OperatorSpec::from_symbol(p.clone(), tau)?;
            let report = invertibility_check(spec.symbol(), &PolynomialWeight::unit(), 1.0)?;
            verdicts.push(report.invertible);
            let out = neumann_inverse_apply(&spec, &f, terms)?;
            worst_residual = worst_residual.max(out.residual);
            if tau == 0.5 {
                let op = CompiledOperator::new(&spec, grid)?;
                let inverse = NeumannInverse::new(&op, report.c0, terms)?;
                let bound = report.inverse_norm_bound.expect("criterion holds");
                worst_excess = worst_excess.max(lenient_norm(&inverse)? - bound);
            }
        }
        if verdicts.iter().any(|v| !v) || verdicts.iter().any(|v| *v != verdicts[0]) {
            verdict_mismatch += 1;
        }
    }
    Ok((
        worst_residual <= 1e-6 && worst_excess <= 1e-6 && verdict_mismatch == 0,
        format!("{terms} terms: max residual {worst_residual:.3e}, max (‖inverse‖ − bound) {worst_excess:.3e}, {verdict_mismatch} verdict mismatches"),
    ))
}

/// Gabor frame operator as a periodic-symbol operator; dual windows; scan.
fn criterion_5() -> Outcome {
    let grid = GridSpec::new(1, 16.0, 512)?;
    let sys = GaborSystem::gaussian(grid, 0.5, 0.5, 8)?;
    let resolution = SymbolResolution { cell_points: 32, coefficient_truncation: 12 };
    let (_, op) = symbol_operator(&sys, resolution)?;
    let dual = dual_window(&sys, None, resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut identification = 0.0f64;
    let mut reconstruction = 0.0f64;
    for _ in 0..10 {
        let parts = (0..3)
            .map(|_| {
                AnalyticSignal::Atom(HermiteAtom {
                    center: rng.random_range(-1.5..1.5),
                    modulation: rng.random_range(-2.0..2.0),
                    scale: rng.random_range(0.8..1.25),
                    order: 0,
                    amplitude: Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI)),
                })
            })
            .collect();
        let f = AnalyticSignal::Sum(parts).sample(grid)?;
        identification = identification.max(op.apply(&f).relative_distance(&frame_operator_direct(&sys, &f)));
        reconstruction = reconstruction.max(reconstruct(&sys, &dual.gamma, &f).relative_distance(&f));
    }
    let axis = linspace(0.3, 1.2, 10);
    let rows = scan(&axis, &axis, &ScanOptions::default())?;
    let certified = |i: usize, j: usize| rows[i * axis.len() + j].certified;
    let count = rows.iter().filter(|r| r.certified).count();
    let mut monotone = true;
    for i in 0..axis.len() {
        for j in 0..axis.len() {
            if certified(i, j) && ((i > 0 && !certified(i - 1, j)) || (j > 0 && !certified(i, j - 1))) {
                monotone = false;
            }
        }
    }
    Ok((
        identification <= 1e-4 && reconstruction <= 1e-5 && count > 0 && monotone && certified(2, 2),
        format!(
            "‖Sf − Op₀(a)f‖ rel {identification:.3e}, reconstruction {reconstruction:.3e}, certified {count}/100, monotone {monotone}"
        ),
    ))
}

/// Multiplier necessity witness chain.
fn criterion_6() -> Outcome {
    let grid = GridSpec::new(1, 16.0, 4096)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for p in [PeriodMatrix::identity(1), PeriodMatrix::diagonal(&[2.0])?] {
        for s in [0.0, 1.0] {
            let v = PolynomialWeight::new(s)?;
            let witness = multiplier_necessity_witness(&p, &v, grid)?;
            for _ in 0..10 {
                let sigma = random_symbol(&p, 3, 4, &mut rng);
                let report = necessity_chain(&sigma, &witness, 1e-6)?;
                worst = worst.min(report.lhs - report.rhs);
                if !report.holds {
                    failures += 1;
                }
            }
        }
    }
    Ok((failures == 0, format!("40 chains, {failures} failures, min (lhs − rhs) {worst:.3e}")))
}

/// Divergent coefficient sums, bounded operator.
fn criterion_7() -> Outcome {
    let report = counterexample_demo(&CounterexampleOptions::default())?;
    let steps: Vec<f64> = report.rows.windows(2).map(|w| w[1].partial_sum - w[0].partial_sum).collect();
    let norms: Vec<f64> = report.rows.iter().map(|r| r.operator_norm).collect();
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().copied().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    let min_step = steps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((min_step >= 0.2 && spread < 0.01, format!("min partial-sum step {min_step:.4}, norm spread {:.3}%", 100.0 * spread)))
}

/// STFT isometry and Gaussian closed form.
fn criterion_8() -> Outcome {
    let grid = GridSpec::new(1, 16.0, 512)?;
    let g = GaussianWindow::new(1).sample(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut iso = 0.0f64;
    for order in 0..4 {
        let f = random_atom(&mut rng, order).sample(grid)?;
        let norm = stft(&f, &g, StftGrid::default())?.l2_norm();
        let expected = f.l2_norm() * g.l2_norm();
        iso = iso.max((norm - expected).abs() / expected);
    }
    let table = stft(&g, &g, StftGrid::default())?;
    let mut closed = 0.0f64;
    for (i, x) in table.times.iter().enumerate() {
        for (k, w) in table.freqs.iter().enumerate() {
            let exact = (-PI * (x[0] * x[0] + w[0] * w[0]) / 2.0).exp();
            closed = closed.max((table.get(i, k).norm() - exact).abs());
        }
    }
    Ok((iso <= 1e-4 && closed <= 1e-8, format!("isometry rel error {iso:.3e}, Gaussian max error {closed:.3e}")))
}

/// Periodization: coefficients equal samples of the transform.
fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    let gauss = |x: &[f64]| c((-PI * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0);
    for l in [PeriodMatrix::identity(1), PeriodMatrix::diagonal(&[1.5])?] {
        let coeffs = fourier_coefficients(&periodize(gauss, &l, 8).samples(48)?, 4)?;
        for k in -4..=4i64 {
            let xi = dual_point(&l, &MultiIndex(vec![k]))[0];
            let expected = (-PI * xi * xi).exp() / l.volume();
            worst = worst.max((coeffs.get(&MultiIndex(vec![k])) - expected).norm());
        }
    }
    let l2 = PeriodMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.2]])?;
    let coeffs = fourier_coefficients(&periodize(gauss, &l2, 6).samples(32)?, 4)?;
    for (k, value) in coeffs.iter() {
        let xi = dual_point(&l2, k);
        let expected = (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp() / l2.volume();
        worst = worst.max((value - expected).norm());
    }
    let pou = periodize(|x: &[f64]| c(partition_of_unity(x), 0.0), &PeriodMatrix::identity(1), 3);
    let pou_err = (0..1000).map(|j| (pou.eval(&[j as f64 / 1000.0 - 0.5]) - 1.0).norm()).fold(0.0, f64::max);
    Ok((worst <= 1e-10 && pou_err <= 1e-12, format!("coefficient max error {worst:.3e}, partition of unity {pou_err:.3e}")))
}

/// Time-frequency shift algebra.
fn criterion_10() -> Outcome {
    let grid = GridSpec::new(1, 16.0, 512)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut commutation = 0.0f64;
    let mut fourier = 0.0f64;
    for i in 0..100 {
        let f = random_atom(&mut rng, (i % 4) as u32).sample(grid)?;
        let mut z = || PhasePoint::new(vec![rng.random_range(-2.0..2.0)], vec![rng.random_range(-2.0..2.0)]);
        let (z1, z2) = (z(), z());
        let a = tfs_apply(&tfs_apply(&f, &z2), &z1);
        let sigma = z2.x[0] * z1.omega[0] - z1.x[0] * z2.omega[0];
        let b = tfs_apply(&tfs_apply(&f, &z1), &z2).scale(Complex64::cis(2.0 * PI * sigma));
        commutation = commutation.max(a.relative_distance(&b));
        let lhs = dft(&tfs_apply(&f, &z1), Direction::Forward);
        let zt = PhasePoint::from_slice(&symplectic_transpose_apply(&z1.to_vec()))?;
        let rhs = tfs_apply(&dft(&f, Direction::Forward), &zt).scale(Complex64::cis(2.0 * PI * z1.x[0] * z1.omega[0]));
        fourier = fourier.max(lhs.relative_distance(&rhs));
    }
    Ok((commutation <= 1e-9 && fourier <= 1e-9, format!("commutation {commutation:.3e}, Fourier image {fourier:.3e}")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("series vs quadrature oracle", criterion_1),
        ("identity symbol", criterion_2),
        ("continuity bound", criterion_3),
        ("Neumann invertibility", criterion_4),
        ("Gabor identification", criterion_5),
        ("multiplier necessity", criterion_6),
        ("counterexample", criterion_7),
        ("STFT isometry", criterion_8),
        ("periodization", criterion_9),
        ("tfs algebra", criterion_10),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<28} {}  {} [{:.1?}]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            detail,
            t.elapsed()
        );
    }
    println!("{} of 10 criteria passed in {:.1?}", 10 - failed, started.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
