//! Short-time Fourier transform, modulation space norms and Gabor frames.
//!
//! The frame operator `S f = Σ_{h,k} (f, g_{h,k}) g_{h,k}` with
//! `g_{h,k} = M_{βk} T_{αh} g` is the Kohn–Nirenberg operator of the periodic
//! symbol built by [`crate::symbol::gabor_symbol`]. Inverting that symbol by
//! the Neumann series gives the canonical dual window whenever the
//! coefficient criterion certifies invertibility.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    invertibility_check, neumann_terms_for, power_iteration_lenient, InvertibilityReport, NeumannInverse, PowerOptions,
    ShiftedOperator,
};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_truncation, MultiIndex, PhasePoint};
use crate::operator::{CompiledOperator, LinearOperator, OperatorSpec};
use crate::signal::{dft, tfs_apply, translate, Direction, GridSignal, GridSpec};
use crate::symbol::{fourier_coefficients, gabor_symbol, GaussianWindow, PeriodicSymbol, SampledWindow, Window};
use crate::weights::{PolynomialWeight, Weight};

/// Gabor coefficients below this fraction of `|c₀|` are treated as rounding
/// noise and dropped before building the operator.
pub const RELATIVE_PRUNE: f64 = 1e-13;

/// Subsampling of the native time and frequency nodes on which the STFT is
/// tabulated. The default (1, 1) makes the isometry an exact Parseval
/// statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StftGrid {
    pub time_stride: usize,
    pub freq_stride: usize,
}

impl Default for StftGrid {
    fn default() -> Self {
        Self { time_stride: 1, freq_stride: 1 }
    }
}

/// `V_g f` on a product of time and frequency nodes, row-major `[time][freq]`.
#[derive(Clone, Debug)]
pub struct StftTable {
    pub times: Vec<Vec<f64>>,
    pub freqs: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
    /// Phase-space area represented by one table entry.
    pub cell: f64,
}

impl StftTable {
    pub fn get(&self, time: usize, freq: usize) -> Complex64 {
        self.values[time * self.freqs.len() + freq]
    }

    /// `‖V_g f‖_{L²(R^{2d})}` by Riemann sum.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell).sqrt()
    }
}

fn strided(spec: &GridSpec, stride: usize) -> Vec<usize> {
    (0..spec.len())
        .filter(|&i| {
            let mut rem = i;
            (0..spec.dim).all(|_| {
                let ok = (rem % spec.points) % stride == 0;
                rem /= spec.points;
                ok
            })
        })
        .collect()
}

/// `V_g f(x, ω) = (f, M_ω T_x g)`: one transform of `f · conj(T_x g)` per
/// time node.
pub fn stft(f: &GridSignal, g: &GridSignal, grid: StftGrid) -> Result<StftTable> {
    if g.max_abs() == 0.0 {
        return Err(Error::InvalidParameter("STFT window must be nonzero".into()));
    }
    if f.spec() != g.spec() {
        return Err(Error::InvalidParameter("signal and window must share a grid".into()));
    }
    if grid.time_stride == 0 || grid.freq_stride == 0 {
        return Err(Error::InvalidParameter("STFT strides must be positive".into()));
    }
    let spec = *f.spec();
    let fspec = spec.dual();
    let time_idx = strided(&spec, grid.time_stride);
    let freq_idx = strided(&fspec, grid.freq_stride);
    let rows: Vec<Vec<Complex64>> = time_idx
        .par_iter()
        .map(|&i| {
            let x = spec.coords(i);
            let window = translate(g, &x);
            let product = f.mul(&window.conj());
            let spectrum = dft(&product, Direction::Forward);
            freq_idx.iter().map(|&k| spectrum.values()[k]).collect()
        })
        .collect();
    let d = spec.dim as i32;
    let cell = (spec.spacing() * grid.time_stride as f64).powi(d) * (fspec.spacing() * grid.freq_stride as f64).powi(d);
    Ok(StftTable {
        times: time_idx.iter().map(|&i| spec.coords(i)).collect(),
        freqs: freq_idx.iter().map(|&k| fspec.coords(k)).collect(),
        values: rows.into_iter().flatten().collect(),
        cell,
    })
}

fn mixed_norm(values: impl Iterator<Item = f64>, p: f64, measure: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        (values.map(|v| v.powf(p)).sum::<f64>() * measure).powf(1.0 / p)
    }
}

/// `‖f‖_{M^{p,q}_m} = ‖ ‖m(x,ω) V_g f(x,ω)‖_{L^p_x} ‖_{L^q_ω}`.
pub fn modulation_norm<W: Weight + ?Sized>(f: &GridSignal, g: &GridSignal, p: f64, q: f64, m: &W, grid: StftGrid) -> Result<f64> {
    for e in [p, q] {
        if e.is_nan() || e < 1.0 {
            return Err(Error::InvalidParameter(format!("Lebesgue exponents must lie in [1, ∞], got {e}")));
        }
    }
    let table = stft(f, g, grid)?;
    let spec = f.spec();
    let fspec = spec.dual();
    let d = spec.dim as i32;
    let dx = (spec.spacing() * grid.time_stride as f64).powi(d);
    let dw = (fspec.spacing() * grid.freq_stride as f64).powi(d);
    let nf = table.freqs.len();
    let inner: Vec<f64> = (0..nf)
        .map(|k| {
            let w = &table.freqs[k];
            mixed_norm(
                table.times.iter().enumerate().map(|(i, x)| {
                    let z: Vec<f64> = x.iter().chain(w).copied().collect();
                    m.eval(&z) * table.get(i, k).norm()
                }),
                p,
                dx,
            )
        })
        .collect();
    Ok(mixed_norm(inner.into_iter(), q, dw))
}

/// Window used by a Gabor system: analytic Gaussian or sampled.
#[derive(Clone, Debug)]
pub enum GaborWindow {
    Gaussian(GaussianWindow),
    Sampled(SampledWindow),
}

impl Window for GaborWindow {
    fn dim(&self) -> usize {
        match self {
            Self::Gaussian(w) => w.dim(),
            Self::Sampled(w) => w.dim(),
        }
    }

    fn eval(&self, t: &[f64]) -> Complex64 {
        match self {
            Self::Gaussian(w) => w.eval(t),
            Self::Sampled(w) => w.eval(t),
        }
    }

    fn eval_hat(&self, w: &[f64]) -> Complex64 {
        match self {
            Self::Gaussian(g) => g.eval_hat(w),
            Self::Sampled(g) => g.eval_hat(w),
        }
    }
}

/// `{M_{βk} T_{αh} g : ‖h‖∞, ‖k‖∞ ≤ H}` on a fixed grid.
#[derive(Clone, Debug)]
pub struct GaborSystem {
    g: GridSignal,
    window: GaborWindow,
    alpha: f64,
    beta: f64,
    truncation: usize,
}

impl GaborSystem {
    /// A system with a sampled window; `ĝ` comes from the transform.
    pub fn new(g: GridSignal, alpha: f64, beta: f64, truncation: usize) -> Result<Self> {
        let window = GaborWindow::Sampled(SampledWindow::new(g.clone())?);
        Self::build(g, window, alpha, beta, truncation)
    }

    /// The unit Gaussian window `2^{d/4} e^{−π|t|²}`, with analytic `ĝ`.
    pub fn gaussian(grid: GridSpec, alpha: f64, beta: f64, truncation: usize) -> Result<Self> {
        let w = GaussianWindow::new(grid.dim);
        Self::build(w.sample(grid), GaborWindow::Gaussian(w), alpha, beta, truncation)
    }

    fn build(g: GridSignal, window: GaborWindow, alpha: f64, beta: f64, truncation: usize) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("lattice parameters must be positive, got α = {alpha}, β = {beta}")));
        }
        if g.l2_norm() == 0.0 {
            return Err(Error::InvalidParameter("window must be nonzero".into()));
        }
        let spec = g.spec();
        let h = truncation as f64;
        if alpha * h >= spec.extent / 2.0 || beta * h >= spec.nyquist() {
            return Err(Error::InvalidParameter(format!(
                "truncation {truncation} reaches past the torus (αH = {}, βH = {})",
                alpha * h,
                beta * h
            )));
        }
        Ok(Self { g, window, alpha, beta, truncation })
    }

    pub fn window(&self) -> &GridSignal {
        &self.g
    }

    pub fn analytic_window(&self) -> &GaborWindow {
        &self.window
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn grid(&self) -> GridSpec {
        *self.g.spec()
    }

    fn indices(&self) -> Vec<(MultiIndex, MultiIndex)> {
        let d = self.g.dim();
        let idx = enumerate_truncation(self.truncation, d);
        idx.iter().flat_map(|h| idx.iter().map(move |k| (h.clone(), k.clone()))).collect()
    }

    fn point(&self, h: &MultiIndex, k: &MultiIndex) -> PhasePoint {
        PhasePoint::new(
            h.0.iter().map(|&v| self.alpha * v as f64).collect(),
            k.0.iter().map(|&v| self.beta * v as f64).collect(),
        )
    }

    /// `M_{βk} T_{αh} γ` for every lattice point, in a fixed order.
    pub fn atoms_of(&self, gamma: &GridSignal) -> Vec<GridSignal> {
        self.indices().par_iter().map(|(h, k)| tfs_apply(gamma, &self.point(h, k))).collect()
    }
}

/// The frame operator with its atoms cached.
pub struct FrameOperator {
    grid: GridSpec,
    atoms: Vec<GridSignal>,
}

impl FrameOperator {
    pub fn new(sys: &GaborSystem) -> Self {
        Self { grid: sys.grid(), atoms: sys.atoms_of(sys.window()) }
    }

    /// `(f, g_{h,k})` in atom order.
    pub fn analysis(&self, f: &GridSignal) -> Vec<Complex64> {
        self.atoms.iter().map(|a| f.inner(a)).collect()
    }
}

impl LinearOperator for FrameOperator {
    fn grid(&self) -> GridSpec {
        self.grid
    }

    fn apply(&self, f: &GridSignal) -> GridSignal {
        let mut out = GridSignal::zeros(self.grid);
        for a in &self.atoms {
            out.add_scaled(f.inner(a), a);
        }
        out
    }

    fn apply_adjoint(&self, f: &GridSignal) -> GridSignal {
        self.apply(f)
    }
}

/// `S f = Σ_{‖h‖∞,‖k‖∞ ≤ H} (f, g_{h,k}) g_{h,k}` by direct summation.
pub fn frame_operator_direct(sys: &GaborSystem, f: &GridSignal) -> GridSignal {
    FrameOperator::new(sys).apply(f)
}

/// `Σ (f, g_{h,k}) γ_{h,k}`.
pub fn reconstruct(sys: &GaborSystem, gamma: &GridSignal, f: &GridSignal) -> GridSignal {
    let coefficients = FrameOperator::new(sys).analysis(f);
    let mut out = GridSignal::zeros(sys.grid());
    for (c, atom) in coefficients.iter().zip(sys.atoms_of(gamma)) {
        out.add_scaled(*c, &atom);
    }
    out
}

/// Resolution of the symbol extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolResolution {
    /// Samples per axis of the period cell.
    pub cell_points: usize,
    /// Coefficient box `‖κ‖∞ ≤ K`.
    pub coefficient_truncation: usize,
}

impl Default for SymbolResolution {
    fn default() -> Self {
        Self { cell_points: 32, coefficient_truncation: 12 }
    }
}

fn prune_relative(mut p: PeriodicSymbol) -> PeriodicSymbol {
    let floor = RELATIVE_PRUNE * p.c0().norm();
    p.prune(floor);
    p
}

/// Lattice Fourier coefficients of the Gabor symbol of `window`.
pub fn gabor_coefficients<W: Window + ?Sized>(window: &W, alpha: f64, beta: f64, truncation: usize, resolution: SymbolResolution) -> Result<PeriodicSymbol> {
    let samples = gabor_symbol(window, alpha, beta, truncation, resolution.cell_points)?;
    Ok(prune_relative(fourier_coefficients(&samples, resolution.coefficient_truncation)?))
}

/// `Op₀(a)` for the Gabor symbol `a` of the system.
pub fn symbol_operator(sys: &GaborSystem, resolution: SymbolResolution) -> Result<(PeriodicSymbol, CompiledOperator)> {
    let p = gabor_coefficients(&sys.window, sys.alpha, sys.beta, sys.truncation, resolution)?;
    let spec = OperatorSpec::new(p.clone(), 0.0, resolution.coefficient_truncation)?;
    let op = CompiledOperator::new(&spec, sys.grid())?;
    Ok((p, op))
}

/// Canonical dual window and its diagnostics.
#[derive(Clone, Debug)]
pub struct DualWindow {
    pub gamma: GridSignal,
    pub terms: usize,
    /// `‖Op₀(a) γ − g‖₂ / ‖g‖₂`, the residual of the inverted operator.
    pub residual: f64,
    /// `‖S γ − g‖₂ / ‖g‖₂` with the direct, truncated frame operator. Also
    /// carries the error of cutting the atom sum at `H`.
    pub frame_residual: f64,
    pub report: InvertibilityReport,
}

/// `γ = S⁻¹ g` through the Neumann series of the symbol form. Refuses
/// (criterion inconclusive) when the `L²` coefficient criterion fails.
/// `terms = None` picks enough terms for a `1e-10` series remainder.
pub fn dual_window(sys: &GaborSystem, terms: Option<usize>, resolution: SymbolResolution) -> Result<DualWindow> {
    let (p, op) = symbol_operator(sys, resolution)?;
    let report = invertibility_check(&p, &PolynomialWeight::unit(), 1.0)?;
    if !report.invertible {
        return Err(Error::NotInvertible(Box::new(report)));
    }
    let terms = terms.unwrap_or_else(|| neumann_terms_for(report.ratio, 1e-10) + 2);
    let gamma = NeumannInverse::new(&op, report.c0, terms)?.apply(sys.window());
    let residual = op.apply(&gamma).relative_distance(sys.window());
    let frame_residual = frame_operator_direct(sys, &gamma).relative_distance(sys.window());
    Ok(DualWindow { gamma, terms, residual, frame_residual, report })
}

/// Classification of a lattice `(α, β)` in a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    /// The coefficient criterion holds.
    Certified,
    /// The criterion fails but the estimated lower frame bound is clearly
    /// positive.
    NumericallyInvertible,
    Unresolved,
}

impl Zone {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Certified => "certified",
            Self::NumericallyInvertible => "numerically_invertible",
            Self::Unresolved => "unresolved",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub c0_abs: f64,
    pub tail: f64,
    pub certified: bool,
    pub upper_frame_bound: f64,
    pub lower_frame_bound: f64,
    pub converged: bool,
    pub zone: Zone,
}

/// Settings for [`scan`].
#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub extent: f64,
    pub points: usize,
    pub resolution: SymbolResolution,
    pub power: PowerOptions,
    /// The lower frame bound must exceed this fraction of the upper one for
    /// the numerically invertible zone.
    pub lower_fraction: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            extent: 16.0,
            points: 256,
            resolution: SymbolResolution::default(),
            power: PowerOptions { max_iterations: 2000, ..PowerOptions::default() },
            lower_fraction: 0.05,
        }
    }
}

/// Window-sum truncation adequate for the unit Gaussian at lattice `(α, β)`.
pub fn adaptive_truncation(alpha: f64, beta: f64) -> usize {
    (4.5 / alpha.min(beta)).ceil() as usize + 1
}

/// Criterion and frame bound estimates at one lattice point, for the unit
/// Gaussian window in `d = 1`. The torus extent is rounded up to a multiple
/// of `α` so the symbol's modulations lie on the frequency grid.
pub fn scan_point(alpha: f64, beta: f64, options: &ScanOptions) -> Result<ScanRow> {
    let window = GaussianWindow::new(1);
    let truncation = adaptive_truncation(alpha, beta);
    let p = gabor_coefficients(&window, alpha, beta, truncation, options.resolution)?;
    let report = invertibility_check(&p, &PolynomialWeight::unit(), 1.0)?;
    let extent = alpha * (options.extent / alpha).ceil();
    let grid = GridSpec::new(1, extent, options.points)?;
    let spec = OperatorSpec::new(p, 0.0, options.resolution.coefficient_truncation)?;
    let op = CompiledOperator::new(&spec, grid)?;
    let (top, converged_top) = power_iteration_lenient(&op, options.power)?;
    let upper = top.norm;
    let (gap, converged_gap) = power_iteration_lenient(&ShiftedOperator::new(&op, upper), options.power)?;
    let lower = upper - gap.norm;
    let converged = converged_top && converged_gap;
    let zone = if report.invertible {
        Zone::Certified
    } else if converged && lower > options.lower_fraction * upper {
        Zone::NumericallyInvertible
    } else {
        Zone::Unresolved
    };
    Ok(ScanRow {
        alpha,
        beta,
        c0_abs: report.c0.norm(),
        tail: report.tail,
        certified: report.invertible,
        upper_frame_bound: upper,
        lower_frame_bound: lower,
        converged,
        zone,
    })
}

/// Scans every `(α, β)` pair, row-major over `alphas`. Points run in
/// parallel; the output order is fixed.
pub fn scan(alphas: &[f64], betas: &[f64], options: &ScanOptions) -> Result<Vec<ScanRow>> {
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    pairs.par_iter().map(|&(a, b)| scan_point(a, b, options)).collect()
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::ModerateWeight;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> GridSpec {
        GridSpec::new(1, 16.0, 256).unwrap()
    }

    fn test_signal(grid: GridSpec) -> GridSignal {
        GridSignal::from_fn(grid, |t| {
            c((-PI * (t[0] - 0.4).powi(2)).exp(), 0.0) * Complex64::cis(2.0 * PI * 0.6 * t[0])
                + c(0.0, 0.5 * (-PI * 2.0 * (t[0] + 0.7).powi(2)).exp())
        })
    }

    #[test]
    fn stft_examples() {
        let g = GaussianWindow::new(1).sample(grid());
        let table = stft(&g, &g, StftGrid::default()).unwrap();
        let origin = table.times.iter().position(|x| x[0] == 0.0).unwrap();
        let zero = table.freqs.iter().position(|w| w[0] == 0.0).unwrap();
        assert!((table.get(origin, zero) - c(g.norm_sqr(), 0.0)).norm() < 1e-14);
        for (i, x) in table.times.iter().enumerate().step_by(7) {
            for (k, w) in table.freqs.iter().enumerate().step_by(5) {
                let exact = (-PI * (x[0] * x[0] + w[0] * w[0]) / 2.0).exp();
                assert!((table.get(i, k).norm() - exact).abs() < 1e-8);
            }
        }
        let f = test_signal(grid());
        let iso = stft(&f, &g, StftGrid::default()).unwrap().l2_norm();
        assert!((iso - f.l2_norm() * g.l2_norm()).abs() < 1e-4 * iso);
        assert!(stft(&f, &GridSignal::zeros(grid()), StftGrid::default()).is_err());
    }

    #[test]
    fn modulation_norm_examples() {
        let g = GaussianWindow::new(1).sample(grid());
        let one = ModerateWeight::constant();
        let coarse = StftGrid { time_stride: 2, freq_stride: 2 };
        assert_eq!(modulation_norm(&GridSignal::zeros(grid()), &g, 2.0, 2.0, &one, coarse).unwrap(), 0.0);
        let f = test_signal(grid());
        let m = modulation_norm(&f, &g, 2.0, 2.0, &one, StftGrid::default()).unwrap();
        assert!((m - f.l2_norm()).abs() < 1e-4 * m);
        assert!(modulation_norm(&f, &g, 0.5, 2.0, &one, coarse).is_err());
        let m2 = ModerateWeight::polynomial(2.0).unwrap();
        let v = PolynomialWeight::new(2.0).unwrap();
        let base = modulation_norm(&f, &g, 1.0, 2.0, &m2, coarse).unwrap();
        for z in [[1.0, 0.5], [-2.0, 1.5], [0.5, -2.5]] {
            let shifted = tfs_apply(&f, &PhasePoint::new(vec![z[0]], vec![z[1]]));
            let lhs = modulation_norm(&shifted, &g, 1.0, 2.0, &m2, coarse).unwrap();
            assert!(lhs <= m2.constant_bound() * v.eval(&z) * base);
        }
    }

    #[test]
    fn frame_operator_examples() {
        let sys = GaborSystem::gaussian(grid(), 0.5, 0.5, 6).unwrap();
        let f = test_signal(grid());
        let sf = frame_operator_direct(&sys, &f);
        let energy = sf.inner(&f);
        assert!(energy.re > 0.0 && energy.im.abs() < 1e-10);
        let h0 = GaborSystem::gaussian(grid(), 0.5, 0.5, 0).unwrap();
        let g = h0.window().clone();
        let rank_one = g.scale(f.inner(&g));
        assert!(frame_operator_direct(&h0, &f).relative_distance(&rank_one) < 1e-14);
        let f2 = GridSignal::from_fn(grid(), |t| c(0.0, (-PI * (t[0] + 0.2).powi(2)).exp()));
        let lhs = frame_operator_direct(&sys, &f).inner(&f2);
        let rhs = f.inner(&frame_operator_direct(&sys, &f2));
        assert!((lhs - rhs).norm() < 1e-10);
        assert!(GaborSystem::gaussian(grid(), 1.5, 0.5, 6).is_err());
    }

    #[test]
    fn frame_operator_commutes_with_lattice_shifts() {
        let sys = GaborSystem::gaussian(grid(), 0.5, 0.5, 8).unwrap();
        let f = test_signal(grid());
        let z = PhasePoint::new(vec![0.5], vec![-1.0]);
        let lhs = frame_operator_direct(&sys, &tfs_apply(&f, &z));
        let rhs = tfs_apply(&frame_operator_direct(&sys, &f), &z);
        assert!(lhs.relative_distance(&rhs) < 1e-6);
    }

    #[test]
    fn symbol_form_matches_frame_operator() {
        let sys = GaborSystem::gaussian(GridSpec::default_1d(), 0.5, 0.5, 8).unwrap();
        let (p, op) = symbol_operator(&sys, SymbolResolution::default()).unwrap();
        assert!((p.c0() - c(4.0, 0.0)).norm() < 1e-10);
        let f = test_signal(GridSpec::default_1d());
        let direct = frame_operator_direct(&sys, &f);
        assert!(op.apply(&f).relative_distance(&direct) < 1e-4);
    }

    #[test]
    fn dual_window_examples() {
        let spec = GridSpec::default_1d();
        let sys = GaborSystem::gaussian(spec, 0.5, 0.5, 8).unwrap();
        let dual = dual_window(&sys, None, SymbolResolution::default()).unwrap();
        assert!(dual.residual < 1e-9, "{}", dual.residual);
        assert!(dual.frame_residual < 1e-5, "{}", dual.frame_residual);
        let f = test_signal(spec);
        assert!(reconstruct(&sys, &dual.gamma, &f).relative_distance(&f) < 1e-5);
        let scaled = GaborSystem::new(sys.window().scale(c(2.0, 0.0)), 0.5, 0.5, 8).unwrap();
        let dual2 = dual_window(&scaled, None, SymbolResolution::default()).unwrap();
        assert!(dual2.gamma.relative_distance(&dual.gamma.scale(c(0.5, 0.0))) < 1e-8);
        let loose = GaborSystem::gaussian(spec, 1.2, 1.2, 5).unwrap();
        assert!(matches!(dual_window(&loose, None, SymbolResolution::default()), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn scan_point_zones() {
        let options = ScanOptions::default();
        let dense = scan_point(0.5, 0.5, &options).unwrap();
        assert_eq!(dense.zone, Zone::Certified);
        assert!((dense.c0_abs - 4.0).abs() < 1e-9);
        assert!(dense.lower_frame_bound > 0.0 && dense.lower_frame_bound <= dense.upper_frame_bound);
        let sparse = scan_point(1.2, 1.2, &options).unwrap();
        assert!(!sparse.certified);
        assert_eq!(linspace(0.3, 1.2, 10).len(), 10);
        assert!((linspace(0.3, 1.2, 10)[9] - 1.2).abs() < 1e-15);
    }
}
