//! Continuity bounds, the invertibility criterion with its Neumann-series
//! inverse, operator norm estimation, and the Fourier multiplier apparatus.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{dual_point, symplectic_apply, MultiIndex, PeriodMatrix};
use crate::operator::{apply_multiplier, CompiledOperator, LinearOperator, MultiplierPath, OperatorSpec};
use crate::quadrature::integrate;
use crate::signal::{lp_m_norm, GridSignal, GridSpec};
use crate::symbol::{fourier_coefficients, PeriodCellSamples, PeriodicSymbol};
use crate::weights::{PolynomialWeight, Weight};

/// Inverse-norm bounds are refused when their denominator falls below this.
pub const MIN_DENOMINATOR: f64 = 1e-12;

/// `Σ_κ v(𝒥L⁻ᵀκ) |c_κ|`.
pub fn ell1_v_norm(p: &PeriodicSymbol, v: &PolynomialWeight) -> f64 {
    p.iter().map(|(k, c)| v.eval(&symplectic_apply(&dual_point(p.lattice(), k))) * c.norm()).sum()
}

/// The same norm summed over dual lattice points `μ`: `Σ_μ |p̂(μ)| v(𝒥μ)`.
pub fn ell1_v_norm_lattice(spectrum: &[(Vec<f64>, Complex64)], v: &PolynomialWeight) -> f64 {
    spectrum.iter().map(|(mu, c)| c.norm() * v.eval(&symplectic_apply(mu))).sum()
}

/// `‖Op_τ(p)‖ ≤ C ‖c(p)‖_{ℓ¹_v}`, optionally checked against a measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub ell1_v: f64,
    pub constant: f64,
    pub bound: f64,
    pub measured_norm: Option<f64>,
    /// `measured ≤ bound (1 + 1e-9)`; vacuously true when nothing was measured.
    pub pass: bool,
}

impl BoundReport {
    pub fn with_measurement(mut self, measured: f64) -> Self {
        self.measured_norm = Some(measured);
        self.pass = measured <= self.bound * (1.0 + 1e-9);
        self
    }
}

pub fn continuity_bound(p: &PeriodicSymbol, v: &PolynomialWeight, constant: f64) -> Result<BoundReport> {
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidParameter(format!("tfs constant must be positive, got {constant}")));
    }
    let ell1_v = ell1_v_norm(p, v);
    Ok(BoundReport { ell1_v, constant, bound: constant * ell1_v, measured_norm: None, pass: true })
}

/// Outcome of a power iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub norm: f64,
    pub iterations: usize,
}

/// Options for [`power_iteration`].
#[derive(Clone, Copy, Debug)]
pub struct PowerOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { max_iterations: 1000, tolerance: 1e-6, seed: 0x5eed }
    }
}

fn random_start(grid: GridSpec, seed: u64) -> GridSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = GridSignal::from_fn(grid, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let n = v.l2_norm();
    v.scale_in_place(Complex64::new(1.0 / n, 0.0));
    v
}

/// Largest singular value of `op` by power iteration on `A*A`, started from
/// a fixed-seed random vector. Stops when consecutive estimates of `‖Av‖`
/// agree to `tolerance` (relative).
pub fn power_iteration<A: LinearOperator + ?Sized>(op: &A, options: PowerOptions) -> Result<NormEstimate> {
    power_iteration_from(op, random_start(op.grid(), options.seed), options)
}

/// As [`power_iteration`] with a caller-chosen start vector.
pub fn power_iteration_from<A: LinearOperator + ?Sized>(op: &A, start: GridSignal, options: PowerOptions) -> Result<NormEstimate> {
    let n0 = start.l2_norm();
    if n0 == 0.0 {
        return Err(Error::InvalidParameter("power iteration needs a nonzero start vector".into()));
    }
    let mut v = start.scale(Complex64::new(1.0 / n0, 0.0));
    let mut previous = f64::NAN;
    let mut estimate = 0.0;
    for it in 1..=options.max_iterations {
        let w = op.apply(&v);
        estimate = w.l2_norm();
        if estimate == 0.0 {
            return Ok(NormEstimate { norm: 0.0, iterations: it });
        }
        if (estimate - previous).abs() <= options.tolerance * estimate {
            return Ok(NormEstimate { norm: estimate, iterations: it });
        }
        previous = estimate;
        let u = op.apply_adjoint(&w);
        let nu = u.l2_norm();
        if nu == 0.0 {
            return Ok(NormEstimate { norm: estimate, iterations: it });
        }
        v = u.scale(Complex64::new(1.0 / nu, 0.0));
    }
    Err(Error::NoConvergence { iterations: options.max_iterations, estimate })
}

/// As [`power_iteration`], but an unconverged run returns its last estimate
/// with `false` instead of failing. Every iterate `‖Av‖` with `‖v‖ = 1` is a
/// lower bound for `‖A‖`.
pub fn power_iteration_lenient<A: LinearOperator + ?Sized>(op: &A, options: PowerOptions) -> Result<(NormEstimate, bool)> {
    match power_iteration(op, options) {
        Ok(e) => Ok((e, true)),
        Err(Error::NoConvergence { iterations, estimate }) => Ok((NormEstimate { norm: estimate, iterations }, false)),
        Err(e) => Err(e),
    }
}

/// Discretised `L²` operator norm of `Op_τ(p)` on `grid`.
pub fn operator_norm_estimate(spec: &OperatorSpec, grid: GridSpec, iterations: usize) -> Result<f64> {
    if iterations < 10 {
        return Err(Error::InvalidParameter(format!("power iteration needs at least 10 iterations, got {iterations}")));
    }
    let op = CompiledOperator::new(spec, grid)?;
    Ok(power_iteration(&op, PowerOptions { max_iterations: iterations, ..PowerOptions::default() })?.norm)
}

/// `W Op W⁻¹` for a pointwise weight `W = m(t, 0)`; its `L²` norm is the
/// `L²_m` norm of `Op`.
pub struct WeightedOperator<'a, A: ?Sized> {
    inner: &'a A,
    weight: Vec<f64>,
}

impl<'a, A: LinearOperator + ?Sized> WeightedOperator<'a, A> {
    pub fn new<W: Weight + ?Sized>(inner: &'a A, m: &W) -> Self {
        let grid = inner.grid();
        let d = grid.dim;
        let mut z = vec![0.0; 2 * d];
        let weight = (0..grid.len())
            .map(|i| {
                z[..d].copy_from_slice(&grid.coords(i));
                m.eval(&z)
            })
            .collect();
        Self { inner, weight }
    }

    fn scale(&self, u: &GridSignal, inverse: bool) -> GridSignal {
        let mut out = u.clone();
        for (v, w) in out.values_mut().iter_mut().zip(&self.weight) {
            *v *= if inverse { 1.0 / w } else { *w };
        }
        out
    }
}

impl<A: LinearOperator + ?Sized> LinearOperator for WeightedOperator<'_, A> {
    fn grid(&self) -> GridSpec {
        self.inner.grid()
    }

    fn apply(&self, u: &GridSignal) -> GridSignal {
        self.scale(&self.inner.apply(&self.scale(u, true)), false)
    }

    fn apply_adjoint(&self, u: &GridSignal) -> GridSignal {
        self.scale(&self.inner.apply_adjoint(&self.scale(u, false)), true)
    }
}

/// `s·I − A`; for self-adjoint positive `A` and `s ≥ ‖A‖` its norm is
/// `s − λ_min(A)`.
pub struct ShiftedOperator<'a, A: ?Sized> {
    inner: &'a A,
    shift: f64,
}

impl<'a, A: LinearOperator + ?Sized> ShiftedOperator<'a, A> {
    pub fn new(inner: &'a A, shift: f64) -> Self {
        Self { inner, shift }
    }
}

impl<A: LinearOperator + ?Sized> LinearOperator for ShiftedOperator<'_, A> {
    fn grid(&self) -> GridSpec {
        self.inner.grid()
    }

    fn apply(&self, u: &GridSignal) -> GridSignal {
        let mut out = u.scale(Complex64::new(self.shift, 0.0));
        out.add_scaled(Complex64::new(-1.0, 0.0), &self.inner.apply(u));
        out
    }

    fn apply_adjoint(&self, u: &GridSignal) -> GridSignal {
        let mut out = u.scale(Complex64::new(self.shift, 0.0));
        out.add_scaled(Complex64::new(-1.0, 0.0), &self.inner.apply_adjoint(u));
        out
    }
}

/// Verdict of the invertibility criterion
/// `c₀ ≠ 0` and `Σ_{κ≠0} |c_κ| v(𝒥L⁻ᵀκ) < |c₀| / C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvertibilityReport {
    pub c0: Complex64,
    pub tail: f64,
    pub threshold: f64,
    pub constant: f64,
    pub ell1_v: f64,
    /// `C · tail / |c₀|`, the contraction factor of the Neumann series.
    pub ratio: f64,
    pub invertible: bool,
    pub inverse_norm_bound: Option<f64>,
}

pub fn invertibility_check(p: &PeriodicSymbol, v: &PolynomialWeight, constant: f64) -> Result<InvertibilityReport> {
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidParameter(format!("tfs constant must be positive, got {constant}")));
    }
    let zero = MultiIndex::zero(p.dim());
    let c0 = p.c0();
    let tail: f64 = p
        .iter()
        .filter(|(k, _)| **k != zero)
        .map(|(k, c)| c.norm() * v.eval(&symplectic_apply(&dual_point(p.lattice(), k))))
        .sum();
    let a0 = c0.norm();
    let threshold = a0 / constant;
    let invertible = a0 > 0.0 && tail < threshold;
    let ell1_v = ell1_v_norm(p, v);
    let ratio = if a0 > 0.0 { constant * tail / a0 } else { f64::INFINITY };
    let inverse_norm_bound = if invertible {
        let denominator = (1.0 + constant * v.eval(&vec![0.0; p.dim()])) * a0 - constant * ell1_v;
        (denominator >= MIN_DENOMINATOR).then(|| 1.0 / denominator)
    } else {
        None
    };
    Ok(InvertibilityReport { c0, tail, threshold, constant, ell1_v, ratio, invertible, inverse_norm_bound })
}

/// `(1/c₀) Σ_{j<n} (I − A/c₀)^j` applied matrix-free by Horner's rule
/// `r ← f + (I − A/c₀) r`.
pub struct NeumannInverse<'a, A: ?Sized> {
    op: &'a A,
    c0: Complex64,
    terms: usize,
}

impl<'a, A: LinearOperator + ?Sized> NeumannInverse<'a, A> {
    pub fn new(op: &'a A, c0: Complex64, terms: usize) -> Result<Self> {
        if c0 == Complex64::new(0.0, 0.0) || terms == 0 {
            return Err(Error::InvalidParameter("Neumann inverse needs c₀ ≠ 0 and at least one term".into()));
        }
        Ok(Self { op, c0, terms })
    }

    fn horner(&self, f: &GridSignal, c0: Complex64, adjoint: bool) -> GridSignal {
        let inv = 1.0 / c0;
        let mut r = f.clone();
        for _ in 1..self.terms {
            let ar = if adjoint { self.op.apply_adjoint(&r) } else { self.op.apply(&r) };
            r.add_scaled(-inv, &ar);
            r.add_scaled(Complex64::new(1.0, 0.0), f);
        }
        r.scale(inv)
    }
}

impl<A: LinearOperator + ?Sized> LinearOperator for NeumannInverse<'_, A> {
    fn grid(&self) -> GridSpec {
        self.op.grid()
    }

    fn apply(&self, u: &GridSignal) -> GridSignal {
        self.horner(u, self.c0, false)
    }

    fn apply_adjoint(&self, u: &GridSignal) -> GridSignal {
        self.horner(u, self.c0.conj(), true)
    }
}

/// Result of a Neumann inversion.
#[derive(Clone, Debug)]
pub struct NeumannOutcome {
    pub signal: GridSignal,
    pub terms: usize,
    /// `‖Op(result) − f‖₂ / ‖f‖₂`.
    pub residual: f64,
    pub report: InvertibilityReport,
}

/// Solves `Op_τ(p) u = f` with `terms` Neumann summands. Refuses when the
/// `L²` criterion (`C = 1`, `v ≡ 1`) fails.
pub fn neumann_inverse_apply(spec: &OperatorSpec, f: &GridSignal, terms: usize) -> Result<NeumannOutcome> {
    let report = invertibility_check(spec.symbol(), &PolynomialWeight::unit(), 1.0)?;
    if !report.invertible {
        return Err(Error::NotInvertible(Box::new(report)));
    }
    let op = CompiledOperator::new(spec, *f.spec())?;
    let inverse = NeumannInverse::new(&op, report.c0, terms)?;
    let signal = inverse.apply(f);
    let residual = op.apply(&signal).relative_distance(f);
    Ok(NeumannOutcome { signal, terms, residual, report })
}

/// Relative residuals after `1, …, max_terms` Neumann summands. After `n`
/// summands the residual is `‖(I − A/c₀)ⁿ f‖ / ‖f‖`.
pub fn neumann_residuals<A: LinearOperator + ?Sized>(op: &A, c0: Complex64, f: &GridSignal, max_terms: usize) -> Vec<f64> {
    let base = f.l2_norm();
    let mut e = f.clone();
    let inv = 1.0 / c0;
    (0..max_terms)
        .map(|_| {
            let ae = op.apply(&e);
            e.add_scaled(-inv, &ae);
            e.l2_norm() / base
        })
        .collect()
}

/// Number of Neumann terms that guarantee residual `≤ tol` at ratio `ρ`.
pub fn neumann_terms_for(ratio: f64, tol: f64) -> usize {
    if ratio <= 0.0 {
        return 1;
    }
    (tol.ln() / ratio.ln()).ceil().max(1.0) as usize
}

fn unit_bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let s = 2.0 * t - 1.0;
    (-1.0 / (1.0 - s * s)).exp()
}

/// `∫₀¹ e^{−1/(1−(2t−1)²)} dt`.
fn unit_bump_mass() -> f64 {
    integrate(|t| Complex64::new(unit_bump(t), 0.0), 0.0, 1.0, 1e-16, 200).expect("smooth integrand").value.re
}

/// Witness signal for the necessity direction of the multiplier criterion.
#[derive(Clone, Debug)]
pub struct MultiplierWitness {
    pub signal: GridSignal,
    pub lattice: PeriodMatrix,
    pub weight: PolynomialWeight,
    /// `‖ũ‖_{L¹_v}` on the grid.
    pub norm: f64,
    /// `sup_{𝒫₀} v`, over grid nodes in the support.
    pub support_sup_weight: f64,
    support: Vec<Vec<f64>>,
}

/// `ũ(x) = |det P| ψ(Pᵀx) / v(x)` with `ψ` a smooth non-negative bump on
/// `[0,1]ᵈ` of unit integral; `ũ` is supported in `𝒫₀ = P⁻ᵀ[0,1]ᵈ` and has
/// unit `L¹_v` norm.
pub fn multiplier_necessity_witness(p: &PeriodMatrix, v: &PolynomialWeight, grid: GridSpec) -> Result<MultiplierWitness> {
    if grid.dim != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: grid.dim });
    }
    let d = p.dim();
    let mass = unit_bump_mass().powi(d as i32);
    let det = p.volume();
    let mut support = Vec::new();
    let mut sup_weight = 0.0f64;
    let signal = GridSignal::from_fn(grid, |x| {
        let y: Vec<f64> = (0..d).map(|j| (0..d).map(|i| p.get(i, j) * x[i]).sum()).collect();
        let psi: f64 = y.iter().map(|&t| unit_bump(t)).product::<f64>() / mass;
        if psi > 0.0 {
            let vx = v.eval(x);
            support.push(x.to_vec());
            sup_weight = sup_weight.max(vx);
            Complex64::new(det * psi / vx, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let norm = lp_m_norm(&signal, 1.0, v)?;
    Ok(MultiplierWitness { signal, lattice: p.clone(), weight: *v, norm, support_sup_weight: sup_weight, support })
}

/// Both sides of the necessity chain
/// `‖σ(D)ũ‖_{L¹_v} ≥ (1/K) Σ_k |c_k| v(P⁻ᵀk)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessityReport {
    pub lhs: f64,
    pub weighted_sum: f64,
    pub k_constant: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `K = sup_{y ∈ 𝒫₀, k} v(P⁻ᵀk)/v(y − P⁻ᵀk) · sup_{𝒫₀} v`, with the suprema
/// taken over the grid nodes of the witness support.
pub fn necessity_chain(sigma: &PeriodicSymbol, witness: &MultiplierWitness, slack: f64) -> Result<NecessityReport> {
    if sigma.lattice() != &witness.lattice {
        return Err(Error::InvalidParameter("multiplier and witness use different period matrices".into()));
    }
    let v = &witness.weight;
    let image = apply_multiplier(sigma, &witness.signal, MultiplierPath::Translation)?;
    let lhs = lp_m_norm(&image, 1.0, v)?;
    let mut ratio_sup = 0.0f64;
    let mut weighted_sum = 0.0;
    for (k, c) in sigma.iter() {
        let mu = dual_point(sigma.lattice(), k);
        let vm = v.eval(&mu);
        weighted_sum += c.norm() * vm;
        for y in &witness.support {
            let diff: Vec<f64> = y.iter().zip(&mu).map(|(a, b)| a - b).collect();
            ratio_sup = ratio_sup.max(vm / v.eval(&diff));
        }
    }
    let k_constant = (ratio_sup * witness.support_sup_weight).max(f64::MIN_POSITIVE);
    let rhs = weighted_sum / k_constant;
    Ok(NecessityReport { lhs, weighted_sum, k_constant, rhs, holds: lhs >= rhs - slack })
}

/// Fourier coefficients of the indicator of `[0, 1/2)` on the unit period:
/// `c₀ = 1/2`, `c_h = 1/(πih)` for odd `h`, zero otherwise.
pub fn half_indicator_symbol(truncation: usize) -> PeriodicSymbol {
    let mut p = PeriodicSymbol::constant(PeriodMatrix::identity(1), Complex64::new(0.5, 0.0));
    for h in 1..=truncation as i64 {
        if h % 2 == 1 {
            for s in [h, -h] {
                let c = Complex64::new(0.0, -1.0 / (PI * s as f64));
                p.insert(MultiIndex(vec![s]), c).expect("one-dimensional index");
            }
        }
    }
    p
}

/// The fixed multiplier `σ(ω) = 1 − 0.6 i sin(2πω)` used by the
/// counterexample; `Σ|c_k(σ)| = 1.6`, `sup|σ| = √1.36`.
pub fn counterexample_multiplier() -> PeriodicSymbol {
    PeriodicSymbol::from_coefficients(
        PeriodMatrix::identity(1),
        [
            (MultiIndex(vec![-1]), Complex64::new(0.3, 0.0)),
            (MultiIndex(vec![0]), Complex64::new(1.0, 0.0)),
            (MultiIndex(vec![1]), Complex64::new(-0.3, 0.0)),
        ],
    )
    .expect("one-dimensional indices")
}

/// Settings for [`counterexample_demo`].
#[derive(Clone, Debug)]
pub struct CounterexampleOptions {
    pub truncations: Vec<usize>,
    pub grid: GridSpec,
    pub power: PowerOptions,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self {
            truncations: vec![4, 16, 64, 256],
            grid: GridSpec { dim: 1, extent: 8.0, points: 8192 },
            power: PowerOptions { max_iterations: 400, ..PowerOptions::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleRow {
    pub truncation: usize,
    pub partial_sum: f64,
    pub operator_norm: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub rows: Vec<CounterexampleRow>,
    /// `‖ν‖∞ Σ_k |c_k(σ)|`.
    pub factorized_bound: f64,
    pub sigma_sup: f64,
}

/// `p(x, ω) = ν(x) σ(ω)` with `ν` the indicator of `[0, 1/2)`: its
/// coefficient sums diverge logarithmically while `Op₀(p) = ν · σ(D)` stays
/// bounded.
pub fn counterexample_demo(options: &CounterexampleOptions) -> Result<CounterexampleReport> {
    let sigma = counterexample_multiplier();
    let mut rows = Vec::new();
    for &h in &options.truncations {
        let nu = half_indicator_symbol(h);
        let p = PeriodicSymbol::tensor(&nu, &sigma)?;
        let spec = OperatorSpec::from_symbol(p, 0.0)?;
        let op = CompiledOperator::new(&spec, options.grid)?;
        let (norm, iterations) = match power_iteration(&op, options.power) {
            Ok(e) => (e.norm, e.iterations),
            Err(Error::NoConvergence { iterations, estimate }) => (estimate, iterations),
            Err(e) => return Err(e),
        };
        rows.push(CounterexampleRow { truncation: h, partial_sum: nu.ell1(), operator_norm: norm, iterations });
    }
    Ok(CounterexampleReport { rows, factorized_bound: sigma.ell1(), sigma_sup: 1.36f64.sqrt() })
}

/// Coefficients of the sampled indicator (value `1/2` at the jumps), as a
/// cross-check of [`half_indicator_symbol`].
pub fn sampled_half_indicator(points: usize, truncation: usize) -> Result<PeriodicSymbol> {
    let samples = PeriodCellSamples::from_fn(PeriodMatrix::identity(1), points, |x| {
        let t = x[0];
        let v = if t == 0.0 || t == 0.5 {
            0.5
        } else if t < 0.5 {
            1.0
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    })?;
    fourier_coefficients(&samples, truncation)
}
