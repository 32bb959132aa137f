//! The `τ`-quantization of periodic symbols.
//!
//! For `p = Σ c_κ e^{2πi⟨μ_κ, ·⟩}` with `μ_κ = L⁻ᵀκ = (μ₁, μ₂)` the operator
//! `Op_τ(p)` is the finite sum of time-frequency shifts
//!
//! ```text
//! Op_τ(p) u = Σ_κ c_κ e^{2πiτ μ₂·μ₁} π_{𝒥μ_κ} u,    π_{𝒥μ} = M_{μ₁} T_{−μ₂}.
//! ```
//!
//! [`apply_series`] evaluates this sum term by term. [`CompiledOperator`]
//! groups terms that share a translation and is what the iterative solvers
//! use. [`apply_oracle`] evaluates the defining double integral against the
//! analytic Fourier transform of a catalog signal and shares no code with
//! the series path.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{dual_point, split_components, symplectic_apply, MultiIndex, PeriodMatrix, PhasePoint};
use crate::quadrature::integrate_vector;
use crate::signal::{dft, modulation_factor, tfs_apply, translate, wrap_fraction, Direction, GridSignal, GridSpec};
use crate::symbol::PeriodicSymbol;

/// Modulations above this fraction of the Nyquist frequency are refused.
pub const ALIASING_FRACTION: f64 = 0.8;

/// A symbol together with the quantization parameter and coefficient box.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    symbol: PeriodicSymbol,
    tau: f64,
    truncation: usize,
}

impl OperatorSpec {
    pub fn new(symbol: PeriodicSymbol, tau: f64, truncation: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidParameter(format!("τ must lie in [0, 1], got {tau}")));
        }
        if symbol.dim() % 2 != 0 {
            return Err(Error::InvalidParameter("phase-space symbols need an even-dimensional period matrix".into()));
        }
        if symbol.support_radius() > truncation {
            return Err(Error::InvalidParameter(format!(
                "truncation {truncation} does not cover the symbol support (radius {})",
                symbol.support_radius()
            )));
        }
        Ok(Self { symbol, tau, truncation })
    }

    /// Uses the support radius of the symbol as truncation.
    pub fn from_symbol(symbol: PeriodicSymbol, tau: f64) -> Result<Self> {
        let k = symbol.support_radius();
        Self::new(symbol, tau, k)
    }

    pub fn symbol(&self) -> &PeriodicSymbol {
        &self.symbol
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.symbol.clone(), tau, self.truncation)
    }

    /// Spatial dimension `d`.
    pub fn signal_dim(&self) -> usize {
        self.symbol.dim() / 2
    }

    fn active(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        let k = self.truncation as u64;
        self.symbol.iter().filter(move |(kappa, _)| kappa.sup_norm() <= k)
    }

    /// Largest `|I₁μ|∞` over the stored coefficients within the box.
    pub fn max_modulation(&self) -> f64 {
        let d = self.signal_dim();
        self.active()
            .map(|(k, _)| dual_point(self.symbol.lattice(), k)[..d].iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .fold(0.0, f64::max)
    }

    /// Largest `|I₂μ|∞` over the stored coefficients within the box.
    pub fn max_translation(&self) -> f64 {
        let d = self.signal_dim();
        self.active()
            .map(|(k, _)| dual_point(self.symbol.lattice(), k)[d..].iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .fold(0.0, f64::max)
    }
}

fn phase_of(mu: &[f64], tau: f64) -> Complex64 {
    let d = mu.len() / 2;
    let inner: f64 = mu[d..].iter().zip(&mu[..d]).map(|(a, b)| a * b).sum();
    Complex64::cis(2.0 * PI * tau * inner)
}

/// `e^{2πiτ⟨I₂L⁻ᵀκ, I₁L⁻ᵀκ⟩}`.
pub fn phase_factor(kappa: &MultiIndex, tau: f64, lattice: &PeriodMatrix) -> Complex64 {
    let mu = dual_point(lattice, kappa);
    let (mu1, mu2) = split_components(&mu).expect("phase-space lattice has even dimension");
    let inner: f64 = mu2.iter().zip(&mu1).map(|(a, b)| a * b).sum();
    Complex64::cis(2.0 * PI * tau * inner)
}

fn check_grid(spec: &OperatorSpec, grid: &GridSpec) -> Result<()> {
    if grid.dim != spec.signal_dim() {
        return Err(Error::DimensionMismatch { expected: spec.signal_dim(), found: grid.dim });
    }
    let limit = ALIASING_FRACTION * grid.nyquist();
    let top = spec.max_modulation();
    if top > limit {
        return Err(Error::Aliasing { frequency: top, limit });
    }
    Ok(())
}

/// Per-application diagnostics: modulation headroom and torus wrap-around.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SeriesDiagnostics {
    pub max_modulation: f64,
    pub aliasing_limit: f64,
    /// `1 − max_modulation / aliasing_limit`.
    pub aliasing_margin: f64,
    /// Largest energy fraction of `f` carried across the seam by any term.
    pub max_wrap_fraction: f64,
}

pub fn diagnostics(spec: &OperatorSpec, f: &GridSignal) -> SeriesDiagnostics {
    let d = spec.signal_dim();
    let limit = ALIASING_FRACTION * f.spec().nyquist();
    let top = spec.max_modulation();
    let wrap = spec
        .active()
        .map(|(k, _)| {
            let mu = dual_point(spec.symbol.lattice(), k);
            let shift: Vec<f64> = mu[d..].iter().map(|v| -v).collect();
            wrap_fraction(f, &shift)
        })
        .fold(0.0, f64::max);
    SeriesDiagnostics { max_modulation: top, aliasing_limit: limit, aliasing_margin: 1.0 - top / limit, max_wrap_fraction: wrap }
}

/// `Σ_κ c_κ · phase_factor(κ, τ, L) · π_{𝒥L⁻ᵀκ} f`, summed in ring order.
pub fn apply_series(spec: &OperatorSpec, f: &GridSignal) -> Result<GridSignal> {
    check_grid(spec, f.spec())?;
    let lattice = spec.symbol.lattice();
    let d = spec.signal_dim();
    let mut out = GridSignal::zeros(*f.spec());
    for (kappa, c) in spec.active() {
        let mu = dual_point(lattice, kappa);
        let weight = c * phase_of(&mu, spec.tau);
        let z = PhasePoint::new(mu[d..].iter().map(|v| -v).collect(), mu[..d].to_vec());
        out.add_scaled(weight, &tfs_apply(f, &z));
    }
    Ok(out)
}

/// Dual lattice form `Σ_{μ ∈ Λ⊥} p̂(μ) e^{2πiτ⟨I₂μ, I₁μ⟩} π_{𝒥μ} f`, with the
/// same term order as [`apply_series`].
pub fn apply_series_lattice(spec: &OperatorSpec, f: &GridSignal) -> Result<GridSignal> {
    check_grid(spec, f.spec())?;
    let d = spec.signal_dim();
    let mut out = GridSignal::zeros(*f.spec());
    for (mu, p_hat) in lattice_expansion(spec) {
        let jmu = symplectic_apply(&mu);
        let z = PhasePoint::new(jmu[..d].to_vec(), jmu[d..].to_vec());
        out.add_scaled(p_hat * phase_of(&mu, spec.tau), &tfs_apply(f, &z));
    }
    Ok(out)
}

/// The symbol's spectrum as `(μ, p̂(μ))` pairs on the dual lattice.
pub fn lattice_expansion(spec: &OperatorSpec) -> Vec<(Vec<f64>, Complex64)> {
    spec.active().map(|(k, c)| (dual_point(spec.symbol.lattice(), k), *c)).collect()
}

/// The two evaluation routes of a Fourier multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierPath {
    /// `Σ_k c_k T_{−P⁻ᵀk} u`.
    Translation,
    /// `𝓕⁻¹(σ û)`.
    Frequency,
}

/// `σ(D) u` for a multiplier symbol `σ` periodic with respect to `P ∈ GL(d)`.
pub fn apply_multiplier(sigma: &PeriodicSymbol, u: &GridSignal, path: MultiplierPath) -> Result<GridSignal> {
    if sigma.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: sigma.dim() });
    }
    match path {
        MultiplierPath::Translation => {
            let mut out = GridSignal::zeros(*u.spec());
            for (k, c) in sigma.iter() {
                let shift: Vec<f64> = dual_point(sigma.lattice(), k).iter().map(|v| -v).collect();
                out.add_scaled(*c, &translate(u, &shift));
            }
            Ok(out)
        }
        MultiplierPath::Frequency => {
            let mut spectrum = dft(u, Direction::Forward);
            let fspec = *spectrum.spec();
            for (i, v) in spectrum.values_mut().iter_mut().enumerate() {
                *v *= sigma.synthesize(&fspec.coords(i));
            }
            let mut out = dft(&spectrum, Direction::Inverse);
            // The double transform returns to the original grid up to rounding of the extent.
            out = GridSignal::new(*u.spec(), out.into_values())?;
            Ok(out)
        }
    }
}

/// A matrix-free linear operator on signals of a fixed grid.
pub trait LinearOperator: Sync {
    fn grid(&self) -> GridSpec;
    fn apply(&self, u: &GridSignal) -> GridSignal;
    fn apply_adjoint(&self, u: &GridSignal) -> GridSignal;
}

#[derive(Clone, Debug)]
struct ShiftGroup {
    shift: Vec<f64>,
    multiplier: Vec<Complex64>,
}

/// `Op_τ(p)` on a fixed grid, with terms sharing a translation `I₂μ` merged
/// into a single pointwise multiplier:
/// `Op u = Σ_groups m_g · T_{−μ₂} u`.
#[derive(Clone, Debug)]
pub struct CompiledOperator {
    grid: GridSpec,
    groups: Vec<ShiftGroup>,
}

impl CompiledOperator {
    pub fn new(spec: &OperatorSpec, grid: GridSpec) -> Result<Self> {
        check_grid(spec, &grid)?;
        let d = spec.signal_dim();
        let mut groups: Vec<ShiftGroup> = Vec::new();
        for (kappa, c) in spec.active() {
            let mu = dual_point(spec.symbol.lattice(), kappa);
            let shift: Vec<f64> = mu[d..].iter().map(|v| -v).collect();
            let weight = c * phase_of(&mu, spec.tau);
            let factor = modulation_factor(&grid, &mu[..d]);
            let slot = match groups.iter().position(|g| g.shift == shift) {
                Some(i) => i,
                None => {
                    groups.push(ShiftGroup { shift, multiplier: vec![Complex64::new(0.0, 0.0); grid.len()] });
                    groups.len() - 1
                }
            };
            for (m, e) in groups[slot].multiplier.iter_mut().zip(factor.values()) {
                *m += weight * e;
            }
        }
        Ok(Self { grid, groups })
    }

    /// A Fourier multiplier `σ(D)` as a compiled operator.
    pub fn multiplier(sigma: &PeriodicSymbol, grid: GridSpec) -> Result<Self> {
        if sigma.dim() != grid.dim {
            return Err(Error::DimensionMismatch { expected: grid.dim, found: sigma.dim() });
        }
        let groups = sigma
            .iter()
            .map(|(k, c)| ShiftGroup {
                shift: dual_point(sigma.lattice(), k).iter().map(|v| -v).collect(),
                multiplier: vec![*c; grid.len()],
            })
            .collect();
        Ok(Self { grid, groups })
    }

    /// Number of distinct translations.
    pub fn groups(&self) -> usize {
        self.groups.len()
    }
}

impl LinearOperator for CompiledOperator {
    fn grid(&self) -> GridSpec {
        self.grid
    }

    fn apply(&self, u: &GridSignal) -> GridSignal {
        let mut out = GridSignal::zeros(self.grid);
        for g in &self.groups {
            let moved = translate(u, &g.shift);
            for ((o, m), v) in out.values_mut().iter_mut().zip(&g.multiplier).zip(moved.values()) {
                *o += m * v;
            }
        }
        out
    }

    fn apply_adjoint(&self, u: &GridSignal) -> GridSignal {
        let mut out = GridSignal::zeros(self.grid);
        for g in &self.groups {
            let mut weighted = u.clone();
            for (w, m) in weighted.values_mut().iter_mut().zip(&g.multiplier) {
                *w *= m.conj();
            }
            let back: Vec<f64> = g.shift.iter().map(|v| -v).collect();
            out.add_scaled(Complex64::new(1.0, 0.0), &translate(&weighted, &back));
        }
        out
    }
}

/// Term-wise adjoint of the series: each `c·phase·π_z` contributes
/// `conj(c·phase) e^{−2πi x·ω} π_{−z}`.
pub fn apply_series_adjoint(spec: &OperatorSpec, f: &GridSignal) -> Result<GridSignal> {
    check_grid(spec, f.spec())?;
    let d = spec.signal_dim();
    let mut out = GridSignal::zeros(*f.spec());
    for (kappa, c) in spec.active() {
        let mu = dual_point(spec.symbol.lattice(), kappa);
        let x: Vec<f64> = mu[d..].iter().map(|v| -v).collect();
        let omega = &mu[..d];
        let xw: f64 = x.iter().zip(omega).map(|(a, b)| a * b).sum();
        let weight = (c * phase_of(&mu, spec.tau)).conj() * Complex64::cis(-2.0 * PI * xw);
        let z = PhasePoint::new(x.iter().map(|v| -v).collect(), omega.iter().map(|v| -v).collect());
        out.add_scaled(weight, &tfs_apply(f, &z));
    }
    Ok(out)
}

/// A Hermite–Gaussian atom
/// `f(t) = A e^{2πi b·t} Π_a H_{n}(√(2π)(t_a − c_a)/s) e^{−π|t − c|²/s²}`
/// (one-dimensional factor repeated per axis; `H_n` physicists' Hermite).
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteAtom {
    pub center: f64,
    pub modulation: f64,
    pub scale: f64,
    pub order: u32,
    pub amplitude: Complex64,
}

/// Test signals with closed-form Fourier transforms, used by the oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticSignal {
    Atom(HermiteAtom),
    /// `A e^{2πi ξ t}`.
    Exponential { frequency: f64, amplitude: Complex64 },
    Sum(Vec<AnalyticSignal>),
}

fn hermite(n: u32, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * u);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * u * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `h_n(t) = H_n(√(2π) t) e^{−πt²}`, an eigenfunction of the Fourier
/// transform with eigenvalue `(−i)ⁿ`.
fn hermite_function(n: u32, t: f64) -> f64 {
    hermite(n, (2.0 * PI).sqrt() * t) * (-PI * t * t).exp()
}

fn minus_i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

impl HermiteAtom {
    pub fn gaussian(center: f64, modulation: f64, scale: f64) -> Self {
        Self { center, modulation, scale, order: 0, amplitude: Complex64::new(1.0, 0.0) }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.amplitude * Complex64::cis(2.0 * PI * self.modulation * t) * hermite_function(self.order, (t - self.center) / self.scale)
    }

    /// `f̂(ω) = A s e^{−2πi c(ω−b)} (−i)ⁿ h_n(s(ω − b))`.
    pub fn eval_hat(&self, w: f64) -> Complex64 {
        let v = w - self.modulation;
        self.amplitude
            * self.scale
            * Complex64::cis(-2.0 * PI * self.center * v)
            * minus_i_pow(self.order)
            * hermite_function(self.order, self.scale * v)
    }

    /// Interval outside which `|f̂|` is below double precision relative to its peak.
    fn spectral_window(&self) -> (f64, f64) {
        let half = (6.0 + 0.5 * self.order as f64) / self.scale;
        (self.modulation - half, self.modulation + half)
    }
}

impl AnalyticSignal {
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Self::Atom(a) => a.eval(t),
            Self::Exponential { frequency, amplitude } => amplitude * Complex64::cis(2.0 * PI * frequency * t),
            Self::Sum(parts) => parts.iter().map(|p| p.eval(t)).sum(),
        }
    }

    /// Samples on a one-dimensional grid.
    pub fn sample(&self, grid: GridSpec) -> Result<GridSignal> {
        if grid.dim != 1 {
            return Err(Error::InvalidParameter("analytic catalog signals are one-dimensional".into()));
        }
        Ok(GridSignal::from_fn(grid, |t| self.eval(t[0])))
    }
}

/// Tolerance settings for [`apply_oracle`].
#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Absolute error budget for each `ω`-integral.
    pub tolerance: f64,
    /// Initial panels per oscillation period of the integrand.
    pub panels_per_cycle: f64,
    pub max_depth: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { tolerance: 1e-11, panels_per_cycle: 2.0, max_depth: 12 }
    }
}

/// Evaluates `Op_τ(p) f` on the nodes of `grid` from the defining integral.
///
/// Each exponential `e^{2πi⟨μ, ·⟩}` of the symbol contributes
/// `e^{2πi(1−τ)μ₁x} ∫ e^{2πi(x+μ₂)ω} f̂(ω − τμ₁) dω`, integrated by adaptive
/// Gauss–Kronrod against the analytic `f̂`. Exponential inputs are handled in
/// closed form. Only `d = 1` is supported.
pub fn apply_oracle(symbol: &PeriodicSymbol, tau: f64, f: &AnalyticSignal, grid: GridSpec, options: OracleOptions) -> Result<GridSignal> {
    if symbol.dim() != 2 || grid.dim != 1 {
        return Err(Error::InvalidParameter("the quadrature oracle handles d = 1 only".into()));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("τ must lie in [0, 1], got {tau}")));
    }
    let xs = grid.axis();
    let mut out = vec![Complex64::new(0.0, 0.0); xs.len()];
    for (kappa, c) in symbol.iter() {
        let l = symbol.lattice();
        let k = [kappa.0[0] as f64, kappa.0[1] as f64];
        let lit = l.inverse_transpose();
        let mu1 = lit[0] * k[0] + lit[1] * k[1];
        let mu2 = lit[2] * k[0] + lit[3] * k[1];
        let term = oracle_term(mu1, mu2, tau, f, &xs, grid.spacing(), options)?;
        for (o, t) in out.iter_mut().zip(term) {
            *o += c * t;
        }
    }
    GridSignal::new(grid, out)
}

fn oracle_term(mu1: f64, mu2: f64, tau: f64, f: &AnalyticSignal, xs: &[f64], dx: f64, options: OracleOptions) -> Result<Vec<Complex64>> {
    match f {
        AnalyticSignal::Sum(parts) => {
            let mut acc = vec![Complex64::new(0.0, 0.0); xs.len()];
            for p in parts {
                for (a, v) in acc.iter_mut().zip(oracle_term(mu1, mu2, tau, p, xs, dx, options)?) {
                    *a += v;
                }
            }
            Ok(acc)
        }
        AnalyticSignal::Exponential { frequency, amplitude } => {
            // f̂ = A δ(· − ξ): the ω-integral collapses at ω = ξ + τμ₁.
            let w = frequency + tau * mu1;
            Ok(xs
                .iter()
                .map(|&x| amplitude * Complex64::cis(2.0 * PI * ((1.0 - tau) * mu1 * x + (x + mu2) * w)))
                .collect())
        }
        AnalyticSignal::Atom(atom) => {
            let (lo, hi) = atom.spectral_window();
            let (lo, hi) = (lo + tau * mu1, hi + tau * mu1);
            let reach = xs.iter().map(|x| (x + mu2).abs()).fold(0.0, f64::max).max(1.0);
            let panels = ((hi - lo) * reach * options.panels_per_cycle).ceil() as usize;
            let x0 = xs[0] + mu2;
            let n = xs.len();
            let (integral, _) = integrate_vector(
                |w, out| {
                    let fh = atom.eval_hat(w - tau * mu1);
                    let mut e = fh * Complex64::cis(2.0 * PI * x0 * w);
                    let step = Complex64::cis(2.0 * PI * dx * w);
                    for o in out.iter_mut().take(n) {
                        *o = e;
                        e *= step;
                    }
                },
                n,
                lo,
                hi,
                panels,
                options.tolerance,
                options.max_depth,
            )?;
            Ok(xs
                .iter()
                .zip(integral)
                .map(|(&x, v)| Complex64::cis(2.0 * PI * (1.0 - tau) * mu1 * x) * v)
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::random_symbol;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> GridSpec {
        GridSpec::default_1d()
    }

    fn gaussian_input() -> AnalyticSignal {
        AnalyticSignal::Atom(HermiteAtom::gaussian(0.3, -0.4, 0.9))
    }

    fn one_term(l: PeriodMatrix, k: Vec<i64>, v: Complex64) -> PeriodicSymbol {
        PeriodicSymbol::from_coefficients(l, [(MultiIndex(k), v)]).unwrap()
    }

    #[test]
    fn phase_factor_examples() {
        let l = PeriodMatrix::diagonal(&[0.7, 1.3]).unwrap();
        for tau in [0.0, 0.5, 1.0] {
            assert_eq!(phase_factor(&MultiIndex(vec![0, 0]), tau, &l), c(1.0, 0.0));
        }
        assert_eq!(phase_factor(&MultiIndex(vec![3, -2]), 0.0, &l), c(1.0, 0.0));
        let (h, k, tau) = (2.0, -3.0, 0.5);
        let expected = Complex64::cis(2.0 * PI * tau * (h / 0.7) * (k / 1.3));
        assert!((phase_factor(&MultiIndex(vec![2, -3]), tau, &l) - expected).norm() < 1e-14);
    }

    #[test]
    fn identity_symbol_is_identity() {
        let f = gaussian_input().sample(grid()).unwrap();
        for tau in [0.0, 0.5, 1.0] {
            let spec = OperatorSpec::new(PeriodicSymbol::constant(PeriodMatrix::identity(2), c(1.0, 0.0)), tau, 3).unwrap();
            assert!(apply_series(&spec, &f).unwrap().relative_distance(&f) < 1e-12);
            assert_eq!(apply_series_lattice(&spec, &f).unwrap(), apply_series(&spec, &f).unwrap());
        }
    }

    #[test]
    fn single_exponential_is_one_tfs() {
        let l = PeriodMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap();
        let k0 = MultiIndex(vec![1, 2]);
        let spec = OperatorSpec::new(one_term(l.clone(), k0.0.clone(), c(1.0, 0.0)), 0.5, 2).unwrap();
        let f = gaussian_input().sample(grid()).unwrap();
        let mu = dual_point(&l, &k0);
        let z = PhasePoint::from_slice(&symplectic_apply(&mu)).unwrap();
        let expected = tfs_apply(&f, &z).scale(phase_factor(&k0, 0.5, &l));
        assert_eq!(apply_series(&spec, &f).unwrap(), expected);
    }

    #[test]
    fn two_term_symbol_matches_oracle() {
        let l = PeriodMatrix::identity(2);
        let p = PeriodicSymbol::from_coefficients(l, [(MultiIndex(vec![1, 0]), c(0.5, 0.2)), (MultiIndex(vec![-1, 1]), c(-0.3, 0.7))]).unwrap();
        let f = gaussian_input();
        let spec = OperatorSpec::new(p.clone(), 0.5, 1).unwrap();
        let series = apply_series(&spec, &f.sample(grid()).unwrap()).unwrap();
        let oracle = apply_oracle(&p, 0.5, &f, grid(), OracleOptions::default()).unwrap();
        assert!(series.relative_distance(&oracle) < 1e-8);
    }

    #[test]
    fn oracle_examples() {
        let f = gaussian_input();
        let sampled = f.sample(grid()).unwrap();
        let one = PeriodicSymbol::constant(PeriodMatrix::identity(2), c(1.0, 0.0));
        let out = apply_oracle(&one, 0.3, &f, grid(), OracleOptions::default()).unwrap();
        assert!(out.sub(&sampled).max_abs() < 1e-10);
        let spatial = one_term(PeriodMatrix::identity(2), vec![1, 0], c(1.0, 0.0));
        let out = apply_oracle(&spatial, 1.0, &f, grid(), OracleOptions::default()).unwrap();
        let exact = GridSignal::from_fn(grid(), |t| Complex64::cis(2.0 * PI * t[0]) * f.eval(t[0]));
        assert!(out.sub(&exact).max_abs() < 1e-9);
    }

    #[test]
    fn oracle_handles_hermite_and_exponential_inputs() {
        let l = PeriodMatrix::diagonal(&[2.0, 0.5]).unwrap();
        let p = PeriodicSymbol::from_coefficients(l, [(MultiIndex(vec![1, 1]), c(0.4, 0.0)), (MultiIndex(vec![0, -1]), c(0.0, 0.3)), (MultiIndex(vec![0, 0]), c(1.0, 0.0))]).unwrap();
        let spec = OperatorSpec::from_symbol(p.clone(), 0.5).unwrap();
        let atom = AnalyticSignal::Atom(HermiteAtom { center: -0.5, modulation: 0.8, scale: 1.1, order: 3, amplitude: c(0.7, -0.2) });
        let series = apply_series(&spec, &atom.sample(grid()).unwrap()).unwrap();
        let oracle = apply_oracle(&p, 0.5, &atom, grid(), OracleOptions::default()).unwrap();
        assert!(series.relative_distance(&oracle) < 1e-8);
        let exp = AnalyticSignal::Exponential { frequency: 5.0 / 16.0, amplitude: c(1.0, 0.0) };
        let series = apply_series(&spec, &exp.sample(grid()).unwrap()).unwrap();
        let oracle = apply_oracle(&p, 0.5, &exp, grid(), OracleOptions::default()).unwrap();
        assert!(series.relative_distance(&oracle) < 1e-10);
    }

    #[test]
    fn aliasing_is_refused() {
        let p = one_term(PeriodMatrix::identity(2), vec![14, 0], c(1.0, 0.0));
        let spec = OperatorSpec::from_symbol(p, 0.0).unwrap();
        let f = gaussian_input().sample(grid()).unwrap();
        assert!(matches!(apply_series(&spec, &f), Err(Error::Aliasing { .. })));
        assert!(CompiledOperator::new(&spec, grid()).is_err());
    }

    #[test]
    fn truncation_must_cover_support() {
        let p = one_term(PeriodMatrix::identity(2), vec![3, 0], c(1.0, 0.0));
        assert!(OperatorSpec::new(p.clone(), 0.0, 2).is_err());
        assert!(OperatorSpec::new(p, 1.5, 3).is_err());
    }

    #[test]
    fn diagonal_lattice_matches_shift_formula() {
        // L = diag(a, b): Op_τ(p)u(x) = Σ c_(h,k) e^{2πiτ hk/(ab)} e^{2πi h x/a} u(x + k/b)
        let (a, b) = (2.0, 0.5);
        let l = PeriodMatrix::diagonal(&[a, b]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_symbol(&l, 2, 6, &mut rng);
        let atom = HermiteAtom::gaussian(0.1, 0.2, 1.0);
        let f = AnalyticSignal::Atom(atom.clone()).sample(grid()).unwrap();
        let spec = OperatorSpec::from_symbol(p.clone(), 0.5).unwrap();
        let out = apply_series_lattice(&spec, &f).unwrap();
        let direct = GridSignal::from_fn(grid(), |t| {
            p.iter()
                .map(|(kappa, cv)| {
                    let (h, k) = (kappa.0[0] as f64, kappa.0[1] as f64);
                    cv * Complex64::cis(2.0 * PI * (0.5 * h * k / (a * b) + h * t[0] / a)) * atom.eval(t[0] + k / b)
                })
                .sum()
        });
        assert!(out.relative_distance(&direct) < 1e-12);
    }

    #[test]
    fn multiplier_paths_agree_and_match_embedding() {
        let p1 = PeriodMatrix::diagonal(&[1.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sigma = random_symbol(&p1, 3, 5, &mut rng);
        let u = gaussian_input().sample(grid()).unwrap();
        let a = apply_multiplier(&sigma, &u, MultiplierPath::Translation).unwrap();
        let b = apply_multiplier(&sigma, &u, MultiplierPath::Frequency).unwrap();
        assert!(a.relative_distance(&b) < 1e-10);
        let embedded = PeriodicSymbol::from_multiplier(&sigma).unwrap();
        for tau in [0.0, 0.3, 1.0] {
            let spec = OperatorSpec::from_symbol(embedded.clone(), tau).unwrap();
            assert!(apply_series(&spec, &u).unwrap().relative_distance(&a) < 1e-10);
        }
        let one = PeriodicSymbol::constant(p1.clone(), c(1.0, 0.0));
        assert!(apply_multiplier(&one, &u, MultiplierPath::Translation).unwrap().relative_distance(&u) < 1e-15);
        let single = one_term(p1, vec![2], c(1.0, 0.0));
        let moved = translate(&u, &[-2.0 / 1.5]);
        assert_eq!(apply_multiplier(&single, &u, MultiplierPath::Translation).unwrap(), moved.scale(c(1.0, 0.0)));
        let compiled = CompiledOperator::multiplier(&sigma, grid()).unwrap();
        assert!(compiled.apply(&u).relative_distance(&a) < 1e-13);
    }

    #[test]
    fn compiled_operator_matches_series_and_adjoint() {
        let l = PeriodMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_symbol(&l, 2, 9, &mut rng);
        let spec = OperatorSpec::from_symbol(p, 0.5).unwrap();
        let op = CompiledOperator::new(&spec, grid()).unwrap();
        let f = gaussian_input().sample(grid()).unwrap();
        let g = AnalyticSignal::Atom(HermiteAtom { center: -0.6, modulation: 0.1, scale: 0.8, order: 1, amplitude: c(1.0, 0.0) }).sample(grid()).unwrap();
        assert!(op.apply(&f).relative_distance(&apply_series(&spec, &f).unwrap()) < 1e-12);
        let adj = apply_series_adjoint(&spec, &g).unwrap();
        assert!(op.apply_adjoint(&g).relative_distance(&adj) < 1e-12);
        let lhs = op.apply(&f).inner(&g);
        let rhs = f.inner(&op.apply_adjoint(&g));
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn tau_independence_for_multiplier_symbols() {
        let l = PeriodMatrix::diagonal(&[1.0, 0.8]).unwrap();
        let p = PeriodicSymbol::from_coefficients(l, [(MultiIndex(vec![0, 1]), c(0.4, 0.1)), (MultiIndex(vec![0, -2]), c(0.2, 0.0))]).unwrap();
        let f = gaussian_input().sample(grid()).unwrap();
        let base = apply_series(&OperatorSpec::from_symbol(p.clone(), 0.0).unwrap(), &f).unwrap();
        for tau in [0.5, 1.0] {
            assert_eq!(apply_series(&OperatorSpec::from_symbol(p.clone(), tau).unwrap(), &f).unwrap(), base);
        }
    }

    #[test]
    fn commuting_terms_compose_with_tfs_phase() {
        // Op(e^{2πi⟨μ,·⟩}) Op(e^{2πi⟨ν,·⟩}) for Kohn–Nirenberg: π_{𝒥μ}π_{𝒥ν} = e^{−2πi(−ν₂)μ₁}π_{𝒥(μ+ν)}
        let l = PeriodMatrix::identity(2);
        let (km, kn) = (vec![1i64, 0], vec![0i64, 1]);
        let f = gaussian_input().sample(grid()).unwrap();
        let a = OperatorSpec::from_symbol(one_term(l.clone(), km, c(1.0, 0.0)), 0.0).unwrap();
        let b = OperatorSpec::from_symbol(one_term(l.clone(), kn, c(1.0, 0.0)), 0.0).unwrap();
        let ab = apply_series(&a, &apply_series(&b, &f).unwrap()).unwrap();
        let sum = OperatorSpec::from_symbol(one_term(l, vec![1, 1], c(1.0, 0.0)), 0.0).unwrap();
        let expected = apply_series(&sum, &f).unwrap().scale(Complex64::cis(2.0 * PI * 1.0 * 1.0));
        assert!(ab.relative_distance(&expected) < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn series_is_linear(seed in 0u64..5000, tau in 0.0f64..1.0) {
            let l = PeriodMatrix::diagonal(&[1.0, 2.0]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_symbol(&l, 2, 4, &mut rng);
            let q = random_symbol(&l, 2, 4, &mut rng);
            let (a, b) = (c(0.7, -0.1), c(-1.2, 0.4));
            let f = gaussian_input().sample(grid()).unwrap();
            let g = AnalyticSignal::Atom(HermiteAtom::gaussian(-0.2, 0.5, 1.2)).sample(grid()).unwrap();
            let pq = p.linear_combination(a, &q, b).unwrap();
            let op = |s: &PeriodicSymbol, u: &GridSignal| apply_series(&OperatorSpec::new(s.clone(), tau, 2).unwrap(), u).unwrap();
            let mut rhs = op(&p, &f).scale(a);
            rhs.add_scaled(b, &op(&q, &f));
            prop_assert!(op(&pq, &f).relative_distance(&rhs) < 1e-12);
            let mut sig = f.scale(a);
            sig.add_scaled(b, &g);
            let mut rhs = op(&p, &f).scale(a);
            rhs.add_scaled(b, &op(&p, &g));
            prop_assert!(op(&p, &sig).relative_distance(&rhs) < 1e-12);
        }

        #[test]
        fn lattice_form_is_bit_identical(seed in 0u64..5000, tau in 0.0f64..1.0) {
            let l = PeriodMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = OperatorSpec::from_symbol(random_symbol(&l, 3, 6, &mut rng), tau).unwrap();
            let f = gaussian_input().sample(grid()).unwrap();
            prop_assert_eq!(apply_series(&spec, &f).unwrap(), apply_series_lattice(&spec, &f).unwrap());
        }
    }
}
