//! Completely periodic symbols as finite lattice Fourier series.
//!
//! A [`PeriodicSymbol`] with period matrix `L` is the trigonometric polynomial
//! `p(z) = Σ_κ c_κ e^{2πi⟨L⁻ᵀκ, z⟩}`. Coefficients use the `e^{−2πi}` analysis
//! kernel, `c_κ = ∫_{[0,1)ⁿ} p(Ly) e^{−2πi κ·y} dy`, which is the convention
//! that makes extraction and synthesis exact inverses.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{dual_point, enumerate_truncation, MultiIndex, PeriodMatrix};
use crate::signal::{dft, fft_in_place, Direction, GridSignal};

/// Extracted coefficients smaller than this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// A trigonometric polynomial periodic with respect to `L Zⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSymbol {
    lattice: PeriodMatrix,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl PeriodicSymbol {
    /// The zero symbol.
    pub fn new(lattice: PeriodMatrix) -> Self {
        Self { lattice, coeffs: BTreeMap::new() }
    }

    pub fn from_coefficients(
        lattice: PeriodMatrix,
        coeffs: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let mut p = Self::new(lattice);
        for (k, c) in coeffs {
            p.insert(k, c)?;
        }
        Ok(p)
    }

    /// The constant symbol `p ≡ c`.
    pub fn constant(lattice: PeriodMatrix, c: Complex64) -> Self {
        let n = lattice.dim();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::zero(n), c);
        Self { lattice, coeffs }
    }

    /// Adds `c` to the coefficient at `kappa`.
    pub fn insert(&mut self, kappa: MultiIndex, c: Complex64) -> Result<()> {
        if kappa.dim() != self.lattice.dim() {
            return Err(Error::DimensionMismatch { expected: self.lattice.dim(), found: kappa.dim() });
        }
        if !c.is_finite() {
            return Err(Error::NonFinite("symbol coefficient"));
        }
        *self.coeffs.entry(kappa).or_insert(Complex64::new(0.0, 0.0)) += c;
        Ok(())
    }

    pub fn lattice(&self) -> &PeriodMatrix {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, kappa: &MultiIndex) -> Complex64 {
        self.coeffs.get(kappa).copied().unwrap_or_default()
    }

    /// `c₀`, the mean of the symbol over a period cell.
    pub fn c0(&self) -> Complex64 {
        self.get(&MultiIndex::zero(self.dim()))
    }

    /// Stored coefficients in ring order (sup-norm, then lexicographic).
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Largest `‖κ‖∞` over the stored support.
    pub fn support_radius(&self) -> usize {
        self.coeffs.keys().map(|k| k.sup_norm() as usize).max().unwrap_or(0)
    }

    /// `Σ |c_κ|`.
    pub fn ell1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Drops coefficients with `|c_κ| < tol`.
    pub fn prune(&mut self, tol: f64) {
        self.coeffs.retain(|_, c| c.norm() >= tol);
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { lattice: self.lattice.clone(), coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)).collect() }
    }

    /// `a·self + b·other`; both symbols must share the period matrix.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::InvalidParameter("symbols have different period matrices".into()));
        }
        let mut out = self.scaled(a);
        for (k, c) in &other.coeffs {
            out.insert(k.clone(), c * b)?;
        }
        Ok(out)
    }

    /// Keeps only coefficients with `‖κ‖∞ ≤ radius`.
    pub fn truncated(&self, radius: usize) -> Self {
        Self {
            lattice: self.lattice.clone(),
            coeffs: self.coeffs.iter().filter(|(k, _)| k.sup_norm() as usize <= radius).map(|(k, c)| (k.clone(), *c)).collect(),
        }
    }

    /// `p(z) = Σ c_κ e^{2πi⟨L⁻ᵀκ, z⟩}` over the stored support.
    pub fn synthesize(&self, z: &[f64]) -> Complex64 {
        assert_eq!(z.len(), self.dim(), "evaluation point dimension must match the symbol");
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let mu = dual_point(&self.lattice, k);
                let phase: f64 = mu.iter().zip(z).map(|(a, b)| a * b).sum();
                c * Complex64::cis(2.0 * PI * phase)
            })
            .sum()
    }

    /// The phase-space symbol `(x, ω) ↦ σ(ω)` of a Fourier multiplier `σ`
    /// with period matrix `P`. The position block of the period matrix is the
    /// identity.
    pub fn from_multiplier(sigma: &PeriodicSymbol) -> Result<Self> {
        Self::tensor(&PeriodicSymbol::constant(PeriodMatrix::identity(sigma.dim()), Complex64::new(1.0, 0.0)), sigma)
    }

    /// `(x, ω) ↦ ν(x) σ(ω)` on the block-diagonal lattice `diag(A, P)`.
    pub fn tensor(nu: &PeriodicSymbol, sigma: &PeriodicSymbol) -> Result<Self> {
        let d = nu.dim();
        if sigma.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: sigma.dim() });
        }
        let n = 2 * d;
        let mut entries = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                entries[i * n + j] = nu.lattice.get(i, j);
                entries[(d + i) * n + d + j] = sigma.lattice.get(i, j);
            }
        }
        let lattice = PeriodMatrix::new(n, entries)?;
        let mut out = Self::new(lattice);
        for (h, a) in &nu.coeffs {
            for (k, b) in &sigma.coeffs {
                let kappa: Vec<i64> = h.0.iter().chain(&k.0).copied().collect();
                out.insert(MultiIndex(kappa), a * b)?;
            }
        }
        Ok(out)
    }
}

/// Random symbol with `terms` coefficients drawn uniformly from the box
/// `‖κ‖∞ ≤ radius`, each with modulus in `[0.1, 1]` and uniform phase.
pub fn random_symbol(lattice: &PeriodMatrix, radius: usize, terms: usize, rng: &mut impl Rng) -> PeriodicSymbol {
    let n = lattice.dim();
    let r = radius as i64;
    let mut p = PeriodicSymbol::new(lattice.clone());
    let box_size = (2 * radius + 1).pow(n as u32);
    while p.len() < terms.min(box_size) {
        let kappa = MultiIndex((0..n).map(|_| rng.random_range(-r..=r)).collect());
        if p.coeffs.contains_key(&kappa) {
            continue;
        }
        let c = Complex64::from_polar(rng.random_range(0.1..1.0), rng.random_range(0.0..2.0 * PI));
        p.coeffs.insert(kappa, c);
    }
    p
}

/// Samples of a function on the period cell `L [0,1)ⁿ`: entry `j` (row-major
/// over `n` axes of `M` points) holds the value at `x = L y_j`, `y_j = j/M`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodCellSamples {
    lattice: PeriodMatrix,
    points: usize,
    values: Vec<Complex64>,
}

impl PeriodCellSamples {
    pub fn new(lattice: PeriodMatrix, points: usize, values: Vec<Complex64>) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter(format!("period cell needs at least 2 samples per axis, got {points}")));
        }
        let expected = points.pow(lattice.dim() as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("period cell samples"));
        }
        Ok(Self { lattice, points, values })
    }

    /// Samples `f` at `x = L y_j`; evaluation runs in parallel, the output
    /// order is fixed.
    pub fn from_fn(lattice: PeriodMatrix, points: usize, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Result<Self> {
        let n = lattice.dim();
        let total = points.pow(n as u32);
        let values: Vec<Complex64> = (0..total)
            .into_par_iter()
            .map(|i| f(&lattice.apply(&cell_coords(i, points, n))))
            .collect();
        Self::new(lattice, points, values)
    }

    pub fn lattice(&self) -> &PeriodMatrix {
        &self.lattice
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Physical coordinates `L y_j` of sample `j`.
    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.lattice.apply(&cell_coords(idx, self.points, self.lattice.dim()))
    }
}

fn cell_coords(mut idx: usize, points: usize, n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for a in (0..n).rev() {
        y[a] = (idx % points) as f64 / points as f64;
        idx /= points;
    }
    y
}

/// Coefficients `c_κ`, `‖κ‖∞ ≤ K`, of the sampled function by an
/// `n`-dimensional DFT over the period cell. Exact for trigonometric
/// polynomials of degree at most `K` when `M ≥ 2K + 2`.
pub fn fourier_coefficients(samples: &PeriodCellSamples, truncation: usize) -> Result<PeriodicSymbol> {
    let m = samples.points;
    if m < 2 * truncation + 2 {
        return Err(Error::Undersampled { samples: m, truncation });
    }
    let n = samples.lattice.dim();
    let mut buf = samples.values.clone();
    fft_in_place(&mut buf, m, n, Direction::Forward);
    let norm = 1.0 / (m as f64).powi(n as i32);
    let mut p = PeriodicSymbol::new(samples.lattice.clone());
    for kappa in enumerate_truncation(truncation, n) {
        let mut idx = 0usize;
        for &k in &kappa.0 {
            idx = idx * m + k.rem_euclid(m as i64) as usize;
        }
        let c = buf[idx] * norm;
        if c.norm() >= PRUNE_THRESHOLD {
            p.coeffs.insert(kappa, c);
        }
    }
    Ok(p)
}

/// `φ_per(x) = Σ_{‖κ‖∞ ≤ R} φ(x + Lκ)`. The caller certifies that the
/// omitted terms are negligible.
pub struct Periodized<F> {
    phi: F,
    lattice: PeriodMatrix,
    shifts: Vec<Vec<f64>>,
}

pub fn periodize<F: Fn(&[f64]) -> Complex64>(phi: F, lattice: &PeriodMatrix, tail: usize) -> Periodized<F> {
    let shifts = enumerate_truncation(tail, lattice.dim()).iter().map(|k| lattice.lattice_point(k)).collect();
    Periodized { phi, lattice: lattice.clone(), shifts }
}

impl<F: Fn(&[f64]) -> Complex64> Periodized<F> {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut y = vec![0.0; x.len()];
        self.shifts
            .iter()
            .map(|s| {
                for ((yi, xi), si) in y.iter_mut().zip(x).zip(s) {
                    *yi = xi + si;
                }
                (self.phi)(&y)
            })
            .sum()
    }

    pub fn lattice(&self) -> &PeriodMatrix {
        &self.lattice
    }
}

impl<F: Fn(&[f64]) -> Complex64 + Sync> Periodized<F> {
    /// Period-cell samples of `φ_per`, ready for [`fourier_coefficients`].
    pub fn samples(&self, points: usize) -> Result<PeriodCellSamples> {
        PeriodCellSamples::from_fn(self.lattice.clone(), points, |x| self.eval(x))
    }
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// A smooth partition of unity: `φ(x) = Π_a ψ(x_a) / Σ_k ψ(x_a − k)` with
/// `ψ(t) = e^{−1/(1−t²)}` on `(−1, 1)`. Its integer translates sum to 1.
pub fn partition_of_unity(x: &[f64]) -> f64 {
    x.iter()
        .map(|&t| {
            let num = bump(t);
            if num == 0.0 {
                return 0.0;
            }
            let base = t.floor();
            let den: f64 = (-1..=2).map(|k| bump(t - (base + k as f64))).sum();
            num / den
        })
        .product()
}

/// Window functions with both `g` and `ĝ` available at arbitrary points.
pub trait Window: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: &[f64]) -> Complex64;
    fn eval_hat(&self, w: &[f64]) -> Complex64;
}

/// `g(t) = 2^{d/4} e^{−π|t|²}`; unit `L²` norm and `ĝ = g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianWindow {
    pub dim: usize,
}

impl GaussianWindow {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    fn value(&self, t: &[f64]) -> f64 {
        2f64.powf(self.dim as f64 / 4.0) * (-PI * t.iter().map(|a| a * a).sum::<f64>()).exp()
    }

    pub fn sample(&self, spec: crate::signal::GridSpec) -> GridSignal {
        GridSignal::from_fn(spec, |t| Complex64::new(self.value(t), 0.0))
    }
}

impl Window for GaussianWindow {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: &[f64]) -> Complex64 {
        Complex64::new(self.value(t), 0.0)
    }

    fn eval_hat(&self, w: &[f64]) -> Complex64 {
        Complex64::new(self.value(w), 0.0)
    }
}

/// A window known only through grid samples. `g` is evaluated by
/// trigonometric interpolation, `ĝ` by the Riemann sum of the transform.
#[derive(Clone, Debug)]
pub struct SampledWindow {
    g: GridSignal,
    spectrum: GridSignal,
}

impl SampledWindow {
    pub fn new(g: GridSignal) -> Result<Self> {
        if g.max_abs() == 0.0 {
            return Err(Error::InvalidParameter("window must be nonzero".into()));
        }
        let spectrum = dft(&g, Direction::Forward);
        Ok(Self { g, spectrum })
    }

    /// Uses a caller-supplied transform (it must live on the dual grid).
    pub fn with_transform(g: GridSignal, ghat: GridSignal) -> Result<Self> {
        if g.max_abs() == 0.0 {
            return Err(Error::InvalidParameter("window must be nonzero".into()));
        }
        let dual = g.spec().dual();
        let s = ghat.spec();
        if s.dim != dual.dim || s.points != dual.points || (s.extent - dual.extent).abs() > 1e-12 * dual.extent {
            return Err(Error::InvalidParameter("window transform is not sampled on the dual grid".into()));
        }
        Ok(Self { g, spectrum: ghat })
    }

    pub fn samples(&self) -> &GridSignal {
        &self.g
    }
}

fn exponential_sum(samples: &GridSignal, at: &[f64], sign: f64, scale: f64) -> Complex64 {
    let spec = samples.spec();
    let sum: Complex64 = samples
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let phase: f64 = spec.coords(i).iter().zip(at).map(|(a, b)| a * b).sum();
            v * Complex64::cis(sign * 2.0 * PI * phase)
        })
        .sum();
    sum * scale
}

impl Window for SampledWindow {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn eval(&self, t: &[f64]) -> Complex64 {
        exponential_sum(&self.spectrum, t, 1.0, self.spectrum.spec().cell_volume())
    }

    fn eval_hat(&self, w: &[f64]) -> Complex64 {
        exponential_sum(&self.g, w, -1.0, self.g.spec().cell_volume())
    }
}

/// The Gabor frame operator symbol
/// `a(x, ω) = Σ_{h,k} e^{−2πi(x−αh)·(ω−βk)} g(x−αh) conj ĝ(ω−βk)`,
/// truncated to `‖h‖∞, ‖k‖∞ ≤ H`.
pub fn gabor_symbol_value<W: Window + ?Sized>(window: &W, alpha: f64, beta: f64, truncation: usize, x: &[f64], omega: &[f64]) -> Complex64 {
    let d = window.dim();
    let idx = enumerate_truncation(truncation, d);
    let xs: Vec<(Vec<f64>, Complex64)> = idx
        .iter()
        .map(|h| {
            let p: Vec<f64> = x.iter().zip(&h.0).map(|(xi, &hi)| xi - alpha * hi as f64).collect();
            let g = window.eval(&p);
            (p, g)
        })
        .collect();
    let ws: Vec<(Vec<f64>, Complex64)> = idx
        .iter()
        .map(|k| {
            let q: Vec<f64> = omega.iter().zip(&k.0).map(|(wi, &ki)| wi - beta * ki as f64).collect();
            let gh = window.eval_hat(&q).conj();
            (q, gh)
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, g) in &xs {
        for (q, gh) in &ws {
            let phase: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
            acc += Complex64::cis(-2.0 * PI * phase) * g * gh;
        }
    }
    acc
}

/// Samples of the Gabor symbol on the period cell of `L = diag(αI, βI)`.
pub fn gabor_symbol<W: Window + ?Sized>(window: &W, alpha: f64, beta: f64, truncation: usize, points: usize) -> Result<PeriodCellSamples> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("lattice parameters must be positive, got α = {alpha}, β = {beta}")));
    }
    let d = window.dim();
    let lattice = PeriodMatrix::separable(d, alpha, beta)?;
    PeriodCellSamples::from_fn(lattice, points, |z| gabor_symbol_value(window, alpha, beta, truncation, &z[..d], &z[d..]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::GridSpec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_has_single_coefficient() {
        let l = PeriodMatrix::identity(2);
        let s = PeriodCellSamples::from_fn(l, 8, |_| c(1.0, 0.0)).unwrap();
        let p = fourier_coefficients(&s, 3).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.c0() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cosine_in_position() {
        let (a, b) = (0.7, 1.9);
        let l = PeriodMatrix::diagonal(&[a, b]).unwrap();
        let s = PeriodCellSamples::from_fn(l, 16, |z| c((2.0 * PI * z[0] / a).cos(), 0.0)).unwrap();
        let p = fourier_coefficients(&s, 4).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p.get(&MultiIndex(vec![1, 0])) - c(0.5, 0.0)).norm() < 1e-14);
        assert!((p.get(&MultiIndex(vec![-1, 0])) - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn undersampling_is_rejected() {
        let s = PeriodCellSamples::from_fn(PeriodMatrix::identity(1), 7, |_| c(1.0, 0.0)).unwrap();
        assert!(matches!(fourier_coefficients(&s, 3), Err(Error::Undersampled { .. })));
        assert!(fourier_coefficients(&s, 2).is_ok());
    }

    #[test]
    fn synthesize_examples() {
        let l = PeriodMatrix::from_rows(&[vec![1.0, 0.4], vec![-0.2, 2.0]]).unwrap();
        assert_eq!(PeriodicSymbol::new(l.clone()).synthesize(&[0.3, 0.1]), c(0.0, 0.0));
        let k0 = MultiIndex(vec![2, -1]);
        let p = PeriodicSymbol::from_coefficients(l.clone(), [(k0.clone(), c(1.0, 0.0))]).unwrap();
        let z = [0.37, -1.2];
        let mu = dual_point(&l, &k0);
        let expected = Complex64::cis(2.0 * PI * (mu[0] * z[0] + mu[1] * z[1]));
        assert!((p.synthesize(&z) - expected).norm() < 1e-14);
    }

    #[test]
    fn synthesis_is_periodic() {
        let l = PeriodMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 0.5]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_symbol(&l, 3, 8, &mut rng);
        let z = [0.21, -0.44];
        for k in [vec![1, 0], vec![-2, 3], vec![4, -1]] {
            let shift = l.lattice_point(&MultiIndex(k));
            let moved = [z[0] + shift[0], z[1] + shift[1]];
            assert!((p.synthesize(&moved) - p.synthesize(&z)).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_coefficients_match_direct_quadrature() {
        // c_(h,k) = (1/αβ) ∫₀^α ∫₀^β f(x,ω) e^{−2πi(hx/α + kω/β)} dω dx
        let (a, b) = (1.5, 0.8);
        let l = PeriodMatrix::diagonal(&[a, b]).unwrap();
        let f = |x: f64, w: f64| c((2.0 * PI * x / a).sin().exp() * (2.0 * PI * w / b).cos(), (2.0 * PI * (x / a + w / b)).sin() * 0.3);
        let s = PeriodCellSamples::from_fn(l, 64, |z| f(z[0], z[1])).unwrap();
        let p = fourier_coefficients(&s, 6).unwrap();
        for (h, k) in [(0i64, 0i64), (1, 0), (2, -1), (-1, 1), (3, 1)] {
            let n = 400;
            let mut acc = c(0.0, 0.0);
            for i in 0..n {
                let x = (i as f64 + 0.5) * a / n as f64;
                for j in 0..n {
                    let w = (j as f64 + 0.5) * b / n as f64;
                    acc += f(x, w) * Complex64::cis(-2.0 * PI * (h as f64 * x / a + k as f64 * w / b));
                }
            }
            let direct = acc / (n * n) as f64;
            assert!((p.get(&MultiIndex(vec![h, k])) - direct).norm() < 1e-8, "({h},{k})");
        }
    }

    #[test]
    fn theta_series_value() {
        let g = |x: &[f64]| c((-PI * x[0] * x[0]).exp(), 0.0);
        let per = periodize(g, &PeriodMatrix::identity(1), 8);
        assert!((per.eval(&[0.0]).re - 1.086_434_811_213_308_0).abs() < 1e-14);
    }

    #[test]
    fn partition_of_unity_periodizes_to_one() {
        for l in [PeriodMatrix::identity(1), PeriodMatrix::identity(2)] {
            let per = periodize(|x: &[f64]| c(partition_of_unity(x), 0.0), &l, 2);
            for x in [[0.0, 0.0], [0.13, 0.9], [0.5, -0.77], [1.999, 0.5]] {
                let v = per.eval(&x[..l.dim()]);
                assert!((v - c(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn periodized_gaussian_coefficients_sample_the_transform() {
        let l = PeriodMatrix::identity(1);
        let per = periodize(|x: &[f64]| c((-PI * x[0] * x[0]).exp(), 0.0), &l, 8);
        let p = fourier_coefficients(&per.samples(64).unwrap(), 4).unwrap();
        for k in -4i64..=4 {
            let expected = (-PI * (k * k) as f64).exp();
            assert!((p.get(&MultiIndex(vec![k])) - c(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn gabor_symbol_single_term() {
        let w = GaussianWindow::new(1);
        let (x, om) = (0.3, -0.2);
        let v = gabor_symbol_value(&w, 0.5, 0.5, 0, &[x], &[om]);
        let expected = Complex64::cis(-2.0 * PI * x * om) * w.eval(&[x]) * w.eval_hat(&[om]).conj();
        assert!((v - expected).norm() < 1e-15);
    }

    #[test]
    fn gabor_symbol_is_periodic_and_hermitian() {
        let w = GaussianWindow::new(1);
        let (a, b) = (0.5, 0.5);
        for &(x, om) in &[(0.1, 0.2), (0.37, -0.11), (-0.2, 0.45)] {
            let base = gabor_symbol_value(&w, a, b, 8, &[x], &[om]);
            assert!((gabor_symbol_value(&w, a, b, 8, &[x + a], &[om]) - base).norm() < 1e-10);
            assert!((gabor_symbol_value(&w, a, b, 8, &[x], &[om + b]) - base).norm() < 1e-10);
        }
        let s = gabor_symbol(&w, a, b, 8, 32).unwrap();
        let p = fourier_coefficients(&s, 12).unwrap();
        assert!(p.c0().re > 0.0 && p.c0().im.abs() < 1e-12);
        assert!((p.c0().re - 1.0 / (a * b)).abs() < 1e-10);
        for (k, v) in p.iter() {
            assert!((p.get(&-k) - v.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn sampled_window_matches_analytic() {
        let spec = GridSpec::new(1, 16.0, 256).unwrap();
        let g = GaussianWindow::new(1);
        let s = SampledWindow::new(g.sample(spec)).unwrap();
        for t in [0.0, 0.123, -0.77, 1.4] {
            assert!((s.eval(&[t]) - g.eval(&[t])).norm() < 1e-12);
            assert!((s.eval_hat(&[t]) - g.eval_hat(&[t])).norm() < 1e-12);
        }
        assert!(gabor_symbol(&g, 0.0, 1.0, 2, 8).is_err());
    }

    #[test]
    fn tensor_and_multiplier_embedding() {
        let p1 = PeriodMatrix::diagonal(&[2.0]).unwrap();
        let sigma = PeriodicSymbol::from_coefficients(p1, [(MultiIndex(vec![1]), c(0.5, 0.0)), (MultiIndex(vec![0]), c(1.0, 0.0))]).unwrap();
        let emb = PeriodicSymbol::from_multiplier(&sigma).unwrap();
        for z in [[0.3, 0.7], [-1.0, 0.25]] {
            assert!((emb.synthesize(&z) - sigma.synthesize(&z[1..])).norm() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn extraction_inverts_synthesis(seed in 0u64..10_000, shear in -0.6f64..0.6) {
            let l = PeriodMatrix::from_rows(&[vec![1.0, shear], vec![0.0, 1.3]]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_symbol(&l, 3, 10, &mut rng);
            let s = PeriodCellSamples::from_fn(l, 8, |z| p.synthesize(z)).unwrap();
            let q = fourier_coefficients(&s, 3).unwrap();
            prop_assert_eq!(q.len(), p.len());
            for (k, v) in p.iter() {
                prop_assert!((q.get(k) - v).norm() < 1e-12);
            }
        }

        #[test]
        fn extraction_is_linear(seed in 0u64..10_000) {
            let l = PeriodMatrix::identity(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_symbol(&l, 2, 5, &mut rng);
            let q = random_symbol(&l, 2, 5, &mut rng);
            let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
            let sum = PeriodCellSamples::from_fn(l.clone(), 8, |z| a * p.synthesize(z) + b * q.synthesize(z)).unwrap();
            let lhs = fourier_coefficients(&sum, 3).unwrap();
            let rhs = p.linear_combination(a, &q, b).unwrap();
            for kappa in enumerate_truncation(3, 2) {
                prop_assert!((lhs.get(&kappa) - rhs.get(&kappa)).norm() < 1e-12);
            }
        }
    }
}
