//! Sampled signals on a computational torus and the time-frequency shifts
//! acting on them.
//!
//! A [`GridSignal`] holds `Nᵈ` complex samples at the nodes
//! `x_j = −T/2 + j T/N` of `[−T/2, T/2)ᵈ`. The Fourier transform uses the
//! `e^{−2πi x·ω}` kernel; its discrete counterpart [`dft`] is scaled by the
//! grid spacing so that it approximates the continuous transform at the
//! centred frequencies `ξ_k = k/T`, `k = −N/2, …, N/2 − 1`. The frequency
//! samples are themselves a grid signal of extent `N/T`, so every operation
//! here applies equally to time- and frequency-domain data.
//!
//! Translations by a non-grid amount use the band-limited (trigonometric)
//! interpretation of the samples: a phase ramp in the frequency domain. Grid
//! aligned translations are exact circular shifts. Modulations are pointwise
//! and exact.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::PhasePoint;
use crate::weights::Weight;

/// Shape of a uniform grid on `[−T/2, T/2)ᵈ` with `N` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub extent: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("grid dimension must be positive".into()));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidParameter(format!("grid extent must be positive, got {extent}")));
        }
        if points < 2 || points % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "grid needs an even number of points per axis (at least 2), got {points}"
            )));
        }
        Ok(Self { dim, extent, points })
    }

    /// The default one-dimensional torus: `T = 16`, `N = 512`.
    pub fn default_1d() -> Self {
        Self { dim: 1, extent: 16.0, points: 512 }
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.points as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell volume `Δᵈ` used by Riemann sums.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate of node `j` along one axis.
    pub fn node(&self, j: usize) -> f64 {
        -self.extent / 2.0 + j as f64 * self.spacing()
    }

    /// All node coordinates along one axis.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Coordinates of the flat (row-major) index `idx`.
    pub fn coords(&self, mut idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for a in (0..self.dim).rev() {
            out[a] = self.node(idx % self.points);
            idx /= self.points;
        }
        out
    }

    /// The grid of the transform: same `N`, extent `N/T`.
    pub fn dual(&self) -> Self {
        Self { dim: self.dim, extent: self.points as f64 / self.extent, points: self.points }
    }

    /// Largest representable frequency `N / (2T)`.
    pub fn nyquist(&self) -> f64 {
        self.points as f64 / (2.0 * self.extent)
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points && (self.extent - other.extent).abs() <= 1e-12 * self.extent
    }
}

/// Complex samples of a function on a [`GridSpec`], row-major over axes.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSignal {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridSignal {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("signal samples"));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    /// Samples `f` at every grid node.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..spec.len()).map(|i| f(&spec.coords(i))).collect();
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(f, g) = ∫ f ḡ` by Riemann sum.
    pub fn inner(&self, other: &GridSignal) -> Complex64 {
        debug_assert!(self.spec.same_shape(&other.spec));
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        s * self.spec.cell_volume()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.cell_volume()
    }

    /// Discrete `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> GridSignal {
        GridSignal { spec: self.spec, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn scale_in_place(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &GridSignal) {
        debug_assert!(self.spec.same_shape(&other.spec));
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &GridSignal) -> GridSignal {
        debug_assert!(self.spec.same_shape(&other.spec));
        GridSignal {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &GridSignal) -> GridSignal {
        debug_assert!(self.spec.same_shape(&other.spec));
        GridSignal {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn conj(&self) -> GridSignal {
        GridSignal { spec: self.spec, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridSignal) -> GridSignal {
        debug_assert!(self.spec.same_shape(&other.spec));
        GridSignal {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    /// `‖self − reference‖₂ / ‖reference‖₂`.
    pub fn relative_distance(&self, reference: &GridSignal) -> f64 {
        let diff = self.sub(reference).l2_norm();
        let base = reference.l2_norm();
        if base == 0.0 {
            diff
        } else {
            diff / base
        }
    }
}

/// Direction of the discrete Fourier transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `F(ξ) ≈ ∫ f(x) e^{−2πi x·ξ} dx`.
    Forward,
    /// `f(x) ≈ ∫ F(ξ) e^{2πi x·ξ} dξ`.
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: Direction) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match direction {
            Direction::Forward => p.plan_fft_forward(n),
            Direction::Inverse => p.plan_fft_inverse(n),
        }
    })
}

/// Unnormalised multidimensional FFT of a row-major `pointsᵈ` array in place.
/// `Forward` uses `e^{−2πi jk/N}`, `Inverse` uses `e^{+2πi jk/N}`.
pub(crate) fn fft_in_place(values: &mut [Complex64], points: usize, dim: usize, direction: Direction) {
    let fft = plan(points, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); points];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = points.pow((dim - 1 - axis) as u32);
        let block = stride * points;
        for start in (0..values.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    values[base + j * stride] = *v;
                }
            }
        }
    }
}

/// Transform of `f` on its dual grid (extent `N/T`).
///
/// Both directions are scaled by the input spacing, so `Inverse` undoes
/// `Forward` exactly and Parseval holds for [`GridSignal::l2_norm`].
pub fn dft(f: &GridSignal, direction: Direction) -> GridSignal {
    let spec = *f.spec();
    let n = spec.points;
    let fft = plan(n, direction);
    let h = spec.spacing();
    let half_sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut values = f.values.clone();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..spec.dim {
        let stride = n.pow((spec.dim - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..values.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    let v = values[base + j * stride];
                    *slot = if j % 2 == 0 { v } else { -v };
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    let sign = if k % 2 == 0 { half_sign } else { -half_sign };
                    values[base + k * stride] = v * (sign * h);
                }
            }
        }
    }
    GridSignal { spec: spec.dual(), values }
}

fn grid_shift(spec: &GridSpec, x: &[f64]) -> Option<Vec<i64>> {
    let h = spec.spacing();
    x.iter()
        .map(|&xa| {
            let steps = xa / h;
            let r = steps.round();
            ((steps - r).abs() <= 1e-9).then_some(r as i64)
        })
        .collect()
}

fn roll(f: &GridSignal, shift: &[i64]) -> GridSignal {
    let spec = *f.spec();
    let n = spec.points as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
    let mut idx = vec![0i64; spec.dim];
    for (flat, v) in f.values.iter().enumerate() {
        let mut rem = flat;
        for a in (0..spec.dim).rev() {
            idx[a] = (rem % spec.points) as i64;
            rem /= spec.points;
        }
        let mut target = 0usize;
        for a in 0..spec.dim {
            target = target * spec.points + (idx[a] + shift[a]).rem_euclid(n) as usize;
        }
        out[target] = *v;
    }
    GridSignal { spec, values: out }
}

/// `T_x f(t) = f(t − x)`.
pub fn translate(f: &GridSignal, x: &[f64]) -> GridSignal {
    assert_eq!(x.len(), f.dim(), "translation dimension must match the signal");
    if let Some(shift) = grid_shift(f.spec(), x) {
        if shift.iter().all(|&s| s == 0) {
            return f.clone();
        }
        return roll(f, &shift);
    }
    let mut spectrum = dft(f, Direction::Forward);
    let fspec = *spectrum.spec();
    let ramps: Vec<Vec<Complex64>> = x
        .iter()
        .map(|&xa| fspec.axis().iter().map(|&xi| Complex64::cis(-2.0 * PI * xi * xa)).collect())
        .collect();
    apply_separable(&mut spectrum, &ramps);
    let mut out = dft(&spectrum, Direction::Inverse);
    out.spec = *f.spec();
    out
}

/// Translation together with the fraction of `‖f‖₂²` that crossed the seam
/// of the torus.
pub fn translate_with_diagnostic(f: &GridSignal, x: &[f64]) -> (GridSignal, f64) {
    (translate(f, x), wrap_fraction(f, x))
}

/// Fraction of the energy of `f` that a translation by `x` carries across
/// the torus seam. Non-negligible values mean the periodic translation no
/// longer models the translation on `Rᵈ`.
pub fn wrap_fraction(f: &GridSignal, x: &[f64]) -> f64 {
    let spec = f.spec();
    let half = spec.extent / 2.0;
    let total: f64 = f.values.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let crossing: f64 = f
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            spec.coords(*i).iter().zip(x).any(|(&t, &s)| {
                let moved = t + s;
                s.abs() >= spec.extent || moved >= half || moved < -half
            })
        })
        .map(|(_, v)| v.norm_sqr())
        .sum();
    crossing / total
}

fn apply_separable(f: &mut GridSignal, factors: &[Vec<Complex64>]) {
    let spec = *f.spec();
    let n = spec.points;
    if spec.dim == 1 {
        for (v, c) in f.values.iter_mut().zip(&factors[0]) {
            *v *= c;
        }
        return;
    }
    for (flat, v) in f.values.iter_mut().enumerate() {
        let mut rem = flat;
        let mut c = Complex64::new(1.0, 0.0);
        for a in (0..spec.dim).rev() {
            c *= factors[a][rem % n];
            rem /= n;
        }
        *v *= c;
    }
}

/// `M_ω f(t) = e^{2πi ω·t} f(t)`.
pub fn modulate(f: &GridSignal, omega: &[f64]) -> GridSignal {
    assert_eq!(omega.len(), f.dim(), "modulation dimension must match the signal");
    if omega.iter().all(|&w| w == 0.0) {
        return f.clone();
    }
    let mut out = f.clone();
    let axis = f.spec().axis();
    let factors: Vec<Vec<Complex64>> = omega
        .iter()
        .map(|&w| axis.iter().map(|&t| Complex64::cis(2.0 * PI * w * t)).collect())
        .collect();
    apply_separable(&mut out, &factors);
    out
}

/// Pointwise multiplication by `e^{2πi ω·t}` evaluated on the grid nodes.
pub fn modulation_factor(spec: &GridSpec, omega: &[f64]) -> GridSignal {
    let ones = GridSignal { spec: *spec, values: vec![Complex64::new(1.0, 0.0); spec.len()] };
    modulate(&ones, omega)
}

/// The time-frequency shift `π_z f = M_ω T_x f`.
pub fn tfs_apply(f: &GridSignal, z: &PhasePoint) -> GridSignal {
    modulate(&translate(f, &z.x), &z.omega)
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("Lebesgue exponent must lie in [1, ∞], got {p}")));
    }
    Ok(())
}

fn weighted_norm(values: &[Complex64], spec: &GridSpec, p: f64, mut weight_at: impl FnMut(&[f64]) -> f64) -> f64 {
    if p.is_infinite() {
        return values
            .iter()
            .enumerate()
            .map(|(i, v)| weight_at(&spec.coords(i)) * v.norm())
            .fold(0.0, f64::max);
    }
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| (weight_at(&spec.coords(i)) * v.norm()).powf(p))
        .sum();
    (sum * spec.cell_volume()).powf(1.0 / p)
}

/// `‖f‖_{L^p_m} = ‖m(·, 0) f‖_{L^p}` by Riemann sum; `p = ∞` takes the grid
/// maximum. The weight lives on phase space `R^{2d}` and is evaluated at
/// `(t, 0)`.
pub fn lp_m_norm<W: Weight + ?Sized>(f: &GridSignal, p: f64, m: &W) -> Result<f64> {
    check_exponent(p)?;
    let d = f.dim();
    let mut z = vec![0.0; 2 * d];
    Ok(weighted_norm(&f.values, f.spec(), p, |t| {
        z[..d].copy_from_slice(t);
        m.eval(&z)
    }))
}

/// `‖f‖_{FL^p_m} = ‖m(0, ·) f̂‖_{L^p}` on the dual grid.
pub fn flp_m_norm<W: Weight + ?Sized>(f: &GridSignal, p: f64, m: &W) -> Result<f64> {
    check_exponent(p)?;
    let d = f.dim();
    let spectrum = dft(f, Direction::Forward);
    let mut z = vec![0.0; 2 * d];
    Ok(weighted_norm(&spectrum.values, spectrum.spec(), p, |w| {
        z[d..].copy_from_slice(w);
        m.eval(&z)
    }))
}
