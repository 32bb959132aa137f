//! Period matrices, their dual lattices and the symplectic structure of phase
//! space.
//!
//! A period matrix `L ∈ GL(n)` generates the lattice `Λ = L Zⁿ`; the Fourier
//! expansion of an `L`-periodic function lives on the dual lattice
//! `Λ⊥ = L⁻ᵀ Zⁿ`. For symbols on phase space `n = 2d`, and every dual point
//! splits into a position block and a frequency block.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matrices whose 1-norm condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// An invertible `n × n` real matrix generating a periodicity lattice.
///
/// `L⁻ᵀ` is factored once at construction and shared by all downstream
/// lattice arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    n: usize,
    entries: Vec<f64>,
    det: f64,
    linv_t: Vec<f64>,
}

impl PeriodMatrix {
    /// Builds a period matrix from row-major entries.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("period matrix dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("period matrix"));
        }
        let (inverse, det) = lu_inverse(n, &entries)?;
        let condition = one_norm(n, &entries) * one_norm(n, &inverse);
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        let mut linv_t = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                linv_t[i * n + j] = inverse[j * n + i];
            }
        }
        // L · (L⁻ᵀ)ᵀ = L · L⁻¹ must reproduce the identity.
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += entries[i * n + l] * inverse[l * n + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                if (acc - target).abs() > 1e-12 {
                    return Err(Error::IllConditioned { condition });
                }
            }
        }
        Ok(Self { n, entries, det, linv_t })
    }

    /// Builds a period matrix from a list of rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self::new(n, entries).expect("identity is invertible")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![0.0; n * n];
        for (i, &a) in diag.iter().enumerate() {
            entries[i * n + i] = a;
        }
        Self::new(n, entries)
    }

    /// The phase-space period matrix `diag(α I_d, β I_d)` of a separable
    /// lattice `αZᵈ × βZᵈ`.
    pub fn separable(d: usize, alpha: f64, beta: f64) -> Result<Self> {
        let mut diag = vec![alpha; d];
        diag.extend(std::iter::repeat_n(beta, d));
        Self::diagonal(&diag)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Volume of a period cell, `|det L|`.
    pub fn volume(&self) -> f64 {
        self.det.abs()
    }

    /// Row-major entries of `L⁻ᵀ`.
    pub fn inverse_transpose(&self) -> &[f64] {
        &self.linv_t
    }

    /// `L y`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        mat_vec(self.n, &self.entries, y)
    }

    /// The lattice point `L κ`.
    pub fn lattice_point(&self, kappa: &MultiIndex) -> Vec<f64> {
        let k: Vec<f64> = kappa.0.iter().map(|&v| v as f64).collect();
        self.apply(&k)
    }
}

fn mat_vec(n: usize, m: &[f64], v: &[f64]) -> Vec<f64> {
    (0..n).map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum()).collect()
}

fn one_norm(n: usize, m: &[f64]) -> f64 {
    (0..n).map(|j| (0..n).map(|i| m[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Inverse and determinant by LU factorisation with partial pivoting.
fn lu_inverse(n: usize, a: &[f64]) -> Result<(Vec<f64>, f64)> {
    let mut lu = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = 1.0;
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| lu[r * n + col].abs().total_cmp(&lu[s * n + col].abs()))
            .expect("non-empty range");
        if lu[pivot * n + col].abs() <= f64::EPSILON * scale * n as f64 {
            return Err(Error::SingularMatrix);
        }
        if pivot != col {
            for j in 0..n {
                lu.swap(pivot * n + j, col * n + j);
            }
            perm.swap(pivot, col);
            det = -det;
        }
        let p = lu[col * n + col];
        det *= p;
        for r in col + 1..n {
            let factor = lu[r * n + col] / p;
            lu[r * n + col] = factor;
            for j in col + 1..n {
                lu[r * n + j] -= factor * lu[col * n + j];
            }
        }
    }
    let mut inv = vec![0.0; n * n];
    for c in 0..n {
        // Solve L U x = P e_c.
        let mut x: Vec<f64> = perm.iter().map(|&p| if p == c { 1.0 } else { 0.0 }).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= lu[i * n + j] * x[j];
            }
            x[i] /= lu[i * n + i];
        }
        for i in 0..n {
            inv[i * n + c] = x[i];
        }
    }
    Ok((inv, det))
}

/// An integer multi-index `κ ∈ Zⁿ`.
///
/// Ordered by sup-norm first and lexicographically within a ring, which is
/// the summation order used for every truncated series in this crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Self {
        Self(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn sup_norm(&self) -> u64 {
        self.0.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}

impl std::ops::Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Neg for &MultiIndex {
    type Output = MultiIndex;

    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sup_norm()
            .cmp(&other.sup_norm())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// A point `z = (x, ω)` of phase space `R^{2d}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, omega: Vec<f64>) -> Self {
        assert_eq!(x.len(), omega.len(), "position and frequency must share a dimension");
        Self { x, omega }
    }

    pub fn origin(d: usize) -> Self {
        Self { x: vec![0.0; d], omega: vec![0.0; d] }
    }

    /// Splits a `2d` vector into `(x, ω)`.
    pub fn from_slice(z: &[f64]) -> Result<Self> {
        let (x, omega) = split_components(z)?;
        Ok(Self { x, omega })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.omega);
        z
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.omega).all(|v| v.is_finite())
    }
}

/// The dual lattice point `μ = L⁻ᵀ κ`.
pub fn dual_point(lattice: &PeriodMatrix, kappa: &MultiIndex) -> Vec<f64> {
    assert_eq!(kappa.dim(), lattice.dim(), "multi-index dimension must match the period matrix");
    let k: Vec<f64> = kappa.0.iter().map(|&v| v as f64).collect();
    mat_vec(lattice.dim(), lattice.inverse_transpose(), &k)
}

/// Splits `μ ∈ R^{2d}` into its position block `I₁μ` and frequency block `I₂μ`.
pub fn split_components(mu: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if mu.len() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "cannot split a vector of odd length {} into phase-space blocks",
            mu.len()
        )));
    }
    let d = mu.len() / 2;
    Ok((mu[..d].to_vec(), mu[d..].to_vec()))
}

/// `𝒥 z = (−ω, x)` for `z = (x, ω)`.
pub fn symplectic_apply(z: &[f64]) -> Vec<f64> {
    assert!(z.len() % 2 == 0, "phase-space vectors have even length");
    let d = z.len() / 2;
    z[d..].iter().map(|w| -w).chain(z[..d].iter().copied()).collect()
}

/// `𝒥ᵀ z = (ω, −x)`.
pub fn symplectic_transpose_apply(z: &[f64]) -> Vec<f64> {
    assert!(z.len() % 2 == 0, "phase-space vectors have even length");
    let d = z.len() / 2;
    z[d..].iter().copied().chain(z[..d].iter().map(|x| -x)).collect()
}

/// The symplectic form `[z₁, z₂] = ⟨z₁, 𝒥 z₂⟩ = x₂·ω₁ − x₁·ω₂`.
pub fn symplectic_form(z1: &[f64], z2: &[f64]) -> f64 {
    assert_eq!(z1.len(), z2.len());
    z1.iter().zip(symplectic_apply(z2)).map(|(a, b)| a * b).sum()
}

/// All `κ ∈ Zⁿ` with `‖κ‖∞ ≤ K`, in ring order: sorted by sup-norm, then
/// lexicographically. There are `(2K+1)ⁿ` of them.
pub fn enumerate_truncation(radius: usize, n: usize) -> Vec<MultiIndex> {
    let r = radius as i64;
    let side = 2 * radius + 1;
    let count = side.pow(n as u32);
    let mut out = Vec::with_capacity(count);
    let mut current = vec![-r; n];
    for _ in 0..count {
        out.push(MultiIndex(current.clone()));
        for slot in current.iter_mut().rev() {
            if *slot < r {
                *slot += 1;
                break;
            }
            *slot = -r;
        }
    }
    out.sort();
    out
}
