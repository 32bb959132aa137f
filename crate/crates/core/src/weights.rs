//! Polynomial weights `v(z) = (1 + |z|²)^{s/2}` and polynomially moderate
//! weights `m`, i.e. weights with `m(z₁ + z₂) ≤ C v(z₁) m(z₂)`.
//!
//! Moderation is not proved symbolically: a [`ModerateWeight`] carries a
//! claimed constant and [`moderation_check`] tests the inequality on sampled
//! pairs. User-supplied evaluators must be reentrant, since the library may
//! call them from several threads.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Anything that can be evaluated as a positive weight on `Rⁿ`.
pub trait Weight: Send + Sync {
    fn eval(&self, z: &[f64]) -> f64;
}

/// `v(z) = (1 + |z|²)^{s/2}` with `s ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolynomialWeight {
    s: f64,
}

impl PolynomialWeight {
    pub fn new(s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidWeight(format!("polynomial exponent must be a finite s >= 0, got {s}")));
        }
        Ok(Self { s })
    }

    /// The trivial weight `v ≡ 1`.
    pub fn unit() -> Self {
        Self { s: 0.0 }
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    /// Submultiplicativity constant: `v(z₁ + z₂) ≤ 2^{s/2} v(z₁) v(z₂)`.
    pub fn submultiplicative_constant(&self) -> f64 {
        2f64.powf(self.s / 2.0)
    }
}

impl Weight for PolynomialWeight {
    fn eval(&self, z: &[f64]) -> f64 {
        if self.s == 0.0 {
            return 1.0;
        }
        let r2: f64 = z.iter().map(|v| v * v).sum();
        (1.0 + r2).powf(self.s / 2.0)
    }
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A weight `m` together with the polynomial weight `v` and constant `C` it
/// is claimed to be moderate with respect to.
#[derive(Clone)]
pub struct ModerateWeight {
    label: String,
    evaluator: Evaluator,
    reference: PolynomialWeight,
    constant: f64,
}

impl ModerateWeight {
    pub fn custom(
        label: impl Into<String>,
        evaluator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        reference: PolynomialWeight,
        constant: f64,
    ) -> Result<Self> {
        if !(constant.is_finite() && constant > 0.0) {
            return Err(Error::InvalidWeight(format!("moderation constant must be positive, got {constant}")));
        }
        Ok(Self { label: label.into(), evaluator: Arc::new(evaluator), reference, constant })
    }

    /// `m = v_s`, moderate with respect to itself with `C = 2^{s/2}`.
    pub fn polynomial(s: f64) -> Result<Self> {
        let v = PolynomialWeight::new(s)?;
        Ok(Self {
            label: format!("polynomial({s})"),
            evaluator: Arc::new(move |z| v.eval(z)),
            reference: v,
            constant: v.submultiplicative_constant(),
        })
    }

    /// `m ≡ 1`.
    pub fn constant() -> Self {
        Self {
            label: "constant".into(),
            evaluator: Arc::new(|_| 1.0),
            reference: PolynomialWeight::unit(),
            constant: 1.0,
        }
    }

    /// `m(z) = e^{rate |z|}`. Not polynomially moderate; the claimed
    /// reference and constant are those of `v_s` and fail on large shifts.
    pub fn exponential(rate: f64, s: f64) -> Result<Self> {
        let v = PolynomialWeight::new(s)?;
        Ok(Self {
            label: format!("exponential({rate})"),
            evaluator: Arc::new(move |z| (rate * z.iter().map(|a| a * a).sum::<f64>().sqrt()).exp()),
            reference: v,
            constant: v.submultiplicative_constant(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn reference(&self) -> PolynomialWeight {
        self.reference
    }

    pub fn constant_bound(&self) -> f64 {
        self.constant
    }

    /// Same evaluator and reference weight with a different claimed constant.
    pub fn with_constant(mut self, constant: f64) -> Result<Self> {
        if !(constant.is_finite() && constant > 0.0) {
            return Err(Error::InvalidWeight(format!("moderation constant must be positive, got {constant}")));
        }
        self.constant = constant;
        Ok(self)
    }
}

impl Weight for ModerateWeight {
    fn eval(&self, z: &[f64]) -> f64 {
        (self.evaluator)(z)
    }
}

impl fmt::Debug for ModerateWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModerateWeight")
            .field("label", &self.label)
            .field("reference", &self.reference)
            .field("constant", &self.constant)
            .finish()
    }
}

/// Evaluates a weight, rejecting non-finite arguments.
pub fn eval_weight<W: Weight + ?Sized>(w: &W, z: &[f64]) -> Result<f64> {
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("weight argument"));
    }
    Ok(w.eval(z))
}

#[derive(Clone, Debug, Serialize)]
pub struct ModerationReport {
    pub max_ratio: f64,
    pub constant: f64,
    pub pass: bool,
    pub worst_pair: (Vec<f64>, Vec<f64>),
    pub samples: usize,
}

/// Tests `m(z₁ + z₂) ≤ C v(z₁) m(z₂)` on every sampled pair.
pub fn moderation_check(m: &ModerateWeight, samples: &[(Vec<f64>, Vec<f64>)]) -> Result<ModerationReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("moderation check needs at least one sample pair".into()));
    }
    let v = m.reference();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut worst = samples[0].clone();
    let mut sum = Vec::new();
    for (z1, z2) in samples {
        if z1.len() != z2.len() {
            return Err(Error::DimensionMismatch { expected: z1.len(), found: z2.len() });
        }
        sum.clear();
        sum.extend(z1.iter().zip(z2).map(|(a, b)| a + b));
        let top = eval_weight(m, &sum)?;
        let bottom = eval_weight(m, z2)?;
        if !(top > 0.0 && bottom > 0.0) || !top.is_finite() || !bottom.is_finite() {
            return Err(Error::InvalidWeight(format!("{} is not positive and finite on the samples", m.label())));
        }
        let ratio = top / (v.eval(z1) * bottom);
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = (z1.clone(), z2.clone());
        }
    }
    Ok(ModerationReport {
        max_ratio,
        constant: m.constant_bound(),
        pass: max_ratio <= m.constant_bound(),
        worst_pair: worst,
        samples: samples.len(),
    })
}

/// All pairs of points of the integer grid `[−r, r]ⁿ` (the default check
/// uses `r = 8`). The count is `(2r+1)^{2n}`, so keep `n` small.
pub fn integer_grid_pairs(n: usize, r: i64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let points = integer_grid(n, r);
    let mut pairs = Vec::with_capacity(points.len() * points.len());
    for a in &points {
        for b in &points {
            pairs.push((a.clone(), b.clone()));
        }
    }
    pairs
}

pub const DEFAULT_MODERATION_RADIUS: i64 = 8;

fn integer_grid(n: usize, r: i64) -> Vec<Vec<f64>> {
    let side = (2 * r + 1) as usize;
    let mut out = Vec::with_capacity(side.pow(n as u32));
    let mut cur = vec![-r; n];
    for _ in 0..side.pow(n as u32) {
        out.push(cur.iter().map(|&k| k as f64).collect());
        for slot in cur.iter_mut().rev() {
            if *slot < r {
                *slot += 1;
                break;
            }
            *slot = -r;
        }
    }
    out
}

/// Built-in weight selector: `polynomial(s)`, `constant`, or
/// `exponential(rate)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum WeightSpec {
    Polynomial(f64),
    Constant,
    Exponential(f64),
}

impl WeightSpec {
    pub fn build(&self) -> Result<ModerateWeight> {
        match *self {
            WeightSpec::Polynomial(s) => ModerateWeight::polynomial(s),
            WeightSpec::Constant => Ok(ModerateWeight::constant()),
            WeightSpec::Exponential(rate) => ModerateWeight::exponential(rate, 0.0),
        }
    }

    /// The polynomial weight `v` this selector refers to.
    pub fn polynomial(&self) -> Result<PolynomialWeight> {
        Ok(self.build()?.reference())
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let arg = |prefix: &str| -> Option<Result<f64>> {
            let inner = t.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(inner.trim().parse::<f64>().map_err(|e| Error::Parse(format!("weight argument {inner:?}: {e}"))))
        };
        match t {
            "constant" | "unit" | "one" => return Ok(WeightSpec::Constant),
            _ => {}
        }
        if let Some(v) = arg("polynomial") {
            return Ok(WeightSpec::Polynomial(v?));
        }
        if let Some(v) = arg("exponential") {
            return Ok(WeightSpec::Exponential(v?));
        }
        Err(Error::Parse(format!("unknown weight selector {s:?}; expected polynomial(s), constant or exponential(rate)")))
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Polynomial(s) => write!(f, "polynomial({s})"),
            WeightSpec::Constant => write!(f, "constant"),
            WeightSpec::Exponential(r) => write!(f, "exponential({r})"),
        }
    }
}
