//! Adaptive Gauss–Kronrod (7/15) quadrature for complex integrands on a
//! finite interval.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn kronrod(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by recursive
/// bisection. Fails with [`Error::Quadrature`] if `max_intervals` is
/// exhausted first.
pub fn integrate(
    mut f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    let (v, e) = kronrod(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol {
            break;
        }
        if pieces.len() >= max_intervals {
            return Err(Error::Quadrature { error_estimate: total_err });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    // Sum in interval order so the result does not depend on refinement history.
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value = pieces.iter().map(|p| p.2).sum();
    let error_estimate = pieces.iter().map(|p| p.3).sum();
    Ok(Quadrature { value, error_estimate, evaluations })
}

/// Integrates a vector-valued integrand over `[a, b]`. The interval is first
/// split into `panels` equal pieces; each piece is bisected until its
/// Gauss–Kronrod error, maximised over components, falls below its share of
/// `tol`. `f(ω, out)` writes all components at `ω`.
pub fn integrate_vector(
    mut f: impl FnMut(f64, &mut [Complex64]),
    len: usize,
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
    max_depth: usize,
) -> Result<(Vec<Complex64>, f64)> {
    let total = b - a;
    let panels = panels.max(1);
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    let mut kron = vec![Complex64::new(0.0, 0.0); len];
    let mut gauss = vec![Complex64::new(0.0, 0.0); len];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let mut err_total = 0.0;
    let mut stack: Vec<(f64, f64, usize)> = Vec::new();
    for p in (0..panels).rev() {
        let lo = a + total * p as f64 / panels as f64;
        let hi = a + total * (p + 1) as f64 / panels as f64;
        stack.push((lo, hi, 0));
    }
    while let Some((lo, hi, depth)) = stack.pop() {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        f(c, &mut buf);
        for i in 0..len {
            kron[i] = buf[i] * WGK[7];
            gauss[i] = buf[i] * WG[3];
        }
        for j in 0..7 {
            let dx = h * XGK[j];
            for sign in [-1.0, 1.0] {
                f(c + sign * dx, &mut buf);
                for i in 0..len {
                    kron[i] += buf[i] * WGK[j];
                    if j % 2 == 1 {
                        gauss[i] += buf[i] * WG[j / 2];
                    }
                }
            }
        }
        let err = kron.iter().zip(&gauss).map(|(k, g)| (k - g).norm()).fold(0.0, f64::max) * h;
        let budget = tol * (hi - lo) / total;
        if err <= budget || depth >= max_depth {
            if err > budget {
                return Err(Error::Quadrature { error_estimate: err });
            }
            for i in 0..len {
                acc[i] += kron[i] * h;
            }
            err_total += err;
        } else {
            stack.push((c, hi, depth + 1));
            stack.push((lo, c, depth + 1));
        }
    }
    Ok((acc, err_total))
}
