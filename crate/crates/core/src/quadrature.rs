//! Globally adaptive Gauss–Kronrod (7, 15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with an error bound.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Kronrod estimate, error estimate and estimate of `int |f|`.
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let h = h.abs();
    (resk * h, ((resk - resg) * h).abs(), resabs * h)
}

/// Integrates `f` over `[a, b]` to `|err| <= max(abs_tol, rel_tol |I|)`.
///
/// An error estimate at the rounding level of `int |f|` is also accepted,
/// so integrands that cancel to (nearly) zero terminate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    if a > b {
        let q = integrate(f, b, a, rel_tol, abs_tol)?;
        return Ok(Quadrature {
            value: -q.value,
            ..q
        });
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    const MAX_INTERVALS: usize = 4000;
    let (v, e, l1) = kronrod(&f, a, b);
    let mut parts = vec![(a, b, v, e, l1)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let norm: f64 = parts.iter().map(|p| p.4).sum();
        if !total.is_finite() {
            return Err(Error::Numeric(format!(
                "integrand is not finite on [{a}, {b}]"
            )));
        }
        if err
            <= abs_tol
                .max(rel_tol * total.abs())
                .max(50.0 * f64::EPSILON * norm)
        {
            return Ok(Quadrature {
                value: total,
                error: err,
                intervals: parts.len(),
            });
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not converge: estimate {total:e}, \
                 error {err:e} after {} subintervals",
                parts.len()
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, _, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] cannot subdivide further near {mid}"
            )));
        }
        let (v1, e1, n1) = kronrod(&f, lo, mid);
        let (v2, e2, n2) = kronrod(&f, mid, hi);
        parts.push((lo, mid, v1, e1, n1));
        parts.push((mid, hi, v2, e2, n2));
    }
}
