//! Classical data of the tunneling problem: the singular point `Q+`, the
//! actions `S(Q)`, `A(Q) = 2 S+ - 2 S(Q)` and the regularized duration
//! integrals that enter every large-order prediction.
//!
//! Integrals are split at `Q+/2`. Near the origin `V = Q^2 P(Q)`; near `Q+`
//! the potential is Taylor-shifted, `V(Q+ - xi) = xi R(xi)` at a simple
//! turning point (then `xi = t^2` removes the square-root endpoint) or
//! `xi^2 R(xi)` at a degenerate minimum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly;
use crate::quadrature::integrate;
use crate::scenario::{Correction, Potential, Scenario, TurningPointClass};
use crate::series::{float_from_rational, horner, BigFloat, Mode, Scalar, TruncatedSeries};
use dashu_ratio::RBig;

use std::f64::consts::PI;

const ORIGIN_SERIES_ORDER: usize = 48;
const REL_TOL: f64 = 1e-14;

/// The singular point controlling the large orders.
#[derive(Clone, Debug)]
pub struct TurningPoint {
    pub kind: TurningPointClass,
    /// `Q+` at working precision; `None` for kind `none`.
    pub q_plus: Option<Scalar>,
    /// `a = -V'(Q+)` (simple kind).
    pub slope: Option<f64>,
    /// `omega = sqrt(V''(Q+))` (degenerate kind).
    pub omega: Option<f64>,
    /// `V(pi)` (sphere kind).
    pub e_top: Option<f64>,
    /// Multiplicity confirmed by an exact gcd over the rationals.
    pub exact_confirmed: bool,
    /// Taylor coefficients of `V(Q+ - xi)` in `xi`.
    local: Vec<f64>,
}

impl TurningPoint {
    pub fn q_plus_f64(&self) -> Option<f64> {
        self.q_plus.as_ref().map(Scalar::to_f64)
    }
}

fn pi_float(bits: usize) -> BigFloat {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let atan_inv = |x: i64| -> BigFloat {
        let w = bits + 16;
        let inv = float_from_rational(&RBig::from_parts_signed(1.into(), x.into()), w);
        let inv2 = &inv * &inv;
        let mut term = inv.clone();
        let mut sum = inv;
        let mut k: i64 = 1;
        loop {
            term = -(&term * &inv2);
            let contrib = &term / &crate::series::float_from_int(2 * k + 1, w);
            if magnitude(&contrib).is_none_or(|m| m < -(w as isize) - 8) {
                break;
            }
            sum = &sum + &contrib;
            k += 1;
        }
        sum
    };
    let w = bits + 16;
    let pi = &(&atan_inv(5) * &crate::series::float_from_int(16, w))
        - &(&atan_inv(239) * &crate::series::float_from_int(4, w));
    pi.with_precision(bits).value()
}

/// Binary order of magnitude, `None` for zero.
fn magnitude(x: &BigFloat) -> Option<isize> {
    let r = x.repr();
    if *r.significand() == dashu_int::IBig::ZERO {
        None
    } else {
        Some(r.exponent() + r.digits() as isize)
    }
}

fn eval_big(coeffs: &[BigFloat], x: &BigFloat, bits: usize) -> BigFloat {
    let mut acc = BigFloat::ZERO.with_precision(bits).value();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

fn divide_exact(a: &[RBig], b: &[RBig]) -> Vec<RBig> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![RBig::ZERO; a.len().saturating_sub(db)];
    for i in (0..q.len()).rev() {
        let f = &r[i + db] / &b[db];
        for (j, bc) in b.iter().enumerate() {
            r[i + j] = &r[i + j] - &f * bc;
        }
        q[i] = f;
    }
    q
}

/// Smallest positive zero of `V` and its classification.
pub fn find_turning_point(s: &Scenario) -> Result<TurningPoint> {
    let bits = s.precision_bits;
    if s.correction == Correction::Sphere {
        let pi = pi_float(bits);
        let v_top = match &s.potential {
            Potential::OneMinusCos => 2.0,
            Potential::Polynomial(c) => {
                let f: Vec<f64> = c
                    .iter()
                    .map(|x| Scalar::Exact(x.clone()).to_f64())
                    .collect();
                horner(&f, PI)
            }
        };
        if !s.potential.is_polynomial() || v_top > 0.0 {
            let local = match &s.potential {
                Potential::OneMinusCos => Vec::new(),
                Potential::Polynomial(c) => taylor_shift(c, &pi, bits),
            };
            return Ok(TurningPoint {
                kind: TurningPointClass::SphereSingular,
                q_plus: Some(Scalar::Float(pi)),
                slope: None,
                omega: None,
                e_top: Some(v_top),
                exact_confirmed: true,
                local,
            });
        }
    }
    let coeffs = match &s.potential {
        Potential::Polynomial(c) => c.clone(),
        Potential::OneMinusCos => {
            return Err(Error::Refused(
                "a cosine potential needs the sphere correction".into(),
            ))
        }
    };
    let none = TurningPoint {
        kind: TurningPointClass::None,
        q_plus: None,
        slope: None,
        omega: None,
        e_top: None,
        exact_confirmed: true,
        local: Vec::new(),
    };
    // P = V / Q^2, P(0) = 1/2
    let p: Vec<RBig> = coeffs.iter().skip(2).cloned().collect();
    let mut p_trim = p.clone();
    while p_trim.last().is_some_and(|c| *c == RBig::ZERO) {
        p_trim.pop();
    }
    if p_trim.len() < 2 {
        return Ok(none);
    }
    let g = poly::gcd_exact(&p_trim, &poly::derivative_exact(&p_trim));
    let squarefree = divide_exact(&p_trim, &g);
    let sf_f64: Vec<f64> = squarefree
        .iter()
        .map(|x| Scalar::Exact(x.clone()).to_f64())
        .collect();
    let mut candidates: Vec<f64> = poly::complex_roots(&sf_f64)
        .into_iter()
        .filter(|z| z.re > 0.0 && z.im.abs() <= 1e-7 * z.norm().max(1.0))
        .map(|z| z.re)
        .collect();
    candidates.sort_by(f64::total_cmp);
    let Some(&guess) = candidates.first() else {
        return Ok(none);
    };
    // Newton polish on the squarefree part (simple roots only)
    let w = bits + 32;
    let sf_big: Vec<BigFloat> = squarefree
        .iter()
        .map(|c| float_from_rational(c, w))
        .collect();
    let dsf: Vec<BigFloat> = poly::derivative_exact(&squarefree)
        .iter()
        .map(|c| float_from_rational(c, w))
        .collect();
    let mut x = crate::series::float_from_f64(guess, w);
    for _ in 0..200 {
        let fx = eval_big(&sf_big, &x, w);
        let dfx = eval_big(&dsf, &x, w);
        let step = &fx / &dfx;
        x = &x - &step;
        if magnitude(&step).is_none_or(|m| m < -(bits as isize)) {
            break;
        }
    }
    let q_plus = x.clone().with_precision(bits).value();
    // multiplicity: root of gcd(P, P') <=> multiple root of V
    let tol_exp = -(bits as f64) / 4.0 * std::f64::consts::LOG2_10;
    let is_root = |c: &[RBig]| -> bool {
        if c.len() < 2 {
            return false;
        }
        let big: Vec<BigFloat> = c.iter().map(|v| float_from_rational(v, w)).collect();
        let val = eval_big(&big, &x, w);
        magnitude(&val).is_none_or(|m| (m as f64) < tol_exp)
    };
    let multiple_exact = is_root(&g);
    let local = taylor_shift(&coeffs, &x, bits);
    // V'(Q+) from the shifted series: V(Q+ - xi) = b1 xi + ..., V'(Q+) = -b1
    let slope = local.get(1).copied().unwrap_or(0.0);
    let derivative_small = slope.abs() < 10f64.powf(-(bits as f64) / 4.0).max(1e-30);
    if multiple_exact != derivative_small {
        return Err(Error::Numeric(format!(
            "turning point {guess}: V'(Q+) = {slope:e} disagrees with the exact multiplicity test"
        )));
    }
    if !multiple_exact {
        return Ok(TurningPoint {
            kind: TurningPointClass::Simple,
            q_plus: Some(Scalar::Float(q_plus)),
            slope: Some(slope),
            omega: None,
            e_top: None,
            exact_confirmed: true,
            local,
        });
    }
    let gg = poly::gcd_exact(&g, &poly::derivative_exact(&g));
    if is_root(&gg) {
        return Err(Error::Refused(format!(
            "V has a zero of order three or more at Q+ = {guess}"
        )));
    }
    let omega = (2.0 * local[2]).sqrt();
    Ok(TurningPoint {
        kind: TurningPointClass::Degenerate,
        q_plus: Some(Scalar::Float(q_plus)),
        slope: None,
        omega: Some(omega),
        e_top: None,
        exact_confirmed: true,
        local,
    })
}

/// Coefficients of `V(x0 - xi)` in powers of `xi`, as f64.
fn taylor_shift(coeffs: &[RBig], x0: &BigFloat, bits: usize) -> Vec<f64> {
    let w = bits + 32;
    let mut c: Vec<BigFloat> = coeffs.iter().map(|v| float_from_rational(v, w)).collect();
    let n = c.len();
    // repeated synthetic division gives V(x0 + h)
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * x0;
            c[j] = &c[j] + &t;
        }
    }
    c.iter()
        .enumerate()
        .map(|(j, v)| {
            let f = v.to_f64().value();
            if j % 2 == 1 {
                -f
            } else {
                f
            }
        })
        .collect()
}

/// Integrable-after-subtraction variants of the regularized duration on the sphere.
#[derive(Clone, Debug, Serialize)]
pub struct SphereVariants {
    /// `int_0^pi [1/sqrt(2V) - 1/theta] dtheta`, subtraction at the singular end.
    pub origin_subtracted: f64,
    /// Literal `int [1/sqrt(2V) - 1/(pi - theta)]` on `[delta, pi - delta]`
    /// for shrinking `delta`; grows without bound.
    pub printed_cutoffs: Vec<(f64, f64)>,
    pub printed_converges: bool,
}

/// Quadrature-based evaluator of the classical quantities.
#[derive(Clone, Debug)]
pub struct Classical {
    pub kind: TurningPointClass,
    pub n: u32,
    pub q_plus: f64,
    sphere_cos: bool,
    p: Vec<f64>,
    origin: Vec<f64>,
    patch: f64,
    local: Vec<f64>,
    omega: f64,
    rel_tol: f64,
}

impl Classical {
    pub fn new(s: &Scenario, tp: &TurningPoint) -> Result<Classical> {
        let q_plus = tp.q_plus_f64().ok_or_else(|| {
            Error::NoTurningPoint("V has no positive zero; the expansion does not diverge".into())
        })?;
        let sphere_cos = matches!(s.potential, Potential::OneMinusCos);
        let p: Vec<f64> = s
            .potential
            .coefficients(s.m_trunc.max(4))
            .iter()
            .skip(2)
            .map(|x| Scalar::Exact(x.clone()).to_f64())
            .collect();
        // (1/sqrt(2V/Q^2) - 1)/Q as a series for small Q
        let order = ORIGIN_SERIES_ORDER;
        let v = s.potential_series_to(order + 3, Mode::Exact);
        let two_p = v.scale(&Scalar::from_int(2, Mode::Exact)).shift_down(2)?;
        let root = two_p.sqrt_unit()?;
        let one = TruncatedSeries::constant(Scalar::one(Mode::Exact), root.order(), "1");
        let inv = one.div(&root)?;
        let origin: Vec<f64> = inv.to_f64_vec().into_iter().skip(1).collect();
        let p_radius = if sphere_cos {
            2.0 * PI
        } else {
            poly::min_root_modulus(poly::trim(&p))
        };
        let patch = (p_radius / 4.0).min(q_plus / 4.0);
        Ok(Classical {
            kind: tp.kind,
            n: s.n,
            q_plus,
            sphere_cos,
            p,
            origin,
            patch,
            local: tp.local.clone(),
            omega: tp.omega.unwrap_or(f64::NAN),
            rel_tol: REL_TOL,
        })
    }

    /// Same evaluator with a different quadrature tolerance.
    pub fn with_tolerance(mut self, rel_tol: f64) -> Classical {
        self.rel_tol = rel_tol;
        self
    }

    fn split(&self) -> f64 {
        0.5 * self.q_plus
    }

    fn quad<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        Ok(integrate(f, a, b, self.rel_tol, 1e-300)?.value)
    }

    /// Quadrature for subtracted integrands, which may cancel to zero:
    /// the tolerance is also met at unit absolute scale.
    fn quad_reg<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        Ok(integrate(f, a, b, self.rel_tol, self.rel_tol)?.value)
    }

    /// `V(Q)` on `[0, Q+]`.
    pub fn v(&self, q: f64) -> f64 {
        if self.sphere_cos {
            let s = (0.5 * q).sin();
            2.0 * s * s
        } else {
            q * q * horner(&self.p, q)
        }
    }

    /// `sqrt(2V)` from the origin side.
    fn sqrt2v(&self, q: f64) -> f64 {
        if self.sphere_cos {
            2.0 * (0.5 * q).sin()
        } else {
            q * (2.0 * horner(&self.p, q)).sqrt()
        }
    }

    /// `1/sqrt(2V) - 1/Q`, from the series near the origin.
    fn inv_minus_pole(&self, q: f64) -> f64 {
        if q < self.patch {
            horner(&self.origin, q)
        } else {
            1.0 / self.sqrt2v(q) - 1.0 / q
        }
    }

    fn local_rest(&self, xi: f64, skip: usize) -> f64 {
        horner(&self.local[skip..], xi)
    }

    /// Action to the singular point from `Q`: `int_Q^{Q+} sqrt(2V)`.
    fn tail_action(&self, q: f64) -> Result<f64> {
        let qm = self.split();
        if q < qm {
            return Ok(self.quad(|x| self.sqrt2v(x), q, qm)? + self.tail_action(qm)?);
        }
        let xi_end = self.q_plus - q;
        match self.kind {
            TurningPointClass::Simple => self.quad(
                |t| {
                    let r = self.local_rest(t * t, 1);
                    2.0 * t * t * (2.0 * r).sqrt()
                },
                0.0,
                xi_end.sqrt(),
            ),
            TurningPointClass::Degenerate => {
                self.quad(|xi| xi * (2.0 * self.local_rest(xi, 2)).sqrt(), 0.0, xi_end)
            }
            TurningPointClass::SphereSingular => self.quad(|x| self.sqrt2v(x), q, self.q_plus),
            TurningPointClass::None => Err(Error::NoTurningPoint("kind none".into())),
        }
    }

    /// `S+ = int_0^{Q+} sqrt(2V)`.
    pub fn s_plus(&self) -> Result<f64> {
        self.tail_action(0.0)
    }

    /// `S(Q) = int_0^Q sqrt(2V)` for `0 <= Q <= Q+`.
    pub fn s_of(&self, q: f64) -> Result<f64> {
        self.check_point(q)?;
        if q <= self.split() {
            self.quad(|x| self.sqrt2v(x), 0.0, q)
        } else {
            Ok(self.s_plus()? - self.tail_action(q)?)
        }
    }

    /// `A(Q) = 2 S+ - 2 S(Q)`, computed without cancellation near `Q+`.
    pub fn a_of(&self, q: f64) -> Result<f64> {
        self.check_point(q)?;
        Ok(2.0 * self.tail_action(q)?)
    }

    fn check_point(&self, q: f64) -> Result<()> {
        if !(0.0..=self.q_plus).contains(&q) {
            return Err(Error::Domain(format!(
                "Q = {q} is outside [0, Q+] = [0, {}]",
                self.q_plus
            )));
        }
        Ok(())
    }

    /// Transit exponent from `Q` to the singular point: the duration
    /// `int_Q^{Q+} dQ/sqrt(2V)` (simple, sphere) or its version with the
    /// `1/(omega (Q+ - Q))` pole removed (degenerate).
    pub fn duration_of(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < self.q_plus) {
            return Err(Error::Domain(format!(
                "Q = {q} is outside (0, Q+) = (0, {})",
                self.q_plus
            )));
        }
        let qm = self.split();
        let left_integrand = |x: f64| -> f64 {
            let base = 1.0 / self.sqrt2v(x);
            if self.kind == TurningPointClass::Degenerate {
                base - 1.0 / (self.omega * (self.q_plus - x))
            } else {
                base
            }
        };
        if self.kind == TurningPointClass::SphereSingular {
            return self.quad_reg(left_integrand, q, self.q_plus);
        }
        let (left, start) = if q < qm {
            (self.quad_reg(left_integrand, q, qm)?, qm)
        } else {
            (0.0, q)
        };
        let xi_end = self.q_plus - start;
        let right = match self.kind {
            TurningPointClass::Simple => self.quad_reg(
                |t| 2.0 / (2.0 * self.local_rest(t * t, 1)).sqrt(),
                0.0,
                xi_end.sqrt(),
            )?,
            TurningPointClass::Degenerate => self.quad_reg(
                |xi| (1.0 / (2.0 * self.local_rest(xi, 2)).sqrt() - 1.0 / self.omega) / xi,
                0.0,
                xi_end,
            )?,
            _ => unreachable!("handled above"),
        };
        Ok(left + right)
    }

    /// Regularized duration integral `I` of the case.
    pub fn regularized_duration(&self) -> Result<f64> {
        let qm = self.split();
        match self.kind {
            TurningPointClass::Simple => {
                let left = self.quad_reg(|x| self.inv_minus_pole(x), 0.0, qm)?;
                let right = self.quad_reg(
                    |t| {
                        2.0 / (2.0 * self.local_rest(t * t, 1)).sqrt()
                            - 2.0 * t / (self.q_plus - t * t)
                    },
                    0.0,
                    (self.q_plus - qm).sqrt(),
                )?;
                Ok(left + right)
            }
            TurningPointClass::Degenerate => {
                let om = self.omega;
                let left = self.quad_reg(
                    |x| self.inv_minus_pole(x) - 1.0 / (om * (self.q_plus - x)),
                    0.0,
                    qm,
                )?;
                let right = self.quad_reg(
                    |xi| {
                        (1.0 / (2.0 * self.local_rest(xi, 2)).sqrt() - 1.0 / om) / xi
                            - 1.0 / (self.q_plus - xi)
                    },
                    0.0,
                    self.q_plus - qm,
                )?;
                Ok(left + right)
            }
            TurningPointClass::SphereSingular => {
                self.quad_reg(|x| self.inv_minus_pole(x), 0.0, self.q_plus)
            }
            TurningPointClass::None => Err(Error::NoTurningPoint("kind none".into())),
        }
    }

    /// Regularized integrand for the degenerate case at a point (diagnostics).
    pub fn degenerate_integrand(&self, q: f64) -> f64 {
        if q <= self.split() {
            self.inv_minus_pole(q) - 1.0 / (self.omega * (self.q_plus - q))
        } else {
            let xi = self.q_plus - q;
            (1.0 / (2.0 * self.local_rest(xi, 2)).sqrt() - 1.0 / self.omega) / xi - 1.0 / q
        }
    }

    /// Both readings of the sphere duration integral.
    pub fn sphere_variants(&self) -> Result<SphereVariants> {
        if self.kind != TurningPointClass::SphereSingular {
            return Err(Error::Domain("sphere variants need the sphere kind".into()));
        }
        let origin_subtracted = self.regularized_duration()?;
        let mut printed_cutoffs = Vec::new();
        for delta in [1e-2, 1e-4, 1e-6] {
            let v = self.quad_reg(
                |x| 1.0 / self.sqrt2v(x) - 1.0 / (self.q_plus - x),
                delta,
                self.q_plus - delta,
            )?;
            printed_cutoffs.push((delta, v));
        }
        let spread = (printed_cutoffs[2].1 - printed_cutoffs[1].1).abs();
        Ok(SphereVariants {
            origin_subtracted,
            printed_cutoffs,
            printed_converges: spread < 1e-6,
        })
    }
}

/// Actions and duration integral of a scenario.
#[derive(Clone, Debug)]
pub struct ActionData {
    pub s_plus: f64,
    pub a0: f64,
    pub i_reg: f64,
    pub classical: Classical,
}

impl ActionData {
    pub fn s_of(&self, q: f64) -> Result<f64> {
        self.classical.s_of(q)
    }

    pub fn a_of(&self, q: f64) -> Result<f64> {
        self.classical.a_of(q)
    }

    pub fn duration_of(&self, q: f64) -> Result<f64> {
        self.classical.duration_of(q)
    }
}

pub fn action_integrals(s: &Scenario, tp: &TurningPoint) -> Result<ActionData> {
    let classical = Classical::new(s, tp)?;
    let s_plus = classical.s_plus()?;
    let i_reg = classical.regularized_duration()?;
    Ok(ActionData {
        s_plus,
        a0: 2.0 * s_plus,
        i_reg,
        classical,
    })
}

pub fn regularized_duration(s: &Scenario, tp: &TurningPoint) -> Result<f64> {
    Classical::new(s, tp)?.regularized_duration()
}

/// `cos(pi n / 2)` without rounding: 0, -1 or 1.
pub fn cos_half_pi_n(n: u32) -> f64 {
    match n % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

/// Normalization constant of the degenerate-minimum asymptotics.
pub fn degenerate_constant(omega: f64) -> f64 {
    (2.0 * omega).powf(1.0 / (2.0 * omega))
        / ((2.0 * PI).sqrt() * libm::tgamma((1.0 + omega) / (2.0 * omega)))
}

/// Amplitude `B` of the `B/|Q|^n` divergence of the large-order
/// coefficient functions near the origin.
pub fn singularity_amplitude(s: &Scenario, tp: &TurningPoint, act: &ActionData) -> Result<f64> {
    let q_plus = tp
        .q_plus_f64()
        .ok_or_else(|| Error::NoTurningPoint("no amplitude without a turning point".into()))?;
    let n = s.n as i32;
    let e_i = act.i_reg.exp();
    match tp.kind {
        TurningPointClass::Simple => Ok((q_plus * e_i).powi(n) / (2.0 * PI)),
        TurningPointClass::Degenerate => {
            if s.n != 1 {
                return Err(Error::Refused(
                    "degenerate minima are treated in one dimension only".into(),
                ));
            }
            let omega = tp.omega.expect("degenerate kind has omega");
            Ok(degenerate_constant(omega) * q_plus.powf(1.0 / omega + 1.0) * e_i)
        }
        TurningPointClass::SphereSingular => Ok(-cos_half_pi_n(s.n) / PI * (PI * e_i).powi(n)),
        TurningPointClass::None => Err(Error::NoTurningPoint(
            "no amplitude without a turning point".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::preset;

    fn setup(name: &str, n: Option<u32>) -> (Scenario, TurningPoint, ActionData) {
        let s = preset(name, n).unwrap();
        let tp = find_turning_point(&s).unwrap();
        let act = action_integrals(&s, &tp).unwrap();
        (s, tp, act)
    }

    #[test]
    fn pi_to_high_precision() {
        let pi = pi_float(256);
        assert_eq!(pi.to_f64().value(), PI);
        let digits = "3.14159265358979323846264338327950288419716939937510582097494459230781640628";
        let reference = float_from_rational(&Scalar::parse_rational(digits).unwrap(), 256);
        let diff = (&pi - &reference).to_f64().value().abs();
        assert!(diff < 1e-74, "{diff:e}");
    }

    #[test]
    fn cubic_turning_point() {
        let s = preset("cubic", None).unwrap();
        let tp = find_turning_point(&s).unwrap();
        assert_eq!(tp.kind, TurningPointClass::Simple);
        assert!((tp.q_plus_f64().unwrap() - 0.5).abs() < 1e-15);
        assert!((tp.slope.unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn double_well_turning_point() {
        let s = preset("double_well", None).unwrap();
        let tp = find_turning_point(&s).unwrap();
        assert_eq!(tp.kind, TurningPointClass::Degenerate);
        assert!((tp.q_plus_f64().unwrap() - 1.0).abs() < 1e-15);
        assert!((tp.omega.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_has_none() {
        let s = preset("harmonic", None).unwrap();
        let tp = find_turning_point(&s).unwrap();
        assert_eq!(tp.kind, TurningPointClass::None);
        assert!(Classical::new(&s, &tp).is_err());
    }

    #[test]
    fn cubic_actions() {
        let (_, _, act) = setup("cubic", None);
        assert!((act.s_plus - 1.0 / 15.0).abs() < 1e-15);
        assert!((act.i_reg - 2.0 * 2f64.ln()).abs() < 1e-13);
        let a = act.a_of(0.3).unwrap();
        assert!((a - 0.064_088_827_246_079_154_4).abs() < 1e-15, "{a}");
        let s0 = 0.4f64.sqrt();
        let dur = ((1.0 + s0) / (1.0 - s0)).ln();
        assert!((act.duration_of(0.3).unwrap() - dur).abs() < 1e-13);
    }

    #[test]
    fn double_well_actions() {
        let (_, _, act) = setup("double_well", None);
        assert!((act.s_plus - 1.0 / 6.0).abs() < 1e-15);
        assert!(act.i_reg.abs() < 1e-13);
        for q in [1e-3, 0.1, 0.25, 0.5, 0.75, 0.99] {
            assert!(act.classical.degenerate_integrand(q).abs() < 1e-12, "{q}");
        }
    }

    #[test]
    fn neg_quartic_actions() {
        let (_, tp, act) = setup("neg_quartic", None);
        assert!((tp.q_plus_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((act.s_plus - 1.0 / 6.0).abs() < 1e-15);
        assert!((act.i_reg - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn sphere_actions_and_variants() {
        let (s, tp, act) = setup("sphere", Some(2));
        assert_eq!(tp.kind, TurningPointClass::SphereSingular);
        assert!((act.a0 - 8.0).abs() < 1e-14);
        assert!((act.i_reg - (4.0 / PI).ln()).abs() < 1e-13);
        let b = singularity_amplitude(&s, &tp, &act).unwrap();
        assert!((b - 16.0 / PI).abs() < 1e-12);
        let v = act.classical.sphere_variants().unwrap();
        assert!(!v.printed_converges);
    }

    #[test]
    fn amplitudes() {
        let (s, tp, act) = setup("cubic", None);
        assert!((singularity_amplitude(&s, &tp, &act).unwrap() - 1.0 / PI).abs() < 1e-14);
        let (s, tp, act) = setup("double_well", None);
        let b = singularity_amplitude(&s, &tp, &act).unwrap();
        assert!((b - 1.0 / PI.sqrt()).abs() < 1e-13);
        let (s, tp, act) = setup("sphere", Some(3));
        assert_eq!(singularity_amplitude(&s, &tp, &act).unwrap(), 0.0);
    }

    #[test]
    fn action_is_monotone_and_vanishes_at_turning_point() {
        for name in ["cubic", "double_well", "neg_quartic"] {
            let (_, tp, act) = setup(name, None);
            let qp = tp.q_plus_f64().unwrap();
            assert!((act.a_of(0.0).unwrap() - act.a0).abs() < 1e-14);
            assert!(act.a_of(qp).unwrap().abs() < 1e-10);
            let mut last = act.a0;
            for i in 1..20 {
                let a = act.a_of(qp * i as f64 / 20.0).unwrap();
                assert!(a > 0.0 && a < last);
                last = a;
            }
        }
    }

    #[test]
    fn refinement_is_stable() {
        for name in ["cubic", "double_well", "neg_quartic"] {
            let (s, tp, act) = setup(name, None);
            let fine = Classical::new(&s, &tp).unwrap().with_tolerance(1e-15);
            let sp = fine.s_plus().unwrap();
            let ir = fine.regularized_duration().unwrap();
            assert!(((sp - act.s_plus) / sp).abs() <= 1e-12);
            assert!((ir - act.i_reg).abs() <= 1e-12 * ir.abs().max(1.0));
        }
    }
}
