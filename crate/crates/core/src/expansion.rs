//! Hamilton–Jacobi pre-quantities and the order-by-order recursion for the
//! energy coefficients `E^(k)` and coefficient functions `Phi_k(Q)`.
//!
//! The ground state is written as `Psi = Phi exp(-S/hbar)` with
//! `Phi = sum_k hbar^k Phi_k` and `E = hbar (n/2 + sum_k hbar^k E^(k))`.
//! Each order solves the Q-multiplied equation
//!
//! ```text
//! 2Q S' Phi_k' + Q(S'' - n) Phi_k + (n-1) u S' Phi_k
//!     = Q Phi_{k-1}'' + (n-1) u Phi_{k-1}' + 2Q sum_{p=1}^{k} E^(p) Phi_{k-p}
//! ```
//!
//! power by power: `Q^0` is a consistency condition, `Q^1` fixes `E^(k)`,
//! and `Q^m` (m >= 2) fixes the coefficient of `Q^(m-1)` in `Phi_k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{Scenario, ValidatedScenario};
use crate::series::{Mode, Scalar, TruncatedSeries};

/// Hamilton–Jacobi data shared by all orders.
#[derive(Clone, Debug)]
pub struct HJData {
    /// `w = S' = sqrt(2V)`, truncated at `M - 1`.
    pub w: TruncatedSeries,
    /// `S = int_0^Q w`.
    pub s: TruncatedSeries,
    pub u: TruncatedSeries,
    /// Zeroth-order coefficient function, `Phi_0(0) = 1`, truncated at `M - 2`.
    pub phi0: TruncatedSeries,
    pub n: u32,
    pub m_trunc: usize,
}

/// Gauge that fixes the free constant of every order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// `Phi_k(0) = delta_{k0}`.
    IntermediateAtOrigin,
}

/// Energies and coefficient rows of one run.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    /// `energies[k - 1] = E^(k)`.
    pub energies: Vec<Scalar>,
    /// `rows[k][m]` is the coefficient of `Q^m` in `Phi_k`; row `k` holds
    /// the powers that are independent of the truncation, `m <= M - 2 - 2k`.
    pub rows: Vec<Vec<Scalar>>,
    pub normalization: Normalization,
    pub n: u32,
    pub mode: Mode,
    pub m_trunc: usize,
}

impl ExpansionResult {
    pub fn k_max(&self) -> usize {
        self.energies.len()
    }

    /// Leading energy `E^(0) = n/2`.
    pub fn e0(&self) -> Scalar {
        Scalar::ratio(self.n as i64, 2, Mode::Exact)
    }

    /// `E^(k)` for `k >= 1`.
    pub fn energy(&self, k: usize) -> &Scalar {
        &self.energies[k - 1]
    }

    /// Row `k` as a truncated series.
    pub fn phi(&self, k: usize) -> TruncatedSeries {
        TruncatedSeries::new(self.rows[k].clone(), format!("Phi_{k}"))
            .expect("rows are nonempty and single-mode")
    }
}

/// Evaluation of one coefficient function with its truncation check.
#[derive(Clone, Debug)]
pub struct PhiValue {
    pub value: Scalar,
    /// Relative change when the last ten retained powers are dropped.
    pub tail_check: f64,
    /// `tail_check <= 1e-8`.
    pub trusted: bool,
}

pub const PHI_TRUST_LEVEL: f64 = 1e-8;

/// Builds `w`, `S`, `u` and `Phi_0` with the scenario's `V` truncated at `m_trunc`.
pub fn compute_prequantities(s: &Scenario, m_trunc: usize, mode: Mode) -> Result<HJData> {
    if m_trunc < 4 {
        return Err(Error::config("scenario.M", "M must be at least 4"));
    }
    let v = s.potential_series_to(m_trunc, mode);
    let two_v_over_q2 = v.scale(&Scalar::from_int(2, mode)).shift_down(2)?;
    let root = two_v_over_q2.sqrt_unit()?;
    let mut wc = vec![Scalar::zero(mode)];
    wc.extend(root.into_coeffs());
    let w = TruncatedSeries::new(wc, "w")?;
    let s_series = w.antiderivative(Some(m_trunc)).with_label("S");
    let u = s.correction_series_to(m_trunc, mode);
    let ops = Operator::new(&w, &u, s.n);
    let zero_rhs = vec![Scalar::zero(mode); m_trunc];
    let phi0 = ops.solve_row(Scalar::one(mode), &zero_rhs, m_trunc - 2);
    Ok(HJData {
        w,
        s: s_series,
        u,
        phi0: TruncatedSeries::new(phi0, "Phi_0")?,
        n: s.n,
        m_trunc,
    })
}

/// Coefficients of the left-hand operator, precomputed per power offset.
struct Operator {
    mode: Mode,
    /// `w_d`
    w: Vec<Scalar>,
    /// `d w_d + (n-1)(u w)_d - n [d = 1]`
    a: Vec<Scalar>,
}

impl Operator {
    fn new(w: &TruncatedSeries, u: &TruncatedSeries, n: u32) -> Operator {
        let mode = w.mode();
        let uw = u.mul(w).expect("same mode");
        let nm1 = Scalar::from_int(n as i64 - 1, mode);
        let nn = Scalar::from_int(n as i64, mode);
        let len = w.order() + 1;
        let mut a = Vec::with_capacity(len);
        for d in 0..len {
            let mut x = w.coeff(d).mul_int(d as i64);
            if n != 1 {
                x = &x + &(&nm1 * &uw.coeff(d));
            }
            if d == 1 {
                x = &x - &nn;
            }
            a.push(x);
        }
        Operator {
            mode,
            w: w.coeffs().to_vec(),
            a,
        }
    }

    /// Solves `L[phi] = rhs` power by power for a row of length `top + 1`
    /// with prescribed constant term. `rhs[m]` is the `Q^m` coefficient and
    /// must be available for `m <= top + 1`.
    fn solve_row(&self, phi_00: Scalar, rhs: &[Scalar], top: usize) -> Vec<Scalar> {
        let mut phi = Vec::with_capacity(top + 1);
        let mut jphi = Vec::with_capacity(top + 1);
        phi.push(phi_00);
        jphi.push(Scalar::zero(self.mode));
        for m in 2..=top + 1 {
            // sum over j <= m - 2 of phi_j ((2j + d) w_d + a'_d), d = m - j
            let mut acc = rhs[m].clone();
            for j in 0..m - 1 {
                let d = m - j;
                if phi[j].is_zero() {
                    continue;
                }
                let wd = &self.w[d];
                let ad = &self.a[d];
                if !wd.is_zero() {
                    acc = &acc - &(&jphi[j].mul_int(2) * wd);
                }
                if !ad.is_zero() {
                    acc = &acc - &(&phi[j] * ad);
                }
            }
            let next = acc.div_int(2 * (m as i64 - 1));
            jphi.push(next.mul_int(m as i64 - 1));
            phi.push(next);
        }
        phi
    }
}

/// Runs the recursion up to `k_max` on a validated scenario, exact arithmetic.
pub fn run_recursion(h: &HJData, s: &ValidatedScenario) -> Result<ExpansionResult> {
    run_recursion_to(h, s.k_max)
}

/// Runs the recursion on arbitrary pre-quantities (no scenario validation),
/// so the order-`Q^0` consistency condition is checked here as well.
pub fn run_recursion_to(h: &HJData, k_max: usize) -> Result<ExpansionResult> {
    let m_trunc = h.m_trunc;
    if m_trunc < 2 * k_max + 2 {
        return Err(Error::config(
            "scenario.M",
            format!(
                "M = {m_trunc} violates the rule M >= 2K + 2 = {}",
                2 * k_max + 2
            ),
        ));
    }
    let mode = h.w.mode();
    let n = h.n;
    let ops = Operator::new(&h.w, &h.u, n);
    let nm1 = Scalar::from_int(n as i64 - 1, mode);
    let u = h.u.coeffs();
    let mut rows: Vec<Vec<Scalar>> = vec![h.phi0.coeffs().to_vec()];
    let mut energies: Vec<Scalar> = Vec::with_capacity(k_max);

    for k in 1..=k_max {
        let prev = &rows[k - 1];
        let top = m_trunc - 2 - 2 * k;
        let len_rhs = top + 2;
        // d/dQ of the previous row: index i holds (i+1) phi_{i+1}
        let dprev: Vec<Scalar> = (0..prev.len() - 1)
            .map(|i| prev[i + 1].mul_int(i as i64 + 1))
            .collect();
        let mut rhs: Vec<Scalar> = Vec::with_capacity(len_rhs);
        for m in 0..len_rhs {
            // Q Phi'' term
            let mut x = prev[m + 1].mul_int(((m + 1) * m) as i64);
            if n != 1 {
                let mut conv = Scalar::zero(mode);
                for i in 0..=m {
                    let ui = &u[m - i];
                    if !ui.is_zero() && !dprev[i].is_zero() {
                        conv = &conv + &(ui * &dprev[i]);
                    }
                }
                x = &x + &(&nm1 * &conv);
            }
            rhs.push(x);
        }
        if !rhs[0].is_zero() {
            return Err(Error::HalfIntegerPower(format!(
                "order {k}: (n-1) Phi'_{}(0) = {} is not zero",
                k - 1,
                rhs[0]
            )));
        }
        // energy from the Q^1 condition: 0 = rhs_1 + 2 E^(k)
        let e_k = (-&rhs[1]).div_int(2);
        energies.push(e_k);
        // 2Q sum_p E^(p) Phi_{k-p} enters rhs at m >= 2 (p = k has phi_{0,m-1})
        for m in 2..len_rhs {
            let mut acc = Scalar::zero(mode);
            for p in 1..=k {
                let row = &rows[k - p];
                if let Some(c) = row.get(m - 1) {
                    if !c.is_zero() && !energies[p - 1].is_zero() {
                        acc = &acc + &(&energies[p - 1] * c);
                    }
                }
            }
            rhs[m] = &rhs[m] + &acc.mul_int(2);
        }
        let row = ops.solve_row(Scalar::zero(mode), &rhs, top);
        rows.push(row);
    }
    Ok(ExpansionResult {
        energies,
        rows,
        normalization: Normalization::IntermediateAtOrigin,
        n,
        mode,
        m_trunc,
    })
}

/// Pre-quantities and recursion in one call, exact mode at the scenario's `M`.
pub fn expand(s: &ValidatedScenario) -> Result<ExpansionResult> {
    let h = compute_prequantities(s, s.m_trunc, Mode::Exact)?;
    run_recursion(&h, s)
}

/// Float-mode run at the pointwise truncation, for evaluating `Phi_k(q)`.
pub fn expand_pointwise(s: &ValidatedScenario) -> Result<ExpansionResult> {
    let m = s.pointwise_m();
    let h = compute_prequantities(s, m, s.float_mode())?;
    run_recursion_to(&h, s.k_max)
}

/// Evaluates `Phi_k(q)` and compares against the row truncated ten powers lower.
pub fn eval_phi(r: &ExpansionResult, k: usize, q: &Scalar, radius: f64) -> Result<PhiValue> {
    if k >= r.rows.len() {
        return Err(Error::Domain(format!(
            "order {k} is beyond the computed range 0..={}",
            r.rows.len() - 1
        )));
    }
    let series = r.phi(k);
    let full = series.eval(q, radius)?;
    let order = series.order();
    if order < 10 {
        return Ok(PhiValue {
            value: full.value,
            tail_check: f64::INFINITY,
            trusted: false,
        });
    }
    let short = series.truncate(order - 10).eval(q, radius)?;
    let diff = (&full.value - &short.value).abs();
    let scale = full.value.abs();
    let tail_check = if scale.is_zero() {
        if diff.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (diff.ln_abs() - scale.ln_abs()).exp()
    };
    Ok(PhiValue {
        value: full.value,
        tail_check,
        trusted: tail_check <= PHI_TRUST_LEVEL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{load_scenario, preset, validate_scenario};

    fn exact(name: &str, n: Option<u32>, k: usize) -> ExpansionResult {
        let mut s = preset(name, n).unwrap();
        s.k_max = k;
        s.m_trunc = 2 * k + 2;
        expand(&validate_scenario(s).unwrap()).unwrap()
    }

    fn strs(v: &[Scalar]) -> Vec<String> {
        v.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn harmonic_prequantities() {
        let s = preset("harmonic", None).unwrap();
        let h = compute_prequantities(&s, 10, Mode::Exact).unwrap();
        assert_eq!(strs(&h.w.coeffs()[..3]), ["0", "1", "0"]);
        assert_eq!(strs(&h.s.coeffs()[..3]), ["0", "0", "1/2"]);
        assert!(h.phi0.coeffs()[1..].iter().all(Scalar::is_zero));
        assert_eq!(h.phi0.coeff(0).to_string(), "1");
    }

    #[test]
    fn cubic_action_and_phi0() {
        let s = preset("cubic", None).unwrap();
        let h = compute_prequantities(&s, 12, Mode::Exact).unwrap();
        assert_eq!(
            strs(&h.s.coeffs()[..6]),
            ["0", "0", "1/2", "-1/3", "-1/8", "-1/10"]
        );
        assert_eq!(h.phi0.coeff(1).to_string(), "1");
        // Hamilton–Jacobi: w^2 = 2V
        let v = s.potential_series_to(12, Mode::Exact);
        let w2 = h.w.mul(&h.w).unwrap();
        for m in 0..=h.w.order() {
            assert_eq!(w2.coeff(m), v.coeff(m).mul_int(2));
        }
    }

    #[test]
    fn harmonic_orders_vanish() {
        let r = exact("harmonic", None, 10);
        assert!(r.energies.iter().all(Scalar::is_zero));
        assert!(r.rows[1..].iter().flatten().all(Scalar::is_zero));
    }

    #[test]
    fn cubic_energies() {
        let r = exact("cubic", None, 4);
        assert_eq!(
            strs(&r.energies),
            ["-11/8", "-465/32", "-39709/128", "-19250805/2048"]
        );
    }

    #[test]
    fn quartic_and_double_well_energies() {
        let text = "[scenario]\npotential = [\"0\", \"0\", \"1/2\", \"0\", \"1\"]\nK = 3\n";
        let s = validate_scenario(load_scenario(text).unwrap()).unwrap();
        assert_eq!(
            strs(&expand(&s).unwrap().energies),
            ["3/4", "-21/8", "333/16"]
        );
        let r = exact("double_well", None, 3);
        assert_eq!(strs(&r.energies), ["-1", "-9/2", "-89/2"]);
    }

    #[test]
    fn sphere_energies() {
        let r = exact("sphere", Some(2), 3);
        assert_eq!(strs(&r.energies), ["-1/4", "-1/64", "-3/512"]);
        let r = exact("sphere", Some(3), 3);
        assert_eq!(strs(&r.energies), ["-21/32", "-9/512", "-45/8192"]);
    }

    #[test]
    fn normalization_at_origin() {
        let r = exact("cubic", None, 6);
        assert_eq!(r.rows[0][0].to_string(), "1");
        assert!(r.rows[1..].iter().all(|row| row[0].is_zero()));
        for (k, row) in r.rows.iter().enumerate() {
            assert_eq!(row.len(), 2 * 6 + 2 - 1 - 2 * k);
        }
    }

    #[test]
    fn odd_terms_in_three_dimensions_fail_at_order_zero() {
        let text = "[scenario]\nn = 3\ncorrection = \"radial_u1\"\npotential = [\"0\", \"0\", \"1/2\", \"-1\"]\nK = 2\n";
        let s = load_scenario(text).unwrap();
        let h = compute_prequantities(&s, 6, Mode::Exact).unwrap();
        assert!(matches!(
            run_recursion_to(&h, 2),
            Err(Error::HalfIntegerPower(_))
        ));
    }

    #[test]
    fn truncation_rule_is_enforced() {
        let s = preset("cubic", None).unwrap();
        let h = compute_prequantities(&s, 10, Mode::Exact).unwrap();
        assert!(run_recursion_to(&h, 5).is_err());
        assert!(run_recursion_to(&h, 4).is_ok());
    }

    #[test]
    fn float_mode_matches_exact() {
        let s = preset("cubic", None).unwrap();
        let he = compute_prequantities(&s, 30, Mode::Exact).unwrap();
        let hf = compute_prequantities(&s, 30, Mode::Float { bits: 192 }).unwrap();
        let re = run_recursion_to(&he, 14).unwrap();
        let rf = run_recursion_to(&hf, 14).unwrap();
        for (a, b) in re.energies.iter().zip(&rf.energies) {
            let (a, b) = (a.to_f64(), b.to_f64());
            assert!(((a - b) / a).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_evaluation() {
        let r = exact("harmonic", None, 8);
        let q = Scalar::ratio(1, 3, Mode::Exact);
        let v = eval_phi(&r, 0, &q, f64::INFINITY).unwrap();
        assert_eq!(v.value.to_string(), "1");
        assert!(v.trusted);
        let r = exact("cubic", None, 3);
        let zero = Scalar::zero(Mode::Exact);
        assert!(eval_phi(&r, 1, &zero, 0.5).unwrap().value.is_zero());
        assert!(eval_phi(&r, 1, &Scalar::ratio(1, 2, Mode::Exact), 0.5).is_err());
    }
}
