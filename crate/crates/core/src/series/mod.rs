//! Truncated power series in one variable over exact rationals or big floats.
//!
//! Every operation keeps the truncation order explicit: binary operations
//! return a series truncated at the smaller of the two operand orders, so a
//! result never claims more accuracy than its inputs.

mod scalar;

use std::fmt;

pub(crate) use scalar::{float_from_f64, float_from_int, float_from_rational};
pub use scalar::{BigFloat, Mode, Scalar, MIN_FLOAT_BITS};

use crate::error::{Error, Result};
use dashu_ratio::RBig;

/// A power series `sum_{m=0}^{M} c_m Q^m + O(Q^{M+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Scalar>,
    mode: Mode,
    label: String,
}

/// Result of evaluating a truncated series at a point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: Scalar,
    /// Magnitude of the last retained term; a heuristic indicator only.
    pub tail_bound: Scalar,
}

impl TruncatedSeries {
    /// Builds a series from its coefficients; all of them must share one mode.
    pub fn new(coeffs: Vec<Scalar>, label: impl Into<String>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Domain("a series needs at least one coefficient".into()))?;
        let mode = first.mode();
        if let Some(bad) = coeffs.iter().find(|c| c.mode() != mode) {
            return Err(Error::ModeMismatch(format!(
                "coefficient in mode {} inside a {} series",
                bad.mode(),
                mode
            )));
        }
        Ok(TruncatedSeries {
            coeffs,
            mode,
            label: label.into(),
        })
    }

    /// Series from exact coefficients, padded with zeros (or cut) to `order`.
    pub fn from_rationals(values: &[RBig], order: usize, mode: Mode, label: &str) -> Self {
        let coeffs = (0..=order)
            .map(|m| match values.get(m) {
                Some(r) => Scalar::from_rational(r.clone(), mode),
                None => Scalar::zero(mode),
            })
            .collect();
        TruncatedSeries {
            coeffs,
            mode,
            label: label.to_string(),
        }
    }

    pub fn zero(order: usize, mode: Mode, label: &str) -> Self {
        TruncatedSeries {
            coeffs: vec![Scalar::zero(mode); order + 1],
            mode,
            label: label.to_string(),
        }
    }

    pub fn constant(c: Scalar, order: usize, label: &str) -> Self {
        let mode = c.mode();
        let mut s = Self::zero(order, mode, label);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Coefficient of `Q^m`; zero beyond the truncation order.
    pub fn coeff(&self, m: usize) -> Scalar {
        self.coeffs
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.mode))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Keeps powers up to `order` (never extends).
    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=keep].to_vec(),
            mode: self.mode,
            label: self.label.clone(),
        }
    }

    /// Converts every coefficient to `mode` (exact to float rounds once).
    pub fn to_mode(&self, mode: Mode) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.to_mode(mode)).collect(),
            mode,
            label: self.label.clone(),
        }
    }

    fn check_mode(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch(format!(
                "`{}` is {} but `{}` is {}",
                self.label, self.mode, other.label, other.mode
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|m| &self.coeffs[m] + &other.coeffs[m])
            .collect();
        Ok(TruncatedSeries {
            coeffs,
            mode: self.mode,
            label: format!("({}+{})", self.label, other.label),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|m| &self.coeffs[m] - &other.coeffs[m])
            .collect();
        Ok(TruncatedSeries {
            coeffs,
            mode: self.mode,
            label: format!("({}-{})", self.label, other.label),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            mode: self.mode,
            label: self.label.clone(),
        }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let order = self.order().min(other.order());
        let mut coeffs = vec![Scalar::zero(self.mode); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(TruncatedSeries {
            coeffs,
            mode: self.mode,
            label: format!("{}*{}", self.label, other.label),
        })
    }

    /// Square root of a series with unit constant term, via the convolution
    /// recurrence `2 s_m = a_m - sum_{i=1}^{m-1} s_i s_{m-i}`.
    pub fn sqrt_unit(&self) -> Result<Self> {
        if self.coeffs[0] != Scalar::one(self.mode) {
            return Err(Error::Domain(format!(
                "sqrt_unit needs constant term 1, `{}` starts with {}",
                self.label, self.coeffs[0]
            )));
        }
        let order = self.order();
        let mut s: Vec<Scalar> = Vec::with_capacity(order + 1);
        s.push(Scalar::one(self.mode));
        for m in 1..=order {
            let mut acc = self.coeffs[m].clone();
            for i in 1..m {
                acc = &acc - &(&s[i] * &s[m - i]);
            }
            s.push(acc.div_int(2));
        }
        Ok(TruncatedSeries {
            coeffs: s,
            mode: self.mode,
            label: format!("sqrt({})", self.label),
        })
    }

    /// Quotient `q` with `q * other = self` up to the smaller order.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let b0 = &other.coeffs[0];
        if b0.is_zero() {
            return Err(Error::DivisionByNonUnit);
        }
        let order = self.order().min(other.order());
        let mut q: Vec<Scalar> = Vec::with_capacity(order + 1);
        for m in 0..=order {
            let mut acc = self.coeffs[m].clone();
            for i in 1..=m {
                let b = &other.coeffs[i];
                if !b.is_zero() {
                    acc = &acc - &(b * &q[m - i]);
                }
            }
            q.push(&acc / b0);
        }
        Ok(TruncatedSeries {
            coeffs: q,
            mode: self.mode,
            label: format!("{}/{}", self.label, other.label),
        })
    }

    /// Termwise d/dQ; the result has order `M - 1` (order 0 stays 0).
    pub fn derivative(&self) -> Self {
        let coeffs: Vec<Scalar> = if self.order() == 0 {
            vec![Scalar::zero(self.mode)]
        } else {
            (1..=self.order())
                .map(|m| self.coeffs[m].mul_int(m as i64))
                .collect()
        };
        TruncatedSeries {
            coeffs,
            mode: self.mode,
            label: format!("d({})", self.label),
        }
    }

    /// `int_0^Q`, constant term 0; result order `M + 1`, capped at `cap`.
    pub fn antiderivative(&self, cap: Option<usize>) -> Self {
        let mut order = self.order() + 1;
        if let Some(c) = cap {
            order = order.min(c);
        }
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(Scalar::zero(self.mode));
        for m in 1..=order {
            coeffs.push(self.coeffs[m - 1].div_int(m as i64));
        }
        TruncatedSeries {
            coeffs,
            mode: self.mode,
            label: format!("int({})", self.label),
        }
    }

    /// Multiplies by `Q^k`, keeping the same truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let order = self.order();
        let coeffs = (0..=order)
            .map(|m| {
                if m >= k {
                    self.coeffs[m - k].clone()
                } else {
                    Scalar::zero(self.mode)
                }
            })
            .collect();
        TruncatedSeries {
            coeffs,
            mode: self.mode,
            label: self.label.clone(),
        }
    }

    /// Divides by `Q^k`; the first `k` coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(Error::Domain(format!(
                "cannot divide `{}` (order {}) by Q^{k}",
                self.label,
                self.order()
            )));
        }
        if let Some(m) = (0..k).find(|&m| !self.coeffs[m].is_zero()) {
            return Err(Error::Domain(format!(
                "`{}` has a nonzero Q^{m} coefficient, cannot divide by Q^{k}",
                self.label
            )));
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs[k..].to_vec(),
            mode: self.mode,
            label: self.label.clone(),
        })
    }

    /// Horner evaluation at `q`, refusing points at or beyond `radius`.
    pub fn eval(&self, q: &Scalar, radius: f64) -> Result<Evaluation> {
        let qf = q.to_f64();
        if !(qf.abs() < radius) {
            return Err(Error::Domain(format!(
                "|q| = {} is not inside the convergence radius {radius}",
                qf.abs()
            )));
        }
        Ok(self.eval_unchecked(q))
    }

    pub(crate) fn eval_unchecked(&self, q: &Scalar) -> Evaluation {
        let q = q.to_mode(self.mode);
        let mut acc = Scalar::zero(self.mode);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &q) + c;
        }
        let mut last = self.coeffs[self.order()].clone();
        for _ in 0..self.order() {
            last = &last * &q;
        }
        Evaluation {
            value: acc,
            tail_bound: last.abs(),
        }
    }

    /// Coefficients as f64 (for quadrature patches and plotting).
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coeffs.iter().map(Scalar::to_f64).collect()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match m {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})Q")?,
                _ => write!(f, "({c})Q^{m}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(Q^{})", self.order() + 1)
    }
}

/// Evaluates an f64 polynomial (ascending coefficients) by Horner's rule.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(values: &[(i64, i64)], order: usize) -> TruncatedSeries {
        let rs: Vec<RBig> = values
            .iter()
            .map(|&(p, q)| RBig::from_parts_signed(p.into(), q.into()))
            .collect();
        TruncatedSeries::from_rationals(&rs, order, Mode::Exact, "t")
    }

    fn strs(s: &TruncatedSeries) -> Vec<String> {
        s.coeffs().iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn difference_of_squares() {
        let a = ex(&[(1, 1), (1, 1)], 3);
        let b = ex(&[(1, 1), (-1, 1)], 3);
        let p = a.mul(&b).unwrap();
        assert_eq!(strs(&p), ["1", "0", "-1", "0"]);
    }

    #[test]
    fn product_truncates_at_smaller_order() {
        let a = ex(&[(1, 1), (1, 1)], 5);
        let b = ex(&[(1, 1), (1, 1)], 2);
        assert_eq!(a.mul(&b).unwrap().order(), 2);
    }

    #[test]
    fn multiplicative_identity() {
        let a = ex(&[(3, 2), (-1, 7), (5, 3)], 2);
        let one = ex(&[(1, 1)], 2);
        assert_eq!(a.mul(&one).unwrap(), a.mul(&one).unwrap());
        assert_eq!(strs(&a.mul(&one).unwrap()), strs(&a));
    }

    #[test]
    fn sqrt_of_one_minus_two_q() {
        let a = ex(&[(1, 1), (-2, 1)], 3);
        let s = a.sqrt_unit().unwrap();
        assert_eq!(strs(&s), ["1", "-1", "-1/2", "-1/2"]);
        // square-and-compare
        assert_eq!(strs(&s.mul(&s).unwrap()), strs(&a));
    }

    #[test]
    fn sqrt_of_one_plus_two_q() {
        let a = ex(&[(1, 1), (2, 1)], 3);
        let s = a.sqrt_unit().unwrap();
        assert_eq!(strs(&s), ["1", "1", "-1/2", "1/2"]);
        assert_eq!(strs(&s.mul(&s).unwrap()), strs(&a));
    }

    #[test]
    fn sqrt_needs_unit_constant() {
        let a = ex(&[(2, 1), (1, 1)], 3);
        assert!(matches!(a.sqrt_unit(), Err(Error::Domain(_))));
        assert!(ex(&[(1, 1)], 0).sqrt_unit().is_ok());
    }

    #[test]
    fn geometric_series_by_division() {
        let one = ex(&[(1, 1)], 5);
        let b = ex(&[(1, 1), (-1, 1)], 5);
        assert_eq!(strs(&one.div(&b).unwrap()), ["1"; 6]);
    }

    #[test]
    fn division_by_factor() {
        let a = ex(&[(1, 1), (0, 1), (-1, 1)], 4);
        let b = ex(&[(1, 1), (1, 1)], 4);
        assert_eq!(strs(&a.div(&b).unwrap()), ["1", "-1", "0", "0", "0"]);
        let one = ex(&[(1, 1)], 4);
        assert_eq!(strs(&a.div(&one).unwrap()), strs(&a));
    }

    #[test]
    fn division_by_nonunit_is_refused() {
        let a = ex(&[(1, 1)], 3);
        let b = ex(&[(0, 1), (1, 1)], 3);
        assert_eq!(a.div(&b), Err(Error::DivisionByNonUnit));
    }

    #[test]
    fn derivative_and_antiderivative() {
        let half_q2 = ex(&[(0, 1), (0, 1), (1, 2)], 2);
        assert_eq!(strs(&half_q2.derivative()), ["0", "1"]);
        let q = ex(&[(0, 1), (1, 1)], 1);
        assert_eq!(strs(&q.antiderivative(None)), ["0", "0", "1/2"]);
        assert_eq!(q.antiderivative(Some(1)).order(), 1);
        let a = ex(&[(0, 1), (3, 1), (-2, 5), (7, 3)], 3);
        let round = a.derivative().antiderivative(None);
        assert_eq!(strs(&round), strs(&a));
    }

    #[test]
    fn geometric_sum_evaluation() {
        let s = ex(&[(1, 1); 11], 10);
        let q = Scalar::ratio(1, 2, Mode::Exact);
        let e = s.eval(&q, 1.0).unwrap();
        let expected = Scalar::ratio(2 * 1024 - 1, 1024, Mode::Exact);
        assert_eq!(e.value, expected);
        assert_eq!(e.tail_bound, Scalar::ratio(1, 1024, Mode::Exact));
    }

    #[test]
    fn constant_evaluation_and_radius() {
        let s = ex(&[(7, 3)], 4);
        let q = Scalar::ratio(-9, 10, Mode::Exact);
        assert_eq!(s.eval(&q, 1.0).unwrap().value.to_string(), "7/3");
        assert!(matches!(s.eval(&q, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let a = ex(&[(1, 1), (1, 1)], 3);
        let b = a.to_mode(Mode::Float { bits: 128 });
        assert!(matches!(a.mul(&b), Err(Error::ModeMismatch(_))));
        assert!(matches!(a.div(&b), Err(Error::ModeMismatch(_))));
        let mixed = vec![
            Scalar::one(Mode::Exact),
            Scalar::one(Mode::Float { bits: 128 }),
        ];
        assert!(TruncatedSeries::new(mixed, "m").is_err());
    }

    #[test]
    fn shifts() {
        let a = ex(&[(0, 1), (0, 1), (1, 2), (3, 1)], 3);
        let d = a.shift_down(2).unwrap();
        assert_eq!(strs(&d), ["1/2", "3"]);
        assert!(a.shift_down(3).is_err());
        assert_eq!(strs(&d.shift_up(1)), ["0", "1/2"]);
    }

    #[test]
    fn float_mode_sqrt_matches_exact() {
        let a = ex(&[(1, 1), (-2, 1), (1, 3)], 12);
        let exact = a.sqrt_unit().unwrap().to_f64_vec();
        let float = a
            .to_mode(Mode::Float { bits: 192 })
            .sqrt_unit()
            .unwrap()
            .to_f64_vec();
        for (x, y) in exact.iter().zip(&float) {
            assert!((x - y).abs() <= 1e-15 * x.abs().max(1.0));
        }
    }
}
