//! Independent cross-checks of the semiclassical expansion.
//!
//! [`coupling_recursion`] expands the ground energy of
//! `p^2/2 + x^2/2 + sum_j v_j g^(j-2) x^j` in `g` at fixed `x`, so that
//! `E^(k) = E_{2k}` with `hbar = g^2`. [`diagonalize_reference`] solves the
//! Schrödinger equation on a grid.

use dashu_ratio::RBig;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::complex_roots;
use crate::quadrature::integrate;
use crate::scenario::{Potential, Scenario, ValidatedScenario};
use crate::series::Scalar;

pub const MAX_COUPLING_ORDER: usize = 8;

/// Ground-energy coefficients `E_j`, `j = 0 ..= 2 K_o`, in powers of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSeries {
    pub coefficients: Vec<RBig>,
}

impl CouplingSeries {
    /// `E^(k) = E_{2k}`.
    pub fn hbar_coefficient(&self, k: usize) -> &RBig {
        &self.coefficients[2 * k]
    }
}

/// Rayleigh–Schrödinger recursion with `psi_j = exp(-x^2/2) P_j(x)`.
///
/// `(H_0 - 1/2)` acts on the polynomial part as `D x^m = m x^m - m(m-1)/2 x^(m-2)`,
/// which is inverted from the top power down; the constant-term condition
/// fixes `E_j`. Normalization `P_j(0) = 0` for `j >= 1`.
pub fn coupling_recursion(s: &Scenario, k_o: usize) -> Result<CouplingSeries> {
    if s.n != 1 {
        return Err(Error::Refused(
            "the coupling oracle handles one-dimensional problems only".into(),
        ));
    }
    let Potential::Polynomial(v) = &s.potential else {
        return Err(Error::Refused(
            "the coupling oracle needs a polynomial potential".into(),
        ));
    };
    if k_o > MAX_COUPLING_ORDER {
        return Err(Error::Refused(format!(
            "coupling oracle order {k_o} exceeds {MAX_COUPLING_ORDER}"
        )));
    }
    let half = RBig::from_parts(1u8.into(), 2u8.into());
    if v.len() < 3 || v[0] != RBig::ZERO || v[1] != RBig::ZERO || v[2] != half {
        return Err(Error::Normalization(
            "coupling oracle needs V = Q^2/2 + O(Q^3)".into(),
        ));
    }
    let jmax = 2 * k_o;
    let mut e = vec![half.clone()];
    let mut p: Vec<Vec<RBig>> = vec![vec![RBig::ONE]];
    for j in 1..=jmax {
        // r = sum_{l=1}^{j-1} E_l P_{j-l} - sum_i v_i x^i P_{j-i+2}
        let deg = 3 * j;
        let mut r = vec![RBig::ZERO; deg + 1];
        for l in 1..j {
            for (m, c) in p[j - l].iter().enumerate() {
                r[m] += &e[l] * c;
            }
        }
        for (i, vi) in v.iter().enumerate().skip(3) {
            if *vi == RBig::ZERO || i - 2 > j {
                continue;
            }
            for (m, c) in p[j + 2 - i].iter().enumerate() {
                r[m + i] -= vi * c;
            }
        }
        let mut pj = vec![RBig::ZERO; deg + 3];
        for m in (1..=deg).rev() {
            let up = &pj[m + 2] * RBig::from(((m + 2) * (m + 1) / 2) as u64);
            pj[m] = (&r[m] + up) / RBig::from(m as u64);
        }
        // constant term: -p_2 = r_0 + E_j
        let ej = -&pj[2] - &r[0];
        pj.truncate(deg + 1);
        while pj.len() > 1 && pj.last() == Some(&RBig::ZERO) {
            pj.pop();
        }
        e.push(ej);
        p.push(pj);
    }
    Ok(CouplingSeries { coefficients: e })
}

/// Grid eigenvalue with its refinement history.
#[derive(Clone, Debug, Serialize)]
pub struct Reference {
    pub hbar: f64,
    /// Lowest eigenvalue divided by `hbar`.
    pub e0: f64,
    pub walls: (f64, f64),
    pub spacing: f64,
    /// Raw values at spacings `h`, `h/2`, `h/4`.
    pub raw: [f64; 3],
    /// Difference of the Richardson values from `(h, h/2)` and `(h/2, h/4)`.
    pub refinement_change: f64,
}

/// Exponent `S/hbar` beyond which the wavefunction is negligible.
const WALL_ACTION: f64 = 40.0;
/// Grid points per oscillator length `sqrt(hbar)` at the coarsest level.
const POINTS_PER_WIDTH: f64 = 128.0;

enum Geometry {
    Line,
    Radial(u32),
    Sphere(u32),
}

fn potential_fn(s: &Scenario) -> Box<dyn Fn(f64) -> f64> {
    match &s.potential {
        Potential::Polynomial(c) => {
            let c: Vec<f64> = c.iter().map(|x| x.to_f64().value()).collect();
            Box::new(move |q| crate::series::horner(&c, q))
        }
        Potential::OneMinusCos => Box::new(|q: f64| 1.0 - q.cos()),
    }
}

/// Nearest zero of `V` in direction `dir`, or the natural end of the domain.
fn turning_point(s: &Scenario, dir: f64) -> Option<f64> {
    match &s.potential {
        Potential::OneMinusCos => Some(std::f64::consts::PI),
        Potential::Polynomial(c) => {
            let c: Vec<f64> = c.iter().map(|x| x.to_f64().value()).collect();
            // V / Q^2 has the nonzero roots
            complex_roots(&c[2..])
                .into_iter()
                .filter(|z| z.im.abs() < 1e-9 * z.norm().max(1.0) && z.re * dir > 0.0)
                .map(|z| z.re)
                .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        }
    }
}

/// Wall position: turning point or where `S(Q)/hbar` reaches the cutoff.
fn wall(s: &Scenario, v: &dyn Fn(f64) -> f64, hbar: f64, dir: f64) -> Result<f64> {
    let action = |q: f64| -> Result<f64> {
        Ok(
            integrate(|t| (2.0 * v(t)).max(0.0).sqrt(), 0.0, q, 1e-12, 0.0)?
                .value
                .abs(),
        )
    };
    let target = WALL_ACTION * hbar;
    let end = match turning_point(s, dir) {
        Some(tp) => {
            if action(tp)? <= target {
                return Ok(tp);
            }
            tp
        }
        None => {
            let mut q = dir;
            while action(q)? < target {
                q *= 2.0;
            }
            q
        }
    };
    let (mut lo, mut hi) = (0.0, end);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if action(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn lowest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let r = (if i > 0 { off[i - 1].abs() } else { 0.0 })
            + (if i < off.len() { off[i].abs() } else { 0.0 });
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Dirichlet problem on `(a, b)` with `cells` intervals.
fn line_eigenvalue(v: &dyn Fn(f64) -> f64, hbar: f64, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    let kin = hbar * hbar / (2.0 * h * h);
    let diag: Vec<f64> = (1..cells)
        .map(|i| 2.0 * kin + v(a + i as f64 * h))
        .collect();
    let off = vec![-kin; cells.saturating_sub(2)];
    lowest_eigenvalue(&diag, &off)
}

/// Finite-volume radial problem on `[0, b)` with measure `w(Q) dQ`,
/// natural condition at the origin and a Dirichlet wall at `b`.
fn radial_eigenvalue(
    v: &dyn Fn(f64) -> f64,
    w: &dyn Fn(f64) -> f64,
    hbar: f64,
    b: f64,
    cells: usize,
) -> Result<f64> {
    let h = b / cells as f64;
    let c = hbar * hbar / (2.0 * h);
    let mut vol = Vec::with_capacity(cells);
    for i in 0..cells {
        let lo = (i as f64 - 0.5).max(0.0) * h;
        let hi = (i as f64 + 0.5) * h;
        vol.push(integrate(w, lo, hi, 1e-13, 0.0)?.value);
    }
    let face = |i: usize| w((i as f64 + 0.5) * h);
    let mut diag = Vec::with_capacity(cells);
    for i in 0..cells {
        let left = if i == 0 { 0.0 } else { face(i - 1) };
        let k = c * (left + face(i));
        diag.push(k / vol[i] + v(i as f64 * h));
    }
    let off: Vec<f64> = (0..cells - 1)
        .map(|i| -c * face(i) / (vol[i] * vol[i + 1]).sqrt())
        .collect();
    Ok(lowest_eigenvalue(&diag, &off))
}

/// Ground energy `E_0 = lambda / hbar` from a discretized Schrödinger operator.
///
/// Walls sit at the nearest turning point or where `S(Q)/hbar = 40`,
/// whichever is closer. The value is Richardson-refined in `h^2` over
/// spacings `h, h/2`, and the same refinement over `h/2, h/4` must agree
/// within `rel_tol`.
pub fn diagonalize_reference(s: &ValidatedScenario, hbar: f64, rel_tol: f64) -> Result<Reference> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    let geometry = match (&s.potential, s.n) {
        (Potential::OneMinusCos, n) => Geometry::Sphere(n),
        (_, 1) => Geometry::Line,
        (_, n) => Geometry::Radial(n),
    };
    let v = potential_fn(s);
    let right = wall(s, v.as_ref(), hbar, 1.0)?;
    let left = match geometry {
        Geometry::Line => wall(s, v.as_ref(), hbar, -1.0)?,
        _ => 0.0,
    };
    let cells = (((right - left) / hbar.sqrt()) * POINTS_PER_WIDTH)
        .ceil()
        .max(64.0) as usize;
    let solve = |m: usize| -> Result<f64> {
        let cells = cells * m;
        match geometry {
            Geometry::Line => Ok(line_eigenvalue(v.as_ref(), hbar, left, right, cells)),
            Geometry::Radial(n) => radial_eigenvalue(
                v.as_ref(),
                &|q: f64| q.powi(n as i32 - 1),
                hbar,
                right,
                cells,
            ),
            Geometry::Sphere(n) => radial_eigenvalue(
                v.as_ref(),
                &|q: f64| q.sin().powi(n as i32 - 1),
                hbar,
                right,
                cells,
            ),
        }
    };
    let raw = [solve(1)? / hbar, solve(2)? / hbar, solve(4)? / hbar];
    let r1 = (4.0 * raw[1] - raw[0]) / 3.0;
    let r2 = (4.0 * raw[2] - raw[1]) / 3.0;
    let change = (r2 - r1).abs();
    if change > rel_tol * r2.abs() {
        return Err(Error::Numeric(format!(
            "grid refinement changed E0 by {change:e} (relative tolerance {rel_tol:e})"
        )));
    }
    Ok(Reference {
        hbar,
        e0: r2,
        walls: (left, right),
        spacing: (right - left) / cells as f64,
        raw,
        refinement_change: change,
    })
}

/// Optimally truncated partial sum of `sum_k hbar^k E^(k)`.
#[derive(Clone, Debug, Serialize)]
pub struct PartialSum {
    pub hbar: String,
    pub truncation: usize,
    pub value: f64,
}

/// Sums through `k* = floor(A0 / hbar)` capped at the computed range.
pub fn optimal_partial_sum(
    e0: &Scalar,
    energies: &[Scalar],
    a0: Option<f64>,
    hbar: &RBig,
) -> PartialSum {
    let h = hbar.to_f64().value();
    let cap = energies.len();
    let truncation = match a0 {
        Some(a) => ((a / h).floor() as usize).min(cap),
        None => cap,
    };
    let mode = e0.mode();
    let hb = Scalar::from_rational(hbar.clone(), mode);
    let mut sum = e0.clone();
    let mut pw = Scalar::one(mode);
    for e in energies.iter().take(truncation) {
        pw = &pw * &hb;
        let term = &pw * &e.to_mode(mode);
        sum = &sum + &term;
    }
    PartialSum {
        hbar: hbar.to_string(),
        truncation,
        value: sum.to_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::expand;
    use crate::scenario::{preset, validate_scenario};

    fn r(p: i64, q: i64) -> RBig {
        RBig::from_parts_signed(p.into(), (q as u64).into())
    }

    #[test]
    fn cubic_and_quartic_low_orders() {
        let c = coupling_recursion(&preset("cubic", None).unwrap(), 3).unwrap();
        assert_eq!(c.coefficients[0], r(1, 2));
        assert_eq!(c.coefficients[1], RBig::ZERO);
        assert_eq!(c.coefficients[2], r(-11, 8));
        assert_eq!(c.coefficients[3], RBig::ZERO);
        let mut quartic = preset("harmonic", None).unwrap();
        quartic.potential =
            Potential::Polynomial(vec![RBig::ZERO, RBig::ZERO, r(1, 2), RBig::ZERO, RBig::ONE]);
        let q = coupling_recursion(&quartic, 2).unwrap();
        assert_eq!(q.hbar_coefficient(1), &r(3, 4));
        assert_eq!(q.hbar_coefficient(2), &r(-21, 8));
    }

    #[test]
    fn harmonic_series_vanishes() {
        let c = coupling_recursion(&preset("harmonic", None).unwrap(), 4).unwrap();
        assert!(c.coefficients[1..].iter().all(|e| *e == RBig::ZERO));
    }

    #[test]
    fn odd_orders_vanish_for_even_potentials() {
        let c = coupling_recursion(&preset("double_well", None).unwrap(), 5).unwrap();
        for j in (1..=9).step_by(2) {
            assert_eq!(c.coefficients[j], RBig::ZERO, "E_{j}");
        }
    }

    #[test]
    fn matches_hbar_expansion() {
        for name in ["cubic", "double_well", "neg_quartic"] {
            let mut s = preset(name, None).unwrap();
            s.k_max = 6;
            s.m_trunc = 14;
            let c = coupling_recursion(&s, 6).unwrap();
            let e = expand(&validate_scenario(s).unwrap()).unwrap();
            for k in 1..=6 {
                assert_eq!(
                    e.energy(k).as_exact().unwrap(),
                    c.hbar_coefficient(k),
                    "{name} k={k}"
                );
            }
        }
    }

    #[test]
    fn refusals() {
        assert!(coupling_recursion(&preset("sphere", Some(2)).unwrap(), 2).is_err());
        assert!(coupling_recursion(&preset("cubic", None).unwrap(), 9).is_err());
    }

    #[test]
    fn harmonic_reference_is_one_half() {
        let v = validate_scenario(preset("harmonic", None).unwrap()).unwrap();
        for hbar in [0.01, 0.1, 0.5] {
            let r = diagonalize_reference(&v, hbar, 1e-6).unwrap();
            assert!((r.e0 - 0.5).abs() < 1e-8, "hbar {hbar}: {r:?}");
        }
    }

    #[test]
    fn radial_harmonic_reference() {
        // n-dimensional oscillator: E_0 = n/2
        let v = validate_scenario(preset("radial_on", Some(2)).unwrap()).unwrap();
        let mut s = v.scenario.clone();
        s.potential = Potential::Polynomial(vec![RBig::ZERO, RBig::ZERO, r(1, 2)]);
        let v = validate_scenario(s).unwrap();
        let r = diagonalize_reference(&v, 0.05, 1e-6).unwrap();
        assert!((r.e0 - 1.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn partial_sum_truncation() {
        let e0 = Scalar::ratio(1, 2, crate::series::Mode::Exact);
        let es: Vec<Scalar> = (1..=5)
            .map(|k| Scalar::from_int(k, crate::series::Mode::Exact))
            .collect();
        let p = optimal_partial_sum(&e0, &es, Some(0.25), &r(1, 10));
        assert_eq!(p.truncation, 2);
        assert!((p.value - (0.5 + 0.1 + 0.02)).abs() < 1e-15);
        let p = optimal_partial_sum(&e0, &es, None, &r(1, 10));
        assert_eq!(p.truncation, 5);
    }
}
