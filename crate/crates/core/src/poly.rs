//! Polynomial helpers: complex roots (Aberth iteration) and exact rational
//! evaluation and gcd, used for radii and turning-point classification.

use dashu_ratio::RBig;
use num_complex::Complex64;

/// Drops trailing zero coefficients (ascending order).
pub fn trim(coeffs: &[f64]) -> &[f64] {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1] == 0.0 {
        end -= 1;
    }
    &coeffs[..end]
}

fn eval_complex(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a polynomial with ascending coefficients.
pub fn complex_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let c = trim(coeffs);
    if c.len() < 2 {
        return Vec::new();
    }
    let deg = c.len() - 1;
    let lead = c[deg];
    // Cauchy bound for the initial circle
    let bound = 1.0
        + c[..deg]
            .iter()
            .map(|x| (x / lead).abs())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64;
            Complex64::from_polar(0.5 * bound, theta)
        })
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0_f64;
        for i in 0..deg {
            let (p, dp) = eval_complex(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    sum += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Smallest modulus among the roots; `+inf` for constants.
pub fn min_root_modulus(coeffs: &[f64]) -> f64 {
    complex_roots(coeffs)
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

/// Exact evaluation at a rational point.
pub fn eval_exact(coeffs: &[RBig], x: &RBig) -> RBig {
    coeffs.iter().rev().fold(RBig::ZERO, |acc, c| acc * x + c)
}

pub fn derivative_exact(coeffs: &[RBig]) -> Vec<RBig> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| c * RBig::from(m as u64))
        .collect()
}

fn trim_exact(mut p: Vec<RBig>) -> Vec<RBig> {
    while p.last().is_some_and(|c| *c == RBig::ZERO) {
        p.pop();
    }
    p
}

fn rem_exact(a: &[RBig], b: &[RBig]) -> Vec<RBig> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let top = r.len() - 1;
        let f = &r[top] / lead;
        for (i, bc) in b.iter().enumerate() {
            r[top - db + i] = &r[top - db + i] - &f * bc;
        }
        r.pop();
        r = trim_exact(r);
    }
    r
}

/// Monic gcd over the rationals (empty vector for two zero polynomials).
pub fn gcd_exact(a: &[RBig], b: &[RBig]) -> Vec<RBig> {
    let mut x = trim_exact(a.to_vec());
    let mut y = trim_exact(b.to_vec());
    while !y.is_empty() {
        let r = rem_exact(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &lead;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratic() {
        // (x - 2)(x + 3) = x^2 + x - 6
        let mut r: Vec<f64> = complex_roots(&[-6.0, 1.0, 1.0])
            .iter()
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 3.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_pair_modulus() {
        // 1 + x^2 has roots +-i
        assert!((min_root_modulus(&[1.0, 0.0, 1.0]) - 1.0).abs() < 1e-13);
        assert_eq!(min_root_modulus(&[0.5]), f64::INFINITY);
    }

    #[test]
    fn gcd_detects_double_root() {
        let r = |p: i64, q: i64| RBig::from_parts_signed(p.into(), q.into());
        // (1 - x)^2 / 2
        let p = vec![r(1, 2), r(-1, 1), r(1, 2)];
        let g = gcd_exact(&p, &derivative_exact(&p));
        assert_eq!(g, vec![r(-1, 1), r(1, 1)]);
        let q = vec![r(1, 2), r(-1, 1)];
        assert_eq!(gcd_exact(&q, &derivative_exact(&q)).len(), 1);
    }
}
