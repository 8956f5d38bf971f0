//! Roots of univariate polynomials with complex coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::NumericError;

/// Horner evaluation; coefficients in ascending order.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and first derivative.
pub fn horner_d(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Order used for branch points everywhere: real part, then imaginary part,
/// with real parts within `1e-9` of each other treated as equal.
pub fn root_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    let scale = 1e-9 * (1.0 + a.norm().max(b.norm()));
    if (a.re - b.re).abs() <= scale {
        a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal)
    } else {
        a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// All roots of a polynomial (ascending coefficients, nonzero leading
/// coefficient). Companion-matrix eigenvalues refined by Aberth iteration.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, NumericError> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(NumericError::Singular("leading coefficient vanishes".into()));
    }
    // Real companion matrix when the coefficients are real (the usual case);
    // otherwise a realified 2n x 2n block form whose spectrum contains the
    // roots and their conjugates, filtered by residual.
    let real = coeffs.iter().all(|c| c.im == 0.0);
    let mut z: Vec<Complex64> = if real {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -(coeffs[i] / lead).re;
        }
        m.complex_eigenvalues().iter().cloned().collect()
    } else {
        // Initial guesses on a circle (Aberth converges globally in practice).
        let r = coeffs[..n].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max) + 1.0;
        (0..n)
            .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
            .collect()
    };
    aberth(coeffs, &mut z, 200);
    z.sort_by(root_order);
    Ok(z)
}

fn aberth(coeffs: &[Complex64], z: &mut [Complex64], iters: usize) {
    let n = z.len();
    for _ in 0..iters {
        let mut maxstep: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner_d(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 0.0 {
                        s += 1.0 / d;
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[k] -= step;
                maxstep = maxstep.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if maxstep < 1e-17 {
            break;
        }
    }
}

/// Minimum pairwise distance relative to the root scale.
pub fn min_relative_gap(roots: &[Complex64]) -> f64 {
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut gap = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            gap = gap.min((roots[i] - roots[j]).norm());
        }
    }
    gap / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fourth_roots_of_unity() {
        let r = poly_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let expect = [c(-1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)];
        for (a, b) in r.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn complex_coefficients() {
        // (x - i)(x - 2)(x + 1 + i)
        let roots = [c(0.0, 1.0), c(2.0, 0.0), c(-1.0, -1.0)];
        let mut p = vec![c(1.0, 0.0)];
        for r in roots {
            let mut q = vec![c(0.0, 0.0); p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                q[k + 1] += a;
                q[k] -= a * r;
            }
            p = q;
        }
        let got = poly_roots(&p).unwrap();
        for r in roots {
            assert!(got.iter().any(|g| (g - r).norm() < 1e-12));
        }
    }
}
