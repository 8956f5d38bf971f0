//! Riemann theta with half-integer characteristics:
//! theta[d1; d2](z, tau) = sum_n exp{pi i (n+d1)^t tau (n+d1) + 2 pi i (n+d1)^t (z+d2)}.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::jet::{Jet, JetSpace};
use crate::error::NumericError;

pub type CMat = Vec<Vec<Complex64>>;

/// Tail exponent: terms below exp(-TAIL) times the dominant one are dropped.
const TAIL: f64 = 58.0;
const MAX_TERMS: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Characteristic {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl Characteristic {
    pub fn zero(g: usize) -> Self {
        Characteristic { d1: vec![0.0; g], d2: vec![0.0; g] }
    }

    /// All 4^g half-integer characteristics, in a fixed order.
    pub fn all_half(g: usize) -> Vec<Characteristic> {
        (0..1usize << (2 * g))
            .map(|bits| {
                let d1 = (0..g).map(|k| if bits >> k & 1 == 1 { 0.5 } else { 0.0 }).collect();
                let d2 = (0..g).map(|k| if bits >> (g + k) & 1 == 1 { 0.5 } else { 0.0 }).collect();
                Characteristic { d1, d2 }
            })
            .collect()
    }

    /// +1 for even, -1 for odd characteristics.
    pub fn parity(&self) -> i32 {
        let s: f64 = self.d1.iter().zip(&self.d2).map(|(a, b)| 4.0 * a * b).sum();
        if (s.round() as i64) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Theta data: tau and characteristic, with the lattice geometry cached.
#[derive(Clone, Debug)]
pub struct Theta {
    pub g: usize,
    pub tau: CMat,
    pub ch: Characteristic,
    y: DMatrix<f64>,
    y_inv: DMatrix<f64>,
}

impl Theta {
    pub fn new(tau: CMat, ch: Characteristic) -> Result<Self, NumericError> {
        let g = tau.len();
        let y = DMatrix::from_fn(g, g, |i, j| 0.5 * (tau[i][j].im + tau[j][i].im));
        let chol = y.clone().cholesky().ok_or_else(|| NumericError::Singular("Im tau is not positive definite".into()))?;
        let y_inv = chol.inverse();
        Ok(Theta { g, tau, ch, y, y_inv })
    }

    pub fn with_characteristic(&self, ch: Characteristic) -> Theta {
        Theta { ch, ..self.clone() }
    }

    /// Lattice points n (as k = n + d1) contributing at z.
    fn lattice(&self, z: &[Complex64]) -> Result<Vec<Vec<f64>>, NumericError> {
        let g = self.g;
        let im: Vec<f64> = z.iter().map(|c| c.im).collect();
        let center: Vec<f64> = (0..g).map(|i| -(0..g).map(|j| self.y_inv[(i, j)] * im[j]).sum::<f64>()).collect();
        let r2 = TAIL / PI;
        let ranges: Vec<(i64, i64)> = (0..g)
            .map(|i| {
                let half = (r2 * self.y_inv[(i, i)]).sqrt();
                let c = center[i] - self.ch.d1[i];
                ((c - half).ceil() as i64, (c + half).floor() as i64)
            })
            .collect();
        let total: f64 = ranges.iter().map(|(a, b)| (b - a + 1).max(0) as f64).product();
        if total > MAX_TERMS as f64 {
            return Err(NumericError::TailBoundUnreachable);
        }
        let mut out = Vec::new();
        let mut n: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        if ranges.iter().any(|(a, b)| a > b) {
            return Ok(out);
        }
        loop {
            let k: Vec<f64> = (0..g).map(|i| n[i] as f64 + self.ch.d1[i]).collect();
            let d: Vec<f64> = (0..g).map(|i| k[i] - center[i]).collect();
            let mut q = 0.0;
            for i in 0..g {
                for j in 0..g {
                    q += d[i] * self.y[(i, j)] * d[j];
                }
            }
            if q <= r2 {
                out.push(k);
            }
            let mut i = 0;
            loop {
                if i == g {
                    return Ok(out);
                }
                n[i] += 1;
                if n[i] <= ranges[i].1 {
                    break;
                }
                n[i] = ranges[i].0;
                i += 1;
            }
        }
    }

    fn exponent(&self, k: &[f64], z: &[Complex64]) -> Complex64 {
        let g = self.g;
        let mut e = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                e += k[i] * self.tau[i][j] * k[j];
            }
        }
        e *= Complex64::new(0.0, PI);
        let lin: Complex64 = (0..g).map(|i| k[i] * (z[i] + self.ch.d2[i])).sum();
        e + Complex64::new(0.0, 2.0 * PI) * lin
    }

    pub fn value(&self, z: &[Complex64]) -> Result<Complex64, NumericError> {
        Ok(self.lattice(z)?.iter().map(|k| self.exponent(k, z).exp()).sum())
    }

    /// Value together with the sum of absolute values of the terms.
    pub fn value_and_scale(&self, z: &[Complex64]) -> Result<(Complex64, f64), NumericError> {
        let mut v = Complex64::new(0.0, 0.0);
        let mut s = 0.0;
        for k in self.lattice(z)? {
            let t = self.exponent(&k, z).exp();
            v += t;
            s += t.norm();
        }
        Ok((v, s))
    }

    /// Jet of w -> theta(A (w0 + dw)) in the variables dw; A is g x n.
    pub fn jet(&self, a: &CMat, w0: &[Complex64], space: &Arc<JetSpace>) -> Result<Jet, NumericError> {
        let g = self.g;
        let n = space.nvars;
        let z: Vec<Complex64> = (0..g).map(|i| (0..n).map(|l| a[i][l] * w0[l]).sum()).collect();
        let mut j = Jet::zero(space);
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        for k in self.lattice(&z)? {
            let t = self.exponent(&k, &z).exp();
            let c: Vec<Complex64> = (0..n).map(|l| two_pi_i * (0..g).map(|i| k[i] * a[i][l]).sum::<Complex64>()).collect();
            j.add_exp_linear(t, &c);
        }
        Ok(j)
    }

    /// Jet in z itself (A = identity).
    pub fn jet_z(&self, z0: &[Complex64], order: usize) -> Result<Jet, NumericError> {
        let sp = JetSpace::new(self.g, order);
        let id: CMat = (0..self.g)
            .map(|i| (0..self.g).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        self.jet(&id, z0, &sp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tau2() -> CMat {
        vec![vec![c(0.2, 1.1), c(0.3, 0.4)], vec![c(0.3, 0.4), c(-0.1, 0.9)]]
    }

    #[test]
    fn odd_characteristic_vanishes_at_zero() {
        let th = Theta::new(vec![vec![c(0.1, 0.8)]], Characteristic { d1: vec![0.5], d2: vec![0.5] }).unwrap();
        assert!(th.value(&[c(0.0, 0.0)]).unwrap().norm() < 1e-14);
    }

    #[test]
    fn parity_and_periodicity() {
        let z = [c(0.13, -0.2), c(0.4, 0.07)];
        let mz = [-z[0], -z[1]];
        for ch in Characteristic::all_half(2) {
            let th = Theta::new(tau2(), ch.clone()).unwrap();
            let v = th.value(&z).unwrap();
            let w = th.value(&mz).unwrap();
            assert!((w - v * ch.parity() as f64).norm() < 1e-12 * v.norm().max(1.0));
            // z -> z + e_1 multiplies by exp(2 pi i d1_1)
            let zs = [z[0] + 1.0, z[1]];
            let f = Complex64::new(0.0, 2.0 * PI * ch.d1[0]).exp();
            assert!((th.value(&zs).unwrap() - f * v).norm() < 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let th = Theta::new(tau2(), Characteristic { d1: vec![0.5, 0.0], d2: vec![0.0, 0.5] }).unwrap();
        let z = [c(0.21, 0.1), c(-0.3, 0.05)];
        let j = th.jet_z(&z, 2).unwrap();
        let h = 1e-4;
        let f = |dz0: f64, dz1: f64| th.value(&[z[0] + dz0, z[1] + dz1]).unwrap();
        let d0 = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
        let d01 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        assert!((j.derivative(&[0]) - d0).norm() < 1e-6 * d0.norm());
        assert!((j.derivative(&[0, 1]) - d01).norm() < 1e-6 * d01.norm());
    }
}
