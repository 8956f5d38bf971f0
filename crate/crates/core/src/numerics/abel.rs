//! The Abel–Jacobi map based at the branch point (a, 0).
//!
//! In the chart x = a + r^2 the holomorphic forms become regular:
//! mu_i = x^{i-1} dx/(2y) = x^{i-1} dr / sqrt(R(x)), R(x) = N(x)/(x-a).
//! Paths run in the r-plane from 0 to sqrt(x_Q - a), bent around the
//! preimages of the other branch points when needed.

use num_complex::Complex64;

use super::periods::BranchData;
use super::quad::{GaussLegendre, PathNode};
use super::roots::horner;
use crate::curve::CurveV;
use crate::error::NumericError;

/// A point (x, y) of V.
pub type CurvePoint = (Complex64, Complex64);

#[derive(Clone, Debug)]
pub struct AbelMap {
    pub g: usize,
    pub a: Complex64,
    /// R(x) = N(x)/(x-a), ascending coefficients
    r: Vec<Complex64>,
    n: Vec<Complex64>,
    /// singularities in the r-plane
    sing: Vec<Complex64>,
    scale: f64,
}

fn deflate(n: &[Complex64], a: Complex64) -> Vec<Complex64> {
    // synthetic division from the top
    let d = n.len() - 1;
    let mut q = vec![Complex64::new(0.0, 0.0); d];
    let mut carry = Complex64::new(0.0, 0.0);
    for k in (1..=d).rev() {
        carry = n[k] + carry * a;
        q[k - 1] = carry;
    }
    q
}

fn dist_to_polyline(p: Complex64, pts: &[Complex64]) -> f64 {
    pts.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d.norm() == 0.0 {
                return (p - w[0]).norm();
            }
            let t = (((p - w[0]) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            (p - (w[0] + d * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

impl AbelMap {
    pub fn new(curve: &CurveV, bd: &BranchData) -> Self {
        let n = curve.n_c64();
        let a = bd.a;
        let r = deflate(&n, a);
        let mut sing = Vec::new();
        for (k, &e) in bd.roots.iter().enumerate() {
            if k != bd.a_index {
                let s = (e - a).sqrt();
                sing.push(s);
                sing.push(-s);
            }
        }
        let scale = bd.roots.iter().map(|e| (e - a).norm()).fold(0.0, f64::max).sqrt().max(1e-3);
        AbelMap { g: curve.genus(), a, r, n, sing, scale }
    }

    fn nearest_sing(&self, p: Complex64) -> f64 {
        self.sing.iter().map(|s| (p - s).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Polyline in the r-plane from 0 to `end` keeping away from singularities.
    fn route(&self, end: Complex64) -> Result<Vec<Complex64>, NumericError> {
        let z = Complex64::new(0.0, 0.0);
        let straight = vec![z, end];
        let clearance = |pts: &[Complex64]| -> f64 {
            self.sing.iter().map(|&s| dist_to_polyline(s, pts)).fold(f64::INFINITY, f64::min)
        };
        let mut best = (clearance(&straight), straight);
        let target = 0.25 * self.nearest_sing(z).min(self.nearest_sing(end).max(1e-300));
        if best.0 >= target.min(0.2 * self.scale) {
            return Ok(best.1);
        }
        let perp = if end.norm() > 0.0 { Complex64::new(0.0, 1.0) * end } else { Complex64::new(0.0, self.scale) };
        for c in [0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5] {
            for t in [0.5, 0.3, 0.7] {
                let cand = vec![z, end * t + perp * c, end];
                let cl = clearance(&cand);
                if cl > best.0 * 1.5 {
                    best = (cl, cand);
                }
            }
        }
        if best.0 < 1e-9 * self.scale {
            return Err(NumericError::PathThroughBranchPoint);
        }
        Ok(best.1)
    }

    /// Nodes along a polyline with panels no longer than half the distance
    /// to the nearest singularity.
    fn nodes(&self, pts: &[Complex64]) -> Vec<PathNode> {
        let rule = GaussLegendre::standard();
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let mut stack = vec![(0.0f64, 1.0f64, 0usize)];
            let mut panels = Vec::new();
            while let Some((s0, s1, depth)) = stack.pop() {
                let mid = p + (q - p) * (0.5 * (s0 + s1));
                let half = 0.5 * (s1 - s0) * (q - p).norm();
                let d = self.nearest_sing(mid);
                if depth < 48 && half > 0.35 * d {
                    let m = 0.5 * (s0 + s1);
                    stack.push((m, s1, depth + 1));
                    stack.push((s0, m, depth + 1));
                } else {
                    panels.push((s0, s1));
                }
            }
            for (s0, s1) in panels {
                let h = 0.5 * (s1 - s0);
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let s = 0.5 * (s0 + s1) + h * x;
                    out.push(PathNode { z: p + (q - p) * s, dz: (q - p) * (wt * h) });
                }
            }
        }
        out
    }

    /// int_{(a,0)}^{Q} mu for one point.
    pub fn point(&self, q: CurvePoint) -> Result<Vec<Complex64>, NumericError> {
        let (x, y) = q;
        let g = self.g;
        let zero = vec![Complex64::new(0.0, 0.0); g];
        let ny = horner(&self.n, x);
        let ysc = ny.norm().sqrt().max(1.0);
        if (y * y - ny).norm() > 1e-8 * ysc * ysc {
            return Err(NumericError::SheetAmbiguity);
        }
        if (x - self.a).norm() == 0.0 {
            return Ok(zero);
        }
        let end = (x - self.a).sqrt();
        let pts = self.route(end)?;
        let nodes = self.nodes(&pts);
        let mut acc = zero;
        let mut prev = horner(&self.r, self.a).sqrt();
        for nd in &nodes {
            let xr = self.a + nd.z * nd.z;
            let mut s = horner(&self.r, xr).sqrt();
            if (s - prev).norm() > (s + prev).norm() {
                s = -s;
            }
            prev = s;
            let mut xp = Complex64::new(1.0, 0.0);
            for v in acc.iter_mut() {
                *v += xp / s * nd.dz;
                xp *= xr;
            }
        }
        // y at the end of the continued path is r * sqrt(R)
        let y_end = end * prev;
        if (y_end + y).norm() < (y_end - y).norm() {
            acc.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(acc)
    }

    /// Sum over a divisor.
    pub fn divisor(&self, pts: &[CurvePoint]) -> Result<Vec<Complex64>, NumericError> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.g];
        for &p in pts {
            for (acc, c) in v.iter_mut().zip(self.point(p)?) {
                *acc += c;
            }
        }
        Ok(v)
    }

    /// A random point of V with x near the branch points; deterministic in rng.
    pub fn random_point<R: rand::Rng>(&self, bd: &BranchData, rng: &mut R) -> CurvePoint {
        let (lo_re, hi_re) = bd.roots.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.re), h.max(r.re)));
        let (lo_im, hi_im) = bd.roots.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.im), h.max(r.im)));
        let pad = 0.25 * ((hi_re - lo_re).max(hi_im - lo_im)).max(1.0);
        loop {
            let x = Complex64::new(rng.gen_range(lo_re - pad..hi_re + pad), rng.gen_range(lo_im - pad..hi_im + pad));
            let near = bd.roots.iter().map(|r| (r - x).norm()).fold(f64::INFINITY, f64::min);
            if near < 0.05 * pad {
                continue;
            }
            let mut y = horner(&self.n, x).sqrt();
            if rng.gen_bool(0.5) {
                y = -y;
            }
            return (x, y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::periods::branch_points;

    #[test]
    fn reversal_and_involution() {
        let c = CurveV::exact(1, &[1, 0, 0, 0, -1], 1).unwrap();
        let bd = branch_points(&c).unwrap();
        let am = AbelMap::new(&c, &bd);
        let x = Complex64::new(0.3, 0.4);
        let y = horner(&c.n_c64(), x).sqrt();
        let v = am.point((x, y)).unwrap();
        let w = am.point((x, -y)).unwrap();
        assert!((v[0] + w[0]).norm() < 1e-13);
        assert!(am.divisor(&[]).unwrap()[0].norm() == 0.0);
    }

    #[test]
    fn derivative_is_the_form() {
        // d/dx of the Abel map is x^{i-1}/(2y)
        let c = CurveV::random_rational(2, 3);
        let bd = branch_points(&c).unwrap();
        let am = AbelMap::new(&c, &bd);
        let n = c.n_c64();
        let x0 = Complex64::new(0.7, 0.9);
        let y0 = horner(&n, x0).sqrt();
        let h = 1e-5;
        let mut y1 = horner(&n, x0 + h).sqrt();
        if (y1 - y0).norm() > (y1 + y0).norm() {
            y1 = -y1;
        }
        let v0 = am.point((x0, y0)).unwrap();
        let v1 = am.point((x0 + h, y1)).unwrap();
        for i in 0..2 {
            let d = (v1[i] - v0[i]) / h;
            let expect = x0.powi(i as i32) / (2.0 * y0);
            assert!((d - expect).norm() < 1e-4 * expect.norm(), "{d} {expect}");
        }
    }
}
