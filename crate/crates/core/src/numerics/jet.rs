//! Truncated multivariate Taylor polynomials ("jets") with complex
//! coefficients, used for analytic derivatives of log theta and log H.

use std::sync::Arc;

use num_complex::Complex64;
use rustc_hash::FxHashMap;

/// Monomial layout for `nvars` variables up to total degree `order`.
#[derive(Debug)]
pub struct JetSpace {
    pub nvars: usize,
    pub order: usize,
    pub exps: Vec<Vec<u8>>,
    index: FxHashMap<Vec<u8>, usize>,
    /// (i, j, k): monomial i times monomial j is monomial k
    products: Vec<(usize, usize, usize)>,
    /// 1 / alpha!
    pub inv_fact: Vec<f64>,
}

fn fact(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl JetSpace {
    pub fn new(nvars: usize, order: usize) -> Arc<Self> {
        let mut exps: Vec<Vec<u8>> = vec![vec![]];
        for _ in 0..nvars {
            let mut next = Vec::new();
            for e in &exps {
                let used: usize = e.iter().map(|&k| k as usize).sum();
                for k in 0..=(order - used) {
                    let mut f = e.clone();
                    f.push(k as u8);
                    next.push(f);
                }
            }
            exps = next;
        }
        exps.sort_by_key(|e| (e.iter().map(|&k| k as usize).sum::<usize>(), std::cmp::Reverse(e.clone())));
        let index: FxHashMap<Vec<u8>, usize> = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = index.get(&s) {
                    products.push((i, j, k));
                }
            }
        }
        let inv_fact = exps.iter().map(|e| 1.0 / e.iter().map(|&k| fact(k as u32)).product::<f64>()).collect();
        Arc::new(JetSpace { nvars, order, exps, index, products, inv_fact })
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.exps[i].iter().map(|&k| k as usize).sum()
    }

    /// Multi-index with ones at the listed variables (repeats allowed).
    pub fn index_of_vars(&self, vars: &[usize]) -> Option<usize> {
        let mut e = vec![0u8; self.nvars];
        for &v in vars {
            e[v] += 1;
        }
        self.index_of(&e)
    }
}

#[derive(Clone, Debug)]
pub struct Jet {
    pub space: Arc<JetSpace>,
    pub c: Vec<Complex64>,
}

impl Jet {
    pub fn zero(space: &Arc<JetSpace>) -> Self {
        Jet { space: space.clone(), c: vec![Complex64::new(0.0, 0.0); space.len()] }
    }

    pub fn constant(space: &Arc<JetSpace>, v: Complex64) -> Self {
        let mut j = Self::zero(space);
        j.c[0] = v;
        j
    }

    /// exp(sum_k w_k dz_k) scaled by `scale`, accumulated into self.
    pub fn add_exp_linear(&mut self, scale: Complex64, w: &[Complex64]) {
        let sp = &self.space;
        let order = sp.order;
        let powers: Vec<Vec<Complex64>> = w
            .iter()
            .map(|&wk| {
                let mut p = Vec::with_capacity(order + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=order {
                    p.push(acc);
                    acc *= wk;
                }
                p
            })
            .collect();
        for (i, e) in sp.exps.iter().enumerate() {
            let mut m = scale * sp.inv_fact[i];
            for (k, &ek) in e.iter().enumerate() {
                m *= powers[k][ek as usize];
            }
            self.c[i] += m;
        }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: Complex64) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut out = Jet::zero(&self.space);
        for &(i, j, k) in &self.space.products {
            out.c[k] += self.c[i] * o.c[j];
        }
        out
    }

    /// log of a jet with nonzero constant term (principal log of c0).
    pub fn log(&self) -> Jet {
        let c0 = self.c[0];
        let mut r = self.scale(1.0 / c0);
        r.c[0] = Complex64::new(0.0, 0.0);
        let mut out = Jet::zero(&self.space);
        let mut pow = r.clone();
        for k in 1..=self.space.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out = out.add(&pow.scale(Complex64::new(sign / k as f64, 0.0)));
            pow = pow.mul(&r);
        }
        out.c[0] = c0.ln();
        out
    }

    pub fn exp(&self) -> Jet {
        let e0 = self.c[0].exp();
        let mut r = self.clone();
        r.c[0] = Complex64::new(0.0, 0.0);
        let mut out = Jet::constant(&self.space, Complex64::new(1.0, 0.0));
        let mut pow = Jet::constant(&self.space, Complex64::new(1.0, 0.0));
        for k in 1..=self.space.order {
            pow = pow.mul(&r).scale(Complex64::new(1.0 / k as f64, 0.0));
            out = out.add(&pow);
        }
        out.scale(e0)
    }

    /// Quadratic form q(z0 + dz) = (z0 + dz)^t Q (z0 + dz) / 2 as a jet.
    pub fn quadratic(space: &Arc<JetSpace>, q: &[Vec<Complex64>], z0: &[Complex64]) -> Jet {
        let n = space.nvars;
        let mut j = Jet::zero(space);
        let mut val = Complex64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                val += z0[a] * q[a][b] * z0[b];
            }
        }
        j.c[0] = 0.5 * val;
        if space.order >= 1 {
            for a in 0..n {
                let g: Complex64 = (0..n).map(|b| 0.5 * (q[a][b] + q[b][a]) * z0[b]).sum();
                j.c[space.index_of_vars(&[a]).unwrap()] += g;
            }
        }
        if space.order >= 2 {
            for a in 0..n {
                for b in a..n {
                    let idx = space.index_of_vars(&[a, b]).unwrap();
                    let h = 0.5 * (q[a][b] + q[b][a]);
                    j.c[idx] += if a == b { 0.5 * h } else { h };
                }
            }
        }
        j
    }

    /// Partial derivative d^alpha at the expansion point, alpha given as a
    /// list of variable indices (with repetition).
    pub fn derivative(&self, vars: &[usize]) -> Complex64 {
        let idx = self.space.index_of_vars(vars).expect("derivative order exceeds the jet order");
        self.c[idx] / self.space.inv_fact[idx]
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// Re-expand the jet in new variables dz = M dw (M is nvars x new_vars).
    pub fn linear_change(&self, target: &Arc<JetSpace>, m: &[Vec<Complex64>]) -> Jet {
        // substitute dz_k = sum_l m[k][l] dw_l into each monomial
        let lin: Vec<Jet> = (0..self.space.nvars)
            .map(|k| {
                let mut j = Jet::zero(target);
                for l in 0..target.nvars {
                    if let Some(idx) = target.index_of_vars(&[l]) {
                        j.c[idx] = m[k][l];
                    }
                }
                j
            })
            .collect();
        let mut out = Jet::zero(target);
        for (i, e) in self.space.exps.iter().enumerate() {
            if self.c[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut term = Jet::constant(target, self.c[i]);
            for (k, &ek) in e.iter().enumerate() {
                for _ in 0..ek {
                    term = term.mul(&lin[k]);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exp_log_round_trip() {
        let sp = JetSpace::new(2, 5);
        let mut j = Jet::zero(&sp);
        j.add_exp_linear(c(2.0), &[c(0.3), c(-0.7)]);
        j.add_exp_linear(c(1.0), &[c(1.1), c(0.2)]);
        let back = j.log().exp();
        for (a, b) in back.c.iter().zip(&j.c) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn derivatives_of_exponential() {
        let sp = JetSpace::new(2, 4);
        let mut j = Jet::zero(&sp);
        j.add_exp_linear(c(1.0), &[c(2.0), c(3.0)]);
        // d^3/dx^2 dy e^{2x+3y} at 0 = 4 * 3
        assert!((j.derivative(&[0, 0, 1]) - c(12.0)).norm() < 1e-12);
        // log of a pure exponential is linear
        let l = j.log();
        assert!((l.derivative(&[0]) - c(2.0)).norm() < 1e-13);
        assert!(l.derivative(&[0, 1]).norm() < 1e-13);
    }

    #[test]
    fn quadratic_jet() {
        let sp = JetSpace::new(2, 3);
        let q = vec![vec![c(2.0), c(1.0)], vec![c(1.0), c(4.0)]];
        let j = Jet::quadratic(&sp, &q, &[c(1.0), c(0.5)]);
        // q(1, .5)/2 = (2 + 1 + 1)/2
        assert!((j.value() - c(2.0)).norm() < 1e-14);
        assert!((j.derivative(&[0, 1]) - c(1.0)).norm() < 1e-14);
        assert!((j.derivative(&[1, 1]) - c(4.0)).norm() < 1e-14);
        assert!((j.derivative(&[0]) - c(2.5)).norm() < 1e-14);
    }
}
