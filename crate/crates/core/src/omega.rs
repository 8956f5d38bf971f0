//! f-bar, the coefficient table n~, the matrix Omega, and the forms kappa_i.

use crate::algebra::{substitute_rat, MultiPoly, RatFunc, Rational, WeightTable};
use crate::baker::build_f;
use crate::curve::{tidy, ScaledModel};
use crate::error::OmegaError;

/// f~(X1, X2) = sum_{i=0}^{g} X1^i X2^i {2 l~_{4g+2-4i} + l~_{4g-4i}(X1+X2)}.
pub fn f_tilde(m: &ScaledModel) -> RatFunc {
    let g = m.genus();
    let x1 = MultiPoly::var("X1");
    let x2 = MultiPoly::var("X2");
    let sum = x1.add(&x2);
    let prod = x1.mul(&x2);
    let mut acc = RatFunc::zero();
    for i in 0..=g {
        let top = m.lambda[2 * g + 1 - 2 * i].scale(&Rational::from_int(2));
        let next = m.lambda[2 * g - 2 * i].mul_poly(&sum);
        acc = acc.add(&top.add(&next).mul_poly(&prod.pow(i as u32)));
    }
    acc
}

/// Strip the scaling symbols and insist on a polynomial free of them.
/// Remaining nonnegative powers of `np` are expanded as N'(a).
fn scaling_free(m: &ScaledModel, r: &RatFunc, what: &str) -> Result<MultiPoly, OmegaError> {
    let r = tidy(r);
    let expanded = r.as_poly().map(|p| m.sym.expand_np(&RatFunc::from_poly(p)));
    match expanded.and_then(|e| e.as_poly()) {
        Some(p) if !p.contains_var("w") && !p.contains_var("np") => Ok(p),
        _ => Err(OmegaError::SimplificationFailure(format!("{what}: {r}"))),
    }
}

/// f-bar = t^{-2} (e1-a)^{g+1} (e2-a)^{g+1} f~(s/(e1-a), s/(e2-a)).
pub fn f_bar(m: &ScaledModel) -> Result<MultiPoly, OmegaError> {
    let g = m.genus() as u32;
    let a = &m.sym.a;
    let e1a = MultiPoly::var("e1").sub(a);
    let e2a = MultiPoly::var("e2").sub(a);
    let b1 = m.s.mul(&RatFunc::from_poly(e1a.clone()).recip()?);
    let b2 = m.s.mul(&RatFunc::from_poly(e2a.clone()).recip()?);
    let sub = substitute_rat(&f_tilde(m), &[("X1", b1), ("X2", b2)])?;
    let r = sub
        .mul_poly(&e1a.pow(g + 1).mul(&e2a.pow(g + 1)))
        .div(&m.t.pow(2)?)?
        .cancel_factors(&[e1a, e2a]);
    scaling_free(m, &r, "f_bar")
}

/// Table n~_{i,j} (1-based, i, j = 1..g+2) of f-bar coefficients.
pub fn n_tilde_table(fbar: &MultiPoly, g: usize) -> Vec<Vec<MultiPoly>> {
    let mut t = vec![vec![MultiPoly::zero(); g + 2]; g + 2];
    for (i, row) in fbar.coefficients_in("e1").iter().enumerate() {
        for (j, c) in row.coefficients_in("e2").iter().enumerate() {
            if i < g + 2 && j < g + 2 {
                t[i][j] = c.clone();
            }
        }
    }
    t
}

fn binom(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        Rational::zero()
    } else {
        Rational::binomial(n, k)
    }
}

/// Closed form of n~_{i+2,j} for 1 <= j <= i <= g.
pub fn n_tilde_closed(m: &ScaledModel, i: usize, j: usize) -> Result<MultiPoly, OmegaError> {
    let g = m.genus() as i64;
    let (i, j) = (i as i64, j as i64);
    let mina = m.sym.a.neg();
    let lam = |idx: i64| m.lambda[(idx / 2) as usize].clone();
    let pow_a = |e: i64| mina.pow(e as u32);
    let mut acc = RatFunc::zero();
    for k in 0..=(g - i) {
        let c = binom(g + 1 - k, i + 1) * binom(g + 1 - k, j - 1);
        if !c.is_zero() {
            let term = lam(4 * g + 2 - 4 * k).mul(&m.s.pow(2 * k as i32)?).scale(&(c * Rational::from_int(2)));
            acc = acc.add(&term.mul_poly(&pow_a(2 * g + 2 - 2 * k - i - j)));
        }
    }
    for k in 0..=(g - i - 1) {
        let c = binom(g - k, i + 1) * binom(g + 1 - k, j - 1);
        if !c.is_zero() {
            let term = lam(4 * g - 4 * k).mul(&m.s.pow(2 * k as i32 + 1)?).scale(&c);
            acc = acc.add(&term.mul_poly(&pow_a(2 * g + 1 - 2 * k - i - j)));
        }
    }
    for k in 0..=(g - i) {
        let c = binom(g + 1 - k, i + 1) * binom(g - k, j - 1);
        if !c.is_zero() {
            let term = lam(4 * g - 4 * k).mul(&m.s.pow(2 * k as i32 + 1)?).scale(&c);
            acc = acc.add(&term.mul_poly(&pow_a(2 * g + 1 - 2 * k - i - j)));
        }
    }
    scaling_free(m, &acc.div(&m.t.pow(2)?)?, "n~ closed form")
}

/// Exact results of the omega-kappa stage.
#[derive(Clone, Debug)]
pub struct OmegaData {
    pub g: usize,
    pub f: MultiPoly,
    pub f_bar: MultiPoly,
    /// n~_{i,j}, 0-based storage of the 1-based table
    pub n_tilde: Vec<Vec<MultiPoly>>,
    /// Omega = (n_{i,j}), 0-based storage
    pub omega: Vec<Vec<MultiPoly>>,
    pub chi: RatFunc,
    /// kappa_i = kappa_numer[i] / (x-a)^g * dx/(2y)
    pub kappa_numer: Vec<MultiPoly>,
}

/// Omega by the recursion, column j = 1 first, then symmetrised.
pub fn omega_recursion(nt: &[Vec<MultiPoly>], g: usize) -> Vec<Vec<MultiPoly>> {
    // n(i, j) 1-based, zero outside 1..=g
    let mut n = vec![vec![MultiPoly::zero(); g + 1]; g + 3];
    let get = |n: &Vec<Vec<MultiPoly>>, i: i64, j: i64| -> MultiPoly {
        if i < 1 || j < 1 || i > g as i64 || j > g as i64 {
            MultiPoly::zero()
        } else {
            n[i as usize][j as usize].clone()
        }
    };
    for j in 1..=g {
        for i in j..=g {
            let (ii, jj) = (i as i64, j as i64);
            let v = get(&n, ii + 1, jj - 1)
                .scale(&Rational::from_int(2))
                .sub(&get(&n, ii + 2, jj - 2))
                .add(&nt[i + 1][j - 1]);
            n[i][j] = v;
        }
    }
    let mut out = vec![vec![MultiPoly::zero(); g]; g];
    for i in 1..=g {
        for j in 1..=g {
            out[i - 1][j - 1] = if j <= i { n[i][j].clone() } else { n[j][i].clone() };
        }
    }
    out
}

/// Check n_{i,j} = 2 n_{i+1,j-1} - n_{i+2,j-2} + n~_{i+2,j} for all 1 <= j <= i <= g.
pub fn recursion_holds(omega: &[Vec<MultiPoly>], nt: &[Vec<MultiPoly>], g: usize) -> bool {
    let get = |i: i64, j: i64| -> MultiPoly {
        if i < 1 || j < 1 || i > g as i64 || j > g as i64 {
            MultiPoly::zero()
        } else {
            omega[i as usize - 1][j as usize - 1].clone()
        }
    };
    (1..=g).all(|j| {
        (j..=g).all(|i| {
            let (ii, jj) = (i as i64, j as i64);
            let rhs = get(ii + 1, jj - 1).scale(&Rational::from_int(2)).sub(&get(ii + 2, jj - 2)).add(&nt[i + 1][j - 1]);
            get(ii, jj) == rhs
        })
    })
}

/// f-bar - f - (e1-e2)^2 sum n_{i,j} e1^{i-1} e2^{j-1}; zero when the master identity holds.
pub fn master_residual(fbar: &MultiPoly, f: &MultiPoly, omega: &[Vec<MultiPoly>]) -> MultiPoly {
    let e1 = MultiPoly::var("e1");
    let e2 = MultiPoly::var("e2");
    let mut s = MultiPoly::zero();
    for (i, row) in omega.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            s = s.add(&c.mul(&e1.pow(i as u32)).mul(&e2.pow(j as u32)));
        }
    }
    fbar.sub(f).sub(&e1.sub(&e2).pow(2).mul(&s))
}

/// kappa_i numerators: kappa = t{(zeta* eta) D} - 2 Omega mu, times (x-a)^g.
pub fn kappa_forms(m: &ScaledModel, omega: &[Vec<MultiPoly>]) -> Result<Vec<MultiPoly>, OmegaError> {
    let g = m.genus();
    let xa = MultiPoly::var("x").sub(&m.sym.a);
    let pulled: Vec<RatFunc> = m.eta().iter().map(|e| m.pullback(&e.numer)).collect();
    let mu = m.mu();
    let mut out = Vec::with_capacity(g);
    for i in 0..g {
        let mut k = RatFunc::zero();
        for j in 0..g {
            k = k.add(&tidy(&pulled[j].mul(&m.d[j][i])));
        }
        for l in 0..g {
            k = k.sub(&mu[l].numer.mul_poly(&omega[i][l]).scale(&Rational::from_int(2)));
        }
        let r = k.mul_poly(&xa.pow(g as u32)).cancel_factor(&xa);
        out.push(scaling_free(m, &r, &format!("kappa_{}", i + 1))?);
    }
    Ok(out)
}

/// Full omega-kappa stage with all internal consistency checks.
pub fn compute(m: &ScaledModel) -> Result<OmegaData, OmegaError> {
    let g = m.genus();
    let fbar = f_bar(m)?;
    let nt = n_tilde_table(&fbar, g);
    for i in 1..=g {
        for j in 1..=i {
            if n_tilde_closed(m, i, j)? != nt[i + 1][j - 1] {
                return Err(OmegaError::ClosedFormMismatch { i: i + 2, j });
            }
        }
    }
    let omega = omega_recursion(&nt, g);
    let f = build_f(&m.sym);
    if !recursion_holds(&omega, &nt, g) || !master_residual(&fbar, &f, &omega).is_zero() {
        return Err(OmegaError::ReconstructionFailure);
    }
    let kappa_numer = kappa_forms(m, &omega)?;
    Ok(OmegaData { g, f, f_bar: fbar, n_tilde: nt, omega, chi: m.chi.clone(), kappa_numer })
}

impl OmegaData {
    pub fn is_symmetric(&self) -> bool {
        (0..self.g).all(|i| (0..i).all(|j| self.omega[i][j] == self.omega[j][i]))
    }

    /// Weight of n_{i,j} is 4g+4-2i-2j (1-based).
    pub fn weights_ok(&self) -> bool {
        let w = WeightTable::for_genus(self.g);
        (0..self.g).all(|i| {
            (0..self.g).all(|j| match w.graded_weight(&self.omega[i][j]) {
                Ok(Some(k)) => k == (4 * self.g + 4 - 2 * (i + 1) - 2 * (j + 1)) as i64,
                Ok(None) => true,
                Err(_) => false,
            })
        })
    }

    /// Every Omega entry and kappa numerator uses only a, nu (and x).
    pub fn ring_membership_ok(&self) -> bool {
        let ok = |p: &MultiPoly| p.used_vars().iter().all(|v| &**v == "a" || &**v == "x" || v.starts_with("nu"));
        self.omega.iter().flatten().all(ok) && self.kappa_numer.iter().all(ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var;
    use crate::curve::Symbols;

    #[test]
    fn genus_one_anchors() {
        let m = ScaledModel::new(Symbols::generic(1));
        let d = compute(&m).unwrap();
        let a = var("a");
        let two = Rational::from_int(2);
        let n11 = a.pow(2).mul(&var("nu0")).scale(&Rational::from_int(-2)).sub(&a.mul(&var("nu2")));
        assert_eq!(d.omega[0][0], n11);
        let inner = a.mul(&var("nu0")).scale(&two).add(&var("nu2"));
        let kappa = a
            .mul(&inner)
            .scale(&two)
            .mul(&var("x"))
            .add(&a.pow(2).mul(&var("nu2")))
            .add(&a.mul(&var("nu4")).scale(&two))
            .add(&var("nu6"));
        assert_eq!(d.kappa_numer[0], kappa);
        assert!(d.weights_ok() && d.ring_membership_ok());
    }

    #[test]
    fn genus_two_master_identity() {
        let m = ScaledModel::new(Symbols::generic(2));
        let d = compute(&m).unwrap();
        assert!(d.is_symmetric() && d.weights_ok() && d.ring_membership_ok());
        // f-bar has degree g+1 in e1
        assert_eq!(d.f_bar.degree_in("e1"), 3);
        assert_eq!(d.f_bar.swap_vars("e1", "e2"), d.f_bar);
    }
}
