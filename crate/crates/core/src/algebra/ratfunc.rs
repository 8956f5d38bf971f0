//! Rational functions as (numerator, denominator) pairs of [`MultiPoly`].
//!
//! The denominator is normalised to leading coefficient 1. Fractions are not
//! reduced by a general gcd; callers cancel known factors with
//! [`RatFunc::cancel_factor`] when they want smaller representatives.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::poly::{Mono, MultiPoly};
use super::rational::{lcm_denominators, Rational};
use crate::error::AlgebraError;

#[derive(Clone)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return RatFunc { num, den: MultiPoly::one() };
        }
        if let Some(c) = den.constant_value() {
            let inv = c.recip().expect("nonzero denominator");
            return RatFunc { num: num.scale(&inv), den: MultiPoly::one() };
        }
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip().expect("nonzero leading coefficient");
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RatFunc { num: p, den: MultiPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(MultiPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(MultiPoly::var(name))
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.constant_value().is_some()
    }

    /// The polynomial, if the denominator is constant.
    pub fn as_poly(&self) -> Option<MultiPoly> {
        self.den.constant_value().map(|c| self.num.scale(&c.recip().expect("nonzero")))
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return Self::normalized(self.num.add(&other.num), self.den.clone());
        }
        if other.den.is_constant() {
            return Self::normalized(self.num.add(&other.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_constant() {
            return Self::normalized(self.num.mul(&other.den).add(&other.num), other.den.clone());
        }
        if let Ok(k) = self.den.exact_divide(&other.den) {
            return Self::normalized(self.num.add(&other.num.mul(&k)), self.den.clone());
        }
        if let Ok(k) = other.den.exact_divide(&self.den) {
            return Self::normalized(self.num.mul(&k).add(&other.num), other.den.clone());
        }
        Self::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_constant() && other.den.is_constant() {
            return Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den));
        }
        // Cheap cross-cancellation when a denominator divides the other numerator.
        let (n1, d2) = match self.num.exact_divide(&other.den) {
            Ok(q) if !other.den.is_constant() => (q, MultiPoly::one()),
            _ => (self.num.clone(), other.den.clone()),
        };
        let (n2, d1) = match other.num.exact_divide(&self.den) {
            Ok(q) if !self.den.is_constant() => (q, MultiPoly::one()),
            _ => (other.num.clone(), self.den.clone()),
        };
        Self::normalized(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> RatFunc {
        Self::normalized(self.num.mul(p), self.den.clone())
    }

    pub fn scale(&self, k: &Rational) -> RatFunc {
        Self::normalized(self.num.scale(k), self.den.clone())
    }

    pub fn recip(&self) -> Result<RatFunc, AlgebraError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, AlgebraError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, k: i32) -> Result<RatFunc, AlgebraError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(Self::normalized(base.num.pow(e), base.den.pow(e)))
    }

    /// Divide numerator and denominator by `factor` as often as both allow.
    pub fn cancel_factor(&self, factor: &MultiPoly) -> RatFunc {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if factor.is_constant() || num.is_zero() {
            return self.clone();
        }
        loop {
            let Ok(d) = den.exact_divide(factor) else { break };
            let Ok(n) = num.exact_divide(factor) else { break };
            num = n;
            den = d;
        }
        Self::normalized(num, den)
    }

    pub fn cancel_factors(&self, factors: &[MultiPoly]) -> RatFunc {
        factors.iter().fold(self.clone(), |r, f| r.cancel_factor(f))
    }

    /// Cancel the largest common monomial factor of numerator and
    /// denominator, and clear rational content from the numerator.
    pub fn cancel_monomial_content(&self) -> RatFunc {
        if self.num.is_zero() {
            return self.clone();
        }
        let mut acc = self.clone();
        for v in self.den.used_vars() {
            let f = MultiPoly::var(&v);
            acc = acc.cancel_factor(&f);
        }
        acc
    }

    /// Exact equality as rational functions (cross-multiplication).
    pub fn equals(&self, other: &RatFunc) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.num.contains_var(name) || self.den.contains_var(name)
    }

    pub fn differentiate(&self, name: &str) -> RatFunc {
        let dn = self.num.differentiate(name, 1);
        let dd = self.den.differentiate(name, 1);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        Self::normalized(dn.mul(&self.den).sub(&self.num.mul(&dd)), self.den.pow(2))
    }

    pub fn reduce_square(&self, name: &str, replacement: &MultiPoly) -> RatFunc {
        Self::normalized(
            self.num.reduce_square(name, replacement),
            self.den.reduce_square(name, replacement),
        )
    }

    pub fn eval_partial(&self, bindings: &[(&str, Rational)]) -> Result<RatFunc, AlgebraError> {
        RatFunc::new(self.num.eval_partial(bindings), self.den.eval_partial(bindings))
    }

    pub fn eval_c64<F>(&self, binding: F) -> Result<Complex64, AlgebraError>
    where
        F: Fn(&str) -> Option<Complex64> + Copy,
    {
        let d = self.den.eval_c64(binding)?;
        let n = self.num.eval_c64(binding)?;
        let scale: f64 = self
            .den
            .terms()
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().abs();
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 {
                        let v = binding(&self.den.vars()[i]).map(|z| z.norm()).unwrap_or(1.0);
                        t *= v.powi(e as i32);
                    }
                }
                t
            })
            .sum();
        if d.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(AlgebraError::DenominatorVanishes);
        }
        Ok(n / d)
    }

    /// Numerator with integer coefficients (content cleared) — handy for
    /// comparisons against printed closed forms.
    pub fn integral_parts(&self) -> (MultiPoly, MultiPoly) {
        let l = lcm_denominators(self.num.terms().iter().map(|(_, c)| c).chain(self.den.terms().iter().map(|(_, c)| c)));
        let k = Rational::from_bigs(l, num_bigint::BigInt::from(1));
        (self.num.scale(&k), self.den.scale(&k))
    }

    pub fn to_canonical(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.constant_value().map(|c| c.is_one()).unwrap_or(false) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<MultiPoly> for RatFunc {
    fn from(p: MultiPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

/// Simultaneous substitution into a polynomial. Returns the numerator and
/// the exponent of each binding's denominator that was cleared.
fn substitute_poly(
    p: &MultiPoly,
    bindings: &[(&str, RatFunc)],
) -> (MultiPoly, Vec<u32>) {
    let idx: Vec<Option<usize>> = bindings.iter().map(|(n, _)| p.var_index(n)).collect();
    let maxdeg: Vec<u32> = bindings.iter().map(|(n, _)| p.degree_in(n)).collect();
    // Group terms by their exponents in the bound variables.
    let mut groups: BTreeMap<Vec<u16>, Vec<(Mono, Rational)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let key: Vec<u16> = idx.iter().map(|i| i.map(|i| m[i]).unwrap_or(0)).collect();
        let mut rest = m.clone();
        for i in idx.iter().flatten() {
            rest[*i] = 0;
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    let names: Vec<String> = p.vars().iter().map(|v| v.to_string()).collect();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut num_pows: Vec<Vec<MultiPoly>> = Vec::new();
    let mut den_pows: Vec<Vec<MultiPoly>> = Vec::new();
    for (k, (_, r)) in bindings.iter().enumerate() {
        let d = maxdeg[k] as usize;
        let mut np = vec![MultiPoly::one()];
        let mut dp = vec![MultiPoly::one()];
        for j in 1..=d {
            np.push(np[j - 1].mul(r.numer()));
            dp.push(dp[j - 1].mul(r.denom()));
        }
        num_pows.push(np);
        den_pows.push(dp);
    }
    let mut acc = MultiPoly::zero();
    for (key, terms) in groups {
        let coeff = MultiPoly::from_terms(
            &name_refs,
            terms.into_iter().map(|(m, c)| (m.to_vec(), c)).collect(),
        );
        let mut t = coeff;
        for (k, &e) in key.iter().enumerate() {
            let e = e as usize;
            let full = maxdeg[k] as usize;
            if full == 0 {
                continue;
            }
            t = t.mul(&num_pows[k][e]);
            if full > e {
                t = t.mul(&den_pows[k][full - e]);
            }
        }
        acc = acc.add(&t);
    }
    (acc, maxdeg)
}

/// Substitute variables of a polynomial simultaneously by rational functions.
pub fn substitute(p: &MultiPoly, bindings: &[(&str, RatFunc)]) -> RatFunc {
    if bindings.is_empty() {
        return RatFunc::from_poly(p.clone());
    }
    let (num, degs) = substitute_poly(p, bindings);
    let mut den = MultiPoly::one();
    for (k, (_, r)) in bindings.iter().enumerate() {
        if degs[k] > 0 && !r.denom().is_constant() {
            den = den.mul(&r.denom().pow(degs[k]));
        }
    }
    RatFunc::normalized(num, den)
}

/// Substitute into a rational function.
pub fn substitute_rat(r: &RatFunc, bindings: &[(&str, RatFunc)]) -> Result<RatFunc, AlgebraError> {
    if bindings.is_empty() {
        return Ok(r.clone());
    }
    let (n, dn) = substitute_poly(r.numer(), bindings);
    let (d, dd) = substitute_poly(r.denom(), bindings);
    // n / prod b^dn  divided by  d / prod b^dd
    let mut num = n;
    let mut den = d;
    for (k, (_, b)) in bindings.iter().enumerate() {
        if b.denom().is_constant() {
            continue;
        }
        let (a, c) = (dn[k], dd[k]);
        if c > a {
            num = num.mul(&b.denom().pow(c - a));
        } else if a > c {
            den = den.mul(&b.denom().pow(a - c));
        }
    }
    RatFunc::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{int, var};

    #[test]
    fn substitute_square_of_scaled_inverse() {
        // x^2 with x -> s/(e1 - a) gives s^2/(e1 - a)^2
        let b = RatFunc::new(var("s"), &var("e1") - &var("a")).unwrap();
        let r = substitute(&var("x").pow(2), &[("x", b)]);
        let expect = RatFunc::new(var("s").pow(2), (&var("e1") - &var("a")).pow(2)).unwrap();
        assert!(r.equals(&expect));
    }

    #[test]
    fn substitute_empty_is_identity() {
        let p = &var("x").pow(3) + &int(2);
        assert!(substitute(&p, &[]).equals(&RatFunc::from_poly(p.clone())));
    }

    #[test]
    fn substitution_is_simultaneous() {
        // x -> y, y -> x swaps
        let p = &var("x") - &var("y").pow(2);
        let r = substitute(&p, &[("x", RatFunc::var("y")), ("y", RatFunc::var("x"))]);
        assert!(r.equals(&RatFunc::from_poly(&var("y") - &var("x").pow(2))));
    }

    #[test]
    fn cancel_known_factor() {
        let x = var("x");
        let r = RatFunc::new((&x - &int(1)).mul(&(&x + &int(2))), (&x - &int(1)).pow(2)).unwrap();
        let c = r.cancel_factor(&(&x - &int(1)));
        assert_eq!(c.denom(), &(&x - &int(1)));
        assert!(c.equals(&r));
    }

    #[test]
    fn denominator_normalised_to_monic() {
        let r = RatFunc::new(var("x"), var("x").scale(&Rational::from_int(4))).unwrap();
        assert_eq!(r.to_string(), "(1/4*x)/(x)");
        assert!(RatFunc::new(var("x"), MultiPoly::zero()).is_err());
    }

    #[test]
    fn eval_detects_vanishing_denominator() {
        let r = RatFunc::new(int(1), &var("x") - &int(2)).unwrap();
        let v = r.eval_c64(|_| Some(Complex64::new(2.0, 0.0)));
        assert_eq!(v, Err(AlgebraError::DenominatorVanishes));
        let v = r.eval_c64(|_| Some(Complex64::new(3.0, 0.0))).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
