//! Schur-type polynomials p_n and S(T), the genus-1 sigma series and the
//! genus-1 expansion of H.

use rustc_hash::FxHashMap;

use crate::algebra::{MultiPoly, RatFunc, Rational, WeightTable};
use crate::curve::{tidy, ScaledModel};
use crate::error::SeriesError;
use crate::omega::OmegaData;

/// p_0..p_{n_max} from sum_i (sum_j T_j k^j)^i / i! = sum_n p_n k^n,
/// via n p_n = sum_{j=1}^n j T_j p_{n-j}.
pub fn p_polynomials(n_max: usize) -> Vec<MultiPoly> {
    let mut p = vec![MultiPoly::one()];
    for n in 1..=n_max {
        let mut acc = MultiPoly::zero();
        for j in 1..=n {
            let t = MultiPoly::var(&format!("T{j}"));
            acc = acc.add(&t.mul(&p[n - j]).scale(&Rational::from_int(j as i64)));
        }
        p.push(acc.scale(&Rational::new(1, n as i64)));
    }
    p
}

fn det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][c].mul(&det(&minor));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// S(T) = det(p_{g+j+1-2i})_{1<=i,j<=g}; fails if an even T_k survives.
pub fn schur_det(g: usize) -> Result<MultiPoly, SeriesError> {
    let p = p_polynomials(2 * g);
    let m: Vec<Vec<MultiPoly>> = (1..=g as i64)
        .map(|i| {
            (1..=g as i64)
                .map(|j| {
                    let k = g as i64 + j + 1 - 2 * i;
                    if k < 0 {
                        MultiPoly::zero()
                    } else {
                        p[k as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    let s = det(&m);
    for v in s.used_vars() {
        let k: usize = v[1..].parse().unwrap_or(1);
        if k % 2 == 0 {
            return Err(SeriesError::EvenVariableSurvives(v.to_string()));
        }
    }
    Ok(s)
}

/// S(u) = S(T)|_{T_i = u_i}.
pub fn schur_u(g: usize) -> Result<MultiPoly, SeriesError> {
    let s = schur_det(g)?;
    let names: Vec<String> = s.used_vars().iter().map(|v| v.to_string()).collect();
    let pairs: Vec<(String, String)> = names.iter().map(|n| (n.clone(), format!("u{}", &n[1..]))).collect();
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(s.rename(&refs))
}

/// Coefficients a_{m,n} of the Weierstrass sigma series
/// sigma(z) = sum a_{m,n} (g2/2)^m (2 g3)^n z^{4m+6n+1} / (4m+6n+1)!.
pub fn weierstrass_table(max_order: usize) -> FxHashMap<(i64, i64), Rational> {
    let mut a: FxHashMap<(i64, i64), Rational> = FxHashMap::default();
    a.insert((0, 0), Rational::one());
    let get = |a: &FxHashMap<(i64, i64), Rational>, m: i64, n: i64| -> Rational {
        if m < 0 || n < 0 {
            Rational::zero()
        } else {
            a.get(&(m, n)).cloned().unwrap_or_else(Rational::zero)
        }
    };
    // a_{m,n} depends on entries of smaller 2m+3n
    let kmax = (max_order as i64 - 1) / 2;
    for k in 1..=kmax {
        for n in 0..=k / 3 {
            let rem = k - 3 * n;
            if rem % 2 != 0 {
                continue;
            }
            let m = rem / 2;
            let t1 = Rational::from_int(3 * (m + 1)) * get(&a, m + 1, n - 1);
            let t2 = Rational::new(16 * (n + 1), 3) * get(&a, m - 2, n + 1);
            let t3 = Rational::new((2 * m + 3 * n - 1) * (4 * m + 6 * n - 1), 3) * get(&a, m - 1, n);
            a.insert((m, n), t1 + t2 - t3);
        }
    }
    a
}

/// A univariate truncated power series sum c_n z^n, n <= order.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub var: String,
    /// weight of the variable
    pub var_weight: i64,
    pub coeffs: Vec<RatFunc>,
}

impl TruncatedSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut c = vec![RatFunc::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if !other.coeffs[j].is_zero() {
                    c[i + j] = c[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
                }
            }
        }
        TruncatedSeries { var: self.var.clone(), var_weight: self.var_weight, coeffs: c.iter().map(tidy).collect() }
    }

    /// exp(k z^2) truncated.
    pub fn exp_quadratic(k: &RatFunc, var: &str, var_weight: i64, order: usize) -> TruncatedSeries {
        let mut c = vec![RatFunc::zero(); order + 1];
        let mut term = RatFunc::one();
        for m in 0..=order / 2 {
            if m > 0 {
                term = term.mul(k).scale(&Rational::new(1, m as i64));
            }
            c[2 * m] = tidy(&term);
        }
        TruncatedSeries { var: var.into(), var_weight, coeffs: c }
    }

    pub fn scale(&self, k: &RatFunc) -> TruncatedSeries {
        TruncatedSeries { var: self.var.clone(), var_weight: self.var_weight, coeffs: self.coeffs.iter().map(|c| tidy(&c.mul(k))).collect() }
    }

    pub fn eval_c64<F>(&self, z: num_complex::Complex64, bind: F) -> Result<num_complex::Complex64, SeriesError>
    where
        F: Fn(&str) -> Option<num_complex::Complex64> + Copy,
    {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.eval_c64(bind)?;
        }
        Ok(acc)
    }

    /// Common weight of all terms, if homogeneous.
    pub fn homogeneous_weight(&self, w: &WeightTable) -> Result<Option<i64>, SeriesError> {
        let mut found = None;
        for (n, c) in self.coeffs.iter().enumerate() {
            if let Some(k) = w.graded_weight_rat(c)? {
                let total = k + self.var_weight * n as i64;
                match found {
                    None => found = Some(total),
                    Some(f) if f != total => {
                        return Err(SeriesError::Algebra(crate::error::AlgebraError::NotHomogeneous {
                            offending: format!("{}: ({c})", n),
                        }))
                    }
                    _ => {}
                }
            }
        }
        Ok(found)
    }
}

/// The genus-1 sigma function of Y^2 = X^3 + l2 X^2 + l4 X + l6 as a series in u1:
/// exp(l2 u^2 / 6) sigma_W(u; g2, g3) with
/// g2 = -4(l4 - l2^2/3), g3 = -4(l6 - l2 l4/3 + 2 l2^3/27).
pub fn genus1_sigma_oracle(l2: &RatFunc, l4: &RatFunc, l6: &RatFunc, order: usize) -> TruncatedSeries {
    let r = |p: i64, q: i64| Rational::new(p, q);
    let g2 = l4.sub(&l2.mul(l2).scale(&r(1, 3))).scale(&r(-4, 1));
    let g3 = l6
        .sub(&l2.mul(l4).scale(&r(1, 3)))
        .add(&l2.mul(l2).mul(l2).scale(&r(2, 27)))
        .scale(&r(-4, 1));
    let half_g2 = tidy(&g2.scale(&r(1, 2)));
    let two_g3 = tidy(&g3.scale(&r(2, 1)));
    let table = weierstrass_table(order);
    let mut c = vec![RatFunc::zero(); order + 1];
    let mut keys: Vec<&(i64, i64)> = table.keys().collect();
    keys.sort();
    for &(m, n) in keys {
        let deg = (4 * m + 6 * n + 1) as usize;
        if deg > order {
            continue;
        }
        let coef = &table[&(m, n)] * &Rational::factorial(deg as u32).recip().unwrap();
        if coef.is_zero() {
            continue;
        }
        let term = half_g2.pow(m as i32).unwrap().mul(&two_g3.pow(n as i32).unwrap()).scale(&coef);
        c[deg] = tidy(&c[deg].add(&term));
    }
    let sw = TruncatedSeries { var: "u1".into(), var_weight: -1, coeffs: c };
    let shift = tidy(&l2.scale(&r(1, 6)));
    TruncatedSeries::exp_quadratic(&shift, "u1", -1, order).mul(&sw)
}

/// H(v) = chi exp(n11 v^2 / 2) sigma(D v) at genus 1, exactly, through the oracle.
pub fn h_series_genus1(m: &ScaledModel, om: &OmegaData, order: usize) -> Result<TruncatedSeries, SeriesError> {
    if m.genus() != 1 {
        return Err(SeriesError::UnsupportedGenus(m.genus()));
    }
    let sigma = genus1_sigma_oracle(&m.lambda[1], &m.lambda[2], &m.lambda[3], order);
    let d = &m.d[0][0];
    let mut dp = RatFunc::one();
    let mut coeffs = Vec::with_capacity(order + 1);
    for c in &sigma.coeffs {
        coeffs.push(tidy(&c.mul(&dp)));
        dp = tidy(&dp.mul(d));
    }
    let sig_dv = TruncatedSeries { var: "v2".into(), var_weight: -2, coeffs };
    let n11 = RatFunc::from_poly(om.omega[0][0].scale(&Rational::new(1, 2)));
    let e = TruncatedSeries::exp_quadratic(&n11, "v2", -2, order);
    let h = e.mul(&sig_dv).scale(&m.chi);
    for c in &h.coeffs {
        if c.contains_var("w") {
            return Err(SeriesError::ScalingResidue(c.to_string()));
        }
        // denominators must be pure powers of N'(a)
        let den = c.denom();
        if den.used_vars().iter().any(|v| &**v != "np") || den.len() != 1 {
            return Err(SeriesError::ScalingResidue(format!("denominator {den}")));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var;
    use crate::curve::Symbols;
    use crate::omega;

    #[test]
    fn p_examples() {
        let p = p_polynomials(3);
        assert_eq!(p[0], MultiPoly::one());
        assert_eq!(p[1], var("T1"));
        assert_eq!(p[2], var("T2").add(&var("T1").pow(2).scale(&Rational::new(1, 2))));
        let p3 = var("T3").add(&var("T1").mul(&var("T2"))).add(&var("T1").pow(3).scale(&Rational::new(1, 6)));
        assert_eq!(p[3], p3);
    }

    #[test]
    fn schur_small() {
        assert_eq!(schur_u(1).unwrap(), var("u1"));
        let s2 = var("u1").pow(3).scale(&Rational::new(1, 3)).sub(&var("u3"));
        assert_eq!(schur_u(2).unwrap(), s2);
        let s3 = schur_det(3).unwrap();
        let lead = s3.coefficient_of(&[("T1", 6)]);
        assert_eq!(lead.constant_value(), Some(Rational::new(1, 45)));
    }

    #[test]
    fn weierstrass_first_terms() {
        let t = weierstrass_table(9);
        assert_eq!(t[&(1, 0)], Rational::from_int(-1));
        assert_eq!(t[&(0, 1)], Rational::from_int(-3));
    }

    #[test]
    fn degenerate_invariants_give_u() {
        let z = RatFunc::zero();
        let s = genus1_sigma_oracle(&z, &z, &z, 15);
        assert!(s.coeffs[1].equals(&RatFunc::one()));
        assert!(s.coeffs.iter().enumerate().all(|(n, c)| n == 1 || c.is_zero()));
    }

    #[test]
    fn h_series_linear_coefficient_is_one() {
        let m = ScaledModel::new(Symbols::generic(1));
        let om = omega::compute(&m).unwrap();
        let h = h_series_genus1(&m, &om, 9).unwrap();
        assert!(h.coeffs[0].is_zero());
        assert!(h.coeffs[1].equals(&RatFunc::one()));
        let w = WeightTable::for_genus(1);
        assert_eq!(h.homogeneous_weight(&w).unwrap(), Some(-2));
    }
}
