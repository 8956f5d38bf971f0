//! Sato weights of variables and graded-weight checks.

use rustc_hash::FxHashMap;

use super::poly::MultiPoly;
use super::ratfunc::RatFunc;
use crate::error::AlgebraError;

/// Weight assignment for named variables. Indexed families (`nu3`, `u5`)
/// are handled by a rule on the prefix.
#[derive(Clone, Debug, Default)]
pub struct WeightTable {
    fixed: FxHashMap<String, i64>,
    // prefix -> (multiplier, offset): weight(prefix k) = multiplier*k + offset
    families: FxHashMap<String, (i64, i64)>,
}

impl WeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The standard table for a curve of genus `g`.
    pub fn for_genus(g: usize) -> Self {
        let g = g as i64;
        let mut w = WeightTable::new();
        for v in ["x", "a", "e", "e1", "e2", "X"] {
            w.set(v, 2);
        }
        w.set("y", 2 * g + 2);
        w.set("Y", 2 * g + 1);
        w.set("s", 4);
        w.set("t", 2 * g + 1);
        w.set("w", 1 - 2 * g);
        // np stands for N'(a)
        w.set("np", 4 * g + 2);
        w.family("nu", 1, 0);
        w.family("lambda", 1, 0);
        w.family("u", -1, 0);
        w.family("v", -1, 0);
        w.family("T", -1, 0);
        w
    }

    pub fn set(&mut self, name: &str, weight: i64) -> &mut Self {
        self.fixed.insert(name.to_string(), weight);
        self
    }

    pub fn family(&mut self, prefix: &str, mult: i64, offset: i64) -> &mut Self {
        self.families.insert(prefix.to_string(), (mult, offset));
        self
    }

    pub fn weight(&self, name: &str) -> Result<i64, AlgebraError> {
        if let Some(&w) = self.fixed.get(name) {
            return Ok(w);
        }
        let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
        let (prefix, digits) = name.split_at(split);
        if let (Some(&(m, o)), Ok(k)) = (self.families.get(prefix), digits.parse::<i64>()) {
            return Ok(m * k + o);
        }
        // x1, y2, ... inherit the weight of x, y
        if !digits.is_empty() {
            if let Some(&w) = self.fixed.get(prefix) {
                return Ok(w);
            }
        }
        Err(AlgebraError::MissingWeight(name.to_string()))
    }

    /// Weight of every monomial, or `NotHomogeneous` naming the first monomial
    /// whose weight differs from the leading one.
    pub fn graded_weight(&self, p: &MultiPoly) -> Result<Option<i64>, AlgebraError> {
        let ws: Vec<i64> = p.vars().iter().map(|v| self.weight(v)).collect::<Result<_, _>>()?;
        let mut found: Option<i64> = None;
        for (m, c) in p.terms() {
            let w: i64 = m.iter().zip(&ws).map(|(&e, &w)| e as i64 * w).sum();
            match found {
                None => found = Some(w),
                Some(f) if f != w => {
                    let single = MultiPoly::from_terms(
                        &p.vars().iter().map(|v| v.as_ref()).collect::<Vec<_>>(),
                        vec![(m.to_vec(), c.clone())],
                    );
                    return Err(AlgebraError::NotHomogeneous { offending: single.to_string() });
                }
                _ => {}
            }
        }
        Ok(found)
    }

    /// Weight of a rational function (numerator minus denominator). `None` for zero.
    pub fn graded_weight_rat(&self, r: &RatFunc) -> Result<Option<i64>, AlgebraError> {
        let n = self.graded_weight(r.numer())?;
        let d = self.graded_weight(r.denom())?.unwrap_or(0);
        Ok(n.map(|n| n - d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var;

    #[test]
    fn genus_one_weights() {
        let w = WeightTable::for_genus(1);
        assert_eq!(w.weight("nu6").unwrap(), 6);
        assert_eq!(w.weight("u3").unwrap(), -3);
        assert_eq!(w.weight("x2").unwrap(), 2);
        assert_eq!(w.weight("y1").unwrap(), 4);
        assert!(w.weight("zz").is_err());
    }

    #[test]
    fn homogeneity() {
        let w = WeightTable::for_genus(1);
        let p = &(&var("a") * &var("nu2")) + &var("nu4");
        assert_eq!(w.graded_weight(&p).unwrap(), Some(4));
        let q = &var("a") + &var("nu4");
        assert!(matches!(w.graded_weight(&q), Err(AlgebraError::NotHomogeneous { .. })));
    }
}
