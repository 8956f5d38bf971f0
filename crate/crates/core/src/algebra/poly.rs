//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms are kept sorted in descending graded-lexicographic order with
//! respect to the polynomial's variable list. Variable lists are always
//! sorted by [`var_rank`], so two polynomials can be aligned by a merge.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::rational::Rational;
use crate::error::AlgebraError;

pub type Var = Arc<str>;
pub type Mono = SmallVec<[u16; 16]>;

/// Fixed global variable order: divisor/auxiliary variables first, curve
/// constants last. Within a family, variables are ordered by index.
pub fn var_rank(name: &str) -> (u8, String, u64, String) {
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (prefix, digits) = name.split_at(split);
    let index = digits.parse::<u64>().unwrap_or(0);
    let class = match prefix {
        "e" => 0,
        "X" | "Y" => 1,
        "x" => 2,
        "y" => 3,
        "T" | "u" | "v" | "k" => 4,
        "a" => 5,
        "s" | "t" | "w" => 6,
        "nu" => 7,
        "lambda" | "g" => 8,
        _ => 9,
    };
    (class, prefix.to_string(), index, name.to_string())
}

fn cmp_vars(a: &str, b: &str) -> Ordering {
    var_rank(a).cmp(&var_rank(b))
}

/// Graded lexicographic comparison of exponent vectors (same arity).
pub fn cmp_grlex(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone, PartialEq, Eq)]
struct DescMono(Mono);

impl PartialOrd for DescMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DescMono {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_grlex(&other.0, &self.0)
    }
}

#[derive(Clone)]
pub struct MultiPoly {
    vars: Arc<Vec<Var>>,
    terms: Vec<(Mono, Rational)>,
}

fn merge_vars(a: &Arc<Vec<Var>>, b: &Arc<Vec<Var>>) -> Arc<Vec<Var>> {
    if Arc::ptr_eq(a, b) || a.as_slice() == b.as_slice() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if i == a.len() {
            out.push(b[j].clone());
            j += 1;
        } else if j == b.len() {
            out.push(a[i].clone());
            i += 1;
        } else {
            match cmp_vars(&a[i], &b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    Arc::new(out)
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { vars: Arc::new(Vec::new()), terms: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.push((Mono::new(), c));
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_int(n))
    }

    pub fn var(name: &str) -> Self {
        let mut m = Mono::new();
        m.push(1);
        MultiPoly { vars: Arc::new(vec![Var::from(name)]), terms: vec![(m, Rational::one())] }
    }

    /// `c * name^k`
    pub fn monomial(c: Rational, name: &str, k: u16) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if k == 0 {
            return Self::constant(c);
        }
        let mut m = Mono::new();
        m.push(k);
        MultiPoly { vars: Arc::new(vec![Var::from(name)]), terms: vec![(m, c)] }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs over `vars`;
    /// the variable list is sorted and duplicate monomials are combined.
    pub fn from_terms(vars: &[&str], terms: Vec<(Vec<u16>, Rational)>) -> Self {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&i, &j| cmp_vars(vars[i], vars[j]));
        let sorted: Vec<Var> = order.iter().map(|&i| Var::from(vars[i])).collect();
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        for (e, c) in terms {
            let m: Mono = order.iter().map(|&i| e[i]).collect();
            let slot = acc.entry(m).or_insert_with(Rational::zero);
            *slot += &c;
        }
        Self::from_map(Arc::new(sorted), acc)
    }

    fn from_map(vars: Arc<Vec<Var>>, map: FxHashMap<Mono, Rational>) -> Self {
        let mut terms: Vec<(Mono, Rational)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| cmp_grlex(&b.0, &a.0));
        MultiPoly { vars, terms }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn terms(&self) -> &[(Mono, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| &**v == name)
    }

    /// Variables that actually occur with a positive exponent.
    pub fn used_vars(&self) -> Vec<Var> {
        (0..self.vars.len())
            .filter(|&i| self.terms.iter().any(|(m, _)| m[i] > 0))
            .map(|i| self.vars[i].clone())
            .collect()
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self.var_index(name) {
            Some(i) => self.terms.iter().any(|(m, _)| m[i] > 0),
            None => false,
        }
    }

    /// Re-express over a (sorted) superset of variables.
    fn aligned(&self, vars: &Arc<Vec<Var>>) -> MultiPoly {
        if Arc::ptr_eq(&self.vars, vars) || self.vars.as_slice() == vars.as_slice() {
            return MultiPoly { vars: vars.clone(), terms: self.terms.clone() };
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("alignment target is not a superset"))
            .collect();
        let n = vars.len();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut out: Mono = SmallVec::from_elem(0, n);
                for (k, &e) in m.iter().enumerate() {
                    out[map[k]] = e;
                }
                (out, c.clone())
            })
            .collect();
        // Inserting zero exponents preserves grlex order only when the new
        // variables do not reorder existing ones, which holds because both
        // lists are sorted by the same key.
        MultiPoly { vars: vars.clone(), terms }
    }

    /// Drop variables that do not occur.
    pub fn trimmed(&self) -> MultiPoly {
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|&i| self.terms.iter().any(|(m, _)| m[i] > 0))
            .collect();
        if keep.len() == self.vars.len() {
            return self.clone();
        }
        let vars = Arc::new(keep.iter().map(|&i| self.vars[i].clone()).collect::<Vec<_>>());
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (keep.iter().map(|&i| m[i]).collect::<Mono>(), c.clone()))
            .collect();
        MultiPoly { vars, terms }
    }

    fn unify(&self, other: &MultiPoly) -> (MultiPoly, MultiPoly) {
        let vars = merge_vars(&self.vars, &other.vars);
        (self.aligned(&vars), other.aligned(&vars))
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.add_scaled(other, &Rational::one())
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add_scaled(other, &Rational::from_int(-1))
    }

    /// `self + k * other` by a sorted merge.
    pub fn add_scaled(&self, other: &MultiPoly, k: &Rational) -> MultiPoly {
        if other.is_zero() || k.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.scale(k);
        }
        let (a, b) = self.unify(other);
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() || j < b.terms.len() {
            if j == b.terms.len() {
                out.push(a.terms[i].clone());
                i += 1;
                continue;
            }
            if i == a.terms.len() {
                out.push((b.terms[j].0.clone(), &b.terms[j].1 * k));
                j += 1;
                continue;
            }
            match cmp_grlex(&a.terms[i].0, &b.terms[j].0) {
                Ordering::Greater => {
                    out.push(a.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b.terms[j].0.clone(), &b.terms[j].1 * k));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a.terms[i].1 + &(&b.terms[j].1 * k);
                    if !c.is_zero() {
                        out.push((a.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        MultiPoly { vars: a.vars, terms: out }
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(&Rational::from_int(-1))
    }

    pub fn scale(&self, k: &Rational) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero();
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        let (a, b) = self.unify(other);
        let (small, large) = if a.terms.len() <= b.terms.len() { (&a, &b) } else { (&b, &a) };
        if small.terms.len() == 1 {
            // Multiplying by a monomial preserves the order.
            let (m0, c0) = &small.terms[0];
            let terms = large
                .terms
                .iter()
                .map(|(m, c)| {
                    let mm: Mono = m.iter().zip(m0.iter()).map(|(x, y)| x + y).collect();
                    (mm, c * c0)
                })
                .collect();
            return MultiPoly { vars: a.vars.clone(), terms };
        }
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        acc.reserve(large.terms.len() * 2);
        for (ms, cs) in &small.terms {
            for (ml, cl) in &large.terms {
                let mm: Mono = ms.iter().zip(ml.iter()).map(|(x, y)| x + y).collect();
                let prod = cs * cl;
                match acc.get_mut(&mm) {
                    Some(slot) => *slot += &prod,
                    None => {
                        acc.insert(mm, prod);
                    }
                }
            }
        }
        Self::from_map(a.vars.clone(), acc)
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.iter().map(|(m, _)| m[i] as u32).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.iter().map(|&e| e as u32).sum()).max().unwrap_or(0)
    }

    /// Coefficients of `name^0, name^1, …` as polynomials in the remaining
    /// variables (the variable list is kept, with `name` exponent zero).
    pub fn coefficients_in(&self, name: &str) -> Vec<MultiPoly> {
        let Some(i) = self.var_index(name) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(name) as usize;
        let mut buckets: Vec<Vec<(Mono, Rational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let k = m[i] as usize;
            let mut mm = m.clone();
            mm[i] = 0;
            buckets[k].push((mm, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| cmp_grlex(&b.0, &a.0));
                MultiPoly { vars: self.vars.clone(), terms: t }
            })
            .collect()
    }

    /// Inverse of [`coefficients_in`](Self::coefficients_in).
    pub fn from_coefficients(name: &str, coeffs: &[MultiPoly]) -> MultiPoly {
        let x = MultiPoly::var(name);
        let mut acc = MultiPoly::zero();
        for (k, c) in coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&c.mul(&x.pow(k as u32)));
        }
        acc
    }

    /// Coefficient of a monomial given as `(variable, exponent)` pairs, as a
    /// polynomial in the other variables.
    pub fn coefficient_of(&self, powers: &[(&str, u16)]) -> MultiPoly {
        let mut p = self.clone();
        for (name, k) in powers {
            let cs = p.coefficients_in(name);
            p = cs.get(*k as usize).cloned().unwrap_or_else(MultiPoly::zero);
        }
        p
    }

    pub fn leading_term(&self) -> Option<(&Mono, &Rational)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.terms.first().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Exact division. Returns `NonDivisible` carrying the first remainder
    /// term found when `den` does not divide `self`.
    pub fn exact_divide(&self, den: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(c) = den.constant_value() {
            return Ok(self.scale(&c.recip()?));
        }
        if self.is_zero() {
            return Ok(MultiPoly::zero());
        }
        let (num, den) = self.unify(den);
        if den.terms.len() == 1 {
            let (md, cd) = &den.terms[0];
            let inv = cd.recip()?;
            let mut terms = Vec::with_capacity(num.terms.len());
            for (m, c) in &num.terms {
                if m.iter().zip(md.iter()).any(|(a, b)| a < b) {
                    return Err(AlgebraError::NonDivisible { remainder: format!("{num}") });
                }
                let q: Mono = m.iter().zip(md.iter()).map(|(a, b)| a - b).collect();
                terms.push((q, c * &inv));
            }
            return Ok(MultiPoly { vars: num.vars.clone(), terms });
        }
        let vars = num.vars.clone();
        let (lm, lc) = den.terms[0].clone();
        let lc_inv = lc.recip()?;
        let mut rem: BTreeMap<DescMono, Rational> =
            num.terms.iter().map(|(m, c)| (DescMono(m.clone()), c.clone())).collect();
        let mut quot: Vec<(Mono, Rational)> = Vec::new();
        while let Some((m, c)) = rem.pop_first() {
            if m.0.iter().zip(lm.iter()).any(|(a, b)| a < b) {
                let r = MultiPoly { vars: vars.clone(), terms: vec![(m.0, c)] };
                return Err(AlgebraError::NonDivisible { remainder: format!("{r} + ...") });
            }
            let qm: Mono = m.0.iter().zip(lm.iter()).map(|(a, b)| a - b).collect();
            let qc = &c * &lc_inv;
            for (dm, dc) in den.terms.iter().skip(1) {
                let mm: Mono = dm.iter().zip(qm.iter()).map(|(a, b)| a + b).collect();
                let delta = -(dc * &qc);
                let key = DescMono(mm);
                let remove = match rem.get_mut(&key) {
                    Some(slot) => {
                        *slot += &delta;
                        slot.is_zero()
                    }
                    None => {
                        rem.insert(key.clone(), delta);
                        false
                    }
                };
                if remove {
                    rem.remove(&key);
                }
            }
            quot.push((qm, qc));
        }
        Ok(MultiPoly { vars, terms: quot })
    }

    /// Exact division by `name - root` where `root` does not involve `name`
    /// (synthetic division in `name`).
    pub fn divide_linear(&self, name: &str, root: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        let coeffs = self.coefficients_in(name);
        let n = coeffs.len();
        if n <= 1 {
            if self.is_zero() {
                return Ok(MultiPoly::zero());
            }
            return Err(AlgebraError::NonDivisible { remainder: format!("{self}") });
        }
        let mut q = vec![MultiPoly::zero(); n - 1];
        q[n - 2] = coeffs[n - 1].clone();
        for k in (1..n - 1).rev() {
            q[k - 1] = coeffs[k].add(&root.mul(&q[k]));
        }
        let rem = coeffs[0].add(&root.mul(&q[0]));
        if !rem.is_zero() {
            return Err(AlgebraError::NonDivisible { remainder: format!("{rem}") });
        }
        Ok(MultiPoly::from_coefficients(name, &q))
    }

    pub fn differentiate(&self, name: &str, order: u32) -> MultiPoly {
        let Some(i) = self.var_index(name) else {
            return if order == 0 { self.clone() } else { MultiPoly::zero() };
        };
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m[i] as u32;
            if e < order {
                continue;
            }
            let mut f = Rational::one();
            for k in 0..order {
                f = &f * &Rational::from_int((e - k) as i64);
            }
            let mut mm = m.clone();
            mm[i] = (e - order) as u16;
            terms.push((mm, c * &f));
        }
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Rational::zero) += &c;
        }
        Self::from_map(self.vars.clone(), acc)
    }

    /// Replace every `name^2` by `replacement` (reduction modulo
    /// `name^2 - replacement`); the result has degree ≤ 1 in `name`.
    pub fn reduce_square(&self, name: &str, replacement: &MultiPoly) -> MultiPoly {
        let coeffs = self.coefficients_in(name);
        if coeffs.len() <= 2 {
            return self.clone();
        }
        let mut even = MultiPoly::zero();
        let mut odd = MultiPoly::zero();
        let mut rpow = MultiPoly::one();
        for (k, c) in coeffs.iter().enumerate() {
            if k >= 2 && k % 2 == 0 {
                rpow = rpow.mul(replacement);
            }
            if c.is_zero() {
                continue;
            }
            let t = c.mul(&rpow);
            if k % 2 == 0 {
                even = even.add(&t);
            } else {
                odd = odd.add(&t);
            }
        }
        even.add(&odd.mul(&MultiPoly::var(name)))
    }

    /// Evaluate numerically with a per-variable binding.
    pub fn eval_c64<F>(&self, binding: F) -> Result<Complex64, AlgebraError>
    where
        F: Fn(&str) -> Option<Complex64>,
    {
        let n = self.vars.len();
        let mut pows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for (i, v) in self.vars.iter().enumerate() {
            let maxe = self.terms.iter().map(|(m, _)| m[i]).max().unwrap_or(0) as usize;
            if maxe == 0 {
                pows.push(vec![Complex64::new(1.0, 0.0)]);
                continue;
            }
            let val = binding(v).ok_or_else(|| AlgebraError::UnboundVariable(v.to_string()))?;
            let mut p = Vec::with_capacity(maxe + 1);
            p.push(Complex64::new(1.0, 0.0));
            for k in 1..=maxe {
                p.push(p[k - 1] * val);
            }
            pows.push(p);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64(), 0.0);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= pows[i][e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluate exactly at rational values for the listed variables; other
    /// variables stay symbolic.
    pub fn eval_partial(&self, bindings: &[(&str, Rational)]) -> MultiPoly {
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        let idx: Vec<(usize, &Rational)> = bindings
            .iter()
            .filter_map(|(n, v)| self.var_index(n).map(|i| (i, v)))
            .collect();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut mm = m.clone();
            for &(i, v) in &idx {
                if mm[i] > 0 {
                    coeff = &coeff * &v.pow(mm[i] as i32).expect("nonnegative power");
                    mm[i] = 0;
                }
            }
            *acc.entry(mm).or_insert_with(Rational::zero) += &coeff;
        }
        Self::from_map(self.vars.clone(), acc).trimmed()
    }

    /// Map every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        MultiPoly { vars: self.vars.clone(), terms }
    }

    /// Swap two variables (used for symmetry checks).
    pub fn swap_vars(&self, a: &str, b: &str) -> MultiPoly {
        let vars = merge_vars(&self.vars, &Arc::new({
            let mut v = vec![Var::from(a), Var::from(b)];
            v.sort_by(|x, y| cmp_vars(x, y));
            v
        }));
        let p = self.aligned(&vars);
        let ia = p.var_index(a).unwrap();
        let ib = p.var_index(b).unwrap();
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        for (m, c) in &p.terms {
            let mut mm = m.clone();
            mm.swap(ia, ib);
            acc.insert(mm, c.clone());
        }
        Self::from_map(vars, acc)
    }

    /// Rename variables (the target names must not already occur).
    pub fn rename(&self, map: &[(&str, &str)]) -> MultiPoly {
        let names: Vec<String> = self
            .vars
            .iter()
            .map(|v| {
                map.iter()
                    .find(|(from, _)| *from == &**v)
                    .map(|(_, to)| to.to_string())
                    .unwrap_or_else(|| v.to_string())
            })
            .collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        MultiPoly::from_terms(&refs, self.terms.iter().map(|(m, c)| (m.to_vec(), c.clone())).collect())
    }

    /// Canonical text: descending grlex, explicit `*`, `^` powers.
    pub fn to_canonical(&self) -> String {
        format!("{self}")
    }
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars.as_slice() == other.vars.as_slice() {
            return self.terms == other.terms;
        }
        let (a, b) = self.unify(other);
        a.terms == b.terms
    }
}

impl Eq for MultiPoly {}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].to_string()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly::neg(self)
    }
}

/// Shorthand for building polynomials in tests and constructions.
pub fn var(name: &str) -> MultiPoly {
    MultiPoly::var(name)
}

pub fn int(n: i64) -> MultiPoly {
    MultiPoly::from_int(n)
}

pub fn rat(r: Rational) -> MultiPoly {
    MultiPoly::constant(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares() {
        let x = var("x");
        let p = (&x + &int(1)).mul(&(&x - &int(1)));
        assert_eq!(p.to_string(), "x^2 - 1");
        assert_eq!(p.add(&MultiPoly::zero()), p);
    }

    #[test]
    fn exact_division_and_failure() {
        let x = var("x");
        let num = &x.pow(2) - &int(1);
        let q = num.exact_divide(&(&x - &int(1))).unwrap();
        assert_eq!(q, &x + &int(1));
        let bad = &x.pow(2) + &int(1);
        assert!(matches!(bad.exact_divide(&(&x - &int(1))), Err(AlgebraError::NonDivisible { .. })));
        assert!(matches!(bad.divide_linear("x", &int(1)), Err(AlgebraError::NonDivisible { .. })));
    }

    #[test]
    fn linear_division_with_symbolic_root() {
        let e = var("e1");
        let a = var("a");
        let b = var("x1");
        let p = (&e - &a).mul(&(&e - &b)).mul(&(&e + &int(3)));
        let q = p.divide_linear("e1", &a).unwrap();
        assert_eq!(q, (&e - &b).mul(&(&e + &int(3))));
    }

    #[test]
    fn derivative_and_top_derivative() {
        let x = var("x");
        assert_eq!(x.pow(3).differentiate("x", 1), x.pow(2).scale(&Rational::from_int(3)));
        let n = x.pow(4).scale(&Rational::new(3, 2));
        assert_eq!(n.differentiate("x", 4), MultiPoly::constant(Rational::new(36, 1)));
    }

    #[test]
    fn canonical_text() {
        let a = var("a");
        let nu0 = var("nu0");
        let nu2 = var("nu2");
        let p = a.pow(2).mul(&nu0).scale(&Rational::from_int(-2)).sub(&a.mul(&nu2));
        assert_eq!(p.to_string(), "-2*a^2*nu0 - a*nu2");
    }

    #[test]
    fn reduce_square_relation() {
        let y = var("y1");
        let n = &var("x1").pow(3) + &int(1);
        let p = y.pow(3).add(&y.pow(2));
        let r = p.reduce_square("y1", &n);
        assert_eq!(r, n.mul(&y).add(&n));
    }

    #[test]
    fn variable_alignment_in_equality() {
        let p = var("x").add(&var("a"));
        let q = var("a").add(&var("x"));
        assert_eq!(p, q);
        let zero_pad = p.mul(&var("e1").pow(0));
        assert_eq!(zero_pad, q);
    }
}
