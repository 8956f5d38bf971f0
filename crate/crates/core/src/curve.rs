//! The curve y^2 = N(x), its marked branch point, the scaling pair (s, t),
//! the transformed curve Y^2 = M~(X) and the differential catalogs.
//!
//! Symbolic work uses two auxiliary symbols:
//! * `np` stands for N'(a). Every expression produced here is a Laurent
//!   polynomial in `np`, so identities proved with `np` free hold a fortiori
//!   after substituting N'(a).
//! * `w` parametrises every admissible scaling: s = np w^2, t = np^g w^(2g+1).
//!   Conversely w = t / s^g, so an expression free of `w` is free of (s, t).

use num_complex::Complex64;
use serde_json::Value;

use crate::algebra::{substitute_rat, MultiPoly, RatFunc, Rational};
use crate::error::{CurveError, HarnessError};
use crate::numerics::roots::{horner, poly_roots};

pub const SNAP_TOLERANCE: f64 = 1e-9;

/// The marked branch point.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchPoint {
    Exact(Rational),
    /// A numerically computed root; `index` refers to the (Re, Im) ordering.
    Numeric { value: Complex64, index: usize },
}

#[derive(Clone, Debug)]
pub struct CurveV {
    genus: usize,
    nu: Vec<Rational>,
    a: BranchPoint,
}

/// Coefficients of a univariate polynomial in ascending order.
fn uni_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn uni_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].recip().expect("nonzero leading coefficient");
    while r.len() > db {
        let k = r.len() - 1;
        let q = &r[k] * &lb;
        for i in 0..=db {
            let t = &q * &b[i];
            r[k - db + i] = &r[k - db + i] - &t;
        }
        r = uni_trim(r);
        if r.len() > k {
            r.truncate(k);
        }
    }
    r
}

/// Degree of gcd(p, q) for univariate rational polynomials.
pub fn uni_gcd_degree(p: &[Rational], q: &[Rational]) -> usize {
    let mut a = uni_trim(p.to_vec());
    let mut b = uni_trim(q.to_vec());
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

impl CurveV {
    /// Validate a curve. `nu` lists nu_0, nu_2, ..., nu_{4g+4}.
    pub fn new(genus: usize, nu: Vec<Rational>, a: BranchPoint) -> Result<Self, CurveError> {
        if genus == 0 {
            return Err(CurveError::ZeroGenus);
        }
        let expected = 2 * genus + 3;
        if nu.len() != expected {
            return Err(CurveError::WrongCoefficientCount { expected, got: nu.len() });
        }
        if nu[0].is_zero() {
            return Err(CurveError::Nu0Zero);
        }
        let c = CurveV { genus, nu, a };
        let n = c.n_ascending();
        let dn: Vec<Rational> = (1..n.len()).map(|k| &n[k] * &Rational::from_int(k as i64)).collect();
        if uni_gcd_degree(&n, &dn) > 0 {
            return Err(CurveError::MultipleRoots);
        }
        match &c.a {
            BranchPoint::Exact(a) => {
                let v = c.n_at(a);
                if !v.is_zero() {
                    return Err(CurveError::NotABranchPoint(v.to_string()));
                }
            }
            BranchPoint::Numeric { value, .. } => {
                let v = horner(&c.n_c64(), *value);
                let scale = c.nu.iter().map(|x| x.to_f64().abs()).sum::<f64>()
                    * value.norm().max(1.0).powi(2 * genus as i32 + 2);
                if v.norm() > 1e-10 * scale {
                    return Err(CurveError::NotABranchPoint(format!("{v}")));
                }
            }
        }
        Ok(c)
    }

    /// Convenience for an exact rational branch point.
    pub fn exact(genus: usize, nu: &[i64], a: i64) -> Result<Self, CurveError> {
        Self::new(genus, nu.iter().map(|&k| Rational::from_int(k)).collect(), BranchPoint::Exact(Rational::from_int(a)))
    }

    /// Curve with branch point given by index in the (Re, Im) root order.
    pub fn with_root_index(genus: usize, nu: Vec<Rational>, index: usize) -> Result<Self, CurveError> {
        let probe = CurveV { genus, nu: nu.clone(), a: BranchPoint::Exact(Rational::zero()) };
        let roots = probe.roots()?;
        if index >= roots.len() {
            return Err(CurveError::BadRootIndex { index, count: roots.len() });
        }
        let a = probe.exact_root_near(roots[index]).unwrap_or(BranchPoint::Numeric { value: roots[index], index });
        Self::new(genus, nu, a)
    }

    /// Curve with a literal branch point, snapped to the nearest root.
    pub fn with_literal_branch(genus: usize, nu: Vec<Rational>, a: Complex64, exact: Option<Rational>) -> Result<Self, CurveError> {
        if let Some(q) = &exact {
            let probe = CurveV { genus, nu: nu.clone(), a: BranchPoint::Exact(q.clone()) };
            if probe.n_at(q).is_zero() {
                return Self::new(genus, nu, BranchPoint::Exact(q.clone()));
            }
        }
        let probe = CurveV { genus, nu: nu.clone(), a: BranchPoint::Exact(Rational::zero()) };
        let roots = probe.roots()?;
        let (index, best) = roots
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - a).norm().partial_cmp(&(y.1 - a).norm()).unwrap())
            .map(|(i, r)| (i, *r))
            .expect("nonempty root list");
        if (best - a).norm() > SNAP_TOLERANCE * (1.0 + best.norm()) {
            let v = horner(&probe.n_c64(), a);
            return Err(CurveError::NotABranchPoint(format!("{v}")));
        }
        Self::new(genus, nu, BranchPoint::Numeric { value: best, index })
    }

    fn exact_root_near(&self, z: Complex64) -> Option<BranchPoint> {
        if z.im.abs() > 1e-9 {
            return None;
        }
        // Try small-denominator rationals near the real root.
        for den in 1..=64i64 {
            let num = (z.re * den as f64).round() as i64;
            let q = Rational::new(num, den);
            if self.n_at(&q).is_zero() {
                return Some(BranchPoint::Exact(q));
            }
        }
        None
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn nu(&self) -> &[Rational] {
        &self.nu
    }

    pub fn branch_point(&self) -> &BranchPoint {
        &self.a
    }

    pub fn a_exact(&self) -> Option<&Rational> {
        match &self.a {
            BranchPoint::Exact(a) => Some(a),
            _ => None,
        }
    }

    pub fn a_c64(&self) -> Complex64 {
        match &self.a {
            BranchPoint::Exact(a) => Complex64::new(a.to_f64(), 0.0),
            BranchPoint::Numeric { value, .. } => *value,
        }
    }

    /// Coefficients of N in ascending powers of x.
    pub fn n_ascending(&self) -> Vec<Rational> {
        self.nu.iter().rev().cloned().collect()
    }

    pub fn n_c64(&self) -> Vec<Complex64> {
        self.n_ascending().iter().map(|c| Complex64::new(c.to_f64(), 0.0)).collect()
    }

    pub fn n_at(&self, x: &Rational) -> Rational {
        self.n_ascending().iter().rev().fold(Rational::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn n_poly(&self, var: &str) -> MultiPoly {
        let x = MultiPoly::var(var);
        self.n_ascending()
            .iter()
            .rev()
            .fold(MultiPoly::zero(), |acc, c| acc.mul(&x).add(&MultiPoly::constant(c.clone())))
    }

    /// N'(a) numerically.
    pub fn n_prime_a_c64(&self) -> Complex64 {
        let n = self.n_c64();
        let dn: Vec<Complex64> = (1..n.len()).map(|k| n[k] * k as f64).collect();
        horner(&dn, self.a_c64())
    }

    /// All 2g+2 roots of N in (Re, Im) order.
    pub fn roots(&self) -> Result<Vec<Complex64>, CurveError> {
        poly_roots(&self.n_c64()).map_err(|_| CurveError::MultipleRoots)
    }

    /// Index of the branch point in the root list.
    pub fn branch_index(&self, roots: &[Complex64]) -> usize {
        let a = self.a_c64();
        roots
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - a).norm().partial_cmp(&(y.1 - a).norm()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Canonical JSON used for fingerprints.
    pub fn canonical_json(&self) -> String {
        let nu: Vec<String> = self.nu.iter().map(|c| format!("\"{}\"", c)).collect();
        let bp = match &self.a {
            BranchPoint::Exact(a) => format!("\"{a}\""),
            BranchPoint::Numeric { index, .. } => format!("{{\"index\":{index}}}"),
        };
        format!("{{\"branch_point\":{bp},\"genus\":{},\"nu\":[{}]}}", self.genus, nu.join(","))
    }

    /// Build a curve N = nu0 (x - a) P(x) with P monic of degree 2g+1 and
    /// rational roots, chosen deterministically from `seed`.
    pub fn random_rational(genus: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let a = Rational::new(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            let nu0 = Rational::new(*[-3i64, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap(), 1);
            let mut roots = vec![a.clone()];
            while roots.len() < 2 * genus + 2 {
                let r = Rational::new(rng.gen_range(-12..=12), rng.gen_range(1..=4));
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
            // Spread the roots a little so cycles are well separated.
            let mut p = vec![nu0.clone()];
            for r in &roots {
                let mut q = vec![Rational::zero(); p.len() + 1];
                for (k, c) in p.iter().enumerate() {
                    q[k] = &q[k] + c;
                    q[k + 1] = &q[k + 1] - &(c * r);
                }
                p = q;
            }
            // p is in descending order: nu_0, nu_2, ...
            let mut sorted: Vec<f64> = roots.iter().map(|r| r.to_f64()).collect();
            sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            if min_gap < 0.5 {
                continue;
            }
            if let Ok(c) = CurveV::new(genus, p, BranchPoint::Exact(a)) {
                return c;
            }
        }
    }
}

/// Parsed curve input file.
pub struct CurveInput {
    pub curve: CurveV,
    pub scaling: Option<(Rational, Rational)>,
}

fn json_rational(v: &Value, what: &str) -> Result<Rational, HarnessError> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| HarnessError::Parse(format!("{what}: cannot parse {s:?}"))),
        Value::Number(n) => n.to_string().parse().map_err(|_| HarnessError::Parse(format!("{what}: cannot parse {n}"))),
        _ => Err(HarnessError::Parse(format!("{what}: expected a number or a string"))),
    }
}

/// Parse `{"genus", "nu", "branch_point", "scaling"?}`.
pub fn parse_curve_json(text: &str) -> Result<CurveInput, HarnessError> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| HarnessError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let genus = v
        .get("genus")
        .and_then(|g| g.as_u64())
        .ok_or_else(|| HarnessError::Parse("missing or invalid \"genus\"".into()))? as usize;
    let nu_raw = v
        .get("nu")
        .and_then(|n| n.as_array())
        .ok_or_else(|| HarnessError::Parse("missing \"nu\" array".into()))?;
    if nu_raw.len() != 2 * genus + 3 {
        return Err(HarnessError::Parse(format!(
            "\"nu\" must have {} entries (nu_0 .. nu_{}), found {}",
            2 * genus + 3,
            4 * genus + 4,
            nu_raw.len()
        )));
    }
    let nu = nu_raw
        .iter()
        .enumerate()
        .map(|(i, x)| json_rational(x, &format!("nu[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let bp = v.get("branch_point").ok_or_else(|| HarnessError::Parse("missing \"branch_point\"".into()))?;
    let curve = match bp {
        Value::Object(o) => {
            let idx = o
                .get("index")
                .and_then(|i| i.as_u64())
                .ok_or_else(|| HarnessError::Parse("branch_point object needs \"index\"".into()))?;
            CurveV::with_root_index(genus, nu, idx as usize)?
        }
        Value::Array(parts) if parts.len() == 2 => {
            let re = json_rational(&parts[0], "branch_point re")?;
            let im = json_rational(&parts[1], "branch_point im")?;
            let exact = if im.is_zero() { Some(re.clone()) } else { None };
            CurveV::with_literal_branch(genus, nu, Complex64::new(re.to_f64(), im.to_f64()), exact)?
        }
        other => {
            let q = json_rational(other, "branch_point")?;
            CurveV::with_literal_branch(genus, nu, Complex64::new(q.to_f64(), 0.0), Some(q))?
        }
    };
    let scaling = match v.get("scaling") {
        None | Some(Value::Null) => None,
        Some(s) => {
            let ss = json_rational(s.get("s").unwrap_or(&Value::Null), "scaling.s")?;
            let tt = json_rational(s.get("t").unwrap_or(&Value::Null), "scaling.t")?;
            let a = curve.a_exact().ok_or(CurveError::BadScaling)?.clone();
            let np = n_prime_exact(&curve, &a);
            if ss.is_zero() || tt.is_zero() || ss.pow(2 * genus as i32 + 1)? != &np * &tt.pow(2)? {
                return Err(CurveError::BadScaling.into());
            }
            Some((ss, tt))
        }
    };
    Ok(CurveInput { curve, scaling })
}

impl From<crate::error::AlgebraError> for HarnessError {
    fn from(e: crate::error::AlgebraError) -> Self {
        HarnessError::Parse(e.to_string())
    }
}

pub fn n_prime_exact(curve: &CurveV, a: &Rational) -> Rational {
    let n = curve.n_ascending();
    (1..n.len())
        .rev()
        .fold(Rational::zero(), |acc, k| &(&acc * a) + &(&n[k] * &Rational::from_int(k as i64)))
}

/// Exact data (a, nu, N'(a), w) as polynomials: symbols in generic mode,
/// constants for a concrete curve.
#[derive(Clone, Debug)]
pub struct Symbols {
    pub g: usize,
    pub a: MultiPoly,
    /// nu_{2k} at index k, k = 0..=2g+2.
    pub nu: Vec<MultiPoly>,
    /// The symbol (or value) standing for N'(a).
    pub np: MultiPoly,
    /// N'(a) expanded in a and nu.
    pub np_expanded: MultiPoly,
    pub w: MultiPoly,
}

impl Symbols {
    /// Generic curve of genus g: a, nu_0..nu_{4g+2} free, nu_{4g+4} fixed by N(a) = 0.
    pub fn generic(g: usize) -> Self {
        let a = MultiPoly::var("a");
        let mut nu: Vec<MultiPoly> = (0..2 * g + 2).map(|k| MultiPoly::var(&format!("nu{}", 2 * k))).collect();
        let mut last = MultiPoly::zero();
        for (k, c) in nu.iter().enumerate() {
            last = last.sub(&c.mul(&a.pow((2 * g + 2 - k) as u32)));
        }
        nu.push(last);
        let mut s = Symbols { g, a, nu, np: MultiPoly::var("np"), np_expanded: MultiPoly::zero(), w: MultiPoly::var("w") };
        s.np_expanded = s.n_derivative_at_a_expanded(1);
        s
    }

    /// A concrete curve with exact branch point; `w = None` keeps w symbolic.
    pub fn concrete(curve: &CurveV, w: Option<Rational>) -> Result<Self, CurveError> {
        let a = curve.a_exact().ok_or(CurveError::BadScaling)?.clone();
        let np = n_prime_exact(curve, &a);
        let nu = curve.nu().iter().map(|c| MultiPoly::constant(c.clone())).collect();
        let w = match w {
            Some(w) if w.is_zero() => return Err(CurveError::BadScaling),
            Some(w) => MultiPoly::constant(w),
            None => MultiPoly::var("w"),
        };
        Ok(Symbols {
            g: curve.genus(),
            a: MultiPoly::constant(a),
            nu,
            np: MultiPoly::constant(np.clone()),
            np_expanded: MultiPoly::constant(np),
            w,
        })
    }

    /// Concrete curve with the scaling given as an exact pair (s, t).
    pub fn concrete_with_scaling(curve: &CurveV, s: &Rational, t: &Rational) -> Result<Self, CurveError> {
        let w = t / &s.pow(curve.genus() as i32)?;
        Self::concrete(curve, Some(w))
    }

    pub fn is_generic(&self) -> bool {
        self.np.constant_value().is_none()
    }

    /// N(var) with these coefficients.
    pub fn n_poly(&self, var: &str) -> MultiPoly {
        let x = MultiPoly::var(var);
        self.nu.iter().fold(MultiPoly::zero(), |acc, c| acc.mul(&x).add(c))
    }

    /// N^{(k)}(a) / k! expanded in a and nu.
    pub fn n_taylor_at_a(&self, k: usize) -> MultiPoly {
        let deg = 2 * self.g + 2;
        let mut acc = MultiPoly::zero();
        for m in k..=deg {
            // coefficient of x^m is nu_{2(deg-m)}
            let c = &self.nu[deg - m];
            let b = Rational::binomial(m as i64, k as i64);
            acc = acc.add(&c.mul(&self.a.pow((m - k) as u32)).scale(&b));
        }
        acc
    }

    fn n_derivative_at_a_expanded(&self, k: usize) -> MultiPoly {
        self.n_taylor_at_a(k).scale(&Rational::factorial(k as u32))
    }

    /// Replace the `np` symbol by N'(a) expanded.
    pub fn expand_np(&self, r: &RatFunc) -> RatFunc {
        if !self.is_generic() {
            return r.clone();
        }
        substitute_rat(r, &[("np", RatFunc::from_poly(self.np_expanded.clone()))]).expect("N'(a) is not zero")
    }

    /// Numeric binding for evaluating expressions in these symbols.
    pub fn binder<'a>(&'a self, num: &'a NumericScalars) -> impl Fn(&str) -> Option<Complex64> + Copy + 'a {
        move |name: &str| num.lookup(name)
    }
}

/// Numerical values for a, nu, np = N'(a) and w.
#[derive(Clone, Debug)]
pub struct NumericScalars {
    pub g: usize,
    pub a: Complex64,
    pub nu: Vec<Complex64>,
    pub np: Complex64,
    pub w: Complex64,
}

impl NumericScalars {
    /// Default scaling s = 1, t = 1/sqrt(N'(a)) (principal root), i.e.
    /// w = 1/sqrt(N'(a)).
    pub fn new(curve: &CurveV) -> Self {
        let np = curve.n_prime_a_c64();
        Self::with_w(curve, 1.0 / np.sqrt())
    }

    pub fn with_w(curve: &CurveV, w: Complex64) -> Self {
        NumericScalars {
            g: curve.genus(),
            a: curve.a_c64(),
            nu: curve.nu().iter().map(|c| Complex64::new(c.to_f64(), 0.0)).collect(),
            np: curve.n_prime_a_c64(),
            w,
        }
    }

    /// Scaling given numerically by (s, t); w = t / s^g.
    pub fn with_scaling(curve: &CurveV, s: Complex64, t: Complex64) -> Self {
        Self::with_w(curve, t / s.powi(curve.genus() as i32))
    }

    pub fn s(&self) -> Complex64 {
        self.np * self.w * self.w
    }

    pub fn t(&self) -> Complex64 {
        self.np.powi(self.g as i32) * self.w.powi(2 * self.g as i32 + 1)
    }

    pub fn lookup(&self, name: &str) -> Option<Complex64> {
        match name {
            "a" => Some(self.a),
            "np" => Some(self.np),
            "w" => Some(self.w),
            _ => {
                let k: usize = name.strip_prefix("nu")?.parse().ok()?;
                if k % 2 == 1 {
                    return None;
                }
                self.nu.get(k / 2).copied()
            }
        }
    }
}

/// Kinds of differentials in the catalogs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// mu_i on V
    HolomorphicV,
    /// omega_i on the transformed curve
    HolomorphicC,
    /// eta_i on the transformed curve
    SecondKindC,
    /// kappa_i on V
    SecondKindV,
}

/// `numer * dx/(2y)` on V, or `numer * dX/(2Y)` on the transformed curve.
#[derive(Clone, Debug)]
pub struct DiffForm {
    pub kind: FormKind,
    pub index: usize,
    pub numer: RatFunc,
}

/// The transformed model: s, t, lambda~, D and chi for one scaling.
#[derive(Clone, Debug)]
pub struct ScaledModel {
    pub sym: Symbols,
    pub s: RatFunc,
    pub t: RatFunc,
    /// lambda~_{2i} at index i, i = 0..=2g+1.
    pub lambda: Vec<RatFunc>,
    pub d: Vec<Vec<RatFunc>>,
    pub chi: RatFunc,
}

/// Cancel powers of the scaling symbols from numerator and denominator.
pub fn tidy(r: &RatFunc) -> RatFunc {
    r.cancel_monomial_content()
}

impl ScaledModel {
    pub fn new(sym: Symbols) -> Self {
        let g = sym.g;
        let s = RatFunc::from_poly(sym.np.mul(&sym.w.pow(2)));
        let t = RatFunc::from_poly(sym.np.pow(g as u32).mul(&sym.w.pow(2 * g as u32 + 1)));
        let inv_np = RatFunc::from_poly(sym.np.clone()).recip().expect("N'(a) != 0");
        let lambda: Vec<RatFunc> = (0..=2 * g + 1)
            .map(|i| {
                // N'(a)/N'(a): the np symbol is N'(a) by definition
                if i == 0 {
                    return RatFunc::one();
                }
                let v = RatFunc::from_poly(sym.n_taylor_at_a(i + 1)).mul(&inv_np);
                tidy(&v.mul(&s.pow(i as i32).unwrap()))
            })
            .collect();
        let tinv = t.recip().unwrap();
        let mut d = vec![vec![RatFunc::zero(); g]; g];
        for i in 1..=g {
            for j in 1..=i {
                let c = Rational::binomial(i as i64 - 1, j as i64 - 1);
                let mut e = tinv.mul(&s.pow((g + 1 - i) as i32).unwrap()).scale(&c);
                e = e.mul_poly(&sym.a.neg().pow((i - j) as u32));
                d[i - 1][j - 1] = tidy(&e);
            }
        }
        let gg = g as i64;
        let chi = if (gg * (gg + 1) / 2) % 2 == 1 {
            s.pow(((gg * gg - 3 * gg - 2) / 4) as i32).unwrap().mul(&t)
        } else {
            s.pow((gg * (gg + 1) / 4) as i32).unwrap()
        };
        ScaledModel { sym, s, t, lambda, d, chi: tidy(&chi) }
    }

    pub fn genus(&self) -> usize {
        self.sym.g
    }

    /// M~(X) = sum lambda~_{2i} X^{2g+1-i}.
    pub fn m_tilde(&self) -> RatFunc {
        let g = self.genus();
        let mut acc = RatFunc::zero();
        for i in 0..=2 * g + 1 {
            acc = acc.add(&self.lambda[i].mul_poly(&MultiPoly::var("X").pow((2 * g + 1 - i) as u32)));
        }
        acc
    }

    /// mu_i = x^{i-1} dx/(2y).
    pub fn mu(&self) -> Vec<DiffForm> {
        (1..=self.genus())
            .map(|i| DiffForm {
                kind: FormKind::HolomorphicV,
                index: i,
                numer: RatFunc::from_poly(MultiPoly::var("x").pow(i as u32 - 1)),
            })
            .collect()
    }

    /// omega_i = -X^{g-i} dX/(2Y).
    pub fn omega(&self) -> Vec<DiffForm> {
        let g = self.genus();
        (1..=g)
            .map(|i| DiffForm {
                kind: FormKind::HolomorphicC,
                index: i,
                numer: RatFunc::from_poly(MultiPoly::var("X").pow((g - i) as u32).neg()),
            })
            .collect()
    }

    /// eta_i = -(1/2Y) sum_{k=g-i+1}^{g+i-1} (k+i-g) lambda~_{2g+2i-2k-2} X^k dX.
    pub fn eta(&self) -> Vec<DiffForm> {
        let g = self.genus();
        (1..=g)
            .map(|i| {
                let mut acc = RatFunc::zero();
                for k in (g + 1 - i)..=(g + i - 1) {
                    let c = Rational::from_int((k + i - g) as i64);
                    let l = &self.lambda[g + i - k - 1];
                    acc = acc.add(&l.scale(&c).mul_poly(&MultiPoly::var("X").pow(k as u32)));
                }
                DiffForm { kind: FormKind::SecondKindC, index: i, numer: acc.neg() }
            })
            .collect()
    }

    /// Pull a form q(X) dX/(2Y) back to V: -(s/t) q(s/(x-a)) (x-a)^{g-1} dx/(2y).
    pub fn pullback(&self, q: &RatFunc) -> RatFunc {
        let g = self.genus();
        let xa = MultiPoly::var("x").sub(&self.sym.a);
        let big_x = self.s.mul(&RatFunc::from_poly(xa.clone()).recip().unwrap());
        let sub = substitute_rat(q, &[("X", big_x)]).expect("substitution");
        let pref = self.s.div(&self.t).unwrap().neg();
        let r = sub.mul(&pref);
        let r = if g >= 1 { r.mul_poly(&xa.pow(g as u32 - 1)) } else { r };
        tidy(&r.cancel_factor(&xa))
    }

    /// zeta(x, y) = (s/(x-a), t y/(x-a)^{g+1}) numerically.
    pub fn zeta_numeric(num: &NumericScalars, x: Complex64, y: Complex64) -> Result<(Complex64, Complex64), CurveError> {
        let d = x - num.a;
        if d.norm() <= 1e-14 * (1.0 + num.a.norm()) {
            return Err(CurveError::AtBasePoint);
        }
        Ok((num.s() / d, num.t() * y / d.powi(num.g as i32 + 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_errors() {
        assert!(CurveV::exact(1, &[1, 0, 0, 0, -1], 1).is_ok());
        // (x-1)^2 (x^2+1) = x^4 - 2x^3 + 2x^2 - 2x + 1
        assert_eq!(CurveV::exact(1, &[1, -2, 2, -2, 1], 1).unwrap_err(), CurveError::MultipleRoots);
        assert!(matches!(CurveV::exact(1, &[1, 0, 0, 0, -1], 2), Err(CurveError::NotABranchPoint(_))));
        assert_eq!(CurveV::exact(1, &[0, 0, 0, 1, -1], 1).unwrap_err(), CurveError::Nu0Zero);
        assert!(matches!(CurveV::exact(1, &[1, 0, -1], 1), Err(CurveError::WrongCoefficientCount { .. })));
    }

    #[test]
    fn root_index_and_snapping() {
        let nu: Vec<Rational> = [1, 0, 0, 0, -1].iter().map(|&k| Rational::from_int(k)).collect();
        // order: -1, -i, i, 1
        let c = CurveV::with_root_index(1, nu.clone(), 3).unwrap();
        assert_eq!(c.a_exact(), Some(&Rational::one()));
        let c = CurveV::with_root_index(1, nu.clone(), 2).unwrap();
        assert!((c.a_c64() - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        let c = CurveV::with_literal_branch(1, nu.clone(), Complex64::new(0.0, 1.0 + 1e-11), None).unwrap();
        assert!(matches!(c.branch_point(), BranchPoint::Numeric { index: 2, .. }));
        assert!(CurveV::with_literal_branch(1, nu, Complex64::new(0.5, 0.0), None).is_err());
    }

    #[test]
    fn parse_input() {
        let c = parse_curve_json(r#"{"genus":1,"nu":["1","0","0","0","-1"],"branch_point":"1"}"#).unwrap();
        assert_eq!(c.curve.genus(), 1);
        assert!(matches!(parse_curve_json(r#"{"genus":1,"nu":["1","0","0","-1"],"branch_point":"1"}"#), Err(HarnessError::Parse(_))));
        assert!(matches!(
            parse_curve_json(r#"{"genus":1,"nu":["0","0","0","1","-1"],"branch_point":"1"}"#),
            Err(HarnessError::Validation(CurveError::Nu0Zero))
        ));
        // N'(1) = 4: s = 4, t = 4 gives 4^3/16 = 4
        let c = parse_curve_json(r#"{"genus":1,"nu":["1","0","0","0","-1"],"branch_point":"1","scaling":{"s":"4","t":"4"}}"#).unwrap();
        assert!(c.scaling.is_some());
        assert!(parse_curve_json(r#"{"genus":1,"nu":["1","0","0","0","-1"],"branch_point":"1","scaling":{"s":"1","t":"1"}}"#).is_err());
    }

    #[test]
    fn lambda_tilde_basics() {
        for g in 1..=3 {
            let m = ScaledModel::new(Symbols::generic(g));
            assert!(m.lambda[0].equals(&RatFunc::one()));
            // lambda~_{4g+2} = s^{2g+1} nu_0 / np
            let top = RatFunc::from_poly(m.sym.nu[0].clone())
                .mul(&m.s.pow(2 * g as i32 + 1).unwrap())
                .div(&RatFunc::from_poly(m.sym.np.clone()))
                .unwrap();
            assert!(m.lambda[2 * g + 1].equals(&top));
        }
    }

    #[test]
    fn d_matrix_entries() {
        let m = ScaledModel::new(Symbols::generic(2));
        let s_over_t = m.s.div(&m.t).unwrap();
        assert!(m.d[1][1].equals(&s_over_t));
        assert!(m.d[1][0].equals(&s_over_t.mul_poly(&MultiPoly::var("a").neg())));
        assert!(m.d[0][1].is_zero());
        let m1 = ScaledModel::new(Symbols::generic(1));
        assert!(m1.d[0][0].equals(&m1.s.div(&m1.t).unwrap()));
        assert!(m1.chi.equals(&m1.t.div(&m1.s).unwrap()));
        let m3 = ScaledModel::new(Symbols::generic(3));
        assert!(m3.chi.equals(&m3.s.pow(3).unwrap()));
    }

    #[test]
    fn zeta_round_trip() {
        let c = CurveV::exact(1, &[1, 0, 0, 0, -1], 1).unwrap();
        let num = NumericScalars::new(&c);
        let x = Complex64::new(0.3, 0.2);
        let y = horner(&c.n_c64(), x).sqrt();
        let (big_x, big_y) = ScaledModel::zeta_numeric(&num, x, y).unwrap();
        assert!((num.a + num.s() / big_x - x).norm() < 1e-14);
        // Y^2 = M~(X) with M~ = prod (X - s/(a_i - a))
        let roots = c.roots().unwrap();
        let mut m = Complex64::new(1.0, 0.0);
        for r in roots.iter().filter(|r| (*r - num.a).norm() > 1e-9) {
            m *= big_x - num.s() / (r - num.a);
        }
        assert!((big_y * big_y - m).norm() < 1e-12 * m.norm());
        assert_eq!(ScaledModel::zeta_numeric(&num, num.a, y).unwrap_err(), CurveError::AtBasePoint);
    }
}
