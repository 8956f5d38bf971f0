//! Baker functions P_{i,j} on Sym^g(V) by exact division of F.
//!
//! With Q_i(e) = R(e)/(e - x_i), R'(x_i) = Delta_i and
//! L = prod (x_i - a) prod_{i<k} (x_i - x_k), the product
//! L R(e1) R(e2) nabla = Z := sum y_i (L/Delta_i) Q_i(e1) Q_i(e2) is a
//! polynomial, so L^2 F is assembled without fractions and divided by
//! (e1-e2)^2 R(e1) R(e2) one linear factor at a time.

use num_complex::Complex64;

use crate::algebra::{MultiPoly, RatFunc, Rational, WeightTable};
use crate::curve::Symbols;
use crate::error::{AlgebraError, BakerError};

pub fn xname(i: usize) -> String {
    format!("x{}", i + 1)
}

pub fn yname(i: usize) -> String {
    format!("y{}", i + 1)
}

/// x-coordinates of the divisor: symbols x1..xg, or exact rationals (the
/// y-coordinates always stay symbols reduced by y_i^2 = N(x_i)).
#[derive(Clone, Debug)]
pub enum DivisorSpec {
    Symbolic,
    Concrete(Vec<Rational>),
}

/// Evaluate a polynomial in one variable given by ascending-power rules
/// at another polynomial: N(p) with the coefficients in `sym`.
fn n_at(sym: &Symbols, p: &MultiPoly) -> MultiPoly {
    sym.nu.iter().fold(MultiPoly::zero(), |acc, c| acc.mul(p).add(c))
}

/// f(e1, e2) = sum_{i=0}^{g+1} e1^i e2^i {2 nu_{4g+4-4i} + nu_{4g+2-4i}(e1+e2)}, nu_{-2} = 0.
pub fn build_f(sym: &Symbols) -> MultiPoly {
    let g = sym.g;
    let e1 = MultiPoly::var("e1");
    let e2 = MultiPoly::var("e2");
    let sum = e1.add(&e2);
    let prod = e1.mul(&e2);
    // nu_{2k} lives at sym.nu[k]
    let nu = |idx: i64| -> MultiPoly {
        if idx < 0 {
            MultiPoly::zero()
        } else {
            sym.nu[(idx / 2) as usize].clone()
        }
    };
    let mut acc = MultiPoly::zero();
    for i in 0..=(g + 1) as i64 {
        let g4 = 4 * g as i64;
        let inner = nu(g4 + 4 - 4 * i).scale(&Rational::from_int(2)).add(&nu(g4 + 2 - 4 * i).mul(&sum));
        acc = acc.add(&prod.pow(i as u32).mul(&inner));
    }
    acc
}

/// Intermediate data of the construction.
#[derive(Clone, Debug)]
pub struct BakerBuild {
    pub g: usize,
    pub xs: Vec<MultiPoly>,
    /// L = prod (x_i - a) prod_{i<k} (x_i - x_k)
    pub l: MultiPoly,
    /// L^2 F reduced modulo y_i^2 = N(x_i)
    pub l2f: MultiPoly,
    /// L^2 G
    pub l2g: MultiPoly,
}

fn r_poly(sym: &Symbols, xs: &[MultiPoly], e: &str) -> MultiPoly {
    let ev = MultiPoly::var(e);
    xs.iter().fold(ev.sub(&sym.a), |acc, x| acc.mul(&ev.sub(x)))
}

fn q_poly(sym: &Symbols, xs: &[MultiPoly], skip: usize, e: &str) -> MultiPoly {
    let ev = MultiPoly::var(e);
    xs.iter()
        .enumerate()
        .filter(|(k, _)| *k != skip)
        .fold(ev.sub(&sym.a), |acc, (_, x)| acc.mul(&ev.sub(x)))
}

/// Build L^2 F for the divisor.
pub fn build_l2f(sym: &Symbols, spec: &DivisorSpec) -> Result<(Vec<MultiPoly>, MultiPoly, MultiPoly), BakerError> {
    let g = sym.g;
    let xs: Vec<MultiPoly> = match spec {
        DivisorSpec::Symbolic => (0..g).map(|i| MultiPoly::var(&xname(i))).collect(),
        DivisorSpec::Concrete(v) => {
            if v.len() != g {
                return Err(BakerError::DegenerateDivisor(format!("expected {g} points, got {}", v.len())));
            }
            v.iter().map(|q| MultiPoly::constant(q.clone())).collect()
        }
    };
    let mut l = MultiPoly::one();
    let mut deltas = Vec::with_capacity(g);
    for i in 0..g {
        l = l.mul(&xs[i].sub(&sym.a));
        for k in i + 1..g {
            l = l.mul(&xs[i].sub(&xs[k]));
        }
        let mut d = xs[i].sub(&sym.a);
        for k in 0..g {
            if k != i {
                d = d.mul(&xs[i].sub(&xs[k]));
            }
        }
        deltas.push(d);
    }
    if l.is_zero() {
        return Err(BakerError::DegenerateDivisor("R'(x_i) = 0 (repeated x or x_i = a)".into()));
    }
    let r1 = r_poly(sym, &xs, "e1");
    let r2 = r_poly(sym, &xs, "e2");
    let n1 = sym.n_poly("e1");
    let n2 = sym.n_poly("e2");
    let f = build_f(sym);
    let base = f.mul(&r1).mul(&r2).sub(&n1.mul(&r2.pow(2))).sub(&n2.mul(&r1.pow(2)));
    // W_i = (L/Delta_i) Q_i(e1) Q_i(e2), Z = sum y_i W_i
    let mut ws = Vec::with_capacity(g);
    for i in 0..g {
        let li = l.exact_divide(&deltas[i])?;
        ws.push(li.mul(&q_poly(sym, &xs, i, "e1")).mul(&q_poly(sym, &xs, i, "e2")));
    }
    let mut z2 = MultiPoly::zero();
    for i in 0..g {
        z2 = z2.add(&n_at(sym, &xs[i]).mul(&ws[i].pow(2)));
        for k in i + 1..g {
            let yy = MultiPoly::var(&yname(i)).mul(&MultiPoly::var(&yname(k)));
            z2 = z2.add(&yy.mul(&ws[i]).mul(&ws[k]).scale(&Rational::from_int(2)));
        }
    }
    let e12 = MultiPoly::var("e1").sub(&MultiPoly::var("e2"));
    let l2f = l.pow(2).mul(&base).add(&e12.pow(2).mul(&z2));
    Ok((xs, l, l2f))
}

/// Divide L^2 F by (e1-e2)^2 R(e1) R(e2).
pub fn divide_g(sym: &Symbols, xs: &[MultiPoly], l2f: &MultiPoly) -> Result<MultiPoly, BakerError> {
    let wrap = |e: AlgebraError| match e {
        AlgebraError::NonDivisible { remainder } => BakerError::NonDivisible(remainder),
        other => BakerError::Algebra(other),
    };
    let e2 = MultiPoly::var("e2");
    let mut p = l2f.divide_linear("e1", &e2).map_err(wrap)?;
    p = p.divide_linear("e1", &e2).map_err(wrap)?;
    for e in ["e1", "e2"] {
        p = p.divide_linear(e, &sym.a).map_err(wrap)?;
        for x in xs {
            p = p.divide_linear(e, x).map_err(wrap)?;
        }
    }
    Ok(p)
}

pub fn build(sym: &Symbols, spec: &DivisorSpec) -> Result<BakerBuild, BakerError> {
    let (xs, l, l2f) = build_l2f(sym, spec)?;
    let l2g = divide_g(sym, &xs, &l2f)?;
    Ok(BakerBuild { g: sym.g, xs, l, l2f, l2g })
}

/// Matrix of P_{2g+2-2i, 2g+2-2j} (0-based i, j = coefficient of e1^i e2^j of G).
#[derive(Clone, Debug)]
pub struct BakerMatrix {
    pub g: usize,
    pub entries: Vec<Vec<RatFunc>>,
    pub sym: Symbols,
    pub xs: Vec<MultiPoly>,
}

impl BakerBuild {
    /// G = L^2 G / L^2 as a rational function.
    pub fn g_ratfunc(&self) -> RatFunc {
        RatFunc::new(self.l2g.clone(), self.l.pow(2)).expect("L != 0")
    }

    pub fn linear_factors(&self, sym: &Symbols) -> Vec<MultiPoly> {
        let mut out = Vec::new();
        for i in 0..self.g {
            out.push(self.xs[i].sub(&sym.a));
            for k in i + 1..self.g {
                out.push(self.xs[i].sub(&self.xs[k]));
            }
        }
        out.retain(|p| !p.is_constant());
        out
    }
}

pub fn baker_matrix(sym: &Symbols, spec: &DivisorSpec) -> Result<BakerMatrix, BakerError> {
    let b = build(sym, spec)?;
    let g = sym.g;
    let l2 = b.l.pow(2);
    let factors = b.linear_factors(sym);
    let rows = b.l2g.coefficients_in("e1");
    let mut entries = vec![vec![RatFunc::zero(); g]; g];
    for (i, row) in rows.iter().enumerate() {
        if i >= g {
            return Err(BakerError::NonDivisible(format!("G has degree {} in e1", rows.len() - 1)));
        }
        for (j, c) in row.coefficients_in("e2").iter().enumerate() {
            if j >= g {
                return Err(BakerError::NonDivisible(format!("G has degree {j} in e2")));
            }
            let r = RatFunc::new(c.clone(), l2.clone())?;
            entries[i][j] = r.cancel_factors(&factors);
        }
    }
    Ok(BakerMatrix { g, entries, sym: sym.clone(), xs: b.xs })
}

impl BakerMatrix {
    pub fn is_symmetric(&self) -> bool {
        (0..self.g).all(|i| (0..i).all(|j| self.entries[i][j].equals(&self.entries[j][i])))
    }

    /// Entry P_{p,q} with p, q in {2, 4, ..., 2g}.
    pub fn p(&self, p: usize, q: usize) -> &RatFunc {
        let i = (2 * self.g + 2 - p) / 2 - 1;
        let j = (2 * self.g + 2 - q) / 2 - 1;
        &self.entries[i][j]
    }

    /// Evaluate at concrete points (x_i, y_i) with y_i^2 = N(x_i).
    /// `scalars` supplies a and nu when the matrix was built generically.
    pub fn evaluate(
        &self,
        points: &[(Complex64, Complex64)],
        scalars: Option<&dyn Fn(&str) -> Option<Complex64>>,
    ) -> Result<Vec<Vec<Complex64>>, BakerError> {
        let g = self.g;
        if points.len() != g {
            return Err(BakerError::DegenerateDivisor(format!("expected {g} points")));
        }
        let a = self
            .sym
            .a
            .eval_c64(|n| scalars.and_then(|f| f(n)))
            .map_err(BakerError::Algebra)?;
        let scale = 1.0 + points.iter().map(|p| p.0.norm()).fold(a.norm(), f64::max);
        for i in 0..g {
            if (points[i].0 - a).norm() < 1e-12 * scale {
                return Err(BakerError::DegenerateDivisor("x_i = a".into()));
            }
            for k in i + 1..g {
                if (points[i].0 - points[k].0).norm() < 1e-12 * scale {
                    return Err(BakerError::DegenerateDivisor("repeated x-coordinate".into()));
                }
            }
        }
        let bind = |name: &str| -> Option<Complex64> {
            if let Some(rest) = name.strip_prefix('x') {
                if let Ok(k) = rest.parse::<usize>() {
                    return points.get(k - 1).map(|p| p.0);
                }
            }
            if let Some(rest) = name.strip_prefix('y') {
                if let Ok(k) = rest.parse::<usize>() {
                    return points.get(k - 1).map(|p| p.1);
                }
            }
            scalars.and_then(|f| f(name))
        };
        let mut out = vec![vec![Complex64::new(0.0, 0.0); g]; g];
        for i in 0..g {
            for j in 0..g {
                out[i][j] = self.entries[i][j].eval_c64(&bind).map_err(|e| match e {
                    AlgebraError::DenominatorVanishes => BakerError::PoleAtDivisor,
                    other => BakerError::Algebra(other),
                })?;
            }
        }
        Ok(out)
    }

    /// Weight of every entry equals (2g+2-2i) + (2g+2-2j).
    pub fn weights_ok(&self) -> bool {
        let w = WeightTable::for_genus(self.g);
        (0..self.g).all(|i| {
            (0..self.g).all(|j| {
                let expect = (2 * self.g + 2 - 2 * (i + 1) + 2 * self.g + 2 - 2 * (j + 1)) as i64;
                match w.graded_weight_rat(&self.entries[i][j]) {
                    Ok(Some(k)) => k == expect,
                    Ok(None) => true,
                    Err(_) => false,
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{int, var};
    use crate::curve::CurveV;

    fn paper_p22() -> RatFunc {
        let a = var("a");
        let nu = |k: u32| var(&format!("nu{k}"));
        let two = Rational::from_int(2);
        let inner = nu(2).add(&a.mul(&nu(0)).scale(&two));
        let num = a
            .mul(&inner)
            .mul(&var("x1"))
            .add(&nu(6))
            .add(&a.mul(&nu(4)).scale(&two))
            .add(&a.pow(2).mul(&nu(2)).scale(&two))
            .add(&a.pow(3).mul(&nu(0)).scale(&two));
        RatFunc::new(num, var("x1").sub(&a)).unwrap()
    }

    #[test]
    fn genus_one_closed_form() {
        let sym = Symbols::generic(1);
        let m = baker_matrix(&sym, &DivisorSpec::Symbolic).unwrap();
        assert!(m.entries[0][0].equals(&paper_p22()), "{}", m.entries[0][0]);
        assert!(m.weights_ok());
    }

    #[test]
    fn f_genus_one() {
        let sym = Symbols::generic(1);
        let f = build_f(&sym);
        let e1 = var("e1");
        let e2 = var("e2");
        let nu = |k: usize| sym.nu[k / 2].clone();
        let two = Rational::from_int(2);
        let expect = nu(8)
            .scale(&two)
            .add(&nu(6).mul(&e1.add(&e2)))
            .add(&e1.mul(&e2).mul(&nu(4).scale(&two).add(&nu(2).mul(&e1.add(&e2)))))
            .add(&e1.mul(&e2).pow(2).mul(&nu(0).scale(&two)));
        assert_eq!(f, expect);
        assert_eq!(f.swap_vars("e1", "e2"), f);
    }

    #[test]
    fn evaluation_example_x4_minus_1() {
        let c = CurveV::exact(1, &[1, 0, 0, 0, -1], 1).unwrap();
        let sym = Symbols::concrete(&c, Some(Rational::one())).unwrap();
        let m = baker_matrix(&sym, &DivisorSpec::Symbolic).unwrap();
        let v = m.evaluate(&[(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0))], None).unwrap();
        assert!((v[0][0] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        let bad = m.evaluate(&[(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))], None);
        assert!(matches!(bad, Err(BakerError::DegenerateDivisor(_))));
    }

    #[test]
    fn degenerate_concrete_divisor() {
        let c = CurveV::random_rational(2, 3);
        let sym = Symbols::concrete(&c, Some(Rational::one())).unwrap();
        let a = c.a_exact().unwrap().clone();
        let r = build(&sym, &DivisorSpec::Concrete(vec![a, Rational::from_int(7)]));
        assert!(matches!(r, Err(BakerError::DegenerateDivisor(_))));
        let _ = int(0);
    }
}
