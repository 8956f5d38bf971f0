//! Branch points, homology cycles on V and all period matrices.
//!
//! Cycles are closed loops in the x-plane around consecutive branch points
//! (sorted by (Re, Im)); y is continued along the loop. The 2g loops around
//! (e_0, e_1), ..., (e_{2g-1}, e_{2g}) span H_1. Their intersection form is
//! read off the Legendre relation and reduced to a canonical basis by an
//! integer symplectic Gram–Schmidt step.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::quad::{path_nodes, PathNode, Segment};
use super::roots::{horner, min_relative_gap};
use super::theta::CMat;
use crate::algebra::{MultiPoly, RatFunc};
use crate::curve::{CurveV, NumericScalars, ScaledModel, Symbols};
use crate::error::NumericError;
use crate::omega::{self, OmegaData};

pub const CLUSTER_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    /// Panel length as a fraction of the loop radius.
    fn panel_fraction(self) -> f64 {
        match self {
            Precision::Double => 0.5,
            Precision::Extended => 0.25,
        }
    }
}

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// A differential q(x) dx/(2y), q = num/den with numeric coefficients in x.
#[derive(Clone, Debug)]
pub struct NumForm {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

fn coeffs_in_x<F>(p: &MultiPoly, bind: F) -> Result<Vec<Complex64>, NumericError>
where
    F: Fn(&str) -> Option<Complex64> + Copy,
{
    p.coefficients_in("x").iter().map(|c| c.eval_c64(bind).map_err(NumericError::Algebra)).collect()
}

impl NumForm {
    pub fn from_ratfunc<F>(r: &RatFunc, bind: F) -> Result<Self, NumericError>
    where
        F: Fn(&str) -> Option<Complex64> + Copy,
    {
        Ok(NumForm { num: coeffs_in_x(r.numer(), bind)?, den: coeffs_in_x(r.denom(), bind)? })
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        horner(&self.num, x) / horner(&self.den, x)
    }
}

/// The 2g+2 roots of N in (Re, Im) order and the marked one.
#[derive(Clone, Debug)]
pub struct BranchData {
    pub roots: Vec<Complex64>,
    pub a_index: usize,
    pub a: Complex64,
    /// consecutive pairs (k, k+1) carrying the loops
    pub cuts: Vec<(usize, usize)>,
}

pub fn branch_points(curve: &CurveV) -> Result<BranchData, NumericError> {
    let roots = curve.roots()?;
    let gap = min_relative_gap(&roots);
    if gap < CLUSTER_THRESHOLD {
        return Err(NumericError::RootClustering(gap));
    }
    let a_index = curve.branch_index(&roots);
    let cuts = (0..roots.len() - 1).map(|k| (k, k + 1)).collect();
    Ok(BranchData { a: roots[a_index], roots, a_index, cuts })
}

/// y = sqrt(N(x)) continued along consecutive nodes, starting from the
/// principal root (or from `y0` when given).
pub fn continue_sheet(n: &[Complex64], nodes: &[PathNode], y0: Option<Complex64>) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut prev = y0;
    for nd in nodes {
        let r = horner(n, nd.z).sqrt();
        let y = match prev {
            None => r,
            Some(p) => {
                if (r - p).norm() <= (r + p).norm() {
                    r
                } else {
                    -r
                }
            }
        };
        out.push(y);
        prev = Some(y);
    }
    out
}

/// A closed loop on V (x-path plus continued y).
#[derive(Clone, Debug)]
pub struct LoopCycle {
    pub around: (usize, usize),
    pub radius: f64,
    pub nodes: Vec<PathNode>,
    pub y: Vec<Complex64>,
}

fn dist_to_segment(e: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let t = ((e - p) * d.conj()).re / d.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (e - (p + d * t)).norm()
}

impl LoopCycle {
    pub fn around(bd: &BranchData, n: &[Complex64], k: usize, l: usize, prec: Precision) -> Self {
        let (p, q) = (bd.roots[k], bd.roots[l]);
        let mut r = (q - p).norm();
        for (m, &e) in bd.roots.iter().enumerate() {
            if m != k && m != l {
                r = r.min(0.5 * dist_to_segment(e, p, q));
            }
        }
        let r = 0.5 * r;
        let d = (q - p) / (q - p).norm();
        let nrm = Complex64::new(0.0, 1.0) * d;
        let th = d.arg();
        let segs = [
            Segment::Line { from: p - nrm * r, to: q - nrm * r },
            Segment::Arc { center: q, radius: r, start: th - PI / 2.0, sweep: PI },
            Segment::Line { from: q + nrm * r, to: p + nrm * r },
            Segment::Arc { center: p, radius: r, start: th + PI / 2.0, sweep: PI },
        ];
        let nodes = path_nodes(&segs, prec.panel_fraction() * r, 2);
        let y = continue_sheet(n, &nodes, None);
        LoopCycle { around: (k, l), radius: r, nodes, y }
    }

    /// Integral of q(x) dx/(2y) around the loop.
    pub fn integrate(&self, f: &NumForm) -> Complex64 {
        self.nodes.iter().zip(&self.y).map(|(nd, y)| f.eval(nd.z) * nd.dz / (2.0 * y)).sum()
    }

    /// The continued sheet closes up (two branch points enclosed).
    pub fn closes(&self) -> bool {
        let (y0, y1) = (self.y[0], *self.y.last().unwrap());
        (y0 - y1).norm() < (y0 + y1).norm()
    }
}

/// Exact data shared by every numerical scaling of one curve.
#[derive(Clone, Debug)]
pub struct ExactStage {
    pub curve: CurveV,
    pub model: ScaledModel,
    pub omega: OmegaData,
}

impl ExactStage {
    /// Concrete symbols when the branch point is rational, generic symbols
    /// bound numerically otherwise; `w` stays symbolic in both cases.
    pub fn new(curve: &CurveV) -> Result<Self, NumericError> {
        let sym = match curve.a_exact() {
            Some(_) => Symbols::concrete(curve, None)?,
            None => Symbols::generic(curve.genus()),
        };
        let model = ScaledModel::new(sym);
        let omega = omega::compute(&model)?;
        Ok(ExactStage { curve: curve.clone(), model, omega })
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    /// Numerical D, Omega, chi and lambda~ for one scaling.
    pub fn numeric_matrices(&self, num: &NumericScalars) -> Result<NumericModel, NumericError> {
        let g = self.genus();
        let bind = self.model.sym.binder(num);
        let ev = |r: &RatFunc| r.eval_c64(bind).map_err(NumericError::Algebra);
        let evp = |p: &MultiPoly| p.eval_c64(bind).map_err(NumericError::Algebra);
        let mut d = vec![vec![cz(); g]; g];
        let mut om = vec![vec![cz(); g]; g];
        for i in 0..g {
            for j in 0..g {
                d[i][j] = ev(&self.model.d[i][j])?;
                om[i][j] = evp(&self.omega.omega[i][j])?;
            }
        }
        let lambda = self.model.lambda.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
        Ok(NumericModel { d, omega: om, chi: ev(&self.model.chi)?, lambda, s: num.s(), t: num.t() })
    }

    /// The four families of forms as numeric q(x): mu, zeta*omega, zeta*eta, kappa.
    pub fn numeric_forms(&self, num: &NumericScalars) -> Result<[Vec<NumForm>; 4], NumericError> {
        let g = self.genus();
        let bind = self.model.sym.binder(num);
        let m = &self.model;
        let mu = m.mu().iter().map(|f| NumForm::from_ratfunc(&f.numer, bind)).collect::<Result<Vec<_>, _>>()?;
        let zo = m.omega().iter().map(|f| NumForm::from_ratfunc(&m.pullback(&f.numer), bind)).collect::<Result<Vec<_>, _>>()?;
        let ze = m.eta().iter().map(|f| NumForm::from_ratfunc(&m.pullback(&f.numer), bind)).collect::<Result<Vec<_>, _>>()?;
        let xa = MultiPoly::var("x").sub(&m.sym.a).pow(g as u32);
        let ka = self
            .omega
            .kappa_numer
            .iter()
            .map(|k| NumForm::from_ratfunc(&RatFunc::new(k.clone(), xa.clone()).map_err(NumericError::Algebra)?, bind))
            .collect::<Result<Vec<_>, _>>()?;
        Ok([mu, zo, ze, ka])
    }
}

/// Numerical values of the scaling-dependent exact data.
#[derive(Clone, Debug)]
pub struct NumericModel {
    pub d: CMat,
    pub omega: CMat,
    pub chi: Complex64,
    pub lambda: Vec<Complex64>,
    pub s: Complex64,
    pub t: Complex64,
}

/// All period matrices for one curve, basis and scaling.
#[derive(Clone, Debug)]
pub struct PeriodData {
    pub g: usize,
    pub mu1: CMat,
    pub mu2: CMat,
    pub omega1: CMat,
    pub omega2: CMat,
    pub eta1: CMat,
    pub eta2: CMat,
    /// kappa' and kappa'' from t D eta + 2 Omega mu
    pub kappa1: CMat,
    pub kappa2: CMat,
    /// kappa' and kappa'' by direct integration of kappa_i
    pub kappa1_direct: CMat,
    pub kappa2_direct: CMat,
    pub tau: CMat,
    /// intersection form of the raw loops and the change to the canonical basis
    pub intersection: Vec<Vec<i64>>,
    pub basis: Vec<Vec<i64>>,
    pub intersection_residual: f64,
    pub nm: NumericModel,
    pub scalars: NumericScalars,
}

pub fn to_dm(m: &CMat) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.len(), m[0].len(), |i, j| m[i][j])
}

pub fn from_dm(m: &DMatrix<Complex64>) -> CMat {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn inverse(m: &CMat) -> Result<CMat, NumericError> {
    to_dm(m).try_inverse().map(|x| from_dm(&x)).ok_or_else(|| NumericError::Singular("matrix inverse".into()))
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    from_dm(&(to_dm(a) * to_dm(b)))
}

pub fn transpose(a: &CMat) -> CMat {
    from_dm(&to_dm(a).transpose())
}

pub fn mat_add(a: &CMat, b: &CMat) -> CMat {
    from_dm(&(to_dm(a) + to_dm(b)))
}

pub fn mat_scale(a: &CMat, k: Complex64) -> CMat {
    from_dm(&(to_dm(a) * k))
}

pub fn matvec(a: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Block matrix [[p, q], [r, s]].
pub fn block(p: &CMat, q: &CMat, r: &CMat, s: &CMat) -> CMat {
    let mut out = Vec::new();
    for (a, b) in p.iter().zip(q) {
        out.push(a.iter().chain(b.iter()).cloned().collect());
    }
    for (a, b) in r.iter().zip(s) {
        out.push(a.iter().chain(b.iter()).cloned().collect());
    }
    out
}

pub fn j_matrix(g: usize) -> CMat {
    let mut j = vec![vec![cz(); 2 * g]; 2 * g];
    for i in 0..g {
        j[i][g + i] = Complex64::new(1.0, 0.0);
        j[g + i][i] = Complex64::new(-1.0, 0.0);
    }
    j
}

/// max |t K J K + (pi i / 2) J| / max |K|^2.
pub fn legendre_residual(k: &CMat) -> f64 {
    let g = k.len() / 2;
    let j = j_matrix(g);
    let lhs = matmul(&matmul(&transpose(k), &j), k);
    let rhs = mat_scale(&j, Complex64::new(0.0, -PI / 2.0));
    max_abs(&mat_add(&lhs, &mat_scale(&rhs, Complex64::new(-1.0, 0.0))))
}

/// Integer symplectic basis for a unimodular antisymmetric form M:
/// columns S with t S M S = J.
pub fn symplectic_basis(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let pair = |x: &[i64], y: &[i64]| -> i64 {
        let mut s = 0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * m[i][j] * y[j];
            }
        }
        s
    };
    let mut pool: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let (mut avec, mut bvec) = (Vec::new(), Vec::new());
    while !pool.is_empty() {
        let a = pool.remove(0);
        let bi = loop {
            let vals: Vec<i64> = pool.iter().map(|p| pair(&a, p)).collect();
            if let Some(i) = vals.iter().position(|v| v.abs() == 1) {
                break i;
            }
            let nz: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] != 0).collect();
            if nz.len() < 2 {
                return None;
            }
            // Euclid step on the two smallest pairings
            let mut idx = nz.clone();
            idx.sort_by_key(|&i| vals[i].abs());
            let (i, j) = (idx[0], idx[1]);
            let q = vals[j] / vals[i];
            let pi = pool[i].clone();
            for (x, y) in pool[j].iter_mut().zip(&pi) {
                *x -= q * y;
            }
        };
        let mut b = pool.remove(bi);
        if pair(&a, &b) < 0 {
            b.iter_mut().for_each(|x| *x = -*x);
        }
        for v in pool.iter_mut() {
            let vb = pair(v, &b);
            let va = pair(v, &a);
            for k in 0..n {
                v[k] = v[k] - vb * a[k] + va * b[k];
            }
        }
        avec.push(a);
        bvec.push(b);
    }
    let cols: Vec<Vec<i64>> = avec.into_iter().chain(bvec).collect();
    // S[i][j] = cols[j][i]
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

fn split(m: &CMat, g: usize) -> (CMat, CMat) {
    let a = m.iter().map(|r| r[..g].to_vec()).collect();
    let b = m.iter().map(|r| r[g..].to_vec()).collect();
    (a, b)
}

pub fn curve_periods(stage: &ExactStage, num: &NumericScalars, prec: Precision) -> Result<PeriodData, NumericError> {
    let g = stage.genus();
    let bd = branch_points(&stage.curve)?;
    let ncoef = stage.curve.n_c64();
    let [mu, zo, ze, ka] = stage.numeric_forms(num)?;
    let nm = stage.numeric_matrices(num)?;
    let loops: Vec<LoopCycle> = (0..2 * g).map(|k| LoopCycle::around(&bd, &ncoef, k, k + 1, prec)).collect();
    if !loops.iter().all(|l| l.closes()) {
        return Err(NumericError::SymplecticCheckFailed(f64::INFINITY));
    }
    // raw period matrices: rows = forms, columns = loops
    let raw = |forms: &[NumForm], f: f64| -> CMat {
        forms.iter().map(|q| loops.iter().map(|l| l.integrate(q) * f).collect()).collect()
    };
    let (mu_r, zo_r, ze_r, ka_r) = (raw(&mu, 0.5), raw(&zo, 0.5), raw(&ze, -0.5), raw(&ka, -0.5));
    let kg: CMat = zo_r.iter().chain(ze_r.iter()).cloned().collect();
    let j = j_matrix(g);
    let mf = mat_scale(&matmul(&matmul(&transpose(&kg), &j), &kg), Complex64::new(0.0, 2.0 / PI));
    let mut inter = vec![vec![0i64; 2 * g]; 2 * g];
    let mut resid: f64 = 0.0;
    for a in 0..2 * g {
        for b in 0..2 * g {
            let v = mf[a][b];
            let r = v.re.round();
            resid = resid.max((v - r).norm());
            inter[a][b] = r as i64;
        }
    }
    if resid > 1e-3 {
        return Err(NumericError::SymplecticCheckFailed(resid));
    }
    let s = symplectic_basis(&inter).ok_or(NumericError::SymplecticCheckFailed(resid))?;
    let sc: CMat = s.iter().map(|r| r.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect()).collect();
    let canon = |m: &CMat| split(&matmul(m, &sc), g);
    let (mu1, mu2) = canon(&mu_r);
    let (omega1, omega2) = canon(&zo_r);
    let (eta1, eta2) = canon(&ze_r);
    let (kappa1_direct, kappa2_direct) = canon(&ka_r);
    let dt = transpose(&nm.d);
    let two_om = mat_scale(&nm.omega, Complex64::new(2.0, 0.0));
    let kappa1 = mat_add(&matmul(&dt, &eta1), &matmul(&two_om, &mu1));
    let kappa2 = mat_add(&matmul(&dt, &eta2), &matmul(&two_om, &mu2));
    let tau = matmul(&inverse(&mu1)?, &mu2);
    Ok(PeriodData {
        g,
        mu1,
        mu2,
        omega1,
        omega2,
        eta1,
        eta2,
        kappa1,
        kappa2,
        kappa1_direct,
        kappa2_direct,
        tau,
        intersection: inter,
        basis: s,
        intersection_residual: resid,
        nm,
        scalars: num.clone(),
    })
}

impl PeriodData {
    pub fn k_matrix(&self) -> CMat {
        block(&self.omega1, &self.omega2, &self.eta1, &self.eta2)
    }

    pub fn k_script(&self) -> CMat {
        block(&self.mu1, &self.mu2, &self.kappa1, &self.kappa2)
    }

    /// max |D mu' - omega'|, |D mu'' - omega''| relative to max |omega|.
    pub fn pullback_residual(&self) -> f64 {
        let r1 = mat_add(&matmul(&self.nm.d, &self.mu1), &mat_scale(&self.omega1, Complex64::new(-1.0, 0.0)));
        let r2 = mat_add(&matmul(&self.nm.d, &self.mu2), &mat_scale(&self.omega2, Complex64::new(-1.0, 0.0)));
        max_abs(&r1).max(max_abs(&r2)) / max_abs(&self.omega1).max(max_abs(&self.omega2))
    }

    /// Entrywise relative difference of the two kappa routes.
    pub fn kappa_cross_check(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let scale = max_abs(&self.kappa1).max(max_abs(&self.kappa2)).max(1e-300);
        for (a, b) in [(&self.kappa1, &self.kappa1_direct), (&self.kappa2, &self.kappa2_direct)] {
            for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
                worst = worst.max((x - y).norm() / x.norm().max(1e-3 * scale));
            }
        }
        worst
    }

    pub fn tau_symmetry(&self) -> f64 {
        let g = self.g;
        let mut r: f64 = 0.0;
        for i in 0..g {
            for j in 0..g {
                r = r.max((self.tau[i][j] - self.tau[j][i]).norm());
            }
        }
        r
    }

    /// Smallest eigenvalue of Im tau.
    pub fn im_tau_min_eigenvalue(&self) -> f64 {
        let g = self.g;
        let y = DMatrix::from_fn(g, g, |i, j| 0.5 * (self.tau[i][j].im + self.tau[j][i].im));
        y.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// A lattice vector 2 mu' m1 + 2 mu'' m2.
    pub fn lattice_vector(&self, m1: &[i64], m2: &[i64]) -> Vec<Complex64> {
        let f = |m: &[i64]| m.iter().map(|&k| Complex64::new(2.0 * k as f64, 0.0)).collect::<Vec<_>>();
        let a = matvec(&self.mu1, &f(m1));
        let b = matvec(&self.mu2, &f(m2));
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symplectic_reduction_of_chain() {
        // chain of four loops: <c_k, c_{k+1}> = 1
        let mut m = vec![vec![0i64; 4]; 4];
        for k in 0..3 {
            m[k][k + 1] = 1;
            m[k + 1][k] = -1;
        }
        let s = symplectic_basis(&m).unwrap();
        let n = 4;
        for a in 0..n {
            for b in 0..n {
                let mut v = 0;
                for i in 0..n {
                    for j in 0..n {
                        v += s[i][a] * m[i][j] * s[j][b];
                    }
                }
                let expect = if b == a + 2 { 1 } else if a == b + 2 { -1 } else { 0 };
                assert_eq!(v, expect);
            }
        }
    }

    #[test]
    fn genus_one_quartic_periods() {
        let c = CurveV::exact(1, &[1, 0, 0, 0, -1], 1).unwrap();
        let st = ExactStage::new(&c).unwrap();
        let num = NumericScalars::new(&c);
        let pd = curve_periods(&st, &num, Precision::Double).unwrap();
        assert!(legendre_residual(&pd.k_matrix()) < 1e-10, "{}", legendre_residual(&pd.k_matrix()));
        assert!(legendre_residual(&pd.k_script()) < 1e-10);
        assert!(pd.pullback_residual() < 1e-12);
        assert!(pd.kappa_cross_check() < 1e-9);
        assert!(pd.im_tau_min_eigenvalue() > 0.0, "{:?}", pd.tau);
    }
}
