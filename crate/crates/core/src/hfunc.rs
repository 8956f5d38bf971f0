//! H(v) = chi exp(v^t Omega v / 2) sigma(D v) numerically, its logarithmic
//! derivatives, the Baker functions it produces, and the identity checks.
//!
//! The exponent carries Omega/2: with the full v^t Omega v the Hessian of
//! log H is -2 Omega + tD wp D, while the Baker functions satisfy
//! P = -Omega + tD wp D. Accordingly the theta form uses
//! kappa^' = tD eta' + Omega mu' (and likewise for the second periods).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::Rational;
use crate::baker::{baker_matrix, BakerMatrix, DivisorSpec};
use crate::curve::NumericScalars;
use crate::error::NumericError;
use crate::numerics::abel::{AbelMap, CurvePoint};
use crate::numerics::jet::{Jet, JetSpace};
use crate::numerics::periods::{
    branch_points, max_abs, curve_periods, inverse, mat_add, mat_scale, matmul, matvec, transpose, BranchData, ExactStage, PeriodData, Precision,
};
use crate::numerics::sigma::{riemann_constant, RiemannConstant, Sigma, ThetaForm};
use crate::numerics::theta::{CMat, Theta};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Definition,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdeKind {
    KdV,
    KpSigma,
    KpH,
}

const KDV_STARTS: usize = 8;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Everything needed to evaluate H for one curve, basis and scaling.
#[derive(Clone, Debug)]
pub struct HEvaluator {
    pub stage: Arc<ExactStage>,
    pub pd: PeriodData,
    pub riemann: RiemannConstant,
    pub sigma: Sigma,
    /// chi eps exp(v^t kappa^' mu'^{-1} v / 2) theta[delta]((2 mu')^{-1} v)
    pub theta_form: ThetaForm,
    /// kappa^' = tD eta' + Omega mu', kappa^'' = tD eta'' + Omega mu''
    pub kappa_hat1: CMat,
    pub kappa_hat2: CMat,
    pub bd: BranchData,
    pub abel: AbelMap,
}

impl HEvaluator {
    pub fn new(stage: Arc<ExactStage>, num: &NumericScalars, prec: Precision, seed: u64) -> Result<Self, NumericError> {
        let pd = curve_periods(&stage, num, prec)?;
        let riemann = riemann_constant(&stage.curve, &pd, seed)?;
        let sigma = Sigma::new(&pd, &riemann.ch)?;
        let muinv = inverse(&pd.mu1)?;
        let dt = transpose(&pd.nm.d);
        let kappa_hat1 = mat_add(&matmul(&dt, &pd.eta1), &matmul(&pd.nm.omega, &pd.mu1));
        let kappa_hat2 = mat_add(&matmul(&dt, &pd.eta2), &matmul(&pd.nm.omega, &pd.mu2));
        let theta_form = ThetaForm {
            c: pd.nm.chi * sigma.calibration.epsilon,
            q: matmul(&kappa_hat1, &muinv),
            a: mat_scale(&muinv, c(0.5)),
            theta: Theta::new(pd.tau.clone(), riemann.ch.clone())?,
        };
        let bd = branch_points(&stage.curve)?;
        let abel = AbelMap::new(&stage.curve, &bd);
        Ok(HEvaluator { stage, pd, riemann, sigma, theta_form, kappa_hat1, kappa_hat2, bd, abel })
    }

    /// Default scaling (s = 1) from the curve alone.
    pub fn for_curve(stage: Arc<ExactStage>, prec: Precision, seed: u64) -> Result<Self, NumericError> {
        let num = NumericScalars::new(&stage.curve);
        Self::new(stage, &num, prec, seed)
    }

    pub fn genus(&self) -> usize {
        self.pd.g
    }

    pub fn d_times(&self, v: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.pd.nm.d, v)
    }

    fn omega_quad(&self, v: &[Complex64]) -> Complex64 {
        let ov = matvec(&self.pd.nm.omega, v);
        0.5 * v.iter().zip(&ov).map(|(a, b)| a * b).sum::<Complex64>()
    }

    pub fn h_eval(&self, v: &[Complex64], route: Route) -> Result<Complex64, NumericError> {
        match route {
            Route::Definition => {
                Ok(self.pd.nm.chi * self.omega_quad(v).exp() * self.sigma.value(&self.d_times(v))?)
            }
            Route::Theta => self.theta_form.value(v),
        }
    }

    /// log H at v (branch of the logarithm unspecified).
    pub fn log_h(&self, v: &[Complex64], route: Route) -> Result<Complex64, NumericError> {
        Ok(self.log_h_jet(v, 0, route)?.value())
    }

    /// Jet of log H at v in the variables (v_{2g}, ..., v_2).
    pub fn log_h_jet(&self, v: &[Complex64], order: usize, route: Route) -> Result<Jet, NumericError> {
        let g = self.genus();
        let sp = JetSpace::new(g, order);
        match route {
            Route::Theta => self.theta_form.log_jet_in(v, &sp),
            Route::Definition => {
                let u = self.d_times(v);
                let ls = self.sigma.form.log_jet_in(&u, &sp)?;
                let lv = ls.linear_change(&sp, &self.pd.nm.d);
                let mut out = lv.add(&Jet::quadratic(&sp, &self.pd.nm.omega, v));
                out.c[0] += self.pd.nm.chi.ln();
                Ok(out)
            }
        }
    }

    /// Matrix P_{2g+2-2i, 2g+2-2j}(v) = -d_i d_j log H (0-based i, j).
    pub fn baker_from_h(&self, v: &[Complex64]) -> Result<CMat, NumericError> {
        let g = self.genus();
        let j = self.log_h_jet(v, 2, Route::Theta)?;
        Ok((0..g).map(|a| (0..g).map(|b| -j.derivative(&[a, b])).collect()).collect())
    }

    /// wp_{2k-1, 2l-1}(u) (0-based k, l).
    pub fn wp_from_sigma(&self, u: &[Complex64]) -> Result<CMat, NumericError> {
        self.sigma.wp(u)
    }

    pub fn abel_jacobi(&self, pts: &[CurvePoint]) -> Result<Vec<Complex64>, NumericError> {
        self.abel.divisor(pts)
    }

    /// P_{ij}(v) + n_ij - t^{-2} sum s^{2g+2-k-l} C(k-1,i-1) C(l-1,j-1) (-a)^{k+l-i-j} wp_{2k-1,2l-1}(Dv),
    /// largest entry relative to the largest |P|.
    pub fn p_wp_residual(&self, v: &[Complex64]) -> Result<f64, NumericError> {
        let g = self.genus();
        let p = self.baker_from_h(v)?;
        let wp = self.wp_from_sigma(&self.d_times(v))?;
        let nm = &self.pd.nm;
        let a = self.pd.scalars.a;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 1..=g {
            for j in 1..=g {
                let mut sum = c(0.0);
                for k in i..=g {
                    for l in j..=g {
                        let b = Rational::binomial(k as i64 - 1, i as i64 - 1).to_f64()
                            * Rational::binomial(l as i64 - 1, j as i64 - 1).to_f64();
                        let e = (2 * g + 2 - k - l) as i32;
                        sum += nm.s.powi(e) * b * (-a).powi((k + l - i - j) as i32) * wp[k - 1][l - 1];
                    }
                }
                let r = p[i - 1][j - 1] + nm.omega[i - 1][j - 1] - sum / (nm.t * nm.t);
                worst = worst.max(r.norm());
                scale = scale.max(p[i - 1][j - 1].norm());
            }
        }
        Ok(worst / scale.max(1e-300))
    }

    /// |H(v + 2mu'm1 + 2mu''m2)/H(v) / factor - 1| with the factor
    /// sign * exp{t(2 kappa^' m1 + 2 kappa^'' m2)(v + mu'm1 + mu''m2)}.
    pub fn quasi_periodicity_residual(&self, v: &[Complex64], m1: &[i64], m2: &[i64]) -> Result<f64, NumericError> {
        let pd = &self.pd;
        let shift = pd.lattice_vector(m1, m2);
        let w: Vec<Complex64> = v.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let l0 = self.log_h_jet(v, 0, Route::Definition)?.value();
        let l1 = self.log_h_jet(&w, 0, Route::Definition)?.value();
        let f = |m: &[i64]| m.iter().map(|&k| c(k as f64)).collect::<Vec<_>>();
        let (f1, f2) = (f(m1), f(m2));
        let k1 = matvec(&self.kappa_hat1, &f1);
        let k2 = matvec(&self.kappa_hat2, &f2);
        let h1 = matvec(&pd.mu1, &f1);
        let h2 = matvec(&pd.mu2, &f2);
        let mut expo = c(0.0);
        for i in 0..pd.g {
            expo += 2.0 * (k1[i] + k2[i]) * (v[i] + h1[i] + h2[i]);
        }
        let ch = &self.riemann.ch;
        let mut sgn = 0.0;
        for i in 0..pd.g {
            sgn += 2.0 * (ch.d1[i] * m1[i] as f64 - ch.d2[i] * m2[i] as f64) + (m1[i] * m2[i]) as f64;
        }
        let sign = if (sgn.round() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Ok(((l1 - l0 - expo).exp() * sign - 1.0).norm())
    }

    /// Uniform point of the cell centred at 0, kept away from the theta divisor.
    pub fn random_v<R: Rng>(&self, rng: &mut R) -> Result<Vec<Complex64>, NumericError> {
        let g = self.genus();
        for _ in 0..1000 {
            let x: Vec<Complex64> = (0..g).map(|_| c(rng.gen_range(-1.0..1.0))).collect();
            let y: Vec<Complex64> = (0..g).map(|_| c(rng.gen_range(-1.0..1.0))).collect();
            let a = matvec(&self.pd.mu1, &x);
            let b = matvec(&self.pd.mu2, &y);
            let v: Vec<Complex64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
            if self.theta_form.theta_relative(&v)? > 1e-3 {
                return Ok(v);
            }
        }
        Err(NumericError::OnThetaDivisor)
    }

    /// Generic divisor of g points, with distinct x away from a.
    pub fn random_divisor<R: Rng>(&self, rng: &mut R) -> Vec<CurvePoint> {
        loop {
            let pts: Vec<CurvePoint> = (0..self.genus()).map(|_| self.abel.random_point(&self.bd, rng)).collect();
            let ok = (0..pts.len()).all(|i| (i + 1..pts.len()).all(|k| (pts[i].0 - pts[k].0).norm() > 0.05));
            if ok {
                return pts;
            }
        }
    }

    pub fn baker_matrix(&self) -> Result<BakerMatrix, NumericError> {
        Ok(baker_matrix(&self.stage.model.sym, &DivisorSpec::Symbolic)?)
    }

    /// Largest entrywise relative gap between P from H at the Abel image
    /// and P evaluated algebraically at the divisor.
    pub fn end_to_end(&self, bm: &BakerMatrix, pts: &[CurvePoint]) -> Result<f64, NumericError> {
        let v = self.abel_jacobi(pts)?;
        let from_h = self.baker_from_h(&v)?;
        let num = &self.pd.scalars;
        let bind = |n: &str| num.lookup(n);
        let alg = bm.evaluate(pts, Some(&bind))?;
        let scale = alg.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for (r1, r2) in from_h.iter().zip(&alg) {
            for (a, b) in r1.iter().zip(r2) {
                worst = worst.max((a - b).norm() / b.norm().max(1e-3 * scale));
            }
        }
        Ok(worst)
    }

    /// PDE residual at one point (v for KP-H, u for the sigma-side equations).
    /// Each equation is read as lhs = rhs with lhs the term carrying the
    /// checked constants; the residual is |lhs - rhs| / |lhs|.
    pub fn pde_residual_at(&self, kind: PdeKind, point: &[Complex64], consts: &PdeConstants) -> Result<f64, NumericError> {
        let g = self.genus();
        let log_jet = match kind {
            PdeKind::KpH => self.log_h_jet(point, 6, Route::Theta)?,
            PdeKind::KdV | PdeKind::KpSigma => self.sigma.log_jet(point, 6)?,
        };
        let dirs = consts.directions(g);
        let st = JetSpace::new(3, 6);
        let m: CMat = (0..g).map(|k| (0..3).map(|l| dirs[l][k]).collect()).collect();
        let lt = log_jet.linear_change(&st, &m);
        // psi = 2 d1^2 log - shift, t-variables 0, 1, 2 = t1, t2, t3
        let d = |extra: &[usize]| -> Complex64 {
            let mut v = vec![0usize, 0];
            v.extend_from_slice(extra);
            2.0 * lt.derivative(&v)
        };
        let psi = d(&[]) - consts.shift;
        let (lhs, rhs) = match kind {
            PdeKind::KdV => {
                // G = 2 wp11 + 2 lambda~_2 / 3 = -psi: d1^3 G = 4 d3 G + 6 G d1 G
                let gg = -psi;
                (-d(&[0, 0, 0]), -4.0 * d(&[2]) + 6.0 * gg * (-d(&[0])))
            }
            PdeKind::KpSigma | PdeKind::KpH => {
                // d2^2 psi = d1 d3 psi + 6 d1(psi d1 psi) + d1^4 psi
                (d(&[1, 1]), d(&[0, 2]) + 6.0 * (d(&[0]) * d(&[0]) + psi * d(&[0, 0])) + d(&[0, 0, 0, 0]))
            }
        };
        Ok((lhs - rhs).norm() / lhs.norm().max(1e-300))
    }

    /// The constants of the stated equations for this curve.
    pub fn pde_constants(&self, kind: PdeKind) -> Result<PdeConstants, NumericError> {
        let g = self.genus();
        let nm = &self.pd.nm;
        match kind {
            PdeKind::KdV => Ok(PdeConstants { alpha: c(1.0), beta: c(1.0), gamma: c(0.0), shift: 2.0 * nm.lambda[1] / 3.0, kind }),
            PdeKind::KpSigma => {
                if g < 3 {
                    return Err(NumericError::ConstantsUndefined("KP for sigma needs g >= 3".into()));
                }
                let (l1, l2, l3) = (nm.lambda[2 * g + 1], nm.lambda[2 * g], nm.lambda[2 * g - 1]);
                if l1.norm() == 0.0 {
                    return Err(NumericError::ConstantsUndefined("lambda_{4g+2} = 0".into()));
                }
                let r = (-3.0 * l1).sqrt();
                Ok(PdeConstants { alpha: -16.0 * l1, beta: 2.0 * r, gamma: l2 / r, shift: 2.0 / 3.0 * l3 + l2 * l2 / (18.0 * l1), kind })
            }
            PdeKind::KpH => {
                if g < 3 {
                    return Err(NumericError::ConstantsUndefined("KP for H needs g >= 3".into()));
                }
                let nu = &self.pd.scalars.nu;
                let r = (-3.0 * nu[0]).sqrt();
                Ok(PdeConstants { alpha: -16.0 * nu[0], beta: 2.0 * r, gamma: nu[1] / r, shift: 2.0 / 3.0 * nu[2] + nu[1] * nu[1] / (18.0 * nu[0]), kind })
            }
        }
    }

    /// Max residual over a 3x3x3 grid in (t1, t2, t3) around a base point,
    /// with the first g-3 coordinates fixed by the base point.
    pub fn pde_grid_residual(&self, kind: PdeKind, consts: &PdeConstants, base: &[Complex64], step: f64) -> Result<f64, NumericError> {
        let g = self.genus();
        let dirs = consts.directions(g);
        let mut worst: f64 = 0.0;
        for i in -1i32..=1 {
            for j in -1i32..=1 {
                for k in -1i32..=1 {
                    if kind == PdeKind::KdV && g == 1 && (j != 0 || k != 0) {
                        continue;
                    }
                    let t = [c(step * i as f64), c(step * j as f64), c(step * k as f64)];
                    let p: Vec<Complex64> = (0..g).map(|r| base[r] + (0..3).map(|l| dirs[l][r] * t[l]).sum::<Complex64>()).collect();
                    worst = worst.max(self.pde_residual_at(kind, &p, consts)?);
                }
            }
        }
        Ok(worst)
    }

    /// A base point for PDE sampling: random u (sigma side) or v (H side)
    /// off the theta divisor.
    ///
    /// KdV is invariant under G(x) -> b^2 G(b x), so its only curve constant
    /// is the shift, and that enters with weight about |shift| / |G|. The
    /// KdV base point is therefore moved along u_1 by Newton's method to
    /// where G = shift / 4.
    pub fn pde_base<R: Rng>(&self, kind: PdeKind, rng: &mut R) -> Result<Vec<Complex64>, NumericError> {
        match kind {
            PdeKind::KpH => self.random_v(rng),
            PdeKind::KpSigma => Ok(self.d_times(&self.random_v(rng)?)),
            PdeKind::KdV => {
                let shift = self.pde_constants(kind)?.shift;
                let first = self.d_times(&self.random_v(rng)?);
                if shift.norm() == 0.0 {
                    return Ok(first);
                }
                let mut start = first.clone();
                for _ in 0..KDV_STARTS {
                    if let Some(u) = self.kdv_newton(start, shift) {
                        return Ok(u);
                    }
                    start = self.d_times(&self.random_v(rng)?);
                }
                Ok(first)
            }
        }
    }

    fn kdv_newton(&self, mut u: Vec<Complex64>, shift: Complex64) -> Option<Vec<Complex64>> {
        let target = 0.25 * shift;
        for _ in 0..60 {
            let j = self.sigma.log_jet(&u, 3).ok()?;
            let gg = -2.0 * j.derivative(&[0, 0]) + shift;
            let dg = -2.0 * j.derivative(&[0, 0, 0]);
            let err = gg - target;
            if err.norm() <= 1e-10 * target.norm() {
                return Some(u);
            }
            let mut du = err / dg;
            let cap = 0.1 * max_abs(&self.pd.omega1);
            if du.norm() > cap {
                du *= cap / du.norm();
            }
            u[0] -= du;
        }
        None
    }
}

/// Constants (alpha, beta, gamma, shift) of a PDE check: the t-directions
/// are d/dt1 = e_last, d/dt2 = beta e_{last-1} + gamma e_last,
/// d/dt3 = alpha e_{last-2} (KdV: d/dt1 = e_1, d/dt3 = e_3).
#[derive(Clone, Copy, Debug)]
pub struct PdeConstants {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub shift: Complex64,
    pub kind: PdeKind,
}

impl PdeConstants {
    /// Direction vectors for t1, t2, t3 in the g coordinates.
    pub fn directions(&self, g: usize) -> [Vec<Complex64>; 3] {
        let z = vec![c(0.0); g];
        let (mut t1, mut t2, mut t3) = (z.clone(), z.clone(), z);
        match self.kind {
            PdeKind::KdV => {
                t1[0] = c(1.0);
                if g >= 2 {
                    t3[1] = c(1.0);
                }
            }
            PdeKind::KpSigma | PdeKind::KpH => {
                t1[g - 1] = c(1.0);
                t2[g - 2] = self.beta;
                t2[g - 1] = self.gamma;
                t3[g - 3] = self.alpha;
            }
        }
        [t1, t2, t3]
    }

    /// The negative control: beta scaled for KP, the shift scaled for KdV.
    pub fn perturbed(&self, factor: f64) -> Self {
        match self.kind {
            PdeKind::KdV => PdeConstants { shift: self.shift * factor, ..*self },
            _ => PdeConstants { beta: self.beta * factor, ..*self },
        }
    }
}

/// Lattice translate used by the periodicity checks.
pub fn shifted(v: &[Complex64], pd: &PeriodData, m1: &[i64], m2: &[i64]) -> Vec<Complex64> {
    let s = pd.lattice_vector(m1, m2);
    v.iter().zip(&s).map(|(a, b)| a + b).collect()
}

/// Weierstrass relation for g = 1: with p = wp_11 + lambda~_2/3,
/// (p')^2 = 4p^3 - g2 p - g3, residual relative to |p'|^2.
pub fn weierstrass_residual(h: &HEvaluator, u: Complex64) -> Result<f64, NumericError> {
    let j = h.sigma.log_jet(&[u], 3)?;
    let l = &h.pd.nm.lambda;
    let p = -j.derivative(&[0, 0]) + l[1] / 3.0;
    let dp = -j.derivative(&[0, 0, 0]);
    let g2 = -4.0 * (l[2] - l[1] * l[1] / 3.0);
    let g3 = -4.0 * (l[3] - l[1] * l[2] / 3.0 + 2.0 * l[1] * l[1] * l[1] / 27.0);
    let r = dp * dp - (4.0 * p * p * p - g2 * p - g3);
    Ok(r.norm() / (dp * dp).norm().max(1e-300))
}

pub fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveV;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn genus_one_end_to_end() {
        let c1 = CurveV::exact(1, &[1, 0, 0, 0, -1], 1).unwrap();
        let st = Arc::new(ExactStage::new(&c1).unwrap());
        let h = HEvaluator::for_curve(st, Precision::Double, 3).unwrap();
        let bm = h.baker_matrix().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let d = h.random_divisor(&mut rng);
            let r = h.end_to_end(&bm, &d).unwrap();
            assert!(r < 1e-8, "{r}");
        }
        let v = h.random_v(&mut rng).unwrap();
        let a = h.h_eval(&v, Route::Definition).unwrap();
        let b = h.h_eval(&v, Route::Theta).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm());
        assert!(h.p_wp_residual(&v).unwrap() < 1e-9);
        assert!(weierstrass_residual(&h, Complex64::new(0.3, 0.1)).unwrap() < 1e-9);
    }
}
