//! Riemann constant, epsilon calibration and the sigma function of the
//! transformed curve.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::abel::AbelMap;
use super::jet::{Jet, JetSpace};
use super::periods::{branch_points, inverse, mat_scale, matmul, matvec, PeriodData};
use super::theta::{CMat, Characteristic, Theta};
use crate::curve::CurveV;
use crate::error::NumericError;
use crate::series::schur_u;

/// Relative size |theta| / sum |terms| below which a point counts as on
/// the theta divisor.
pub const DIVISOR_THRESHOLD: f64 = 1e-11;

/// w -> c exp(w^t Q w / 2) theta[delta](A w, tau).
#[derive(Clone, Debug)]
pub struct ThetaForm {
    pub c: Complex64,
    pub q: CMat,
    pub a: CMat,
    pub theta: Theta,
}

impl ThetaForm {
    pub fn nvars(&self) -> usize {
        self.q.len()
    }

    fn quad(&self, w: &[Complex64]) -> Complex64 {
        let qw = matvec(&self.q, w);
        0.5 * w.iter().zip(&qw).map(|(x, y)| x * y).sum::<Complex64>()
    }

    pub fn value(&self, w: &[Complex64]) -> Result<Complex64, NumericError> {
        let z = matvec(&self.a, w);
        Ok(self.c * self.quad(w).exp() * self.theta.value(&z)?)
    }

    /// Jet of log of the form at w0; fails on the theta divisor.
    pub fn log_jet(&self, w0: &[Complex64], order: usize) -> Result<Jet, NumericError> {
        let sp = JetSpace::new(self.nvars(), order);
        self.log_jet_in(w0, &sp)
    }

    pub fn log_jet_in(&self, w0: &[Complex64], sp: &Arc<JetSpace>) -> Result<Jet, NumericError> {
        let z = matvec(&self.a, w0);
        let (v, s) = self.theta.value_and_scale(&z)?;
        if v.norm() <= DIVISOR_THRESHOLD * s {
            return Err(NumericError::OnThetaDivisor);
        }
        let th = self.theta.jet(&self.a, w0, sp)?;
        let mut l = th.log().add(&Jet::quadratic(sp, &self.q, w0));
        l.c[0] += self.c.ln();
        Ok(l)
    }

    /// Jet of the form itself (not its log) at w0.
    pub fn jet(&self, w0: &[Complex64], sp: &Arc<JetSpace>) -> Result<Jet, NumericError> {
        let th = self.theta.jet(&self.a, w0, sp)?;
        Ok(th.mul(&Jet::quadratic(sp, &self.q, w0).exp()).scale(self.c))
    }

    /// |theta(A w)| relative to the sum of the moduli of its terms.
    pub fn theta_relative(&self, w: &[Complex64]) -> Result<f64, NumericError> {
        let (v, s) = self.theta.value_and_scale(&matvec(&self.a, w))?;
        Ok(v.norm() / s)
    }
}

/// Outcome of the half-characteristic sweep.
#[derive(Clone, Debug)]
pub struct RiemannConstant {
    pub ch: Characteristic,
    /// worst relative |theta| over the samples, per characteristic
    pub residuals: Vec<(Characteristic, f64)>,
}

impl RiemannConstant {
    pub fn winner_residual(&self) -> f64 {
        self.residuals.iter().find(|(c, _)| *c == self.ch).map(|r| r.1).unwrap_or(f64::NAN)
    }

    pub fn best_loser_residual(&self) -> f64 {
        self.residuals.iter().filter(|(c, _)| *c != self.ch).map(|r| r.1).fold(f64::INFINITY, f64::min)
    }
}

pub const RIEMANN_SAMPLES: usize = 12;

/// The half-characteristic whose theta vanishes at (2 mu')^{-1} of the
/// Abel image of g-1 random points, for all samples.
pub fn riemann_constant(curve: &CurveV, pd: &PeriodData, seed: u64) -> Result<RiemannConstant, NumericError> {
    let g = pd.g;
    let bd = branch_points(curve)?;
    let am = AbelMap::new(curve, &bd);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = inverse(&mat_scale(&pd.mu1, Complex64::new(2.0, 0.0)))?;
    let samples: Vec<Vec<Complex64>> = (0..RIEMANN_SAMPLES)
        .map(|_| {
            let pts: Vec<_> = (0..g - 1).map(|_| am.random_point(&bd, &mut rng)).collect();
            am.divisor(&pts).map(|v| matvec(&a, &v))
        })
        .collect::<Result<_, _>>()?;
    let base = Theta::new(pd.tau.clone(), Characteristic::zero(g))?;
    let mut residuals = Vec::new();
    for ch in Characteristic::all_half(g) {
        let th = base.with_characteristic(ch.clone());
        let mut worst: f64 = 0.0;
        for z in &samples {
            let (v, s) = th.value_and_scale(z)?;
            worst = worst.max(v.norm() / s);
        }
        residuals.push((ch, worst));
    }
    let winners: Vec<&(Characteristic, f64)> = residuals.iter().filter(|(_, r)| *r < 1e-8).collect();
    match winners.len() {
        0 => Err(NumericError::NoCharacteristicFound),
        1 => Ok(RiemannConstant { ch: winners[0].0.clone(), residuals: residuals.clone() }),
        k => Err(NumericError::MultipleCharacteristicsFound(k)),
    }
}

/// Calibration outcome: epsilon and its diagnostics.
#[derive(Clone, Debug)]
pub struct Calibration {
    pub epsilon: Complex64,
    /// max relative spread of epsilon over the monomials of S(u)
    pub spread: f64,
    /// largest Taylor coefficient of weight below g(g+1)/2, relative
    pub low_weight: f64,
}

/// sigma without epsilon: exp(u^t eta' omega'^{-1} u / 2) theta[delta]((2 omega')^{-1} u).
pub fn unnormalised_sigma(pd: &PeriodData, ch: &Characteristic) -> Result<ThetaForm, NumericError> {
    let winv = inverse(&pd.omega1)?;
    Ok(ThetaForm {
        c: Complex64::new(1.0, 0.0),
        q: matmul(&pd.eta1, &winv),
        a: mat_scale(&winv, Complex64::new(0.5, 0.0)),
        theta: Theta::new(pd.tau.clone(), ch.clone())?,
    })
}

/// epsilon from the Taylor coefficients of the theta side at u = 0, which
/// must reproduce S(u) in weight g(g+1)/2 and vanish below it.
pub fn epsilon_calibrate(pd: &PeriodData, ch: &Characteristic) -> Result<Calibration, NumericError> {
    let g = pd.g;
    let k = g * (g + 1) / 2;
    let f = unnormalised_sigma(pd, ch)?;
    let sp = JetSpace::new(g, k);
    let zero = vec![Complex64::new(0.0, 0.0); g];
    let jet = f.jet(&zero, &sp)?;
    let s = schur_u(g).map_err(|e| NumericError::Singular(e.to_string()))?;
    let mut eps = Vec::new();
    for (mono, coef) in s.terms() {
        let mut e = vec![0u8; g];
        for (name, p) in s.vars().iter().zip(mono.iter()) {
            let idx: usize = name[1..].parse().unwrap();
            e[(idx - 1) / 2] = *p as u8;
        }
        let fi = jet.c[sp.index_of(&e).ok_or(NumericError::Singular("monomial".into()))?];
        eps.push((fi.norm(), Complex64::new(coef.to_f64(), 0.0) / fi));
    }
    eps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let epsilon = eps[0].1;
    let spread = eps.iter().map(|(_, e)| (e - epsilon).norm() / epsilon.norm()).fold(0.0, f64::max);
    let lead = eps[0].0;
    let mut low: f64 = 0.0;
    for (i, ex) in sp.exps.iter().enumerate() {
        let wt: usize = ex.iter().enumerate().map(|(v, &p)| (2 * v + 1) * p as usize).sum();
        if wt < k {
            low = low.max(jet.c[i].norm() / lead);
        }
    }
    if spread > 1e-6 {
        return Err(NumericError::DirectionInconsistent(spread));
    }
    Ok(Calibration { epsilon, spread, low_weight: low })
}

/// The calibrated sigma function of the transformed curve.
#[derive(Clone, Debug)]
pub struct Sigma {
    pub form: ThetaForm,
    pub calibration: Calibration,
}

impl Sigma {
    pub fn new(pd: &PeriodData, ch: &Characteristic) -> Result<Self, NumericError> {
        let calibration = epsilon_calibrate(pd, ch)?;
        let mut form = unnormalised_sigma(pd, ch)?;
        form.c = calibration.epsilon;
        Ok(Sigma { form, calibration })
    }

    pub fn value(&self, u: &[Complex64]) -> Result<Complex64, NumericError> {
        self.form.value(u)
    }

    pub fn log_jet(&self, u: &[Complex64], order: usize) -> Result<Jet, NumericError> {
        self.form.log_jet(u, order)
    }

    /// wp_{2k-1,2l-1}(u) = -d_k d_l log sigma, 0-based k, l.
    pub fn wp(&self, u: &[Complex64]) -> Result<CMat, NumericError> {
        let g = u.len();
        let j = self.log_jet(u, 2)?;
        Ok((0..g).map(|k| (0..g).map(|l| -j.derivative(&[k, l])).collect()).collect())
    }

    /// The period lattice vector 2 omega' m1 + 2 omega'' m2.
    pub fn lattice_vector(pd: &PeriodData, m1: &[i64], m2: &[i64]) -> Vec<Complex64> {
        let f = |m: &[i64]| m.iter().map(|&k| Complex64::new(2.0 * k as f64, 0.0)).collect::<Vec<_>>();
        let a = matvec(&pd.omega1, &f(m1));
        let b = matvec(&pd.omega2, &f(m2));
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::NumericScalars;
    use crate::numerics::periods::{curve_periods, ExactStage, Precision};

    #[test]
    fn genus_one_constant_is_odd() {
        let c = CurveV::exact(1, &[1, 0, 0, 0, -1], 1).unwrap();
        let st = ExactStage::new(&c).unwrap();
        let pd = curve_periods(&st, &NumericScalars::new(&c), Precision::Double).unwrap();
        let rc = riemann_constant(&c, &pd, 7).unwrap();
        assert_eq!(rc.ch, Characteristic { d1: vec![0.5], d2: vec![0.5] });
        let s = Sigma::new(&pd, &rc.ch).unwrap();
        let u = [Complex64::new(1e-3, 2e-3)];
        let v = s.value(&u).unwrap();
        assert!((v / u[0] - 1.0).norm() < 1e-5);
    }

    #[test]
    fn genus_two_constant_and_calibration() {
        let c = CurveV::random_rational(2, 5);
        let st = ExactStage::new(&c).unwrap();
        let pd = curve_periods(&st, &NumericScalars::new(&c), Precision::Double).unwrap();
        let rc = riemann_constant(&c, &pd, 1).unwrap();
        assert!(rc.winner_residual() < 1e-8 && rc.best_loser_residual() > 1e-3);
        assert_eq!(riemann_constant(&c, &pd, 2).unwrap().ch, rc.ch);
        let cal = epsilon_calibrate(&pd, &rc.ch).unwrap();
        assert!(cal.spread < 1e-8 && cal.low_weight < 1e-8, "{cal:?}");
    }
}
