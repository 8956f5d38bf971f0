//! Verification suites and the JSON payloads of the command-line tool.

pub mod checks;
pub mod report;

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::algebra::Rational;
use crate::baker::{self, DivisorSpec};
use crate::curve::{CurveInput, CurveV, NumericScalars, ScaledModel, Symbols};
use crate::error::HarnessError;
use crate::hfunc::{HEvaluator, PdeKind};
use crate::numerics::periods::{curve_periods, ExactStage, PeriodData, Precision};
use crate::omega;
use crate::series;
use report::{cmat, complex, fingerprint, CheckRecord, Report};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebraic,
    Periods,
    HIdentities,
    Pde,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebraic => "algebraic",
            Suite::Periods => "periods",
            Suite::HIdentities => "h-identities",
            Suite::Pde => "pde",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "algebraic" => Suite::Algebraic,
            "periods" => Suite::Periods,
            "h-identities" => Suite::HIdentities,
            "pde" => Suite::Pde,
            "all" => Suite::All,
            _ => return Err(HarnessError::Config(format!("unknown suite {s:?}"))),
        })
    }
}

pub fn parse_precision(s: &str) -> Result<Precision, HarnessError> {
    match s {
        "double" => Ok(Precision::Double),
        "extended" => Ok(Precision::Extended),
        _ => Err(HarnessError::Config(format!("unknown precision {s:?}"))),
    }
}

/// Everything a verification run depends on.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suite: Suite,
    /// None: a random rational curve of `genus` derived from the seed
    pub curve: Option<CurveV>,
    pub scaling: Option<(Rational, Rational)>,
    pub genus: usize,
    /// also run the generic (symbolic) algebraic checks
    pub symbolic: bool,
    pub seed: u64,
    pub precision: Precision,
    /// per-check tolerance overrides, by check name
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn new(suite: Suite, genus: usize, seed: u64) -> Self {
        RunConfig {
            suite,
            curve: None,
            scaling: None,
            genus,
            symbolic: false,
            seed,
            precision: Precision::Double,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn with_input(mut self, input: CurveInput) -> Self {
        self.genus = input.curve.genus();
        self.curve = Some(input.curve);
        self.scaling = input.scaling;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(1..=3).contains(&self.genus) {
            return Err(HarnessError::Config(format!("genus {} is outside 1..=3", self.genus)));
        }
        if let Some(c) = &self.curve {
            if c.genus() != self.genus {
                return Err(HarnessError::Config(format!("curve has genus {}, requested {}", c.genus(), self.genus)));
            }
        }
        if let Some((s, t)) = &self.scaling {
            if s.is_zero() || t.is_zero() {
                return Err(HarnessError::Config("scaling constants must be non-zero".into()));
            }
        }
        for (k, &v) in &self.tolerances {
            if !(v.is_finite() && v > 0.0) {
                return Err(HarnessError::Config(format!("tolerance for {k} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn resolved_curve(&self) -> CurveV {
        self.curve.clone().unwrap_or_else(|| CurveV::random_rational(self.genus, self.seed))
    }

    fn scalars(&self, curve: &CurveV) -> NumericScalars {
        match &self.scaling {
            Some((s, t)) => NumericScalars::with_scaling(curve, c(s.to_f64()), c(t.to_f64())),
            None => NumericScalars::new(curve),
        }
    }

    fn symbols(&self, curve: &CurveV) -> Result<Symbols, HarnessError> {
        Ok(match &self.scaling {
            Some((s, t)) => Symbols::concrete_with_scaling(curve, s, t)?,
            None => Symbols::concrete(curve, None)?,
        })
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A generator per section so adding checks in one does not move another.
fn rng_for(seed: u64, section: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ section)
}

/// Run the requested suite and collect the records.
pub fn run_suite(cfg: &RunConfig) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let curve = cfg.resolved_curve();
    let g = curve.genus();
    let mut checks = Vec::new();

    if cfg.suite.includes(Suite::Algebraic) {
        if g == 1 {
            checks.extend(checks::genus_one_anchors());
            checks.extend(checks::h_series_exact(20));
        }
        // an irrational branch point leaves only the generic identities
        let exact_a = curve.a_exact().is_some();
        if cfg.symbolic || !exact_a {
            let sym = Symbols::generic(g);
            let mut generic = checks::baker_symbolic(&sym);
            generic.extend(checks::master_identity(sym.clone()));
            generic.extend(checks::pullback_exact(sym));
            for r in generic.iter_mut() {
                r.name = format!("generic_{}", r.name);
            }
            checks.extend(generic);
        }
        if exact_a {
            let sym = cfg.symbols(&curve)?;
            checks.extend(checks::master_identity(sym.clone()));
            checks.extend(checks::pullback_exact(sym.clone()));
            checks.extend(checks::baker_symbolic(&sym));
            checks.push(checks::baker_concrete(&curve, 200, &mut rng_for(cfg.seed, 1)));
        }
        checks.extend(checks::series_exact(g));
    }

    let numeric = cfg.suite.includes(Suite::Periods) || cfg.suite.includes(Suite::HIdentities) || cfg.suite.includes(Suite::Pde);
    if numeric {
        let built = ExactStage::new(&curve).map(Arc::new).and_then(|st| {
            let num = cfg.scalars(&curve);
            HEvaluator::new(st, &num, cfg.precision, cfg.seed).map(|h| (h, num))
        });
        match built {
            Err(e) => checks.push(CheckRecord::errored(format!("numeric_setup_g{g}"), checks::REF_SIGMA, 0.0, e)),
            Ok((h, _num)) => {
                if cfg.suite.includes(Suite::Periods) {
                    checks.extend(checks::period_checks(&h.pd));
                    checks.extend(checks::riemann_checks(&h));
                    checks.push(checks::theta_fd(&h, &mut rng_for(cfg.seed, 2)));
                    if g == 1 {
                        checks.extend(checks::sigma_oracle(&h));
                        checks.push(checks::weierstrass(&h, &mut rng_for(cfg.seed, 3)));
                    }
                }
                if cfg.suite.includes(Suite::HIdentities) {
                    checks.push(checks::end_to_end(&h, 25, &mut rng_for(cfg.seed, 4)));
                    checks.extend(checks::h_value_checks(&h, 20, &mut rng_for(cfg.seed, 5)));
                    checks.push(checks::quasi_periodicity(&h, &mut rng_for(cfg.seed, 6)));
                    checks.push(checks::p_wp(&h, 10, &mut rng_for(cfg.seed, 7)));
                    checks.extend(checks::periodicity(&h, 5, &mut rng_for(cfg.seed, 8)));
                    checks.push(checks::log_h_fd(&h, 3, &mut rng_for(cfg.seed, 9)));
                    checks.extend(checks::scaling_independence(&h, cfg.precision, cfg.seed, 5, &mut rng_for(cfg.seed, 10)));
                }
                if cfg.suite.includes(Suite::Pde) {
                    let mut kinds = vec![PdeKind::KdV];
                    if g >= 3 {
                        kinds.push(PdeKind::KpSigma);
                        kinds.push(PdeKind::KpH);
                    }
                    checks.extend(checks::pde_checks(&h, &kinds, &mut rng_for(cfg.seed, 11)));
                }
            }
        }
    }

    for r in checks.iter_mut() {
        if let Some(&t) = cfg.tolerances.get(&r.name) {
            r.retolerance(t);
        }
    }
    Ok(Report {
        version: VERSION.into(),
        fingerprint: Some(fingerprint(&curve.canonical_json())),
        suite: cfg.suite.name().into(),
        seed: cfg.seed,
        checks,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

fn strings<T: ToString>(m: &[Vec<T>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|x| Value::String(x.to_string())).collect())).collect())
}

fn header(kind: &str, curve: Option<&CurveV>, g: usize) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!(kind));
    m.insert("version".into(), json!(VERSION));
    m.insert("genus".into(), json!(g));
    m.insert("fingerprint".into(), curve.map(|c| json!(fingerprint(&c.canonical_json()))).unwrap_or(Value::Null));
    m
}

/// Exact symbols for a curve (or generic ones).
pub fn symbols_for(curve: Option<&CurveInput>, g: usize) -> Result<Symbols, HarnessError> {
    Ok(match curve {
        None => Symbols::generic(g),
        Some(CurveInput { curve, scaling: Some((s, t)) }) => Symbols::concrete_with_scaling(curve, s, t)?,
        Some(CurveInput { curve, scaling: None }) => Symbols::concrete(curve, None)?,
    })
}

/// The Baker matrix P_{2g+2-2i, 2g+2-2j} for a symbolic divisor.
pub fn baker_json(curve: Option<&CurveInput>, g: usize) -> Result<Value, HarnessError> {
    let sym = symbols_for(curve, g)?;
    let bm = baker::baker_matrix(&sym, &DivisorSpec::Symbolic).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut m = header("baker", curve.map(|c| &c.curve), sym.g);
    m.insert("p".into(), strings(&bm.entries));
    m.insert("symmetric".into(), json!(bm.is_symmetric()));
    Ok(Value::Object(m))
}

/// Divisor read from a points file.
#[derive(Clone, Debug)]
pub enum PointsInput {
    /// exact x-coordinates; y stays symbolic
    Exact(Vec<Rational>),
    /// numeric points (x, y) with y^2 = N(x)
    Numeric(Vec<(Complex64, Complex64)>),
}

fn json_complex(v: &Value, what: &str) -> Result<Complex64, HarnessError> {
    let part = |x: &Value| -> Result<f64, HarnessError> {
        match x {
            Value::Number(n) => n.as_f64().ok_or_else(|| HarnessError::Parse(format!("{what}: bad number"))),
            Value::String(s) => s
                .parse::<Rational>()
                .map(|q| q.to_f64())
                .map_err(|_| HarnessError::Parse(format!("{what}: cannot parse {s:?}"))),
            _ => Err(HarnessError::Parse(format!("{what}: expected a number"))),
        }
    };
    match v {
        Value::Array(p) if p.len() == 2 => Ok(Complex64::new(part(&p[0])?, part(&p[1])?)),
        other => Ok(c(part(other)?)),
    }
}

/// `{"points": [x, ...]}` with rational x, or `{"points": [{"x": .., "y": ..}, ...]}`
/// with complex numbers written as [re, im].
pub fn parse_points_json(text: &str) -> Result<PointsInput, HarnessError> {
    let v: Value = serde_json::from_str(text).map_err(|e| HarnessError::Parse(format!("points: {e}")))?;
    let pts = v
        .get("points")
        .and_then(|p| p.as_array())
        .ok_or_else(|| HarnessError::Parse("missing \"points\" array".into()))?;
    if pts.iter().all(|p| p.is_object()) {
        let mut out = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            let get = |k: &str| p.get(k).ok_or_else(|| HarnessError::Parse(format!("points[{i}] needs \"{k}\"")));
            out.push((json_complex(get("x")?, "x")?, json_complex(get("y")?, "y")?));
        }
        return Ok(PointsInput::Numeric(out));
    }
    let xs = pts
        .iter()
        .enumerate()
        .map(|(i, p)| match p {
            Value::String(s) => s.parse::<Rational>().map_err(|_| HarnessError::Parse(format!("points[{i}]: cannot parse {s:?}"))),
            Value::Number(n) => n
                .to_string()
                .parse::<Rational>()
                .map_err(|_| HarnessError::Parse(format!("points[{i}]: cannot parse {n}"))),
            _ => Err(HarnessError::Parse(format!("points[{i}]: expected a rational or an object"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PointsInput::Exact(xs))
}

/// The Baker matrix at a concrete divisor: exact in y for rational x,
/// numeric values for numeric points.
pub fn baker_points_json(curve: &CurveInput, points: &PointsInput) -> Result<Value, HarnessError> {
    let sym = symbols_for(Some(curve), 0)?;
    let g = sym.g;
    let mut m = header("baker", Some(&curve.curve), g);
    match points {
        PointsInput::Exact(xs) => {
            let bm = baker::baker_matrix(&sym, &DivisorSpec::Concrete(xs.clone())).map_err(|e| HarnessError::Config(e.to_string()))?;
            m.insert("points".into(), Value::Array(xs.iter().map(report::rational).collect()));
            m.insert("p".into(), strings(&bm.entries));
            m.insert("symmetric".into(), json!(bm.is_symmetric()));
        }
        PointsInput::Numeric(pts) => {
            let n = curve.curve.n_c64();
            for (i, &(x, y)) in pts.iter().enumerate() {
                let nx = n.iter().rev().fold(c(0.0), |acc, k| acc * x + k);
                if (y * y - nx).norm() > 1e-8 * (1.0 + nx.norm()) {
                    return Err(HarnessError::Config(format!("point {i} is not on the curve")));
                }
            }
            let bm = baker::baker_matrix(&sym, &DivisorSpec::Symbolic).map_err(|e| HarnessError::Config(e.to_string()))?;
            let vals = bm.evaluate(pts, None).map_err(|e| HarnessError::Config(e.to_string()))?;
            m.insert("points".into(), Value::Array(pts.iter().map(|&(x, y)| json!({"x": complex(x), "y": complex(y)})).collect()));
            m.insert("p_values".into(), cmat(&vals));
        }
    }
    Ok(Value::Object(m))
}

/// Omega, chi and the numerators of the kappa forms.
pub fn omega_json(curve: Option<&CurveInput>, g: usize) -> Result<Value, HarnessError> {
    let sym = symbols_for(curve, g)?;
    let model = ScaledModel::new(sym);
    let d = omega::compute(&model).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut m = header("omega", curve.map(|c| &c.curve), model.genus());
    m.insert("omega".into(), strings(&d.omega));
    m.insert("chi".into(), json!(d.chi.to_string()));
    m.insert("kappa_numerators".into(), Value::Array(d.kappa_numer.iter().map(|k| json!(k.to_string())).collect()));
    m.insert("d".into(), strings(&model.d));
    m.insert("lambda".into(), Value::Array(model.lambda.iter().map(|l| json!(l.to_string())).collect()));
    Ok(Value::Object(m))
}

/// The genus-1 expansion of H in v_2 up to `order`.
pub fn expand_json(curve: Option<&CurveInput>, order: usize) -> Result<Value, HarnessError> {
    let sym = symbols_for(curve, 1)?;
    if sym.g != 1 {
        return Err(HarnessError::Config(format!("expand is available for genus 1 only, got genus {}", sym.g)));
    }
    let model = ScaledModel::new(sym);
    let d = omega::compute(&model).map_err(|e| HarnessError::Config(e.to_string()))?;
    let h = series::h_series_genus1(&model, &d, order).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut m = header("expand", curve.map(|c| &c.curve), 1);
    m.insert("order".into(), json!(order));
    m.insert("variable".into(), json!(h.var));
    m.insert("coefficients".into(), Value::Array(h.coeffs.iter().map(|q| json!(q.to_string())).collect()));
    Ok(Value::Object(m))
}

/// Period matrices for one curve and scaling.
pub fn periods_json(curve: &CurveInput, precision: Precision) -> Result<Value, HarnessError> {
    let st = ExactStage::new(&curve.curve).map_err(|e| HarnessError::Config(e.to_string()))?;
    let num = match &curve.scaling {
        Some((s, t)) => NumericScalars::with_scaling(&curve.curve, c(s.to_f64()), c(t.to_f64())),
        None => NumericScalars::new(&curve.curve),
    };
    let pd = curve_periods(&st, &num, precision).map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(period_object(&curve.curve, &pd))
}

fn period_object(curve: &CurveV, pd: &PeriodData) -> Value {
    let mut m = header("periods", Some(curve), pd.g);
    for (k, v) in [
        ("mu1", &pd.mu1),
        ("mu2", &pd.mu2),
        ("omega1", &pd.omega1),
        ("omega2", &pd.omega2),
        ("eta1", &pd.eta1),
        ("eta2", &pd.eta2),
        ("kappa1", &pd.kappa1),
        ("kappa2", &pd.kappa2),
        ("tau", &pd.tau),
    ] {
        m.insert(k.into(), cmat(v));
    }
    m.insert("w".into(), complex(pd.scalars.w));
    m.insert("basis".into(), json!(pd.basis));
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Algebraic, Suite::Periods, Suite::HIdentities, Suite::Pde, Suite::All] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn bad_tolerance_is_config_error() {
        let mut cfg = RunConfig::new(Suite::Algebraic, 1, 0);
        cfg.tolerances.insert("x".into(), -1.0);
        assert!(matches!(run_suite(&cfg), Err(HarnessError::Config(_))));
        cfg.tolerances.insert("x".into(), f64::NAN);
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn algebraic_suite_genus_one() {
        let mut cfg = RunConfig::new(Suite::Algebraic, 1, 3);
        cfg.symbolic = true;
        let r = run_suite(&cfg).unwrap();
        for c in &r.checks {
            assert!(c.pass, "{}", c.line());
        }
    }
}
