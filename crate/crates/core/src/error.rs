use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial division is not exact; remainder {remainder}")]
    NonDivisible { remainder: String },
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,
    #[error("not homogeneous: {offending}")]
    NotHomogeneous { offending: String },
    #[error("no weight assigned to variable {0}")]
    MissingWeight(String),
    #[error("cannot parse {0:?} as a rational")]
    Parse(String),
    #[error("variable {0} has no numeric binding")]
    UnboundVariable(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("genus must be positive")]
    ZeroGenus,
    #[error("expected {expected} coefficients nu_0..nu_(4g+4), got {got}")]
    WrongCoefficientCount { expected: usize, got: usize },
    #[error("leading coefficient nu_0 is zero")]
    Nu0Zero,
    #[error("N(x) has a multiple root")]
    MultipleRoots,
    #[error("branch point is not a root of N: N(a) = {0}")]
    NotABranchPoint(String),
    #[error("scaling pair violates s^(2g+1)/t^2 = N'(a)")]
    BadScaling,
    #[error("point maps to infinity (x = a)")]
    AtBasePoint,
    #[error("branch point index {index} out of range (N has {count} roots)")]
    BadRootIndex { index: usize, count: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BakerError {
    #[error("degenerate divisor: {0}")]
    DegenerateDivisor(String),
    #[error("F is not divisible by (e1-e2)^2 R(e1) R(e2): {0}")]
    NonDivisible(String),
    #[error("a Baker function has a pole at the divisor")]
    PoleAtDivisor,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OmegaError {
    #[error("closed form for n~[{i},{j}] disagrees with coefficient extraction")]
    ClosedFormMismatch { i: usize, j: usize },
    #[error("f_bar - f != (e1-e2)^2 sum n_ij e1^(i-1) e2^(j-1)")]
    ReconstructionFailure,
    #[error("scaling symbols survive simplification: {0}")]
    SimplificationFailure(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("S(T) still depends on an even-indexed variable: {0}")]
    EvenVariableSurvives(String),
    #[error("scaling symbols survive in the H series: {0}")]
    ScalingResidue(String),
    #[error("genus {0} is not supported by the exact series oracle")]
    UnsupportedGenus(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("roots of N are clustered (min gap {0:e})")]
    RootClustering(f64),
    #[error("homology basis is not symplectic (residual {0:e})")]
    SymplecticCheckFailed(f64),
    #[error("kappa periods disagree between the two routes (relative {0:e})")]
    CrossCheckFailed(f64),
    #[error("no half-characteristic vanishes on the theta divisor")]
    NoCharacteristicFound,
    #[error("{0} half-characteristics vanish on the theta divisor")]
    MultipleCharacteristicsFound(usize),
    #[error("theta tail bound unreachable: Im(tau) is too ill-conditioned")]
    TailBoundUnreachable,
    #[error("epsilon calibration is direction dependent (relative {0:e})")]
    DirectionInconsistent(f64),
    #[error("point lies on (or too close to) the theta divisor")]
    OnThetaDivisor,
    #[error("integration path runs into a branch point")]
    PathThroughBranchPoint,
    #[error("sheet of the end point is ambiguous (y close to 0)")]
    SheetAmbiguity,
    #[error("PDE constants undefined: {0}")]
    ConstantsUndefined(String),
    #[error("linear algebra failure: {0}")]
    Singular(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Baker(#[from] BakerError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(#[from] CurveError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
