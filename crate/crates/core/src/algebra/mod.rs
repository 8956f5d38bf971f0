//! Exact arithmetic over Q: rationals, sparse multivariate polynomials,
//! rational functions, and weight bookkeeping.

pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod weight;

pub use poly::{int, rat, var, MultiPoly};
pub use ratfunc::{substitute, substitute_rat, RatFunc};
pub use rational::Rational;
pub use weight::WeightTable;
