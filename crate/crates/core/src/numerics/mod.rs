//! Numerical layer: roots, quadrature on the curve, periods, theta
//! functions, the Abel–Jacobi map and the sigma function.

pub mod abel;
pub mod jet;
pub mod periods;
pub mod quad;
pub mod roots;
pub mod sigma;
pub mod theta;
