pub mod algebra;
pub mod baker;
pub mod curve;
pub mod error;
pub mod harness;
pub mod hfunc;
pub mod numerics;
pub mod omega;
pub mod series;
