//! Fox H-function calculus for anomalous diffusion channels.
//!
//! The crate covers the parameter-sequence algebra, numerical evaluation of
//! H-functions, H-distributed random variables, subordinated diffusion
//! processes, the first-passage "H-noise" they induce, timing-modulation
//! error bounds, and a Monte Carlo engine used to check all of it.

pub mod diffusion;
pub mod gamma;
pub mod hfunc;
pub mod hvariate;
pub mod link;
pub mod montecarlo;
pub mod noise;
pub mod params;
pub mod quad;

pub use hfunc::{EvalConfig, EvalError};
pub use params::{HSeq, OrderSeq, ParamError, ParamSeq};
