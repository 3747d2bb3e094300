//! Numerical toolkit for singular minimal surfaces in `R³` and singular
//! maximal surfaces in Lorentz-Minkowski space `L³`.
//!
//! * [`algebra`]: metric-generic three-vector algebra and causal characters.
//! * [`surface`]: jets, fundamental forms, mean curvature, the
//!   singular-minimality residual, potential α-energy and its first variation.
//! * [`ruled`]: normalized ruled surfaces, their P/Q frames, the residual
//!   coefficient polynomials in the ruling parameter, and randomized
//!   non-existence sweeps.
//! * [`catenary`]: planar α-catenaries and the cylinders over them.
//! * [`variational`]: discrete α-energy of height fields and gradient descent.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod catenary;
pub mod curve;
pub mod ruled;
pub mod surface;
pub mod variational;

pub use algebra::{CausalCharacter, Metric, Vec3};
pub use surface::{Direction, Domain, Grid, Jet2, ParamSurface};
