//! Generalized fractional calculus built on Bernstein functions: the
//! self-similar multiplicative-convolution operator, its Mittag-Leffler-type
//! eigenfunctions, Monte Carlo simulation of inverse self-similar Markov
//! processes, and spectral solvers for the associated Cauchy problem.
//!
//! Everything is cross-validated: series against Mellin-Barnes contours,
//! quadrature against closed-form power actions, samplers against analytic
//! moments, and spectral expansions against biorthogonality.

pub mod bernstein;
pub mod error;
pub mod gml;
pub mod hankel;
pub mod polys;
pub mod quad;
pub mod special;
pub mod spectral;
pub mod ssconv;
pub mod stoch;
pub mod verify;
pub mod wphi;

pub use bernstein::{BernsteinSpec, BoldPhi, Membership, SpecString};
pub use error::{Error, Result};
pub use gml::{EvalReport, GMLEvaluator, Method, PoleData};
pub use hankel::HankelDemo;
pub use spectral::{SmoothFn, SpectralModel};
pub use ssconv::{ConvOperator, DifferentiableFn};
pub use stoch::{McEstimate, McSummary, SimConfig};
pub use wphi::WEvaluator;

pub use num_complex::Complex64;
