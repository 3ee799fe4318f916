//! Numerical laboratory for conformal geometry of radially symmetric
//! warped-product ends of negative curvature type.
//!
//! The crate is organised around a single scalar abstraction ([`Scalar`],
//! any `num_traits` float) and a handful of subsystems:
//!
//! * [`geometry`]: multiply warped products `dr^2 + sum_i p_i^2(r) h_i`,
//!   their scalar curvature, radial volume measures and locally hyperbolic
//!   reference ends, plus a decay checker for asymptotically locally
//!   hyperbolic metrics.
//! * [`conformal`]: the conformal Laplacian on radial functions,
//!   Keller-Osserman classification of conformally hyperbolic warpings,
//!   hyperbolic chart construction and finite-volume normal forms.
//! * [`yamabe_radial`]: the blow-up boundary value problem
//!   `-c_n (u'' + d u') - n(n-1) u + n(n-1) u^{(n+2)/(n-2)} = 0` on an
//!   annulus, solved through the regularising substitution
//!   `v = u^{-2/(n-2)}`, together with the transport identities relating
//!   annuli of different widths and the decaying limit profile.
//! * [`barriers`]: piecewise exponential sub- and super-solutions with
//!   certified one-sided differential inequalities.
//! * [`eigen`]: Rayleigh quotients, a certified Sturm-Liouville
//!   eigensolver, sup-norm minimisers on collars, volume-ratio
//!   negativity certificates and the sharpness experiment.
//!
//! All solvers are deterministic: identical inputs produce identical
//! outputs bit for bit. Tolerances are explicit arguments or documented
//! defaults, never hidden state.

pub mod barriers;
pub mod conformal;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod interp;
pub mod num;
pub mod ode;
pub mod profile;
pub mod quad;
pub mod report;
pub mod yamabe_radial;

pub use error::{Error, Result};
pub use num::{Dimension, Scalar};

/// Concrete `f64` instantiations of the core types.
pub type ProfileF64 = profile::RadialProfile<f64>;
pub type ExprF64 = expr::Expr<f64>;
pub type FibreF64 = geometry::FibreSpec<f64>;
pub type WarpedProductF64 = geometry::WarpedProductSpec<f64>;
pub type ReferenceF64 = geometry::ReferenceHyperbolic<f64>;
pub type ConformalFactorF64 = conformal::ConformalFactor<f64>;
pub type ClassificationF64 = conformal::ClassificationResult<f64>;
pub type AnnulusBvpF64 = yamabe_radial::AnnulusBvp<f64>;
pub type BlowupSolutionF64 = yamabe_radial::BlowupSolution<f64>;
pub type SubSolutionF64 = barriers::SubSolutionSpec<f64>;
pub type SuperSolutionF64 = barriers::SuperSolutionSpec<f64>;
pub type RadialDomainF64 = eigen::RadialDomain<f64>;
pub type EigenReportF64 = eigen::EigenReport<f64>;
pub type CertificateF64 = eigen::Certificate<f64>;
