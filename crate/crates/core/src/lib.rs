//! Numerical laboratory for polynomial approximation in weighted Bergman spaces
//! `H^2(Omega, e^{-phi})`: domains, subharmonic weights, singular quadrature,
//! least-squares projections and a few explicit bound checks.

pub mod bergman;
pub mod certs;
pub mod error;
pub mod gauss;
pub mod geometry;
pub mod moon;
pub mod poly;
pub mod quad;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{Circle, Constraint, Domain, Shape};
pub use poly::Polynomial;
pub use quad::{integrate, inner_product, weighted_norm_sq, Integral, QuadSettings, SingularPoint};
pub use weights::Weight;
