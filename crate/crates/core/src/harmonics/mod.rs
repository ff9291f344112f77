//! Spherical harmonics on S¹ and S², Gegenbauer polynomials, product
//! quadrature rules on the sphere, and the sphere-convolution projection Π_k.

mod basis;
mod gegenbauer;
mod projection;
mod quadrature;

pub use basis::{basis_dim, eval_harmonic, total_dim, HarmonicBasis};
pub use gegenbauer::{gegenbauer, gegenbauer_all, gegenbauer_norm_sq};
pub use projection::{
    project, project_at, project_via_harmonics, projection_constants, ProjectionConstants,
};
pub use quadrature::{gauss_legendre, quadrature, QuadratureRule};
