//! Discrete measures on S^{n-1}, moment-matrix classification of surface area
//! measures, the Dudley distance, and discretization of smooth measures.

mod dudley;
mod measure;

pub use dudley::dudley;
pub use measure::{
    angle_between, classify, first_moment, moment_matrix, sym_eigen, ClassifyTol, DiscreteMeasure,
    MeasureClass, MomentMatrix,
};

use crate::bodies::{ellipsoid_polytope, Polytope};
use crate::error::Result;
use crate::harmonics::quadrature;

/// Smooth measures that can be replaced by an atomic stand-in.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothMeasure {
    /// r^{n-1} σ, the surface area measure of the ball of radius r
    Sphere { radius: f64 },
    /// surface area measure of an ellipsoid, through a fine inscribed polytope
    Ellipsoid { semi_axes: Vec<f64> },
}

/// Atomic measure matching the smooth one: for the sphere, quadrature nodes and
/// weights (moments exact up to `degree`); for the ellipsoid, the facet measure of
/// an inscribed polytope whose sample density grows with `degree`.
pub fn discretize(n: usize, spec: &SmoothMeasure, degree: usize) -> Result<DiscreteMeasure> {
    match spec {
        SmoothMeasure::Sphere { radius } => discretize_sphere(n, degree, *radius),
        SmoothMeasure::Ellipsoid { semi_axes } => {
            let level = (degree / 2).clamp(2, 5);
            let p: Polytope = ellipsoid_polytope(semi_axes, level)?;
            Ok(p.surface_area_measure())
        }
    }
}

pub fn discretize_sphere(n: usize, degree: usize, radius: f64) -> Result<DiscreteMeasure> {
    let rule = quadrature(n, degree)?;
    let scale = radius.powi(n as i32 - 1);
    Ok(DiscreteMeasure {
        n,
        atoms: rule.nodes,
        weights: rule.weights.into_iter().map(|w| w * scale).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_discretization() {
        let mu = discretize(3, &SmoothMeasure::Sphere { radius: 1.0 }, 4).unwrap();
        assert!((mu.mass() - 4.0 * PI).abs() < 1e-12);
        assert!(crate::sphere::norm(&first_moment(&mu)) < 1e-12);
        let m = moment_matrix(&mu).matrix;
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 4.0 * PI / 3.0 } else { 0.0 };
                assert!((m[(i, j)] - e).abs() < 1e-12);
            }
        }
        let d = discretize(2, &SmoothMeasure::Sphere { radius: 2.0 }, 6).unwrap();
        assert!((d.mass() - 4.0 * PI).abs() < 1e-12);
    }
}
