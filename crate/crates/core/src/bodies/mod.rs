//! Convex bodies in R² and R³: polytopes from halfspaces or points, reference
//! bodies, surface area measures, support functions, Hausdorff distances and
//! the inclusion radii determined by Φ².

mod distance;
mod hull;
mod off;
mod polytope;

pub use distance::{
    hausdorff, sphere_sup, translative_hausdorff, translative_hausdorff_with_shift, Ball,
    Ellipsoid, SupportFunction, Translated, GRID_LEVEL,
};
pub use hull::{convex_hull, hull_2d, hull_polytope, polygon_from_vertices, HullResult};
pub use off::{read_off, write_off};
pub use polytope::{halfspace_intersection, Facet, Polytope, Ridge};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{discretize_sphere, DiscreteMeasure};
use crate::sphere::{check_dim, icosphere, omega};
use crate::tensors::SymTensor;

/// Declarative description of a body (the JSON input format).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        n: usize,
        radius: f64,
    },
    Ellipsoid {
        semi_axes: Vec<f64>,
    },
    /// H-representation (`normals` + `supports`) or V-representation (`vertices`)
    Polytope {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normals: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        supports: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Vec<f64>>>,
    },
    RegularPolygon {
        m: usize,
    },
    Pyramid {
        base_side: f64,
        height: f64,
    },
}

impl BodySpec {
    /// Square pyramid with unit base and unit height.
    pub fn pyramid() -> Self {
        BodySpec::Pyramid {
            base_side: 1.0,
            height: 1.0,
        }
    }

    /// Ellipsoid with semi-axes (1, 1, 2), elongated along the third axis.
    pub fn ellipsoid() -> Self {
        BodySpec::Ellipsoid {
            semi_axes: vec![1.0, 1.0, 2.0],
        }
    }

    pub fn cube(side: f64) -> Self {
        let mut normals = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; 3];
                e[i] = s;
                normals.push(e);
            }
        }
        BodySpec::Polytope {
            n: 3,
            normals: Some(normals),
            supports: Some(vec![side / 2.0; 6]),
            vertices: None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::Ball { n, .. } | BodySpec::Polytope { n, .. } => *n,
            BodySpec::Ellipsoid { semi_axes } => semi_axes.len(),
            BodySpec::RegularPolygon { .. } => 2,
            BodySpec::Pyramid { .. } => 3,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: BodySpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim())?;
        let positive = |x: f64, what: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{what} must be positive")))
            }
        };
        match self {
            BodySpec::Ball { radius, .. } => positive(*radius, "radius"),
            BodySpec::Ellipsoid { semi_axes } => {
                semi_axes.iter().try_for_each(|a| positive(*a, "semi-axis"))
            }
            BodySpec::RegularPolygon { m } => {
                if *m >= 3 {
                    Ok(())
                } else {
                    Err(Error::InvalidInput("a regular polygon needs m >= 3".into()))
                }
            }
            BodySpec::Pyramid { base_side, height } => {
                positive(*base_side, "base_side")?;
                positive(*height, "height")
            }
            BodySpec::Polytope {
                normals,
                supports,
                vertices,
                ..
            } => match (normals, supports, vertices) {
                (Some(_), Some(_), None) | (None, None, Some(_)) => Ok(()),
                _ => Err(Error::InvalidInput(
                    "polytope needs either normals + supports or vertices".into(),
                )),
            },
        }
    }
}

/// A constructed body.
#[derive(Debug, Clone)]
pub enum Body {
    Polytope(Polytope),
    Ball(Ball),
    /// smooth ellipsoid with the inscribed polytope used for its measure
    Ellipsoid {
        exact: Ellipsoid,
        approx: Polytope,
    },
    /// lower-dimensional convex set spanned by `points`
    Flat {
        n: usize,
        normal: Vec<f64>,
        area: f64,
        points: Vec<Vec<f64>>,
    },
}

impl SupportFunction for Body {
    fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.n,
            Body::Ball(b) => b.dim(),
            Body::Ellipsoid { exact, .. } => exact.dim(),
            Body::Flat { n, .. } => *n,
        }
    }
    fn support(&self, u: &[f64]) -> f64 {
        match self {
            Body::Polytope(p) => p.support(u),
            Body::Ball(b) => b.support(u),
            Body::Ellipsoid { exact, .. } => exact.support(u),
            Body::Flat { points, .. } => points
                .iter()
                .map(|p| crate::sphere::dot(p, u))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl Body {
    pub fn diameter(&self) -> f64 {
        match self {
            Body::Polytope(p) => p.diameter(),
            Body::Ball(b) => 2.0 * b.radius,
            Body::Ellipsoid { exact, .. } => {
                2.0 * exact.semi_axes.iter().cloned().fold(0.0, f64::max)
            }
            Body::Flat { points, .. } => {
                let mut d: f64 = 0.0;
                for a in points {
                    for b in points {
                        d = d.max(crate::sphere::norm(&crate::sphere::sub(a, b)));
                    }
                }
                d
            }
        }
    }

    /// The surface area measure (exact atoms for polytopes and flat bodies,
    /// quadrature atoms for the ball, inscribed-polytope facets for the ellipsoid).
    pub fn surface_area_measure(&self, resolution: usize) -> Result<DiscreteMeasure> {
        Ok(match self {
            Body::Polytope(p) | Body::Ellipsoid { approx: p, .. } => p.surface_area_measure(),
            Body::Ball(b) => discretize_sphere(b.dim(), ball_degree(resolution), b.radius)?,
            Body::Flat {
                n, normal, area, ..
            } => DiscreteMeasure {
                n: *n,
                atoms: vec![normal.clone(), normal.iter().map(|x| -x).collect()],
                weights: vec![*area, *area],
            },
        })
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Body::Polytope(p) => Some(p),
            Body::Ellipsoid { approx, .. } => Some(approx),
            _ => None,
        }
    }
}

/// Default resolution: icosphere level 4 for ellipsoids.
pub const DEFAULT_RESOLUTION: usize = 4;

fn ball_degree(resolution: usize) -> usize {
    4 * resolution + 4
}

/// Inscribed polytope of an axis-aligned ellipsoid: images of icosphere
/// vertices (n = 3, level `level`) or of 32·2^level equispaced angles (n = 2).
pub fn ellipsoid_polytope(semi_axes: &[f64], level: usize) -> Result<Polytope> {
    let n = semi_axes.len();
    check_dim(n)?;
    let points: Vec<Vec<f64>> = match n {
        2 => {
            let k = 32usize << level;
            (0..k)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / k as f64;
                    vec![semi_axes[0] * t.cos(), semi_axes[1] * t.sin()]
                })
                .collect()
        }
        _ => icosphere(level)
            .0
            .iter()
            .map(|v| (0..3).map(|d| semi_axes[d] * v[d]).collect())
            .collect(),
    };
    hull_polytope(n, &points)
}

/// Regular m-gon with outer normals at angles 2πj/m and all edges of length 2π/m.
pub fn regular_polygon(m: usize) -> Result<Polytope> {
    if m < 3 {
        return Err(Error::InvalidInput("a regular polygon needs m >= 3".into()));
    }
    let t = PI / m as f64;
    let inradius = t / t.tan();
    let normals: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / m as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    halfspace_intersection(&normals, &vec![inradius; m])
}

pub fn pyramid(base_side: f64, height: f64) -> Result<Polytope> {
    let b = base_side / 2.0;
    let pts = vec![
        vec![-b, -b, 0.0],
        vec![b, -b, 0.0],
        vec![b, b, 0.0],
        vec![-b, b, 0.0],
        vec![0.0, 0.0, height],
    ];
    hull_polytope(3, &pts)
}

/// Deterministic construction of the body described by `spec`.
pub fn reference_body(spec: &BodySpec, resolution: usize) -> Result<Body> {
    spec.validate()?;
    Ok(match spec {
        BodySpec::Ball { n, radius } => Body::Ball(Ball {
            center: vec![0.0; *n],
            radius: *radius,
        }),
        BodySpec::Ellipsoid { semi_axes } => Body::Ellipsoid {
            exact: Ellipsoid {
                semi_axes: semi_axes.clone(),
            },
            approx: ellipsoid_polytope(semi_axes, resolution)?,
        },
        BodySpec::RegularPolygon { m } => Body::Polytope(regular_polygon(*m)?),
        BodySpec::Pyramid { base_side, height } => Body::Polytope(pyramid(*base_side, *height)?),
        BodySpec::Polytope {
            n,
            normals: Some(u),
            supports: Some(h),
            ..
        } => {
            if u.iter().any(|v| v.len() != *n) {
                return Err(Error::InvalidInput("normal of wrong dimension".into()));
            }
            Body::Polytope(halfspace_intersection(u, h)?)
        }
        BodySpec::Polytope {
            n,
            vertices: Some(v),
            ..
        } => match convex_hull(*n, v)? {
            HullResult::Full(p) => Body::Polytope(p),
            HullResult::Flat { normal, area } => Body::Flat {
                n: *n,
                normal,
                area,
                points: v.clone(),
            },
            HullResult::Degenerate => {
                return Err(Error::InvalidInput(
                    "vertex set spans no (n-1)-dimensional flat".into(),
                ))
            }
        },
        BodySpec::Polytope { .. } => unreachable!("validated above"),
    })
}

pub fn surface_area_measure(spec: &BodySpec, resolution: usize) -> Result<DiscreteMeasure> {
    reference_body(spec, resolution)?.surface_area_measure(resolution)
}

/// Radii r ≤ R with rBⁿ ⊆ K − c ⊆ RBⁿ for the centroid c of K, computed from
/// Φ² and the surface area S alone:
/// R = S / (4π λ_min) · (S/ω_n)^{1/(n−1)}, r = 2π λ_min / ((n+1)(4R)^{n−2}).
pub fn inclusion_radii(phi2: &SymTensor, surface_area: f64) -> Result<(f64, f64)> {
    let n = phi2.n;
    check_dim(n)?;
    let (vals, _) = crate::measures::sym_eigen(&phi2.matrix()?);
    let lmin = vals[0];
    if !(lmin > 0.0) || !(surface_area > 0.0) {
        return Err(Error::NotFullDimensional);
    }
    let nf = n as f64;
    let big_r = surface_area / (4.0 * PI * lmin) * (surface_area / omega(n)).powf(1.0 / (nf - 1.0));
    let r = 2.0 * PI * lmin / ((nf + 1.0) * (4.0 * big_r).powi(n as i32 - 2));
    Ok((r, big_r))
}
