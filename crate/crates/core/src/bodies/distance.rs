//! Support functions and (translative) Hausdorff distances.
//!
//! δ(K, L) = sup_u |h_K(u) − h_L(u)| is evaluated on a direction grid
//! (icosphere vertices for n = 3, equispaced angles for n = 2) and then refined
//! by a shrinking pattern search around the best grid directions. The result
//! is a lower bound of the true supremum that is accurate to well below the
//! grid spacing for piecewise-smooth support functions.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::sphere::{direction_grid, dot, normalize, tangent_basis};

use super::polytope::Polytope;

pub trait SupportFunction {
    fn dim(&self) -> usize;
    fn support(&self, u: &[f64]) -> f64;
}

impl SupportFunction for Polytope {
    fn dim(&self) -> usize {
        self.n
    }
    fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl SupportFunction for Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn support(&self, u: &[f64]) -> f64 {
        dot(&self.center, u) + self.radius
    }
}

/// Axis-aligned ellipsoid Σ (x_i/a_i)² ≤ 1, h(u) = √(Σ a_i² u_i²).
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub semi_axes: Vec<f64>,
}

impl SupportFunction for Ellipsoid {
    fn dim(&self) -> usize {
        self.semi_axes.len()
    }
    fn support(&self, u: &[f64]) -> f64 {
        self.semi_axes
            .iter()
            .zip(u)
            .map(|(a, x)| a * a * x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// A body translated by `shift`.
pub struct Translated<'a, K: SupportFunction + ?Sized> {
    pub body: &'a K,
    pub shift: Vec<f64>,
}

impl<K: SupportFunction + ?Sized> SupportFunction for Translated<'_, K> {
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn support(&self, u: &[f64]) -> f64 {
        self.body.support(u) + dot(&self.shift, u)
    }
}

pub const GRID_LEVEL: usize = 3;
const REFINE_STARTS: usize = 6;
const REFINE_ROUNDS: usize = 30;

fn grid_spacing(n: usize, level: usize) -> f64 {
    match n {
        2 => 2.0 * std::f64::consts::PI / (90usize << level) as f64,
        _ => 1.1 / (1usize << level) as f64,
    }
}

/// sup_u f(u) over the sphere: grid evaluation followed by local refinement.
/// Returns the value and the maximizing direction.
pub fn sphere_sup<F: Fn(&[f64]) -> f64>(n: usize, level: usize, f: F) -> (f64, Vec<f64>) {
    let grid = direction_grid(n, level);
    let mut vals: Vec<(f64, usize)> = grid.iter().enumerate().map(|(i, u)| (f(u), i)).collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = (vals[0].0, grid[vals[0].1].clone());
    for &(v0, i) in vals.iter().take(REFINE_STARTS) {
        let (v, u) = refine(n, &f, grid[i].clone(), v0, grid_spacing(n, level));
        if v > best.0 {
            best = (v, u);
        }
    }
    best
}

fn refine<F: Fn(&[f64]) -> f64>(
    n: usize,
    f: &F,
    mut u: Vec<f64>,
    mut val: f64,
    mut step: f64,
) -> (f64, Vec<f64>) {
    for _ in 0..REFINE_ROUNDS {
        let mut improved = false;
        let candidates: Vec<Vec<f64>> = if n == 2 {
            let t = [-u[1], u[0]];
            [-1.0, 1.0]
                .iter()
                .map(|s| normalize(&[u[0] + s * step * t[0], u[1] + s * step * t[1]]))
                .collect()
        } else {
            let (e1, e2) = tangent_basis(&u);
            (0..8)
                .map(|k| {
                    let a = std::f64::consts::PI * k as f64 / 4.0;
                    let (c, s) = (a.cos() * step, a.sin() * step);
                    normalize(&[
                        u[0] + c * e1[0] + s * e2[0],
                        u[1] + c * e1[1] + s * e2[1],
                        u[2] + c * e1[2] + s * e2[2],
                    ])
                })
                .collect()
        };
        for c in candidates {
            let v = f(&c);
            if v > val {
                val = v;
                u = c;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
        if step < 1e-9 {
            break;
        }
    }
    (val, u)
}

fn check_dims(k: &dyn SupportFunction, l: &dyn SupportFunction) -> Result<usize> {
    if k.dim() != l.dim() {
        return Err(Error::Precondition(
            "bodies live in different dimensions".into(),
        ));
    }
    crate::sphere::check_dim(k.dim())?;
    Ok(k.dim())
}

/// Hausdorff distance sup_u |h_K(u) − h_L(u)|.
pub fn hausdorff(k: &dyn SupportFunction, l: &dyn SupportFunction) -> Result<f64> {
    let n = check_dims(k, l)?;
    Ok(sphere_sup(n, GRID_LEVEL, |u| (k.support(u) - l.support(u)).abs()).0)
}

/// Translative Hausdorff distance inf_x δ(K, L + x), with the minimizing shift.
///
/// The inner minimax over the grid is an LP in (x, t):
/// min t s.t. |h_K(u_d) − h_L(u_d) − ⟨x, u_d⟩| ≤ t. Directions where the
/// refined supremum exceeds the LP value are added and the LP re-solved; the
/// reported distance is the refined supremum at the final shift.
pub fn translative_hausdorff_with_shift(
    k: &dyn SupportFunction,
    l: &dyn SupportFunction,
) -> Result<(f64, Vec<f64>)> {
    let n = check_dims(k, l)?;
    let mut dirs = direction_grid(n, GRID_LEVEL);
    let mut diffs: Vec<f64> = dirs.iter().map(|u| k.support(u) - l.support(u)).collect();
    let mut x = vec![0.0; n];
    let mut dist = f64::INFINITY;
    for _ in 0..4 {
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let xs: Vec<_> = (0..n)
            .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        let t = lp.add_var(1.0, (0.0, f64::INFINITY));
        for (u, d) in dirs.iter().zip(&diffs) {
            let mut row: Vec<_> = xs.iter().zip(u).map(|(&v, &c)| (v, c)).collect();
            row.push((t, 1.0));
            lp.add_constraint(row.clone(), ComparisonOp::Ge, *d);
            let mut row2: Vec<_> = xs.iter().zip(u).map(|(&v, &c)| (v, -c)).collect();
            row2.push((t, 1.0));
            lp.add_constraint(row2, ComparisonOp::Ge, -*d);
        }
        let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
        let cand: Vec<f64> = xs.iter().map(|&v| *sol.var_value(v)).collect();
        let lp_val = *sol.var_value(t);
        let (val, worst) = sphere_sup(n, GRID_LEVEL, |u| {
            (k.support(u) - l.support(u) - dot(&cand, u)).abs()
        });
        if val < dist {
            dist = val;
            x = cand;
        }
        if val <= lp_val + 1e-12 * (1.0 + lp_val) {
            break;
        }
        diffs.push(k.support(&worst) - l.support(&worst));
        dirs.push(worst);
    }
    Ok((dist, x))
}

pub fn translative_hausdorff(k: &dyn SupportFunction, l: &dyn SupportFunction) -> Result<f64> {
    Ok(translative_hausdorff_with_shift(k, l)?.0)
}
