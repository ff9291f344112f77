//! Minkowski problem for polytopes: recover a polytope (up to translation)
//! from its facet normals and facet areas.
//!
//! For closed data (Σ a_i u_i = 0) with full-dimensional support, the minimizer
//! of Σ a_i h_i over {V(h) ≥ 1} satisfies a = λ ∇V(h) = λ A(h), i.e. its facet
//! areas are proportional to the targets. We minimize the equivalent
//!
//!   g(h) = Σ a'_i h_i − κ log V(h) + ½ ‖T h‖²,   a' = a / Σa,
//!
//! which is convex (V^{1/n} is concave in h by Brunn–Minkowski). T = (UᵀU)⁻¹Uᵀ
//! extracts the translation component of h and the last term pins it to zero.
//! ∇V = A (facet areas) and ∂A_i/∂h_j comes from ridge lengths, giving an exact
//! Newton method; the result is finally dilated so the areas match and
//! translated so the centroid is the origin.

use nalgebra::{DMatrix, DVector};

use crate::bodies::{halfspace_intersection, Polytope};
use crate::error::{Error, Result};
use crate::measures::{classify, first_moment, ClassifyTol, DiscreteMeasure, MeasureClass};
use crate::sphere::{dot, norm, omega};

/// Default angular tolerance (radians) for merging nearly parallel atoms.
pub const MERGE_ANGLE: f64 = 1e-6;

/// Merges atoms closer than `angular_tol`: weights add, the direction is the
/// weight-averaged direction renormalized. Zero-weight atoms are dropped.
pub fn merge_atoms(mu: &DiscreteMeasure, angular_tol: f64) -> DiscreteMeasure {
    let cos_tol = angular_tol.cos();
    // clusters: (weighted direction sum, total weight, representative direction)
    let mut clusters: Vec<(Vec<f64>, f64, Vec<f64>)> = Vec::new();
    for (u, &w) in mu.atoms.iter().zip(&mu.weights) {
        if w <= 0.0 {
            continue;
        }
        match clusters.iter_mut().find(|c| dot(&c.2, u) >= cos_tol) {
            Some(c) => {
                for (s, x) in c.0.iter_mut().zip(u) {
                    *s += w * x;
                }
                c.1 += w;
                let l = norm(&c.0);
                c.2 = c.0.iter().map(|x| x / l).collect();
            }
            None => clusters.push((u.iter().map(|x| w * x).collect(), w, u.clone())),
        }
    }
    DiscreteMeasure {
        n: mu.n,
        atoms: clusters.iter().map(|c| c.2.clone()).collect(),
        weights: clusters.iter().map(|c| c.1).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct MinkProblem {
    pub n: usize,
    pub normals: Vec<Vec<f64>>,
    pub areas: Vec<f64>,
    /// accepted max_i |A_i − a_i| / Σa
    pub area_tol: f64,
    /// accepted ‖Σ a_i u_i‖ / Σa
    pub closure_tol: f64,
    pub max_iter: usize,
}

impl MinkProblem {
    /// Problem for the atoms of `mu` after merging nearly parallel atoms.
    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        let merged = merge_atoms(mu, MERGE_ANGLE);
        MinkProblem {
            n: mu.n,
            normals: merged.atoms,
            areas: merged.weights,
            area_tol: 1e-6,
            closure_tol: 1e-8,
            max_iter: 200,
        }
    }

    fn measure(&self) -> DiscreteMeasure {
        DiscreteMeasure {
            n: self.n,
            atoms: self.normals.clone(),
            weights: self.areas.clone(),
        }
    }
}

struct State {
    poly: Polytope,
    value: f64,
}

fn evaluate(us: &[Vec<f64>], a: &[f64], t: &DMatrix<f64>, kappa: f64, h: &[f64]) -> Option<State> {
    let poly = halfspace_intersection(us, h).ok()?;
    let v = poly.volume();
    if !(v > 0.0) {
        return None;
    }
    let th = t * DVector::from_column_slice(h);
    let value = dot(a, h) - kappa * v.ln() + 0.5 * th.norm_squared();
    Some(State { poly, value })
}

/// Polytope whose facet with normal u_i has area a_i, centred at its centroid.
pub fn mink_reconstruct(problem: &MinkProblem) -> Result<Polytope> {
    let n = problem.n;
    crate::sphere::check_dim(n)?;
    let keep: Vec<usize> = (0..problem.areas.len())
        .filter(|&i| problem.areas[i] > 0.0)
        .collect();
    let us: Vec<Vec<f64>> = keep.iter().map(|&i| problem.normals[i].clone()).collect();
    let areas: Vec<f64> = keep.iter().map(|&i| problem.areas[i]).collect();
    let total: f64 = areas.iter().sum();
    let mu = DiscreteMeasure {
        n,
        atoms: us.clone(),
        weights: areas.clone(),
    };
    if !(total > 0.0) {
        return Err(Error::NotFullDimensional);
    }
    let closure = norm(&first_moment(&mu)) / total;
    if closure > problem.closure_tol {
        return Err(Error::Infeasible(format!(
            "facet data not closed: |Σ a_i u_i| / Σ a_i = {closure:.3e}"
        )));
    }
    let relaxed = ClassifyTol {
        abs: 0.0,
        rel: problem.closure_tol.max(1e-8),
    };
    if classify(&problem.measure(), relaxed) != MeasureClass::FullDim {
        return Err(Error::NotFullDimensional);
    }

    let m = us.len();
    let a: Vec<f64> = areas.iter().map(|x| x / total).collect();
    let r0 = (1.0 / omega(n)).powf(1.0 / (n as f64 - 1.0));
    let kappa = r0 / n as f64;
    let umat = DMatrix::from_fn(m, n, |i, d| us[i][d]);
    let t = (umat.transpose() * &umat)
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix("normal Gram matrix".into()))?
        * umat.transpose();
    let ttt = t.transpose() * &t;

    let mut h = vec![r0; m];
    let mut state = evaluate(&us, &a, &t, kappa, &h).ok_or(Error::Unbounded)?;
    let mut mu_reg = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..problem.max_iter {
        iterations = it + 1;
        let v = state.poly.volume();
        let area = DVector::from_vec(state.poly.facet_areas());
        let hv = DVector::from_column_slice(&h);
        let grad = DVector::from_column_slice(&a) - &area * (kappa / v) + &ttt * &hv;
        if grad.amax() < 1e-13 {
            converged = true;
            break;
        }
        let hess = state.poly.area_hessian() * (-kappa / v)
            + &area * area.transpose() * (kappa / (v * v))
            + &ttt;
        let hess = (&hess + hess.transpose()) * 0.5;
        // Newton step with Levenberg damping until the system is positive definite
        let mut step = None;
        let mut damp = mu_reg;
        for _ in 0..30 {
            let mut reg = hess.clone();
            for i in 0..m {
                reg[(i, i)] += damp;
            }
            if let Some(ch) = reg.cholesky() {
                step = Some(-ch.solve(&grad));
                break;
            }
            damp = if damp == 0.0 {
                1e-10 * hess.diagonal().amax().max(1e-12)
            } else {
                damp * 10.0
            };
        }
        let dir = step.unwrap_or_else(|| -grad.clone());
        let slope = grad.dot(&dir);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = h
                .iter()
                .zip(dir.iter())
                .map(|(x, d)| x + alpha * d)
                .collect();
            if let Some(s) = evaluate(&us, &a, &t, kappa, &trial) {
                if s.value <= state.value + 1e-4 * alpha * slope
                    || (s.value - state.value).abs() < 1e-15
                {
                    accepted = Some((trial, s));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, s)) => {
                h = trial;
                state = s;
                mu_reg = if alpha == 1.0 {
                    damp * 0.1
                } else {
                    damp.max(1e-12) * 10.0
                };
            }
            None => {
                // no decrease possible at machine precision
                break;
            }
        }
    }

    let v = state.poly.volume();
    let scale = (kappa * total / v).powf(1.0 / (n as f64 - 1.0));
    let scaled = state.poly.scaled(scale);
    let c = scaled.centroid();
    let centered = scaled.translated(&c.iter().map(|x| -x).collect::<Vec<_>>());
    let err = centered
        .facet_areas()
        .iter()
        .zip(&areas)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / total;
    if err > problem.area_tol {
        return Err(Error::NoConvergence {
            iterations,
            detail: format!(
                "facet areas off by {err:.3e} of the total (gradient converged: {converged})"
            ),
        });
    }
    Ok(centered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::translative_hausdorff;
    use crate::sphere::random_unit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn merging() {
        let e1 = vec![1.0, 0.0, 0.0];
        let mu = DiscreteMeasure::new(3, vec![e1.clone(), e1.clone()], vec![1.0, 2.0]).unwrap();
        let m = merge_atoms(&mu, MERGE_ANGLE);
        assert_eq!(m.len(), 1);
        assert_eq!(m.weights[0], 3.0);
        let a = 1e-9f64;
        let close = DiscreteMeasure::new(
            2,
            vec![vec![1.0, 0.0], vec![a.cos(), a.sin()]],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(merge_atoms(&close, MERGE_ANGLE).len(), 1);
        let anti =
            DiscreteMeasure::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![1.0, 0.0]).unwrap();
        assert_eq!(merge_atoms(&anti, MERGE_ANGLE).len(), 1);
        let anti =
            DiscreteMeasure::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![1.0, 1.0]).unwrap();
        assert_eq!(merge_atoms(&anti, MERGE_ANGLE).len(), 2);
    }

    #[test]
    fn cube_from_areas() {
        let mut normals = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; 3];
                e[i] = s;
                normals.push(e);
            }
        }
        let mu = DiscreteMeasure::new(3, normals.clone(), vec![4.0; 6]).unwrap();
        let p = mink_reconstruct(&MinkProblem::from_measure(&mu)).unwrap();
        let cube = halfspace_intersection(&normals, &[1.0; 6]).unwrap();
        assert!(translative_hausdorff(&p, &cube).unwrap() < 1e-6);
    }

    #[test]
    fn rank_one_rejected() {
        let mu = DiscreteMeasure::new(
            3,
            vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(
            mink_reconstruct(&MinkProblem::from_measure(&mu)),
            Err(Error::NotFullDimensional)
        ));
        let open = DiscreteMeasure::new(
            2,
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]],
            vec![1.0; 3],
        )
        .unwrap();
        assert!(matches!(
            mink_reconstruct(&MinkProblem::from_measure(&open)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3] {
            for _ in 0..4 {
                let m = rng.gen_range(8..20);
                let u: Vec<Vec<f64>> = (0..m).map(|_| random_unit(n, &mut rng)).collect();
                let h: Vec<f64> = (0..m).map(|_| rng.gen_range(0.8..1.2)).collect();
                let Ok(p) = halfspace_intersection(&u, &h) else {
                    continue;
                };
                let q = mink_reconstruct(&MinkProblem::from_measure(&p.surface_area_measure()))
                    .unwrap();
                let d = translative_hausdorff(&p, &q).unwrap();
                assert!(d < 1e-5 * p.diameter(), "n={n} δ^t = {d}");
            }
        }
    }
}
