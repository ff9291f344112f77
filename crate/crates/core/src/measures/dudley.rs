//! Dudley (bounded-Lipschitz) distance between finitely supported measures.
//!
//! d(μ, ν) = sup { ∫ f d(μ − ν) : ‖f‖_∞ + ‖f‖_L ≤ 1 }.
//!
//! Only the values f_i = f(x_i) on the union of the supports enter the
//! objective, so the supremum is a finite LP once we know which value vectors
//! extend to admissible functions. Any (f_i) with |f_i| ≤ s and
//! |f_i − f_j| ≤ t‖x_i − x_j‖ extends to the whole space by McShane's formula
//! f(x) = min_i (f_i + t‖x − x_i‖), clipped to [−s, s]; the extension keeps
//! Lipschitz constant t and sup norm s. Conversely every admissible f gives
//! such a vector. Hence
//!
//! d(μ, ν) = max Σ (μ_i − ν_i) f_i  s.t.  |f_i| ≤ s, f_i − f_j ≤ t‖x_i − x_j‖, s + t ≤ 1,
//!
//! with no discretization error.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::sphere::{norm, sub};

use super::measure::DiscreteMeasure;

/// Atoms closer than this are treated as the same support point.
const MERGE_DIST: f64 = 1e-12;

pub fn dudley(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.n != nu.n {
        return Err(Error::Precondition(
            "measures live in different dimensions".into(),
        ));
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut diff: Vec<f64> = Vec::new();
    let mut add = |x: &Vec<f64>, w: f64| {
        if let Some(i) = points.iter().position(|p| norm(&sub(p, x)) <= MERGE_DIST) {
            diff[i] += w;
        } else {
            points.push(x.clone());
            diff.push(w);
        }
    };
    for (x, w) in mu.atoms.iter().zip(&mu.weights) {
        add(x, *w);
    }
    for (x, w) in nu.atoms.iter().zip(&nu.weights) {
        add(x, -*w);
    }
    if diff.iter().all(|d| d.abs() == 0.0) {
        return Ok(0.0);
    }
    let k = points.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let f: Vec<_> = diff
        .iter()
        .map(|&d| lp.add_var(d, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let s = lp.add_var(0.0, (0.0, f64::INFINITY));
    let t = lp.add_var(0.0, (0.0, f64::INFINITY));
    lp.add_constraint([(s, 1.0), (t, 1.0)], ComparisonOp::Le, 1.0);
    for i in 0..k {
        lp.add_constraint([(f[i], 1.0), (s, -1.0)], ComparisonOp::Le, 0.0);
        lp.add_constraint([(f[i], -1.0), (s, -1.0)], ComparisonOp::Le, 0.0);
        for j in 0..k {
            if i != j {
                let d = norm(&sub(&points[i], &points[j]));
                lp.add_constraint([(f[i], 1.0), (f[j], -1.0), (t, -d)], ComparisonOp::Le, 0.0);
            }
        }
    }
    let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    Ok(sol.objective().max(0.0))
}
