use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sphere::{check_dim, dot, ln_gamma};

use super::basis::HarmonicBasis;
use super::quadrature::QuadratureRule;

/// Coefficients of the convolution operator Π_k on S^{n-1}:
/// the kernel normalizer E_nk and the eigenvalues a_nkj, j = 0..=k.
#[derive(Debug, Clone)]
pub struct ProjectionConstants {
    pub e: f64,
    pub a: Vec<f64>,
}

/// E_nk = (k+n-2)! / ((4π)^{(n-1)/2} Γ(k+(n-1)/2)) and
/// a_nkj = k!(k+n-2)! / ((k-j)!(k+n+j-2)!); E_nk is evaluated in log space.
pub fn projection_constants(n: usize, k: usize) -> Result<ProjectionConstants> {
    check_dim(n)?;
    let half = (n as f64 - 1.0) / 2.0;
    let ln_e = ln_gamma((k + n - 1) as f64) - half * (4.0 * PI).ln() - ln_gamma(k as f64 + half);
    // a_0 = 1, a_j = a_{j-1} (k-j+1) / (k+n+j-2): the factorial ratio without cancellation
    let mut a = Vec::with_capacity(k + 1);
    a.push(1.0);
    for j in 1..=k {
        let prev = a[j - 1];
        a.push(prev * (k - j + 1) as f64 / (k + n + j - 2) as f64);
    }
    Ok(ProjectionConstants { e: ln_e.exp(), a })
}

fn check_exactness(rule: &QuadratureRule, k: usize) -> Result<()> {
    if rule.exact_degree < 2 * k {
        return Err(Error::InsufficientExactness {
            required: 2 * k,
            available: rule.exact_degree,
        });
    }
    Ok(())
}

/// Π_k f at the rule's own nodes, via the kernel E_nk((1+⟨u,v⟩)/2)^k.
pub fn project(rule: &QuadratureRule, values: &[f64], k: usize) -> Result<Vec<f64>> {
    project_at(rule, values, k, &rule.nodes)
}

/// Π_k f at arbitrary points, f given by its values on the rule's nodes.
pub fn project_at(
    rule: &QuadratureRule,
    values: &[f64],
    k: usize,
    points: &[Vec<f64>],
) -> Result<Vec<f64>> {
    check_exactness(rule, k)?;
    let c = projection_constants(rule.dim, k)?;
    let kk = k as i32;
    Ok(points
        .iter()
        .map(|u| {
            let s: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .zip(values)
                .map(|((v, w), f)| w * f * (0.5 * (1.0 + dot(u, v))).powi(kk))
                .sum();
            c.e * s
        })
        .collect())
}

/// Π_k f at the rule's nodes through Σ_j a_nkj P_j f, with P_j the orthogonal
/// projection onto degree-j harmonics.
pub fn project_via_harmonics(rule: &QuadratureRule, values: &[f64], k: usize) -> Result<Vec<f64>> {
    check_exactness(rule, k)?;
    let c = projection_constants(rule.dim, k)?;
    let basis = HarmonicBasis::new(rule.dim, k)?;
    let m = basis.len();
    let evals: Vec<Vec<f64>> = rule.nodes.iter().map(|u| basis.eval(u)).collect();
    let mut coef = vec![0.0; m];
    for ((h, w), f) in evals.iter().zip(&rule.weights).zip(values) {
        for (ci, hi) in coef.iter_mut().zip(h) {
            *ci += w * f * hi;
        }
    }
    for (i, ci) in coef.iter_mut().enumerate() {
        *ci *= c.a[basis.degree_of(i).0];
    }
    Ok(evals.iter().map(|h| dot(h, &coef)).collect())
}
