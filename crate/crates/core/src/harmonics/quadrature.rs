use std::f64::consts::PI;

use crate::error::Result;
use crate::sphere::{check_dim, omega};

/// A positive-weight cubature rule on S^{n-1}.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Every spherical polynomial of degree ≤ `exact_degree` is integrated exactly.
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * f(u))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on P_q).
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for l in 2..=q {
                let lf = l as f64;
                let p2 = ((2.0 * lf - 1.0) * t * p1 - (lf - 1.0) * p0) / lf;
                p0 = p1;
                p1 = p2;
            }
            let p = if q == 0 { 1.0 } else { p1 };
            dp = qf * (t * p - p0) / (t * t - 1.0);
            let step = p / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[q - 1 - i] = t;
        w[i] = wt;
        w[q - 1 - i] = wt;
    }
    (x, w)
}

/// Product rule on S^{n-1} exact for spherical polynomials up to `exact_degree`.
///
/// n = 2: trapezoid rule in θ with `exact_degree + 1` equispaced nodes.
/// n = 3: Gauss–Legendre in cosθ (⌊d/2⌋+1 nodes) times `d + 1` equispaced φ.
pub fn quadrature(n: usize, exact_degree: usize) -> Result<QuadratureRule> {
    check_dim(n)?;
    let d = exact_degree;
    let (nodes, weights) = match n {
        2 => {
            let count = d + 1;
            let w = omega(2) / count as f64;
            let nodes: Vec<Vec<f64>> = (0..count)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / count as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect();
            (nodes, vec![w; count])
        }
        _ => {
            let (zs, zw) = gauss_legendre(d / 2 + 1);
            let nphi = d + 1;
            let dphi = 2.0 * PI / nphi as f64;
            let mut nodes = Vec::with_capacity(zs.len() * nphi);
            let mut weights = Vec::with_capacity(zs.len() * nphi);
            for (z, wz) in zs.iter().zip(&zw) {
                let r = (1.0 - z * z).max(0.0).sqrt();
                for p in 0..nphi {
                    let phi = dphi * p as f64;
                    nodes.push(vec![r * phi.sin(), r * phi.cos(), *z]);
                    weights.push(wz * dphi);
                }
            }
            (nodes, weights)
        }
    };
    Ok(QuadratureRule {
        dim: n,
        nodes,
        weights,
        exact_degree,
    })
}
