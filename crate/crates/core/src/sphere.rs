//! Small numeric and geometric helpers shared by the other modules: sphere
//! constants, log-domain factorials, vector arithmetic on `&[f64]`, and
//! deterministic direction sets on S¹ and S².

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Surface area of the unit sphere S^{k-1} ⊂ R^k, i.e. ω_k = 2π^{k/2} / Γ(k/2).
///
/// ω_1 = 2, ω_2 = 2π, ω_3 = 4π.
pub fn omega(k: usize) -> f64 {
    assert!(k >= 1, "omega is defined for k >= 1");
    let half = k as f64 / 2.0;
    (2.0f64.ln() + half * PI.ln() - ln_gamma(half)).exp()
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn ln_factorial(k: usize) -> f64 {
    statrs::function::factorial::ln_factorial(k as u64)
}

pub fn factorial(k: usize) -> f64 {
    statrs::function::factorial::factorial(k as u64)
}

/// Binomial coefficient as an integer; `binomial(a, b) = 0` when `b > a`.
pub fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

pub fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let l = norm(a);
    a.iter().map(|x| x / l).collect()
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Orthonormal basis of the plane orthogonal to the unit vector `u` in R³.
pub fn tangent_basis(u: &[f64]) -> ([f64; 3], [f64; 3]) {
    // pick the coordinate axis least aligned with u
    let ax = u[0].abs();
    let ay = u[1].abs();
    let az = u[2].abs();
    let helper = if ax <= ay && ax <= az {
        [1.0, 0.0, 0.0]
    } else if ay <= az {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = cross3(u, &helper);
    let l = norm(&e1);
    let e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
    let e2 = cross3(u, &e1);
    (e1, e2)
}

pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let l = norm(&v);
        if l > 1e-8 {
            return v.into_iter().map(|x| x / l).collect();
        }
    }
}

/// Vertices and triangles of the icosphere obtained by `level` rounds of
/// midpoint subdivision of the icosahedron, projected to S².
pub fn icosphere(level: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut verts: Vec<[f64; 3]> = raw
        .iter()
        .map(|v| {
            let l = norm(v);
            [v[0] / l, v[1] / l, v[2] / l]
        })
        .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            if let Some(&i) = cache.get(&key) {
                return i;
            }
            let m = [
                verts[a][0] + verts[b][0],
                verts[a][1] + verts[b][1],
                verts[a][2] + verts[b][2],
            ];
            let l = norm(&m);
            verts.push([m[0] / l, m[1] / l, m[2] / l]);
            cache.insert(key, verts.len() - 1);
            verts.len() - 1
        };
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut verts);
            let bc = midpoint(f[1], f[2], &mut verts);
            let ca = midpoint(f[2], f[0], &mut verts);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    (verts, faces)
}

/// Deterministic direction set: uniform angles on S¹ or an icosphere on S².
///
/// `level` controls density: n = 2 gives `90 * 2^level` angles, n = 3 gives
/// the level-`level` icosphere (`10 * 4^level + 2` points).
pub fn direction_grid(n: usize, level: usize) -> Vec<Vec<f64>> {
    match n {
        2 => {
            let count = 90usize << level;
            (0..count)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / count as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        3 => icosphere(level).0.into_iter().map(|v| v.to_vec()).collect(),
        _ => panic!("direction_grid supports n = 2, 3"),
    }
}

/// Quasi-uniform spherical Fibonacci points on S² (or equally spaced angles on S¹).
pub fn fibonacci_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * PI * (i as f64 + 0.5) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5.0f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => panic!("fibonacci_points supports n = 2, 3"),
    }
}
