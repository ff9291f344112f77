use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{check_dim, dot, norm};

/// A finitely supported measure Σ w_i δ_{u_i} on S^{n-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub n: usize,
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    n: usize,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Validates shapes and signs; atoms within 1e-6 of unit length are renormalized.
    pub fn new(n: usize, atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if atoms.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let mut unit = Vec::with_capacity(atoms.len());
        for (i, a) in atoms.into_iter().enumerate() {
            if a.len() != n {
                return Err(Error::InvalidInput(format!(
                    "atom {i} has length {}, expected {n}",
                    a.len()
                )));
            }
            let l = norm(&a);
            if !l.is_finite() || (l - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidInput(format!(
                    "atom {i} is not a unit vector (norm {l})"
                )));
            }
            unit.push(a.iter().map(|x| x / l).collect());
        }
        if let Some(i) = weights.iter().position(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "weight {i} is negative or not finite"
            )));
        }
        Ok(DiscreteMeasure {
            n,
            atoms: unit,
            weights,
        })
    }

    pub fn zero(n: usize) -> Self {
        DiscreteMeasure {
            n,
            atoms: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        DiscreteMeasure {
            n: self.n,
            atoms: self.atoms.clone(),
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }

    /// Concatenation of atoms (the sum of the two measures).
    pub fn plus(&self, other: &DiscreteMeasure) -> Self {
        let mut out = self.clone();
        out.atoms.extend(other.atoms.iter().cloned());
        out.weights.extend_from_slice(&other.weights);
        out
    }

    /// Drops atoms with weight ≤ `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.weights[i] > tol).collect();
        DiscreteMeasure {
            n: self.n,
            atoms: keep.iter().map(|&i| self.atoms[i].clone()).collect(),
            weights: keep.iter().map(|&i| self.weights[i]).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&MeasureFile {
            n: self.n,
            atoms: self.atoms.clone(),
            weights: self.weights.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: MeasureFile = serde_json::from_str(text)?;
        Self::new(f.n, f.atoms, f.weights)
    }
}

/// Σ w_i u_i.
pub fn first_moment(mu: &DiscreteMeasure) -> Vec<f64> {
    let mut m = vec![0.0; mu.n];
    for (u, w) in mu.atoms.iter().zip(&mu.weights) {
        for (mi, ui) in m.iter_mut().zip(u) {
            *mi += w * ui;
        }
    }
    m
}

/// The second-moment matrix M(μ) = Σ w_i u_i u_iᵀ with its spectrum.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub matrix: DMatrix<f64>,
    /// ascending
    pub eigenvalues: Vec<f64>,
    /// columns match `eigenvalues`
    pub eigenvectors: DMatrix<f64>,
}

impl MomentMatrix {
    pub fn quadratic_form(&self, z: &[f64]) -> f64 {
        let n = self.matrix.nrows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += z[i] * self.matrix[(i, j)] * z[j];
            }
        }
        acc
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }
}

/// Ascending symmetric eigen-decomposition.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| e.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn moment_matrix(mu: &DiscreteMeasure) -> MomentMatrix {
    let n = mu.n;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (u, w) in mu.atoms.iter().zip(&mu.weights) {
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += w * u[i] * u[j];
            }
        }
    }
    let (eigenvalues, eigenvectors) = sym_eigen(&m);
    MomentMatrix {
        matrix: m,
        eigenvalues,
        eigenvectors,
    }
}

/// Which measures on S^{n-1} are surface area measures of convex bodies.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureClass {
    /// nonzero, centered, positive definite moment matrix: an n-dimensional body
    FullDim,
    /// α(δ_u + δ_{−u}): a body of dimension n − 1 in u^⊥ with surface area α
    RankOne {
        axis: Vec<f64>,
        surface_area: f64,
    },
    NotSurfaceArea,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for ClassifyTol {
    fn default() -> Self {
        ClassifyTol {
            abs: 1e-12,
            rel: 1e-8,
        }
    }
}

pub fn classify(mu: &DiscreteMeasure, tol: ClassifyTol) -> MeasureClass {
    let mass = mu.mass();
    if mass <= tol.abs {
        return MeasureClass::Zero;
    }
    if norm(&first_moment(mu)) > tol.rel * mass {
        return MeasureClass::NotSurfaceArea;
    }
    let mm = moment_matrix(mu);
    let n = mu.n;
    let lam = &mm.eigenvalues;
    let thresh = tol.rel * mass;
    if lam[0] > thresh {
        MeasureClass::FullDim
    } else if lam[n - 2] <= thresh && thresh < lam[n - 1] {
        let mut axis = mm.eigenvector(n - 1);
        // sign convention: first nonzero coordinate positive
        if let Some(first) = axis.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                axis.iter_mut().for_each(|x| *x = -*x);
            }
        }
        MeasureClass::RankOne {
            axis,
            surface_area: mass / 2.0,
        }
    } else {
        MeasureClass::NotSurfaceArea
    }
}

/// Angle in radians between two unit vectors.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}
