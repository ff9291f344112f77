use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sphere::{binomial, check_dim};

use super::gegenbauer::{gegenbauer_all, gegenbauer_norm_sq};
use super::quadrature::quadrature;

/// N(n, k): dimension of the space of degree-k spherical harmonics on S^{n-1}.
pub fn basis_dim(n: usize, k: usize) -> Result<usize> {
    check_dim(n)?;
    Ok(match (n, k) {
        (2, 0) => 1,
        (2, _) => 2,
        _ => 2 * k + 1,
    })
}

/// m_s = Σ_{k≤s} N(n,k) = C(s+n-2, n-1) + C(s+n-1, n-1).
pub fn total_dim(n: usize, s: usize) -> Result<usize> {
    check_dim(n)?;
    Ok(binomial(s + n - 2, n - 1) + binomial(s + n - 1, n - 1))
}

/// Real orthonormal spherical harmonics of degree ≤ `max_degree` on S^{n-1}.
///
/// Flat ordering is by degree, then by the 1-based index j within the degree.
/// For n = 3 index 2j+1 is the cosine-type function of order j and index 2j the
/// sine-type one:
///
/// H_{k,2j+1} = α_kj C_{k-j}^{j+1/2}(z) Re((y + ix)^j),
/// H_{k,2j}   = α_kj C_{k-j}^{j+1/2}(z) Im((y + ix)^j),
///
/// which equals α_kj sin^jθ C(cosθ) cos(jφ) resp. sin(jφ) under
/// u = (sinθ sinφ, sinθ cosφ, cosθ). For n = 2 the basis is 1/√(2π),
/// cos(kθ)/√π, sin(kθ)/√π written as Re/Im of (u₁ + iu₂)^k.
///
/// Every basis function is the restriction of a homogeneous polynomial of its
/// degree, so the Cartesian gradients returned by [`HarmonicBasis::eval_with_grad`]
/// are those of the polynomial extension.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    dim: usize,
    max_degree: usize,
    /// normalizers[k][j] = α_kj (n = 3: j = 0..=k; n = 2: j = 0 only, the
    /// degree's common factor)
    normalizers: Vec<Vec<f64>>,
}

impl HarmonicBasis {
    pub fn new(n: usize, max_degree: usize) -> Result<Self> {
        check_dim(n)?;
        let normalizers = match n {
            2 => (0..=max_degree)
                .map(|k| {
                    vec![if k == 0 {
                        1.0 / (2.0 * PI).sqrt()
                    } else {
                        1.0 / PI.sqrt()
                    }]
                })
                .collect(),
            _ => (0..=max_degree)
                .map(|k| {
                    (0..=k)
                        .map(|j| {
                            let h = gegenbauer_norm_sq(k - j, j as f64 + 0.5);
                            let azimuth = if j == 0 { 2.0 * PI } else { PI };
                            1.0 / (h * azimuth).sqrt()
                        })
                        .collect()
                })
                .collect(),
        };
        let mut basis = HarmonicBasis {
            dim: n,
            max_degree,
            normalizers,
        };
        basis.validate_norms()?;
        Ok(basis)
    }

    /// Checks the closed-form normalizers against quadrature and falls back to
    /// numeric normalization where they disagree by more than 1e-10.
    fn validate_norms(&mut self) -> Result<()> {
        let rule = quadrature(self.dim, 2 * self.max_degree)?;
        let m = self.len();
        let mut sq = vec![0.0; m];
        let mut vals = vec![0.0; m];
        for (node, w) in rule.nodes.iter().zip(&rule.weights) {
            self.eval_into(node, &mut vals);
            for (acc, v) in sq.iter_mut().zip(&vals) {
                *acc += w * v * v;
            }
        }
        for k in 0..=self.max_degree {
            let off = self.offset(k);
            for (slot, alpha) in self.normalizers[k].iter_mut().enumerate() {
                // the cosine-type function of order `slot` sits at 0-based 2*slot
                let idx = if self.dim == 2 { off } else { off + 2 * slot };
                let norm_sq = sq[idx];
                if !(norm_sq > 0.0) {
                    return Err(Error::SingularMatrix(format!(
                        "harmonic of degree {k} order {slot} has zero norm"
                    )));
                }
                if (norm_sq - 1.0).abs() > 1e-10 {
                    *alpha /= norm_sq.sqrt();
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn normalizer(&self, k: usize, j: usize) -> f64 {
        self.normalizers[k][j.min(self.normalizers[k].len() - 1)]
    }

    /// Total number of basis functions, m_{max_degree}.
    pub fn len(&self) -> usize {
        self.offset(self.max_degree + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat position of the first function of degree k.
    pub fn offset(&self, k: usize) -> usize {
        match (self.dim, k) {
            (_, 0) => 0,
            (2, _) => 2 * k - 1,
            _ => k * k,
        }
    }

    pub fn degree_count(&self, k: usize) -> usize {
        if self.dim == 2 && k == 0 {
            1
        } else if self.dim == 2 {
            2
        } else {
            2 * k + 1
        }
    }

    /// Flat position of H_{nkj} (j is 1-based).
    pub fn flat_index(&self, k: usize, j: usize) -> Result<usize> {
        let count = self.degree_count(k);
        if k > self.max_degree || j == 0 || j > count {
            return Err(Error::IndexOutOfRange {
                degree: k,
                index: j,
                count,
            });
        }
        Ok(self.offset(k) + j - 1)
    }

    /// (k, j) with 1-based j for a flat position.
    pub fn degree_of(&self, flat: usize) -> (usize, usize) {
        let mut k = 0;
        while self.offset(k + 1) <= flat {
            k += 1;
        }
        (k, flat - self.offset(k) + 1)
    }

    /// Values of all basis functions at `u`.
    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(u, &mut out);
        out
    }

    pub fn eval_into(&self, u: &[f64], out: &mut [f64]) {
        self.eval_impl(u, out, None);
    }

    /// Values and Cartesian gradients (row-major, `len() × n`).
    pub fn eval_with_grad(&self, u: &[f64], vals: &mut [f64], grads: &mut [f64]) {
        self.eval_impl(u, vals, Some(grads));
    }

    fn eval_impl(&self, u: &[f64], out: &mut [f64], mut grads: Option<&mut [f64]>) {
        let s = self.max_degree;
        match self.dim {
            2 => {
                // p_k = (u1 + i u2)^k
                let (mut pr, mut pi) = (1.0, 0.0);
                out[0] = self.normalizers[0][0];
                if let Some(g) = grads.as_deref_mut() {
                    g[0] = 0.0;
                    g[1] = 0.0;
                }
                for k in 1..=s {
                    let (qr, qi) = (pr, pi);
                    pr = qr * u[0] - qi * u[1];
                    pi = qr * u[1] + qi * u[0];
                    let a = self.normalizers[k][0];
                    let off = 2 * k - 1;
                    out[off] = a * pr;
                    out[off + 1] = a * pi;
                    if let Some(g) = grads.as_deref_mut() {
                        let kf = k as f64 * a;
                        g[2 * off] = kf * qr;
                        g[2 * off + 1] = -kf * qi;
                        g[2 * off + 2] = kf * qi;
                        g[2 * off + 3] = kf * qr;
                    }
                }
            }
            _ => {
                let (x, y, z) = (u[0], u[1], u[2]);
                let mut c = vec![0.0; s + 1];
                let mut dc = vec![0.0; s + 1];
                // p_j = (y + i x)^j and p_{j-1}
                let (mut pr, mut pi) = (1.0, 0.0);
                let (mut qr, mut qi) = (0.0, 0.0);
                for j in 0..=s {
                    if j > 0 {
                        qr = pr;
                        qi = pi;
                        pr = qr * y - qi * x;
                        pi = qr * x + qi * y;
                    }
                    let lambda = j as f64 + 0.5;
                    gegenbauer_all(s - j, lambda, z, &mut c);
                    if grads.is_some() && s > j {
                        // dC_l^λ/dz = 2λ C_{l-1}^{λ+1}
                        gegenbauer_all(s - j - 1, lambda + 1.0, z, &mut dc);
                    }
                    let jf = j as f64;
                    for k in j..=s {
                        let a = self.normalizers[k][j];
                        let l = k - j;
                        let cl = c[l];
                        let base = k * k;
                        let cos_idx = base + 2 * j;
                        out[cos_idx] = a * cl * pr;
                        if j > 0 {
                            out[cos_idx - 1] = a * cl * pi;
                        }
                        if let Some(g) = grads.as_deref_mut() {
                            let dcl = if l > 0 { 2.0 * lambda * dc[l - 1] } else { 0.0 };
                            // ∂Re p_j/∂x = -j Im p_{j-1}, ∂Re p_j/∂y = j Re p_{j-1}
                            // ∂Im p_j/∂x =  j Re p_{j-1}, ∂Im p_j/∂y = j Im p_{j-1}
                            let gi = 3 * cos_idx;
                            g[gi] = a * cl * (-jf * qi);
                            g[gi + 1] = a * cl * (jf * qr);
                            g[gi + 2] = a * dcl * pr;
                            if j > 0 {
                                let gi = 3 * (cos_idx - 1);
                                g[gi] = a * cl * (jf * qr);
                                g[gi + 1] = a * cl * (jf * qi);
                                g[gi + 2] = a * dcl * pi;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// H_{nkj}(u) for a single index (j is 1-based).
pub fn eval_harmonic(n: usize, k: usize, j: usize, u: &[f64]) -> Result<f64> {
    check_dim(n)?;
    let count = basis_dim(n, k)?;
    if j == 0 || j > count {
        return Err(Error::IndexOutOfRange {
            degree: k,
            index: j,
            count,
        });
    }
    if u.len() != n || (crate::sphere::norm(u) - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "eval_harmonic expects a unit vector in R^{n}"
        )));
    }
    let basis = HarmonicBasis::new(n, k)?;
    let idx = basis.flat_index(k, j)?;
    Ok(basis.eval(u)[idx])
}
