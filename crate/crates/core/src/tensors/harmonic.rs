use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{quadrature, total_dim, HarmonicBasis};
use crate::measures::DiscreteMeasure;

use super::set::{TensorSet, ORDERING};
use super::symtensor::{multi_indices, surface_tensor_factor};

/// Harmonic intrinsic volumes ψ_{kj} = ∫ H_{kj} dμ for k ≤ s_o, ordered by
/// degree then index.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicVector {
    pub n: usize,
    pub s_o: usize,
    pub values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonicFile {
    kind: String,
    n: usize,
    s_o: usize,
    ordering: String,
    values: Vec<f64>,
}

impl HarmonicVector {
    pub fn new(n: usize, s_o: usize, values: Vec<f64>) -> Result<Self> {
        let m = total_dim(n, s_o)?;
        if values.len() != m {
            return Err(Error::InvalidInput(format!(
                "harmonic vector for n = {n}, s_o = {s_o} needs {m} entries, got {}",
                values.len()
            )));
        }
        Ok(HarmonicVector { n, s_o, values })
    }

    pub fn zeros(n: usize, s_o: usize) -> Result<Self> {
        Self::new(n, s_o, vec![0.0; total_dim(n, s_o)?])
    }

    /// Entries of degree k.
    pub fn degree_block(&self, k: usize) -> &[f64] {
        let lo = if k == 0 {
            0
        } else {
            total_dim(self.n, k - 1).unwrap()
        };
        let hi = total_dim(self.n, k).unwrap();
        &self.values[lo..hi]
    }

    pub fn norm(&self) -> f64 {
        crate::sphere::norm(&self.values)
    }

    /// Total mass of a measure with these harmonic coefficients: √ω_n ψ_0.
    pub fn mass(&self) -> f64 {
        crate::sphere::omega(self.n).sqrt() * self.values[0]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&HarmonicFile {
            kind: "harmonics".into(),
            n: self.n,
            s_o: self.s_o,
            ordering: ORDERING.into(),
            values: self.values.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: HarmonicFile = serde_json::from_str(text)?;
        if f.kind != "harmonics" {
            return Err(Error::InvalidInput(format!(
                "expected kind \"harmonics\", got {:?}",
                f.kind
            )));
        }
        if f.ordering != ORDERING {
            return Err(Error::InvalidInput(format!(
                "unsupported ordering {:?}",
                f.ordering
            )));
        }
        Self::new(f.n, f.s_o, f.values)
    }
}

/// ∫ H_{kj} dμ by summing over atoms.
pub fn harmonic_vector(mu: &DiscreteMeasure, s_o: usize) -> Result<HarmonicVector> {
    let basis = HarmonicBasis::new(mu.n, s_o)?;
    Ok(harmonic_vector_with(&basis, mu))
}

pub fn harmonic_vector_with(basis: &HarmonicBasis, mu: &DiscreteMeasure) -> HarmonicVector {
    let mut values = vec![0.0; basis.len()];
    let mut buf = vec![0.0; basis.len()];
    for (u, w) in mu.atoms.iter().zip(&mu.weights) {
        basis.eval_into(u, &mut buf);
        for (v, h) in values.iter_mut().zip(&buf) {
            *v += w * h;
        }
    }
    HarmonicVector {
        n: basis.dim(),
        s_o: basis.max_degree(),
        values,
    }
}

/// The linear bijection between tensor component vectors φ^{s_o} and harmonic
/// vectors h^{s_o}.
///
/// On the sphere the monomials u^α with |α| ∈ {s_o − 1, s_o} span the same space
/// as the harmonics of degree ≤ s_o, so u^α = Σ B_{α,kj} H_{kj} with
/// B_{α,kj} = ∫ u^α H_{kj} dσ. Integrating against μ gives moments = B ψ.
#[derive(Debug, Clone)]
pub struct MomentHarmonicMap {
    pub n: usize,
    pub s_o: usize,
    /// per-row factor turning φ entries into moments
    moment_scale: Vec<f64>,
    to_moment: DMatrix<f64>,
    to_harmonic: DMatrix<f64>,
}

impl MomentHarmonicMap {
    pub fn new(n: usize, s_o: usize) -> Result<Self> {
        if s_o < 1 {
            return Err(Error::Precondition("s_o must be at least 1".into()));
        }
        let basis = HarmonicBasis::new(n, s_o)?;
        let m = basis.len();
        let rule = quadrature(n, 2 * s_o)?;
        let mut alphas = multi_indices(n, s_o - 1);
        let lo = alphas.len();
        alphas.extend(multi_indices(n, s_o));
        let mut b = DMatrix::<f64>::zeros(m, m);
        let mut hv = vec![0.0; m];
        for (u, w) in rule.nodes.iter().zip(&rule.weights) {
            basis.eval_into(u, &mut hv);
            for (r, alpha) in alphas.iter().enumerate() {
                let mono: f64 = alpha.iter().map(|&i| u[i]).product();
                let wm = w * mono;
                for (c, h) in hv.iter().enumerate() {
                    b[(r, c)] += wm * h;
                }
            }
        }
        let inv = b
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::SingularMatrix("moment/harmonic map".into()))?;
        let moment_scale = (0..m)
            .map(|r| surface_tensor_factor(if r < lo { s_o - 1 } else { s_o }))
            .collect();
        Ok(MomentHarmonicMap {
            n,
            s_o,
            moment_scale,
            to_moment: b,
            to_harmonic: inv,
        })
    }

    pub fn moments_to_harmonic(&self, moments: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(moments);
        (&self.to_harmonic * v).as_slice().to_vec()
    }

    pub fn harmonic_to_moments(&self, h: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(h);
        (&self.to_moment * v).as_slice().to_vec()
    }

    /// f: tensor set → harmonic vector.
    pub fn moment_to_harmonic(&self, set: &TensorSet) -> Result<HarmonicVector> {
        self.check(set.n, set.s_o)?;
        HarmonicVector::new(
            self.n,
            self.s_o,
            self.moments_to_harmonic(&set.moment_vector()),
        )
    }

    /// f⁻¹: harmonic vector → tensor set (surface tensors unless `scaled`).
    pub fn harmonic_to_moment(&self, h: &HarmonicVector, scaled: bool) -> Result<TensorSet> {
        self.check(h.n, h.s_o)?;
        let mut v = self.harmonic_to_moments(&h.values);
        if !scaled {
            for (x, s) in v.iter_mut().zip(&self.moment_scale) {
                *x /= s;
            }
        }
        TensorSet::from_phi_vector(self.n, self.s_o, &v, scaled)
    }

    fn check(&self, n: usize, s_o: usize) -> Result<()> {
        if n != self.n || s_o != self.s_o {
            return Err(Error::Precondition(format!(
                "map built for n = {}, s_o = {} applied to n = {n}, s_o = {s_o}",
                self.n, self.s_o
            )));
        }
        Ok(())
    }

    /// ‖B·B⁻¹ − I‖_∞ as a self-check of the construction.
    pub fn round_trip_error(&self) -> f64 {
        let p = &self.to_moment * &self.to_harmonic;
        let m = p.nrows();
        let mut err: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((p[(i, j)] - target).abs());
            }
        }
        err
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_has_only_degree_zero() {
        let sigma = crate::measures::discretize_sphere(3, 8, 1.0).unwrap();
        let h = harmonic_vector(&sigma, 2).unwrap();
        assert!((h.values[0] - 2.0 * PI.sqrt()).abs() < 1e-12);
        assert!(h.values[1..].iter().all(|v| v.abs() < 1e-12));
        let map = MomentHarmonicMap::new(3, 2).unwrap();
        let set = TensorSet::from_measure(&sigma, 2, false).unwrap();
        let f = map.moment_to_harmonic(&set).unwrap();
        for (a, b) in f.values.iter().zip(&h.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bijection_is_invertible() {
        for n in [2, 3] {
            for s_o in 1..=8 {
                let map = MomentHarmonicMap::new(n, s_o).unwrap();
                assert!(map.round_trip_error() < 1e-10, "n={n} s_o={s_o}");
            }
        }
    }

    #[test]
    fn json_rejects_wrong_kind() {
        let h = HarmonicVector::zeros(3, 2).unwrap();
        let txt = h.to_json().unwrap();
        assert_eq!(HarmonicVector::from_json(&txt).unwrap(), h);
        assert!(HarmonicVector::from_json(&txt.replace("harmonics", "tensors")).is_err());
    }
}
