use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::sphere::{binomial, factorial, omega};

/// Nondecreasing multi-indices (i₁ ≤ … ≤ i_s) over 0..n in lexicographic order.
pub fn multi_indices(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(s + n - 1, n - 1));
    let mut cur = Vec::with_capacity(s);
    fn rec(n: usize, s: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, s, i, cur, out);
            cur.pop();
        }
    }
    rec(n, s, 0, &mut cur, &mut out);
    out
}

/// Number of distinct orderings of a sorted multi-index, s! / Π (count_i)!.
pub fn multiplicity(alpha: &[usize], n: usize) -> f64 {
    let mut counts = vec![0usize; n];
    for &i in alpha {
        counts[i] += 1;
    }
    counts
        .iter()
        .fold(factorial(alpha.len()), |acc, &c| acc / factorial(c))
}

/// Symmetric rank-s tensor on Rⁿ stored by its C(s+n-1, n-1) distinct components
/// (sorted multi-indices, lexicographic order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    pub n: usize,
    pub rank: usize,
    pub components: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        SymTensor {
            n,
            rank,
            components: vec![0.0; binomial(rank + n - 1, n - 1)],
        }
    }

    pub fn indices(&self) -> Vec<Vec<usize>> {
        multi_indices(self.n, self.rank)
    }

    /// Position of a (not necessarily sorted) multi-index in `components`.
    pub fn position(&self, index: &[usize]) -> usize {
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        // lexicographic rank: count sorted tuples preceding `sorted`
        let (n, s) = (self.n, self.rank);
        let mut pos = 0;
        let mut start = 0;
        for (d, &i) in sorted.iter().enumerate() {
            let left = s - d - 1;
            for smaller in start..i {
                // tuples with this prefix and next entry `smaller`: remaining
                // `left` entries from smaller..n
                pos += binomial(left + n - smaller - 1, n - smaller - 1);
            }
            start = i;
        }
        pos
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.components[self.position(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let p = self.position(index);
        self.components[p] = value;
    }

    /// The multilinear form T(v₁, …, v_s).
    pub fn form(&self, vectors: &[&[f64]]) -> f64 {
        assert_eq!(vectors.len(), self.rank);
        let n = self.n;
        let total = n.pow(self.rank as u32);
        let mut idx = vec![0usize; self.rank];
        let mut acc = 0.0;
        for mut code in 0..total {
            let mut prod = 1.0;
            for (d, slot) in idx.iter_mut().enumerate() {
                *slot = code % n;
                code /= n;
                prod *= vectors[d][*slot];
            }
            if prod != 0.0 {
                acc += prod * self.get(&idx);
            }
        }
        acc
    }

    /// Contraction of the last two slots: (tr T)_β = Σ_i T_{β i i}.
    pub fn trace_reduce(&self) -> Result<SymTensor> {
        if self.rank < 2 {
            return Err(Error::RankTooSmall(self.rank));
        }
        let mut out = SymTensor::zeros(self.n, self.rank - 2);
        for (pos, beta) in multi_indices(self.n, self.rank - 2).iter().enumerate() {
            let mut full = beta.clone();
            full.extend([0, 0]);
            let mut acc = 0.0;
            for i in 0..self.n {
                full[self.rank - 2] = i;
                full[self.rank - 1] = i;
                acc += self.get(&full);
            }
            out.components[pos] = acc;
        }
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> SymTensor {
        SymTensor {
            n: self.n,
            rank: self.rank,
            components: self.components.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &SymTensor) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// n×n coefficient matrix of a rank-2 tensor.
    pub fn matrix(&self) -> Result<nalgebra::DMatrix<f64>> {
        if self.rank != 2 {
            return Err(Error::Precondition(format!(
                "coefficient matrix needs rank 2, got {}",
                self.rank
            )));
        }
        Ok(nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| {
            self.get(&[i, j])
        }))
    }
}

/// ∫ u_{i₁}⋯u_{i_s} μ(du) for every sorted multi-index.
pub fn moment_tensor(mu: &DiscreteMeasure, s: usize) -> SymTensor {
    let mut t = SymTensor::zeros(mu.n, s);
    let idx = multi_indices(mu.n, s);
    for (atom, w) in mu.atoms.iter().zip(&mu.weights) {
        for (c, alpha) in t.components.iter_mut().zip(&idx) {
            *c += w * alpha.iter().map(|&i| atom[i]).product::<f64>();
        }
    }
    t
}

/// Normalization s!·ω_{s+1} between rank-s moments and the surface tensor Φ^s.
pub fn surface_tensor_factor(s: usize) -> f64 {
    factorial(s) * omega(s + 1)
}

/// Φ^s = (1 / (s! ω_{s+1})) ∫ u^s dμ.
pub fn surface_tensor(mu: &DiscreteMeasure, s: usize) -> SymTensor {
    moment_tensor(mu, s).scaled(1.0 / surface_tensor_factor(s))
}

/// The scaled surface tensor: the raw moment tensor, without 1/(s!ω_{s+1}).
pub fn scaled_surface_tensor(mu: &DiscreteMeasure, s: usize) -> SymTensor {
    moment_tensor(mu, s)
}

/// Constant c with Φ^s = c · tr^{(s_o - s)/2} Φ^{s_o} for surface tensors of equal parity.
///
/// Since Σ u_i² = 1 on the sphere, traces of moment tensors are lower-rank moment
/// tensors, so c = s_o! ω_{s_o+1} / (s! ω_{s+1}).
pub fn trace_constant(s: usize, s_o: usize) -> f64 {
    surface_tensor_factor(s_o) / surface_tensor_factor(s)
}

/// Applies `(rank - s)/2` trace reductions to a surface tensor and rescales so the
/// result is Φ^s. With `scaled` set the inputs are raw moments and no constant applies.
pub fn reduce_to(t: &SymTensor, s: usize, scaled: bool) -> Result<SymTensor> {
    if s > t.rank || !(t.rank - s).is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "cannot reduce rank {} to rank {s}",
            t.rank
        )));
    }
    let mut cur = t.clone();
    while cur.rank > s {
        cur = cur.trace_reduce()?;
    }
    Ok(if scaled {
        cur
    } else {
        cur.scaled(trace_constant(s, t.rank))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn index_counts_and_positions() {
        for n in [2usize, 3] {
            for s in 0..7 {
                let idx = multi_indices(n, s);
                assert_eq!(idx.len(), binomial(s + n - 1, n - 1));
                let t = SymTensor::zeros(n, s);
                for (p, a) in idx.iter().enumerate() {
                    assert_eq!(t.position(a), p);
                    let mut rev = a.clone();
                    rev.reverse();
                    assert_eq!(t.position(&rev), p);
                }
            }
        }
    }

    #[test]
    fn multiplicities_sum_to_power() {
        for s in 0..6 {
            let total: f64 = multi_indices(3, s).iter().map(|a| multiplicity(a, 3)).sum();
            assert_eq!(total, 3f64.powi(s as i32));
        }
    }

    #[test]
    fn point_mass() {
        let mu = DiscreteMeasure::new(3, vec![vec![1.0, 0.0, 0.0]], vec![1.0]).unwrap();
        let t = moment_tensor(&mu, 3);
        assert_eq!(t.get(&[0, 0, 0]), 1.0);
        assert_eq!(t.components.iter().filter(|&&c| c != 0.0).count(), 1);
    }

    #[test]
    fn symmetric_measure_has_no_odd_moments() {
        let u = vec![0.6, 0.0, 0.8];
        let mu = DiscreteMeasure::new(3, vec![u.clone(), vec![-0.6, 0.0, -0.8]], vec![1.5, 1.5])
            .unwrap();
        for s in [1, 3, 5] {
            assert!(moment_tensor(&mu, s)
                .components
                .iter()
                .all(|c| c.abs() < 1e-15));
        }
    }

    #[test]
    fn form_matches_moment_definition() {
        let mu = DiscreteMeasure::new(
            3,
            vec![vec![0.0, 0.6, 0.8], vec![1.0, 0.0, 0.0]],
            vec![2.0, 0.5],
        )
        .unwrap();
        let t = moment_tensor(&mu, 3);
        let (a, b, c) = ([0.1, 0.2, 0.3], [-1.0, 0.5, 0.0], [0.3, 0.3, -0.7]);
        let direct: f64 = mu
            .atoms
            .iter()
            .zip(&mu.weights)
            .map(|(u, w)| {
                w * crate::sphere::dot(u, &a)
                    * crate::sphere::dot(u, &b)
                    * crate::sphere::dot(u, &c)
            })
            .sum();
        assert!((t.form(&[&a, &b, &c]) - direct).abs() < 1e-14);
        assert!((t.form(&[&c, &a, &b]) - direct).abs() < 1e-14);
    }

    #[test]
    fn trace_of_second_moment_is_mass() {
        let mu = DiscreteMeasure::new(
            3,
            vec![
                vec![0.0, 0.6, 0.8],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, -1.0],
            ],
            vec![2.0, 0.5, 1.0],
        )
        .unwrap();
        let tr = moment_tensor(&mu, 2).trace_reduce().unwrap();
        assert!((tr.components[0] - 3.5).abs() < 1e-14);
        assert!(matches!(
            moment_tensor(&mu, 1).trace_reduce(),
            Err(Error::RankTooSmall(1))
        ));
    }

    #[test]
    fn trace_constant_recovers_mass_relation() {
        // Φ² of the unit ball is I/6 and Φ⁰ = S/ω₁ = 2π
        let c = trace_constant(0, 2);
        assert!((c - 4.0 * PI).abs() < 1e-12);
        let mut phi2 = SymTensor::zeros(3, 2);
        for i in 0..3 {
            phi2.set(&[i, i], 1.0 / 6.0);
        }
        let phi0 = reduce_to(&phi2, 0, false).unwrap();
        assert!((phi0.components[0] - 2.0 * PI).abs() < 1e-12);
    }
}
