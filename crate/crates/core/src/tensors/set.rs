use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::sphere::{binomial, check_dim};

use super::symtensor::{moment_tensor, reduce_to, surface_tensor_factor, SymTensor};

/// Surface tensors of ranks s_o − 1 and s_o; all lower ranks follow by trace
/// reduction. With `scaled` set the stored tensors are raw moments.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSet {
    pub n: usize,
    pub s_o: usize,
    pub lower: SymTensor,
    pub upper: SymTensor,
    pub scaled: bool,
}

pub const ORDERING: &str = "lex-v1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorSetFile {
    kind: String,
    n: usize,
    s_o: usize,
    ordering: String,
    #[serde(default)]
    scaled: bool,
    values: Vec<f64>,
}

impl TensorSet {
    pub fn from_measure(mu: &DiscreteMeasure, s_o: usize, scaled: bool) -> Result<Self> {
        check_dim(mu.n)?;
        if s_o < 1 {
            return Err(Error::Precondition("s_o must be at least 1".into()));
        }
        let make = |s: usize| {
            let m = moment_tensor(mu, s);
            if scaled {
                m
            } else {
                m.scaled(1.0 / surface_tensor_factor(s))
            }
        };
        Ok(TensorSet {
            n: mu.n,
            s_o,
            lower: make(s_o - 1),
            upper: make(s_o),
            scaled,
        })
    }

    /// Assembles the set from the two top-rank tensors.
    pub fn chain(upper: SymTensor, lower: SymTensor, scaled: bool) -> Result<Self> {
        if upper.n != lower.n || upper.rank != lower.rank + 1 {
            return Err(Error::Precondition(format!(
                "tensor chain needs ranks s_o and s_o - 1, got {} and {}",
                upper.rank, lower.rank
            )));
        }
        check_dim(upper.n)?;
        Ok(TensorSet {
            n: upper.n,
            s_o: upper.rank,
            lower,
            upper,
            scaled,
        })
    }

    /// Φ^s for any s ≤ s_o, by trace reduction from the stored tensor of equal parity.
    pub fn tensor(&self, s: usize) -> Result<SymTensor> {
        if s > self.s_o {
            return Err(Error::Precondition(format!(
                "rank {s} exceeds s_o = {}",
                self.s_o
            )));
        }
        let src = if (self.s_o - s).is_multiple_of(2) {
            &self.upper
        } else {
            &self.lower
        };
        reduce_to(src, s, self.scaled)
    }

    /// Raw moment tensor of rank s ≤ s_o (undoes the surface tensor scaling).
    pub fn moments(&self, s: usize) -> Result<SymTensor> {
        let t = self.tensor(s)?;
        Ok(if self.scaled {
            t
        } else {
            t.scaled(surface_tensor_factor(s))
        })
    }

    /// The m_{s_o} distinct components: rank s_o − 1 block, then rank s_o.
    pub fn phi_vector(&self) -> Vec<f64> {
        let mut v = self.lower.components.clone();
        v.extend_from_slice(&self.upper.components);
        v
    }

    pub fn from_phi_vector(n: usize, s_o: usize, values: &[f64], scaled: bool) -> Result<Self> {
        check_dim(n)?;
        if s_o < 1 {
            return Err(Error::Precondition("s_o must be at least 1".into()));
        }
        let lo = binomial(s_o + n - 2, n - 1);
        let hi = binomial(s_o + n - 1, n - 1);
        if values.len() != lo + hi {
            return Err(Error::InvalidInput(format!(
                "expected {} tensor components for n = {n}, s_o = {s_o}, got {}",
                lo + hi,
                values.len()
            )));
        }
        Ok(TensorSet {
            n,
            s_o,
            lower: SymTensor {
                n,
                rank: s_o - 1,
                components: values[..lo].to_vec(),
            },
            upper: SymTensor {
                n,
                rank: s_o,
                components: values[lo..].to_vec(),
            },
            scaled,
        })
    }

    /// Moment vector (rank s_o − 1 then s_o moments), whatever the scaling.
    pub fn moment_vector(&self) -> Vec<f64> {
        if self.scaled {
            return self.phi_vector();
        }
        let mut v = self
            .lower
            .scaled(surface_tensor_factor(self.s_o - 1))
            .components;
        v.extend(
            self.upper
                .scaled(surface_tensor_factor(self.s_o))
                .components,
        );
        v
    }

    pub fn to_json(&self) -> Result<String> {
        let f = TensorSetFile {
            kind: "tensors".into(),
            n: self.n,
            s_o: self.s_o,
            ordering: ORDERING.into(),
            scaled: self.scaled,
            values: self.phi_vector(),
        };
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TensorSetFile = serde_json::from_str(text)?;
        if f.kind != "tensors" {
            return Err(Error::InvalidInput(format!(
                "expected kind \"tensors\", got {:?}",
                f.kind
            )));
        }
        if f.ordering != ORDERING {
            return Err(Error::InvalidInput(format!(
                "unsupported ordering {:?}",
                f.ordering
            )));
        }
        Self::from_phi_vector(f.n, f.s_o, &f.values, f.scaled)
    }
}
