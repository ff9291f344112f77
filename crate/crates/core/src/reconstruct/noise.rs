//! Gaussian measurement noise on harmonic intrinsic volumes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::harmonics::HarmonicBasis;
use crate::tensors::HarmonicVector;

/// Independent N(0, σ²) entries on every degree except degree 1, which is
/// known to vanish for any body and is left noise-free.
pub fn noise_model(n: usize, s_o: usize, sigma: f64, seed: u64) -> Result<HarmonicVector> {
    noise_model_per_degree(n, s_o, &vec![sigma; s_o + 1], seed)
}

/// As [`noise_model`] with a standard deviation per degree 0..=s_o.
pub fn noise_model_per_degree(
    n: usize,
    s_o: usize,
    sigma: &[f64],
    seed: u64,
) -> Result<HarmonicVector> {
    if sigma.len() != s_o + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} standard deviations, got {}",
            s_o + 1,
            sigma.len()
        )));
    }
    if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidInput(
            "standard deviations must be finite and >= 0".into(),
        ));
    }
    let basis = HarmonicBasis::new(n, s_o)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; basis.len()];
    for k in 0..=s_o {
        let off = basis.offset(k);
        for v in &mut values[off..off + basis.degree_count(k)] {
            let draw = Normal::new(0.0, 1.0).expect("unit normal").sample(&mut rng);
            // draw for every entry so the stream does not depend on which σ vanish
            if k != 1 {
                *v = sigma[k] * draw;
            }
        }
    }
    HarmonicVector::new(n, s_o, values)
}
