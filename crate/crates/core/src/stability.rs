//! Explicit stability bounds and the consistency experiments.
//!
//! The stability theorem bounds the Dudley distance of surface area measures
//! by c(n, R, ε)·s_o^{(ε−1)/2} + δ with a constant that is not given
//! explicitly. Everything here uses the right-hand side that appears in its
//! proof instead, which is fully computable:
//! 2R^{n−1}ω_n (s_o^{(ε−1)/2} + 2ω_n E_{n s_o} e^{−s_o^ε/4}) + δ.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{inclusion_radii, reference_body, translative_hausdorff, BodySpec, Polytope};
use crate::error::{Error, Result};
use crate::harmonics::{project_at, projection_constants, total_dim, QuadratureRule};
use crate::measures::{dudley, DiscreteMeasure};
use crate::reconstruct::{
    algorithm_hiv_lsq, algorithm_surface_tensor, noise_model, CaseTag, SolverConfig,
};
use crate::sphere::{check_dim, dot, fibonacci_points, norm, omega, sub};
use crate::tensors::{harmonic_vector, surface_tensor, HarmonicVector, TensorSet};

/// Uniform error bound for the kernel approximation Π_k:
/// ‖Π_k f − f‖_∞ ≤ √k^{ε−1} L(f) + 2ω_n E_{nk} e^{−k^ε/4} ‖f‖_∞.
pub fn projection_bound(
    n: usize,
    k: usize,
    eps: f64,
    lipschitz: f64,
    sup_norm: f64,
) -> Result<f64> {
    check_eps(eps)?;
    let e = projection_constants(n, k)?.e;
    let kf = k as f64;
    Ok(kf.sqrt().powf(eps - 1.0) * lipschitz
        + 2.0 * omega(n) * e * (-0.25 * kf.powf(eps)).exp() * sup_norm)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("ε = {eps} must lie in (0, 1)")))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundCheck {
    pub measured: f64,
    pub bound: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.measured <= self.bound
    }
}

/// Measures sup |Π_k f − f| over a dense point set, with Π_k f evaluated by
/// `rule`, and compares it with [`projection_bound`] for the supplied
/// Lipschitz constant and sup norm of f.
pub fn projection_bound_check(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    lipschitz: f64,
    sup_norm: f64,
    rule: &QuadratureRule,
    k: usize,
    eps: f64,
) -> Result<BoundCheck> {
    let n = rule.dim;
    let bound = projection_bound(n, k, eps, lipschitz, sup_norm)?;
    let values: Vec<f64> = rule.nodes.iter().map(|u| f(u)).collect();
    let mut points = fibonacci_points(n, if n == 2 { 720 } else { 2000 });
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            points.push(e);
        }
    }
    let proj = project_at(rule, &values, k, &points)?;
    let measured = points
        .iter()
        .zip(&proj)
        .map(|(u, p)| (p - f(u)).abs())
        .fold(0.0, f64::max);
    Ok(BoundCheck { measured, bound })
}

/// Right-hand side from the proof of the stability theorem for bodies in RBⁿ.
pub fn explicit_noise_bound(
    n: usize,
    radius: f64,
    s_o: usize,
    eps: f64,
    delta: f64,
) -> Result<f64> {
    check_dim(n)?;
    check_eps(eps)?;
    if !(radius > 0.0) || s_o == 0 || delta < 0.0 {
        return Err(Error::InvalidInput(
            "need R > 0, s_o >= 1 and δ >= 0".into(),
        ));
    }
    let w = omega(n);
    let e = projection_constants(n, s_o)?.e;
    let s = s_o as f64;
    Ok(2.0
        * radius.powi(n as i32 - 1)
        * w
        * (s.powf((eps - 1.0) / 2.0) + 2.0 * w * e * (-0.25 * s.powf(eps)).exp())
        + delta)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DudleyReport {
    pub dudley: f64,
    /// √(ω_n m_{s_o}) ‖h(K) − h(L)‖
    pub delta: f64,
    pub bound: f64,
}

impl DudleyReport {
    pub fn holds(&self) -> bool {
        self.dudley <= self.bound
    }
}

/// Dudley distance of two surface area measures of bodies in RBⁿ against the
/// explicit bound with δ taken from their harmonic gap up to degree s_o.
pub fn dudley_vs_bound(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    radius: f64,
    s_o: usize,
    eps: f64,
) -> Result<DudleyReport> {
    let n = mu.n;
    let hk = harmonic_vector(mu, s_o)?;
    let hl = harmonic_vector(nu, s_o)?;
    let gap = hk
        .values
        .iter()
        .zip(&hl.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let delta = (omega(n) * total_dim(n, s_o)? as f64).sqrt() * gap;
    Ok(DudleyReport {
        dudley: dudley(mu, nu)?,
        delta,
        bound: explicit_noise_bound(n, radius, s_o, eps, delta)?,
    })
}

/// σ²_{s_o} = s_o^{−(2n−1+ε)}: noise variances for which the least-squares
/// reconstruction is strongly consistent.
pub fn variance_schedule(n: usize, s_o: usize, eps: f64) -> f64 {
    (s_o as f64).powf(-(2.0 * n as f64 - 1.0 + eps))
}

/// Largest r with r·Bⁿ + c ⊆ P and smallest R with P ⊆ R·Bⁿ + c.
fn polytope_radii(p: &Polytope, c: &[f64]) -> (f64, f64) {
    let inner = p
        .normals
        .iter()
        .zip(&p.supports)
        .map(|(u, h)| h - dot(u, c))
        .fold(f64::INFINITY, f64::min);
    let outer = p
        .vertices
        .iter()
        .map(|v| norm(&sub(v, c)))
        .fold(0.0, f64::max);
    (inner, outer)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub s_o: usize,
    pub residual: f64,
    pub dt: f64,
    pub seconds: f64,
    /// radii derived from Φ² and S alone
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// rBⁿ ⊆ output − centroid ⊆ RBⁿ
    pub contained: bool,
}

/// Surface-tensor reconstruction of a reference body for each s_o, with the
/// translative Hausdorff distance to the body.
pub fn convergence_experiment(
    spec: &BodySpec,
    orders: &[usize],
    resolution: usize,
    cfg: &SolverConfig,
) -> Result<Vec<ConvergenceRow>> {
    let body = reference_body(spec, resolution)?;
    let mu = body.surface_area_measure(resolution)?;
    let (r, big_r) = inclusion_radii(&surface_tensor(&mu, 2), mu.mass())?;
    orders
        .par_iter()
        .map(|&s_o| {
            let start = Instant::now();
            let tensors = TensorSet::from_measure(&mu, s_o, false)?;
            let res = algorithm_surface_tensor(&tensors, cfg)?;
            let poly = res
                .polytope()
                .expect("surface tensor reconstruction yields a polytope");
            let dt = translative_hausdorff(&body, poly)?;
            let (inner, outer) = polytope_radii(poly, &poly.centroid());
            Ok(ConvergenceRow {
                s_o,
                residual: res.residual,
                dt,
                seconds: start.elapsed().as_secs_f64(),
                r,
                big_r,
                contained: r <= inner && outer <= big_r,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseRow {
    pub sigma2: f64,
    pub trial: usize,
    pub case: CaseTag,
    /// translative Hausdorff distance to the body (Case 3 only)
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseSummary {
    pub sigma2: f64,
    pub mean_dt: f64,
    pub case1: usize,
    pub case2: usize,
    pub case3: usize,
    pub case4: usize,
}

/// Noisy least-squares reconstructions: for each variance and trial, the
/// body's harmonic vector up to s_o plus N(0, σ²) noise seeded by
/// `seed + trial` (the same standardized draw at every σ).
pub fn noise_experiment(
    spec: &BodySpec,
    s_o: usize,
    variances: &[f64],
    trials: usize,
    seed: u64,
    resolution: usize,
    cfg: &SolverConfig,
) -> Result<Vec<NoiseRow>> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if variances.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidInput("variances must be >= 0".into()));
    }
    let body = reference_body(spec, resolution)?;
    let mu = body.surface_area_measure(resolution)?;
    let clean = harmonic_vector(&mu, s_o)?;
    let cells: Vec<(f64, usize)> = variances
        .iter()
        .flat_map(|&v| (0..trials).map(move |t| (v, t)))
        .collect();
    cells
        .par_iter()
        .map(|&(sigma2, trial)| {
            let eps = noise_model(clean.n, s_o, sigma2.sqrt(), seed.wrapping_add(trial as u64))?;
            let target = HarmonicVector::new(
                clean.n,
                s_o,
                clean
                    .values
                    .iter()
                    .zip(&eps.values)
                    .map(|(a, b)| a + b)
                    .collect(),
            )?;
            let res = algorithm_hiv_lsq(&target, cfg)?;
            let dt = match res.polytope() {
                Some(p) if res.case == CaseTag::Case3_Polytope => {
                    Some(translative_hausdorff(&body, p)?)
                }
                _ => None,
            };
            Ok(NoiseRow {
                sigma2,
                trial,
                case: res.case,
                dt,
            })
        })
        .collect()
}

/// Per-variance mean δ^t over Case-3 trials and the case counts.
pub fn summarize_noise(rows: &[NoiseRow]) -> Vec<NoiseSummary> {
    let mut levels: Vec<f64> = rows.iter().map(|r| r.sigma2).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
        .into_iter()
        .map(|sigma2| {
            let cell: Vec<&NoiseRow> = rows.iter().filter(|r| r.sigma2 == sigma2).collect();
            let count = |c: CaseTag| cell.iter().filter(|r| r.case == c).count();
            let dts: Vec<f64> = cell.iter().filter_map(|r| r.dt).collect();
            NoiseSummary {
                sigma2,
                mean_dt: if dts.is_empty() {
                    f64::NAN
                } else {
                    dts.iter().sum::<f64>() / dts.len() as f64
                },
                case1: count(CaseTag::Case1_Point),
                case2: count(CaseTag::Case2_LowerDim),
                case3: count(CaseTag::Case3_Polytope),
                case4: count(CaseTag::Case4_NoOutput),
            }
        })
        .collect()
}

/// Rows as CSV with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
