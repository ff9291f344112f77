//! Shape reconstruction from exact surface tensors or noisy harmonic
//! intrinsic volumes.

mod fit;
mod nnls;
mod noise;

pub use fit::{fit_measure, FitOutcome, FitTarget, Mode, SolverConfig, StartReport};
pub use nnls::{nnls, polish_weights};
pub use noise::{noise_model, noise_model_per_degree};

use serde::Serialize;

use crate::bodies::{write_off, Polytope};
use crate::error::{Error, Result};
use crate::measures::{classify, DiscreteMeasure, MeasureClass};
use crate::minkowski::{mink_reconstruct, MinkProblem};
use crate::sphere::{normalize, tangent_basis};
use crate::tensors::{HarmonicVector, MomentHarmonicMap, TensorSet};

/// Atoms lighter than this fraction of the mass are dropped before Minkowski.
const PRUNE_REL: f64 = 1e-11;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    Case1_Point,
    Case2_LowerDim,
    Case3_Polytope,
    Case4_NoOutput,
}

/// Geometric output of a reconstruction.
#[derive(Debug, Clone)]
pub enum Output {
    /// the body {0}
    Point {
        n: usize,
    },
    /// centered (n−1)-cube in u^⊥ with (n−1)-volume `area`
    Flat {
        normal: Vec<f64>,
        area: f64,
        vertices: Vec<Vec<f64>>,
    },
    Polytope(Polytope),
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub starts: Vec<StartReport>,
    pub best_start: Option<usize>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub measure: DiscreteMeasure,
    /// ‖target − h(μ)‖
    pub residual: f64,
    pub case: CaseTag,
    pub output: Option<Output>,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct ResultFile<'a> {
    kind: &'static str,
    case: CaseTag,
    residual: f64,
    n: usize,
    atoms: &'a [Vec<f64>],
    weights: &'a [f64],
    vertices: Option<Vec<Vec<f64>>>,
    diagnostics: &'a Diagnostics,
}

impl ReconstructionResult {
    pub fn polytope(&self) -> Option<&Polytope> {
        match &self.output {
            Some(Output::Polytope(p)) => Some(p),
            _ => None,
        }
    }

    /// OFF mesh for Cases 2 and 3.
    pub fn off(&self) -> Option<String> {
        match &self.output {
            Some(Output::Polytope(p)) => Some(write_off(p)),
            Some(Output::Flat { vertices, .. }) => Some(flat_off(vertices)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let vertices = match &self.output {
            Some(Output::Point { n }) => Some(vec![vec![0.0; *n]]),
            Some(Output::Flat { vertices, .. }) => Some(vertices.clone()),
            Some(Output::Polytope(p)) => Some(p.vertices.clone()),
            None => None,
        };
        Ok(serde_json::to_string_pretty(&ResultFile {
            kind: "reconstruction",
            case: self.case,
            residual: self.residual,
            n: self.measure.n,
            atoms: &self.measure.atoms,
            weights: &self.measure.weights,
            vertices,
            diagnostics: &self.diagnostics,
        })?)
    }
}

fn flat_off(vertices: &[Vec<f64>]) -> String {
    let mut out = format!("OFF\n{} 1 0\n", vertices.len());
    for v in vertices {
        let z = v.get(2).copied().unwrap_or(0.0);
        out.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", v[0], v[1], z));
    }
    out.push_str(&vertices.len().to_string());
    for i in 0..vertices.len() {
        out.push_str(&format!(" {i}"));
    }
    out.push('\n');
    out
}

/// Centered segment (n = 2) or square (n = 3) in u^⊥ with (n−1)-volume `area`.
fn flat_cube(axis: &[f64], area: f64) -> Vec<Vec<f64>> {
    let u = normalize(axis);
    if u.len() == 2 {
        let t = [-u[1], u[0]];
        let h = area / 2.0;
        vec![vec![-h * t[0], -h * t[1]], vec![h * t[0], h * t[1]]]
    } else {
        let (e1, e2) = tangent_basis(&u);
        let h = area.sqrt() / 2.0;
        [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .iter()
            .map(|(a, b)| (0..3).map(|d| h * (a * e1[d] + b * e2[d])).collect())
            .collect()
    }
}

fn diagnostics(fit: &FitOutcome) -> Diagnostics {
    Diagnostics {
        starts: fit.starts.clone(),
        best_start: fit.best_start,
        iterations: fit.starts.iter().map(|s| s.iterations).sum(),
    }
}

fn polytope_from(mu: &DiscreteMeasure) -> Result<Polytope> {
    let pruned = mu.pruned(PRUNE_REL * mu.mass());
    mink_reconstruct(&MinkProblem::from_measure(&pruned))
}

/// Reconstruction from surface tensors Φ^{s_o−1}, Φ^{s_o} (and hence all lower ranks).
///
/// The tensors are mapped to harmonic coordinates, a measure with at most
/// m_{s_o} atoms and the same moments is fitted (its existence is guaranteed,
/// so the optimum value is 0), and the polytope with that surface area
/// measure is built.
pub fn algorithm_surface_tensor(
    tensors: &TensorSet,
    cfg: &SolverConfig,
) -> Result<ReconstructionResult> {
    if tensors.s_o < 2 {
        return Err(Error::Precondition(
            "surface tensor reconstruction needs s_o >= 2".into(),
        ));
    }
    let map = MomentHarmonicMap::new(tensors.n, tensors.s_o)?;
    let target = map.moment_to_harmonic(tensors)?;
    let fit = fit_measure(
        &FitTarget {
            target,
            mode: Mode::Exact,
        },
        cfg,
    )?;
    match classify(&fit.measure, cfg.classify) {
        MeasureClass::FullDim => {}
        other => {
            return Err(Error::Precondition(format!(
                "fitted measure is not full-dimensional ({other:?}); input is not from a body with interior"
            )))
        }
    }
    let poly = polytope_from(&fit.measure)?;
    Ok(ReconstructionResult {
        diagnostics: diagnostics(&fit),
        residual: fit.residual,
        case: CaseTag::Case3_Polytope,
        output: Some(Output::Polytope(poly)),
        measure: fit.measure,
    })
}

/// Least-squares reconstruction from noisy harmonic intrinsic volumes,
/// with the four-way case analysis of the fitted measure.
pub fn algorithm_hiv_lsq(
    measurements: &HarmonicVector,
    cfg: &SolverConfig,
) -> Result<ReconstructionResult> {
    if measurements.s_o < 2 {
        return Err(Error::Precondition(
            "least-squares reconstruction needs s_o >= 2".into(),
        ));
    }
    let fit = fit_measure(
        &FitTarget {
            target: measurements.clone(),
            mode: Mode::Noisy,
        },
        cfg,
    )?;
    let n = measurements.n;
    let (case, output) = match classify(&fit.measure, cfg.classify) {
        MeasureClass::Zero => (CaseTag::Case1_Point, Some(Output::Point { n })),
        MeasureClass::RankOne { axis, surface_area } => {
            let vertices = flat_cube(&axis, surface_area);
            (
                CaseTag::Case2_LowerDim,
                Some(Output::Flat {
                    normal: axis,
                    area: surface_area,
                    vertices,
                }),
            )
        }
        MeasureClass::FullDim => (
            CaseTag::Case3_Polytope,
            Some(Output::Polytope(polytope_from(&fit.measure)?)),
        ),
        MeasureClass::NotSurfaceArea => (CaseTag::Case4_NoOutput, None),
    };
    Ok(ReconstructionResult {
        diagnostics: diagnostics(&fit),
        residual: fit.residual,
        case,
        output,
        measure: fit.measure,
    })
}
