//! Least-squares fit of a discrete measure in M_{s_o} to a harmonic target.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonics::HarmonicBasis;
use crate::measures::{ClassifyTol, DiscreteMeasure};
use crate::sphere::{fibonacci_points, omega, random_unit};
use crate::tensors::HarmonicVector;

use super::nnls::polish_weights;

const REFINE_ROUNDS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// target is an exact harmonic vector of a body; the optimum is 0
    Exact,
    /// target carries measurement noise
    Noisy,
}

#[derive(Debug, Clone)]
pub struct FitTarget {
    pub target: HarmonicVector,
    pub mode: Mode,
}

/// Optimizer settings for [`fit_measure`].
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// number of starts (the first is the grid warm start when enabled)
    pub starts: usize,
    pub seed: u64,
    /// centroid penalty ρ of the first stage, multiplied by `penalty_factor` per stage
    pub penalty_start: f64,
    pub penalty_factor: f64,
    pub penalty_stages: usize,
    /// Levenberg–Marquardt iterations per stage
    pub max_iter: usize,
    /// exact mode succeeds when the residual is at most exact_tol · ‖target‖
    pub exact_tol: f64,
    /// number of atoms; defaults to m_{s_o}
    pub atoms: Option<usize>,
    pub classify: ClassifyTol,
    /// seed the first start from a nonnegative least-squares fit on a direction grid
    pub grid_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 12,
            seed: 0,
            penalty_start: 1.0,
            penalty_factor: 10.0,
            penalty_stages: 4,
            max_iter: 400,
            exact_tol: 1e-6,
            atoms: None,
            classify: ClassifyTol::default(),
            grid_start: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StartReport {
    pub start: usize,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub measure: DiscreteMeasure,
    /// ‖target − h(μ)‖ = √D_{s_o}
    pub residual: f64,
    pub starts: Vec<StartReport>,
    pub best_start: Option<usize>,
}

/// Atoms parametrized by spherical angles, weights by α = β².
struct Problem<'a> {
    basis: &'a HarmonicBasis,
    n: usize,
    m: usize,
    /// target divided by the mass scale
    t: DVector<f64>,
}

fn direction(n: usize, ang: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    if n == 2 {
        let (s, c) = ang[0].sin_cos();
        (vec![c, s], vec![vec![-s, c]])
    } else {
        let (st, ct) = ang[0].sin_cos();
        let (sp, cp) = ang[1].sin_cos();
        (
            vec![st * cp, st * sp, ct],
            vec![vec![ct * cp, ct * sp, -st], vec![-st * sp, st * cp, 0.0]],
        )
    }
}

fn angles_of(u: &[f64]) -> Vec<f64> {
    if u.len() == 2 {
        vec![u[1].atan2(u[0])]
    } else {
        vec![u[2].clamp(-1.0, 1.0).acos(), u[1].atan2(u[0])]
    }
}

impl Problem<'_> {
    fn atoms(&self, p: &[f64]) -> usize {
        p.len() / self.n
    }

    /// residual vector [h(μ) − t ; √ρ Σ α_j u_j + λ/√ρ] and optionally its
    /// Jacobian; `shift` holds the multiplier λ (empty for a pure penalty)
    fn eval(&self, p: &[f64], rho: f64, shift: &[f64], jac: Option<&mut DMatrix<f64>>) -> DVector<f64> {
        let (n, m) = (self.n, self.m);
        let k = self.atoms(p);
        let sr = rho.sqrt();
        let mut r = DVector::<f64>::zeros(m + n);
        for i in 0..m {
            r[i] = -self.t[i];
        }
        for (d, l) in shift.iter().enumerate() {
            r[m + d] = l / sr;
        }
        let mut vals = vec![0.0; m];
        let mut grads = vec![0.0; m * n];
        let mut jac = jac;
        for j in 0..k {
            let q = &p[j * n..(j + 1) * n];
            let (u, du) = direction(n, &q[..n - 1]);
            let beta = q[n - 1];
            let alpha = beta * beta;
            if jac.is_some() {
                self.basis.eval_with_grad(&u, &mut vals, &mut grads);
            } else {
                self.basis.eval_into(&u, &mut vals);
            }
            for i in 0..m {
                r[i] += alpha * vals[i];
            }
            for d in 0..n {
                r[m + d] += sr * alpha * u[d];
            }
            if let Some(jm) = jac.as_deref_mut() {
                let col0 = j * n;
                for i in 0..m {
                    let g = &grads[i * n..(i + 1) * n];
                    for (a, dv) in du.iter().enumerate() {
                        jm[(i, col0 + a)] = alpha * crate::sphere::dot(g, dv);
                    }
                    jm[(i, col0 + n - 1)] = 2.0 * beta * vals[i];
                }
                for d in 0..n {
                    for (a, dv) in du.iter().enumerate() {
                        jm[(m + d, col0 + a)] = sr * alpha * dv[d];
                    }
                    jm[(m + d, col0 + n - 1)] = sr * 2.0 * beta * u[d];
                }
            }
        }
        r
    }

    /// Levenberg–Marquardt in the dual form (J Jᵀ + λI) y = r, δ = −Jᵀ y,
    /// which is cheap because there are fewer residuals than parameters.
    fn lm(&self, p: &mut Vec<f64>, rho: f64, shift: &[f64], max_iter: usize) -> usize {
        let rows = self.m + self.n;
        let cols = p.len();
        let mut jac = DMatrix::<f64>::zeros(rows, cols);
        let mut r = self.eval(p, rho, shift, Some(&mut jac));
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3 * (&jac * jac.transpose()).diagonal().amax().max(1e-12);
        let mut iters = 0;
        let mut stalls = 0;
        while iters < max_iter {
            iters += 1;
            if cost < 1e-30 {
                break;
            }
            let jjt = &jac * jac.transpose();
            let grad = jac.transpose() * &r;
            if grad.amax() < 1e-16 {
                break;
            }
            let mut accepted = false;
            for _ in 0..20 {
                let mut a = jjt.clone();
                for i in 0..rows {
                    a[(i, i)] += lambda;
                }
                let Some(ch) = a.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let y = ch.solve(&r);
                let delta = -(jac.transpose() * y);
                let trial: Vec<f64> = p.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
                let rt = self.eval(&trial, rho, shift, None);
                let ct = rt.norm_squared();
                if ct < cost {
                    let rel = (cost - ct) / cost;
                    *p = trial;
                    r = self.eval(p, rho, shift, Some(&mut jac));
                    cost = r.norm_squared();
                    lambda = (lambda / 3.0).max(1e-300);
                    accepted = true;
                    stalls = if rel < 1e-13 { stalls + 1 } else { 0 };
                    break;
                }
                lambda *= 4.0;
                if lambda > 1e20 {
                    break;
                }
            }
            if !accepted || stalls >= 5 {
                break;
            }
        }
        iters
    }

    fn measure(&self, p: &[f64], scale: f64) -> DiscreteMeasure {
        let n = self.n;
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for q in p.chunks(n) {
            let w = q[n - 1] * q[n - 1];
            if w > 0.0 {
                atoms.push(direction(n, &q[..n - 1]).0);
                weights.push(w * scale);
            }
        }
        DiscreteMeasure { n, atoms, weights }
    }

    fn matrices(&self, p: &[f64]) -> (Vec<Vec<f64>>, DMatrix<f64>, DMatrix<f64>) {
        let n = self.n;
        let dirs: Vec<Vec<f64>> = p.chunks(n).map(|q| direction(n, &q[..n - 1]).0).collect();
        let mut h = DMatrix::<f64>::zeros(self.m, dirs.len());
        for (j, u) in dirs.iter().enumerate() {
            h.set_column(j, &DVector::from_vec(self.basis.eval(u)));
        }
        let umat = DMatrix::from_fn(n, dirs.len(), |d, j| dirs[j][d]);
        (dirs, h, umat)
    }

    /// Replace the weights by the exact constrained NNLS optimum for the current atoms.
    fn polish(&self, p: &[f64]) -> Vec<f64> {
        let n = self.n;
        let (_, h, umat) = self.matrices(p);
        let alpha = polish_weights(&h, &umat, &self.t);
        let mut out = Vec::with_capacity(p.len());
        for (j, q) in p.chunks(n).enumerate() {
            if alpha[j] > 0.0 {
                out.extend_from_slice(&q[..n - 1]);
                out.push(alpha[j].sqrt());
            }
        }
        out
    }

    /// Most violated optimality condition of a polished point: the direction u
    /// maximizing ⟨h(u), t − h(μ)⟩ − ⟨λ, u⟩, where λ is the least-squares
    /// multiplier of the closure constraint on the current support. A positive
    /// value means adding an atom at u lowers the objective.
    fn price(&self, p: &[f64], grid: &[Vec<f64>]) -> (Vec<f64>, f64) {
        let n = self.n;
        let (_, h, umat) = self.matrices(p);
        let alpha = DVector::from_iterator(h.ncols(), p.chunks(n).map(|q| q[n - 1] * q[n - 1]));
        let r = &self.t - &h * alpha;
        let lambda = if h.ncols() > 0 {
            let svd = umat.transpose().svd(true, true);
            let smax = svd.singular_values.max();
            svd.solve(&(h.transpose() * &r), 1e-12 * smax.max(1e-300))
                .unwrap_or_else(|_| DVector::zeros(n))
        } else {
            DVector::zeros(n)
        };
        let mut vals = vec![0.0; self.m];
        let mut grads = vec![0.0; self.m * n];
        let mut gain = |u: &[f64], want_grad: bool| -> (f64, Vec<f64>) {
            if want_grad {
                self.basis.eval_with_grad(u, &mut vals, &mut grads);
            } else {
                self.basis.eval_into(u, &mut vals);
            }
            let mut g = -crate::sphere::dot(lambda.as_slice(), u);
            for i in 0..self.m {
                g += r[i] * vals[i];
            }
            if !want_grad {
                return (g, Vec::new());
            }
            let mut d: Vec<f64> = (0..n).map(|a| -lambda[a]).collect();
            for i in 0..self.m {
                for a in 0..n {
                    d[a] += r[i] * grads[i * n + a];
                }
            }
            // tangential part
            let radial = crate::sphere::dot(&d, u);
            (g, d.iter().zip(u).map(|(x, y)| x - radial * y).collect())
        };
        let mut best = grid
            .iter()
            .map(|u| (gain(u, false).0, u))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(g, u)| (u.clone(), g))
            .expect("nonempty grid");
        // gradient ascent on the sphere with step backtracking
        let mut step = 0.1;
        for _ in 0..200 {
            let (g, d) = gain(&best.0, true);
            let dn = crate::sphere::norm(&d);
            if dn < 1e-15 {
                break;
            }
            let mut moved = false;
            while step > 1e-12 {
                let trial = crate::sphere::normalize(
                    &best.0.iter().zip(&d).map(|(x, y)| x + step * y / dn).collect::<Vec<_>>(),
                );
                let gt = gain(&trial, false).0;
                if gt > g {
                    best = (trial, gt);
                    step *= 2.0;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        best
    }

    /// Exchange refinement of a polished point: repeatedly add the most
    /// violated direction, re-polish and let LM move the atoms. The fit is
    /// convex in harmonic coordinates, so when no direction has positive gain
    /// the harmonic vector is the global optimum.
    fn refine(&self, p: Vec<f64>, rho: f64, max_iter: usize) -> (Vec<f64>, f64, usize) {
        let grid = fibonacci_points(self.n, if self.n == 2 { 720 } else { 2000 });
        let mut best = p;
        let mut best_res = self.residual(&best);
        let mut iters = 0;
        let tol = 1e-15 * self.t.norm().max(1.0);
        for _ in 0..REFINE_ROUNDS {
            let (u, g) = self.price(&best, &grid);
            if !(g > tol) {
                break;
            }
            let mut q = best.clone();
            q.extend(angles_of(&u));
            q.push(0.0);
            let q = self.polish(&q);
            let mut q2 = q.clone();
            iters += self.lm_exact(&mut q2, rho, max_iter);
            let q2 = self.polish(&q2);
            let (r1, r2) = (self.residual(&q), self.residual(&q2));
            let (cand, res) = if r2 < r1 { (q2, r2) } else { (q, r1) };
            if res < best_res {
                best = cand;
                best_res = res;
            } else {
                break;
            }
        }
        (best, best_res, iters)
    }

    fn residual(&self, p: &[f64]) -> f64 {
        self.eval(p, 0.0, &[], None).rows(0, self.m).norm()
    }

    /// Σ α_j u_j
    fn centroid(&self, p: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut c = vec![0.0; n];
        for q in p.chunks(n) {
            let u = direction(n, &q[..n - 1]).0;
            for d in 0..n {
                c[d] += q[n - 1] * q[n - 1] * u[d];
            }
        }
        c
    }

    fn closure(&self, p: &[f64]) -> f64 {
        crate::sphere::norm(&self.centroid(p))
    }

    /// Damped Newton on ½‖r‖² with the Hessian from central differences of
    /// the exact gradient Jᵀr. Unlike Gauss–Newton it keeps second-order
    /// convergence when the optimal residual is large.
    fn newton(&self, p: &mut Vec<f64>, rho: f64, shift: &[f64], max_iter: usize) -> usize {
        let (rows, cols) = (self.m + self.n, p.len());
        let mut jac = DMatrix::<f64>::zeros(rows, cols);
        let mut grad_at = |q: &[f64]| -> (f64, DVector<f64>) {
            let r = self.eval(q, rho, shift, Some(&mut jac));
            (0.5 * r.norm_squared(), jac.transpose() * r)
        };
        let (mut cost, mut grad) = grad_at(p);
        let mut mu = 1e-8;
        let mut iters = 0;
        while iters < max_iter {
            iters += 1;
            let h = 1e-6;
            let mut hess = DMatrix::<f64>::zeros(cols, cols);
            let mut q = p.clone();
            for i in 0..cols {
                q[i] = p[i] + h;
                let gp = grad_at(&q).1;
                q[i] = p[i] - h;
                let gm = grad_at(&q).1;
                q[i] = p[i];
                hess.set_column(i, &((gp - gm) / (2.0 * h)));
            }
            let hess = (&hess + hess.transpose()) * 0.5;
            let mut accepted = false;
            while mu < 1e12 {
                let mut a = hess.clone();
                for i in 0..cols {
                    a[(i, i)] += mu;
                }
                if let Some(ch) = a.cholesky() {
                    let delta = ch.solve(&(-&grad));
                    let trial: Vec<f64> = p.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
                    let ct = 0.5 * self.eval(&trial, rho, shift, None).norm_squared();
                    if ct < cost {
                        *p = trial;
                        let prev = cost;
                        (cost, grad) = grad_at(p);
                        mu = (mu / 10.0).max(1e-12);
                        accepted = prev - cost > 1e-17 * prev;
                        break;
                    }
                }
                mu *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        iters
    }

    /// Augmented-Lagrangian LM: the closure holds exactly in the limit
    /// without driving the penalty to ill-conditioned values.
    fn lm_exact(&self, p: &mut Vec<f64>, rho: f64, max_iter: usize) -> usize {
        let mut shift = vec![0.0; self.n];
        let mut iters = 0;
        for _ in 0..30 {
            iters += self.lm(p, rho, &shift, max_iter);
            iters += self.newton(p, rho, &shift, 50);
            let c = self.centroid(p);
            if crate::sphere::norm(&c) <= 1e-15 * self.t.norm().max(1.0) {
                break;
            }
            for (l, cd) in shift.iter_mut().zip(&c) {
                *l += rho * cd;
            }
        }
        iters
    }
}

/// Grid warm start: constrained NNLS over a quasi-uniform direction set.
fn grid_params(prob: &Problem, k: usize) -> Vec<f64> {
    let n = prob.n;
    let count = if n == 2 { 360 } else { (20 * prob.m).max(600) };
    let dirs = fibonacci_points(n, count);
    let mut h = DMatrix::<f64>::zeros(prob.m, count);
    for (j, u) in dirs.iter().enumerate() {
        let v = prob.basis.eval(u);
        for i in 0..prob.m {
            h[(i, j)] = v[i];
        }
    }
    let umat = DMatrix::from_fn(n, count, |d, j| dirs[j][d]);
    let alpha = polish_weights(&h, &umat, &prob.t);
    let mut idx: Vec<usize> = (0..count).filter(|&j| alpha[j] > 0.0).collect();
    idx.sort_by(|&a, &b| alpha[b].total_cmp(&alpha[a]));
    idx.truncate(k);
    let mut p = Vec::with_capacity(idx.len() * n);
    for j in idx {
        p.extend(angles_of(&dirs[j]));
        p.push(alpha[j].sqrt());
    }
    p
}

fn random_params(n: usize, k: usize, seed: u64, start: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    let beta = (1.0 / k as f64).sqrt();
    let mut p = Vec::with_capacity(k * n);
    for _ in 0..k {
        p.extend(angles_of(&random_unit(n, &mut rng)));
        p.push(beta);
    }
    p
}

fn run_start(prob: &Problem, cfg: &SolverConfig, k: usize, start: usize) -> (Vec<f64>, f64, usize) {
    let mut p = if cfg.grid_start && start == 0 {
        grid_params(prob, k)
    } else {
        random_params(prob.n, k, cfg.seed, start)
    };
    if p.is_empty() {
        return (p, prob.t.norm(), 0);
    }
    let mut iters = 0;
    let mut rho = cfg.penalty_start;
    for _ in 0..cfg.penalty_stages {
        iters += prob.lm(&mut p, rho, &[], cfg.max_iter);
        rho *= cfg.penalty_factor;
    }
    rho /= cfg.penalty_factor;
    let mut best = prob.polish(&p);
    let mut best_res = prob.residual(&best);
    // a further round on the surviving atoms, polished again
    for _ in 0..2 {
        if best.is_empty() {
            break;
        }
        let mut q = best.clone();
        iters += prob.lm(&mut q, rho, &[], cfg.max_iter);
        let q = prob.polish(&q);
        let res = prob.residual(&q);
        if res < best_res * (1.0 - 1e-12) {
            best = q;
            best_res = res;
        } else {
            break;
        }
    }
    (best, best_res, iters)
}

/// Fits a measure with at most `atoms` (default m_{s_o}) atoms, nonnegative
/// weights and vanishing first moment to the target harmonic vector.
///
/// Working in harmonic coordinates is equivalent to fitting moments, since the
/// two are related by the fixed invertible map f; the harmonic objective
/// ‖h(μ) − target‖² avoids the badly scaled constants of raw tensor space.
pub fn fit_measure(target: &FitTarget, cfg: &SolverConfig) -> Result<FitOutcome> {
    let hv = &target.target;
    let (n, s_o) = (hv.n, hv.s_o);
    if s_o < 2 {
        return Err(Error::Precondition("fitting needs s_o >= 2".into()));
    }
    if cfg.starts == 0 || cfg.penalty_stages == 0 {
        return Err(Error::InvalidInput(
            "starts and penalty stages must be positive".into(),
        ));
    }
    let basis = HarmonicBasis::new(n, s_o)?;
    let m = basis.len();
    let tnorm = hv.norm();
    if tnorm == 0.0 {
        return Ok(FitOutcome {
            measure: DiscreteMeasure::zero(n),
            residual: 0.0,
            starts: Vec::new(),
            best_start: None,
        });
    }
    let mut scale = omega(n).sqrt() * hv.values[0];
    if !(scale > 1e-12 * tnorm) {
        scale = tnorm;
    }
    let prob = Problem {
        basis: &basis,
        n,
        m,
        t: DVector::from_iterator(m, hv.values.iter().map(|v| v / scale)),
    };
    let k = cfg.atoms.unwrap_or(m).max(1);
    let tol = cfg.exact_tol * tnorm / scale;

    let runs: Vec<(Vec<f64>, f64, usize)> = match target.mode {
        Mode::Exact => {
            let mut out = Vec::new();
            for start in 0..cfg.starts {
                let r = run_start(&prob, cfg, k, start);
                let done = r.1 <= tol;
                out.push(r);
                if done {
                    break;
                }
            }
            out
        }
        Mode::Noisy => (0..cfg.starts)
            .into_par_iter()
            .map(|start| run_start(&prob, cfg, k, start))
            .collect(),
    };
    let reports: Vec<StartReport> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| StartReport {
            start: i,
            residual: r.1 * scale,
            iterations: r.2,
        })
        .collect();
    let (best_idx, best) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    let rho = cfg.penalty_start * cfg.penalty_factor.powi(cfg.penalty_stages as i32 - 1);
    let best = if best.0.is_empty() || best.1 <= tol {
        best.clone()
    } else {
        prob.refine(best.0.clone(), rho, cfg.max_iter)
    };
    let best = &best;
    let zero_res = prob.t.norm();
    if best.1 >= zero_res {
        // the zero measure is at least as good
        return match target.mode {
            Mode::Exact => Err(Error::NoExactFit {
                residual: tnorm,
                tolerance: cfg.exact_tol * tnorm,
            }),
            Mode::Noisy => Ok(FitOutcome {
                measure: DiscreteMeasure::zero(n),
                residual: tnorm,
                starts: reports,
                best_start: None,
            }),
        };
    }
    let residual = best.1 * scale;
    debug_assert!(prob.closure(&best.0) <= 1e-8 * 1.0f64.max(prob.t[0]));
    if target.mode == Mode::Exact && residual > cfg.exact_tol * tnorm {
        return Err(Error::NoExactFit {
            residual,
            tolerance: cfg.exact_tol * tnorm,
        });
    }
    Ok(FitOutcome {
        measure: prob.measure(&best.0, scale),
        residual,
        starts: reports,
        best_start: Some(best_idx),
    })
}
