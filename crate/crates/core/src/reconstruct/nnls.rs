//! Nonnegative least squares (Lawson–Hanson active set) and the weight polish
//! onto {α ≥ 0, Σ α_j u_j = 0}.

use nalgebra::{DMatrix, DVector};

/// Least squares on the listed columns (SVD, rank-revealing).
fn ls_on(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |r, c| a[(r, cols[c])]);
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(b, 1e-13 * smax.max(1e-300))
        .unwrap_or_else(|_| DVector::zeros(cols.len()))
}

/// argmin ‖A x − b‖ over x ≥ 0.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let p = a.ncols();
    let mut x = DVector::<f64>::zeros(p);
    let mut passive = vec![false; p];
    let scale = a.amax().max(1e-300) * b.amax().max(1e-300);
    let tol = 1e-12 * scale * (a.nrows().max(p) as f64);
    let max_outer = 3 * p + 10;
    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let cand = (0..p)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = cand else { break };
        passive[j] = true;
        for _ in 0..p + 1 {
            let cols: Vec<usize> = (0..p).filter(|&i| passive[i]).collect();
            let z = ls_on(a, b, &cols);
            if z.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &c) in cols.iter().enumerate() {
                    x[c] = z[k];
                }
                break;
            }
            // step from x towards z until the first passive entry hits zero
            let mut alpha = 1.0f64;
            for (k, &c) in cols.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[c] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[c] / denom);
                    }
                }
            }
            for (k, &c) in cols.iter().enumerate() {
                x[c] += alpha * (z[k] - x[c]);
            }
            for &c in &cols {
                if x[c] <= 1e-15 * scale.sqrt() {
                    x[c] = 0.0;
                    passive[c] = false;
                }
            }
            if !passive.iter().any(|&q| q) {
                break;
            }
        }
    }
    x
}

/// Weights α ≥ 0 on fixed atoms minimizing ‖H α − t‖ with Σ α_j u_j = 0 exactly.
///
/// `h` is m × k (harmonics at the atoms), `u` is n × k (the atoms). The
/// equality is first imposed by heavy row weighting inside NNLS; on the
/// resulting support it is then imposed exactly by least squares over the null
/// space of the support's atom matrix. If that exact solution leaves the
/// nonnegative orthant, the heavily weighted solution is projected onto the
/// equality instead (minimal-norm correction, repeated with clipping).
pub fn polish_weights(h: &DMatrix<f64>, u: &DMatrix<f64>, t: &DVector<f64>) -> DVector<f64> {
    let (m, k) = (h.nrows(), h.ncols());
    let n = u.nrows();
    let weight = 1e4 * h.amax().max(1.0);
    let mut a = DMatrix::<f64>::zeros(m + n, k);
    a.view_mut((0, 0), (m, k)).copy_from(h);
    a.view_mut((m, 0), (n, k)).copy_from(&(u * weight));
    let mut b = DVector::<f64>::zeros(m + n);
    b.rows_mut(0, m).copy_from(t);
    let x = nnls(&a, &b);

    let support: Vec<usize> = (0..k).filter(|&j| x[j] > 0.0).collect();
    if support.is_empty() {
        return x;
    }
    let us = DMatrix::from_fn(n, support.len(), |r, c| u[(r, support[c])]);
    let hs = DMatrix::from_fn(m, support.len(), |r, c| h[(r, support[c])]);
    // null space of us: complement of its row space
    let svd = us.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-12 * smax.max(1e-300))
        .count();
    let rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-12 * smax.max(1e-300))
        .collect();
    let row_space = DMatrix::from_fn(support.len(), rank, |r, c| vt[(rows[c], r)]);
    let null = null_space_complement(&row_space, rank, support.len());
    if null.ncols() > 0 {
        let y = ls_on(&(&hs * &null), t, &(0..null.ncols()).collect::<Vec<_>>());
        let alpha = &null * y;
        if alpha.iter().all(|&v| v >= 0.0) {
            let mut out = DVector::zeros(k);
            for (i, &j) in support.iter().enumerate() {
                out[j] = alpha[i];
            }
            return out;
        }
    }
    // fallback: project the NNLS weights onto the equality, clipping negatives
    let mut alpha = DVector::from_iterator(support.len(), support.iter().map(|&j| x[j]));
    for _ in 0..50 {
        let active: Vec<usize> = (0..support.len()).filter(|&i| alpha[i] > 0.0).collect();
        if active.is_empty() {
            break;
        }
        let ua = DMatrix::from_fn(n, active.len(), |r, c| us[(r, active[c])]);
        let resid = &ua * DVector::from_iterator(active.len(), active.iter().map(|&i| alpha[i]));
        if resid.norm() <= 1e-15 * alpha.sum() {
            break;
        }
        let gram = &ua * ua.transpose();
        let Some(lam) = gram
            .clone()
            .pseudo_inverse(1e-14 * gram.amax().max(1e-300))
            .ok()
            .map(|g| g * &resid)
        else {
            break;
        };
        let corr = ua.transpose() * lam;
        for (c, &i) in active.iter().enumerate() {
            alpha[i] = (alpha[i] - corr[c]).max(0.0);
        }
    }
    let mut out = DVector::zeros(k);
    for (i, &j) in support.iter().enumerate() {
        out[j] = alpha[i];
    }
    out
}

/// Orthonormal basis (columns) of the orthogonal complement of the first
/// `rank` columns of `basis` in R^dim.
fn null_space_complement(basis: &DMatrix<f64>, rank: usize, dim: usize) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = (0..rank).map(|c| basis.column(c).into_owned()).collect();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for e in 0..dim {
        let mut v = DVector::<f64>::zeros(dim);
        v[e] = 1.0;
        for _ in 0..2 {
            for c in cols.iter() {
                let d = c.dot(&v);
                v -= c * d;
            }
        }
        let l = v.norm();
        if l > 1e-8 {
            v /= l;
            cols.push(v.clone());
            out.push(v);
        }
        if cols.len() == dim {
            break;
        }
    }
    if out.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&out)
    }
}
