use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::sphere::{add, check_dim, dot, fibonacci_points, norm, scale, tangent_basis};

/// A facet of a polytope: its boundary (ordered polygon for n = 3, the two
/// endpoints for n = 2), (n−1)-volume, centroid and the ridges it shares with
/// neighbouring facets.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub vertices: Vec<Vec<f64>>,
    pub area: f64,
    pub centroid: Vec<f64>,
    pub ridges: Vec<Ridge>,
}

/// Intersection of two facets: `length` is its (n−2)-volume (1 for n = 2).
#[derive(Debug, Clone, PartialEq)]
pub struct Ridge {
    pub neighbor: usize,
    pub length: f64,
}

/// Convex polytope {x : ⟨u_i, x⟩ ≤ h_i} with its derived boundary structure.
/// Facet `i` belongs to halfspace `i`; redundant halfspaces get empty facets.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub n: usize,
    pub normals: Vec<Vec<f64>>,
    pub supports: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
}

/// Relative tolerance for clipping and vertex identification.
const EPS: f64 = 1e-12;

impl Polytope {
    pub fn facet_areas(&self) -> Vec<f64> {
        self.facets.iter().map(|f| f.area).collect()
    }

    pub fn surface_area(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }

    /// V = (1/n) Σ h_i A_i.
    pub fn volume(&self) -> f64 {
        let s: f64 = self
            .supports
            .iter()
            .zip(&self.facets)
            .map(|(h, f)| h * f.area)
            .sum();
        s / self.n as f64
    }

    /// Centre of mass, from the cone decomposition over facets.
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.n as f64;
        let mut c = vec![0.0; self.n];
        let mut vol = 0.0;
        for (h, f) in self.supports.iter().zip(&self.facets) {
            if f.area == 0.0 {
                continue;
            }
            let cone = h * f.area / n;
            vol += cone;
            for (ci, fi) in c.iter_mut().zip(&f.centroid) {
                *ci += cone * n / (n + 1.0) * fi;
            }
        }
        c.iter().map(|x| x / vol).collect()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(norm(&crate::sphere::sub(a, b)));
            }
        }
        d
    }

    /// Facet normals and areas as a measure; empty facets are dropped.
    pub fn surface_area_measure(&self) -> DiscreteMeasure {
        let total = self.surface_area();
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (u, f) in self.normals.iter().zip(&self.facets) {
            if f.area > EPS * total {
                atoms.push(u.clone());
                weights.push(f.area);
            }
        }
        DiscreteMeasure {
            n: self.n,
            atoms,
            weights,
        }
    }

    pub fn translated(&self, x: &[f64]) -> Polytope {
        let mut p = self.clone();
        for (h, u) in p.supports.iter_mut().zip(&self.normals) {
            *h += dot(u, x);
        }
        for v in p.vertices.iter_mut() {
            *v = add(v, x);
        }
        for f in p.facets.iter_mut() {
            for v in f.vertices.iter_mut() {
                *v = add(v, x);
            }
            if f.area > 0.0 {
                f.centroid = add(&f.centroid, x);
            }
        }
        p
    }

    /// Dilation by c > 0 about the origin.
    pub fn scaled(&self, c: f64) -> Polytope {
        let mut p = self.clone();
        let area_scale = c.powi(self.n as i32 - 1);
        let ridge_scale = c.powi(self.n as i32 - 2);
        p.supports.iter_mut().for_each(|h| *h *= c);
        p.vertices.iter_mut().for_each(|v| *v = scale(v, c));
        for f in p.facets.iter_mut() {
            f.vertices.iter_mut().for_each(|v| *v = scale(v, c));
            f.centroid = scale(&f.centroid, c);
            f.area *= area_scale;
            f.ridges.iter_mut().for_each(|r| r.length *= ridge_scale);
        }
        p
    }

    /// ∂A_i/∂h_j: ℓ_ij / sin θ_ij off the diagonal and −Σ_j ℓ_ij cot θ_ij on it,
    /// θ_ij the angle between u_i and u_j and ℓ_ij the ridge volume.
    pub fn area_hessian(&self) -> DMatrix<f64> {
        let m = self.normals.len();
        let mut hess = DMatrix::zeros(m, m);
        for (i, f) in self.facets.iter().enumerate() {
            for r in &f.ridges {
                let j = r.neighbor;
                let c = dot(&self.normals[i], &self.normals[j]).clamp(-1.0, 1.0);
                let s = (1.0 - c * c).sqrt();
                if s < 1e-14 {
                    continue;
                }
                hess[(i, j)] += r.length / s;
                hess[(i, i)] -= r.length * c / s;
            }
        }
        hess
    }
}

/// Lower bound for min_{|d|=1} max_i ⟨u_i, d⟩ estimated on a point set
/// (an overestimate of the true minimum, so bounds derived from it are retried).
fn spanning_margin(n: usize, normals: &[Vec<f64>]) -> f64 {
    let dirs = fibonacci_points(n, if n == 2 { 720 } else { 2000 });
    dirs.iter()
        .map(|d| {
            normals
                .iter()
                .map(|u| dot(u, d))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// The polytope {x : ⟨u_i, x⟩ ≤ h_i} (normals need not be normalized on input;
/// they are normalized and h rescaled accordingly).
///
/// Each facet is obtained by clipping a large square (interval for n = 2) in
/// its hyperplane with all other halfspaces. If the starting box still
/// contributes an edge, the box was too small or the intersection is unbounded;
/// the box is enlarged until either the facet closes or the limit is reached.
pub fn halfspace_intersection(normals: &[Vec<f64>], supports: &[f64]) -> Result<Polytope> {
    if normals.is_empty() || normals.len() != supports.len() {
        return Err(Error::InvalidInput(
            "normals and supports must be nonempty and equally long".into(),
        ));
    }
    let n = normals[0].len();
    check_dim(n)?;
    let mut us = Vec::with_capacity(normals.len());
    let mut hs = Vec::with_capacity(normals.len());
    for (u, h) in normals.iter().zip(supports) {
        let l = norm(u);
        if u.len() != n || !(l > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput("degenerate halfspace".into()));
        }
        us.push(u.iter().map(|x| x / l).collect::<Vec<f64>>());
        hs.push(h / l);
    }
    let hmax = hs.iter().fold(0.0f64, |a, h| a.max(h.abs()));
    if hmax == 0.0 {
        return Err(Error::EmptyInterior);
    }
    let margin = spanning_margin(n, &us);
    if margin <= 0.0 {
        return Err(Error::Unbounded);
    }
    let mut half_width = 4.0 * hmax / margin.max(0.05);
    for _ in 0..40 {
        match try_build(n, &us, &hs, half_width) {
            Some(p) => {
                let scale = hmax.powi(n as i32);
                if !(p.volume() > 1e-12 * scale) {
                    return Err(Error::EmptyInterior);
                }
                return Ok(p);
            }
            None => half_width *= 2.0,
        }
    }
    Err(Error::Unbounded)
}

/// Builds all facets within a box of the given half-width; `None` if the box
/// boundary survives clipping in some facet.
fn try_build(n: usize, us: &[Vec<f64>], hs: &[f64], half_width: f64) -> Option<Polytope> {
    let m = us.len();
    let tol = EPS * half_width.max(1.0);
    let mut facets = Vec::with_capacity(m);
    for i in 0..m {
        let f = match n {
            2 => facet_2d(i, us, hs, half_width, tol)?,
            _ => facet_3d(i, us, hs, half_width, tol)?,
        };
        facets.push(f);
    }
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let vtol = 1e-9 * half_width.max(1.0);
    for f in &facets {
        for v in &f.vertices {
            if !vertices
                .iter()
                .any(|w| norm(&crate::sphere::sub(v, w)) < vtol)
            {
                vertices.push(v.clone());
            }
        }
    }
    Some(Polytope {
        n,
        normals: us.to_vec(),
        supports: hs.to_vec(),
        vertices,
        facets,
    })
}

fn empty_facet(n: usize) -> Facet {
    Facet {
        vertices: Vec::new(),
        area: 0.0,
        centroid: vec![0.0; n],
        ridges: Vec::new(),
    }
}

fn facet_2d(i: usize, us: &[Vec<f64>], hs: &[f64], half_width: f64, tol: f64) -> Option<Facet> {
    let u = &us[i];
    let h = hs[i];
    let e = [-u[1], u[0]];
    // parameter interval [lo, hi] along p0 + t e, with the constraint that bounds each end
    let (mut lo, mut hi) = (-half_width, half_width);
    let (mut lo_by, mut hi_by): (Option<usize>, Option<usize>) = (None, None);
    for (j, (uj, hj)) in us.iter().zip(hs).enumerate() {
        if j == i {
            continue;
        }
        let a = e[0] * uj[0] + e[1] * uj[1];
        let b = hj - h * dot(u, uj);
        if a.abs() <= 1e-14 {
            if b < -tol || (b.abs() <= tol && dot(u, uj) > 0.0 && j < i) {
                // the line lies outside halfspace j, or duplicates an earlier halfspace
                return Some(empty_facet(2));
            }
            continue;
        }
        let t = b / a;
        if a > 0.0 {
            if t < hi {
                hi = t;
                hi_by = Some(j);
            }
        } else if t > lo {
            lo = t;
            lo_by = Some(j);
        }
    }
    if hi - lo <= tol {
        return Some(empty_facet(2));
    }
    let (lo_j, hi_j) = (lo_by?, hi_by?);
    let p = |t: f64| vec![h * u[0] + t * e[0], h * u[1] + t * e[1]];
    let (a, b) = (p(lo), p(hi));
    let centroid = vec![0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    Some(Facet {
        vertices: vec![a, b],
        area: hi - lo,
        centroid,
        ridges: vec![
            Ridge {
                neighbor: lo_j,
                length: 1.0,
            },
            Ridge {
                neighbor: hi_j,
                length: 1.0,
            },
        ],
    })
}

/// Sutherland–Hodgman clip of a labeled polygon by a·x + b·y ≤ c. `labels[k]`
/// names the constraint that produced edge (v_k, v_{k+1}); `None` is the box.
fn clip(
    poly: &[[f64; 2]],
    labels: &[Option<usize>],
    a: [f64; 2],
    c: f64,
    j: usize,
    tol: f64,
) -> (Vec<[f64; 2]>, Vec<Option<usize>>) {
    let k = poly.len();
    let mut out = Vec::with_capacity(k + 1);
    let mut out_labels = Vec::with_capacity(k + 1);
    let val = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] - c;
    for idx in 0..k {
        let p = poly[idx];
        let q = poly[(idx + 1) % k];
        let (fp, fq) = (val(&p), val(&q));
        let p_in = fp <= tol;
        let q_in = fq <= tol;
        if p_in {
            out.push(p);
            if q_in {
                out_labels.push(labels[idx]);
            } else {
                // leaving: the edge continues to the crossing, then the new edge follows j
                let t = fp / (fp - fq);
                out_labels.push(labels[idx]);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                out_labels.push(Some(j));
            }
        } else if q_in {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            out_labels.push(labels[idx]);
        }
    }
    (out, out_labels)
}

fn facet_3d(i: usize, us: &[Vec<f64>], hs: &[f64], half_width: f64, tol: f64) -> Option<Facet> {
    let u = &us[i];
    let h = hs[i];
    let (e1, e2) = tangent_basis(u);
    let mut poly = vec![
        [-half_width, -half_width],
        [half_width, -half_width],
        [half_width, half_width],
        [-half_width, half_width],
    ];
    let mut labels: Vec<Option<usize>> = vec![None; 4];
    for (j, (uj, hj)) in us.iter().zip(hs).enumerate() {
        if j == i {
            continue;
        }
        let a = [dot(&e1, uj), dot(&e2, uj)];
        let c = hj - h * dot(u, uj);
        if a[0].abs() <= 1e-14 && a[1].abs() <= 1e-14 {
            if c < -tol || (c.abs() <= tol && dot(u, uj) > 0.0 && j < i) {
                return Some(empty_facet(3));
            }
            continue;
        }
        let (p, l) = clip(&poly, &labels, a, c, j, tol);
        poly = p;
        labels = l;
        if poly.len() < 3 {
            return Some(empty_facet(3));
        }
    }
    // drop near-duplicate consecutive vertices, keeping the label of the following edge
    let dup = 1e-11 * half_width.max(1.0);
    let mut changed = true;
    while changed && poly.len() >= 3 {
        changed = false;
        let k = poly.len();
        for idx in 0..k {
            let nxt = (idx + 1) % k;
            let d = ((poly[idx][0] - poly[nxt][0]).powi(2) + (poly[idx][1] - poly[nxt][1]).powi(2))
                .sqrt();
            if d < dup {
                // edge idx→nxt is degenerate: remove vertex nxt, edge idx takes nxt's label
                labels[idx] = labels[nxt];
                poly.remove(nxt);
                labels.remove(nxt);
                changed = true;
                break;
            }
        }
    }
    if poly.len() < 3 {
        return Some(empty_facet(3));
    }
    // shoelace area and centroid in plane coordinates
    let k = poly.len();
    let (mut area2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for idx in 0..k {
        let p = poly[idx];
        let q = poly[(idx + 1) % k];
        let cr = p[0] * q[1] - q[0] * p[1];
        area2 += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    let area = 0.5 * area2;
    if area <= tol * half_width {
        return Some(empty_facet(3));
    }
    if labels.iter().any(|l| l.is_none()) {
        return None;
    }
    let (cx, cy) = (cx / (3.0 * area2), cy / (3.0 * area2));
    let lift = |p: [f64; 2]| -> Vec<f64> {
        (0..3)
            .map(|d| h * u[d] + p[0] * e1[d] + p[1] * e2[d])
            .collect()
    };
    let mut ridges: Vec<Ridge> = Vec::new();
    for idx in 0..k {
        let p = poly[idx];
        let q = poly[(idx + 1) % k];
        let len = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let j = labels[idx].unwrap();
        if let Some(r) = ridges.iter_mut().find(|r| r.neighbor == j) {
            r.length += len;
        } else {
            ridges.push(Ridge {
                neighbor: j,
                length: len,
            });
        }
    }
    Some(Facet {
        vertices: poly.iter().map(|&p| lift(p)).collect(),
        area,
        centroid: lift([cx, cy]),
        ridges,
    })
}
