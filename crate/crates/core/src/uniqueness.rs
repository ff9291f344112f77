//! Uniqueness of discrete measures from finitely many moments: certificate
//! polynomials, and counterexample pairs showing the rank m − n + 2 is sharp.

use nalgebra::DMatrix;

use crate::bodies::{regular_polygon, Polytope};
use crate::error::{Error, Result};
use crate::measures::{discretize_sphere, first_moment, DiscreteMeasure};
use crate::sphere::{check_dim, dot, norm, sub};
use crate::tensors::harmonic_vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateMode {
    /// the support's affine hull is Rⁿ: degree m − n + 2
    FullDim,
    /// no assumption on the support: p(u) = Π (1 − ⟨u, u_j⟩), degree m
    General,
}

/// Hyperplane {x : ⟨x, normal⟩ = offset} with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// One summand of a certificate: an optional squared affine factor
/// (⟨u, v⟩ − β)² times the product of the factors (1 − ⟨u, u_j⟩).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub square: Option<usize>,
    pub linear: Vec<usize>,
}

/// A polynomial p ≥ 0 on the sphere whose zero set is exactly the support
/// {u_1, …, u_m}. Any measure whose moments agree with those of a measure on
/// this support up to deg p is concentrated there, and the separating
/// polynomials p_i then pin down the weights.
#[derive(Debug, Clone)]
pub struct CertificatePolynomial {
    pub n: usize,
    pub mode: CertificateMode,
    pub support: Vec<Vec<f64>>,
    /// indices of n + 1 affinely spanning support vectors (empty in general mode)
    pub selected: Vec<usize>,
    /// hyperplane through the selected vectors other than `selected[j]`
    pub hyperplanes: Vec<Hyperplane>,
    pub terms: Vec<Term>,
}

impl CertificatePolynomial {
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.linear.len() + if t.square.is_some() { 2 } else { 0 })
            .max()
            .unwrap_or(0)
    }

    fn eval_term(&self, t: &Term, u: &[f64], skip: Option<usize>) -> f64 {
        let mut v = match t.square {
            Some(j) => {
                let h = &self.hyperplanes[j];
                let d = dot(u, &h.normal) - h.offset;
                d * d
            }
            None => 1.0,
        };
        for &j in &t.linear {
            if Some(j) != skip {
                v *= 1.0 - dot(u, &self.support[j]);
            }
        }
        v
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.terms.iter().map(|t| self.eval_term(t, u, None)).sum()
    }

    /// The separating polynomial p_i: vanishes at every support vector except u_i.
    pub fn separator(&self, i: usize, u: &[f64]) -> f64 {
        if let Some(pos) = self.selected.iter().position(|&s| s == i) {
            // the squared factor of the term built for u_i, times the unselected factors
            let t = &self.terms[pos];
            self.eval_term(t, u, Some(i))
        } else {
            // p / (1 − ⟨u, u_i⟩): drop that factor from every term
            self.terms
                .iter()
                .map(|t| self.eval_term(t, u, Some(i)))
                .sum()
        }
    }
}

/// Greedy affinely spanning subset: walk the vectors in order and keep each
/// one that raises the dimension of the affine hull of those kept.
fn affine_spanning_subset(points: &[Vec<f64>], n: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if chosen.is_empty() {
            chosen.push(i);
            continue;
        }
        let mut d = sub(p, &points[chosen[0]]);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&d, b);
                d.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let l = norm(&d);
        if l > 1e-9 {
            basis.push(d.iter().map(|x| x / l).collect());
            chosen.push(i);
            if chosen.len() == n + 1 {
                break;
            }
        }
    }
    chosen
}

/// Unit normal and offset of the hyperplane through n affinely independent points.
fn hyperplane_through(points: &[&Vec<f64>]) -> Hyperplane {
    let n = points[0].len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (r, p) in points.iter().enumerate().skip(1) {
        for c in 0..n {
            m[(r - 1, c)] = p[c] - points[0][c];
        }
    }
    // the last row stays zero; the right singular vector of the smallest
    // singular value spans the orthogonal complement of the differences
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let idx = svd.singular_values.imin();
    let normal: Vec<f64> = (0..n).map(|c| vt[(idx, c)]).collect();
    let offset = dot(&normal, points[0]);
    Hyperplane { normal, offset }
}

pub fn build_certificate(
    support: &[Vec<f64>],
    mode: CertificateMode,
) -> Result<CertificatePolynomial> {
    let Some(first) = support.first() else {
        return Err(Error::InvalidInput(
            "certificate needs at least one support vector".into(),
        ));
    };
    let n = first.len();
    check_dim(n)?;
    let m = support.len();
    match mode {
        CertificateMode::General => Ok(CertificatePolynomial {
            n,
            mode,
            support: support.to_vec(),
            selected: Vec::new(),
            hyperplanes: Vec::new(),
            terms: vec![Term {
                square: None,
                linear: (0..m).collect(),
            }],
        }),
        CertificateMode::FullDim => {
            let selected = affine_spanning_subset(support, n);
            if selected.len() < n + 1 {
                return Err(Error::Precondition(format!(
                    "affine hull of the support has dimension {} < {n}",
                    selected.len() - 1
                )));
            }
            let rest: Vec<usize> = (0..m).filter(|i| !selected.contains(i)).collect();
            let hyperplanes: Vec<Hyperplane> = selected
                .iter()
                .map(|&j| {
                    let pts: Vec<&Vec<f64>> = selected
                        .iter()
                        .filter(|&&k| k != j)
                        .map(|&k| &support[k])
                        .collect();
                    hyperplane_through(&pts)
                })
                .collect();
            let terms = selected
                .iter()
                .enumerate()
                .map(|(pos, &j)| {
                    let mut linear = vec![j];
                    linear.extend_from_slice(&rest);
                    Term {
                        square: Some(pos),
                        linear,
                    }
                })
                .collect();
            Ok(CertificatePolynomial {
                n,
                mode,
                support: support.to_vec(),
                selected,
                hyperplanes,
                terms,
            })
        }
    }
}

/// Regular m-gon with perimeter 2π and the (quadrature-discretized) surface
/// area measure of the unit disc. Their moments agree up to order m − 1.
pub fn polygon_disc_pair(m: usize) -> Result<(Polytope, DiscreteMeasure)> {
    let polygon = regular_polygon(m)?;
    let degree = 2 * m + 2;
    let disc = discretize_sphere(2, degree, 1.0)?;
    // the quadrature must reproduce the uniform measure through `degree`
    let h = harmonic_vector(&disc, degree)?;
    let stray = h.values[1..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(stray < 1e-12, "disc discretization is not exact: {stray:e}");
    Ok((polygon, disc))
}

/// Pushes μ on S^{n−2} to S^{n−1} via u ↦ (√(1−α²) u, α) and adds the atom
/// α·S at −e_n, which restores a vanishing first moment.
pub fn cone_lift(mu: &DiscreteMeasure, surface_area: f64, alpha: f64) -> Result<DiscreteMeasure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Precondition(format!(
            "lift parameter {alpha} not in (0, 1)"
        )));
    }
    let mass = mu.mass();
    if norm(&first_moment(mu)) > 1e-10 * mass.max(1.0) {
        return Err(Error::Precondition(
            "measure to lift has nonzero first moment".into(),
        ));
    }
    let n = mu.n + 1;
    let c = (1.0 - alpha * alpha).sqrt();
    let mut atoms: Vec<Vec<f64>> = mu
        .atoms
        .iter()
        .map(|u| {
            let mut v: Vec<f64> = u.iter().map(|x| c * x).collect();
            v.push(alpha);
            v
        })
        .collect();
    let mut weights = mu.weights.clone();
    let mut apex = vec![0.0; n];
    apex[n - 1] = -1.0;
    atoms.push(apex);
    weights.push(alpha * surface_area);
    let out = DiscreteMeasure { n, atoms, weights };
    let fm = norm(&first_moment(&out));
    if fm > 1e-10 * out.mass().max(1.0) {
        return Err(Error::Precondition(format!(
            "lift is not centered (|first moment| = {fm:e}); surface area must equal the lifted mass"
        )));
    }
    Ok(out)
}

/// Lift parameter used for counterexamples in R³.
pub const LIFT_ALPHA: f64 = 0.5;

/// Surface area measures of a polytope with m facets and of a body that is not
/// such a polytope, with identical moments up to order m − n + 1.
pub fn counterexample_pair(n: usize, m: usize) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    check_dim(n)?;
    if m < n + 1 {
        return Err(Error::Precondition(format!("need m >= n + 1 = {}", n + 1)));
    }
    let (polygon, disc) = polygon_disc_pair(m + 2 - n)?;
    let p = polygon.surface_area_measure();
    if n == 2 {
        return Ok((p, disc));
    }
    let sp = p.mass();
    let sd = disc.mass();
    Ok((
        cone_lift(&p, sp, LIFT_ALPHA)?,
        cone_lift(&disc, sd, LIFT_ALPHA)?,
    ))
}

/// ‖h_k(μ) − h_k(ν)‖ for each degree k = 0..=max_degree.
pub fn degree_gaps(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    max_degree: usize,
) -> Result<Vec<f64>> {
    let a = harmonic_vector(mu, max_degree)?;
    let b = harmonic_vector(nu, max_degree)?;
    Ok((0..=max_degree)
        .map(|k| {
            a.degree_block(k)
                .iter()
                .zip(b.degree_block(k))
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{
        reference_body, translative_hausdorff, Ball, BodySpec, DEFAULT_RESOLUTION,
    };
    use crate::measures::{classify, ClassifyTol, MeasureClass};
    use crate::sphere::{fibonacci_points, omega};
    use std::f64::consts::PI;

    fn positive_off_support(p: &CertificatePolynomial, samples: usize) -> f64 {
        let cap = 1e-3f64;
        fibonacci_points(p.n, samples)
            .iter()
            .filter(|u| {
                p.support
                    .iter()
                    .all(|s| dot(u, s).clamp(-1.0, 1.0).acos() > cap)
            })
            .map(|u| p.eval(u))
            .fold(f64::INFINITY, f64::min)
    }

    fn facet_normals(spec: &BodySpec) -> Vec<Vec<f64>> {
        reference_body(spec, DEFAULT_RESOLUTION)
            .unwrap()
            .surface_area_measure(DEFAULT_RESOLUTION)
            .unwrap()
            .atoms
    }

    #[test]
    fn cube_certificate() {
        let normals = facet_normals(&BodySpec::cube(1.0));
        let p = build_certificate(&normals, CertificateMode::FullDim).unwrap();
        assert_eq!(p.degree(), 5);
        for u in &normals {
            assert!(p.eval(u).abs() < 1e-10);
        }
        assert!(positive_off_support(&p, 100_000) > 0.0);
        for i in 0..normals.len() {
            for (j, u) in normals.iter().enumerate() {
                let v = p.separator(i, u);
                if i == j {
                    assert!(v > 1e-6);
                } else {
                    assert!(v.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn pyramid_certificate_has_degree_four() {
        let normals = facet_normals(&BodySpec::pyramid());
        assert_eq!(normals.len(), 5);
        let p = build_certificate(&normals, CertificateMode::FullDim).unwrap();
        assert_eq!(p.degree(), 4);
        assert!(positive_off_support(&p, 100_000) > 0.0);
    }

    #[test]
    fn general_certificate_for_antipodal_pair() {
        let u = vec![0.6, 0.8];
        let v = vec![-0.6, -0.8];
        let p = build_certificate(&[u.clone(), v.clone()], CertificateMode::General).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(&u), 0.0);
        assert_eq!(p.eval(&v), 0.0);
        assert!(positive_off_support(&p, 10_000) > 0.0);
        // in the full-dimensional mode the same support is rejected
        assert!(build_certificate(&[u, v], CertificateMode::FullDim).is_err());
    }

    #[test]
    fn polygon_and_disc_agree_below_m() {
        for m in [3usize, 5, 8] {
            let (poly, disc) = polygon_disc_pair(m).unwrap();
            assert!((poly.surface_area() - 2.0 * PI).abs() < 1e-12);
            assert!((disc.mass() - 2.0 * PI).abs() < 1e-12);
            let gaps = degree_gaps(&poly.surface_area_measure(), &disc, m).unwrap();
            for g in &gaps[..m] {
                assert!(*g < 1e-9, "{gaps:?}");
            }
            assert!(gaps[m] > 1e-2, "{gaps:?}");
        }
    }

    #[test]
    fn degree_five_gap_matches_trigonometric_sum() {
        // Σ_j cos(5·2πj/5)·(2π/5) = 2π, against ∫cos 5θ dθ = 0; in the
        // orthonormal basis that is a gap of 2π/√π in the cosine entry
        let (poly, disc) = polygon_disc_pair(5).unwrap();
        let gaps = degree_gaps(&poly.surface_area_measure(), &disc, 5).unwrap();
        assert!((gaps[5] - 2.0 * PI / PI.sqrt()).abs() < 1e-9, "{}", gaps[5]);
    }

    #[test]
    fn polygon_is_not_the_disc() {
        let (poly, _) = polygon_disc_pair(5).unwrap();
        let disc = Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert!(translative_hausdorff(&poly, &disc).unwrap() > 0.01);
    }

    #[test]
    fn lift_of_square() {
        let square = regular_polygon(4).unwrap().surface_area_measure();
        let s = square.mass();
        let lifted = cone_lift(&square, s, 0.5).unwrap();
        assert_eq!(lifted.len(), 5);
        assert!(norm(&first_moment(&lifted)) < 1e-12);
        assert!((lifted.mass() - s * 1.5).abs() < 1e-12);
        assert!(cone_lift(&square, s, 1.0).is_err());
    }

    #[test]
    fn lifted_pairs_keep_agreement_rank() {
        for m in 4..=9usize {
            let (p, k) = counterexample_pair(3, m).unwrap();
            let r = m - 2;
            let gaps = degree_gaps(&p, &k, r + 1).unwrap();
            for g in &gaps[..=r] {
                assert!(*g < 1e-9, "m={m} {gaps:?}");
            }
            assert!(gaps[r + 1] > 1e-4, "m={m} {gaps:?}");
        }
    }

    #[test]
    fn planar_pair_matches_polygon_construction() {
        let (p, k) = counterexample_pair(2, 7).unwrap();
        let gaps = degree_gaps(&p, &k, 7).unwrap();
        assert!(gaps[..7].iter().all(|g| *g < 1e-9));
        assert!(gaps[7] > 1e-3);
        assert!((k.mass() - omega(2)).abs() < 1e-12);
    }

    #[test]
    fn polytope_component_is_full_dimensional() {
        let (p, _) = counterexample_pair(3, 6).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(classify(&p, ClassifyTol::default()), MeasureClass::FullDim);
        assert!(counterexample_pair(3, 3).is_err());
        assert!(counterexample_pair(4, 6).is_err());
    }
}
