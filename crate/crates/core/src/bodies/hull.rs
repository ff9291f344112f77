//! Convex hulls of point sets: Andrew's monotone chain in the plane and an
//! incremental hull in space. Coplanar hull triangles are merged into facets.

use crate::error::{Error, Result};
use crate::sphere::{cross3, dot, norm, sub};

use super::polytope::{Facet, Polytope};

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull vertices of planar points (collinear points dropped).
pub fn hull_2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<&Vec<f64>> = points.iter().collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);
    if pts.len() < 3 {
        return pts.into_iter().cloned().collect();
    }
    let scale = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let tol = 1e-12 * scale * scale;
    let mut lower: Vec<&Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross2(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.into_iter().chain(upper).cloned().collect()
}

/// Polygon with the given counter-clockwise vertices.
pub fn polygon_from_vertices(vertices: &[Vec<f64>]) -> Result<Polytope> {
    let k = vertices.len();
    if k < 3 {
        return Err(Error::NotFullDimensional);
    }
    let mut normals = Vec::with_capacity(k);
    let mut supports = Vec::with_capacity(k);
    let mut facets = Vec::with_capacity(k);
    for i in 0..k {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % k];
        let d = sub(b, a);
        let len = norm(&d);
        let u = vec![d[1] / len, -d[0] / len];
        supports.push(dot(&u, a));
        normals.push(u);
        facets.push(Facet {
            vertices: vec![a.clone(), b.clone()],
            area: len,
            centroid: vec![0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])],
            ridges: vec![
                super::polytope::Ridge {
                    neighbor: (i + k - 1) % k,
                    length: 1.0,
                },
                super::polytope::Ridge {
                    neighbor: (i + 1) % k,
                    length: 1.0,
                },
            ],
        });
    }
    Ok(Polytope {
        n: 2,
        normals,
        supports,
        vertices: vertices.to_vec(),
        facets,
    })
}

/// Result of hulling a point set that may be lower-dimensional.
#[derive(Debug, Clone)]
pub enum HullResult {
    Full(Polytope),
    /// all points lie in a hyperplane with this unit normal; `area` is the
    /// (n−1)-volume of their hull
    Flat {
        normal: Vec<f64>,
        area: f64,
    },
    /// fewer than n affinely independent points in a lower-dimensional flat
    Degenerate,
}

pub fn convex_hull(n: usize, points: &[Vec<f64>]) -> Result<HullResult> {
    crate::sphere::check_dim(n)?;
    if points
        .iter()
        .any(|p| p.len() != n || p.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::InvalidInput(
            "hull points must be finite and of the right dimension".into(),
        ));
    }
    match n {
        2 => {
            let h = hull_2d(points);
            if h.len() >= 3 {
                return Ok(HullResult::Full(polygon_from_vertices(&h)?));
            }
            if h.len() == 2 {
                let d = sub(&h[1], &h[0]);
                let len = norm(&d);
                return Ok(HullResult::Flat {
                    normal: vec![-d[1] / len, d[0] / len],
                    area: len,
                });
            }
            Ok(HullResult::Degenerate)
        }
        _ => hull_3d(points),
    }
}

fn plane(a: &[f64], b: &[f64], c: &[f64]) -> ([f64; 3], f64) {
    let nrm = cross3(&sub(b, a), &sub(c, a));
    let l = norm(&nrm);
    let u = [nrm[0] / l, nrm[1] / l, nrm[2] / l];
    (u, dot(&u, a))
}

fn hull_3d(points: &[Vec<f64>]) -> Result<HullResult> {
    let m = points.len();
    if m < 3 {
        return Ok(HullResult::Degenerate);
    }
    let scale = points
        .iter()
        .map(|p| norm(p))
        .fold(0.0, f64::max)
        .max(1e-300);
    let span = {
        let mut d: f64 = 0.0;
        for p in points {
            d = d.max(norm(&sub(p, &points[0])));
        }
        d
    };
    if span <= 1e-12 * scale {
        return Ok(HullResult::Degenerate);
    }
    let eps = 1e-10 * span;
    // initial simplex: extreme point, farthest point, farthest from line, farthest from plane
    let i0 = (0..m)
        .min_by(|&a, &b| points[a][0].total_cmp(&points[b][0]))
        .unwrap();
    let i1 = (0..m)
        .max_by(|&a, &b| {
            norm(&sub(&points[a], &points[i0])).total_cmp(&norm(&sub(&points[b], &points[i0])))
        })
        .unwrap();
    let line = sub(&points[i1], &points[i0]);
    let dist_line = |p: &Vec<f64>| norm(&cross3(&sub(p, &points[i0]), &line)) / norm(&line);
    let i2 = (0..m)
        .max_by(|&a, &b| dist_line(&points[a]).total_cmp(&dist_line(&points[b])))
        .unwrap();
    if dist_line(&points[i2]) <= eps {
        return Ok(HullResult::Degenerate);
    }
    let (pn, pd) = plane(&points[i0], &points[i1], &points[i2]);
    let i3 = (0..m)
        .max_by(|&a, &b| {
            (dot(&pn, &points[a]) - pd)
                .abs()
                .total_cmp(&(dot(&pn, &points[b]) - pd).abs())
        })
        .unwrap();
    if (dot(&pn, &points[i3]) - pd).abs() <= eps {
        // planar point set: area of the 2D hull in the plane
        let (e1, e2) = crate::sphere::tangent_basis(&pn);
        let flat: Vec<Vec<f64>> = points
            .iter()
            .map(|p| vec![dot(p, &e1), dot(p, &e2)])
            .collect();
        let h = hull_2d(&flat);
        let k = h.len();
        let area = 0.5
            * (0..k)
                .map(|i| cross2(&[0.0, 0.0], &h[i], &h[(i + 1) % k]))
                .sum::<f64>();
        return Ok(HullResult::Flat {
            normal: pn.to_vec(),
            area: area.abs(),
        });
    }
    let interior: Vec<f64> = (0..3)
        .map(|d| (points[i0][d] + points[i1][d] + points[i2][d] + points[i3][d]) / 4.0)
        .collect();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let orient = |f: [usize; 3], faces: &mut Vec<[usize; 3]>| {
        let (u, d) = plane(&points[f[0]], &points[f[1]], &points[f[2]]);
        if dot(&u, &interior) - d > 0.0 {
            faces.push([f[0], f[2], f[1]]);
        } else {
            faces.push(f);
        }
    };
    orient([i0, i1, i2], &mut faces);
    orient([i0, i1, i3], &mut faces);
    orient([i0, i2, i3], &mut faces);
    orient([i1, i2, i3], &mut faces);
    let mut planes: Vec<([f64; 3], f64)> = faces
        .iter()
        .map(|f| plane(&points[f[0]], &points[f[1]], &points[f[2]]))
        .collect();
    let mut alive = vec![true; 4];
    for p in 0..m {
        if [i0, i1, i2, i3].contains(&p) {
            continue;
        }
        let q = &points[p];
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| alive[f] && dot(&planes[f].0, q) - planes[f].1 > eps)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(visible.len() * 3);
        for &f in &visible {
            alive[f] = false;
            let t = faces[f];
            edges.extend([(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]);
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(a, b)| !edges.contains(&(b, a)))
            .copied()
            .collect();
        for (a, b) in horizon {
            let f = [a, b, p];
            faces.push(f);
            planes.push(plane(&points[a], &points[b], &points[p]));
            alive.push(true);
        }
    }
    let tris: Vec<([usize; 3], [f64; 3], f64)> = (0..faces.len())
        .filter(|&f| alive[f])
        .map(|f| (faces[f], planes[f].0, planes[f].1))
        .collect();
    Ok(HullResult::Full(merge_facets(points, &tris, span)))
}

/// Groups hull triangles with equal outward normals into polygonal facets.
fn merge_facets(points: &[Vec<f64>], tris: &[([usize; 3], [f64; 3], f64)], span: f64) -> Polytope {
    let mut groups: Vec<(Vec<f64>, f64, Vec<usize>)> = Vec::new();
    for (t, (_, u, d)) in tris.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| dot(&g.0, u) > 1.0 - 1e-12 && (g.1 - d).abs() < 1e-9 * span)
        {
            Some(g) => g.2.push(t),
            None => groups.push((u.to_vec(), *d, vec![t])),
        }
    }
    let mut normals = Vec::with_capacity(groups.len());
    let mut supports = Vec::with_capacity(groups.len());
    let mut facets = Vec::with_capacity(groups.len());
    let mut used: Vec<usize> = Vec::new();
    for (u, _, members) in &groups {
        let mut area = 0.0;
        let mut centroid = vec![0.0; 3];
        let mut ids: Vec<usize> = Vec::new();
        for &t in members {
            let f = tris[t].0;
            let (a, b, c) = (&points[f[0]], &points[f[1]], &points[f[2]]);
            let ar = 0.5 * norm(&cross3(&sub(b, a), &sub(c, a)));
            area += ar;
            for d in 0..3 {
                centroid[d] += ar * (a[d] + b[d] + c[d]) / 3.0;
            }
            ids.extend(f);
        }
        ids.sort_unstable();
        ids.dedup();
        centroid.iter_mut().for_each(|c| *c /= area);
        // boundary order: sort by angle about the centroid within the facet plane
        let (e1, e2) = crate::sphere::tangent_basis(u);
        ids.sort_by(|&a, &b| {
            let pa = sub(&points[a], &centroid);
            let pb = sub(&points[b], &centroid);
            dot(&pa, &e2)
                .atan2(dot(&pa, &e1))
                .total_cmp(&dot(&pb, &e2).atan2(dot(&pb, &e1)))
        });
        used.extend(&ids);
        // the support number averages the member planes through the centroid
        supports.push(dot(u, &centroid));
        normals.push(u.clone());
        facets.push(Facet {
            vertices: ids.iter().map(|&i| points[i].clone()).collect(),
            area,
            centroid,
            ridges: Vec::new(),
        });
    }
    used.sort_unstable();
    used.dedup();
    Polytope {
        n: 3,
        normals,
        supports,
        vertices: used.iter().map(|&i| points[i].clone()).collect(),
        facets,
    }
}

/// Full-dimensional hull as a polytope (error for flat point sets).
pub fn hull_polytope(n: usize, points: &[Vec<f64>]) -> Result<Polytope> {
    match convex_hull(n, points)? {
        HullResult::Full(p) => Ok(p),
        _ => Err(Error::NotFullDimensional),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_hull_drops_interior_points() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            vec![0.5, 0.0],
        ];
        let h = hull_2d(&pts);
        assert_eq!(h.len(), 4);
        let p = polygon_from_vertices(&h).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-14);
        assert!((p.surface_area() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn cube_hull_merges_faces() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            ]);
        }
        pts.push(vec![0.5, 0.5, 0.5]);
        pts.push(vec![0.5, 0.5, 1.0]);
        let p = hull_polytope(3, &pts).unwrap();
        assert_eq!(p.facets.len(), 6);
        assert_eq!(p.vertices.len(), 8);
        assert!(p
            .facets
            .iter()
            .all(|f| (f.area - 1.0).abs() < 1e-12 && f.vertices.len() == 4));
        assert!((p.volume() - 1.0).abs() < 1e-12);
        let c = p.centroid();
        assert!(c.iter().all(|x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn flat_point_sets() {
        let pts = vec![
            vec![0.0, 0.0, 2.0],
            vec![1.0, 0.0, 2.0],
            vec![1.0, 1.0, 2.0],
            vec![0.0, 1.0, 2.0],
        ];
        match convex_hull(3, &pts).unwrap() {
            HullResult::Flat { normal, area } => {
                assert!((normal[2].abs() - 1.0).abs() < 1e-12);
                assert!((area - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let seg = vec![vec![0.0, 0.0], vec![3.0, 0.0]];
        assert!(
            matches!(convex_hull(2, &seg).unwrap(), HullResult::Flat { area, .. } if (area - 3.0).abs() < 1e-12)
        );
    }
}
