//! Object File Format (OFF) mesh export and import.

use crate::error::{Error, Result};
use crate::sphere::{norm, sub};

use super::polytope::Polytope;

/// OFF text with one polygon per facet (n = 2 polygons are written in z = 0).
pub fn write_off(p: &Polytope) -> String {
    let lift = |v: &Vec<f64>| -> [f64; 3] {
        if v.len() == 3 {
            [v[0], v[1], v[2]]
        } else {
            [v[0], v[1], 0.0]
        }
    };
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let find = |v: &Vec<f64>| -> usize {
        p.vertices
            .iter()
            .enumerate()
            .min_by(|a, b| norm(&sub(a.1, v)).total_cmp(&norm(&sub(b.1, v))))
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    if p.n == 3 {
        for f in p.facets.iter().filter(|f| f.area > 0.0) {
            faces.push(f.vertices.iter().map(find).collect());
        }
    } else {
        // polygon boundary in counter-clockwise order
        let mut order: Vec<usize> = (0..p.vertices.len()).collect();
        let c: Vec<f64> = (0..2)
            .map(|d| p.vertices.iter().map(|v| v[d]).sum::<f64>() / p.vertices.len() as f64)
            .collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (&p.vertices[a], &p.vertices[b]);
            (va[1] - c[1])
                .atan2(va[0] - c[0])
                .total_cmp(&(vb[1] - c[1]).atan2(vb[0] - c[0]))
        });
        faces.push(order);
    }
    let mut out = format!("OFF\n{} {} 0\n", p.vertices.len(), faces.len());
    for v in &p.vertices {
        let l = lift(v);
        out.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", l[0], l[1], l[2]));
    }
    for f in &faces {
        out.push_str(&f.len().to_string());
        for i in f {
            out.push_str(&format!(" {i}"));
        }
        out.push('\n');
    }
    out
}

/// Vertex coordinates of an OFF mesh (faces are ignored; the body is their hull).
pub fn read_off(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty OFF file".into()))?;
    let counts_line = if header == "OFF" {
        lines
            .next()
            .ok_or_else(|| Error::InvalidInput("OFF file missing counts".into()))?
    } else if let Some(rest) = header.strip_prefix("OFF") {
        rest.trim()
    } else {
        return Err(Error::InvalidInput("missing OFF header".into()));
    };
    let counts: Vec<usize> = counts_line
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::InvalidInput(format!("bad OFF count {t:?}")))
        })
        .collect::<Result<_>>()?;
    let nv = *counts
        .first()
        .ok_or_else(|| Error::InvalidInput("OFF counts line is empty".into()))?;
    let mut verts = Vec::with_capacity(nv);
    for i in 0..nv {
        let l = lines
            .next()
            .ok_or_else(|| Error::InvalidInput(format!("OFF file ends before vertex {i}")))?;
        let v: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::InvalidInput(format!("bad coordinate {t:?} in vertex {i}")))
            })
            .collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "vertex {i} needs 3 coordinates"
            )));
        }
        verts.push(v);
    }
    Ok(verts)
}
