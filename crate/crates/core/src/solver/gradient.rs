//! Gradient recovery from a P1 field, with boundary normal-derivative fits.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::SolveError;
use crate::geometry::Vec2;
use crate::mesh::Mesh;

use super::assembly::Discretization;
use super::ScalarField;

/// First and second outward normal derivatives at a boundary vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryJet {
    pub u_n: f64,
    pub u_nn: f64,
}

/// Radius, in mesh sizes, of the interior gradient patches.
pub const PATCH_REACH: f64 = 2.2;

/// How boundary normal derivatives are estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryFit {
    /// Quadratic through P1-interpolated samples at depths `{0, h, 2h}` along
    /// the inward normal.
    NormalLine,
    /// Least-squares polynomial of total degree `degree` in local (tangent,
    /// depth) coordinates through the nodal values within
    /// `scale * sqrt(h * L)` of the boundary vertex, where `L` is the radius
    /// of the disk with the mesh's area. The fit passes through the vertex.
    ///
    /// Nodal P1 errors next to a curved boundary are not smooth, so a radius
    /// proportional to `h` gives second derivatives with O(1) noise; growing
    /// the radius like `sqrt(h)` lets both the noise and the truncation
    /// error go to zero.
    Patch { scale: f64, degree: usize },
}

impl Default for BoundaryFit {
    fn default() -> Self {
        BoundaryFit::Patch {
            scale: 2.0,
            degree: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GradientField {
    /// Exact P1 gradient per triangle.
    pub triangle: Vec<Vec2>,
    /// Area-weighted average of incident triangle gradients per vertex.
    pub vertex: Vec<Vec2>,
    /// Gradient of a least-squares quadratic through the nodal values within
    /// [`PATCH_REACH`] mesh sizes of each interior vertex. Unlike the
    /// averaged gradient it stays second-order accurate next to the boundary.
    pub recovered: Vec<Vec2>,
    /// Normal derivative fits; `Some` exactly for boundary vertices.
    pub boundary: Vec<Option<BoundaryJet>>,
    normals: Vec<Option<Vec2>>,
}

impl GradientField {
    /// Best gradient estimate at `v`: the fitted normal derivative times the
    /// outward normal on the boundary (the tangential derivative of `u = 0`
    /// vanishes), the patch-recovered gradient inside.
    pub fn at(&self, v: usize) -> Vec2 {
        match (self.boundary[v], self.normals[v]) {
            (Some(jet), Some(n)) => n * jet.u_n,
            _ => self.recovered[v],
        }
    }

    /// `W = sqrt(1 + |grad u|^2)` at vertex `v`.
    pub fn slope_factor(&self, v: usize) -> f64 {
        (1.0 + self.at(v).norm_squared()).sqrt()
    }

    /// Minimum of the fitted `u_n` over the boundary.
    pub fn q_min(&self) -> f64 {
        self.boundary
            .iter()
            .flatten()
            .map(|j| j.u_n)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.vertex.len())
            .map(|v| self.at(v).norm())
            .fold(0.0, f64::max)
    }
}

pub fn recover_gradient(mesh: &Mesh, field: &ScalarField) -> Result<GradientField, SolveError> {
    recover_gradient_with(mesh, field, BoundaryFit::default())
}

pub fn recover_gradient_with(
    mesh: &Mesh,
    field: &ScalarField,
    fit: BoundaryFit,
) -> Result<GradientField, SolveError> {
    let disc = Discretization::new(mesh);
    let n = mesh.n_vertices();
    let triangle: Vec<Vec2> = (0..mesh.triangles.len())
        .map(|t| disc.triangle_gradient(t, &field.values))
        .collect();
    let mut sum = vec![Vec2::zeros(); n];
    let mut weight = vec![0.0; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let a = mesh.triangle_area(t);
        for &v in tri {
            sum[v] += triangle[t] * a;
            weight[v] += a;
        }
    }
    let vertex: Vec<Vec2> = sum
        .iter()
        .zip(&weight)
        .map(|(s, &w)| if w > 0.0 { s / w } else { Vec2::zeros() })
        .collect();

    let recovered: Vec<Vec2> = (0..n)
        .map(|v| {
            if mesh.is_boundary(v) {
                return vertex[v];
            }
            let (e1, e2) = (Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
            local_fit(mesh, field, v, e1, e2, PATCH_REACH * mesh.h, 2)
                .map_or(vertex[v], |(c, reach)| Vec2::new(c[0], c[1]) / reach)
        })
        .collect();

    let length = (mesh.total_area() / std::f64::consts::PI).sqrt();
    let mut boundary = vec![None; n];
    let mut normals = vec![None; n];
    for &v in &mesh.boundary_vertex_ids {
        let tag = mesh.boundary_tag(v).expect("boundary vertex has a tag");
        normals[v] = Some(tag.normal);
        let jet = match fit {
            BoundaryFit::NormalLine => normal_line_fit(mesh, field, v, tag.normal)?,
            BoundaryFit::Patch { scale, degree } => patch_fit(
                mesh,
                field,
                v,
                tag.normal,
                scale * (mesh.h * length).sqrt(),
                degree,
            )
            .ok_or(SolveError::InterpolationOutsideDomain { vertex: v })?,
        };
        boundary[v] = Some(jet);
    }
    Ok(GradientField {
        triangle,
        vertex,
        recovered,
        boundary,
        normals,
    })
}

fn normal_line_fit(
    mesh: &Mesh,
    field: &ScalarField,
    v: usize,
    normal: Vec2,
) -> Result<BoundaryJet, SolveError> {
    let origin = mesh.vertices[v];
    let f0 = field.values[v];
    for step in [mesh.h, 0.5 * mesh.h] {
        let sample = |depth: f64| mesh.interpolate(&field.values, origin - normal * depth);
        if let (Some(f1), Some(f2)) = (sample(step), sample(2.0 * step)) {
            // f(s) = u(origin - s n); outward derivatives flip the odd order
            let df = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step);
            let ddf = (f0 - 2.0 * f1 + f2) / (step * step);
            return Ok(BoundaryJet {
                u_n: -df,
                u_nn: ddf,
            });
        }
    }
    Err(SolveError::InterpolationOutsideDomain { vertex: v })
}

fn monomials(xi: f64, eta: f64, degree: usize) -> Vec<f64> {
    let mut m = Vec::new();
    for total in 1..=degree {
        for j in 0..=total {
            m.push(xi.powi((total - j) as i32) * eta.powi(j as i32));
        }
    }
    m
}

/// Vertices other than `v` within `reach` of it, found by walking the mesh
/// graph outward from `v`.
fn vertices_within(mesh: &Mesh, v: usize, reach: f64) -> Vec<usize> {
    let origin = mesh.vertices[v];
    let mut seen = std::collections::HashSet::from([v]);
    let mut queue = VecDeque::from([v]);
    let mut out = Vec::new();
    while let Some(w) = queue.pop_front() {
        for &x in mesh.vertex_neighbors(w).expect("vertex id from the mesh") {
            if (mesh.vertices[x] - origin).norm() <= reach && seen.insert(x) {
                out.push(x);
                queue.push_back(x);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Least-squares polynomial of total degree `degree` in the frame
/// `(e1, e2)` through the value at `v`, fitted to the nodal values within
/// `radius` (grown if there are too few). Returns the coefficients, in the
/// order of [`monomials`], for coordinates scaled by the final reach.
fn local_fit(
    mesh: &Mesh,
    field: &ScalarField,
    v: usize,
    e1: Vec2,
    e2: Vec2,
    radius: f64,
    degree: usize,
) -> Option<(DVector<f64>, f64)> {
    let origin = mesh.vertices[v];
    let f0 = field.values[v];
    let n_coef = (degree + 1) * (degree + 2) / 2 - 1;
    let mut reach = radius;
    for _ in 0..4 {
        let near = vertices_within(mesh, v, reach);
        if near.len() >= n_coef + 3 {
            let rows: Vec<(Vec<f64>, f64)> = near
                .iter()
                .map(|&w| {
                    // coordinates scaled to the patch keep the system well conditioned
                    let d = (mesh.vertices[w] - origin) / reach;
                    (
                        monomials(d.dot(&e1), d.dot(&e2), degree),
                        field.values[w] - f0,
                    )
                })
                .collect();
            let a = DMatrix::from_fn(rows.len(), n_coef, |i, j| rows[i].0[j]);
            let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
            if let Ok(c) = a.svd(true, true).solve(&b, 1e-12) {
                return Some((c, reach));
            }
        }
        reach *= 1.5;
    }
    None
}

fn patch_fit(
    mesh: &Mesh,
    field: &ScalarField,
    v: usize,
    normal: Vec2,
    radius: f64,
    degree: usize,
) -> Option<BoundaryJet> {
    let tangent = Vec2::new(-normal.y, normal.x);
    // second coordinate is depth along the inward normal
    let (c, reach) = local_fit(mesh, field, v, tangent, -normal, radius, degree)?;
    // monomial order: xi, eta, xi^2, xi*eta, eta^2, ...
    Some(BoundaryJet {
        u_n: -c[1] / reach,
        u_nn: 2.0 * c[4] / (reach * reach),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, DomainSpec};
    use crate::mesh::triangulate;

    #[test]
    fn linear_field_has_exact_triangle_gradients() {
        let mesh = triangulate(
            &Domain::new(DomainSpec::Ellipse { a: 2.0, b: 1.0 }).unwrap(),
            0.2,
        )
        .unwrap();
        let field = ScalarField::from_fn(&mesh, |p| p.x);
        let g = recover_gradient(&mesh, &field).unwrap();
        for t in &g.triangle {
            assert!((t - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        }
        for v in mesh.interior_vertex_ids() {
            assert!((g.vertex[v] - Vec2::new(1.0, 0.0)).norm() < 1e-12);
            assert!((g.at(v) - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_field_vertex_gradient_error() {
        let mesh = triangulate(&Domain::new(DomainSpec::unit_disk()).unwrap(), 0.05).unwrap();
        let field = ScalarField::from_fn(&mesh, |p| p.x * p.x);
        let g = recover_gradient(&mesh, &field).unwrap();
        let err = (0..mesh.n_vertices())
            .map(|v| (g.vertex[v] - Vec2::new(2.0 * mesh.vertices[v].x, 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err <= 0.15, "max error {err}");
        // the quadratic patch reproduces quadratics
        let err = mesh
            .interior_vertex_ids()
            .map(|v| (g.at(v) - Vec2::new(2.0 * mesh.vertices[v].x, 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "patch error {err}");
    }

    #[test]
    fn fits_recover_normal_derivatives_of_a_radial_quadratic() {
        // u = (r^2 - 1)/4: u_n = 1/2 and u_nn = 1/2 on the unit circle
        let mesh = triangulate(&Domain::new(DomainSpec::unit_disk()).unwrap(), 0.05).unwrap();
        let field = ScalarField::dirichlet_from_fn(&mesh, |p| (p.norm_squared() - 1.0) / 4.0);
        for fit in [BoundaryFit::NormalLine, BoundaryFit::default()] {
            let g = recover_gradient_with(&mesh, &field, fit).unwrap();
            for &v in &mesh.boundary_vertex_ids {
                let jet = g.boundary[v].unwrap();
                assert!((jet.u_n - 0.5).abs() < 0.02, "{fit:?} u_n {}", jet.u_n);
            }
        }
        let g = recover_gradient(&mesh, &field).unwrap();
        for &v in &mesh.boundary_vertex_ids {
            let jet = g.boundary[v].unwrap();
            assert!((jet.u_n - 0.5).abs() < 1e-3);
            assert!((jet.u_nn - 0.5).abs() < 2e-2, "u_nn {}", jet.u_nn);
        }
    }
}
