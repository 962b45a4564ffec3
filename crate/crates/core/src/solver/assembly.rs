//! P1 Galerkin residual and Jacobian of `div(grad u / W) = g(W)`.
//!
//! Weak form with the divergence term integrated by parts:
//!
//! ```text
//! R_i = sum_T |T| [ (grad u . grad phi_i) / W + g(W) / 3 ]
//! ```
//!
//! `W` is constant on each triangle for P1 fields, so the stiffness part is
//! integrated exactly; the forcing uses vertex-lumped quadrature.

use rayon::prelude::*;

use crate::geometry::Vec2;
use crate::linalg::SparseMatrix;
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;

use super::ScalarField;

/// Interior degree-of-freedom numbering.
#[derive(Debug, Clone)]
pub struct DofMap {
    /// `dof_of[v]` is `Some(i)` for interior vertices.
    pub dof_of: Vec<Option<usize>>,
    /// Vertex id of each dof.
    pub vertex_of: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let mut dof_of = vec![None; mesh.n_vertices()];
        let mut vertex_of = Vec::new();
        for v in mesh.interior_vertex_ids() {
            dof_of[v] = Some(vertex_of.len());
            vertex_of.push(v);
        }
        DofMap { dof_of, vertex_of }
    }

    pub fn len(&self) -> usize {
        self.vertex_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_of.is_empty()
    }
}

/// Per-triangle geometry cached for repeated assembly.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub dofs: DofMap,
    triangles: Vec<[usize; 3]>,
    areas: Vec<f64>,
    basis_grads: Vec<[Vec2; 3]>,
    pattern: Vec<Vec<usize>>,
}

/// Local contribution of one triangle.
struct Local {
    r: [f64; 3],
    k: [[f64; 3]; 3],
}

impl Discretization {
    pub fn new(mesh: &Mesh) -> Self {
        let dofs = DofMap::new(mesh);
        let mut areas = Vec::with_capacity(mesh.triangles.len());
        let mut basis_grads = Vec::with_capacity(mesh.triangles.len());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let area = mesh.triangle_area(t);
            let p = tri.map(|v| mesh.vertices[v]);
            let mut g = [Vec2::zeros(); 3];
            for i in 0..3 {
                // grad phi_i is the inward normal of the opposite edge over 2|T|
                let e = p[(i + 2) % 3] - p[(i + 1) % 3];
                g[i] = Vec2::new(-e.y, e.x) / (2.0 * area);
            }
            areas.push(area);
            basis_grads.push(g);
        }
        let mut pattern = vec![Vec::new(); dofs.len()];
        for tri in &mesh.triangles {
            for &a in tri {
                for &b in tri {
                    if let (Some(i), Some(j)) = (dofs.dof_of[a], dofs.dof_of[b]) {
                        pattern[i].push(j);
                    }
                }
            }
        }
        for row in &mut pattern {
            row.sort_unstable();
            row.dedup();
        }
        Discretization {
            dofs,
            triangles: mesh.triangles.clone(),
            areas,
            basis_grads,
            pattern,
        }
    }

    pub fn empty_matrix(&self) -> SparseMatrix {
        SparseMatrix::with_pattern(&self.pattern)
    }

    pub fn triangle_gradient(&self, t: usize, values: &[f64]) -> Vec2 {
        let tri = self.triangles[t];
        let g = &self.basis_grads[t];
        g[0] * values[tri[0]] + g[1] * values[tri[1]] + g[2] * values[tri[2]]
    }

    fn local(&self, t: usize, values: &[f64], problem: &ProblemSpec, with_jacobian: bool) -> Local {
        let area = self.areas[t];
        let g = &self.basis_grads[t];
        let grad = self.triangle_gradient(t, values);
        let w = (1.0 + grad.norm_squared()).sqrt();
        let forcing = problem.forcing(w);
        let mut local = Local {
            r: [0.0; 3],
            k: [[0.0; 3]; 3],
        };
        let proj: [f64; 3] = [grad.dot(&g[0]), grad.dot(&g[1]), grad.dot(&g[2])];
        for i in 0..3 {
            local.r[i] = area * (proj[i] / w + forcing / 3.0);
        }
        if with_jacobian {
            let dg = problem.forcing_derivative(w);
            let w3 = w * w * w;
            for i in 0..3 {
                for j in 0..3 {
                    let stiff = g[i].dot(&g[j]) / w - proj[i] * proj[j] / w3;
                    let force = dg * proj[j] / w / 3.0;
                    local.k[i][j] = area * (stiff + force);
                }
            }
        }
        local
    }

    fn locals(&self, values: &[f64], problem: &ProblemSpec, with_jacobian: bool) -> Vec<Local> {
        (0..self.triangles.len())
            .into_par_iter()
            .map(|t| self.local(t, values, problem, with_jacobian))
            .collect()
    }

    /// Residual over interior dofs. Triangle contributions are reduced in
    /// triangle order, so the result does not depend on the thread count.
    pub fn residual(&self, values: &[f64], problem: &ProblemSpec) -> Vec<f64> {
        let locals = self.locals(values, problem, false);
        let mut r = vec![0.0; self.dofs.len()];
        for (tri, local) in self.triangles.iter().zip(&locals) {
            for a in 0..3 {
                if let Some(i) = self.dofs.dof_of[tri[a]] {
                    r[i] += local.r[a];
                }
            }
        }
        r
    }

    /// Residual and Jacobian in one assembly pass.
    pub fn residual_and_jacobian(
        &self,
        values: &[f64],
        problem: &ProblemSpec,
    ) -> (Vec<f64>, SparseMatrix) {
        let locals = self.locals(values, problem, true);
        let mut r = vec![0.0; self.dofs.len()];
        let mut jac = self.empty_matrix();
        for (tri, local) in self.triangles.iter().zip(&locals) {
            for a in 0..3 {
                let Some(i) = self.dofs.dof_of[tri[a]] else {
                    continue;
                };
                r[i] += local.r[a];
                for b in 0..3 {
                    if let Some(j) = self.dofs.dof_of[tri[b]] {
                        jac.add(i, j, local.k[a][b]);
                    }
                }
            }
        }
        (r, jac)
    }

    /// Standard P1 Laplacian stiffness over interior dofs.
    pub fn laplacian(&self) -> SparseMatrix {
        let mut m = self.empty_matrix();
        for (t, tri) in self.triangles.iter().enumerate() {
            let g = &self.basis_grads[t];
            for a in 0..3 {
                for b in 0..3 {
                    if let (Some(i), Some(j)) = (self.dofs.dof_of[tri[a]], self.dofs.dof_of[tri[b]])
                    {
                        m.add(i, j, self.areas[t] * g[a].dot(&g[b]));
                    }
                }
            }
        }
        m
    }
}

/// Galerkin residual of `field` for `problem`, indexed by interior dof.
pub fn residual(mesh: &Mesh, field: &ScalarField, problem: &ProblemSpec) -> Vec<f64> {
    Discretization::new(mesh).residual(&field.values, problem)
}

/// Exact derivative of [`residual`] with respect to the interior nodal values.
pub fn jacobian(mesh: &Mesh, field: &ScalarField, problem: &ProblemSpec) -> SparseMatrix {
    Discretization::new(mesh)
        .residual_and_jacobian(&field.values, problem)
        .1
}
