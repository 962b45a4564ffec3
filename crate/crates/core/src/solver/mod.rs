//! Finite-element solver for the Dirichlet problems.

mod assembly;
mod gradient;
mod newton;

pub use assembly::{jacobian, residual, Discretization, DofMap};
pub use gradient::{
    recover_gradient, recover_gradient_with, BoundaryFit, BoundaryJet, GradientField,
};
pub use newton::{newton_solve, Solution, SolveOptions};

use crate::geometry::Vec2;
use crate::mesh::Mesh;

/// Nodal values of a P1 field, indexed by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(mesh: &Mesh) -> Self {
        ScalarField {
            values: vec![0.0; mesh.n_vertices()],
        }
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn(Vec2) -> f64) -> Self {
        ScalarField {
            values: mesh.vertices.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Like [`ScalarField::from_fn`] but forced to zero on the boundary.
    pub fn dirichlet_from_fn(mesh: &Mesh, f: impl Fn(Vec2) -> f64) -> Self {
        ScalarField {
            values: mesh
                .vertices
                .iter()
                .enumerate()
                .map(|(v, &p)| if mesh.is_boundary(v) { 0.0 } else { f(p) })
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmin(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
            )
            .0
    }
}
