//! P-functions of the two problems and their extrema on a mesh.
//!
//! * `Phi(x; beta) = 2/(alpha - 1) * W^(alpha - 1) - beta * u` for `g = W^-alpha`,
//! * `Psi(x; beta) = ln(W^2 / (1 + mu W)^2) - beta * v` for `g = 1/W + mu`,
//!
//! with `W = sqrt(1 + |grad u|^2)`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::PFunctionError;
use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;
use crate::solver::{GradientField, ScalarField};

/// Relative tolerance (on the field range) of the boundary-minimum test.
pub const MIN_ON_BOUNDARY_TOL: f64 = 1e-3;

pub fn phi(alpha: f64, beta: f64, u: f64, grad: Vec2) -> Result<f64, PFunctionError> {
    if alpha == 1.0 {
        return Err(PFunctionError::AlphaOne);
    }
    let s = 1.0 + grad.norm_squared();
    Ok(2.0 / (alpha - 1.0) * s.powf((alpha - 1.0) / 2.0) - beta * u)
}

pub fn psi(mu: f64, beta: f64, v: f64, grad: Vec2) -> Result<f64, PFunctionError> {
    if !(mu >= 0.0) {
        return Err(PFunctionError::NegativeMu(mu));
    }
    let s = 1.0 + grad.norm_squared();
    let d = 1.0 + mu * s.sqrt();
    Ok((s / (d * d)).ln() - beta * v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PKind {
    Phi,
    Psi,
}

impl PKind {
    pub fn for_problem(problem: &ProblemSpec) -> Self {
        match problem {
            ProblemSpec::PowerMc { .. } => PKind::Phi,
            ProblemSpec::ConstantForcing { .. } => PKind::Psi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PFunctionField {
    pub beta: f64,
    pub kind: PKind,
    pub values: Vec<f64>,
    pub argmin_vertex: usize,
    pub argmax_vertex: usize,
    /// The minimum is attained on the boundary, up to
    /// [`MIN_ON_BOUNDARY_TOL`] times the field range.
    pub min_on_boundary: bool,
}

impl PFunctionField {
    pub fn min(&self) -> f64 {
        self.values[self.argmin_vertex]
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax_vertex]
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    /// Writes `id,x,y,P`.
    pub fn write_csv(&self, mesh: &Mesh, path: &Path) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "id,x,y,P")?;
        for (i, (p, value)) in mesh.vertices.iter().zip(&self.values).enumerate() {
            writeln!(w, "{i},{:?},{:?},{:?}", p.x, p.y, value)?;
        }
        w.flush()
    }
}

/// Evaluates the problem's P-function at every vertex. Boundary vertices use
/// the fitted normal derivative for the gradient.
pub fn evaluate_field(
    mesh: &Mesh,
    field: &ScalarField,
    grads: &GradientField,
    problem: &ProblemSpec,
    beta: f64,
) -> Result<PFunctionField, PFunctionError> {
    let values = (0..mesh.n_vertices())
        .map(|v| {
            let (u, g) = (field.values[v], grads.at(v));
            match *problem {
                ProblemSpec::PowerMc { alpha } => phi(alpha, beta, u, g),
                ProblemSpec::ConstantForcing { mu } => psi(mu, beta, u, g),
            }
        })
        .collect::<Result<Vec<f64>, _>>()?;

    let argmin_vertex = extremum(&values, |a, b| a < b);
    let argmax_vertex = extremum(&values, |a, b| a > b);
    let range = values[argmax_vertex] - values[argmin_vertex];
    let min_over = |boundary: bool| {
        (0..values.len())
            .filter(|&v| mesh.is_boundary(v) == boundary)
            .map(|v| values[v])
            .fold(f64::INFINITY, f64::min)
    };
    let min_on_boundary = mesh.is_boundary(argmin_vertex)
        || min_over(false) >= min_over(true) - MIN_ON_BOUNDARY_TOL * range;
    Ok(PFunctionField {
        beta,
        kind: PKind::for_problem(problem),
        values,
        argmin_vertex,
        argmax_vertex,
        min_on_boundary,
    })
}

/// First index that beats all others under `better` (ties keep the lowest id).
fn extremum(values: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if better(v, values[best]) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!(phi(3.0, 2.0, 0.0, Vec2::zeros()).unwrap(), 1.0);
        assert!((phi(3.0, 2.0, -1.0, Vec2::new(1.0, 0.0)).unwrap() - 4.0).abs() < 1e-14);
        assert!((phi(2.0, 1.0, 0.0, Vec2::new(0.0, 3f64.sqrt())).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(
            phi(1.0, 1.0, 0.0, Vec2::zeros()),
            Err(PFunctionError::AlphaOne)
        );
    }

    #[test]
    fn psi_values() {
        assert!((psi(1.0, 0.7, 0.0, Vec2::zeros()).unwrap() + 1.386294361).abs() < 1e-9);
        assert!((psi(0.0, 2.0, -1.0, Vec2::zeros()).unwrap() - 2.0).abs() < 1e-15);
        let expected = (4.0f64 / 9.0).ln() + 1.0;
        assert!(
            (psi(1.0, 1.0, -1.0, Vec2::new(3f64.sqrt(), 0.0)).unwrap() - expected).abs() < 1e-14
        );
        assert!((expected - 0.18907).abs() < 1e-5);
        assert_eq!(
            psi(-0.5, 1.0, 0.0, Vec2::zeros()),
            Err(PFunctionError::NegativeMu(-0.5))
        );
    }

    #[test]
    fn extremum_ties_keep_first() {
        assert_eq!(extremum(&[1.0, 0.0, 0.0, 2.0], |a, b| a < b), 1);
        assert_eq!(extremum(&[1.0, 2.0, 2.0], |a, b| a > b), 1);
    }
}
