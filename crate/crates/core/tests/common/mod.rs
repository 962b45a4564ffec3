#![allow(dead_code)]

use mcflow::geometry::{Domain, DomainSpec};
use mcflow::mesh::{triangulate, Mesh};
use mcflow::problem::ProblemSpec;
use mcflow::radial::RadialSolution;
use mcflow::solver::ScalarField;

pub fn mesh(spec: DomainSpec, h: f64) -> Mesh {
    triangulate(&Domain::new(spec).unwrap(), h).unwrap()
}

pub fn fourier() -> DomainSpec {
    DomainSpec::Fourier {
        r0: 1.0,
        harmonics: vec![(2, 0.1, 0.0)],
    }
}

pub fn domains() -> Vec<DomainSpec> {
    vec![
        DomainSpec::unit_disk(),
        DomainSpec::Ellipse { a: 2.0, b: 1.0 },
        fourier(),
    ]
}

pub fn problems() -> Vec<ProblemSpec> {
    vec![
        ProblemSpec::PowerMc { alpha: 2.0 },
        ProblemSpec::PowerMc { alpha: 3.0 },
        ProblemSpec::ConstantForcing { mu: 0.5 },
        ProblemSpec::ConstantForcing { mu: 1.0 },
    ]
}

/// Largest nodal difference between a disk solution and the radial profile.
pub fn nodal_error(mesh: &Mesh, field: &ScalarField, radial: &RadialSolution) -> f64 {
    mesh.vertices
        .iter()
        .zip(&field.values)
        .map(|(p, u)| (u - radial.u_at(p.norm())).abs())
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn fitted_order(h: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
