//! Locates critical points and counts the sign changes of directional
//! derivatives along the boundary.
//!
//! cargo run --example critical_points

use mcflow::geometry::{Domain, DomainSpec};
use mcflow::mesh::triangulate;
use mcflow::problem::ProblemSpec;
use mcflow::solver::{newton_solve, recover_gradient, SolveOptions};
use mcflow::verify::{default_critical_tol, find_critical_points};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = DomainSpec::Fourier {
        r0: 1.0,
        harmonics: vec![(2, 0.1, 0.0), (3, 0.0, 0.02)],
    };
    let mesh = triangulate(&Domain::new(spec)?, 0.05)?;
    let solution = newton_solve(
        &mesh,
        &ProblemSpec::ConstantForcing { mu: 0.5 },
        &SolveOptions::default(),
    )?;
    let grads = recover_gradient(&mesh, &solution.field)?;
    let report = find_critical_points(&mesh, &grads, default_critical_tol(&mesh, &grads))?;

    println!(
        "tolerance {:.3e}, {} critical point(s)",
        report.tol, report.count
    );
    for p in &report.points {
        println!(
            "  ({:+.4}, {:+.4})  |grad u| {:.2e}  u_xx {:.4}  u_yy {:.4}  cluster {}",
            p.position[0],
            p.position[1],
            p.grad_norm,
            p.hessian_diag[0],
            p.hessian_diag[1],
            p.vertices
        );
    }
    for z in &report.z_theta_zero_counts {
        println!("  theta {:.4}: {} sign changes", z.theta, z.count);
    }
    Ok(())
}
