//! Solves both equations on an ellipse and prints the Newton history.
//!
//! cargo run --example solve_ellipse

use mcflow::geometry::{Domain, DomainSpec};
use mcflow::mesh::triangulate;
use mcflow::problem::ProblemSpec;
use mcflow::solver::{newton_solve, recover_gradient, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = Domain::new(DomainSpec::Ellipse { a: 2.0, b: 1.0 })?;
    let mesh = triangulate(&domain, 0.05)?;
    println!("{} vertices", mesh.n_vertices());

    for problem in [
        ProblemSpec::PowerMc { alpha: 3.0 },
        ProblemSpec::ConstantForcing { mu: 0.5 },
    ] {
        let solution = newton_solve(&mesh, &problem, &SolveOptions::default())?;
        println!("{}", problem.label());
        for rec in &solution.log {
            println!(
                "  iter {:2}  residual {:.3e}  damping {}",
                rec.iter, rec.residual, rec.damping
            );
        }
        let grads = recover_gradient(&mesh, &solution.field)?;
        let center = mesh.vertices[solution.field.argmin()];
        println!(
            "  u_min {:.6} at ({:.3}, {:.3}), q_min {:.6}",
            solution.field.min(),
            center.x,
            center.y,
            grads.q_min()
        );
    }
    Ok(())
}
