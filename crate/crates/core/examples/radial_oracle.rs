//! Radial profiles on the unit disk compared with the finite element solution.
//!
//! cargo run --example radial_oracle

use mcflow::geometry::{Domain, DomainSpec};
use mcflow::mesh::triangulate;
use mcflow::problem::ProblemSpec;
use mcflow::radial::{solve_radial, DEFAULT_STEPS};
use mcflow::solver::{newton_solve, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = triangulate(&Domain::new(DomainSpec::unit_disk())?, 0.05)?;
    for problem in [
        ProblemSpec::PowerMc { alpha: 1.0 },
        ProblemSpec::PowerMc { alpha: 3.0 },
        ProblemSpec::ConstantForcing { mu: 0.5 },
        ProblemSpec::ConstantForcing { mu: 1.0 },
    ] {
        let radial = solve_radial(&problem, 1.0, DEFAULT_STEPS)?;
        let fem = newton_solve(&mesh, &problem, &SolveOptions::default())?;
        let err = mesh
            .vertices
            .iter()
            .zip(&fem.field.values)
            .map(|(p, u)| (u - radial.u_at(p.norm())).abs())
            .fold(0.0, f64::max);
        println!(
            "{:24} q {:.5}  u_min {:.5}  q' {:.5}  max nodal error {err:.2e}",
            problem.label(),
            radial.q(),
            radial.u_min(),
            radial.q_prime()
        );
        for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
            println!(
                "    r = {r:.2}  u {:+.6}  u' {:.6}",
                radial.u_at(r),
                radial.p_at(r)
            );
        }
    }
    Ok(())
}
