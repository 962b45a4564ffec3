//! Mesh refinement study on the unit disk against the radial profile.
//!
//! cargo run --release --example convergence_study

use mcflow::geometry::{Domain, DomainSpec};
use mcflow::mesh::triangulate;
use mcflow::problem::ProblemSpec;
use mcflow::radial::{solve_radial, DEFAULT_STEPS};
use mcflow::solver::{newton_solve, recover_gradient, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = Domain::new(DomainSpec::unit_disk())?;
    let problem = ProblemSpec::ConstantForcing { mu: 1.0 };
    let radial = solve_radial(&problem, 1.0, DEFAULT_STEPS)?;
    println!("{}: radial q {:.6}", problem.label(), radial.q());
    println!("     h  vertices  nodal error  order    q_min");
    let mut prev: Option<(f64, f64)> = None;
    for h in [0.2, 0.1, 0.05, 0.025] {
        let mesh = triangulate(&domain, h)?;
        let sol = newton_solve(&mesh, &problem, &SolveOptions::default())?;
        let err = mesh
            .vertices
            .iter()
            .zip(&sol.field.values)
            .map(|(p, u)| (u - radial.u_at(p.norm())).abs())
            .fold(0.0, f64::max);
        let order = prev.map(|(h0, e0)| (e0 / err).ln() / (h0 / h).ln());
        let q = recover_gradient(&mesh, &sol.field)?.q_min();
        println!(
            "{h:6.3}  {:8}  {err:11.3e}  {:>5}  {q:.6}",
            mesh.n_vertices(),
            order.map_or("-".into(), |o| format!("{o:.2}"))
        );
        prev = Some((h, err));
    }
    Ok(())
}
