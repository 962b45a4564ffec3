//! Compares the computed boundary slope and depth with the a priori bounds
//! on a family of ellipses.
//!
//! cargo run --example bounds_table

use mcflow::geometry::DomainSpec;
use mcflow::problem::ProblemSpec;
use mcflow::solver::SolveOptions;
use mcflow::verify::full_report;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problems = [
        ProblemSpec::PowerMc { alpha: 2.0 },
        ProblemSpec::ConstantForcing { mu: 0.5 },
    ];
    for a in [1.0, 1.25, 1.5] {
        let spec = DomainSpec::Ellipse { a, b: 1.0 };
        for problem in &problems {
            let v = full_report(&spec, problem, 0.05, &[], &SolveOptions::default())?;
            let r = &v.report;
            println!(
                "a = {a:.2} {:24} q_min {:.5}  u_min {:.5}  kappa_max {:.4}",
                problem.label(),
                r.q_min,
                r.u_min,
                r.kappa_max
            );
            for b in r.bounds.iter().filter(|b| b.applicable) {
                println!(
                    "    {:20} lhs {:.5}  rhs {:.5}  slack {:+.4}  {}",
                    format!("{:?}", b.name),
                    b.lhs,
                    b.rhs.unwrap(),
                    b.slack.unwrap(),
                    if b.holds { "holds" } else { "VIOLATED" }
                );
            }
        }
    }
    Ok(())
}
