//! Evaluates the P-function for several beta and reports where its extrema sit.
//!
//! cargo run --example pfunctions -- [alpha]

use mcflow::geometry::DomainSpec;
use mcflow::problem::ProblemSpec;
use mcflow::solver::SolveOptions;
use mcflow::verify::full_report;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(2.0);
    let betas = [0.5, 1.0, 1.5, 2.0, 3.0];
    let spec = DomainSpec::Fourier {
        r0: 1.0,
        harmonics: vec![(2, 0.1, 0.0)],
    };
    let v = full_report(
        &spec,
        &ProblemSpec::PowerMc { alpha },
        0.05,
        &betas,
        &SolveOptions::default(),
    )?;
    let center = v.report.critical.points[0].position;
    println!("critical point ({:.4}, {:.4})", center[0], center[1]);
    println!(" beta       min       max  min on boundary  max to critical point");
    for p in &v.report.pfunc {
        println!(
            "{:5.2} {:9.5} {:9.5}  {:15}  {:.4}",
            p.beta, p.min, p.max, p.min_on_boundary, p.argmax_to_critical
        );
    }
    for note in &v.report.notes {
        println!("note: {note}");
    }
    Ok(())
}
