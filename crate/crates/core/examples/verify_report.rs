//! Runs the full check suite on one domain and prints the JSON report.
//!
//! cargo run --example verify_report

use mcflow::geometry::DomainSpec;
use mcflow::problem::ProblemSpec;
use mcflow::solver::SolveOptions;
use mcflow::verify::full_report;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = full_report(
        &DomainSpec::Ellipse { a: 1.5, b: 1.0 },
        &ProblemSpec::PowerMc { alpha: 2.0 },
        0.05,
        &[1.0, 1.5, 2.0],
        &SolveOptions::default(),
    )?;
    println!("{}", serde_json::to_string_pretty(&v.report)?);
    let failures = v.report.failures();
    if failures.is_empty() {
        eprintln!("all checks hold");
    } else {
        for f in failures {
            eprintln!("FAILED: {f}");
        }
    }
    Ok(())
}
