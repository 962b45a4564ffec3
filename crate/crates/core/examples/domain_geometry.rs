//! Curvature, perimeter and inradius of the sample domains.
//!
//! cargo run --example domain_geometry

use mcflow::geometry::{Domain, DomainSpec};

fn main() {
    let specs = [
        DomainSpec::unit_disk(),
        DomainSpec::Ellipse { a: 2.0, b: 1.0 },
        DomainSpec::Fourier {
            r0: 1.0,
            harmonics: vec![(2, 0.1, 0.0)],
        },
    ];
    for spec in specs {
        let domain = Domain::new(spec.clone()).expect("convex domain");
        let (d, center) = domain.inscribed_disk();
        println!("{spec:?}");
        println!("  perimeter  {:.6}", domain.perimeter());
        println!("  area       {:.6}", domain.polygon_area());
        println!("  kappa_max  {:.6}", domain.kappa_max(20_000).unwrap());
        println!("  inradius   {d:.6} at ({:.4}, {:.4})", center.x, center.y);
        for t in [
            0.0,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_2,
        ] {
            let p = domain.position(t);
            println!(
                "  t = {t:.4}: ({:.4}, {:.4}) curvature {:.6}",
                p.x,
                p.y,
                domain.curvature(t).unwrap()
            );
        }
    }
}
