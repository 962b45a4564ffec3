//! Triangulates an ellipse and writes vertices, triangles and boundary tags as CSV.
//!
//! cargo run --example mesh_export -- [h] [out_dir]

use std::path::PathBuf;

use mcflow::geometry::{Domain, DomainSpec};
use mcflow::mesh::triangulate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let h: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "mesh_out".into()));

    let domain = Domain::new(DomainSpec::Ellipse { a: 2.0, b: 1.0 })?;
    let mesh = triangulate(&domain, h)?;
    let n_boundary = (0..mesh.n_vertices())
        .filter(|&v| mesh.is_boundary(v))
        .count();
    println!("h = {h}");
    println!(
        "vertices    {} ({n_boundary} on the boundary)",
        mesh.n_vertices()
    );
    println!("triangles   {}", mesh.triangles.len());
    println!("min angle   {:.2} deg", mesh.min_angle_deg());
    println!(
        "area        {:.6} (exact {:.6})",
        mesh.total_area(),
        std::f64::consts::PI * 2.0
    );
    println!("euler char  {}", mesh.euler_characteristic());

    std::fs::create_dir_all(&out)?;
    mesh.write_csv(&out)?;
    println!("wrote {}", out.display());
    Ok(())
}
