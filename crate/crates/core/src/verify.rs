//! Checks of a computed solution against the qualitative and quantitative
//! properties the two problems are known to have on convex domains.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::VerifyError;
use crate::geometry::{Domain, DomainSpec, Vec2};
use crate::mesh::{triangulate, Mesh};
use crate::pfunc::{evaluate_field, PFunctionField, PKind};
use crate::problem::ProblemSpec;
use crate::solver::{
    newton_solve, recover_gradient, GradientField, ScalarField, Solution, SolveOptions,
};

/// Samples used for the maximum boundary curvature.
pub const KAPPA_SAMPLES: usize = 20_000;
/// Directions `theta = k * pi / 8` for the boundary zero count of `z(theta)`.
pub const THETA_STEPS: usize = 8;
/// Relative part of the bound tolerance `1e-3 * max(1, |rhs|)`.
pub const BOUND_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub position: [f64; 2],
    /// `|grad u|` at the cluster vertex with the smallest gradient.
    pub grad_norm: f64,
    /// `(u_xx, u_yy)` estimated from the recovered gradient field.
    pub hessian_diag: [f64; 2],
    /// Vertices in the cluster.
    pub vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub theta: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub points: Vec<CriticalPoint>,
    pub count: usize,
    pub tol: f64,
    pub z_theta_zero_counts: Vec<ZeroCount>,
}

/// Default threshold on `|grad u|` for critical-point candidates:
/// `h * max |grad u|`.
pub fn default_critical_tol(mesh: &Mesh, grads: &GradientField) -> f64 {
    mesh.h * grads.max_norm()
}

/// Interior vertices with `|grad u| < tol`, grouped into clusters of
/// mesh-adjacent vertices. Each cluster is one critical point located at the
/// centroid weighted by `tol - |grad u|`.
pub fn find_critical_points(
    mesh: &Mesh,
    grads: &GradientField,
    tol: f64,
) -> Result<CriticalPointReport, VerifyError> {
    let n = mesh.n_vertices();
    let norm: Vec<f64> = (0..n).map(|v| grads.at(v).norm()).collect();
    let candidate: Vec<bool> = (0..n)
        .map(|v| !mesh.is_boundary(v) && norm[v] < tol)
        .collect();
    if !candidate.iter().any(|&c| c) {
        return Err(VerifyError::NoCriticalPoint { tol });
    }
    let hessian = hessian_diagonal(mesh, grads);
    let mut seen = vec![false; n];
    let mut points = Vec::new();
    for start in 0..n {
        if !candidate[start] || seen[start] {
            continue;
        }
        let mut cluster = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            cluster.push(v);
            for &w in mesh.vertex_neighbors(v).expect("vertex id from the mesh") {
                if candidate[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut centroid = Vec2::zeros();
        let mut total = 0.0;
        for &v in &cluster {
            let w = tol - norm[v];
            centroid += mesh.vertices[v] * w;
            total += w;
        }
        centroid /= total;
        let best = *cluster
            .iter()
            .min_by(|&&a, &&b| norm[a].total_cmp(&norm[b]))
            .expect("cluster is nonempty");
        points.push(CriticalPoint {
            position: [centroid.x, centroid.y],
            grad_norm: norm[best],
            hessian_diag: hessian[best],
            vertices: cluster.len(),
        });
    }
    let z_theta_zero_counts = (0..THETA_STEPS)
        .map(|k| {
            let theta = k as f64 * PI / THETA_STEPS as f64;
            ZeroCount {
                theta,
                count: z_theta_boundary_zeros(mesh, grads, theta),
            }
        })
        .collect();
    Ok(CriticalPointReport {
        count: points.len(),
        points,
        tol,
        z_theta_zero_counts,
    })
}

/// `(d/dx u_x, d/dy u_y)` per vertex: the recovered gradient components are
/// treated as P1 fields and their triangle gradients area-averaged.
fn hessian_diagonal(mesh: &Mesh, grads: &GradientField) -> Vec<[f64; 2]> {
    let n = mesh.n_vertices();
    let mut sum = vec![[0.0; 2]; n];
    let mut weight = vec![0.0; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        let p = tri.map(|v| mesh.vertices[v]);
        let g = tri.map(|v| grads.at(v));
        let mut hxx = 0.0;
        let mut hyy = 0.0;
        for i in 0..3 {
            let e = p[(i + 2) % 3] - p[(i + 1) % 3];
            let basis = Vec2::new(-e.y, e.x) / (2.0 * area);
            hxx += basis.x * g[i].x;
            hyy += basis.y * g[i].y;
        }
        for &v in tri {
            sum[v][0] += area * hxx;
            sum[v][1] += area * hyy;
            weight[v] += area;
        }
    }
    sum.iter()
        .zip(&weight)
        .map(|(s, &w)| [s[0] / w, s[1] / w])
        .collect()
}

/// Sign changes of `z(theta) = u_x cos(theta) + u_y sin(theta)` around the
/// boundary loop. Exact zeros take the sign of the previous nonzero value.
pub fn z_theta_boundary_zeros(mesh: &Mesh, grads: &GradientField, theta: f64) -> usize {
    let dir = Vec2::new(theta.cos(), theta.sin());
    let signs: Vec<f64> = mesh
        .boundary_vertex_ids
        .iter()
        .map(|&v| grads.at(v).dot(&dir))
        .collect();
    let Some(start) = signs.iter().position(|&z| z != 0.0) else {
        return 0;
    };
    let m = signs.len();
    let mut current = signs[start].signum();
    let mut changes = 0;
    for k in 1..=m {
        let z = signs[(start + k) % m];
        if z != 0.0 && z.signum() != current {
            changes += 1;
            current = z.signum();
        }
    }
    changes
}

/// `|LHS - RHS|` of the boundary identity satisfied by the exact solution:
///
/// * power forcing: `u_nn + kappa u_n (1 + u_n^2) = (1 + u_n^2)^((3 - alpha)/2)`,
/// * constant forcing: `v_nn = (1 + v_n^2)(1 - kappa v_n) + mu (1 + v_n^2)^(3/2)`.
pub fn identity_defect(problem: &ProblemSpec, kappa: f64, u_n: f64, u_nn: f64) -> f64 {
    let s = 1.0 + u_n * u_n;
    match *problem {
        ProblemSpec::PowerMc { alpha } => {
            (u_nn + kappa * u_n * s - s.powf((3.0 - alpha) / 2.0)).abs()
        }
        ProblemSpec::ConstantForcing { mu } => {
            (u_nn - s * (1.0 - kappa * u_n) - mu * s.powf(1.5)).abs()
        }
    }
}

/// Maximum of [`identity_defect`] over the boundary vertices, using the
/// fitted normal derivatives and the exact curvature of the domain.
pub fn boundary_identity_residual(
    mesh: &Mesh,
    grads: &GradientField,
    problem: &ProblemSpec,
    domain: &Domain,
) -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for &v in &mesh.boundary_vertex_ids {
        let tag = mesh.boundary_tag(v).expect("boundary vertex has a tag");
        let jet = grads.boundary[v].expect("boundary vertex has a fitted jet");
        let kappa = domain.curvature(tag.t)?;
        worst = worst.max(identity_defect(problem, kappa, jet.u_n, jet.u_nn));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    /// `q_min >= kappa_max^(-2/(alpha+1))`.
    SlopeLowerPower,
    /// `-u_min >= 2/(alpha-1) (kappa_max^(-(alpha-1)/(alpha+1)) - 1)`.
    DepthLowerPower,
    /// `-u_min <= 1/(alpha-1) ((1/cos d)^(alpha-1) - 1)` for `alpha > 1`, `d < pi/2`.
    DepthUpperPower,
    /// `q_min >= (1+mu) / (2 kappa_max)`.
    SlopeLowerForcing,
    /// `-v_min >= 2 ln((1+mu) S / (1 + mu S))`, `S = sqrt(1 + (1+mu)^2 / (4 kappa_max^2))`.
    DepthLowerForcing,
    /// `-v_min <= ln(1/cos d)` for `d < pi/2`.
    DepthUpperForcing,
}

impl BoundName {
    pub fn is_lower(&self) -> bool {
        matches!(
            self,
            BoundName::SlopeLowerPower
                | BoundName::DepthLowerPower
                | BoundName::SlopeLowerForcing
                | BoundName::DepthLowerForcing
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: BoundName,
    pub lhs: f64,
    /// `None` where the formula is undefined for these inputs.
    pub rhs: Option<f64>,
    /// `lhs - rhs` for lower bounds, `rhs - lhs` for upper bounds.
    pub slack: Option<f64>,
    pub tolerance: f64,
    pub holds: bool,
    pub applicable: bool,
}

impl BoundCheck {
    fn new(name: BoundName, lhs: f64, rhs: Option<f64>, applicable: bool) -> Self {
        let rhs = rhs.filter(|r| r.is_finite());
        let slack = rhs.map(|r| if name.is_lower() { lhs - r } else { r - lhs });
        let tolerance = BOUND_TOL * rhs.map_or(1.0, |r| r.abs().max(1.0));
        let applicable = applicable && rhs.is_some();
        BoundCheck {
            name,
            lhs,
            rhs,
            slack,
            tolerance,
            holds: applicable && slack.is_some_and(|s| s >= -tolerance),
            applicable,
        }
    }
}

/// All six bound checks; those of the other problem family are returned
/// with `applicable = false`. `q_min` is the minimum boundary slope, `u_min`
/// the minimum of the solution, `d` the inradius.
pub fn check_bounds(
    q_min: f64,
    u_min: f64,
    kappa_max: f64,
    d: f64,
    problem: &ProblemSpec,
) -> Vec<BoundCheck> {
    let depth = -u_min;
    let upper_ok = d < FRAC_PI_2;
    let (alpha, mu) = match *problem {
        ProblemSpec::PowerMc { alpha } => (Some(alpha), None),
        ProblemSpec::ConstantForcing { mu } => (None, Some(mu)),
    };
    let power = |on: bool, f: &dyn Fn(f64) -> f64| alpha.filter(|_| on).map(f);
    let forcing = |on: bool, f: &dyn Fn(f64) -> f64| mu.filter(|_| on).map(f);
    let regular = alpha.is_some_and(|a| a != 1.0);
    let upper_power = upper_ok && alpha.is_some_and(|a| a > 1.0);
    let s = |mu: f64| (1.0 + (1.0 + mu).powi(2) / (4.0 * kappa_max * kappa_max)).sqrt();
    vec![
        BoundCheck::new(
            BoundName::SlopeLowerPower,
            q_min,
            power(regular, &|a| kappa_max.powf(-2.0 / (a + 1.0))),
            regular,
        ),
        BoundCheck::new(
            BoundName::DepthLowerPower,
            depth,
            power(regular, &|a| {
                2.0 / (a - 1.0) * (kappa_max.powf(-(a - 1.0) / (a + 1.0)) - 1.0)
            }),
            regular,
        ),
        BoundCheck::new(
            BoundName::DepthUpperPower,
            depth,
            power(upper_power, &|a| {
                ((1.0 / d.cos()).powf(a - 1.0) - 1.0) / (a - 1.0)
            }),
            upper_power,
        ),
        BoundCheck::new(
            BoundName::SlopeLowerForcing,
            q_min,
            forcing(true, &|m| (1.0 + m) / (2.0 * kappa_max)),
            mu.is_some(),
        ),
        BoundCheck::new(
            BoundName::DepthLowerForcing,
            depth,
            forcing(true, &|m| 2.0 * ((1.0 + m) * s(m) / (1.0 + m * s(m))).ln()),
            mu.is_some(),
        ),
        BoundCheck::new(
            BoundName::DepthUpperForcing,
            depth,
            forcing(upper_ok, &|_| (1.0 / d.cos()).ln()),
            upper_ok && mu.is_some(),
        ),
    ]
}

/// Summary of one P-function field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PFunctionSummary {
    pub beta: f64,
    pub kind: PKind,
    pub min: f64,
    pub max: f64,
    pub argmin_vertex: usize,
    pub argmax_vertex: usize,
    pub min_on_boundary: bool,
    /// Distance from the maximum to the nearest critical point.
    pub argmax_to_critical: f64,
    /// Whether `beta` lies in `[1, 2]`, where the boundary minimum is asserted.
    pub asserted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub problem: ProblemSpec,
    pub domain: DomainSpec,
    pub h: f64,
    pub n_vertices: usize,
    pub newton_iterations: usize,
    pub final_residual: f64,
    pub q_min: f64,
    pub u_min: f64,
    pub kappa_max: f64,
    pub inradius: f64,
    pub critical: CriticalPointReport,
    pub pfunc: Vec<PFunctionSummary>,
    /// Why no P-function was evaluated, if none was.
    pub pfunc_skipped: Option<String>,
    pub bounds: Vec<BoundCheck>,
    pub boundary_identity_residual: f64,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Descriptions of every applicable check that failed.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.critical.count != 1 {
            out.push(format!(
                "critical point count {} (expected 1)",
                self.critical.count
            ));
        }
        for z in &self.critical.z_theta_zero_counts {
            if z.count != 2 {
                out.push(format!(
                    "z(theta={:.4}) has {} boundary sign changes (expected 2)",
                    z.theta, z.count
                ));
            }
        }
        for p in &self.pfunc {
            if p.asserted && !p.min_on_boundary {
                out.push(format!("{:?}(beta={}) minimum is interior", p.kind, p.beta));
            }
            if p.beta == 2.0 && p.argmax_to_critical > 2.0 * self.h {
                out.push(format!(
                    "{:?}(beta=2) maximum is {:.3e} from the critical point (limit {:.3e})",
                    p.kind,
                    p.argmax_to_critical,
                    2.0 * self.h
                ));
            }
        }
        for b in &self.bounds {
            if b.applicable && !b.holds {
                out.push(format!(
                    "{:?}: lhs {:.6} rhs {:.6} slack {:.3e}",
                    b.name,
                    b.lhs,
                    b.rhs.unwrap_or(f64::NAN),
                    b.slack.unwrap_or(f64::NAN)
                ));
            }
        }
        out
    }

    pub fn all_hold(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Everything computed by [`full_report`], for callers that also export the
/// fields.
#[derive(Debug, Clone)]
pub struct Verification {
    pub report: VerificationReport,
    pub mesh: Mesh,
    pub solution: Solution,
    pub grads: GradientField,
    pub pfields: Vec<PFunctionField>,
}

/// Checks an already computed solution.
pub fn verify_solution(
    domain: &Domain,
    mesh: &Mesh,
    solution: &Solution,
    problem: &ProblemSpec,
    betas: &[f64],
) -> Result<(VerificationReport, GradientField, Vec<PFunctionField>), VerifyError> {
    let grads = recover_gradient(mesh, &solution.field)?;
    let critical = find_critical_points(mesh, &grads, default_critical_tol(mesh, &grads))?;
    let centers: Vec<Vec2> = critical
        .points
        .iter()
        .map(|p| Vec2::new(p.position[0], p.position[1]))
        .collect();

    let mut pfields = Vec::new();
    let mut pfunc = Vec::new();
    let mut pfunc_skipped = None;
    for &beta in betas {
        match evaluate_field(mesh, &solution.field, &grads, problem, beta) {
            Ok(f) => {
                let at = mesh.vertices[f.argmax_vertex];
                let argmax_to_critical = centers
                    .iter()
                    .map(|c| (c - at).norm())
                    .fold(f64::INFINITY, f64::min);
                pfunc.push(PFunctionSummary {
                    beta,
                    kind: f.kind,
                    min: f.min(),
                    max: f.max(),
                    argmin_vertex: f.argmin_vertex,
                    argmax_vertex: f.argmax_vertex,
                    min_on_boundary: f.min_on_boundary,
                    argmax_to_critical,
                    asserted: (1.0..=2.0).contains(&beta),
                });
                pfields.push(f);
            }
            Err(e) => {
                pfunc_skipped = Some(e.to_string());
                break;
            }
        }
    }

    let notes = betas
        .iter()
        .filter(|b| !(1.0..=2.0).contains(*b))
        .map(|b| {
            format!(
                "boundary minimum of the P-function not asserted for beta = {b} (outside [1, 2])"
            )
        })
        .collect();
    let q_min = grads.q_min();
    let u_min = solution.field.min();
    let kappa_max = domain.kappa_max(KAPPA_SAMPLES)?;
    let inradius = domain.inradius();
    let report = VerificationReport {
        problem: *problem,
        domain: domain.spec().clone(),
        h: mesh.h,
        n_vertices: mesh.n_vertices(),
        newton_iterations: solution.iterations(),
        final_residual: solution.final_residual,
        q_min,
        u_min,
        kappa_max,
        inradius,
        critical,
        pfunc,
        pfunc_skipped,
        bounds: check_bounds(q_min, u_min, kappa_max, inradius, problem),
        boundary_identity_residual: boundary_identity_residual(mesh, &grads, problem, domain)?,
        notes,
    };
    Ok((report, grads, pfields))
}

/// Meshes, solves and checks one configuration.
pub fn full_report(
    spec: &DomainSpec,
    problem: &ProblemSpec,
    h: f64,
    betas: &[f64],
    opts: &SolveOptions,
) -> Result<Verification, VerifyError> {
    let domain = Domain::new(spec.clone())?;
    let mesh = triangulate(&domain, h)?;
    let solution = newton_solve(&mesh, problem, opts)?;
    let (report, grads, pfields) = verify_solution(&domain, &mesh, &solution, problem, betas)?;
    Ok(Verification {
        report,
        mesh,
        solution,
        grads,
        pfields,
    })
}

/// Largest `|u(x, y) - u(-x, y)|` and `|u(x, y) - u(x, -y)|` over the
/// vertices. The mirror value is read from the mirror vertex when there is
/// one and interpolated otherwise; mirror points outside the mesh are skipped.
pub fn mirror_symmetry_defect(mesh: &Mesh, field: &ScalarField) -> f64 {
    let key = |p: Vec2| ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
    let index: HashMap<(u64, u64), usize> = mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &p)| (key(p), i))
        .collect();
    let mut worst: f64 = 0.0;
    for (i, &p) in mesh.vertices.iter().enumerate() {
        for mirror in [Vec2::new(-p.x, p.y), Vec2::new(p.x, -p.y)] {
            let value = match index.get(&key(mirror)) {
                Some(&j) => Some(field.values[j]),
                None => mesh.interpolate(&field.values, mirror),
            };
            if let Some(value) = value {
                worst = worst.max((field.values[i] - value).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formulas() {
        let b = check_bounds(1.0, -0.5, 2.0, 1.0, &ProblemSpec::PowerMc { alpha: 3.0 });
        assert!((b[0].rhs.unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let b = check_bounds(1.0, -0.5, 1.0, 1.0, &ProblemSpec::PowerMc { alpha: 5.0 });
        assert_eq!(b[1].rhs, Some(0.0));
        let b = check_bounds(
            1.0,
            -0.5,
            1.0,
            1.0,
            &ProblemSpec::ConstantForcing { mu: 1.0 },
        );
        assert!((b[3].rhs.unwrap() - 1.0).abs() < 1e-15);
        let expected = 2.0 * (2.0 * 2f64.sqrt() / (1.0 + 2f64.sqrt())).ln();
        assert!((b[4].rhs.unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.316694).abs() < 1e-6);
        let b = check_bounds(
            1.0,
            -0.5,
            1.0,
            PI / 3.0,
            &ProblemSpec::PowerMc { alpha: 2.0 },
        );
        assert!((b[2].rhs.unwrap() - 1.0).abs() < 1e-12);
        let b = check_bounds(
            1.0,
            -0.5,
            1.0,
            PI / 3.0,
            &ProblemSpec::ConstantForcing { mu: 0.3 },
        );
        assert!((b[5].rhs.unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn gating() {
        let b = check_bounds(0.5, -0.3, 1.0, 1.0, &ProblemSpec::PowerMc { alpha: 1.0 });
        assert!(b.iter().all(|c| !c.applicable && !c.holds));
        let b = check_bounds(
            0.5,
            -0.3,
            1.0,
            2.0,
            &ProblemSpec::ConstantForcing { mu: 1.0 },
        );
        assert!(!b[5].applicable && b[5].rhs.is_none());
        assert!(b[..3].iter().all(|c| !c.applicable && c.rhs.is_none()));
        assert!(b[3].applicable && b[4].applicable);
        let b = check_bounds(0.5, -0.3, 1.0, 1.0, &ProblemSpec::PowerMc { alpha: 0.5 });
        assert!(b[0].applicable && b[1].applicable && !b[2].applicable);
        assert!(b[3..].iter().all(|c| !c.applicable));
    }

    #[test]
    fn tolerance_is_relative_above_one() {
        let b = check_bounds(
            2.0 - 0.0015,
            -1.0,
            0.5,
            1.0,
            &ProblemSpec::ConstantForcing { mu: 1.0 },
        );
        // rhs = 2, tolerance = 2e-3
        assert!((b[3].tolerance - 2e-3).abs() < 1e-15);
        assert!(b[3].holds);
    }

    #[test]
    fn identity_defect_is_zero_on_radial_data() {
        use crate::radial::{solve_radial, DEFAULT_STEPS};
        for problem in [
            ProblemSpec::PowerMc { alpha: 1.0 },
            ProblemSpec::PowerMc { alpha: 3.0 },
            ProblemSpec::ConstantForcing { mu: 1.0 },
        ] {
            let r = solve_radial(&problem, 1.0, DEFAULT_STEPS).unwrap();
            assert!(identity_defect(&problem, 1.0, r.q(), r.q_prime()) <= 1e-8);
        }
    }
}
