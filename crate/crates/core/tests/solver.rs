mod common;

use common::{fitted_order, mesh, nodal_error};
use mcflow::error::SolveError;
use mcflow::geometry::DomainSpec;
use mcflow::problem::ProblemSpec;
use mcflow::radial::{solve_radial, DEFAULT_STEPS};
use mcflow::solver::{
    jacobian, newton_solve, recover_gradient, residual, ScalarField, SolveOptions,
};
use mcflow::verify::mirror_symmetry_defect;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn jacobian_matches_central_differences() {
    let m = mesh(DomainSpec::unit_disk(), 0.13);
    assert!(
        (150..=300).contains(&m.n_vertices()),
        "{} vertices",
        m.n_vertices()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for problem in [
        ProblemSpec::PowerMc { alpha: 1.0 },
        ProblemSpec::PowerMc { alpha: 2.5 },
        ProblemSpec::ConstantForcing { mu: 0.7 },
    ] {
        for _ in 0..3 {
            let (a, b, c, k) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.2..1.5),
                rng.gen_range(1.0..4.0),
            );
            let field = ScalarField::dirichlet_from_fn(&m, |p| {
                c * (p.norm_squared() - 1.0) * (1.0 + a * p.x + b * (k * p.y).sin())
            });
            let jac = jacobian(&m, &field, &problem);
            let interior: Vec<usize> = m.interior_vertex_ids().collect();
            let eps = 1e-6;
            let mut worst: f64 = 0.0;
            for (j, &v) in interior.iter().enumerate() {
                let mut plus = field.clone();
                plus.values[v] += eps;
                let mut minus = field.clone();
                minus.values[v] -= eps;
                let (rp, rm) = (
                    residual(&m, &plus, &problem),
                    residual(&m, &minus, &problem),
                );
                for i in 0..interior.len() {
                    let fd = (rp[i] - rm[i]) / (2.0 * eps);
                    worst = worst.max((fd - jac.get(i, j)).abs());
                }
            }
            assert!(worst <= 1e-6, "{problem:?}: max entry error {worst:e}");
        }
    }
}

#[test]
fn disk_solutions_match_the_radial_profile() {
    let m = mesh(DomainSpec::unit_disk(), 0.05);
    for problem in [
        ProblemSpec::PowerMc { alpha: 1.0 },
        ProblemSpec::ConstantForcing { mu: 1.0 },
    ] {
        let sol = newton_solve(&m, &problem, &SolveOptions::default()).unwrap();
        assert!(sol.final_residual <= 1e-10);
        let radial = solve_radial(&problem, 1.0, DEFAULT_STEPS).unwrap();
        let err = nodal_error(&m, &sol.field, &radial);
        assert!(err <= 5e-3, "{problem:?}: nodal error {err:e}");
        let q = recover_gradient(&m, &sol.field).unwrap().q_min();
        assert!(
            (q - radial.q()).abs() <= 0.02 * radial.q(),
            "{problem:?}: q {q} vs {}",
            radial.q()
        );
    }
}

#[test]
fn nodal_error_converges_at_least_at_order_one_and_a_half() {
    let hs = [0.2, 0.1, 0.05];
    for problem in [
        ProblemSpec::PowerMc { alpha: 1.0 },
        ProblemSpec::ConstantForcing { mu: 1.0 },
    ] {
        let radial = solve_radial(&problem, 1.0, DEFAULT_STEPS).unwrap();
        let errors: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let m = mesh(DomainSpec::unit_disk(), h);
                let sol = newton_solve(&m, &problem, &SolveOptions::default()).unwrap();
                nodal_error(&m, &sol.field, &radial)
            })
            .collect();
        let order = fitted_order(&hs, &errors);
        assert!(
            order >= 1.5,
            "{problem:?}: errors {errors:?}, order {order}"
        );
    }
}

#[test]
fn newton_converges_superlinearly() {
    let m = mesh(DomainSpec::Ellipse { a: 2.0, b: 1.0 }, 0.05);
    let sol = newton_solve(
        &m,
        &ProblemSpec::PowerMc { alpha: 3.0 },
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(sol.iterations() <= 25);
    assert!(sol.final_residual <= 1e-10);
    let r: Vec<f64> = sol.log.iter().map(|x| x.residual).collect();
    let n = r.len();
    assert!(n >= 4);
    // order estimate from the last three steps, ignoring those at the rounding floor
    let k = n - 3;
    let order = (r[k + 2] / r[k + 1]).ln() / (r[k + 1] / r[k]).ln();
    assert!(order >= 1.5, "residuals {r:?}");
}

#[test]
fn solutions_are_negative_and_mirror_symmetric() {
    for spec in [
        DomainSpec::Ellipse { a: 2.0, b: 1.0 },
        DomainSpec::Ellipse { a: 1.5, b: 1.2 },
    ] {
        let m = mesh(spec, 0.1);
        for problem in [
            ProblemSpec::PowerMc { alpha: 2.0 },
            ProblemSpec::ConstantForcing { mu: 0.5 },
        ] {
            let sol = newton_solve(&m, &problem, &SolveOptions::default()).unwrap();
            assert!(m.interior_vertex_ids().all(|v| sol.field.values[v] < 0.0));
            assert!(m
                .boundary_vertex_ids
                .iter()
                .all(|&v| sol.field.values[v] == 0.0));
            assert!(mirror_symmetry_defect(&m, &sol.field) <= 1e-8);
        }
    }
}

#[test]
fn results_are_deterministic_across_thread_counts() {
    let m = mesh(DomainSpec::Ellipse { a: 2.0, b: 1.0 }, 0.07);
    let problem = ProblemSpec::ConstantForcing { mu: 0.5 };
    let run = |threads| {
        newton_solve(
            &m,
            &problem,
            &SolveOptions {
                threads: Some(threads),
                ..SolveOptions::default()
            },
        )
        .unwrap()
        .field
        .values
    };
    let one = run(1);
    assert_eq!(one, run(1));
    for threads in [2, 4] {
        let many = run(threads);
        let diff = one
            .iter()
            .zip(&many)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-13, "{threads} threads differ by {diff:e}");
    }
}

#[test]
fn continuation_reaches_the_same_solution() {
    let m = mesh(DomainSpec::unit_disk(), 0.1);
    let problem = ProblemSpec::ConstantForcing { mu: 1.0 };
    let direct = newton_solve(&m, &problem, &SolveOptions::default()).unwrap();
    let ramped = newton_solve(
        &m,
        &problem,
        &SolveOptions {
            continuation_steps: 4,
            ..SolveOptions::default()
        },
    )
    .unwrap();
    let diff = direct
        .field
        .values
        .iter()
        .zip(&ramped.field.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-9);
    assert!(ramped.log.len() > direct.log.len());
}

#[test]
fn hopeless_problem_reports_nonconvergence_with_a_trace() {
    let m = mesh(DomainSpec::Ellipse { a: 3.0, b: 3.0 }, 0.3);
    let err = newton_solve(
        &m,
        &ProblemSpec::ConstantForcing { mu: 50.0 },
        &SolveOptions::default(),
    )
    .unwrap_err();
    match err {
        SolveError::NonConvergence {
            trace,
            final_residual,
            ..
        } => {
            assert!(!trace.is_empty());
            assert!(final_residual > 1e-10);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let m = mesh(DomainSpec::unit_disk(), 0.2);
    assert!(matches!(
        newton_solve(
            &m,
            &ProblemSpec::PowerMc { alpha: -1.0 },
            &SolveOptions::default()
        ),
        Err(SolveError::InvalidProblem(_))
    ));
    assert!(matches!(
        newton_solve(
            &m,
            &ProblemSpec::PowerMc { alpha: 1.0 },
            &SolveOptions {
                residual_tol: 0.0,
                ..SolveOptions::default()
            }
        ),
        Err(SolveError::InvalidProblem(_))
    ));
}

#[test]
fn radial_slopes_are_positive_on_the_boundary() {
    let m = mesh(DomainSpec::unit_disk(), 0.1);
    let sol = newton_solve(
        &m,
        &ProblemSpec::PowerMc { alpha: 1.0 },
        &SolveOptions::default(),
    )
    .unwrap();
    let g = recover_gradient(&m, &sol.field).unwrap();
    assert!(g.boundary.iter().flatten().all(|j| j.u_n > 0.0));
}
