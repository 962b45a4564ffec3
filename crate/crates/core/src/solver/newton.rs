//! Damped Newton iteration with optional parameter continuation.

use crate::error::{IterationRecord, SolveError};
use crate::linalg::{reverse_cuthill_mckee, BandLu};
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;

use super::assembly::Discretization;
use super::ScalarField;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Stop when `max |R_i|` falls to this value.
    pub residual_tol: f64,
    pub max_iters: usize,
    /// Maximum step halvings in the backtracking line search.
    pub max_halvings: usize,
    /// Number of linear ramp steps of alpha or mu starting from zero.
    pub continuation_steps: usize,
    /// Worker threads for assembly; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            residual_tol: 1e-10,
            max_iters: 50,
            max_halvings: 20,
            continuation_steps: 1,
            threads: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: ScalarField,
    /// One record per Newton iteration; iteration 0 is the initial residual.
    pub log: Vec<IterationRecord>,
    pub final_residual: f64,
}

impl Solution {
    /// Newton iterations used (excluding the initial-residual record of each
    /// continuation step).
    pub fn iterations(&self) -> usize {
        self.log.iter().filter(|r| r.damping > 0.0).count()
    }

    /// Solver log as JSON lines (`iter`, `residual`, `damping`).
    pub fn log_jsonl(&self) -> String {
        self.log
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain record serializes") + "\n")
            .collect()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves the Dirichlet problem on `mesh` starting from `u = 0`.
pub fn newton_solve(
    mesh: &Mesh,
    problem: &ProblemSpec,
    opts: &SolveOptions,
) -> Result<Solution, SolveError> {
    problem.validate()?;
    if !(opts.residual_tol > 0.0) {
        return Err(SolveError::InvalidProblem(format!(
            "residual_tol must be positive, got {}",
            opts.residual_tol
        )));
    }
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| SolveError::InvalidProblem(format!("thread pool: {e}")))?;
            pool.install(|| solve_inner(mesh, problem, opts))
        }
        None => solve_inner(mesh, problem, opts),
    }
}

fn solve_inner(
    mesh: &Mesh,
    problem: &ProblemSpec,
    opts: &SolveOptions,
) -> Result<Solution, SolveError> {
    let disc = Discretization::new(mesh);
    let order = reverse_cuthill_mckee(&disc.empty_matrix());
    let mut values = vec![0.0; mesh.n_vertices()];
    let mut log = Vec::new();
    let steps = opts.continuation_steps.max(1);
    let mut iter = 0usize;
    let mut residual_norm = f64::INFINITY;

    for step in 1..=steps {
        let stage = problem.ramped(step as f64 / steps as f64);
        let mut r = disc.residual(&values, &stage);
        residual_norm = max_abs(&r);
        log.push(IterationRecord {
            iter,
            residual: residual_norm,
            damping: 0.0,
        });
        let mut stage_iters = 0;
        while residual_norm > opts.residual_tol {
            if stage_iters >= opts.max_iters {
                return Err(SolveError::NonConvergence {
                    iterations: iter,
                    final_residual: residual_norm,
                    trace: log,
                });
            }
            let (_, jac) = disc.residual_and_jacobian(&values, &stage);
            // a breakdown of the linear solve ends the iteration like a failed line search
            let Ok(lu) = BandLu::factor(&jac, &order) else {
                return Err(SolveError::NonConvergence {
                    iterations: iter,
                    final_residual: residual_norm,
                    trace: log,
                });
            };
            let neg: Vec<f64> = r.iter().map(|x| -x).collect();
            let delta = lu.solve(&neg);

            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=opts.max_halvings {
                let mut trial = values.clone();
                for (k, &v) in disc.dofs.vertex_of.iter().enumerate() {
                    trial[v] += lambda * delta[k];
                }
                let rt = disc.residual(&trial, &stage);
                let nt = max_abs(&rt);
                if nt.is_finite() && nt < residual_norm {
                    accepted = Some((trial, rt, nt));
                    break;
                }
                lambda *= 0.5;
            }
            iter += 1;
            stage_iters += 1;
            let Some((trial, rt, nt)) = accepted else {
                log.push(IterationRecord {
                    iter,
                    residual: residual_norm,
                    damping: 0.0,
                });
                return Err(SolveError::NonConvergence {
                    iterations: iter,
                    final_residual: residual_norm,
                    trace: log,
                });
            };
            values = trial;
            r = rt;
            residual_norm = nt;
            log.push(IterationRecord {
                iter,
                residual: residual_norm,
                damping: lambda,
            });
        }
    }

    for v in mesh.interior_vertex_ids() {
        if values[v] >= 0.0 {
            return Err(SolveError::SignViolation {
                vertex: v,
                value: values[v],
            });
        }
    }
    Ok(Solution {
        field: ScalarField { values },
        log,
        final_residual: residual_norm,
    })
}
