//! Command-line front end: `mcflow solve|radial|verify --config <file>`.
//!
//! Exit codes: 0 success, 1 a verification check failed (or an I/O error),
//! 2 the nonlinear solve or radial integration did not converge, 3 invalid
//! configuration.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{RadialError, SolveError, VerifyError};
use crate::geometry::{Domain, DomainSpec};
use crate::mesh::{triangulate, Mesh};
use crate::pfunc::PKind;
use crate::problem::ProblemSpec;
use crate::radial::{solve_radial, DEFAULT_STEPS};
use crate::solver::{newton_solve, recover_gradient, GradientField, ScalarField, SolveOptions};
use crate::verify::{full_report, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Environment variable capping the assembly thread count.
pub const THREADS_ENV: &str = "MCFLOW_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialConfig {
    pub radius: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

fn default_betas() -> Vec<f64> {
    vec![1.0, 1.5, 2.0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// One run, read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub problem: ProblemSpec,
    pub h: f64,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Also write mesh, solution and P-function CSVs from `verify`.
    #[serde(default)]
    pub emit_fields: bool,
    /// Disk radius and step count for `radial`; defaults to the domain's
    /// radius when the domain is a disk.
    #[serde(default)]
    pub radial: Option<RadialConfig>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Applies command-line overrides.
    pub fn apply(&mut self, args: &RunArgs) -> Result<(), CliError> {
        if let Some(h) = args.h {
            self.h = h;
        }
        if let Some(alpha) = args.alpha {
            match &mut self.problem {
                ProblemSpec::PowerMc { alpha: a } => *a = alpha,
                _ => return Err(CliError::Config("--alpha needs a power_mc problem".into())),
            }
        }
        if let Some(mu) = args.mu {
            match &mut self.problem {
                ProblemSpec::ConstantForcing { mu: m } => *m = mu,
                _ => {
                    return Err(CliError::Config(
                        "--mu needs a constant_forcing problem".into(),
                    ))
                }
            }
        }
        if let Some(out) = &args.out {
            self.output_dir = out.clone();
        }
        Ok(())
    }

    /// Field-level checks; `explore` allows betas outside `[1, 2]`.
    pub fn validate(&self, explore: bool) -> Result<(), CliError> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(CliError::Config(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        self.problem
            .validate()
            .map_err(|e| CliError::Config(format!("problem: {e}")))?;
        if self.betas.is_empty() {
            return Err(CliError::Config("betas must not be empty".into()));
        }
        for &b in &self.betas {
            if !b.is_finite() {
                return Err(CliError::Config(format!("betas: {b} is not finite")));
            }
            if !explore && !(1.0..=2.0).contains(&b) {
                return Err(CliError::Config(format!(
                    "betas: {b} is outside [1, 2]; pass --explore to evaluate it without assertions"
                )));
            }
        }
        if let Some(r) = &self.radial {
            if !(r.radius.is_finite() && r.radius > 0.0) {
                return Err(CliError::Config(format!(
                    "radial.radius must be positive, got {}",
                    r.radius
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::NonConvergence(_) => EXIT_NONCONVERGENCE,
            CliError::Failed(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("I/O error: {e}"))
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match &e {
            SolveError::NonConvergence { trace, .. } => {
                let mut msg = format!("{e}\niteration trace:");
                for r in trace {
                    let _ = write!(
                        msg,
                        "\n  iter {:3}  residual {:.6e}  damping {}",
                        r.iter, r.residual, r.damping
                    );
                }
                CliError::NonConvergence(msg)
            }
            SolveError::InvalidProblem(_) => CliError::Config(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Solve(e) => e.into(),
            VerifyError::Geometry(e) => CliError::Config(format!("domain: {e}")),
            VerifyError::Mesh(e) => CliError::Config(format!("mesh: {e}")),
            other => CliError::Failed(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mcflow",
    version,
    about = "Mean-curvature Dirichlet problems on convex planar domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mesh the domain and solve; writes the solution, mesh and solver log.
    Solve(RunArgs),
    /// Integrate the radially symmetric solution on a disk.
    Radial(RunArgs),
    /// Solve and run every check; writes report.json.
    Verify(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Allow betas outside [1, 2] (evaluated but not asserted).
    #[arg(long)]
    pub explore: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => load(a).and_then(|(c, o)| cmd_solve(&c, &o)),
        Command::Radial(a) => load(a).and_then(|(c, _)| cmd_radial(&c)),
        Command::Verify(a) => load(a).and_then(|(c, o)| cmd_verify(&c, &o, a.explore)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mcflow: {e}");
            e.exit_code()
        }
    }
}

fn load(args: &RunArgs) -> Result<(RunConfig, SolveOptions), CliError> {
    let mut config = RunConfig::from_file(&args.config)?;
    config.apply(args)?;
    config.validate(args.explore)?;
    let threads = threads_from_env()?;
    Ok((
        config,
        SolveOptions {
            threads,
            ..SolveOptions::default()
        },
    ))
}

/// Reads [`THREADS_ENV`]; unset or empty means the default pool.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
        _ => Ok(None),
    }
}

fn mesh_for(config: &RunConfig) -> Result<(Domain, Mesh), CliError> {
    let domain =
        Domain::new(config.domain.clone()).map_err(|e| CliError::Config(format!("domain: {e}")))?;
    let mesh =
        triangulate(&domain, config.h).map_err(|e| CliError::Config(format!("mesh: {e}")))?;
    Ok((domain, mesh))
}

/// Writes `id,x,y,u,ux,uy`.
pub fn write_solution_csv(
    path: &Path,
    mesh: &Mesh,
    field: &ScalarField,
    grads: &GradientField,
) -> std::io::Result<()> {
    let mut out = String::from("id,x,y,u,ux,uy\n");
    for (i, p) in mesh.vertices.iter().enumerate() {
        let g = grads.at(i);
        let _ = writeln!(
            out,
            "{i},{:?},{:?},{:?},{:?},{:?}",
            p.x, p.y, field.values[i], g.x, g.y
        );
    }
    fs::write(path, out)
}

pub fn cmd_solve(config: &RunConfig, opts: &SolveOptions) -> Result<i32, CliError> {
    let (_, mesh) = mesh_for(config)?;
    let solution = newton_solve(&mesh, &config.problem, opts)?;
    let grads = recover_gradient(&mesh, &solution.field)?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    mesh.write_csv(dir)?;
    write_solution_csv(&dir.join("solution.csv"), &mesh, &solution.field, &grads)?;
    fs::write(dir.join("solver_log.jsonl"), solution.log_jsonl())?;
    println!(
        "{} on {:?}: {} vertices, {} Newton iterations, residual {:.3e}, u_min {:.6}, q_min {:.6}",
        config.problem.label(),
        config.domain,
        mesh.n_vertices(),
        solution.iterations(),
        solution.final_residual,
        solution.field.min(),
        grads.q_min()
    );
    Ok(EXIT_OK)
}

pub fn cmd_radial(config: &RunConfig) -> Result<i32, CliError> {
    let (radius, steps) = match (&config.radial, &config.domain) {
        (Some(r), _) => (r.radius, r.steps),
        (None, DomainSpec::Ellipse { a, b }) if a == b => (*a, DEFAULT_STEPS),
        (None, DomainSpec::Fourier { r0, harmonics })
            if harmonics.iter().all(|h| h.1 == 0.0 && h.2 == 0.0) =>
        {
            (*r0, DEFAULT_STEPS)
        }
        _ => {
            return Err(CliError::Config(
                "radial: the domain is not a disk; set radial.radius in the config".into(),
            ))
        }
    };
    let sol = solve_radial(&config.problem, radius, steps).map_err(|e| match e {
        RadialError::SlopeBlowup { .. } => CliError::NonConvergence(e.to_string()),
        RadialError::InvalidInput(_) => CliError::Config(e.to_string()),
    })?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    sol.write_csv(&dir.join("radial.csv"))?;
    let fixture = sol.fixture();
    let json = serde_json::to_string_pretty(&fixture).expect("fixture serializes");
    fs::write(dir.join("radial_fixture.json"), json + "\n")?;
    println!(
        "radial {} on R = {radius}: q = {:.10}, u_min = {:.10}",
        config.problem.label(),
        fixture.q,
        fixture.u_min
    );
    Ok(EXIT_OK)
}

pub fn cmd_verify(config: &RunConfig, opts: &SolveOptions, explore: bool) -> Result<i32, CliError> {
    config.validate(explore)?;
    let v = full_report(
        &config.domain,
        &config.problem,
        config.h,
        &config.betas,
        opts,
    )?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report_json(&v.report) + "\n")?;
    if config.emit_fields {
        v.mesh.write_csv(dir)?;
        write_solution_csv(
            &dir.join("solution.csv"),
            &v.mesh,
            &v.solution.field,
            &v.grads,
        )?;
        fs::write(dir.join("solver_log.jsonl"), v.solution.log_jsonl())?;
        for f in &v.pfields {
            let kind = match f.kind {
                PKind::Phi => "phi",
                PKind::Psi => "psi",
            };
            f.write_csv(&v.mesh, &dir.join(format!("{kind}_beta{}.csv", f.beta)))?;
        }
    }
    print!("{}", report_table(&v.report));
    Ok(if v.report.all_hold() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

pub fn report_json(report: &VerificationReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

/// Human-readable summary of a report.
pub fn report_table(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} on {:?}, h = {}, {} vertices",
        r.problem.label(),
        r.domain,
        r.h,
        r.n_vertices
    );
    let _ = writeln!(
        s,
        "newton iterations {}, residual {:.3e}; q_min {:.6}, u_min {:.6}, kappa_max {:.6}, inradius {:.6}",
        r.newton_iterations, r.final_residual, r.q_min, r.u_min, r.kappa_max, r.inradius
    );
    let zeros: Vec<String> = r
        .critical
        .z_theta_zero_counts
        .iter()
        .map(|z| z.count.to_string())
        .collect();
    let _ = writeln!(
        s,
        "critical points {} (tol {:.3e}); z(theta) boundary sign changes [{}]",
        r.critical.count,
        r.critical.tol,
        zeros.join(", ")
    );
    for p in &r.pfunc {
        let _ = writeln!(
            s,
            "{:?}(beta={}): min {:.6} on boundary {}{}, max {:.6} at distance {:.3e} from the critical point",
            p.kind,
            p.beta,
            p.min,
            p.min_on_boundary,
            if p.asserted { "" } else { " (not asserted)" },
            p.max,
            p.argmax_to_critical
        );
    }
    if let Some(why) = &r.pfunc_skipped {
        let _ = writeln!(s, "P-function skipped: {why}");
    }
    let _ = writeln!(
        s,
        "boundary identity residual {:.4e}",
        r.boundary_identity_residual
    );
    let _ = writeln!(
        s,
        "{:<22} {:>10} {:>12} {:>12} {:>12} {:>6}",
        "bound", "applicable", "lhs", "rhs", "slack", "holds"
    );
    for b in &r.bounds {
        let _ = writeln!(
            s,
            "{:<22} {:>10} {:>12.6} {:>12} {:>12} {:>6}",
            serde_json::to_value(b.name)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            b.applicable,
            b.lhs,
            opt(b.rhs),
            opt(b.slack),
            if b.applicable {
                b.holds.to_string()
            } else {
                "-".into()
            }
        );
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    let failures = r.failures();
    if failures.is_empty() {
        let _ = writeln!(s, "all applicable checks pass");
    } else {
        for f in failures {
            let _ = writeln!(s, "FAILED: {f}");
        }
    }
    s
}
