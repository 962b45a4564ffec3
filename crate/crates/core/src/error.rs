use thiserror::Error;

/// Errors raised while constructing or querying a boundary curve.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("curve is not strictly convex: curvature {curvature:.3e} at t = {t:.6}")]
    NonConvex { t: f64, curvature: f64 },
    #[error("degenerate tangent at t = {t:.6}")]
    DegenerateTangent { t: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh size h = {h} must lie in (0, inradius = {inradius})")]
    InvalidMeshSize { h: f64, inradius: f64 },
    #[error("minimum triangle angle {min_angle_deg:.2} deg is below {threshold_deg} deg")]
    MeshQualityFailure {
        min_angle_deg: f64,
        threshold_deg: f64,
    },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One Newton iteration as recorded in the solver log.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual: f64,
    pub damping: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Newton iteration did not converge after {iterations} iterations (residual {final_residual:.3e})")]
    NonConvergence {
        iterations: usize,
        final_residual: f64,
        trace: Vec<IterationRecord>,
    },
    #[error("interior vertex {vertex} has non-negative value {value:.3e}")]
    SignViolation { vertex: usize, value: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("inward normal sample from boundary vertex {vertex} left the mesh")]
    InterpolationOutsideDomain { vertex: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("slope blew up near r = {r:.6}")]
    SlopeBlowup { r: f64 },
    #[error("invalid radial setup: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PFunctionError {
    #[error("Phi is undefined for alpha = 1")]
    AlphaOne,
    #[error("Psi requires mu >= 0, got {0}")]
    NegativeMu(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("no interior vertex has |grad u| below {tol:.3e}")]
    NoCriticalPoint { tol: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    PFunction(#[from] PFunctionError),
}
