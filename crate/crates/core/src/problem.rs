use serde::{Deserialize, Serialize};

use crate::error::SolveError;

/// Which mean-curvature Dirichlet problem is solved.
///
/// Both have the form `div(grad u / W) = g(W)` with `W = sqrt(1 + |grad u|^2)`
/// and `u = 0` on the boundary:
///
/// * `PowerMc { alpha }`: `g(W) = W^-alpha` (alpha = 1 is the translating soliton),
/// * `ConstantForcing { mu }`: `g(W) = 1/W + mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    PowerMc { alpha: f64 },
    ConstantForcing { mu: f64 },
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), SolveError> {
        match *self {
            ProblemSpec::PowerMc { alpha } if !(alpha.is_finite() && alpha > 0.0) => Err(
                SolveError::InvalidProblem(format!("alpha must be positive, got {alpha}")),
            ),
            ProblemSpec::ConstantForcing { mu } if !(mu.is_finite() && mu > 0.0) => Err(
                SolveError::InvalidProblem(format!("mu must be positive, got {mu}")),
            ),
            _ => Ok(()),
        }
    }

    /// Right-hand side as a function of the slope factor `W`.
    #[inline]
    pub fn forcing(&self, w: f64) -> f64 {
        match *self {
            ProblemSpec::PowerMc { alpha } => w.powf(-alpha),
            ProblemSpec::ConstantForcing { mu } => 1.0 / w + mu,
        }
    }

    /// Derivative of [`ProblemSpec::forcing`] with respect to `W`.
    #[inline]
    pub fn forcing_derivative(&self, w: f64) -> f64 {
        match *self {
            ProblemSpec::PowerMc { alpha } => -alpha * w.powf(-alpha - 1.0),
            ProblemSpec::ConstantForcing { .. } => -1.0 / (w * w),
        }
    }

    /// Laplacian of the solution at an interior critical point.
    pub fn center_laplacian(&self) -> f64 {
        match *self {
            ProblemSpec::PowerMc { .. } => 1.0,
            ProblemSpec::ConstantForcing { mu } => 1.0 + mu,
        }
    }

    /// Same problem with its parameter multiplied by `fraction`.
    pub fn ramped(&self, fraction: f64) -> Self {
        match *self {
            ProblemSpec::PowerMc { alpha } => ProblemSpec::PowerMc {
                alpha: alpha * fraction,
            },
            ProblemSpec::ConstantForcing { mu } => {
                ProblemSpec::ConstantForcing { mu: mu * fraction }
            }
        }
    }

    pub fn is_alpha_one(&self) -> bool {
        matches!(*self, ProblemSpec::PowerMc { alpha } if alpha == 1.0)
    }

    pub fn label(&self) -> String {
        match *self {
            ProblemSpec::PowerMc { alpha } => format!("power_mc(alpha={alpha})"),
            ProblemSpec::ConstantForcing { mu } => format!("constant_forcing(mu={mu})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forcing_and_derivative() {
        let p = ProblemSpec::PowerMc { alpha: 3.0 };
        assert_eq!(p.forcing(1.0), 1.0);
        let w = 1.7;
        let fd = (p.forcing(w + 1e-6) - p.forcing(w - 1e-6)) / 2e-6;
        assert!((fd - p.forcing_derivative(w)).abs() < 1e-8);
        let c = ProblemSpec::ConstantForcing { mu: 1.0 };
        assert_eq!(c.forcing(1.0), 2.0);
        let fd = (c.forcing(w + 1e-6) - c.forcing(w - 1e-6)) / 2e-6;
        assert!((fd - c.forcing_derivative(w)).abs() < 1e-8);
    }

    #[test]
    fn validation_and_json() {
        assert!(ProblemSpec::PowerMc { alpha: 0.0 }.validate().is_err());
        assert!(ProblemSpec::ConstantForcing { mu: -1.0 }
            .validate()
            .is_err());
        assert!(ProblemSpec::PowerMc { alpha: 1.0 }.validate().is_ok());
        let p: ProblemSpec =
            serde_json::from_str(r#"{"kind":"constant_forcing","mu":0.5}"#).unwrap();
        assert_eq!(p, ProblemSpec::ConstantForcing { mu: 0.5 });
    }
}
