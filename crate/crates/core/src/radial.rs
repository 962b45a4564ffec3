//! Radially symmetric solutions on disks.
//!
//! On a disk of radius `R` the slope `p = u_r` satisfies a first-order ODE
//! that needs no boundary data, so `p` is integrated outward from the center
//! and `u` is recovered by quadrature with `u(R) = 0`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::RadialError;
use crate::problem::ProblemSpec;

/// Default number of RK4 steps.
pub const DEFAULT_STEPS: usize = 10_000;
/// The series start covers `[0, R * SERIES_FRACTION]`.
pub const SERIES_FRACTION: f64 = 1e-4;
/// Slopes above this are treated as gradient blow-up.
pub const BLOWUP_SLOPE: f64 = 1e8;

/// `dp/dr` for the radial slope `p = u_r` at `r > 0`.
pub fn slope_ode_rhs(problem: &ProblemSpec, r: f64, p: f64) -> f64 {
    let s = 1.0 + p * p;
    match *problem {
        ProblemSpec::PowerMc { alpha } => s.powf((3.0 - alpha) / 2.0) - p * s / r,
        ProblemSpec::ConstantForcing { mu } => s + mu * s.powf(1.5) - p * s / r,
    }
}

/// `p'(0)`: half the Laplacian at the center.
pub fn series_start(problem: &ProblemSpec) -> f64 {
    0.5 * problem.center_laplacian()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub radius: f64,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub u: Vec<f64>,
    pub problem: ProblemSpec,
}

/// Golden values of a radial run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFixture {
    pub problem: ProblemSpec,
    pub radius: f64,
    pub steps: usize,
    pub q: f64,
    pub u_min: f64,
}

pub fn solve_radial(
    problem: &ProblemSpec,
    radius: f64,
    n: usize,
) -> Result<RadialSolution, RadialError> {
    problem
        .validate()
        .map_err(|e| RadialError::InvalidInput(e.to_string()))?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(RadialError::InvalidInput(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if n < 100 {
        return Err(RadialError::InvalidInput(format!(
            "need at least 100 steps, got {n}"
        )));
    }
    let f = |r: f64, p: f64| slope_ode_rhs(problem, r, p);
    let r0 = SERIES_FRACTION * radius;
    let slope0 = series_start(problem);
    let dr = (radius - r0) / n as f64;

    let mut r = Vec::with_capacity(n + 2);
    let mut p = Vec::with_capacity(n + 2);
    r.push(0.0);
    p.push(0.0);
    r.push(r0);
    p.push(slope0 * r0);
    for k in 0..n {
        let (ri, pi) = (r0 + k as f64 * dr, p[k + 1]);
        let k1 = f(ri, pi);
        let k2 = f(ri + 0.5 * dr, pi + 0.5 * dr * k1);
        let k3 = f(ri + 0.5 * dr, pi + 0.5 * dr * k2);
        let k4 = f(ri + dr, pi + dr * k3);
        let next = pi + dr / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let r_next = if k + 1 == n {
            radius
        } else {
            r0 + (k + 1) as f64 * dr
        };
        if !next.is_finite() || next.abs() > BLOWUP_SLOPE {
            return Err(RadialError::SlopeBlowup { r: r_next });
        }
        r.push(r_next);
        p.push(next);
    }

    // corrected trapezoid: h/2 (p_i + p_j) - h^2/12 (p'_j - p'_i), fourth order
    let dp: Vec<f64> = r
        .iter()
        .zip(&p)
        .map(|(&ri, &pi)| if ri > 0.0 { f(ri, pi) } else { slope0 })
        .collect();
    let mut u = vec![0.0; r.len()];
    for i in (0..r.len() - 1).rev() {
        let h = r[i + 1] - r[i];
        let seg = if i == 0 {
            0.5 * slope0 * h * h
        } else {
            0.5 * h * (p[i] + p[i + 1]) - h * h / 12.0 * (dp[i + 1] - dp[i])
        };
        u[i] = u[i + 1] - seg;
    }
    Ok(RadialSolution {
        radius,
        r,
        p,
        u,
        problem: *problem,
    })
}

impl RadialSolution {
    /// Boundary slope `p(R)`, equal to the outward normal derivative.
    pub fn q(&self) -> f64 {
        *self.p.last().expect("nonempty grid")
    }

    pub fn u_min(&self) -> f64 {
        self.u[0]
    }

    /// `u_rr` at the boundary, equal to the second normal derivative.
    pub fn q_prime(&self) -> f64 {
        slope_ode_rhs(&self.problem, self.radius, self.q())
    }

    fn locate(&self, r: f64) -> usize {
        let r = r.clamp(0.0, self.radius);
        match self.r.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => (i.max(1) - 1).min(self.r.len() - 2),
        }
    }

    /// `u` at radius `r` by cubic Hermite interpolation (clamped to `[0, R]`).
    pub fn u_at(&self, r: f64) -> f64 {
        let i = self.locate(r);
        let r = r.clamp(0.0, self.radius);
        let (a, b) = (self.r[i], self.r[i + 1]);
        let h = b - a;
        let t = (r - a) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
            t * (1.0 - t) * (1.0 - t),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        h00 * self.u[i] + h10 * h * self.p[i] + h01 * self.u[i + 1] + h11 * h * self.p[i + 1]
    }

    /// `u_r` at radius `r` by cubic Hermite interpolation.
    pub fn p_at(&self, r: f64) -> f64 {
        let i = self.locate(r);
        let r = r.clamp(0.0, self.radius);
        let (a, b) = (self.r[i], self.r[i + 1]);
        let h = b - a;
        let t = (r - a) / h;
        let slope = |k: usize| {
            if self.r[k] > 0.0 {
                slope_ode_rhs(&self.problem, self.r[k], self.p[k])
            } else {
                series_start(&self.problem)
            }
        };
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
            t * (1.0 - t) * (1.0 - t),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        h00 * self.p[i] + h10 * h * slope(i) + h01 * self.p[i + 1] + h11 * h * slope(i + 1)
    }

    pub fn fixture(&self) -> RadialFixture {
        RadialFixture {
            problem: self.problem,
            radius: self.radius,
            steps: self.r.len() - 2,
            q: self.q(),
            u_min: self.u_min(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,p,u\n");
        for ((r, p), u) in self.r.iter().zip(&self.p).zip(&self.u) {
            writeln!(out, "{r},{p},{u}").expect("writing to a String");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}
