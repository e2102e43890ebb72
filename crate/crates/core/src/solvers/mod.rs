//! Discrete critical points of `I_a`: geometry probes, the mountain-pass path
//! descent, direct minimization, sweeps in `a` and the `a → 0` study.

mod descent;
mod geometry;
mod minimize;
mod mountain_pass;
mod report;
mod sweep;

pub use geometry::{geometry_probe, geometry_probe_with, probe_direction, GeometryReport};
pub use minimize::{minimize, minimize_from};
pub use mountain_pass::{mountain_pass_solve, mountain_pass_solve_from, ray_maximizer};
pub use report::{certify, decay_fit, Certificates, HopfOutcome, SolveReport, SolveStatus};
pub use sweep::{convergence_study, sweep_a, ConvergenceRow, SweepReport, SweepRow};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{ProblemSpec, Regime};
use crate::radialfem::RadialMesh;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Armijo backtracking from a unit step.
    FixedArmijo,
    /// Barzilai-Borwein step in the Sobolev metric, Armijo-safeguarded.
    #[default]
    BarzilaiBorwein,
}

/// Radii and tolerances used by the solution certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificateParams {
    /// Radius `r` of the ball on which the barrier level `A` is measured.
    pub barrier_r: f64,
    /// Radius `R` at which the barrier is shifted to zero.
    pub compare_radius: f64,
    pub decay_window: (f64, f64),
    /// Allowed deviation of the fitted tail slope from `(p-N)/(p-1)`.
    pub slope_tol: f64,
    /// Relative tolerance of the Hopf tail bound.
    pub tail_tol: f64,
    /// Lower limit for sub/supersolution slacks.
    pub subsup_tol: f64,
}

impl Default for CertificateParams {
    fn default() -> Self {
        Self {
            barrier_r: 1.0,
            compare_radius: 30.0,
            decay_window: (10.0, 40.0),
            slope_tol: 0.15,
            tail_tol: 0.05,
            subsup_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Number of path segments `K` for the mountain pass.
    #[serde(rename = "K")]
    pub path_points: usize,
    pub step_rule: StepRule,
    /// Initial endpoint scale; doubled until `I_a(t₁ φ) < 0`.
    pub t1: f64,
    /// Mollification width relative to the sup norm of the iterate.
    pub eps_moll: f64,
    pub seed: u64,
    /// Random directions used by the geometry probe.
    pub probe_samples: usize,
    pub certificates: CertificateParams,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tol_residual: 1e-9,
            max_iters: 2000,
            path_points: 16,
            step_rule: StepRule::default(),
            t1: 1.0,
            eps_moll: 1e-6,
            seed: 0,
            probe_samples: 64,
            certificates: CertificateParams::default(),
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(invalid(format!("tol_residual must be > 0, got {}", self.tol_residual)));
        }
        if self.path_points < 8 {
            return Err(invalid(format!("K must be >= 8, got {}", self.path_points)));
        }
        if !(self.t1 > 0.0 && self.t1.is_finite()) {
            return Err(invalid(format!("t1 must be > 0, got {}", self.t1)));
        }
        if !(self.eps_moll > 0.0) {
            return Err(invalid(format!("eps_moll must be > 0, got {}", self.eps_moll)));
        }
        let c = &self.certificates;
        if !(c.barrier_r > 0.0 && c.compare_radius > c.barrier_r) {
            return Err(invalid("certificate radii need 0 < barrier_r < compare_radius"));
        }
        if !(c.decay_window.0 > 0.0 && c.decay_window.1 > c.decay_window.0) {
            return Err(invalid("decay window must satisfy 0 < lo < hi"));
        }
        Ok(())
    }

    /// Absolute mollification width for an iterate of sup norm `scale`.
    pub(crate) fn eps_for(&self, scale: f64) -> f64 {
        self.eps_moll * if scale > 0.0 { scale } else { 1.0 }
    }
}

/// Dispatches on the regime: mountain pass for superlinear, minimization for sublinear.
pub fn solve(spec: &ProblemSpec, mesh: &Arc<RadialMesh>, params: &SolverParams) -> Result<SolveReport> {
    match spec.regime {
        Regime::Superlinear => mountain_pass_solve(spec, mesh, params),
        Regime::Sublinear => minimize(spec, mesh, params),
    }
}

/// As [`solve`], starting from nodal values `warm` when given.
pub fn solve_from(
    spec: &ProblemSpec,
    mesh: &Arc<RadialMesh>,
    params: &SolverParams,
    warm: Option<&[f64]>,
) -> Result<SolveReport> {
    match spec.regime {
        Regime::Superlinear => mountain_pass_solve_from(spec, mesh, params, warm),
        Regime::Sublinear => minimize_from(spec, mesh, params, warm),
    }
}
