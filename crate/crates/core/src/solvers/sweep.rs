use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{solve_from, SolveReport, SolverParams};
use crate::error::{invalid, Result};
use crate::model::{ProblemSpec, Regime};
use crate::radialfem::RadialMesh;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub energy: Option<f64>,
    pub dp_norm: Option<f64>,
    pub min_value: Option<f64>,
    pub barrier_ok: bool,
    pub positive: bool,
    pub converged: bool,
    pub iterations: usize,
    pub warm_started: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub regime: Regime,
    pub rows: Vec<SweepRow>,
    /// Largest grid value before the first positivity failure.
    pub a_star_estimate: f64,
    pub first_failure: Option<f64>,
}

impl SweepReport {
    pub fn all_positive(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Solves along an increasing `a` grid starting at `0`, each solve warm-started
/// from the previous converged profile.
pub fn sweep_a(
    spec: &ProblemSpec,
    mesh: &Arc<RadialMesh>,
    params: &SolverParams,
    a_grid: &[f64],
) -> Result<SweepReport> {
    if a_grid.first() != Some(&0.0) {
        return Err(invalid("a grid must start at 0"));
    }
    if a_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("a grid must be strictly increasing"));
    }
    let mut rows = Vec::with_capacity(a_grid.len());
    let mut warm: Option<Vec<f64>> = None;
    for &a in a_grid {
        let instance = spec.with_a(a);
        let outcome = solve_from(&instance, mesh, params, warm.as_deref());
        let row = match &outcome {
            Ok(report) => row_from(a, report, warm.is_some()),
            Err(e) => SweepRow {
                a,
                energy: None,
                dp_norm: None,
                min_value: None,
                barrier_ok: false,
                positive: false,
                converged: false,
                iterations: 0,
                warm_started: warm.is_some(),
                error: Some(e.to_string()),
            },
        };
        log::info!("sweep a = {a:e}: positive = {}, iterations = {}", row.positive, row.iterations);
        if let Ok(report) = outcome {
            if report.converged() {
                warm = Some(report.u.into_values());
            }
        }
        rows.push(row);
    }
    let first = rows.iter().position(|r| !r.positive);
    let a_star_estimate = match first {
        Some(0) => 0.0,
        Some(k) => rows[k - 1].a,
        None => rows.last().map_or(0.0, |r| r.a),
    };
    Ok(SweepReport { regime: spec.regime, first_failure: first.map(|k| rows[k].a), rows, a_star_estimate })
}

fn row_from(a: f64, report: &SolveReport, warm_started: bool) -> SweepRow {
    SweepRow {
        a,
        energy: Some(report.energy),
        dp_norm: Some(report.dp_norm),
        min_value: Some(report.min_value()),
        barrier_ok: report.certificates.barrier_ok,
        positive: report.positive(),
        converged: report.converged(),
        iterations: report.iterations,
        warm_started,
        error: None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub a: f64,
    /// `max |u_a - u_0|` over nodes in `B_γ`, `γ = r_core`.
    pub sup_distance: f64,
    pub dp_norm_difference: f64,
    pub energy: f64,
    pub converged: bool,
}

/// Independent solves for a decreasing sequence ending at `0`, compared with
/// the `a = 0` solution on the core ball.
pub fn convergence_study(
    spec: &ProblemSpec,
    mesh: &Arc<RadialMesh>,
    params: &SolverParams,
    a_seq: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    if a_seq.last() != Some(&0.0) {
        return Err(invalid("a sequence must end at 0"));
    }
    if a_seq.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("a sequence must be strictly decreasing"));
    }
    let reports: Vec<SolveReport> =
        a_seq.par_iter().map(|&a| super::solve(&spec.with_a(a), mesh, params)).collect::<Result<_>>()?;
    let reference = reports.last().expect("non-empty sequence");
    let gamma = mesh.core_radius();
    let core: Vec<usize> = mesh.nodes().iter().take_while(|&&r| r <= gamma).enumerate().map(|(i, _)| i).collect();
    Ok(reports
        .iter()
        .map(|r| {
            let (u, u0) = (r.u.values(), reference.u.values());
            ConvergenceRow {
                a: r.a,
                sup_distance: core.iter().map(|&i| (u[i] - u0[i]).abs()).fold(0.0, f64::max),
                dp_norm_difference: (r.dp_norm - reference.dp_norm).abs(),
                energy: r.energy,
                converged: r.converged(),
            }
        })
        .collect())
}
