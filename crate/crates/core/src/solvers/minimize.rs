use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::descent::{axpy, evaluate, line_search, Stepper};
use super::geometry::{geometry_probe_with, probe_direction, random_direction};
use super::report::{assemble, SolveReport, SolveStatus};
use super::SolverParams;
use crate::error::{invalid, Error, Result};
use crate::model::{ProblemSpec, Regime};
use crate::radialfem::{Discretization, RadialMesh};

pub fn minimize(spec: &ProblemSpec, mesh: &Arc<RadialMesh>, params: &SolverParams) -> Result<SolveReport> {
    minimize_from(spec, mesh, params, None)
}

/// Sobolev-gradient descent from the probe point `t₀φ` (perturbed by a
/// seeded random profile when `seed != 0`) or from `warm`.
pub fn minimize_from(
    spec: &ProblemSpec,
    mesh: &Arc<RadialMesh>,
    params: &SolverParams,
    warm: Option<&[f64]>,
) -> Result<SolveReport> {
    params.validate()?;
    spec.validate()?;
    if spec.regime != Regime::Sublinear {
        return Err(invalid("direct minimization needs the sublinear regime"));
    }
    let disc = Discretization::new(mesh.clone(), spec)?;
    let probe = geometry_probe_with(spec, mesh, params.probe_samples, params.seed, params.t1);
    // a warm start does not need a negative-energy point on the probe ray
    let geometry = if warm.is_some() { probe.ok() } else { Some(probe?) };
    let start = match warm {
        Some(w) if w.len() != disc.len() => {
            return Err(Error::ShapeMismatch(format!("warm start has {} values, mesh {}", w.len(), disc.len())));
        }
        Some(w) => w.to_vec(),
        None => {
            let t0 = geometry.as_ref().and_then(|g| g.t0).expect("sublinear probe reports t0");
            let phi = probe_direction(mesh);
            if params.seed == 0 {
                phi.scaled(t0).into_values()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                let bump = random_direction(mesh, &mut rng);
                phi.values().iter().zip(bump.values()).map(|(a, b)| t0 * (a + 0.5 * b.abs())).collect()
            }
        }
    };

    let mut it = evaluate(&disc, params, start);
    let mut stepper = Stepper::new(params.step_rule);
    let mut iterations = 0;
    let status = loop {
        if it.violation <= params.tol_residual {
            break SolveStatus::Converged;
        }
        if iterations >= params.max_iters {
            break SolveStatus::MaxIterations;
        }
        let s0 = stepper.initial(&disc, &it);
        let trial = |s: f64| Some(evaluate(&disc, params, axpy(&it.x, s, &it.dir)));
        let found = line_search(&it, s0, trial).or_else(|| {
            if s0 != 1.0 {
                line_search(&it, 1.0, |s| Some(evaluate(&disc, params, axpy(&it.x, s, &it.dir))))
            } else {
                None
            }
        });
        match found {
            Some((next, _)) => {
                it = next;
                iterations += 1;
            }
            None => break SolveStatus::Stalled,
        }
    };
    log::debug!("minimize a = {}: {status:?} after {iterations} iterations", spec.a);
    assemble(&disc, params, it.x, status, iterations, geometry, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radialfem::MeshParams;

    #[test]
    fn rejects_superlinear() {
        let mesh = Arc::new(RadialMesh::build(&MeshParams::reference(), 3, 2.0).unwrap());
        let spec = ProblemSpec::reference_superlinear(0.0);
        assert!(minimize(&spec, &mesh, &SolverParams::default()).is_err());
    }
}
