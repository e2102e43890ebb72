use std::sync::Arc;

use super::descent::{axpy, dot, evaluate, line_search, Iterate, Stepper};
use super::geometry::{geometry_probe_with, probe_direction};
use super::report::{assemble, SolveReport, SolveStatus};
use super::SolverParams;
use crate::error::{invalid, Error, Result};
use crate::model::{ProblemSpec, Regime};
use crate::radialfem::{Discretization, RadialMesh};

/// Path iterations spent per path node before switching to ray-maximized descent.
const PATH_SWEEPS: usize = 4;

/// Maximizer `t* > 0` of `t ↦ I_a(t w)`, from the sign change of
/// `‖w‖^p - ∫ h f_a(t w) w / t^{p-1}`. `None` if the energy grows without
/// bound along the ray or `w` has no positive part.
pub fn ray_maximizer(disc: &Discretization, w: &[f64]) -> Option<f64> {
    let p = disc.spec().p;
    let kin = disc.kinetic(w);
    if !(kin > 0.0) {
        return None;
    }
    let f_a = disc.nonlinearity();
    let points = disc.points();
    let psi = |t: f64| {
        let load: f64 = points
            .iter()
            .map(|q| {
                let x = q.value(w);
                q.wh * f_a.value(t * x) * x
            })
            .sum();
        kin - load / t.powf(p - 1.0)
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    if psi(1.0) > 0.0 {
        while psi(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e150 {
                return None;
            }
        }
        lo = 0.5 * hi;
    } else {
        while psi(lo) <= 0.0 {
            lo *= 0.5;
            if lo < 1e-150 {
                return None;
            }
        }
        hi = 2.0 * lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn scaled(w: &[f64], t: f64) -> Vec<f64> {
    w.iter().map(|x| t * x).collect()
}

pub fn mountain_pass_solve(spec: &ProblemSpec, mesh: &Arc<RadialMesh>, params: &SolverParams) -> Result<SolveReport> {
    mountain_pass_solve_from(spec, mesh, params, None)
}

/// Path descent from `0` to `t₁φ`, then descent of `w ↦ max_t I_a(t w)`.
/// With `warm` the path stage is skipped and the ray descent starts there.
pub fn mountain_pass_solve_from(
    spec: &ProblemSpec,
    mesh: &Arc<RadialMesh>,
    params: &SolverParams,
    warm: Option<&[f64]>,
) -> Result<SolveReport> {
    params.validate()?;
    spec.validate()?;
    if spec.regime != Regime::Superlinear {
        return Err(invalid("mountain pass needs the superlinear regime"));
    }
    let disc = Discretization::new(mesh.clone(), spec)?;
    let geometry = geometry_probe_with(spec, mesh, params.probe_samples, params.seed, params.t1)?;
    let t1 = geometry.t1.expect("superlinear probe reports t1");
    let v = probe_direction(mesh).scaled(t1).into_values();
    let k = params.path_points;
    let mut path: Vec<Vec<f64>> = (0..=k).map(|j| scaled(&v, j as f64 / k as f64)).collect();
    let mut energies: Vec<f64> = path.iter().map(|w| disc.energy(w)).collect();
    let upper = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut iterations = 0;
    let finish = |x: Vec<f64>, status, iterations| {
        assemble(&disc, params, x, status, iterations, Some(geometry.clone()), Some(upper))
    };

    let start = match warm {
        Some(w) => {
            if w.len() != disc.len() {
                return Err(Error::ShapeMismatch(format!("warm start has {} values, mesh {}", w.len(), disc.len())));
            }
            w.to_vec()
        }
        None => {
            let floor = geometry.alpha_bound.unwrap_or(0.0);
            loop {
                let kstar = argmax(&energies);
                if kstar == 0 || kstar == k {
                    return Err(Error::PathCollapse(kstar));
                }
                if energies[kstar] < floor {
                    // every path crossing the sphere of radius ρ rises at least this high
                    return Err(Error::PathCollapse(kstar));
                }
                let mut it = evaluate(&disc, params, path[kstar].clone());
                if it.violation <= params.tol_residual {
                    return finish(it.x, SolveStatus::Converged, iterations);
                }
                if iterations >= PATH_SWEEPS * k || iterations >= params.max_iters {
                    break it.x;
                }
                // slide across the path only: drop the K-component along the tangent
                let tangent: Vec<f64> = path[kstar + 1].iter().zip(&path[kstar - 1]).map(|(a, b)| a - b).collect();
                let kt = disc.metric(&it.x).apply(&tangent);
                let c = dot(&it.dir, &kt) / dot(&tangent, &kt);
                it.dir = axpy(&it.dir, c, &tangent);
                it.slope = dot(&it.grad, &it.dir);
                let Some((next, _)) = line_search(&it, 1.0, |s| Some(evaluate(&disc, params, axpy(&it.x, s, &it.dir))))
                else {
                    break it.x;
                };
                energies[kstar] = next.energy;
                path[kstar] = next.x;
                iterations += 1;
            }
        }
    };

    let t = ray_maximizer(&disc, &start)
        .ok_or_else(|| Error::Geometry("path maximizer has no energy maximum along its ray".into()))?;
    let mut it = evaluate(&disc, params, scaled(&start, t));
    let mut stepper = Stepper::new(params.step_rule);
    let trial = |from: &Iterate, s: f64| -> Option<Iterate> {
        let w = axpy(&from.x, s, &from.dir);
        let t = ray_maximizer(&disc, &w)?;
        Some(evaluate(&disc, params, scaled(&w, t)))
    };
    let status = loop {
        if it.violation <= params.tol_residual {
            break SolveStatus::Converged;
        }
        if iterations >= params.max_iters {
            break SolveStatus::MaxIterations;
        }
        let s0 = stepper.initial(&disc, &it);
        let found = line_search(&it, s0, |s| trial(&it, s)).or_else(|| {
            if s0 != 1.0 {
                line_search(&it, 1.0, |s| trial(&it, s))
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
    log::debug!("mountain pass a = {}: {status:?} after {iterations} iterations", spec.a);
    finish(it.x, status, iterations)
}

/// Index of the largest entry, lowest index on ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
