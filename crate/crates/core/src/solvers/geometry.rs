use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ProblemSpec, Regime, SampleGrid};
use crate::radialfem::{dp_norm, lqh_norm, Discretization, RadialFunction, RadialMesh};

const SCALE_BUDGET: usize = 200;

/// Measured mountain-pass or coercivity geometry of `I_a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport {
    pub regime: Regime,
    pub samples: usize,
    /// Largest sampled `∫h|u|^s / ‖u‖^s`, `s ∈ {p, q}`.
    pub embedding_constant: Option<f64>,
    pub epsilon: Option<f64>,
    pub c_epsilon: Option<f64>,
    /// Sphere radius `ρ` with `C C_ε ρ^{q-p} <= 1/(4p)`.
    pub rho: Option<f64>,
    /// `ρ^p / (4p)`.
    pub alpha_bound: Option<f64>,
    /// Superlinear: min of `I_a` on the sampled sphere. Sublinear: `-I_a(t₀φ)`.
    pub alpha_hat: f64,
    pub alpha_ok: bool,
    pub t1: Option<f64>,
    pub t0: Option<f64>,
    /// `I_a` at the far endpoint `t₁φ` or at `t₀φ`.
    pub endpoint_energy: f64,
    /// Norm beyond which every sampled `I_a` is positive (sublinear).
    pub coercive_radius: Option<f64>,
}

/// Tent `(1 - ρ/r_core)⁺` scaled to unit `D^{1,p}` norm.
pub fn probe_direction(mesh: &Arc<RadialMesh>) -> RadialFunction {
    let rc = mesh.core_radius();
    let tent =
        RadialFunction::from_parts(mesh.clone(), mesh.nodes().iter().map(|&r| (1.0 - r / rc).max(0.0)).collect());
    let n = dp_norm(&tent, mesh.p());
    tent.scaled(1.0 / n)
}

/// Random mixture of Gaussian bumps of widths around `r_core`, unit norm.
pub(crate) fn random_direction(mesh: &Arc<RadialMesh>, rng: &mut ChaCha8Rng) -> RadialFunction {
    let rc = mesh.core_radius();
    let bumps: Vec<(f64, f64)> =
        (0..3).map(|_| (rng.gen_range(-1.0..1.0), rc * rng.gen_range(0.05f64.ln()..2f64.ln()).exp())).collect();
    let mut values: Vec<f64> =
        mesh.nodes().iter().map(|&r| bumps.iter().map(|(c, s)| c * (-(r / s).powi(2)).exp()).sum()).collect();
    if mesh.boundary() == crate::radialfem::OuterBoundary::Dirichlet {
        *values.last_mut().unwrap() = 0.0;
    }
    let u = RadialFunction::from_parts(mesh.clone(), values);
    let n = dp_norm(&u, mesh.p());
    u.scaled(1.0 / n)
}

pub fn geometry_probe(spec: &ProblemSpec, mesh: &Arc<RadialMesh>, samples: usize) -> Result<GeometryReport> {
    geometry_probe_with(spec, mesh, samples, 0, 1.0)
}

pub fn geometry_probe_with(
    spec: &ProblemSpec,
    mesh: &Arc<RadialMesh>,
    samples: usize,
    seed: u64,
    t_start: f64,
) -> Result<GeometryReport> {
    spec.validate()?;
    let disc = Discretization::new(mesh.clone(), spec)?;
    let phi = probe_direction(mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = vec![phi.clone()];
    directions.extend((0..samples).map(|_| random_direction(mesh, &mut rng)));
    let energy_at = |u: &RadialFunction, t: f64| disc.energy(&u.scaled(t).into_values());
    let p = spec.p;

    match spec.regime {
        Regime::Superlinear => {
            let q = spec.f.q;
            let c = directions
                .iter()
                .map(|u| lqh_norm(u, p, &spec.h).powf(p).max(lqh_norm(u, q, &spec.h).powf(q)))
                .fold(0.0, f64::max);
            let epsilon = 1.0 / (2.0 * p * c);
            let c_eps = SampleGrid::default()
                .t_values
                .iter()
                .map(|&t| (spec.f.primitive(t) - epsilon * t.powf(p)).max(0.0) / t.powf(q))
                .fold(0.0, f64::max);
            let rho = if c_eps > 0.0 { (1.0 / (4.0 * p * c * c_eps)).powf(1.0 / (q - p)) } else { t_start };
            let alpha_hat = directions.iter().map(|u| energy_at(u, rho)).fold(f64::INFINITY, f64::min);
            let alpha_bound = rho.powf(p) / (4.0 * p);
            let mut t = t_start.max(2.0 * rho);
            let mut found = None;
            for _ in 0..SCALE_BUDGET {
                let e = energy_at(&phi, t);
                if e < 0.0 {
                    found = Some((t, e));
                    break;
                }
                t *= 2.0;
            }
            let (t1, endpoint_energy) = found.ok_or_else(|| {
                Error::Geometry(format!("I_a(t φ) stays nonnegative up to t = {t:e}; no mountain-pass endpoint"))
            })?;
            Ok(GeometryReport {
                regime: spec.regime,
                samples,
                embedding_constant: Some(c),
                epsilon: Some(epsilon),
                c_epsilon: Some(c_eps),
                rho: Some(rho),
                alpha_bound: Some(alpha_bound),
                alpha_hat,
                alpha_ok: alpha_hat > 0.0 && alpha_hat >= alpha_bound * (1.0 - 1e-12),
                t1: Some(t1),
                t0: None,
                endpoint_energy,
                coercive_radius: None,
            })
        }
        Regime::Sublinear => {
            let (t0, e0) = (-60..=60)
                .map(|k| {
                    let t = t_start * 2f64.powi(k);
                    (t, energy_at(&phi, t))
                })
                .fold((t_start, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
            if !(e0 < 0.0) {
                return Err(Error::Geometry(format!("I_a(t φ) >= 0 on the scanned scales; least value {e0:e}")));
            }
            let mut radius = t0;
            let mut coercive = None;
            for _ in 0..SCALE_BUDGET {
                if directions.iter().all(|u| energy_at(u, radius) > 0.0) {
                    coercive = Some(radius);
                    break;
                }
                radius *= 2.0;
            }
            let coercive_radius = coercive
                .ok_or_else(|| Error::Geometry("sampled energies stay nonpositive at every probed radius".into()))?;
            Ok(GeometryReport {
                regime: spec.regime,
                samples,
                embedding_constant: None,
                epsilon: None,
                c_epsilon: None,
                rho: None,
                alpha_bound: None,
                alpha_hat: -e0,
                alpha_ok: true,
                t1: None,
                t0: Some(t0),
                endpoint_energy: e0,
                coercive_radius: Some(coercive_radius),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radialfem::MeshParams;

    fn mesh() -> Arc<RadialMesh> {
        Arc::new(RadialMesh::build(&MeshParams::reference(), 3, 2.0).unwrap())
    }

    #[test]
    fn superlinear_reference_geometry() {
        let report = geometry_probe(&ProblemSpec::reference_superlinear(0.0), &mesh(), 32).unwrap();
        assert!(report.alpha_hat > 0.0 && report.alpha_ok, "{report:?}");
        assert!(report.endpoint_energy < 0.0);
        assert!(report.t1.unwrap() > report.rho.unwrap());
    }

    #[test]
    fn sublinear_reference_geometry() {
        let report = geometry_probe(&ProblemSpec::reference_sublinear(0.0), &mesh(), 16).unwrap();
        assert!(report.endpoint_energy < 0.0 && report.alpha_hat > 0.0);
        assert!(report.coercive_radius.unwrap() > report.t0.unwrap());
    }

    #[test]
    fn nonpositive_directions_have_kinetic_energy_only() {
        let spec = ProblemSpec::reference_superlinear(0.2);
        let m = mesh();
        let disc = Discretization::new(m.clone(), &spec).unwrap();
        let phi = probe_direction(&m);
        assert!((dp_norm(&phi, 2.0) - 1.0).abs() < 1e-12);
        let rho = 0.7;
        let e = disc.energy(&phi.scaled(-rho).into_values());
        assert!((e - rho * rho / 2.0).abs() < 1e-14);
    }
}
