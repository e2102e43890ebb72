//! Radial finite elements for `D^{1,p}(R^N)`: graded mesh, piecewise-linear
//! functions, the discrete energy `I_a`, its mollified gradient and the
//! nonsmooth criticality and sub/supersolution certificates.

mod discretization;
mod fd;
mod function;
mod mesh;

pub(crate) use discretization::{signed_pow, weighted_points};
pub use discretization::{CriticalityCertificate, Discretization};
pub use fd::{p_laplacian_fd, p_laplacian_fd_with};
pub(crate) use function::write_profile;
pub use function::RadialFunction;
pub use mesh::{MeshParams, OuterBoundary, RadialMesh, GAUSS2};

use crate::error::Result;
use crate::model::{ProblemSpec, WeightSpec};

fn discretize(u: &RadialFunction, spec: &ProblemSpec) -> Result<Discretization> {
    Discretization::new(u.mesh_arc().clone(), spec)
}

/// `(∫|∇u|^p)^{1/p}` over `R^N`, using the mesh's exponent and exterior closure.
pub fn dp_norm(u: &RadialFunction, p: f64) -> f64 {
    let mesh = u.mesh();
    let nodes = mesh.nodes();
    let v = u.values();
    let mut acc = 0.0;
    for e in 0..mesh.elements() {
        let s = (v[e + 1] - v[e]) / (nodes[e + 1] - nodes[e]);
        acc += mesh.moment(e) * s.abs().powf(p);
    }
    if mesh.boundary() == OuterBoundary::HarmonicExtension {
        // exterior profile u_M (R/ρ)^k
        let k = mesh.tail_exponent();
        let r = mesh.r_max();
        let n = f64::from(mesh.dim());
        let expo = n - 1.0 - p * (k + 1.0);
        if expo < -1.0 {
            let last = v[v.len() - 1].abs();
            acc += mesh.sphere_area() * (last * k).powf(p) * r.powf(p * k) * r.powf(expo + 1.0) / -(expo + 1.0);
        } else if v[v.len() - 1] != 0.0 {
            return f64::INFINITY;
        }
    }
    acc.powf(1.0 / p)
}

/// `(∫ h |u|^q)^{1/q}`.
pub fn lqh_norm(u: &RadialFunction, q: f64, h: &WeightSpec) -> f64 {
    let v = u.values();
    let sum: f64 = weighted_points(u.mesh(), h).iter().map(|pt| pt.wh * pt.value(v).abs().powf(q)).sum();
    sum.powf(1.0 / q)
}

/// `I_a(u) = (1/p)‖u‖^p - ∫ h F_a(u)`.
pub fn energy(u: &RadialFunction, spec: &ProblemSpec) -> Result<f64> {
    Ok(discretize(u, spec)?.energy(u.values()))
}

/// `∂I/∂u_i` with `f_a` replaced by its mollification of width `eps_moll`.
pub fn grad_energy(u: &RadialFunction, spec: &ProblemSpec, eps_moll: f64) -> Result<Vec<f64>> {
    if !(eps_moll > 0.0) {
        return Err(crate::error::invalid(format!("eps_moll must be > 0, got {eps_moll}")));
    }
    Ok(discretize(u, spec)?.gradient(u.values(), eps_moll))
}

pub fn check_critical(u: &RadialFunction, spec: &ProblemSpec) -> Result<CriticalityCertificate> {
    Ok(discretize(u, spec)?.certificate(u.values()))
}

/// `(sub_margin, sup_margin)`; positive means satisfied.
pub fn subsup_check(u: &RadialFunction, spec: &ProblemSpec) -> Result<(f64, f64)> {
    Ok(discretize(u, spec)?.subsup(u.values()))
}

/// `‖u‖^p - ∫ h f_a(u) u`.
pub fn nehari_residual(u: &RadialFunction, spec: &ProblemSpec) -> Result<f64> {
    Ok(discretize(u, spec)?.nehari_residual(u.values()))
}
