//! Rescales a solution with `a > 0` to the unit-shift problem and back.

use std::sync::Arc;

use semipositone::model::{rescale_solution, ProblemSpec};
use semipositone::radialfem::{MeshParams, RadialMesh};
use semipositone::solvers::{solve, SolverParams};

fn main() -> semipositone::Result<()> {
    let a = 0.01;
    let spec = ProblemSpec::reference_superlinear(a);
    let mesh = Arc::new(RadialMesh::build(&MeshParams::reference(), spec.n, spec.p)?);
    let u = solve(&spec, &mesh, &SolverParams::default())?.u;
    let (v, lambda) = rescale_solution(&u, a, spec.f.q, spec.p)?;
    println!("lambda = {lambda}, sup u = {:.6}, sup v = {:.6}", u.sup_norm(), v.sup_norm());
    // v = a^{-1/(q-1)} u, so scaling by a^{1/(q-1)} recovers u
    let back = v.scaled(a.powf(1.0 / (spec.f.q - 1.0)));
    let err =
        back.values().iter().zip(u.values()).map(|(x, y)| (x - y).abs() / y.abs().max(1e-300)).fold(0.0, f64::max);
    println!("round-trip relative error {err:.2e}");
    Ok(())
}
