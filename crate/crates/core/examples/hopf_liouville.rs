//! Hopf tail bound and Liouville indicator of the reference solution,
//! contrasted with the trivial critical point.

use std::sync::Arc;

use semipositone::barriers::{hopf_bound_check, hopf_constant, liouville_indicator, measured_level};
use semipositone::model::ProblemSpec;
use semipositone::radialfem::{check_critical, MeshParams, RadialFunction, RadialMesh};
use semipositone::solvers::{solve, SolverParams};

fn main() -> semipositone::Result<()> {
    let spec = ProblemSpec::reference_superlinear(0.0);
    let mesh = Arc::new(RadialMesh::build(&MeshParams::reference(), spec.n, spec.p)?);
    let report = solve(&spec, &mesh, &SolverParams::default())?;
    let u = &report.u;

    let a_level = measured_level(u, &spec, 1.0);
    let c1 = hopf_constant(spec.p, spec.n, a_level, 1.0);
    let (ok, ratio) = hopf_bound_check(u, a_level, 1.0)?;
    println!("A = {a_level:.6}, C1 = {c1:.6}");
    println!("u >= C1 |x|^((p-N)/(p-1)) outside B_1: {ok} (worst ratio {ratio:.4})");
    println!(
        "Liouville indicator {:.6} = {:.3} C1",
        liouville_indicator(u, (10.0, 40.0)),
        liouville_indicator(u, (10.0, 40.0)) / c1
    );

    let zero = RadialFunction::zeros(mesh.clone());
    let cert = check_critical(&zero, &spec.with_a(0.5))?;
    println!("u = 0: violation {:e}, indicator {}", cert.max_violation, liouville_indicator(&zero, (10.0, 40.0)));
    Ok(())
}
