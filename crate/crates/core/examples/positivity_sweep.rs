//! Warm-started sweep in `a` and the resulting positivity threshold estimate.

use std::sync::Arc;

use semipositone::model::ProblemSpec;
use semipositone::radialfem::{MeshParams, RadialMesh};
use semipositone::solvers::{sweep_a, SolverParams};

fn main() -> semipositone::Result<()> {
    let spec = ProblemSpec::reference_superlinear(0.0);
    let mesh = Arc::new(RadialMesh::build(&MeshParams::reference(), spec.n, spec.p)?);
    let grid = [0.0, 1e-4, 1e-3, 1e-2, 1e-1, 0.2, 0.3, 0.5, 1.0];
    let sweep = sweep_a(&spec, &mesh, &SolverParams::default(), &grid)?;
    println!("{:>8} {:>12} {:>10} {:>8} {:>8}", "a", "energy", "min u", "barrier", "iters");
    for row in &sweep.rows {
        println!(
            "{:>8} {:>12.6} {:>10.3e} {:>8} {:>8}",
            row.a,
            row.energy.unwrap_or(f64::NAN),
            row.min_value.unwrap_or(f64::NAN),
            row.barrier_ok,
            row.iterations
        );
    }
    println!("a* estimate {} (first failure {:?})", sweep.a_star_estimate, sweep.first_failure);
    Ok(())
}
