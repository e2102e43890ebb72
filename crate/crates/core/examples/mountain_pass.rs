//! Mountain-pass solution of the superlinear reference instance.
//!
//! Usage: `cargo run --release --example mountain_pass -- [a]`

use std::sync::Arc;

use semipositone::model::ProblemSpec;
use semipositone::radialfem::{MeshParams, RadialMesh};
use semipositone::solvers::{mountain_pass_solve, SolverParams};

fn main() -> semipositone::Result<()> {
    let a = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let spec = ProblemSpec::reference_superlinear(a);
    let mesh = Arc::new(RadialMesh::build(&MeshParams::reference(), spec.n, spec.p)?);
    let report = mountain_pass_solve(&spec, &mesh, &SolverParams::default())?;
    let c = &report.certificates;
    println!("status {:?} after {} iterations", report.status, report.iterations);
    println!("energy {:.10} (path bound {:?})", report.energy, report.energy_upper_bound);
    println!("norm {:.6}, sup {:.6}, min {:.3e}", report.dp_norm, report.sup_norm, c.min_value);
    println!("violation {:.2e}, nehari {:.2e}", c.criticality.max_violation, c.nehari_residual);
    println!("decay slope {:?} (expected {})", c.decay_slope, c.expected_slope);
    println!("barrier ok {}, failures {:?}", c.barrier_ok, c.failures);
    Ok(())
}
