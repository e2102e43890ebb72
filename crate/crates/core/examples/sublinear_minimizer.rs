//! Direct minimization for the sublinear reference instance from several seeds.

use std::sync::Arc;

use semipositone::model::ProblemSpec;
use semipositone::radialfem::{MeshParams, RadialMesh};
use semipositone::solvers::{minimize, SolverParams};

fn main() -> semipositone::Result<()> {
    let spec = ProblemSpec::reference_sublinear(0.0);
    let mesh = Arc::new(RadialMesh::build(&MeshParams::reference(), spec.n, spec.p)?);
    for seed in 0..5 {
        let r = minimize(&spec, &mesh, &SolverParams { seed, ..SolverParams::default() })?;
        println!(
            "seed {seed}: {:?} energy {:.12} min u {:.3e} positive {}",
            r.status,
            r.energy,
            r.min_value(),
            r.positive()
        );
    }
    Ok(())
}
