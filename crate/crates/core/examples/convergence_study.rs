//! Distance of `u_a` to `u_0` on the core ball as `a → 0`.

use std::sync::Arc;

use semipositone::model::ProblemSpec;
use semipositone::radialfem::{MeshParams, RadialMesh};
use semipositone::solvers::{convergence_study, SolverParams};

fn main() -> semipositone::Result<()> {
    let spec = ProblemSpec::reference_superlinear(0.0);
    let mesh = Arc::new(RadialMesh::build(&MeshParams::reference(), spec.n, spec.p)?);
    let rows = convergence_study(&spec, &mesh, &SolverParams::default(), &[1e-1, 1e-2, 1e-3, 1e-4, 0.0])?;
    for r in rows {
        println!(
            "a = {:<7} sup dist {:.4e}  norm diff {:.4e}  energy {:.8}",
            r.a, r.sup_distance, r.dp_norm_difference, r.energy
        );
    }
    Ok(())
}
