//! Builds both barrier families, verifies them by finite differences and
//! writes one sampled profile to stdout.

use semipositone::barriers::{barrier_z, barrier_zh, hopf_constant, verify_barrier};
use semipositone::radialfem::{MeshParams, RadialMesh};

fn main() -> semipositone::Result<()> {
    let z = barrier_z(2.0, 3, 4.0, 3.0, 1.0)?;
    let zh = barrier_zh(2.0, 3, 3.0, 1.0)?;
    for b in [&z, &zh] {
        let v = verify_barrier(b, 20)?;
        println!(
            "{:?}: interior err {:.2e}, exterior err {:.2e}, C1 match jump {:.1e}, pass {}",
            b.kind, v.interior_rel_error, v.exterior_rel_error, v.derivative_mismatch, v.pass
        );
    }
    println!("H = {:?}, C1 = {}", z.h_level, hopf_constant(2.0, 3, 3.0, 1.0));

    let mesh = RadialMesh::build(&MeshParams::uniform(40, 10.0), 3, 2.0)?;
    z.write_csv(&mesh, std::io::stdout().lock())
}
