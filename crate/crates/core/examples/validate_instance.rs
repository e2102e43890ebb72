//! Checks the sampled hypotheses of both reference instances and prints the
//! validation reports as JSON.

use semipositone::model::{critical_exponent, validate_spec, ProblemSpec, SampleGrid};

fn main() -> semipositone::Result<()> {
    let grid = SampleGrid::default();
    println!("p* = {}", critical_exponent(2.0, 3)?);
    for spec in [ProblemSpec::reference_superlinear(0.0), ProblemSpec::reference_sublinear(0.0)] {
        let report = validate_spec(&spec, &grid)?;
        println!("{:?}: all hypotheses pass = {}", spec.regime, report.pass.all());
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(())
}
