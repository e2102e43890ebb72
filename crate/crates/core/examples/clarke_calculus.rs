//! Tabulates the shifted nonlinearity and the generalized directional
//! derivative of `-F_a` around the jump at `t = 0`.

use semipositone::model::NonlinearitySpec;
use semipositone::nonlinearity::ShiftedNonlinearity;

fn main() -> semipositone::Result<()> {
    let fa = ShiftedNonlinearity::new(NonlinearitySpec::power(4.0), 0.5)?;
    println!("{:>6} {:>6} {:>10} {:>10} {:>12}", "t", "s", "f_a(t)", "F_a(t)", "(-F_a)0(t,s)");
    for t in [-1.0, -0.1, 0.0, 0.1, 1.0] {
        for s in [-1.0, 1.0] {
            println!(
                "{t:>6} {s:>6} {:>10.4} {:>10.4} {:>12.4}",
                fa.value(t),
                fa.primitive(t),
                fa.clarke_neg_primitive(t, s)
            );
        }
    }
    // the mollified jump is continuous
    let eps = 1e-3;
    for t in [-eps, -eps / 2.0, 0.0] {
        println!("mollified f_a({t:e}) = {}", fa.mollified(t, eps)?);
    }
    Ok(())
}
