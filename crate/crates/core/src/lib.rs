//! Numerical laboratory for the radial semipositone p-Laplacian problem
//!
//! ```text
//! -Δ_p u = h(x) (f(u) - a)   in R^N,   u > 0,
//! ```
//!
//! posed on radial functions. Critical points of the locally Lipschitz
//! energy `I_a(u) = (1/p)∫|∇u|^p - ∫ h F_a(u)` are computed by a
//! mountain-pass path descent (superlinear `f`) or by direct minimization
//! (sublinear `f`), and every returned profile carries certificates:
//! nonsmooth criticality in the Clarke sense, sub/supersolution margins,
//! comparison against explicit radial barriers, a Hopf-type tail bound and
//! a Liouville indicator.
//!
//! Modules:
//! - [`model`]: problem instances, hypothesis validators, rescaling.
//! - [`nonlinearity`]: `f`, `F`, the shifted `f_a`, `F_a` and the generalized
//!   directional derivative of `-F_a`.
//! - [`radialfem`]: graded radial mesh, discrete energy, gradients and
//!   certificates.
//! - [`solvers`]: geometry probes, mountain pass, minimization, sweeps in `a`.
//! - [`barriers`]: closed-form barrier calculus and positivity certificates.
//! - [`cli`]: batch front-end used by the `semipos` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barriers;
pub mod cli;
mod error;
pub mod model;
pub mod nonlinearity;
pub mod radialfem;
pub mod solvers;

pub use error::{Error, Result};

/// Area of the unit sphere `S^{N-1}` in `R^N`.
pub fn sphere_area(dim: u32) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        n => 2.0 * PI / f64::from(n - 2) * sphere_area(n - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }
}
