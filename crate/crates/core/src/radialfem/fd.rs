use crate::error::{invalid, Result};

/// Radial `Δ_p v(ρ) = |v'|^{p-2}[(p-1)v'' + (N-1)v'/ρ]` with central
/// differences of width `1e-3 ρ`.
pub fn p_laplacian_fd(v: impl Fn(f64) -> f64, p: f64, n: u32, rho: f64) -> Result<f64> {
    p_laplacian_fd_with(v, p, n, rho, 1e-3 * rho)
}

/// As [`p_laplacian_fd`] with an explicit stencil width `delta`.
pub fn p_laplacian_fd_with(v: impl Fn(f64) -> f64, p: f64, n: u32, rho: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !(rho > delta) {
        return Err(invalid(format!("need rho > delta > 0, got rho = {rho}, delta = {delta}")));
    }
    let (lo, mid, hi) = (v(rho - delta), v(rho), v(rho + delta));
    let d1 = (hi - lo) / (2.0 * delta);
    let d2 = (hi - 2.0 * mid + lo) / (delta * delta);
    let amp = if p == 2.0 { 1.0 } else { d1.abs().powf(p - 2.0) };
    Ok(amp * ((p - 1.0) * d2 + (f64::from(n) - 1.0) * d1 / rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_in_three_dimensions() {
        for rho in [0.5, 1.0, 7.0] {
            let lap = p_laplacian_fd(|r| r * r, 2.0, 3, rho).unwrap();
            assert!((lap - 6.0).abs() < 1e-6);
        }
    }

    #[test]
    fn fundamental_solution_is_harmonic() {
        for rho in [0.5, 2.0, 30.0] {
            let lap = p_laplacian_fd(|r| r.recip(), 2.0, 3, rho).unwrap();
            assert!(lap.abs() < 1e-6 * rho.powi(-3));
        }
        // p = 3, N = 4: exponent (p-N)/(p-1) = -1/2
        let lap = p_laplacian_fd(|r| r.powf(-0.5), 3.0, 4, 2.0).unwrap();
        assert!(lap.abs() < 1e-8);
    }

    #[test]
    fn rejects_small_radius() {
        assert!(p_laplacian_fd_with(|r| r, 2.0, 3, 1e-4, 1e-3).is_err());
        assert!(p_laplacian_fd(|r| r, 2.0, 3, 0.0).is_err());
    }
}
