//! `f`, its primitive `F`, the discontinuous shift `f_a` and the generalized
//! directional derivative of `-F_a`.

use crate::error::{invalid, Result};
use crate::model::{NonlinearityFamily, NonlinearitySpec};

impl NonlinearitySpec {
    /// `f(t)`, `t >= 0`.
    pub fn f_eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(invalid(format!("f is defined on [0, inf), got t = {t}")));
        }
        Ok(self.eval(t))
    }

    /// `F(t) = ∫₀^t f`, `t >= 0`.
    #[allow(non_snake_case)]
    pub fn F_eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(invalid(format!("F is defined on [0, inf), got t = {t}")));
        }
        Ok(self.primitive(t))
    }

    /// Unchecked `f`; negative arguments are clamped to 0.
    pub(crate) fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.family {
            NonlinearityFamily::Power => t.powf(self.q - 1.0),
            NonlinearityFamily::PowerShifted { t0 } => (t - t0).max(0.0).powf(self.q - 1.0),
            NonlinearityFamily::Tabulated { table } => {
                let (_, ta, fa, slope) = segment(table, t);
                fa + slope * (t - ta)
            }
        }
    }

    /// Unchecked `F`; negative arguments are clamped to 0.
    pub(crate) fn primitive(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.family {
            NonlinearityFamily::Power => t.powf(self.q) / self.q,
            NonlinearityFamily::PowerShifted { t0 } => (t - t0).max(0.0).powf(self.q) / self.q,
            NonlinearityFamily::Tabulated { table } => {
                let (k, ta, fa, slope) = segment(table, t);
                let mut acc = 0.0;
                for w in table[..=k].windows(2) {
                    acc += 0.5 * (w[0][1] + w[1][1]) * (w[1][0] - w[0][0]);
                }
                let dt = t - ta;
                acc + fa * dt + 0.5 * slope * dt * dt
            }
        }
    }
}

/// Segment `[t_k, t_{k+1}]` containing `t` (the last segment extends to infinity):
/// returns `(k, t_k, f_k, slope)`.
fn segment(table: &[[f64; 2]], t: f64) -> (usize, f64, f64, f64) {
    let n = table.len();
    debug_assert!(n >= 2);
    let k = table.partition_point(|row| row[0] <= t).clamp(1, n - 1) - 1;
    let [ta, fa] = table[k];
    let [tb, fb] = table[k + 1];
    (k, ta, fa, (fb - fa) / (tb - ta))
}

/// `f_a(t) = f(t) - a` for `t >= 0`, `0` for `t < 0`, with primitive `F_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedNonlinearity {
    base: NonlinearitySpec,
    a: f64,
}

impl ShiftedNonlinearity {
    pub fn new(base: NonlinearitySpec, a: f64) -> Result<Self> {
        if !(a >= 0.0) {
            return Err(invalid(format!("shift a must be >= 0, got {a}")));
        }
        Ok(Self { base, a })
    }

    pub fn base(&self) -> &NonlinearitySpec {
        &self.base
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `f_a(t)`; jumps from `0` to `-a` at the origin.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.base.eval(t) - self.a
        } else {
            0.0
        }
    }

    /// `F_a(t)`; continuous, kinked at `t = 0` when `a > 0`.
    #[inline]
    pub fn primitive(&self, t: f64) -> f64 {
        if t > 0.0 {
            self.base.primitive(t) - self.a * t
        } else {
            0.0
        }
    }

    /// `(-F_a)⁰(t, s)`.
    #[inline]
    pub fn clarke_neg_primitive(&self, t: f64, s: f64) -> f64 {
        if t > 0.0 {
            -(self.base.eval(t) - self.a) * s
        } else if t == 0.0 && s > 0.0 {
            self.a * s
        } else {
            0.0
        }
    }

    /// Continuous selection of `f_a`: linear ramp from `0` at `-eps` to `-a` at `0`.
    pub fn mollified(&self, t: f64, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(invalid(format!("mollification width must be > 0, got {eps}")));
        }
        Ok(self.mollified_unchecked(t, eps))
    }

    #[inline]
    pub(crate) fn mollified_unchecked(&self, t: f64, eps: f64) -> f64 {
        if t >= 0.0 {
            self.base.eval(t) - self.a
        } else if t >= -eps {
            -self.a * (t + eps) / eps
        } else {
            0.0
        }
    }

    /// Smallest `T` over the grid making `θ F_a(t) <= t f_a(t) + T` hold.
    pub fn ar_defect(&self, theta: f64, t_grid: &[f64]) -> f64 {
        t_grid
            .iter()
            .map(|&t| {
                let (lhs, rhs) = (theta * self.primitive(t), t * self.value(t));
                // differences below round-off of the two sides count as equality
                let gap = lhs - rhs;
                if gap > 1e-12 * (lhs.abs() + rhs.abs()) {
                    gap
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic(a: f64) -> ShiftedNonlinearity {
        ShiftedNonlinearity::new(NonlinearitySpec::power(4.0), a).unwrap()
    }

    #[test]
    fn base_values() {
        let f = NonlinearitySpec::power(4.0);
        assert_eq!(f.f_eval(2.0).unwrap(), 8.0);
        assert_eq!(f.F_eval(2.0).unwrap(), 4.0);
        assert_eq!(f.f_eval(0.0).unwrap(), 0.0);
        assert_eq!(f.F_eval(0.0).unwrap(), 0.0);
        assert!(f.f_eval(-1.0).is_err());
        assert!(f.F_eval(-1.0).is_err());
        let g = NonlinearitySpec::power(1.5);
        assert!((g.F_eval(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_values() {
        let n = quartic(0.5);
        assert_eq!(n.value(2.0), 7.5);
        assert_eq!(n.value(-1.0), 0.0);
        assert_eq!(n.value(0.0), -0.5);
        assert_eq!(n.primitive(2.0), 3.0);
        assert_eq!(n.primitive(-4.0), 0.0);
        assert_eq!(n.primitive(0.0), 0.0);
        let zero = quartic(0.0);
        for t in [0.0, 0.3, 1.0, 2.5] {
            assert_eq!(zero.primitive(t), zero.base().primitive(t));
        }
    }

    #[test]
    fn clarke_branches() {
        let n = quartic(0.5);
        assert_eq!(n.clarke_neg_primitive(2.0, 1.0), -7.5);
        assert_eq!(n.clarke_neg_primitive(0.0, 1.0), 0.5);
        assert_eq!(n.clarke_neg_primitive(0.0, -1.0), 0.0);
        assert_eq!(n.clarke_neg_primitive(-3.0, 5.0), 0.0);
    }

    #[test]
    fn mollifier() {
        let n = quartic(1.0);
        assert_eq!(n.mollified(-0.5e-3, 1e-3).unwrap(), -0.5);
        assert_eq!(n.mollified(-2e-3, 1e-3).unwrap(), 0.0);
        assert_eq!(n.mollified(1.5, 1e-3).unwrap(), n.value(1.5));
        assert!(n.mollified(0.0, 0.0).is_err());
        let flat = quartic(0.0);
        assert_eq!(flat.mollified(-0.5e-3, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn ar_defect_power_family() {
        let grid: Vec<f64> = (0..200).map(|k| 1e-3 * 1.1f64.powi(k)).collect();
        for a in [0.0, 0.1, 3.0] {
            assert_eq!(quartic(a).ar_defect(4.0, &grid), 0.0);
        }
        // θ > q: (θ/q - 1) t^q dominates and the defect grows with the grid.
        let n = quartic(0.0);
        let short: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
        let long: Vec<f64> = (0..=20).map(|k| 2f64.powi(k)).collect();
        let d_short = n.ar_defect(5.0, &short);
        let d_long = n.ar_defect(5.0, &long);
        let oracle = |t: f64| (5.0 / 4.0 - 1.0) * t.powi(4);
        assert!((d_short - oracle(1024.0)).abs() < 1e-9 * oracle(1024.0));
        assert!(d_long > 1e10 * d_short);
    }

    #[test]
    fn tabulated_interpolation_and_primitive() {
        let spec = NonlinearitySpec {
            family: NonlinearityFamily::Tabulated { table: vec![[0.0, 0.0], [1.0, 1.0], [2.0, 4.0]] },
            q: 3.0,
            theta_ar: Some(3.0),
        };
        assert_eq!(spec.eval(0.5), 0.5);
        assert_eq!(spec.eval(1.5), 2.5);
        // extension by last slope 3
        assert_eq!(spec.eval(3.0), 7.0);
        assert!((spec.primitive(1.0) - 0.5).abs() < 1e-15);
        assert!((spec.primitive(2.0) - 3.0).abs() < 1e-15);
        assert!((spec.primitive(3.0) - 8.5).abs() < 1e-15);
    }

    #[test]
    fn shifted_power_vanishes_near_origin() {
        let spec =
            NonlinearitySpec { family: NonlinearityFamily::PowerShifted { t0: 1.0 }, q: 4.0, theta_ar: Some(4.0) };
        assert_eq!(spec.eval(0.5), 0.0);
        assert_eq!(spec.primitive(0.5), 0.0);
        assert_eq!(spec.eval(3.0), 8.0);
        assert_eq!(spec.primitive(3.0), 4.0);
    }
}
