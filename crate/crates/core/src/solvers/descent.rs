use super::{SolverParams, StepRule};
use crate::radialfem::Discretization;

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 50;

/// A point with its energy, mollified gradient `g` and Sobolev gradient `G = K⁻¹ g`.
#[derive(Clone, Debug)]
pub(crate) struct Iterate {
    pub x: Vec<f64>,
    pub energy: f64,
    pub grad: Vec<f64>,
    pub dir: Vec<f64>,
    /// `⟨g, G⟩`, the squared dual norm of the gradient.
    pub slope: f64,
    pub violation: f64,
}

pub(crate) fn evaluate(disc: &Discretization, params: &SolverParams, x: Vec<f64>) -> Iterate {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let grad = disc.gradient(&x, params.eps_for(scale));
    let dir = disc.metric(&x).solve(&grad);
    let slope = dot(&grad, &dir);
    let violation = disc.certificate(&x).max_violation;
    Iterate { energy: disc.energy(&x), x, grad, dir, slope, violation }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(x: &[f64], s: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a - s * b).collect()
}

/// Chooses the first trial step.
pub(crate) struct Stepper {
    rule: StepRule,
    previous: Option<(Vec<f64>, Vec<f64>)>,
}

impl Stepper {
    pub fn new(rule: StepRule) -> Self {
        Self { rule, previous: None }
    }

    pub fn initial(&mut self, disc: &Discretization, it: &Iterate) -> f64 {
        let step = match (self.rule, &self.previous) {
            (StepRule::BarzilaiBorwein, Some((x0, g0))) => {
                let dx: Vec<f64> = it.x.iter().zip(x0).map(|(a, b)| a - b).collect();
                let dg: Vec<f64> = it.grad.iter().zip(g0).map(|(a, b)| a - b).collect();
                let curvature = dot(&dx, &dg);
                let kdx = disc.metric(&it.x).apply(&dx);
                let s = dot(&dx, &kdx) / curvature;
                if curvature > 0.0 && s.is_finite() {
                    s.clamp(1e-3, 1e3)
                } else {
                    1.0
                }
            }
            _ => 1.0,
        };
        self.previous = Some((it.x.clone(), it.grad.clone()));
        step
    }
}

/// Armijo backtracking along `-G`. `trial(s)` evaluates the (possibly
/// projected) point at step `s`. Once the predicted decrease falls below the
/// round-off of the energy, a step is accepted if the energy does not rise
/// beyond that round-off and the certificate violation shrinks.
pub(crate) fn line_search(
    current: &Iterate,
    s0: f64,
    mut trial: impl FnMut(f64) -> Option<Iterate>,
) -> Option<(Iterate, f64)> {
    let noise = 64.0 * f64::EPSILON * (current.energy.abs() + 1.0);
    let mut s = s0;
    for _ in 0..MAX_HALVINGS {
        if let Some(next) = trial(s) {
            let predicted = ARMIJO_C * s * current.slope;
            let sufficient = next.energy <= current.energy - predicted;
            let flat = predicted < noise && next.energy <= current.energy + noise && next.violation < current.violation;
            if sufficient || flat {
                return Some((next, s));
            }
        }
        s *= 0.5;
    }
    None
}
