//! Problem instances and sampled checks of the standing hypotheses on `f` and `h`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::radialfem::RadialFunction;
use crate::sphere_area;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q > p`: mountain-pass geometry.
    Superlinear,
    /// `q < p`: coercive functional, global minimizer.
    Sublinear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NonlinearityFamily {
    /// `f(t) = t^{q-1}`.
    Power,
    /// `f(t) = ((t - t0)^+)^{q-1}`, identically zero on `[0, t0]`.
    PowerShifted { t0: f64 },
    /// Piecewise-linear through `(t, f(t))` pairs, extended by the last slope.
    Tabulated { table: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    #[serde(flatten)]
    pub family: NonlinearityFamily,
    /// Growth exponent: `f(t) <= C t^{q-1}` for large `t`.
    pub q: f64,
    /// Ambrosetti-Rabinowitz exponent, superlinear regime only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_ar: Option<f64>,
}

impl NonlinearitySpec {
    pub fn power(q: f64) -> Self {
        Self { family: NonlinearityFamily::Power, q, theta_ar: Some(q) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFamily {
    /// `h(ρ) = B / (1 + ρ^ϑ)`.
    RationalDecay,
    /// Piecewise-linear through `(ρ, h(ρ))` pairs; power-law extrapolation
    /// fitted on the last two samples beyond the table.
    Tabulated { table: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    #[serde(flatten)]
    pub family: WeightFamily,
    #[serde(rename = "B")]
    pub b: f64,
    pub vartheta: f64,
}

impl WeightSpec {
    pub fn rational_decay(b: f64, vartheta: f64) -> Self {
        Self { family: WeightFamily::RationalDecay, b, vartheta }
    }

    /// `h(ρ)` for `ρ >= 0`.
    pub fn eval(&self, rho: f64) -> f64 {
        match &self.family {
            WeightFamily::RationalDecay => self.b / (1.0 + rho.powf(self.vartheta)),
            WeightFamily::Tabulated { table } => tabulated_weight(table, rho),
        }
    }

    /// Exponent of the power-law tail used beyond the table (`None` for
    /// the closed-form family).
    fn tail_exponent(&self) -> Option<f64> {
        match &self.family {
            WeightFamily::RationalDecay => None,
            WeightFamily::Tabulated { table } => Some(tail_fit(table).1),
        }
    }
}

fn tail_fit(table: &[[f64; 2]]) -> (usize, f64) {
    let n = table.len();
    if n < 2 {
        return (n.saturating_sub(1), 0.0);
    }
    let [r0, h0] = table[n - 2];
    let [r1, h1] = table[n - 1];
    if r0 <= 0.0 || h0 <= 0.0 || h1 <= 0.0 || h0 == h1 {
        return (n - 1, 0.0);
    }
    (n - 1, (h0 / h1).ln() / (r1 / r0).ln())
}

fn tabulated_weight(table: &[[f64; 2]], rho: f64) -> f64 {
    let Some(first) = table.first() else { return 0.0 };
    if rho <= first[0] {
        return first[1];
    }
    let (last, beta) = tail_fit(table);
    let [rl, hl] = table[last];
    if rho >= rl {
        return hl * (rho / rl).powf(-beta);
    }
    let k = table.partition_point(|row| row[0] <= rho);
    let [ra, ha] = table[k - 1];
    let [rb, hb] = table[k];
    ha + (hb - ha) * (rho - ra) / (rb - ra)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub a: f64,
    pub f: NonlinearitySpec,
    pub h: WeightSpec,
    pub regime: Regime,
}

impl ProblemSpec {
    /// Reference superlinear instance: `p = 2`, `N = 3`, `f(t) = t^3`,
    /// `h = 1/(1+|x|^4)`.
    pub fn reference_superlinear(a: f64) -> Self {
        Self {
            p: 2.0,
            n: 3,
            a,
            f: NonlinearitySpec::power(4.0),
            h: WeightSpec::rational_decay(1.0, 4.0),
            regime: Regime::Superlinear,
        }
    }

    /// Reference sublinear instance: as above with `f(t) = t^{1/2}`.
    pub fn reference_sublinear(a: f64) -> Self {
        Self {
            f: NonlinearitySpec { family: NonlinearityFamily::Power, q: 1.5, theta_ar: None },
            regime: Regime::Sublinear,
            ..Self::reference_superlinear(a)
        }
    }

    pub fn with_a(&self, a: f64) -> Self {
        Self { a, ..self.clone() }
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    /// Structural invariants. Sampled hypothesis checks live in [`validate_spec`].
    pub fn validate(&self) -> Result<()> {
        let p_star = critical_exponent(self.p, self.n)?;
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(invalid(format!("a must be finite and >= 0, got {}", self.a)));
        }
        let q = self.f.q;
        if !(q > 1.0 && q < p_star) {
            return Err(invalid(format!("q = {q} must lie in (1, p*) = (1, {p_star})")));
        }
        match self.regime {
            Regime::Superlinear => {
                if q <= self.p {
                    return Err(invalid(format!("superlinear regime needs q > p, got q = {q}")));
                }
                match self.f.theta_ar {
                    Some(theta) if theta > self.p => {}
                    other => return Err(invalid(format!("superlinear regime needs theta_ar > p, got {other:?}"))),
                }
            }
            Regime::Sublinear => {
                if q >= self.p {
                    return Err(invalid(format!("sublinear regime needs q < p, got q = {q}")));
                }
            }
        }
        match &self.f.family {
            NonlinearityFamily::Power => {}
            NonlinearityFamily::PowerShifted { t0 } => {
                if !(*t0 >= 0.0) {
                    return Err(invalid("power_shifted needs t0 >= 0"));
                }
            }
            NonlinearityFamily::Tabulated { table } => {
                if table.len() < 2 {
                    return Err(invalid("tabulated f needs at least two rows"));
                }
                if table[0] != [0.0, 0.0] {
                    return Err(invalid("tabulated f must start at (0, 0)"));
                }
                if table.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(invalid("tabulated f abscissae must increase"));
                }
                if table.iter().any(|r| r[1] < 0.0) {
                    return Err(invalid("tabulated f must be nonnegative"));
                }
            }
        }
        if !(self.h.b > 0.0) {
            return Err(invalid("weight constant B must be > 0"));
        }
        if !(self.h.vartheta > self.dim()) {
            return Err(invalid(format!(
                "weight decay exponent vartheta = {} must exceed N = {}",
                self.h.vartheta, self.n
            )));
        }
        if let WeightFamily::Tabulated { table } = &self.h.family {
            if table.len() < 2 || table[0][0] != 0.0 {
                return Err(invalid("tabulated h needs >= 2 rows starting at rho = 0"));
            }
            if table.windows(2).any(|w| w[1][0] <= w[0][0]) {
                return Err(invalid("tabulated h radii must increase"));
            }
            if table.iter().any(|r| r[1] <= 0.0) {
                return Err(invalid("tabulated h must be positive"));
            }
        }
        Ok(())
    }
}

/// `p* = pN/(N-p)`.
pub fn critical_exponent(p: f64, n: u32) -> Result<f64> {
    let dim = f64::from(n);
    if !(p > 1.0) || !(p < dim) || dim - p < 1e-12 {
        return Err(invalid(format!("critical exponent needs 1 < p < N, got p = {p}, N = {n}")));
    }
    Ok(p * dim / (dim - p))
}

/// Radii for weight checks and `t` values for nonlinearity checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleGrid {
    pub radii: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl Default for SampleGrid {
    fn default() -> Self {
        let radii = (0..=400).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 400.0)).collect();
        let t_values = (0..=240).map(|k| 10f64.powf(-6.0 + 12.0 * k as f64 / 240.0)).collect();
        Self { radii, t_values }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub p1: bool,
    pub p2: bool,
    /// `(f₀)` in the superlinear regime, `(f̃₀)` in the sublinear one.
    pub f0: bool,
    pub f_sc: bool,
    /// `(f_∞)` in the superlinear regime, `(f̃_∞)` in the sublinear one.
    pub f_inf: bool,
}

impl HypothesisFlags {
    pub fn all(&self) -> bool {
        self.p1 && self.p2 && self.f0 && self.f_sc && self.f_inf
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub p_star: f64,
    /// `None` when the weight is not integrable.
    pub h_norm_1: Option<f64>,
    pub h_norm_inf: f64,
    /// `min_ρ (B - h(ρ) ρ^ϑ)` over the sampled radii.
    pub p2_margin: f64,
    /// `F(t)/t^p` at the three smallest sampled `t`, smallest first.
    pub f0_trend: Vec<f64>,
    /// Log-log slope of `f(t)/t^{q-1}` over the top decade of samples.
    pub finf_trend: f64,
    /// Smallest sampled `T` with `θF(t) <= t f(t) + T` (superlinear only).
    pub ar_defect: Option<f64>,
    pub pass: HypothesisFlags,
}

const F0_THRESHOLD: f64 = 1e-2;
const F0_TILDE_THRESHOLD: f64 = 1e2;
const FSC_SLOPE_TOL: f64 = 1e-3;

/// Sampled surrogates for the hypotheses `(P₁) (P₂) (f₀) (f_sc) (f_∞)` and
/// their sublinear counterparts.
pub fn validate_spec(spec: &ProblemSpec, grid: &SampleGrid) -> Result<ValidationReport> {
    if grid.radii.is_empty() || grid.t_values.is_empty() {
        return Err(invalid("sample grid must be nonempty"));
    }
    let p_star = critical_exponent(spec.p, spec.n)?;
    let h = &spec.h;

    let h_norm_1 = weight_l1_norm(h, spec.n);
    let mut h_norm_inf = h.eval(0.0);
    let mut p2_margin = f64::INFINITY;
    let mut h_positive = h_norm_inf > 0.0;
    for &rho in grid.radii.iter().filter(|r| **r > 0.0) {
        let v = h.eval(rho);
        h_positive &= v > 0.0;
        h_norm_inf = h_norm_inf.max(v);
        p2_margin = p2_margin.min(h.b - v * rho.powf(h.vartheta));
    }
    let p1 = h_positive && h_norm_1.is_some() && h_norm_inf.is_finite();
    let p2 = h.vartheta > spec.dim() && h.b > 0.0 && p2_margin >= 0.0;

    let mut ts: Vec<f64> = grid.t_values.iter().copied().filter(|t| *t > 0.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 3 {
        return Err(invalid("need at least three positive t samples"));
    }
    let f = &spec.f;
    let f0_trend: Vec<f64> = ts[..3].iter().map(|&t| f.primitive(t) / t.powf(spec.p)).collect();
    let f0 = match spec.regime {
        Regime::Superlinear => f0_trend[0] <= F0_THRESHOLD && f0_trend[0] <= f0_trend[1] && f0_trend[1] <= f0_trend[2],
        Regime::Sublinear => {
            f0_trend[0] >= F0_TILDE_THRESHOLD && f0_trend[0] >= f0_trend[1] && f0_trend[1] >= f0_trend[2]
        }
    };

    let t_max = *ts.last().unwrap();
    let top: Vec<f64> = ts.iter().copied().filter(|&t| t >= t_max / 10.0).collect();
    let finf_trend = if top.len() >= 2 {
        let pts: Vec<(f64, f64)> =
            top.iter().map(|&t| (t.ln(), (f.eval(t) / t.powf(f.q - 1.0)).max(f64::MIN_POSITIVE).ln())).collect();
        least_squares(&pts).0
    } else {
        0.0
    };
    let f_sc = f.q > 1.0 && f.q < p_star && finf_trend <= FSC_SLOPE_TOL;

    let (f_inf, ar_defect) = match spec.regime {
        Regime::Superlinear => {
            let theta = f.theta_ar.unwrap_or(f64::NAN);
            let upper = &ts[ts.len() / 2..];
            let ar_ok = upper.iter().all(|&t| {
                let big_f = f.primitive(t);
                big_f > 0.0 && theta * big_f <= f.eval(t) * t * (1.0 + 1e-12)
            });
            let shifted = crate::nonlinearity::ShiftedNonlinearity::new(f.clone(), spec.a)?;
            let defect = shifted.ar_defect(theta, &ts);
            (theta > spec.p && f.q > spec.p && ar_ok, Some(defect))
        }
        Regime::Sublinear => (f.q < spec.p, None),
    };

    Ok(ValidationReport {
        p_star,
        h_norm_1,
        h_norm_inf,
        p2_margin,
        f0_trend,
        finf_trend,
        ar_defect,
        pass: HypothesisFlags { p1, p2, f0, f_sc, f_inf },
    })
}

/// `‖h‖₁ = |S^{N-1}| ∫₀^∞ h(ρ) ρ^{N-1} dρ`, or `None` when the tail is not
/// integrable.
pub fn weight_l1_norm(h: &WeightSpec, n: u32) -> Option<f64> {
    let dim = f64::from(n);
    let radial = match &h.family {
        WeightFamily::RationalDecay => {
            if h.vartheta <= dim {
                return None;
            }
            // Trapezoid in x = ln ρ; the integrand decays exponentially at both ends.
            let lo = -40.0 / dim;
            let hi = 40.0 / (h.vartheta - dim) + h.b.abs().max(1.0).ln() / (h.vartheta - dim);
            let step = 1e-2;
            let count = ((hi - lo) / step).ceil() as usize;
            let step = (hi - lo) / count as f64;
            let mut sum = 0.0;
            for k in 0..=count {
                let x = lo + k as f64 * step;
                let weight = if k == 0 || k == count { 0.5 } else { 1.0 };
                sum += weight * h.eval(x.exp()) * (dim * x).exp();
            }
            sum * step
        }
        WeightFamily::Tabulated { table } => {
            let beta = h.tail_exponent().unwrap_or(0.0);
            if beta <= dim {
                return None;
            }
            let mut sum = 0.0;
            for w in table.windows(2) {
                let ([ra, ha], [rb, hb]) = (w[0], w[1]);
                let slope = (hb - ha) / (rb - ra);
                let intercept = ha - slope * ra;
                sum += intercept * (rb.powf(dim) - ra.powf(dim)) / dim
                    + slope * (rb.powf(dim + 1.0) - ra.powf(dim + 1.0)) / (dim + 1.0);
            }
            let [rl, hl] = *table.last()?;
            sum + hl * rl.powf(dim) / (beta - dim)
        }
    };
    let norm = sphere_area(n) * radial;
    norm.is_finite().then_some(norm)
}

/// Slope and intercept of the least-squares line through `pts`.
pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// `v = a^{-1/(q-1)} u` together with `λ = a^{(q-p)/(q-1)}`, the coefficient
/// of the rescaled problem `-Δ_p v = λ h (f̃_a(v) - 1)`.
pub fn rescale_solution(u: &RadialFunction, a: f64, q: f64, p: f64) -> Result<(RadialFunction, f64)> {
    if !(a > 0.0) {
        return Err(invalid(format!("rescaling needs a > 0, got {a}")));
    }
    if q == 1.0 {
        return Err(invalid("rescaling needs q != 1"));
    }
    let factor = a.powf(-1.0 / (q - 1.0));
    let lambda = a.powf((q - p) / (q - 1.0));
    Ok((u.scaled(factor), lambda))
}
