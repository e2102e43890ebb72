use serde::Serialize;

use super::geometry::GeometryReport;
use super::CertificateParams;
use crate::barriers::{hopf_constant, liouville_indicator, positivity_certificate, PositivityCertificate};
use crate::error::{invalid, Error, Result};
use crate::model::{least_squares, ProblemSpec, Regime};
use crate::radialfem::{CriticalityCertificate, Discretization, RadialFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// The line search could not make progress before the tolerance was met.
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopfOutcome {
    /// `-Δ_p u >= 0` outside `B_r` and `A > 0`, so the tail bound must hold.
    pub applicable: bool,
    pub ok: bool,
    pub worst_ratio: f64,
}

/// Every certificate evaluated on a profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificates {
    pub criticality: CriticalityCertificate,
    pub sub_margin: f64,
    pub sup_margin: f64,
    pub nehari_residual: f64,
    pub min_value: f64,
    /// `min u >= -10 eps_moll`.
    pub nonnegative: bool,
    pub positivity: PositivityCertificate,
    pub barrier_ok: bool,
    pub decay_slope: Option<f64>,
    pub decay_offset: Option<f64>,
    pub expected_slope: f64,
    pub hopf: HopfOutcome,
    pub liouville: f64,
    /// Liouville indicator over `C₁`, when `A > 0`.
    pub liouville_ratio: Option<f64>,
    /// Human-readable reasons for every failed check.
    pub failures: Vec<String>,
}

impl Certificates {
    /// Nonnegativity or the barrier comparison failed.
    pub fn positivity_failed(&self) -> bool {
        !(self.nonnegative && self.barrier_ok)
    }

    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs criticality, sub/supersolution, comparison, Hopf, decay and Liouville
/// checks on `u`; `eps_abs` is the absolute mollification width.
pub fn certify(
    u: &RadialFunction,
    spec: &ProblemSpec,
    cp: &CertificateParams,
    eps_abs: f64,
    tol: f64,
) -> Result<Certificates> {
    let disc = Discretization::new(u.mesh_arc().clone(), spec)?;
    let v = u.values();
    let mesh = u.mesh();
    let mut failures = Vec::new();

    let criticality = disc.certificate(v);
    if !(criticality.max_violation <= tol) {
        failures.push(format!("criticality violation {:e} above {tol:e}", criticality.max_violation));
    }
    let (sub_margin, sup_margin) = disc.subsup(v);
    if sub_margin < -cp.subsup_tol || sup_margin < -cp.subsup_tol {
        failures.push(format!("sub/supersolution slack ({sub_margin:e}, {sup_margin:e})"));
    }
    let min_value = u.min_value();
    let nonnegative = min_value >= -10.0 * eps_abs;
    if !nonnegative {
        failures.push(format!("min u = {min_value:e} below -10 eps"));
    }

    let big_r = cp.compare_radius.min(mesh.r_max());
    let positivity = positivity_certificate(u, spec, cp.barrier_r, big_r).unwrap_or_else(|e| PositivityCertificate {
        a_level: f64::NAN,
        h_level: None,
        r: cp.barrier_r,
        big_r,
        margin: None,
        ok: false,
        reason: Some(e.to_string()),
    });
    if !positivity.ok {
        failures.push(format!("positivity: {}", positivity.reason.as_deref().unwrap_or("comparison failed")));
    }

    let expected_slope = (spec.p - f64::from(spec.n)) / (spec.p - 1.0);
    let (decay_slope, decay_offset) = match decay_fit(u, cp.decay_window) {
        Ok((s, o)) => {
            if (s - expected_slope).abs() > cp.slope_tol {
                failures.push(format!("decay slope {s:.4} outside {expected_slope} ± {}", cp.slope_tol));
            }
            (Some(s), Some(o))
        }
        Err(e) => {
            failures.push(format!("decay fit: {e}"));
            (None, None)
        }
    };

    let a_level = positivity.a_level;
    let f_a = disc.nonlinearity();
    let superharmonic_tail = mesh
        .nodes()
        .iter()
        .zip(v)
        .filter(|(&rho, _)| rho > cp.barrier_r)
        .all(|(&rho, &x)| x >= 0.0 && spec.h.eval(rho) * f_a.value(x) >= 0.0);
    let applicable = a_level > 0.0 && superharmonic_tail;
    let hopf = if a_level > 0.0 {
        let (ok, worst_ratio) = crate::barriers::hopf_bound_check_with(u, a_level, cp.barrier_r, cp.tail_tol)?;
        HopfOutcome { applicable, ok, worst_ratio }
    } else {
        HopfOutcome { applicable, ok: false, worst_ratio: f64::NAN }
    };
    if hopf.applicable && !hopf.ok {
        failures.push(format!("Hopf tail ratio {:.4} below {}", hopf.worst_ratio, 1.0 - cp.tail_tol));
    }

    let liouville = liouville_indicator(u, cp.decay_window);
    let liouville_ratio = (a_level > 0.0).then(|| liouville / hopf_constant(spec.p, spec.n, a_level, cp.barrier_r));

    Ok(Certificates {
        criticality,
        sub_margin,
        sup_margin,
        nehari_residual: disc.nehari_residual(v),
        min_value,
        nonnegative,
        barrier_ok: positivity.ok,
        positivity,
        decay_slope,
        decay_offset,
        expected_slope,
        hopf,
        liouville,
        liouville_ratio,
        failures,
    })
}

/// Least-squares slope and offset of `log u` against `log ρ` over the mesh
/// nodes inside `window`.
pub fn decay_fit(u: &RadialFunction, window: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = window;
    let mesh = u.mesh();
    if !(lo > 0.0 && hi > lo && hi <= mesh.r_max()) {
        return Err(invalid(format!("decay window ({lo}, {hi}) must lie in (0, R_max = {}]", mesh.r_max())));
    }
    let mut pts = Vec::new();
    for (&rho, &v) in mesh.nodes().iter().zip(u.values()) {
        if rho >= lo && rho <= hi {
            if !(v > 0.0) {
                return Err(Error::NonPositive { rho, value: v });
            }
            pts.push((rho.ln(), v.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(invalid("decay window holds fewer than two nodes"));
    }
    Ok(least_squares(&pts))
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub regime: Regime,
    pub a: f64,
    pub iterations: usize,
    pub energy: f64,
    /// Largest energy on the initial path (superlinear) bounding the critical level.
    pub energy_upper_bound: Option<f64>,
    pub dp_norm: f64,
    pub sup_norm: f64,
    pub eps_moll: f64,
    #[serde(flatten)]
    pub certificates: Certificates,
    pub geometry: Option<GeometryReport>,
    /// Emitted separately as a `rho,u` profile.
    #[serde(skip)]
    pub u: RadialFunction,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn min_value(&self) -> f64 {
        self.certificates.min_value
    }

    /// Converged, nonnegative and above the barrier.
    pub fn positive(&self) -> bool {
        self.converged() && !self.certificates.positivity_failed()
    }

    /// Energy sign expected for the regime: positive for superlinear, negative for sublinear.
    pub fn energy_sign_ok(&self) -> bool {
        match self.regime {
            Regime::Superlinear => self.energy > 0.0 && self.energy_upper_bound.is_none_or(|c| self.energy <= c),
            Regime::Sublinear => self.energy < 0.0,
        }
    }
}

pub(crate) fn assemble(
    disc: &Discretization,
    params: &super::SolverParams,
    x: Vec<f64>,
    status: SolveStatus,
    iterations: usize,
    geometry: Option<GeometryReport>,
    energy_upper_bound: Option<f64>,
) -> Result<SolveReport> {
    let u = disc.function(x)?;
    let sup_norm = u.sup_norm();
    let eps_moll = params.eps_for(sup_norm);
    let certificates = certify(&u, disc.spec(), &params.certificates, eps_moll, params.tol_residual)?;
    Ok(SolveReport {
        status,
        regime: disc.spec().regime,
        a: disc.spec().a,
        iterations,
        energy: disc.energy(u.values()),
        energy_upper_bound,
        dp_norm: crate::radialfem::dp_norm(&u, disc.spec().p),
        sup_norm,
        eps_moll,
        certificates,
        geometry,
        u,
    })
}
