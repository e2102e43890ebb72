use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::function::RadialFunction;
use super::mesh::{OuterBoundary, RadialMesh, GAUSS2};
use crate::error::{Error, Result};
use crate::model::{ProblemSpec, WeightSpec};
use crate::nonlinearity::ShiftedNonlinearity;

const EXTERIOR_PANELS: usize = 32;

/// A weighted quadrature point. The function value there is
/// `ci * u[i] + cj * u[j]` and `wh` already contains `h(ρ) ρ^{N-1} |S^{N-1}|`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct QuadPoint {
    pub wh: f64,
    pub i: usize,
    pub j: usize,
    pub ci: f64,
    pub cj: f64,
}

impl QuadPoint {
    #[inline]
    pub fn value(&self, u: &[f64]) -> f64 {
        self.ci * u[self.i] + self.cj * u[self.j]
    }
}

/// Two-point Gauss on every element; under the harmonic extension the exterior
/// `(R_max, ∞)` is mapped to `s = R_max/ρ ∈ (0, 1]` and integrated panelwise.
pub(crate) fn weighted_points(mesh: &RadialMesh, h: &WeightSpec) -> Vec<QuadPoint> {
    let nodes = mesh.nodes();
    let n = f64::from(mesh.dim());
    let sphere = mesh.sphere_area();
    let mut points = Vec::with_capacity(2 * mesh.elements() + 2 * EXTERIOR_PANELS);
    for e in 0..mesh.elements() {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let len = b - a;
        for (rho, w) in mesh.element_quadrature(e) {
            points.push(QuadPoint {
                wh: w * h.eval(rho) * rho.powf(n - 1.0) * sphere,
                i: e,
                j: e + 1,
                ci: (b - rho) / len,
                cj: (rho - a) / len,
            });
        }
    }
    if mesh.boundary() == OuterBoundary::HarmonicExtension {
        let last = nodes.len() - 1;
        let r = mesh.r_max();
        let k = mesh.tail_exponent();
        let (gp, gw) = GAUSS2;
        let width = 1.0 / EXTERIOR_PANELS as f64;
        for panel in 0..EXTERIOR_PANELS {
            let mid = (panel as f64 + 0.5) * width;
            for (x, w) in gp.iter().zip(gw) {
                let s = mid + 0.5 * width * x;
                let rho = r / s;
                let ws = 0.5 * width * w;
                points.push(QuadPoint {
                    wh: ws * r.powf(n) * s.powf(-n - 1.0) * sphere * h.eval(rho),
                    i: last,
                    j: last,
                    ci: s.powf(k),
                    cj: 0.0,
                });
            }
        }
    }
    points
}

/// Outcome of the nodal Clarke test: for every node `i` and `v = ±e_i`,
/// `D(v) = ∫|∇u|^{p-2}∇u·∇v + ∫h (-F_a)⁰(u; v)` must be nonnegative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalityCertificate {
    pub max_violation: f64,
    pub per_node_violations: Vec<f64>,
    pub tested_directions: usize,
}

/// Tridiagonal Sobolev metric `K_w`, a frozen-coefficient p-Laplacian stiffness.
#[derive(Clone, Debug)]
pub(crate) struct Metric {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Metric {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Thomas algorithm.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = self.upper[0] / self.diag[0];
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let m = self.diag[i] - self.lower[i] * c[i - 1];
            c[i] = if i + 1 < n { self.upper[i] / m } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }
}

/// Discrete energy of a [`ProblemSpec`] on a fixed mesh, with all the
/// geometric data precomputed.
#[derive(Clone, Debug)]
pub struct Discretization {
    mesh: Arc<RadialMesh>,
    spec: ProblemSpec,
    f_a: ShiftedNonlinearity,
    moments: Vec<f64>,
    lengths: Vec<f64>,
    points: Vec<QuadPoint>,
    c_ext: f64,
    hat_norms: Vec<f64>,
}

impl Discretization {
    pub fn new(mesh: impl Into<Arc<RadialMesh>>, spec: &ProblemSpec) -> Result<Self> {
        let mesh = mesh.into();
        if mesh.dim() != spec.n || mesh.p() != spec.p {
            return Err(Error::ShapeMismatch(format!(
                "mesh built for (N, p) = ({}, {}), problem has ({}, {})",
                mesh.dim(),
                mesh.p(),
                spec.n,
                spec.p
            )));
        }
        let f_a = ShiftedNonlinearity::new(spec.f.clone(), spec.a)?;
        let nodes = mesh.nodes();
        let m = mesh.elements();
        let moments: Vec<f64> = (0..m).map(|e| mesh.moment(e)).collect();
        let lengths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let c_ext = match mesh.boundary() {
            OuterBoundary::Dirichlet => 0.0,
            OuterBoundary::HarmonicExtension => {
                let k = mesh.tail_exponent();
                mesh.sphere_area() * k.powf(spec.p - 1.0) * mesh.r_max().powf(f64::from(spec.n) - spec.p)
            }
        };
        let p = spec.p;
        let mut hat_norms = vec![0.0; m + 1];
        for e in 0..m {
            let c = moments[e] / lengths[e].powf(p);
            hat_norms[e] += c;
            hat_norms[e + 1] += c;
        }
        hat_norms[m] += c_ext;
        for v in &mut hat_norms {
            *v = v.powf(1.0 / p);
        }
        let points = weighted_points(&mesh, &spec.h);
        Ok(Self { mesh, spec: spec.clone(), f_a, moments, lengths, points, c_ext, hat_norms })
    }

    pub fn mesh(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn nonlinearity(&self) -> &ShiftedNonlinearity {
        &self.f_a
    }

    pub fn len(&self) -> usize {
        self.moments.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    /// `‖e_i‖` for every node.
    pub fn hat_norms(&self) -> &[f64] {
        &self.hat_norms
    }

    fn dirichlet(&self) -> bool {
        self.mesh.boundary() == OuterBoundary::Dirichlet
    }

    /// Nodes at which test directions are admissible.
    fn free_nodes(&self) -> std::ops::Range<usize> {
        0..if self.dirichlet() { self.len() - 1 } else { self.len() }
    }

    pub fn function(&self, values: Vec<f64>) -> Result<RadialFunction> {
        RadialFunction::new(self.mesh.clone(), values)
    }

    /// `‖u‖^p`, exact for piecewise-linear `u`.
    pub fn kinetic(&self, u: &[f64]) -> f64 {
        let p = self.spec.p;
        let mut acc = 0.0;
        for e in 0..self.moments.len() {
            let s = (u[e + 1] - u[e]) / self.lengths[e];
            acc += self.moments[e] * s.abs().powf(p);
        }
        acc + self.c_ext * u[self.len() - 1].abs().powf(p)
    }

    /// `∫ h F_a(u)`.
    pub fn potential(&self, u: &[f64]) -> f64 {
        self.points.iter().map(|q| q.wh * self.f_a.primitive(q.value(u))).sum()
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        self.kinetic(u) / self.spec.p - self.potential(u)
    }

    /// `∫|∇u|^{p-2}∇u·∇e_i` for every node.
    pub fn kinetic_gradient(&self, u: &[f64]) -> Vec<f64> {
        let p = self.spec.p;
        let mut g = vec![0.0; self.len()];
        for e in 0..self.moments.len() {
            let s = (u[e + 1] - u[e]) / self.lengths[e];
            let flux = self.moments[e] * signed_pow(s, p - 1.0) / self.lengths[e];
            g[e] -= flux;
            g[e + 1] += flux;
        }
        let last = self.len() - 1;
        g[last] += self.c_ext * signed_pow(u[last], p - 1.0);
        g
    }

    /// `∫ h φ(u) e_i` for every node.
    fn load(&self, u: &[f64], phi: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for q in &self.points {
            let v = q.wh * phi(q.value(u));
            out[q.i] += v * q.ci;
            out[q.j] += v * q.cj;
        }
        out
    }

    /// Exact gradient of the energy with `f_a` replaced by its mollification.
    pub fn gradient(&self, u: &[f64], eps_moll: f64) -> Vec<f64> {
        let mut g = self.kinetic_gradient(u);
        let load = self.load(u, |t| self.f_a.mollified_unchecked(t, eps_moll));
        for (gi, li) in g.iter_mut().zip(load) {
            *gi -= li;
        }
        if self.dirichlet() {
            *g.last_mut().unwrap() = 0.0;
        }
        g
    }

    /// `‖u‖^p - ∫ h f_a(u) u`.
    pub fn nehari_residual(&self, u: &[f64]) -> f64 {
        let pairing: f64 = self
            .points
            .iter()
            .map(|q| {
                let t = q.value(u);
                q.wh * self.f_a.value(t) * t
            })
            .sum();
        self.kinetic(u) - pairing
    }

    pub fn certificate(&self, u: &[f64]) -> CriticalityCertificate {
        let kin = self.kinetic_gradient(u);
        let mut plus = kin.clone();
        let mut minus: Vec<f64> = kin.iter().map(|k| -k).collect();
        for q in &self.points {
            let t = q.value(u);
            for (node, c) in [(q.i, q.ci), (q.j, q.cj)] {
                if c != 0.0 {
                    plus[node] += q.wh * self.f_a.clarke_neg_primitive(t, c);
                    minus[node] += q.wh * self.f_a.clarke_neg_primitive(t, -c);
                }
            }
        }
        let per_node: Vec<f64> =
            self.free_nodes().map(|i| 0.0f64.max(-plus[i]).max(-minus[i]) / self.hat_norms[i]).collect();
        CriticalityCertificate {
            max_violation: per_node.iter().copied().fold(0.0, f64::max),
            tested_directions: 2 * per_node.len(),
            per_node_violations: per_node,
        }
    }

    /// Worst normalized slacks of `∫h f(u)φ - ∫|∇u|^{p-2}∇u∇φ >= 0` (sub) and
    /// `∫|∇u|^{p-2}∇u∇φ - ∫h (f(u) - a)φ >= 0` (super) over the nodal hats.
    pub fn subsup(&self, u: &[f64]) -> (f64, f64) {
        let kin = self.kinetic_gradient(u);
        let base = self.f_a.base();
        let a = self.f_a.a();
        let f_load = self.load(u, |t| base.eval(t.max(0.0)));
        let h_load = self.load(u, |_| 1.0);
        let mut sub = f64::INFINITY;
        let mut sup = f64::INFINITY;
        for i in self.free_nodes() {
            let n = self.hat_norms[i];
            sub = sub.min((f_load[i] - kin[i]) / n);
            sup = sup.min((kin[i] - f_load[i] + a * h_load[i]) / n);
        }
        (sub, sup)
    }

    /// Frozen-coefficient metric at `u`: element weights
    /// `m_e (p-1) max(|s_e|, δ)^{p-2} / len_e²`, exactly the stiffness matrix for `p = 2`.
    pub(crate) fn metric(&self, u: &[f64]) -> Metric {
        let p = self.spec.p;
        let n = self.len();
        let slopes: Vec<f64> = (0..n - 1).map(|e| (u[e + 1] - u[e]) / self.lengths[e]).collect();
        let s_max = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let weight = |s: f64| {
            if p == 2.0 {
                1.0
            } else {
                let floor = if s_max > 0.0 { 1e-3 * s_max } else { 1.0 };
                (p - 1.0) * s.abs().max(floor).powf(p - 2.0)
            }
        };
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for e in 0..n - 1 {
            let c = self.moments[e] * weight(slopes[e]) / (self.lengths[e] * self.lengths[e]);
            diag[e] += c;
            diag[e + 1] += c;
            upper[e] = -c;
            lower[e + 1] = -c;
        }
        let last = n - 1;
        if self.dirichlet() {
            diag[last] = 1.0;
            lower[last] = 0.0;
            upper[last - 1] = 0.0;
        } else {
            let u_m = u[last].abs();
            let w = if p == 2.0 { 1.0 } else { (p - 1.0) * u_m.max(1e-3 * u_m.max(1e-300)).powf(p - 2.0) };
            diag[last] += self.c_ext * w;
        }
        Metric { lower, diag, upper }
    }
}

#[inline]
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radialfem::MeshParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(m: usize, boundary: OuterBoundary) -> Discretization {
        let spec = ProblemSpec::reference_superlinear(0.3);
        let params = MeshParams { m, r_max: 20.0, r_core: 3.0, growth: 1.2, boundary };
        let mesh = RadialMesh::build(&params, 3, 2.0).unwrap();
        Discretization::new(mesh, &spec).unwrap()
    }

    #[test]
    fn metric_solve_inverts_apply() {
        let d = setup(60, OuterBoundary::HarmonicExtension);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(0.1..1.0)).collect();
        let k = d.metric(&u);
        let x: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = k.solve(&k.apply(&x));
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn p2_metric_is_hessian_of_kinetic() {
        let d = setup(40, OuterBoundary::HarmonicExtension);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ku = d.metric(&u).apply(&u);
        let g = d.kinetic_gradient(&u);
        for (a, b) in ku.iter().zip(&g) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn exterior_kinetic_matches_closed_form() {
        // u = (R/ρ) beyond R: ∫_R^∞ |u'|² 4πρ² dρ = 4π R.
        let d = setup(40, OuterBoundary::HarmonicExtension);
        let mut u = vec![0.0; d.len()];
        *u.last_mut().unwrap() = 1.0;
        let last_elem = d.moments.len() - 1;
        let interior = d.moments[last_elem] / d.lengths[last_elem].powi(2);
        let r = d.mesh().r_max();
        assert!((d.kinetic(&u) - interior - 4.0 * std::f64::consts::PI * r).abs() < 1e-9 * r);
    }

    #[test]
    fn exterior_quadrature_integrates_weight() {
        // ∫_R^∞ ρ^{-4} 4πρ² dρ = 4π / R with h ≈ ρ^{-4} far out.
        let mesh = RadialMesh::build(&MeshParams::reference(), 3, 2.0).unwrap();
        let h = WeightSpec::rational_decay(1.0, 4.0);
        let pts = weighted_points(&mesh, &h);
        let ext: f64 = pts.iter().filter(|q| q.i == q.j).map(|q| q.wh).sum();
        let exact = 4.0 * std::f64::consts::PI / 60.0;
        assert!((ext - exact).abs() < 1e-6 * exact, "{ext} vs {exact}");
    }

    #[test]
    fn dirichlet_gradient_pins_last_node() {
        let d = setup(30, OuterBoundary::Dirichlet);
        let mut u = vec![0.5; d.len()];
        *u.last_mut().unwrap() = 0.0;
        assert_eq!(*d.gradient(&u, 1e-6).last().unwrap(), 0.0);
        assert_eq!(d.certificate(&u).tested_directions, 2 * (d.len() - 1));
    }
}
