use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sphere_area;

/// How functions are closed beyond the last node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBoundary {
    /// `u(R_max) = 0`.
    Dirichlet,
    /// The last nodal value is continued by the decaying p-harmonic profile
    /// `u(R_max) (R_max/ρ)^{(N-p)/(p-1)}` on `ρ > R_max`.
    #[default]
    HarmonicExtension,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshParams {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    pub r_core: f64,
    pub growth: f64,
    #[serde(default)]
    pub boundary: OuterBoundary,
}

impl MeshParams {
    /// Reference mesh: `M = 400`, `R_max = 60`, `r_core = 5`.
    pub fn reference() -> Self {
        Self { m: 400, r_max: 60.0, r_core: 5.0, growth: 1.02, boundary: OuterBoundary::default() }
    }

    /// All nodes uniformly spaced on `[0, r_max]`.
    pub fn uniform(m: usize, r_max: f64) -> Self {
        Self { m, r_max, r_core: r_max, growth: 1.1, boundary: OuterBoundary::Dirichlet }
    }

    pub fn with_boundary(self, boundary: OuterBoundary) -> Self {
        Self { boundary, ..self }
    }
}

impl Default for MeshParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Two-point Gauss rule on the reference interval `[-1, 1]`: `(points, weights)`.
pub const GAUSS2: ([f64; 2], [f64; 2]) = ([-0.577_350_269_189_625_8, 0.577_350_269_189_625_8], [1.0, 1.0]);

/// Graded radial grid `0 = ρ₀ < ρ₁ < … < ρ_M = R_max` for radial functions of
/// `D^{1,p}(R^N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialMesh {
    nodes: Vec<f64>,
    #[serde(rename = "N")]
    dim: u32,
    p: f64,
    boundary: OuterBoundary,
    core_radius: f64,
}

impl RadialMesh {
    /// Uniform spacing on `[0, r_core]` for the first half of the elements,
    /// geometric spacing with the given ratio on `[r_core, R_max]` for the rest.
    pub fn build(params: &MeshParams, dim: u32, p: f64) -> Result<Self> {
        let MeshParams { m, r_max, r_core, growth, boundary } = *params;
        if m < 16 {
            return Err(invalid(format!("mesh needs M >= 16 elements, got {m}")));
        }
        if !(r_core > 0.0 && r_core <= r_max && r_max.is_finite()) {
            return Err(invalid(format!("need 0 < r_core <= R_max, got r_core = {r_core}, R_max = {r_max}")));
        }
        if !(growth > 1.0) {
            return Err(invalid(format!("growth must be > 1, got {growth}")));
        }
        if dim < 2 {
            return Err(invalid("dimension must be >= 2"));
        }

        let mut nodes = Vec::with_capacity(m + 1);
        if r_core >= r_max {
            nodes.extend((0..=m).map(|i| r_max * i as f64 / m as f64));
        } else {
            let n_uniform = m / 2;
            let n_geom = m - n_uniform;
            let h_uniform = r_core / n_uniform as f64;
            let span = r_max - r_core;
            // The first geometric element may not exceed `growth` times the
            // uniform spacing, otherwise the grading jumps at r_core.
            let reach = |g: f64| h_uniform * (1..=n_geom).map(|j| g.powi(j as i32)).sum::<f64>();
            if reach(growth) < span {
                let (mut lo, mut hi) = (growth, growth);
                while reach(hi) < span {
                    hi = 1.0 + 2.0 * (hi - 1.0);
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if reach(mid) < span {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Err(Error::MeshGrowth { r_max, growth, suggested: hi });
            }
            let first = span * (growth - 1.0) / (growth.powi(n_geom as i32) - 1.0);
            nodes.extend((0..=n_uniform).map(|i| r_core * i as f64 / n_uniform as f64));
            let mut rho = r_core;
            let mut size = first;
            for _ in 0..n_geom {
                rho += size;
                size *= growth;
                nodes.push(rho);
            }
            *nodes.last_mut().unwrap() = r_max;
        }
        Self::from_nodes(nodes, dim, p, boundary, r_core.min(r_max))
    }

    pub fn from_nodes(nodes: Vec<f64>, dim: u32, p: f64, boundary: OuterBoundary, core_radius: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("p must be > 1, got {p}")));
        }
        if boundary == OuterBoundary::HarmonicExtension && !(f64::from(dim) > p) {
            return Err(invalid(format!("harmonic extension needs N > p, got N = {dim}, p = {p}")));
        }
        if nodes.len() < 3 {
            return Err(invalid("mesh needs at least two elements"));
        }
        if nodes[0] != 0.0 {
            return Err(invalid("first mesh node must be exactly 0"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("mesh nodes must be strictly increasing"));
        }
        Ok(Self { nodes, dim, p, boundary, core_radius })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of elements `M`; there are `M + 1` nodes.
    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Decay exponent `(N-p)/(p-1)` of the exterior profile.
    pub fn tail_exponent(&self) -> f64 {
        (f64::from(self.dim) - self.p) / (self.p - 1.0)
    }

    pub fn boundary(&self) -> OuterBoundary {
        self.boundary
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Radius of the uniformly resolved core.
    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// Quadrature points and weights (in `dρ`) of element `e`.
    pub fn element_quadrature(&self, e: usize) -> impl Iterator<Item = (f64, f64)> {
        let (a, b) = (self.nodes[e], self.nodes[e + 1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let (points, weights) = GAUSS2;
        points.into_iter().zip(weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    /// `|S^{N-1}| ∫_{ρ_e}^{ρ_{e+1}} ρ^{N-1} dρ`, exact.
    pub fn moment(&self, e: usize) -> f64 {
        let n = f64::from(self.dim);
        self.sphere_area() * (self.nodes[e + 1].powf(n) - self.nodes[e].powf(n)) / n
    }

    /// Element containing `rho` (clamped to the mesh).
    pub fn locate(&self, rho: f64) -> usize {
        self.nodes.partition_point(|&x| x <= rho).clamp(1, self.nodes.len() - 1) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_uniform() {
        let mesh = RadialMesh::build(
            &MeshParams { m: 16, r_max: 1.0, r_core: 1.0, growth: 1.5, boundary: OuterBoundary::Dirichlet },
            3,
            2.0,
        )
        .unwrap();
        for (i, &x) in mesh.nodes().iter().enumerate() {
            assert!((x - i as f64 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn graded_reaches_r_max_exactly() {
        let params = MeshParams { m: 200, r_max: 100.0, r_core: 5.0, growth: 1.05, boundary: OuterBoundary::Dirichlet };
        let mesh = RadialMesh::build(&params, 3, 2.0).unwrap();
        assert_eq!(mesh.nodes().len(), 201);
        assert_eq!(mesh.r_max(), 100.0);
        assert_eq!(mesh.nodes()[100], 5.0);
        let sizes: Vec<f64> = mesh.nodes()[100..].windows(2).map(|w| w[1] - w[0]).collect();
        for w in sizes.windows(2) {
            assert!((w[1] / w[0] - 1.05).abs() < 1e-9);
        }
    }

    #[test]
    fn reference_mesh_builds() {
        let mesh = RadialMesh::build(&MeshParams::reference(), 3, 2.0).unwrap();
        assert_eq!(mesh.elements(), 400);
        assert_eq!(mesh.r_max(), 60.0);
    }

    #[test]
    fn bad_growth() {
        let mut params = MeshParams::reference();
        params.growth = 0.9;
        assert!(matches!(RadialMesh::build(&params, 3, 2.0), Err(Error::InvalidParameter(_))));
        params.growth = 1.001;
        match RadialMesh::build(&params, 3, 2.0) {
            Err(Error::MeshGrowth { suggested, .. }) => {
                params.growth = suggested * (1.0 + 1e-9);
                assert!(RadialMesh::build(&params, 3, 2.0).is_ok());
            }
            other => panic!("expected growth error, got {other:?}"),
        }
    }

    #[test]
    fn quadrature_weights_sum_to_length() {
        let mesh = RadialMesh::build(&MeshParams::reference(), 3, 2.0).unwrap();
        for e in [0, 150, 399] {
            let len = mesh.nodes()[e + 1] - mesh.nodes()[e];
            let total: f64 = mesh.element_quadrature(e).map(|(_, w)| w).sum();
            assert!((total - len).abs() < 1e-14 * len.max(1.0));
            assert!(mesh.element_quadrature(e).all(|(_, w)| w > 0.0));
        }
    }

    #[test]
    fn json_shape() {
        let mesh = RadialMesh::build(&MeshParams::uniform(16, 1.0), 3, 2.0).unwrap();
        let v = serde_json::to_value(&mesh).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 17);
        let back: RadialMesh = serde_json::from_value(v).unwrap();
        assert_eq!(back.nodes(), mesh.nodes());
        assert!((back.sphere_area() - mesh.sphere_area()).abs() < 1e-15);
    }
}
