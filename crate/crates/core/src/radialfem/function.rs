use std::io::{Read, Write};
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::mesh::{OuterBoundary, RadialMesh};
use crate::error::{invalid, Error, Result};

/// Nodal values of a piecewise-linear radial function on a [`RadialMesh`].
#[derive(Clone, Debug)]
pub struct RadialFunction {
    mesh: Arc<RadialMesh>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(mesh: impl Into<Arc<RadialMesh>>, values: Vec<f64>) -> Result<Self> {
        let mesh = mesh.into();
        if values.len() != mesh.nodes().len() {
            return Err(Error::ShapeMismatch(format!("{} values for {} nodes", values.len(), mesh.nodes().len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("nodal values must be finite"));
        }
        if mesh.boundary() == OuterBoundary::Dirichlet && *values.last().unwrap() != 0.0 {
            return Err(invalid("Dirichlet truncation requires u(R_max) = 0"));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: impl Into<Arc<RadialMesh>>) -> Self {
        let mesh = mesh.into();
        let values = vec![0.0; mesh.nodes().len()];
        Self { mesh, values }
    }

    /// Samples `g` at the nodes; the last value is forced to 0 under Dirichlet truncation.
    pub fn from_fn(mesh: impl Into<Arc<RadialMesh>>, g: impl Fn(f64) -> f64) -> Result<Self> {
        let mesh = mesh.into();
        let mut values: Vec<f64> = mesh.nodes().iter().map(|&r| g(r)).collect();
        if mesh.boundary() == OuterBoundary::Dirichlet {
            *values.last_mut().unwrap() = 0.0;
        }
        Self::new(mesh, values)
    }

    pub(crate) fn from_parts(mesh: Arc<RadialMesh>, values: Vec<f64>) -> Self {
        debug_assert_eq!(mesh.nodes().len(), values.len());
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &RadialMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { mesh: self.mesh.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.mesh.clone(), values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation inside the mesh, exterior profile beyond `R_max`.
    pub fn eval(&self, rho: f64) -> f64 {
        let nodes = self.mesh.nodes();
        let r_max = self.mesh.r_max();
        if rho > r_max {
            return match self.mesh.boundary() {
                OuterBoundary::Dirichlet => 0.0,
                OuterBoundary::HarmonicExtension => {
                    self.values[nodes.len() - 1] * (r_max / rho).powf(self.mesh.tail_exponent())
                }
            };
        }
        let e = self.mesh.locate(rho);
        let (a, b) = (nodes[e], nodes[e + 1]);
        let t = (rho - a) / (b - a);
        self.values[e] * (1.0 - t) + self.values[e + 1] * t
    }

    /// Writes `rho,u` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_profile(out, "u", self.mesh.nodes(), &self.values)
    }

    /// Reads a `rho,u` profile and checks its radii against `mesh`.
    pub fn read_csv<R: Read>(mesh: impl Into<Arc<RadialMesh>>, input: R) -> Result<Self> {
        let mesh = mesh.into();
        let (rho, values) = read_profile(input)?;
        if rho.len() != mesh.nodes().len() {
            return Err(Error::ShapeMismatch(format!(
                "profile has {} rows, mesh has {} nodes",
                rho.len(),
                mesh.nodes().len()
            )));
        }
        for (k, (a, b)) in rho.iter().zip(mesh.nodes()).enumerate() {
            if (a - b).abs() > 1e-9 * b.abs().max(1.0) {
                return Err(Error::ShapeMismatch(format!("row {k}: rho = {a}, mesh node = {b}")));
            }
        }
        Self::new(mesh, values)
    }
}

pub(crate) fn write_profile<W: Write>(out: W, column: &str, rho: &[f64], values: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["rho", column])?;
    for (r, v) in rho.iter().zip(values) {
        writer.serialize((r, v))?;
    }
    writer.flush()?;
    Ok(())
}

pub(crate) fn read_profile<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "rho" {
        return Err(Error::ShapeMismatch(format!("expected header rho,<value>, got {headers:?}")));
    }
    let mut rho = Vec::new();
    let mut values = Vec::new();
    for row in reader.deserialize::<(f64, f64)>() {
        let (r, v) = row?;
        rho.push(r);
        values.push(v);
    }
    Ok((rho, values))
}

impl Serialize for RadialFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RadialFunction", 2)?;
        s.serialize_field("rho", self.mesh.nodes())?;
        s.serialize_field("u", &self.values)?;
        s.end()
    }
}
