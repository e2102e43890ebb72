//! Batch front-end behind the `semipos` binary.
//!
//! Every command reads one JSON config, writes its artifacts into `--out`
//! and returns an exit code: `0` success, `2` invalid input, `3` solver
//! non-convergence, `4` certificate failure (artifacts are still written).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::barriers::{
    barrier_z, barrier_zh, hopf_constant, verify_barrier, BarrierKind, BarrierVerification, BarrierZ,
};
use crate::error::{invalid, Error, Result};
use crate::model::{validate_spec, ProblemSpec, SampleGrid, ValidationReport};
use crate::radialfem::{dp_norm, Discretization, MeshParams, RadialFunction, RadialMesh};
use crate::solvers::{certify, solve, sweep_a, Certificates, SolveReport, SolverParams, SweepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Solve,
    Sweep,
    Barrier,
    Verify,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "semipos", version, about = "Radial semipositone p-Laplacian solver and certificates")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides `solver.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Profile for `verify`; defaults to `config.profile`, then `<out>/profile.csv`.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

fn default_a_grid() -> Vec<f64> {
    vec![0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    #[serde(default = "default_a_grid")]
    pub a_grid: Vec<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { a_grid: default_a_grid() }
    }
}

fn default_r() -> f64 {
    1.0
}

fn default_samples() -> usize {
    20
}

/// Barrier request; `p`, `N` and `vartheta` fall back to the problem spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierOptions {
    #[serde(default = "default_kind")]
    pub kind: BarrierKind,
    pub p: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub vartheta: Option<f64>,
    #[serde(rename = "A")]
    pub a_level: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_kind() -> BarrierKind {
    BarrierKind::DecayTail
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub spec: Option<ProblemSpec>,
    #[serde(default)]
    pub mesh: MeshParams,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub sweep: SweepOptions,
    #[serde(default)]
    pub barrier: Option<BarrierOptions>,
    /// Profile certified by `verify`.
    #[serde(default)]
    pub profile: Option<PathBuf>,
}

impl RunConfig {
    /// Parses a full run config, or a bare problem spec with default options.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let bare = value.as_object().is_some_and(|o| o.contains_key("p") && !o.contains_key("spec"));
        if bare {
            let spec: ProblemSpec = serde_json::from_value(value)?;
            return Ok(Self { spec: Some(spec), ..Self::default() });
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn spec(&self) -> Result<&ProblemSpec> {
        let spec = self.spec.as_ref().ok_or_else(|| invalid("config has no problem spec"))?;
        spec.validate()?;
        Ok(spec)
    }

    fn mesh_for(&self, spec: &ProblemSpec) -> Result<Arc<RadialMesh>> {
        Ok(Arc::new(RadialMesh::build(&self.mesh, spec.n, spec.p)?))
    }
}

/// Contents of `report.json`.
#[derive(Serialize)]
struct SolveOutput<'a> {
    spec: &'a ProblemSpec,
    mesh: &'a MeshParams,
    validation: ValidationReport,
    #[serde(flatten)]
    report: &'a SolveReport,
}

#[derive(Serialize)]
struct AStarOutput<'a> {
    a_star_estimate: f64,
    first_failure: Option<f64>,
    all_positive: bool,
    #[serde(flatten)]
    sweep: &'a SweepReport,
}

#[derive(Serialize)]
struct BarrierOutput<'a> {
    barrier: &'a BarrierZ,
    #[serde(rename = "H")]
    h_level: Option<f64>,
    #[serde(rename = "C1")]
    hopf_constant: f64,
    verification: &'a BarrierVerification,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    spec: &'a ProblemSpec,
    energy: f64,
    dp_norm: f64,
    nehari_residual: f64,
    pass: bool,
    #[serde(flatten)]
    certificates: &'a Certificates,
}

/// Maps a library error to the exit-code taxonomy.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Geometry(_) | Error::PathCollapse(_) => EXIT_NOT_CONVERGED,
        _ => EXIT_INVALID,
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn prepare(cli: &Cli) -> Result<RunConfig> {
    let mut config = RunConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.solver.seed = seed;
    }
    config.solver.validate()?;
    fs::create_dir_all(&cli.out)?;
    Ok(config)
}

pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<i32> {
    let spec = config.spec()?;
    let mesh = config.mesh_for(spec)?;
    let validation = validate_spec(spec, &SampleGrid::default())?;
    let report = match solve(spec, &mesh, &config.solver) {
        Ok(r) => r,
        Err(e) => {
            log::error!("solve failed: {e}");
            return Ok(exit_code(&e));
        }
    };
    write_json(&out.join("report.json"), &SolveOutput { spec, mesh: &config.mesh, validation, report: &report })?;
    report.u.write_csv(BufWriter::new(File::create(out.join("profile.csv"))?))?;
    for f in &report.certificates.failures {
        log::warn!("{f}");
    }
    Ok(if report.certificates.positivity_failed() {
        EXIT_CERTIFICATE
    } else if !report.converged() {
        EXIT_NOT_CONVERGED
    } else if !report.certificates.all_pass() {
        EXIT_CERTIFICATE
    } else {
        EXIT_OK
    })
}

pub fn cmd_sweep(config: &RunConfig, out: &Path) -> Result<i32> {
    let spec = config.spec()?;
    let mesh = config.mesh_for(spec)?;
    let grid = &config.sweep.a_grid;
    if grid.is_empty() {
        return Err(invalid("a_grid is empty"));
    }
    let sweep = sweep_a(spec, &mesh, &config.solver, grid)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(out.join("sweep.csv"))?));
    w.write_record(["a", "energy", "norm", "min_u", "positive", "barrier_ok"])?;
    for row in &sweep.rows {
        w.serialize((row.a, row.energy, row.dp_norm, row.min_value, row.positive, row.barrier_ok))?;
    }
    w.flush()?;
    let all_positive = sweep.all_positive();
    write_json(
        &out.join("a_star.json"),
        &AStarOutput {
            a_star_estimate: sweep.a_star_estimate,
            first_failure: sweep.first_failure,
            all_positive,
            sweep: &sweep,
        },
    )?;
    // a grid of {0} alone cannot produce a positive estimate
    Ok(if sweep.a_star_estimate > 0.0 || all_positive { EXIT_OK } else { EXIT_CERTIFICATE })
}

pub fn cmd_barrier(config: &RunConfig, out: &Path) -> Result<i32> {
    let opts = config.barrier.as_ref().ok_or_else(|| invalid("config has no barrier section"))?;
    let spec = config.spec.as_ref();
    let p = opts.p.or(spec.map(|s| s.p)).ok_or_else(|| invalid("barrier needs p"))?;
    let n = opts.n.or(spec.map(|s| s.n)).ok_or_else(|| invalid("barrier needs N"))?;
    let z = match opts.kind {
        BarrierKind::DecayTail => {
            let vartheta =
                opts.vartheta.or(spec.map(|s| s.h.vartheta)).ok_or_else(|| invalid("barrier needs vartheta"))?;
            barrier_z(p, n, vartheta, opts.a_level, opts.r)?
        }
        BarrierKind::HarmonicTail => barrier_zh(p, n, opts.a_level, opts.r)?,
    };
    let mesh = RadialMesh::build(&config.mesh, n, p)?;
    let verification = verify_barrier(&z, opts.samples)?;
    write_json(
        &out.join("barrier.json"),
        &BarrierOutput {
            barrier: &z,
            h_level: z.h_level,
            hopf_constant: hopf_constant(p, n, opts.a_level, opts.r),
            verification: &verification,
        },
    )?;
    z.write_csv(&mesh, BufWriter::new(File::create(out.join("barrier.csv"))?))?;
    Ok(if verification.pass { EXIT_OK } else { EXIT_CERTIFICATE })
}

pub fn cmd_verify(config: &RunConfig, profile: &Path, out: &Path) -> Result<i32> {
    let spec = config.spec()?;
    let mesh = config.mesh_for(spec)?;
    let u = RadialFunction::read_csv(mesh.clone(), File::open(profile)?)?;
    let params = &config.solver;
    let eps = params.eps_moll * if u.sup_norm() > 0.0 { u.sup_norm() } else { 1.0 };
    let certificates = certify(&u, spec, &params.certificates, eps, params.tol_residual)?;
    let disc = Discretization::new(mesh, spec)?;
    let pass = certificates.all_pass();
    write_json(
        &out.join("verify.json"),
        &VerifyOutput {
            spec,
            energy: disc.energy(u.values()),
            dp_norm: dp_norm(&u, spec.p),
            nehari_residual: certificates.nehari_residual,
            pass,
            certificates: &certificates,
        },
    )?;
    for f in &certificates.failures {
        log::warn!("{f}");
    }
    Ok(if pass { EXIT_OK } else { EXIT_CERTIFICATE })
}

/// Runs one command end to end and returns its exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = prepare(cli).and_then(|config| match cli.command {
        Command::Solve => cmd_solve(&config, &cli.out),
        Command::Sweep => cmd_sweep(&config, &cli.out),
        Command::Barrier => cmd_barrier(&config, &cli.out),
        Command::Verify => {
            let profile =
                cli.profile.clone().or_else(|| config.profile.clone()).unwrap_or_else(|| cli.out.join("profile.csv"));
            cmd_verify(&config, &profile, &cli.out)
        }
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("semipos: {e}");
            exit_code(&e)
        }
    }
}
