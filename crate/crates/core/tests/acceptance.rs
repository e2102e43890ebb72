//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semipositone::barriers::{
    barrier_z, barrier_zh, compare, hopf_constant, liouville_indicator, measured_level, shift_to_zero_at, BarrierZ,
};
use semipositone::model::{NonlinearitySpec, ProblemSpec};
use semipositone::nonlinearity::ShiftedNonlinearity;
use semipositone::radialfem::{
    check_critical, dp_norm, energy, grad_energy, nehari_residual, MeshParams, RadialFunction, RadialMesh,
};
use semipositone::solvers::{
    convergence_study, minimize, mountain_pass_solve, solve, sweep_a, SolveReport, SolverParams,
};

type Outcome = Result<String, String>;

fn reference_mesh(spec: &ProblemSpec) -> Arc<RadialMesh> {
    Arc::new(RadialMesh::build(&MeshParams::reference(), spec.n, spec.p).expect("reference mesh"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("runtime {elapsed:?} over {limit:?}"))
}

/// `-Δ_p v` by nested central differences of `v` alone.
fn neg_p_laplacian(v: &dyn Fn(f64) -> f64, p: f64, n: u32, rho: f64) -> f64 {
    let d = 1e-3 * rho;
    let slope = |x: f64| (v(x + d) - v(x - d)) / (2.0 * d);
    let flux = |x: f64| {
        let s = slope(x);
        x.powi(n as i32 - 1) * s.abs().powf(p - 2.0) * s
    };
    -(flux(rho + d) - flux(rho - d)) / (2.0 * d) / rho.powi(n as i32 - 1)
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (p, n, vartheta, a_level, r) in [(2.0, 3u32, 4.0, 3.0, 1.0), (3.0, 4, 5.0, 2.0, 1.0)] {
        let z = barrier_z(p, n, vartheta, a_level, r).map_err(|e| e.to_string())?;
        let nf = f64::from(n);
        let h_expected = a_level * (vartheta - nf) / nf * r.powf(vartheta);
        let h = z.h_level.ok_or("no H")?;
        ensure((h - h_expected).abs() <= 4.0 * f64::EPSILON * h_expected, || {
            format!("H = {h}, expected {h_expected}")
        })?;
        for k in 0..20 {
            let frac = (k as f64 + 0.5) / 20.0;
            let inner = r * (0.05 + 0.9 * frac);
            let outer = r * (1.05 + 9.0 * frac);
            let eval = |x: f64| z.eval(x);
            let li = neg_p_laplacian(&eval, p, n, inner);
            let lo = neg_p_laplacian(&eval, p, n, outer);
            let want = -h * outer.powf(-vartheta);
            worst = worst.max((li - a_level).abs() / a_level).max((lo - want).abs() / want.abs());
        }
        let (di, dt) = (z.interior_derivative(r), z.tail_derivative(r));
        let jump = (di - dt).abs() / di.abs();
        ensure(jump <= 1e-12, || format!("one-sided derivatives at r differ by {jump:e}"))?;
    }
    ensure(worst <= 1e-3, || format!("finite-difference relative error {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("worst FD error {worst:.2e}"))
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let c1 = hopf_constant(2.0, 3, 3.0, 1.0);
    ensure(c1 == 1.0, || format!("C1 = {c1}"))?;
    let zh = barrier_zh(2.0, 3, 3.0, 1.0).map_err(|e| e.to_string())?;
    ensure(zh.tail_coeff == 1.0, || format!("harmonic tail coefficient {}", zh.tail_coeff))?;
    let mut worst = 0.0f64;
    for (p, n, a_level, r) in [(2.0, 3u32, 3.0, 1.0), (3.0, 5, 2.0, 0.7), (1.5, 4, 0.4, 2.0)] {
        let base = hopf_constant(p, n, a_level, r);
        for c in [0.5f64, 2.0, 10.0] {
            let scaled = hopf_constant(p, n, c.powf(p - 1.0) * a_level, r);
            worst = worst.max((scaled - c * base).abs() / (c * base));
        }
    }
    ensure(worst <= 1e-12, || format!("homogeneity error {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("C1 = 1, homogeneity error {worst:.1e}"))
}

fn ac3() -> Outcome {
    let start = Instant::now();
    let (q, a) = (4.0, 0.3);
    let fa = ShiftedNonlinearity::new(NonlinearitySpec::power(q), a).map_err(|e| e.to_string())?;
    let f_a = |t: f64| {
        if t > 0.0 {
            t.powf(q - 1.0) - a
        } else if t == 0.0 {
            -a
        } else {
            0.0
        }
    };
    let axis: Vec<f64> = (0..100).map(|k| if k == 50 { 0.0 } else { (k as f64 - 50.0) / 20.0 }).collect();
    let mut branches = [0usize; 4];
    for &t in &axis {
        for &s in &axis {
            let want = if t > 0.0 {
                branches[0] += 1;
                -f_a(t) * s
            } else if t == 0.0 && s > 0.0 {
                branches[1] += 1;
                a * s
            } else if t == 0.0 {
                branches[2] += 1;
                0.0
            } else {
                branches[3] += 1;
                0.0
            };
            let got = fa.clarke_neg_primitive(t, s);
            ensure(got == want, || format!("(t, s) = ({t}, {s}): {got} != {want}"))?;
        }
        let (plus, minus) = (fa.clarke_neg_primitive(t, t), fa.clarke_neg_primitive(t, -t));
        ensure(plus == -f_a(t) * t && minus == f_a(t) * t, || format!("±t identity fails at t = {t}"))?;
    }
    ensure(branches.iter().all(|&b| b > 0), || format!("branch coverage {branches:?}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} grid points, branch counts {branches:?}", axis.len() * axis.len()))
}

fn ac4() -> Outcome {
    let start = Instant::now();
    let spec = ProblemSpec::reference_superlinear(0.05);
    let mesh = reference_mesh(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let (c, s, d) = (rng.gen_range(0.2..3.0), rng.gen_range(0.5..8.0), rng.gen_range(0.05..1.0));
        let sign = if k % 4 == 3 { -1.0 } else { 1.0 };
        let u = RadialFunction::from_fn(mesh.clone(), |r| sign * (c * (-(r / s).powi(2)).exp() + d / (1.0 + r)))
            .map_err(|e| e.to_string())?;
        let g = grad_energy(&u, &spec, 1e-9).map_err(|e| e.to_string())?;
        let mut fd = vec![0.0; g.len()];
        for (i, slot) in fd.iter_mut().enumerate() {
            let h = 1e-5 * u.values()[i].abs().max(1e-2);
            let mut plus = u.values().to_vec();
            let mut minus = plus.clone();
            plus[i] += h;
            minus[i] -= h;
            let ep = energy(&u.with_values(plus).unwrap(), &spec).unwrap();
            let em = energy(&u.with_values(minus).unwrap(), &spec).unwrap();
            *slot = (ep - em) / (2.0 * h);
        }
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let err = g.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(err / scale);
    }
    ensure(worst <= 1e-6, || format!("gradient relative error {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("100 profiles, worst relative error {worst:.2e}"))
}

fn energy_on(params: &MeshParams, spec: &ProblemSpec) -> Result<f64, String> {
    let mesh = match RadialMesh::build(params, spec.n, spec.p) {
        Ok(m) => m,
        Err(semipositone::Error::MeshGrowth { suggested, .. }) => {
            RadialMesh::build(&MeshParams { growth: suggested, ..params.clone() }, spec.n, spec.p)
                .map_err(|e| e.to_string())?
        }
        Err(e) => return Err(e.to_string()),
    };
    let r = mountain_pass_solve(spec, &Arc::new(mesh), &SolverParams::default()).map_err(|e| e.to_string())?;
    ensure(r.converged(), || format!("refined solve {:?}", r.status))?;
    Ok(r.energy)
}

fn ac5(keep: &mut Vec<SolveReport>) -> Outcome {
    let start = Instant::now();
    let spec = ProblemSpec::reference_superlinear(0.0);
    let mesh = reference_mesh(&spec);
    let r = mountain_pass_solve(&spec, &mesh, &SolverParams::default()).map_err(|e| e.to_string())?;
    let c = &r.certificates;
    ensure(r.converged(), || format!("status {:?}", r.status))?;
    ensure(c.criticality.max_violation <= 1e-8, || format!("violation {:e}", c.criticality.max_violation))?;
    ensure(r.energy > 0.0, || format!("energy {}", r.energy))?;
    ensure(c.min_value >= -1e-8, || format!("min value {:e}", c.min_value))?;
    let norm_p = dp_norm(&r.u, spec.p).powf(spec.p);
    let identity = nehari_residual(&r.u, &spec).map_err(|e| e.to_string())?;
    ensure(identity.abs() <= 1e-6 * (1.0 + norm_p), || format!("identity residual {identity:e}"))?;
    let slope = c.decay_slope.ok_or("no decay slope")?;
    ensure((slope + 1.0).abs() <= 0.15, || format!("decay slope {slope}"))?;
    let fine = energy_on(&MeshParams { m: 800, ..MeshParams::reference() }, &spec)?;
    let long = energy_on(&MeshParams { r_max: 120.0, ..MeshParams::reference() }, &spec)?;
    let (dm, dr) = ((fine - r.energy).abs() / r.energy, (long - r.energy).abs() / r.energy);
    ensure(dm <= 0.02 && dr <= 0.02, || format!("energy changes {dm:e} (mesh), {dr:e} (R_max)"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    let msg = format!(
        "energy {:.6}, violation {:.1e}, slope {slope:.4}, refinement changes {dm:.1e}/{dr:.1e}, {:?}",
        r.energy,
        c.criticality.max_violation,
        start.elapsed()
    );
    keep.push(r);
    Ok(msg)
}

fn ac6(keep: &mut Vec<SolveReport>) -> Outcome {
    let start = Instant::now();
    let spec = ProblemSpec::reference_superlinear(0.0);
    let mesh = reference_mesh(&spec);
    let params = SolverParams::default();
    let sweep = sweep_a(&spec, &mesh, &params, &[0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0]).map_err(|e| e.to_string())?;
    let a_star = sweep.a_star_estimate;
    ensure(a_star > 0.0, || format!("a_star_estimate = {a_star}"))?;
    let (r, big_r) = (1.0, 30.0);
    for row in sweep.rows.iter().filter(|row| row.a <= a_star) {
        let instance = spec.with_a(row.a);
        let report = solve(&instance, &mesh, &params).map_err(|e| e.to_string())?;
        let a_level = measured_level(&report.u, &instance, r);
        ensure(a_level > 0.0, || format!("a = {}: A = {a_level}", row.a))?;
        let z: BarrierZ =
            barrier_z(instance.p, instance.n, instance.h.vartheta, a_level, r).map_err(|e| e.to_string())?;
        let zr = shift_to_zero_at(&z, big_r).map_err(|e| e.to_string())?;
        let (ok, margin) = compare(&report.u, &zr, big_r).map_err(|e| e.to_string())?;
        ensure(ok, || format!("a = {}: comparison margin {margin:e}", row.a))?;
        keep.push(report);
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("a_star_estimate = {a_star}, {:?}", start.elapsed()))
}

fn ac7(keep: &mut Vec<SolveReport>) -> Outcome {
    let start = Instant::now();
    let spec = ProblemSpec::reference_sublinear(0.0);
    let mesh = reference_mesh(&spec);
    let mut energies = Vec::new();
    for seed in 0..5 {
        let r = minimize(&spec, &mesh, &SolverParams { seed, ..SolverParams::default() }).map_err(|e| e.to_string())?;
        ensure(r.converged(), || format!("seed {seed}: {:?}", r.status))?;
        ensure(r.energy < 0.0, || format!("seed {seed}: energy {}", r.energy))?;
        ensure(r.min_value() >= -1e-8, || format!("seed {seed}: min {:e}", r.min_value()))?;
        ensure(r.certificates.positivity.ok, || format!("seed {seed}: {:?}", r.certificates.positivity.reason))?;
        energies.push(r.energy);
        if seed == 0 {
            keep.push(r);
        }
    }
    let spread = energies.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e))
        - energies.iter().fold(f64::INFINITY, |m, &e| m.min(e));
    ensure(spread <= 1e-6, || format!("seed energy spread {spread:e}"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("energy {:.10}, seed spread {spread:.1e}", energies[0]))
}

fn ac8() -> Outcome {
    let start = Instant::now();
    let spec = ProblemSpec::reference_superlinear(0.0);
    let mesh = reference_mesh(&spec);
    let rows = convergence_study(&spec, &mesh, &SolverParams::default(), &[1e-2, 1e-3, 1e-4, 0.0])
        .map_err(|e| e.to_string())?;
    let d: Vec<f64> = rows.iter().map(|r| r.sup_distance).collect();
    ensure(rows.iter().all(|r| r.converged), || "a solve did not converge".into())?;
    ensure(d.windows(2).all(|w| w[1] < w[0]), || format!("distances {d:?}"))?;
    within(start.elapsed(), Duration::from_secs(180))?;
    Ok(format!("sup distances {d:?}", d = d))
}

fn ac9() -> Outcome {
    for spec in [ProblemSpec::reference_superlinear(0.0), ProblemSpec::reference_sublinear(0.0)] {
        let zero = RadialFunction::zeros(reference_mesh(&spec));
        for a in [0.0, 1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3] {
            let cert = check_critical(&zero, &spec.with_a(a)).map_err(|e| e.to_string())?;
            ensure(cert.max_violation == 0.0, || {
                format!("{:?}, a = {a}: violation {:e}", spec.regime, cert.max_violation)
            })?;
        }
    }
    Ok("u = 0 has zero violation for 7 values of a in both regimes".into())
}

fn ac10(solutions: &[SolveReport]) -> Outcome {
    ensure(!solutions.is_empty(), || "no converged positive solutions collected".into())?;
    let window = (10.0, 40.0);
    let mut worst = f64::INFINITY;
    for s in solutions.iter().filter(|s| s.converged() && s.positive()) {
        let spec = ProblemSpec { a: s.a, ..reference_for(s) };
        let a_level = measured_level(&s.u, &spec, 1.0);
        let c1 = hopf_constant(spec.p, spec.n, a_level, 1.0);
        let ratio = liouville_indicator(&s.u, window) / c1;
        worst = worst.min(ratio);
    }
    ensure(worst >= 0.8, || format!("indicator / C1 = {worst}"))?;
    let zero = RadialFunction::zeros(solutions[0].u.mesh_arc().clone());
    let z = liouville_indicator(&zero, window);
    ensure(z == 0.0, || format!("indicator of zero = {z}"))?;
    Ok(format!("{} solutions, smallest indicator / C1 = {worst:.3}", solutions.len()))
}

fn reference_for(s: &SolveReport) -> ProblemSpec {
    match s.regime {
        semipositone::model::Regime::Superlinear => ProblemSpec::reference_superlinear(s.a),
        semipositone::model::Regime::Sublinear => ProblemSpec::reference_sublinear(s.a),
    }
}

fn main() {
    let mut solutions = Vec::new();
    let results = vec![
        ("AC1 barrier oracle", ac1()),
        ("AC2 Hopf constant", ac2()),
        ("AC3 Clarke calculus", ac3()),
        ("AC4 gradient consistency", ac4()),
        ("AC5 superlinear solve", ac5(&mut solutions)),
        ("AC6 positivity threshold", ac6(&mut solutions)),
        ("AC7 sublinear solve", ac7(&mut solutions)),
        ("AC8 convergence study", ac8()),
        ("AC9 nonsmooth critical zero", ac9()),
        ("AC10 Liouville indicator", ac10(&solutions)),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
