use std::fmt::Write as _;
use std::path::PathBuf;

use singular_geom::catenary::{integrate, CatenaryState};
use singular_geom::ruled::{falsification_sweep, RuledError, SweepClass, SweepConfig, SweepFamily};
use singular_geom::surface::{singular_residual, unit_normal, SurfaceError};
use singular_geom::variational::{self, descend, HeightField, VariationalError};
use singular_geom::{Direction, Grid, Metric, Vec3};

use crate::config::{env_seed, log_resolved, write_file, CliResult, Failure};
use crate::surfaces::{self, build, metric_name, parse_grid, parse_metric, parse_vec, Builtin};
use crate::{CatenaryArgs, MeshArgs, ResidualArgs, SweepArgs, VariationalArgs};

fn seed_or_env(seed: Option<u64>) -> CliResult<u64> {
    Ok(match seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn catenary(mut a: CatenaryArgs) -> CliResult<()> {
    let alpha = *a.alpha.get_or_insert(1.0);
    let u0 = *a.u0.get_or_insert(0.0);
    let y0 = *a.y0.get_or_insert(1.0);
    let theta0 = *a.theta0.get_or_insert(0.0);
    let length = *a.length.get_or_insert(2.0);
    let step = *a.step.get_or_insert(1e-3);
    log_resolved("catenary", &a);
    if !(y0 > 0.0) {
        return Err(Failure::usage(format!("--y0 must be positive (start inside the halfspace), got {y0}")));
    }
    let path = integrate(CatenaryState::new(u0, y0, theta0), alpha, length, step).map_err(|e| Failure::usage(e.to_string()))?;
    emit(&a.out, &path.to_csv())?;
    let end = path.end();
    if a.out.is_some() {
        println!("rows={} s={} u={} y={} theta={}", path.states.len(), end.s, end.u, end.y, end.theta);
    }
    if path.halfspace_exit {
        return Err(Failure::new(
            Failure::HALFSPACE,
            format!("curve left the halfspace after s = {} (y = {:e}); partial polyline written", end.s, end.y),
        ));
    }
    Ok(())
}

pub fn residual(mut a: ResidualArgs) -> CliResult<()> {
    let kind: Builtin = a.surface.get_or_insert_with(|| "catenary-cylinder".into()).parse()?;
    let metric = parse_metric(a.metric.get_or_insert_with(|| metric_name(kind.default_metric()).into()))?;
    let alpha = *a.alpha.get_or_insert(1.0);
    let v = parse_vec(a.v.get_or_insert_with(|| "0,0,1".into()))?;
    let shape = parse_grid(a.grid.get_or_insert_with(|| "64".into()))?;
    log_resolved("residual", &a);
    let dir = Direction::normalized(metric, v).map_err(|e| Failure::usage(e.to_string()))?;

    let mut csv = String::from("s,t,residual\n");
    let mut worst = 0.0f64;
    if kind == Builtin::File {
        let input = a.input.as_ref().ok_or_else(|| Failure::usage("--surface file needs --input"))?;
        if metric != Metric::Euclidean || (dir.vector() - Vec3::E3).norm() > 1e-12 {
            return Err(Failure::usage("height-field input is evaluated with the euclid metric and v = 0,0,1"));
        }
        let text = std::fs::read_to_string(input).map_err(|e| Failure::usage(format!("cannot read {}: {e}", input.display())))?;
        let h = HeightField::from_csv(&text).map_err(|e| Failure::usage(e.to_string()))?;
        for (i, j, r) in variational::residual_field(&h, alpha).map_err(|e| Failure::usage(e.to_string()))? {
            let _ = writeln!(csv, "{},{},{}", h.x(i), h.y(j), r);
            worst = worst.max(r.abs());
        }
    } else {
        let surf = build(kind, alpha, v)?;
        let g = surfaces::grid(shape);
        let d = surf.domain;
        for s in Grid::axis(d.s0, d.s1, g.ns) {
            for t in Grid::axis(d.t0, d.t1, g.nt) {
                let r = singular_residual(metric, &surf, s, t, &dir, alpha).map_err(|e| match e {
                    SurfaceError::DegenerateMetric { .. } | SurfaceError::NotSpacelike { .. } => {
                        Failure::new(Failure::DEGENERATE, format!("cell (s, t) = ({s}, {t}): {e}"))
                    }
                    _ => Failure::usage(format!("cell (s, t) = ({s}, {t}): {e}")),
                })?;
                let _ = writeln!(csv, "{s},{t},{r}");
                worst = worst.max(r.abs());
            }
        }
    }
    if let Some(out) = &a.out {
        write_file(out, &csv)?;
    }
    println!("max_residual={worst:e}");
    Ok(())
}

fn parse_range(s: &str) -> CliResult<(f64, f64)> {
    let bad = || Failure::usage(format!("expected 'lo,hi', got '{s}'"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

pub fn sweep(mut a: SweepArgs) -> CliResult<()> {
    let metric = parse_metric(a.metric.get_or_insert_with(|| "euclid".into()))?;
    let class: SweepClass = a
        .class
        .get_or_insert_with(|| match SweepClass::default_for(metric) {
            SweepClass::Standard => "standard".into(),
            _ => "nondegenerate".into(),
        })
        .parse()
        .map_err(Failure::usage)?;
    let family = match a.family.get_or_insert_with(|| "random".into()).as_str() {
        "random" => SweepFamily::Random,
        "helicoid" => SweepFamily::Helicoid,
        other => return Err(Failure::usage(format!("unknown family '{other}' (random, helicoid)"))),
    };
    let n = *a.n.get_or_insert(100);
    let samples = *a.samples.get_or_insert(10);
    let alpha_range = parse_range(a.alpha_range.get_or_insert_with(|| "-3,3".into()))?;
    let seed = seed_or_env(a.seed)?;
    a.seed = Some(seed);
    log_resolved("sweep", &a);

    let cfg = SweepConfig { n_surfaces: n, n_s_samples: samples, seed, metric, class, alpha_range, family };
    let report = falsification_sweep(&cfg).map_err(|e| match e {
        RuledError::Config(_) => Failure::usage(e.to_string()),
        other => Failure::usage(format!("sweep failed: {other}")),
    })?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::usage(e.to_string()))? + "\n";
    emit(&a.out, &json)?;
    let summary = format!(
        "surfaces={} counterexamples={} excluded={} min_max_abs_coeff={:e}",
        report.per_surface.len(),
        report.counterexamples.len(),
        report.excluded.len(),
        report.min_max_abs_coeff().unwrap_or(f64::NAN)
    );
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    if !report.counterexamples.is_empty() {
        return Err(Failure::new(
            Failure::COUNTEREXAMPLE,
            format!("{} counterexample candidates: ids {:?}", report.counterexamples.len(), report.counterexamples),
        ));
    }
    Ok(())
}

pub fn export_mesh(mut a: MeshArgs) -> CliResult<()> {
    let kind: Builtin = a.surface.get_or_insert_with(|| "catenary-cylinder".into()).parse()?;
    let metric = parse_metric(a.metric.get_or_insert_with(|| metric_name(kind.default_metric()).into()))?;
    let alpha = *a.alpha.get_or_insert(1.0);
    let v = parse_vec(a.v.get_or_insert_with(|| "0,0,1".into()))?;
    let (ns, nt) = parse_grid(a.grid.get_or_insert_with(|| "50".into()))?;
    log_resolved("export-mesh", &a);
    let surf = build(kind, alpha, v)?;
    let d = surf.domain;
    let ss = Grid::axis(d.s0, d.s1, ns);
    let ts = Grid::axis(d.t0, d.t1, nt);

    let mut obj = String::new();
    let _ = writeln!(obj, "# singular-geom {} {}x{}", a.surface.as_deref().unwrap_or_default(), ns, nt);
    for &s in &ss {
        for &t in &ts {
            let p = surf.point(s, t).map_err(|e| Failure::usage(e.to_string()))?;
            let _ = writeln!(obj, "v {} {} {}", p.x, p.y, p.z);
        }
    }
    let idx = |i: usize, j: usize| i * nt + j + 1;
    for i in 0..ns - 1 {
        for j in 0..nt - 1 {
            // (i, j) → (i+1, j) → (i+1, j+1) turns along Xs then Xt, i.e.
            // counterclockwise about the Euclidean Xs × Xt
            let jet = surf.jet(0.5 * (ss[i] + ss[i + 1]), 0.5 * (ts[j] + ts[j + 1])).map_err(|e| Failure::usage(e.to_string()))?;
            let flip = match unit_normal(metric, &jet) {
                Ok(n) => jet.xs.cross(&jet.xt).dot(&n) < 0.0,
                Err(_) => false,
            };
            let (a0, b0, c0, d0) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            if flip {
                let _ = writeln!(obj, "f {a0} {c0} {b0}\nf {a0} {d0} {c0}");
            } else {
                let _ = writeln!(obj, "f {a0} {b0} {c0}\nf {a0} {c0} {d0}");
            }
        }
    }
    emit(&a.out, &obj)?;
    if a.out.is_some() {
        println!("vertices={} faces={}", ns * nt, 2 * (ns - 1) * (nt - 1));
    }
    Ok(())
}

/// Window of the α-catenary cylinder used by the variational demo.
const X_RANGE: (f64, f64) = (-0.5, 0.5);
const Y_RANGE: (f64, f64) = (0.0, 1.0);

pub fn variational(mut a: VariationalArgs) -> CliResult<()> {
    let alpha = *a.alpha.get_or_insert(1.0);
    let (nu, nv) = parse_grid(a.grid.get_or_insert_with(|| "33".into()))?;
    let steps = *a.steps.get_or_insert(1000);
    let init = a.init.get_or_insert_with(|| "noisy".into()).clone();
    let noise = *a.noise.get_or_insert(0.01);
    let seed = seed_or_env(a.seed)?;
    a.seed = Some(seed);
    let prefix = a.out_prefix.get_or_insert_with(|| "variational".into()).clone();
    if nu < 3 || nv < 3 {
        return Err(Failure::usage("--grid needs at least 3 nodes per axis"));
    }
    let target = HeightField::alpha_catenary(alpha, nu, nv, X_RANGE, Y_RANGE).map_err(|e| Failure::usage(e.to_string()))?;
    let h = target.dx().min(target.dy());
    let rate = *a.rate.get_or_insert(0.1 * h * h);
    log_resolved("variational", &a);

    let start = match init.as_str() {
        "flat" => target.flattened(),
        "catenary" => target.clone(),
        "noisy" => target.with_noise(noise, seed),
        other => return Err(Failure::usage(format!("unknown init '{other}' (flat, catenary, noisy)"))),
    };
    let run = descend(&start, alpha, steps, rate).map_err(|e| match e {
        VariationalError::Diverged { .. } => Failure::new(Failure::DIVERGED, e.to_string()),
        other => Failure::usage(other.to_string()),
    })?;
    write_file(&PathBuf::from(format!("{prefix}_field.csv")), &run.field.to_csv())?;
    write_file(&PathBuf::from(format!("{prefix}_trace.csv")), &run.trace_csv())?;
    let r0 = variational::max_residual(&start, alpha).map_err(|e| Failure::usage(e.to_string()))?;
    let r1 = variational::max_residual(&run.field, alpha).map_err(|e| Failure::usage(e.to_string()))?;
    println!(
        "energy_initial={} energy_final={} residual_initial={:e} residual_final={:e}",
        run.trace[0],
        run.trace[run.trace.len() - 1],
        r0,
        r1
    );
    Ok(())
}
