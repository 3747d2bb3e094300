use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_singular-geom"));
    c.env_remove("SINGULAR_GEOM_SEED");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
    assert_eq!(code(&run(dir.path(), &["--version"])), 0);
    assert_eq!(code(&run(dir.path(), &["sweep", "--help"])), 0);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&run(dir.path(), &["catenary", "--alpha", "one"])), 1);
}

#[test]
fn catenary_polyline() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["catenary", "--alpha", "1", "--y0", "1", "--theta0", "0", "--length", "2", "--step", "0.001", "--out", "c.csv"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,u,y,theta"));
    assert_eq!(lines.count(), 2001);
    // the resolved configuration is logged
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"step\":0.001"));
}

#[test]
fn zero_alpha_gives_a_straight_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["catenary", "--alpha", "0", "--theta0", "0.3", "--length", "1", "--step", "0.1", "--out", "l.csv"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("l.csv")).unwrap();
    for row in text.lines().skip(1) {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[3] - 0.3).abs() < 1e-15);
        assert!((f[2] - 1.0 - f[0] * 0.3f64.sin()).abs() < 1e-12);
    }
}

#[test]
fn catenary_halfspace_contract() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["catenary", "--y0", "-1"])), 1);
    let o = run(dir.path(), &["catenary", "--alpha", "-1", "--length", "3", "--out", "p.csv"]);
    assert_eq!(code(&o), 2);
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(text.starts_with("s,u,y,theta,flag\n"));
    assert!(text.trim_end().ends_with(",1"));
}

#[test]
fn residual_fields() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["residual", "--surface", "catenary-cylinder", "--alpha", "1", "--grid", "50", "--out", "r.csv"]);
    assert_eq!(code(&o), 0);
    assert!(field(&stdout(&o), "max_residual") <= 1e-5);
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(text.starts_with("s,t,residual\n"));
    assert_eq!(text.lines().count(), 1 + 2500);

    let o = run(dir.path(), &["residual", "--surface", "helicoid", "--alpha", "1", "--grid", "20"]);
    assert_eq!(code(&o), 0);
    assert!(field(&stdout(&o), "max_residual") > 1e-2);

    let o = run(dir.path(), &["residual", "--surface", "sphere", "--metric", "lorentz"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cell (s, t)"));

    assert_eq!(code(&run(dir.path(), &["residual", "--surface", "torus"])), 1);
    assert_eq!(code(&run(dir.path(), &["residual", "--v", "0,0"])), 1);
}

#[test]
fn residual_of_a_height_field_file() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["variational", "--init", "catenary", "--steps", "0", "--out-prefix", "hf"])), 0);
    let o = run(dir.path(), &["residual", "--surface", "file", "--input", "hf_field.csv", "--out", "r.csv"]);
    assert_eq!(code(&o), 0);
    assert!(field(&stdout(&o), "max_residual") < 1e-3);
    assert_eq!(code(&run(dir.path(), &["residual", "--surface", "file"])), 1);
}

#[test]
fn sweep_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["sweep", "--metric", "euclid", "--n", "100", "--samples", "10", "--seed", "42", "--out", "s.json"]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(report["per_surface"].as_array().unwrap().len(), 100);
    assert!(report["counterexamples"].as_array().unwrap().is_empty());

    assert_eq!(code(&run(dir.path(), &["sweep", "--metric", "lorentz", "--class", "lightlike", "--n", "50", "--seed", "7", "--out", "l.json"])), 0);
    assert_eq!(code(&run(dir.path(), &["sweep", "--n", "0"])), 1);
    assert_eq!(code(&run(dir.path(), &["sweep", "--metric", "euclid", "--class", "lightlike"])), 1);
    // minimal helicoids are genuine solutions and must raise the alarm
    let o = run(dir.path(), &["sweep", "--family", "helicoid", "--alpha-range", "0,0", "--n", "4", "--out", "h.json"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn mesh_export() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["export-mesh", "--surface", "plane", "--grid", "2", "--out", "p.obj"])), 0);
    let text = std::fs::read_to_string(dir.path().join("p.obj")).unwrap();
    let verts: Vec<[f64; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let f: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
            [f[0], f[1], f[2]]
        })
        .collect();
    let faces: Vec<[usize; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("f "))
        .map(|l| {
            let f: Vec<usize> = l.split(' ').map(|x| x.parse().unwrap()).collect();
            [f[0], f[1], f[2]]
        })
        .collect();
    assert_eq!((verts.len(), faces.len()), (4, 2));
    // plane X = (s, t, 1) has N = +e3: every face turns counterclockwise from above
    for f in faces {
        let [a, b, c] = f.map(|k| verts[k - 1]);
        let z = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        assert!(z > 0.0);
    }

    let o = run(dir.path(), &["export-mesh", "--surface", "catenary-cylinder", "--grid", "50", "--out", "m.obj"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("m.obj")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2500);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 4802);

    assert_eq!(code(&run(dir.path(), &["export-mesh", "--out", "missing-dir/m.obj"])), 1);
}

fn trace(dir: &Path, prefix: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(dir.join(format!("{prefix}_trace.csv"))).unwrap();
    assert!(text.starts_with("step,energy\n"));
    text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

#[test]
fn variational_demos() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["variational", "--init", "catenary", "--steps", "100", "--out-prefix", "c"])), 0);
    let t = trace(dir.path(), "c");
    assert_eq!(t.len(), 101);
    assert!((t[0] - t[100]).abs() <= 1e-8);

    assert_eq!(code(&run(dir.path(), &["variational", "--init", "flat", "--steps", "5000", "--rate", "5e-5", "--out-prefix", "f"])), 0);
    let t = trace(dir.path(), "f");
    assert!(t.windows(2).all(|w| w[1] <= w[0]));
    assert!(t[5000] < t[0]);

    assert_eq!(code(&run(dir.path(), &["variational", "--rate", "1e9", "--out-prefix", "d"])), 5);
    assert_eq!(code(&run(dir.path(), &["variational", "--init", "bumpy"])), 1);
}

#[test]
fn config_file_and_seed_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"alpha": 0, "length": 1, "step": 0.5, "out": "from-config.csv"}"#).unwrap();
    let o = run(dir.path(), &["--config", "cfg.json", "catenary", "--step", "0.25"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("from-config.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 5);

    std::fs::write(dir.path().join("bad.json"), r#"{"alhpa": 1}"#).unwrap();
    assert_eq!(code(&run(dir.path(), &["--config", "bad.json", "catenary"])), 1);
    assert_eq!(code(&run(dir.path(), &["--config", "nope.json", "catenary"])), 1);

    let with_env = |seed: &str, out: &str| {
        let o = bin().current_dir(dir.path()).env("SINGULAR_GEOM_SEED", seed).args(["sweep", "--n", "6", "--out", out]).output().unwrap();
        assert_eq!(code(&o), 0);
        std::fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = with_env("11", "a.json");
    let b = run(dir.path(), &["sweep", "--n", "6", "--seed", "11", "--out", "b.json"]);
    assert_eq!(code(&b), 0);
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.json")).unwrap());
    assert_ne!(a, with_env("12", "c.json"));
    let o = bin().current_dir(dir.path()).env("SINGULAR_GEOM_SEED", "x").args(["sweep", "--n", "2"]).output().unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: [&[&str]; 5] = [
        &["catenary", "--alpha", "2", "--out", "out"],
        &["residual", "--surface", "helicoid", "--grid", "12", "--out", "out"],
        &["sweep", "--metric", "lorentz", "--n", "8", "--seed", "3", "--out", "out"],
        &["export-mesh", "--surface", "sphere", "--grid", "9", "--out", "out"],
        &["variational", "--steps", "50", "--seed", "5", "--out-prefix", "out"],
    ];
    for args in runs {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (o1, o2) = (run(d1.path(), args), run(d2.path(), args));
        assert_eq!(code(&o1), 0, "{args:?}");
        assert_eq!(o1.stdout, o2.stdout);
        let names = ["out", "out_field.csv", "out_trace.csv"];
        for n in names {
            let (p1, p2) = (d1.path().join(n), d2.path().join(n));
            if p1.exists() {
                assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap(), "{args:?} {n}");
            }
        }
    }
}
