use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_semiclassical");

/// Small grid on the preset domain so each run takes well under a second.
const SMALL: &str = "grid.n_x = 32\ngrid.n_k = 64\ntime.dt = 0.00390625\n";

fn run(kind: &str, preset: &str, overrides: &str, out: &Path) -> std::process::Output {
    let cfg = out.with_extension("toml");
    fs::write(&cfg, overrides).unwrap();
    Command::new(BIN)
        .args([kind, "--preset", preset, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .args(["--threads", "2"])
        .output()
        .unwrap()
}

fn manifest(out: &Path) -> String {
    fs::read_to_string(out.join("manifest.txt")).expect("manifest present")
}

fn manifest_value(out: &Path, key: &str) -> String {
    let m = manifest(out);
    m.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
        .unwrap_or_else(|| panic!("{key} missing from manifest:\n{m}"))
}

fn assert_manifest_lists_every_file(out: &Path) {
    let m = manifest(out);
    for entry in fs::read_dir(out).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name != "manifest.txt" {
            assert!(m.contains(&format!("file = {name}")), "{name} not in manifest");
        }
    }
}

#[test]
fn sweep_epsilon_with_desk_preset_emits_err_curve_with_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = run("sweep-epsilon", "desk", "", &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = fs::read_to_string(out.join("err_curve.csv")).unwrap();
    assert!(!curve.contains('\r'));
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "eps,err");
    let rows: Vec<(f64, f64)> = lines[1..]
        .iter()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (e, r) = l.split_once(',').unwrap();
            (e.parse().unwrap(), r.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    let pi = std::f64::consts::PI;
    for (n, (e, r)) in rows.iter().enumerate() {
        assert_eq!(*e, 1.0 / (pi * 2f64.powi(n as i32 + 3)));
        assert!(*r > 0.0 && r.is_finite());
    }
    let slope_line = lines.iter().find(|l| l.starts_with("# slope = ")).expect("slope footer");
    let slope: f64 = slope_line.trim_start_matches("# slope = ").parse().unwrap();
    // ordinary least squares of log2 err on log2 eps, recomputed from the rows
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().map(|(e, r)| (e.log2(), r.log2())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    assert!((slope - sxy / sxx).abs() < 1e-12);
    assert_eq!(manifest_value(&out, "result.slope"), format!("{slope:.16e}"));
    assert_manifest_lists_every_file(&out);
}

#[test]
fn representative_with_zero_final_amplitude_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["wigner", "liouville", "schrodinger"] {
        let out = dir.path().join(kind);
        let o = run("representative", "desk", &format!("{SMALL}final.amplitude = 0.0\nrepresentative.kind = \"{kind}\"\n"), &out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(out.join("representative.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,re,im"));
        let mut rows = 0;
        for l in lines {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!((v[1], v[2]), (0.0, 0.0), "{kind}");
            rows += 1;
        }
        assert_eq!(rows, 32);
        assert_manifest_lists_every_file(&out);
    }
}

#[test]
fn identity_check_stores_and_prints_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("identity");
    let o = run("identity-check", "identity", "", &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stored: f64 = manifest_value(&out, "result.residual").parse().unwrap();
    assert!(stored < 1e-6, "residual {stored}");
    let printed = String::from_utf8_lossy(&o.stdout);
    assert!(printed.contains(&format!("residual = {stored:.16e}")), "{printed}");
    assert!(out.join("identity.csv").exists());
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = format!("{SMALL}svd.count = 3\nsvd.angle_ranks = [1]\nsvd.singular_indices = [2]\n");
    for out in [&a, &b] {
        let o = run("svd-study", "desk", &cfg, out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_manifest_lists_every_file(out);
    }
    let strip = |p: &Path| -> String {
        manifest(p).lines().filter(|l| !l.starts_with("wall_clock_seconds")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        if name != "manifest.txt" {
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
        }
    }
    assert!(a.join("matrix_liouville.index.csv").exists());
}

#[test]
fn forward_runs_write_fields_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["forward-wigner", "forward-liouville", "forward-schrodinger"] {
        let out = dir.path().join(kind);
        let o = run(kind, "desk", SMALL, &out);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join("final.csv").exists());
        assert_eq!(manifest_value(&out, "kind"), kind);
        assert_eq!(manifest_value(&out, "decision.boundary.k"), "periodic");
        assert_manifest_lists_every_file(&out);
    }
}

#[test]
fn reconstruct_recovers_a_bounded_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec");
    let o = run("reconstruct", "desk", &format!("{SMALL}representative.kind = \"liouville\"\nsvd.count = 5\n"), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let residual: f64 = manifest_value(&out, "result.residual").parse().unwrap();
    assert!(residual.is_finite());
    assert!(out.join("reconstruction.csv").exists());
}

#[test]
fn missing_block_exits_with_config_code_and_error_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    let o = run("forward-liouville", "desk", "bogus.key = 1.0\n", &out);
    assert_eq!(o.status.code(), Some(2));
    let err = fs::read_to_string(out.join("error.txt")).unwrap();
    assert!(err.contains("exit_code = 2"));
    assert!(err.contains("unknown key 'bogus.key'"));
}

#[test]
fn oracle_cap_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cap");
    let o = run("representative", "desk", "time.t_final = 0.00390625\nrepresentative.oracle = true\n", &out);
    assert_eq!(o.status.code(), Some(6), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out.join("error.txt")).unwrap().contains("category = oracle-cap"));
}

#[test]
fn cfl_violation_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cfl");
    let o = run("forward-wigner", "desk", "grid.k_min = -1000.0\ngrid.k_max = 1000.0\n", &out);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}
