use std::path::Path;
use std::process::Command;

fn fracrod(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fracrod"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn zener_step_with_oracle_check() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "model = zener alpha=0.5 a=0.2 b=0.6\nkappa = 1\nnx = 3\ntmax = 4\nnt = 5\noracle_check = true\n",
    )
    .unwrap();
    let out = fracrod(dir.path(), &["run.cfg", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let results = std::fs::read_to_string(dir.path().join("o/results.csv")).unwrap();
    assert_eq!(results.lines().next().unwrap(), "x,t,quantity,value,error_estimate,flags");
    assert_eq!(results.lines().count(), 1 + 3 * 5 * 2);
    let diag = std::fs::read_to_string(dir.path().join("o/diagnostics.txt")).unwrap();
    assert!(diag.contains("max |eval - oracle|"));
    assert!(diag.contains("gate 1e-3: pass"));
    assert!(diag.contains("[cut-side calibration]"));
    assert!(diag.contains("A1 ["));
    assert!(dir.path().join("o/modes.csv").exists());
}

#[test]
fn deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--model", "zener alpha=0.4 a=0.3 b=0.5", "--nx", "2", "--nt", "3", "--tmax", "2"];
    let a = fracrod(dir.path(), &[&args[..], &["--out", "a"]].concat());
    let b = fracrod(dir.path(), &[&args[..], &["--out", "b"]].concat());
    assert!(a.status.success() && b.status.success());
    for f in ["results.csv", "modes.csv", "diagnostics.txt"] {
        let x = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn config_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracrod(dir.path(), &["--model", "zener alpha=0.5 a=0.7 b=0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("thermodynamic restriction"));

    std::fs::write(dir.path().join("bad.cfg"), "kappa = 1\nnt = many\n").unwrap();
    let out = fracrod(dir.path(), &["bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2"));
}

#[test]
fn strict_accuracy_gate() {
    let dir = tempfile::tempdir().unwrap();
    // the residue tail bound at t = 0 with n_max = 8 cannot meet 1e-10
    let out = fracrod(
        dir.path(),
        &["--model", "zener alpha=0.5 a=0.2 b=0.6", "--n-max", "8", "--tol", "1e-10", "--nx", "2", "--nt", "2", "--strict"],
    );
    assert_eq!(out.status.code(), Some(3));
    let out = fracrod(
        dir.path(),
        &["--model", "zener alpha=0.5 a=0.2 b=0.6", "--n-max", "8", "--tol", "1e-10", "--nx", "2", "--nt", "2"],
    );
    assert_eq!(out.status.code(), Some(0));
    let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(results.contains(",accuracy"));
}

#[test]
fn mode_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracrod(dir.path(), &["--n-max", "60", "--dump-modes", "--out", "m"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("m/modes.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(51).unwrap().split(',').collect();
    assert_eq!(row[0], "50");
    assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    let ratio: f64 = row[8].parse().unwrap();
    assert!((0.999..=1.001).contains(&ratio));

    let out = fracrod(dir.path(), &["--model", "zener alpha=0.5 a=0.2 b=0.6", "--dump-modes", "--out", "z"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("z/modes.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let residual: f64 = line.split(',').nth(7).unwrap().parse().unwrap();
        assert!(residual < 1e-9);
    }
}

#[test]
fn tabulated_forcing_from_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("force.csv"), "0,0\n0.5,1\n3,1\n").unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "forcing = tabulated file=force.csv\nx = 1\nt = 0.5, 1.0\noutputs = displacement\n",
    )
    .unwrap();
    let out = fracrod(dir.path(), &["run.cfg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 3);
}

#[test]
fn hilfer_needs_override() {
    let dir = tempfile::tempdir().unwrap();
    let model = "hilfer a=0.3 alpha=0.2 b0=1 b1=0.5 b2=0.2 beta0=0.3 beta1=0.6 beta2=0.9";
    let out = fracrod(dir.path(), &["--model", model, "--dump-modes"]);
    assert_eq!(out.status.code(), Some(2));
}
