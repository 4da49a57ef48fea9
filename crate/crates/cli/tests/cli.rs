use std::path::Path;
use std::process::{Command, Output};

fn kksym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kksym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn max_rel_spread(rows: &[Vec<f64>], col: usize) -> f64 {
    let v0 = rows[0][col];
    let scale = v0.abs().max(1e-300);
    rows.iter()
        .map(|r| (r[col] - v0).abs() / scale)
        .fold(0.0, f64::max)
}

#[test]
fn verify_all_passes_with_enough_checks() {
    let o = kksym(&["verify", "--all", "--seed", "42"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let checks = stdout(&o).lines().filter(|l| l.starts_with('[')).count();
    assert!(checks >= 40, "{checks} checks");
    assert!(!stdout(&o).contains("[FAIL]"));
}

#[test]
fn verify_symmetries_runs_only_that_block() {
    let out = stdout(&kksym(&["verify", "--symmetries"]));
    let checks: Vec<&str> = out.lines().filter(|l| l.starts_with('[')).collect();
    assert_eq!(checks.len(), 28);
    assert_eq!(
        checks.iter().filter(|l| l.contains("commutator [")).count(),
        21
    );
    assert!(checks.iter().all(|l| l.contains(" symmetry ")));
}

#[test]
fn corrupted_structure_constants_fail_verification() {
    let o = kksym(&["verify", "--all", "--inject-fault", "structure-constants"]);
    assert_eq!(code(&o), 1);
    let fails: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("[FAIL]"))
        .map(str::to_string)
        .collect();
    assert!(fails
        .iter()
        .any(|l| l.contains("Jacobi identity (integer)")));
    assert!(fails.iter().any(|l| l.contains("commutator [X6, X7]")));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(code(&kksym(&["verify", "--nonsense"])), 2);
    assert_eq!(
        code(&kksym(&["classify", "0", "0", "0", "0", "0", "0", "0"])),
        2
    );
    assert_eq!(code(&kksym(&["classify", "1", "2", "3"])), 2);
    assert_eq!(
        code(&kksym(&["classify", "1", "0", "0", "0", "0", "0", "NaN"])),
        2
    );
    assert_eq!(code(&kksym(&["geodesic", "--r", "1.2"])), 2);
    assert_eq!(code(&kksym(&["geodesic", "--q", "5"])), 2);
    assert_eq!(code(&kksym(&["adjoint", "8", "0.1"])), 2);
    assert_eq!(code(&kksym(&[])), 2);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&kksym(&["--help"])), 0);
    assert_eq!(code(&kksym(&["--version"])), 0);
}

#[test]
fn geodesic_csv_schema_and_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let o = kksym(&[
        "geodesic",
        "--samples",
        "512",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("termination: reached_s_end"));
    assert_eq!(stdout(&o).matches("max relative drift").count(), 6);

    let (header, rows) = read_csv(&path);
    assert_eq!(
        header.join(","),
        "s,t,r,theta,phi,psi,tdot,rdot,thetadot,phidot,psidot,L,T1,T2,T3,T4,T5,T6"
    );
    assert_eq!(rows.len(), 513);
    assert!(rows.iter().all(|r| r.len() == 18));
    assert!(max_rel_spread(&rows, column(&header, "L")) <= 1e-8);
    for t in ["T1", "T2", "T3", "T4", "T5", "T6"] {
        assert!(max_rel_spread(&rows, column(&header, t)) <= 1e-6, "{t}");
    }
}

#[test]
fn radial_infall_keeps_energy_and_zero_phi_momentum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("infall.csv");
    let o = kksym(&[
        "geodesic",
        "--r",
        "6",
        "--theta",
        "1.2",
        "--tdot",
        "1.2",
        "--rdot",
        "-0.5",
        "--thetadot",
        "0",
        "--phidot",
        "0",
        "--psidot",
        "0",
        "--s-end",
        "4",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&path);
    let t3 = column(&header, "T3");
    assert!(rows.iter().all(|r| r[t3] == 0.0));
    // the last row may sit on the horizon guard, where the energy is ill-conditioned
    let interior = &rows[..rows.len() - 1];
    assert!(max_rel_spread(interior, column(&header, "T2")) <= 1e-6);
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let a = kksym(&["geodesic", "--samples", "64"]);
    let b = kksym(&["geodesic", "--samples", "64"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 66);
}

#[test]
fn seventeen_significant_digits_round_trip() {
    let out = stdout(&kksym(&["geodesic", "--samples", "8"]));
    for field in out.lines().nth(3).unwrap().split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
        let v: f64 = field.parse().unwrap();
        assert_eq!(format!("{v:.16e}"), field);
    }
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small run\nM = 1.0\nq = 0.3\nsamples = 16\ns_end = 2\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();

    let out = stdout(&kksym(&["geodesic", "--config", c]));
    assert_eq!(out.lines().count(), 18);
    let out = stdout(&kksym(&["geodesic", "--config", c, "--samples", "4"]));
    assert_eq!(out.lines().count(), 6);

    let head = stdout(&kksym(&[
        "verify",
        "--symmetries",
        "--config",
        c,
        "--q",
        "0.4",
    ]));
    assert!(
        head.starts_with("kksym verify  M = 1  q = 0.4  r_inf = 10  seed = 0"),
        "{head}"
    );

    std::fs::write(&cfg, "mass = 1.0\n").unwrap();
    assert_eq!(code(&kksym(&["verify", "--config", c])), 2);
    assert_eq!(code(&kksym(&["verify", "--config", "/no/such/file"])), 2);
}

#[test]
fn classify_examples() {
    let out = stdout(&kksym(&["classify", "1", "1", "0", "0", "0", "0", "0"]));
    assert!(out.contains("word: [(1, 1)]"), "{out}");
    let out = stdout(&kksym(&["classify", "0", "0", "0", "0", "0", "0", "1"]));
    assert!(out.starts_with("family: A1_5"), "{out}");
    assert!(out.contains("word: []"));
    assert!(out.contains("a = 0, b = 0, c = 0"), "{out}");
}

#[test]
fn classify_json_reconstructs() {
    let o = kksym(&[
        "classify", "--json", "0.3", "-1.2", "0.5", "2", "-0.7", "1.1", "0.4",
    ]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["family"].as_str().unwrap().starts_with("A1_"));
    assert_eq!(doc["representative"].as_array().unwrap().len(), 7);
    assert!(doc["word"].is_array());
}

#[test]
fn christoffel_and_adjoint_dump() {
    let out = stdout(&kksym(&["christoffel", "--r", "3.7", "--theta", "1.1"]));
    assert!(out.lines().count() > 10);
    let o = kksym(&["adjoint", "6", "0"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn closed_pipe_is_not_an_error() {
    use std::io::Read;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_kksym"))
        .args(["geodesic", "--samples", "20000"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut first = [0u8; 16];
    child.stdout.as_mut().unwrap().read_exact(&mut first).unwrap();
    drop(child.stdout.take());
    assert_eq!(child.wait().unwrap().code(), Some(0));
}
