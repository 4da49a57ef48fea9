//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use kksym::lie_algebra::{self, StructureConstants};
use kksym::{geometry, noether, symmetry, Check, MetricParams, Outcome, Report};

const SEED: u64 = 42;

struct Verdict {
    ok: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn select(report: &Report, pred: impl Fn(&Check) -> bool) -> Vec<&Check> {
    report.checks.iter().filter(|c| pred(c)).collect()
}

/// All selected checks pass, there are exactly `expected` of them, and the
/// sweep finished inside `budget`.
fn judge(
    checks: &[&Check],
    expected: usize,
    elapsed: Duration,
    budget: Option<Duration>,
) -> Verdict {
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name.as_str())
        .collect();
    let worst = checks
        .iter()
        // negative controls pass by exceeding their threshold
        .filter(|c| c.outcome == Outcome::Pass && c.value <= c.tolerance)
        .map(|c| c.value)
        .fold(0.0, f64::max);
    let mut ok = failed.is_empty() && checks.len() == expected;
    let mut detail = format!(
        "{} checks (expected {expected}), worst residual {worst:.3e}, {:.2} s",
        checks.len(),
        elapsed.as_secs_f64()
    );
    if let Some(b) = budget {
        if elapsed > b {
            ok = false;
            detail.push_str(&format!(", over the {:.0} s budget", b.as_secs_f64()));
        }
    }
    if !failed.is_empty() {
        detail.push_str(&format!(", failed: {}", failed.join("; ")));
    }
    Verdict { ok, detail }
}

fn run_binary(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kksym"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn criterion_9() -> Verdict {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            return Verdict {
                ok: false,
                detail: e.to_string(),
            }
        }
    };
    let verify = ["verify", "--all", "--seed", "42"];
    let (a, b) = match (run_binary(&verify), run_binary(&verify)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return Verdict {
                ok: false,
                detail: e,
            }
        }
    };
    let reports_equal = a == b && a.1 == 0;

    let mut csvs = Vec::new();
    for n in 0..2 {
        let path = dir.path().join(format!("run{n}.csv"));
        let path = path.to_string_lossy().into_owned();
        match run_binary(&["geodesic", "--output", &path]) {
            Ok((_, 0)) => csvs.push(std::fs::read(&path).unwrap_or_default()),
            Ok((_, code)) => {
                return Verdict {
                    ok: false,
                    detail: format!("geodesic exited with {code}"),
                }
            }
            Err(e) => {
                return Verdict {
                    ok: false,
                    detail: e,
                }
            }
        }
    }
    let csv_equal = !csvs[0].is_empty() && csvs[0] == csvs[1];
    Verdict {
        ok: reports_equal && csv_equal,
        detail: format!(
            "verify report {} bytes, identical: {reports_equal}; geodesic CSV {} bytes, identical: {csv_equal}",
            a.0.len(),
            csvs[0].len()
        ),
    }
}

fn main() -> ExitCode {
    let p = MetricParams::default();
    let secs = Duration::from_secs;
    let mut verdicts: Vec<(u32, &str, Verdict)> = Vec::new();

    let (sym, t_sym) = timed(|| symmetry::verify_symmetry_basis(&p, 200, SEED));
    let residuals = select(&sym, |c| c.name.starts_with("on-shell residual"));
    verdicts.push((
        1,
        "seven generators are symmetries",
        judge(&residuals, 7, t_sym, Some(secs(5))),
    ));

    let comm = select(&sym, |c| c.name.starts_with("commutator"));
    let mut v2 = judge(&comm, 21, t_sym, Some(secs(2)));
    let nonzero = StructureConstants::standard().nonzero().len();
    if nonzero != 4 {
        v2.ok = false;
    }
    v2.detail.push_str(&format!(", {nonzero} nonzero brackets"));
    verdicts.push((2, "commutator table", v2));

    let (geo, t_geo) = timed(|| geometry::verify_geometry(&p, SEED));
    let conn = select(&geo, |c| {
        c.name == "metric compatibility" || c.name.starts_with("Christoffel autodiff")
    });
    verdicts.push((3, "Christoffel correctness", judge(&conn, 2, t_geo, None)));
    let el = select(&geo, |c| c.name.starts_with("Euler-Lagrange"));
    verdicts.push((4, "Euler-Lagrange equivalence", judge(&el, 1, t_geo, None)));

    let (noe, t_noe) = timed(|| noether::verify_noether_basis(&p, SEED));
    let c5 = select(&noe, |c| {
        c.name.starts_with("Noether residual")
            || c.name.starts_with("drift")
            || c.name.starts_with("X2 is not Noether")
            || c.name == "geodesic bundle"
    });
    verdicts.push((
        5,
        "Noether symmetries and drift",
        judge(&c5, 6 + 60 + 1 + 1, t_noe, Some(secs(30))),
    ));
    let c6 = select(&noe, |c| {
        c.name.contains("2 g(eta, v)") || c.name.starts_with("Killing equation")
    });
    verdicts.push((6, "Killing cross-check", judge(&c6, 10, t_noe, None)));

    let (alg, t_alg) = timed(|| lie_algebra::verify_optimal_systems(SEED));
    let c7 = select(&alg, |c| {
        c.name.starts_with("classify")
            || c.name.starts_with("adjoint")
            || c.name.contains("linear independence")
            || c.name.contains("closure")
    });
    let mut v7 = judge(&c7, 4 + 2 + 12, t_alg, Some(secs(5)));
    let noted: Vec<String> = c7
        .iter()
        .filter(|c| c.outcome == Outcome::Discrepancy)
        .map(|c| format!("{} residual {:.3e}", c.name, c.value))
        .collect();
    if !noted.is_empty() {
        v7.detail
            .push_str(&format!(", reported: {}", noted.join("; ")));
    }
    verdicts.push((7, "optimal-system engine", v7));

    let sc = StructureConstants::standard();
    let (jac, anti) = (sc.jacobi_defect(), sc.antisymmetry_defect());
    verdicts.push((
        8,
        "Jacobi identity (integer)",
        Verdict {
            ok: jac == 0 && anti == 0,
            detail: format!("Jacobi defect {jac}, antisymmetry defect {anti}"),
        },
    ));

    verdicts.push((9, "reproducibility", criterion_9()));

    let mut all = true;
    for (n, title, v) in &verdicts {
        all &= v.ok;
        println!(
            "{} criterion {n}: {title} ({})",
            if v.ok { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
