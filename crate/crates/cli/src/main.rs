use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kksym::geodesic::{lagrangian_value, PhaseState};
use kksym::lie_algebra::{classify, AlgebraElement, StructureConstants, ALGEBRA_DIM};
use kksym::metric::COORD_NAMES;
use kksym::noether::{conservation_drift, first_integrals};
use kksym::{christoffel_at, geometry, integrate, lie_algebra, noether, symmetry};
use kksym::{ChristoffelField, Coordinates, Report};

mod config;

use config::{FileValues, RunConfig};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Geodesics, symmetries and first integrals of a 5D charged black hole
/// with squashed horizon.
#[derive(Parser, Debug)]
#[command(name = "kksym", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    /// `key = value` file (keys: M, q, r_inf, rel_tol, abs_tol, s_end, samples, seed)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Mass parameter M
    #[arg(long = "M", global = true)]
    mass: Option<f64>,
    /// Charge q
    #[arg(long = "q", global = true)]
    charge: Option<f64>,
    /// Squashing radius r_inf
    #[arg(long = "r-inf", global = true)]
    r_inf: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the verification sweeps and print a pass/fail report
    Verify(VerifyArgs),
    /// Integrate one geodesic and write a CSV with the first integrals
    Geodesic(GeodesicArgs),
    /// Reduce an algebra element to its one-dimensional normal form
    Classify(ClassifyArgs),
    /// Print the Christoffel symbols at a point
    Christoffel(ChristoffelArgs),
    /// Print the 7x7 matrix of Ad(exp(s X_i))
    Adjoint(AdjointArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Every sweep (the default when no section is chosen)
    #[arg(long)]
    all: bool,
    /// Lie point symmetries and the commutator table
    #[arg(long)]
    symmetries: bool,
    /// Optimal systems and the adjoint action
    #[arg(long)]
    optimal: bool,
    /// Noether symmetries and first integrals
    #[arg(long)]
    noether: bool,
    /// Connection and Euler-Lagrange identities
    #[arg(long)]
    geometry: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, hide = true, value_enum)]
    inject_fault: Option<Fault>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Fault {
    StructureConstants,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, default_value_t = 5.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    psi: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    tdot: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rdot: f64,
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    thetadot: f64,
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    phidot: f64,
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    psidot: f64,
    /// Relative error tolerance per step [default: 1e-10]
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute error tolerance per step [default: 1e-12]
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Final affine parameter [default: 10]
    #[arg(long)]
    s_end: Option<f64>,
    /// Uniform intervals in the CSV (rows = samples + 1 for a full run)
    #[arg(long)]
    samples: Option<usize>,
    /// CSV destination; stdout when omitted
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Coefficients a1 … a7 of a1 X1 + … + a7 X7
    #[arg(num_args = 7, required = true, allow_negative_numbers = true)]
    coeffs: Vec<f64>,
    /// Machine-readable output
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ChristoffelArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 3.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    /// Print every component, including zeros
    #[arg(long)]
    all: bool,
}

#[derive(Args, Debug)]
struct AdjointArgs {
    /// Generator index 1..7
    i: usize,
    #[arg(allow_negative_numbers = true)]
    s: f64,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn resolve(p: &ParamArgs, extra: FileValues) -> Result<RunConfig, Failure> {
    let file = match &p.config {
        Some(path) => config::load(path).map_err(usage)?,
        None => FileValues::default(),
    };
    let flags = FileValues {
        mass: p.mass,
        charge: p.charge,
        r_inf: p.r_inf,
        ..extra
    };
    file.overlay(flags).resolve().map_err(usage)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Geodesic(a) => cmd_geodesic(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Christoffel(a) => cmd_christoffel(a),
        Command::Adjoint(a) => cmd_adjoint(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Stdout that treats a closed pipe (`kksym ... | head`) as the end of
/// output rather than an error.
struct PipeSafe(io::Stdout);

fn stdout() -> PipeSafe {
    PipeSafe(io::stdout())
}

impl Write for PipeSafe {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self.0.write(buf) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(buf.len()),
            r => r,
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self.0.flush() {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r,
        }
    }
}

fn io_error(e: io::Error) -> Failure {
    Failure {
        code: EXIT_FAIL,
        message: e.to_string(),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, Failure> {
    let cfg = resolve(
        &a.params,
        FileValues {
            seed: a.seed,
            ..Default::default()
        },
    )?;
    let sc = match a.inject_fault {
        Some(Fault::StructureConstants) => StructureConstants::corrupted(),
        None => StructureConstants::standard(),
    };
    let any = a.symmetries || a.optimal || a.noether || a.geometry;
    let run = |flag: bool| a.all || !any || flag;
    let (p, seed) = (&cfg.params, cfg.seed);

    let mut out = stdout();
    let mut report = Report::new();
    if run(a.symmetries) {
        report.extend(symmetry::verify_symmetry_basis_with(
            &symmetry::basis(),
            &sc,
            p,
            200,
            seed,
        ));
    }
    if run(a.optimal) {
        report.extend(lie_algebra::verify_optimal_systems_with(&sc, seed));
    }
    if run(a.noether) {
        report.extend(noether::verify_noether_basis(p, seed));
    }
    if run(a.geometry) {
        report.extend(geometry::verify_geometry(p, seed));
    }
    writeln!(
        out,
        "kksym verify  M = {}  q = {}  r_inf = {}  seed = {seed}",
        p.mass, p.charge, p.r_inf
    )
    .map_err(io_error)?;
    write!(out, "{report}").map_err(io_error)?;
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

const CSV_HEADER: &str = "s,t,r,theta,phi,psi,tdot,rdot,thetadot,phidot,psidot,L,T1,T2,T3,T4,T5,T6";

fn cmd_geodesic(a: GeodesicArgs) -> Result<u8, Failure> {
    let cfg = resolve(
        &a.params,
        FileValues {
            rel_tol: a.rel_tol,
            abs_tol: a.abs_tol,
            s_end: a.s_end,
            samples: a.samples,
            ..Default::default()
        },
    )?;
    let p = cfg.params;
    let initial = PhaseState::new(
        0.0,
        Coordinates::new(a.t, a.r, a.theta, a.phi, a.psi),
        [a.tdot, a.rdot, a.thetadot, a.phidot, a.psidot],
    );
    let traj = integrate(&initial, &p, &cfg.integrator).map_err(|e| usage(e.to_string()))?;
    let integrals = first_integrals(&p).map_err(|e| usage(e.to_string()))?;

    let sink: Box<dyn Write> = match &a.output {
        Some(path) => Box::new(
            File::create(path)
                .map_err(|e| usage(format!("cannot create {}: {e}", path.display())))?,
        ),
        None => Box::new(stdout()),
    };
    let mut out = BufWriter::new(sink);
    writeln!(out, "{CSV_HEADER}").map_err(io_error)?;
    for st in &traj.samples {
        let mut row = Vec::with_capacity(18);
        row.push(st.s);
        row.extend(st.x.to_array());
        row.extend(st.v);
        row.push(lagrangian_value(st, &p).map_err(|e| usage(e.to_string()))?);
        for f in &integrals {
            row.push(f.evaluate(st).map_err(|e| usage(e.to_string()))?);
        }
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(",")).map_err(io_error)?;
    }
    out.flush().map_err(io_error)?;
    drop(out);

    let mut summary = String::new();
    summary.push_str(&format!(
        "termination: {}  samples: {}  steps: {} accepted, {} rejected\n",
        traj.termination.as_str(),
        traj.samples.len(),
        traj.accepted_steps,
        traj.rejected_steps
    ));
    for f in &integrals {
        let d = conservation_drift(f, &traj).map_err(|e| usage(e.to_string()))?;
        summary.push_str(&format!(
            "max relative drift {}: {:.3e}\n",
            f.name().replace('Y', "T"),
            d.relative_drift
        ));
    }
    if a.output.is_some() {
        write!(stdout(), "{summary}").map_err(io_error)?;
    } else {
        eprint!("{summary}");
    }
    Ok(EXIT_OK)
}

fn cmd_classify(a: ClassifyArgs) -> Result<u8, Failure> {
    let coeffs: [f64; ALGEBRA_DIM] = a
        .coeffs
        .as_slice()
        .try_into()
        .map_err(|_| usage("classify needs exactly 7 coefficients"))?;
    let u = AlgebraElement(coeffs);
    let cl = classify(&u).map_err(|e| usage(e.to_string()))?;
    let mut out = stdout();
    if a.json {
        let params: serde_json::Map<String, serde_json::Value> = cl
            .class
            .param_list()
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
            .collect();
        let doc = serde_json::json!({
            "input": u.0,
            "family": cl.class.family.name(),
            "params": params,
            "word": cl.word.0,
            "representative": cl.representative.0,
            "scale": cl.scale,
        });
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&doc).expect("plain data serializes")
        )
        .map_err(io_error)?;
    } else {
        writeln!(out, "family: {}", cl.class.family).map_err(io_error)?;
        let params: Vec<String> = cl
            .class
            .param_list()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        writeln!(out, "params: {}", params.join(", ")).map_err(io_error)?;
        writeln!(out, "word: {}", cl.word).map_err(io_error)?;
        writeln!(out, "representative: {}", cl.representative).map_err(io_error)?;
        writeln!(out, "scale: {}", cl.scale).map_err(io_error)?;
    }
    Ok(EXIT_OK)
}

fn cmd_christoffel(a: ChristoffelArgs) -> Result<u8, Failure> {
    let cfg = resolve(&a.params, FileValues::default())?;
    let x = Coordinates::new(0.0, a.r, a.theta, a.phi, 0.0);
    let gamma = christoffel_at(&x, &cfg.params).map_err(|e| usage(e.to_string()))?;
    let mut out = stdout();
    writeln!(
        out,
        "Christoffel symbols at r = {}, theta = {} (M = {}, q = {}, r_inf = {})",
        a.r, a.theta, cfg.params.mass, cfg.params.charge, cfg.params.r_inf
    )
    .map_err(io_error)?;
    let n = COORD_NAMES.len();
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let v = gamma.get(i, j, k);
                if a.all || v.abs() > 1e-15 {
                    writeln!(out, "{:<28} {v:.16e}", ChristoffelField::label(i, j, k))
                        .map_err(io_error)?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_adjoint(a: AdjointArgs) -> Result<u8, Failure> {
    let m = lie_algebra::adjoint_exp(a.i, a.s).map_err(|e| usage(e.to_string()))?;
    let mut out = stdout();
    writeln!(out, "Ad(exp({} X{})), columns = images of X1..X7", a.s, a.i).map_err(io_error)?;
    for r in 0..ALGEBRA_DIM {
        let row: Vec<String> = (0..ALGEBRA_DIM)
            .map(|c| format!("{:>24}", format!("{:.16e}", m[(r, c)])))
            .collect();
        writeln!(out, "{}", row.join(" ")).map_err(io_error)?;
    }
    Ok(EXIT_OK)
}
