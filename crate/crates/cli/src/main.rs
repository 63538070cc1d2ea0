//! `galilean`: check, inspect and integrate scenario files.
//!
//! Exit status: 0 success, 1 failed check or runtime failure, 2 usage
//! error, 3 unreadable or invalid scenario.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use galilean::dynamics::{integrate_geodesic, integrate_observer_flow, Termination, Trajectory};
use galilean::verify::{check_roundtrip, run_all, RunOptions};
use galilean::{dz_at, load_scenario, Scenario, VectorValue};

const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SCENARIO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "galilean",
    version,
    about = "Generalized connections on Galilean space-times"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the structure and run every connection check.
    Check {
        scenario: PathBuf,
        /// Write the JSON report here ("-" for standard output).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also require the connection to be torsion-free.
        #[arg(long)]
        expect_torsion_free: bool,
        /// Override the scenario's sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the Christoffel symbols at a point.
    Connection {
        scenario: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list)]
        at: Values,
    },
    /// Print gravity, Coriolis form and spatial torsion recovered from the
    /// connection at a point.
    Observables {
        scenario: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list)]
        at: Values,
    },
    /// Build the connection from the data and report how far the observer
    /// map lands from it.
    Roundtrip { scenario: PathBuf },
    /// Integrate an auto-parallel curve and write it as CSV.
    Geodesic {
        scenario: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list)]
        from: Values,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list)]
        vel: Values,
        #[command(flatten)]
        span: Span,
    },
    /// Integrate the observer field from a point and write it as CSV.
    Flow {
        scenario: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list)]
        from: Values,
        #[command(flatten)]
        span: Span,
    },
}

#[derive(Args)]
struct Span {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long)]
    dt: f64,
    /// CSV destination ("-" for standard output).
    #[arg(long)]
    out: PathBuf,
}

/// Comma-separated coordinates, e.g. `0,-1.5`.
#[derive(Clone, Debug)]
struct Values(Vec<f64>);

fn parse_list(text: &str) -> Result<Values, String> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", v.trim()))
        })
        .collect::<Result<_, _>>()
        .map(Values)
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<galilean::Error> for Failure {
    fn from(e: galilean::Error) -> Self {
        Failure::new(EXIT_CHECK, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> Result<Scenario, Failure> {
    load_scenario(path).map_err(|e| Failure::new(EXIT_SCENARIO, format!("{}: {e}", path.display())))
}

fn expect_arity(what: &str, values: &[f64], m: usize) -> Outcome {
    if values.len() != m {
        return Err(Failure::new(
            EXIT_USAGE,
            format!(
                "--{what} needs {m} comma-separated values, got {}",
                values.len()
            ),
        ));
    }
    Ok(())
}

fn open_output(path: &Path) -> Result<Box<dyn Write>, Failure> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    File::create(path)
        .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
        .map_err(|e| Failure::new(EXIT_CHECK, format!("cannot write {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Outcome {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::new(EXIT_CHECK, format!("cannot write {}: {e}", path.display())))
}

fn cmd_check(
    path: &Path,
    report_path: Option<&Path>,
    options: RunOptions,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Outcome {
    let mut scenario = load(path)?;
    if samples.is_some() || seed.is_some() {
        let s = &scenario.structure;
        let (n, sd) = (
            samples.unwrap_or(s.sample_count()),
            seed.unwrap_or(s.seed()),
        );
        scenario.structure = scenario.structure.clone().with_sampling(n, sd);
    }
    let report = run_all(&scenario, &options);
    match report_path {
        Some(p) if p.as_os_str() == "-" => println!("{}", report.to_json()),
        Some(p) => {
            write_text(p, &(report.to_json() + "\n"))?;
            print!("{}", report.table());
        }
        None => print!("{}", report.table()),
    }
    if report.pass {
        Ok(())
    } else {
        let first = report.first_failure().map_or("", |e| e.name.as_str());
        Err(Failure::new(EXIT_CHECK, format!("check failed: {first}")))
    }
}

fn index_label(names: &[String], idx: &[usize]) -> String {
    let parts: Vec<&str> = idx.iter().map(|&i| names[i].as_str()).collect();
    if parts.iter().all(|p| p.chars().count() == 1) {
        parts.concat()
    } else {
        parts.join(",")
    }
}

fn cmd_connection(path: &Path, at: &[f64]) -> Outcome {
    let scenario = load(path)?;
    let s = &scenario.structure;
    let m = s.dim();
    expect_arity("at", at, m)?;
    let gamma = scenario.connection()?.christoffel(at)?;
    let names = s.coord_names();
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                println!(
                    "Γ^{}_{} = {:?}",
                    names[k],
                    index_label(names, &[i, j]),
                    gamma.get(k, i, j)
                );
            }
        }
    }
    Ok(())
}

fn cmd_observables(path: &Path, at: &[f64]) -> Outcome {
    let scenario = load(path)?;
    let s = &scenario.structure;
    let (m, n) = (s.dim(), s.spatial_dim());
    expect_arity("at", at, m)?;
    let values = dz_at(&scenario.connection()?, &scenario.observer, at)?;
    let names = s.coord_names();
    for a in 0..n {
        println!("G{} = {:?}", a + 1, values.gravity[a]);
    }
    for a in 0..n {
        for b in a + 1..n {
            println!("w{}{} = {:?}", a + 1, b + 1, values.coriolis[(a, b)]);
        }
    }
    for a in 0..n {
        for i in 0..m {
            for j in i + 1..m {
                println!(
                    "T{}_{} = {:?}",
                    a + 1,
                    index_label(names, &[i, j]),
                    values.theta[a][(i, j)]
                );
            }
        }
    }
    Ok(())
}

fn cmd_roundtrip(path: &Path) -> Outcome {
    let scenario = load(path)?;
    let data = scenario.data().ok_or_else(|| {
        Failure::new(
            EXIT_USAGE,
            "scenario supplies Christoffel symbols; a round trip needs connection data",
        )
    })?;
    let entry = check_roundtrip(&scenario.structure, &scenario.observer, data);
    println!(
        "max deviation = {:?} (tolerance {:?})",
        entry.max, entry.tol
    );
    if entry.pass {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK, "round trip exceeds tolerance"))
    }
}

fn finish_trajectory(traj: &Trajectory, out: &Path) -> Outcome {
    let mut w = open_output(out)?;
    traj.write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Failure::new(EXIT_CHECK, format!("cannot write {}: {e}", out.display())))?;
    drop(w);
    let last = traj.last();
    let reason = match traj.termination {
        Termination::Completed => "completed",
        Termination::LeftDomain => "left domain",
        Termination::NumericFailure => "numeric failure",
    };
    eprintln!(
        "{} states, {reason} at τ = {:?}, position {:?}",
        traj.states.len(),
        last.tau,
        last.position
    );
    if traj.termination == Termination::NumericFailure {
        return Err(Failure::new(
            EXIT_CHECK,
            "integration produced a non-finite state",
        ));
    }
    Ok(())
}

fn cmd_geodesic(path: &Path, from: &[f64], vel: &[f64], span: &Span) -> Outcome {
    let scenario = load(path)?;
    let m = scenario.structure.dim();
    expect_arity("from", from, m)?;
    expect_arity("vel", vel, m)?;
    let c = scenario.connection()?;
    let v0 = VectorValue::from_column_slice(vel);
    let traj =
        integrate_geodesic(&c, from, &v0, span.t0, span.t1, span.dt).map_err(usage_or_runtime)?;
    finish_trajectory(&traj, &span.out)
}

fn cmd_flow(path: &Path, from: &[f64], span: &Span) -> Outcome {
    let scenario = load(path)?;
    expect_arity("from", from, scenario.structure.dim())?;
    let traj = integrate_observer_flow(
        &scenario.structure,
        &scenario.observer,
        from,
        span.t0,
        span.t1,
        span.dt,
    )
    .map_err(usage_or_runtime)?;
    finish_trajectory(&traj, &span.out)
}

// Bad step sizes and starting points are the caller's fault.
fn usage_or_runtime(e: galilean::Error) -> Failure {
    match e {
        galilean::Error::InvalidArgument(_) | galilean::Error::DimensionMismatch(_) => {
            Failure::new(EXIT_USAGE, e.to_string())
        }
        other => other.into(),
    }
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Check {
            scenario,
            report,
            expect_torsion_free,
            samples,
            seed,
        } => cmd_check(
            scenario,
            report.as_deref(),
            RunOptions {
                expect_torsion_free: *expect_torsion_free,
            },
            *samples,
            *seed,
        ),
        Command::Connection { scenario, at } => cmd_connection(scenario, &at.0),
        Command::Observables { scenario, at } => cmd_observables(scenario, &at.0),
        Command::Roundtrip { scenario } => cmd_roundtrip(scenario),
        Command::Geodesic {
            scenario,
            from,
            vel,
            span,
        } => cmd_geodesic(scenario, &from.0, &vel.0, span),
        Command::Flow {
            scenario,
            from,
            span,
        } => cmd_flow(scenario, &from.0, span),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("galilean: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
