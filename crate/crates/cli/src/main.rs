use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fresolvent::analysis::{contraction_iterate, resolvent_iterate, IterationTrace};
use fresolvent::extension::{extend, GridParams, DEFAULT_RESOLUTION};
use fresolvent::io::{coordinate_header, format_number, read_graph, read_points, read_table, write_graph, write_table, OperatorSpec};
use fresolvent::resolvent::maximality_probe;
use fresolvent::suite::run_default_suite;
use fresolvent::{resolvent_apply, MonotoneForm, MonotoneOperator, Point};

#[derive(Parser)]
#[command(name = "fresolvent", version, about = "Generalized resolvents of monotone operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecInput {
    /// Operator spec JSON: {"F": {...}, "A": {...}, "dim": n}
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate T_A x for every point of a CSV
    Resolve {
        #[command(flatten)]
        spec: SpecInput,
        /// Points CSV with a header row and n columns
        #[arg(long)]
        input: PathBuf,
        /// Output CSV (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply the F-projector onto the set whose normal cone is A
    Project {
        #[command(flatten)]
        spec: SpecInput,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Iterate x_{k+1} = T_A x_k and emit the trace
    Iterate {
        #[command(flatten)]
        spec: SpecInput,
        /// Starting point, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the built-in invariant suite and emit a JSON report
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Extend a 1-D F-firmly nonexpansive sample to the whole line
    Extend {
        /// Spec JSON; only "F" and "dim" (= 1) are used
        #[command(flatten)]
        spec: SpecInput,
        /// CSV of (x, Tx) pairs
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        eps: Option<f64>,
        /// Extended-graph CSV (stdout when omitted)
        #[arg(long)]
        graph_out: Option<PathBuf>,
        /// CSV of query points x
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long, requires = "query")]
        query_out: Option<PathBuf>,
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Probe maximality of A by solving w ∈ (A + F)y for random targets
    Probe {
        #[command(flatten)]
        spec: SpecInput,
        #[arg(long, default_value_t = 100)]
        targets: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<fresolvent::Error> for Failure {
    fn from(e: fresolvent::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn open(path: &Path) -> Result<impl Read, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn nums(p: &Point) -> impl Iterator<Item = String> + '_ {
    p.coords().iter().map(|&v| format_number(v))
}

fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> Outcome {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

fn resolve(spec: &Path, input: &Path, output: Option<&Path>) -> Outcome {
    let spec = OperatorSpec::from_path(spec)?;
    let (a, f) = (spec.build_a()?, spec.build_f()?);
    let points = read_points(open(input)?, spec.dim)?;
    let mut header = coordinate_header("x", spec.dim);
    header.extend(coordinate_header("y", spec.dim));
    header.extend(["residual", "method", "iterations"].map(String::from));
    let mut rows = Vec::with_capacity(points.len());
    for x in &points {
        let r = resolvent_apply(&a, &f, x)?;
        let mut row: Vec<String> = nums(x).chain(nums(&r.output)).collect();
        row.extend([format_number(r.residual), r.method.to_string(), r.iterations.to_string()]);
        rows.push(row);
    }
    write_table(sink(output)?, &header, &rows)?;
    Ok(())
}

fn project(spec: &Path, input: &Path, output: Option<&Path>) -> Outcome {
    let spec = OperatorSpec::from_path(spec)?;
    let proj = spec.projector()?;
    let points = read_points(open(input)?, spec.dim)?;
    let mut header = coordinate_header("x", spec.dim);
    header.extend(coordinate_header("p", spec.dim));
    let rows = points
        .iter()
        .map(|x| Ok(nums(x).chain(nums(&proj.project(x)?)).collect()))
        .collect::<Result<Vec<Vec<String>>, fresolvent::Error>>()?;
    write_table(sink(output)?, &header, &rows)?;
    Ok(())
}

fn iterate(spec: &Path, x0: &[f64], tol: f64, max_iter: usize, output: Option<&Path>) -> Outcome {
    let spec = OperatorSpec::from_path(spec)?;
    let f = spec.build_f()?;
    let a = match spec.a {
        Some(_) => spec.build_a()?,
        None => MonotoneOperator::identity(spec.dim)?,
    };
    let x0 = Point::new(x0.to_vec())?;
    let trace: IterationTrace = if f.is_linear() && matches!(a.form(), MonotoneForm::Identity) {
        contraction_iterate(&f, &x0, max_iter, tol)?
    } else {
        resolvent_iterate(&a, &f, &x0, max_iter, tol)?
    };
    let mut header = vec!["n".to_string()];
    header.extend(coordinate_header("x", spec.dim));
    header.extend(["norm", "ratio", "bound"].map(String::from));
    let bound = trace.bound.map(format_number).unwrap_or_default();
    let rows: Vec<Vec<String>> = trace
        .iterates
        .iter()
        .enumerate()
        .map(|(n, x)| {
            let mut row = vec![n.to_string()];
            row.extend(nums(x));
            row.push(format_number(x.norm()));
            let ratio = n.checked_sub(1).and_then(|k| trace.rates[k]);
            row.push(ratio.map(format_number).unwrap_or_default());
            row.push(bound.clone());
            row
        })
        .collect();
    write_table(sink(output)?, &header, &rows)?;
    Ok(())
}

fn check(seed: u64, output: Option<&Path>) -> Outcome {
    let report = run_default_suite(seed);
    write_json(output, &report)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(Failure::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}

#[allow(clippy::too_many_arguments)]
fn extend_cmd(
    spec: &Path,
    input: &Path,
    params: GridParams,
    graph_out: Option<&Path>,
    query: Option<&Path>,
    query_out: Option<&Path>,
    diagnostics: Option<&Path>,
) -> Outcome {
    let spec = OperatorSpec::from_path(spec)?;
    let f = spec.build_f()?;
    let sample = read_graph(open(input)?)?;
    let result = extend(&sample, &f, params)?;
    write_graph(sink(graph_out)?, &result.extended_graph)?;
    if let Some(q) = query {
        let (_, rows) = read_table(open(q)?, Some(1))?;
        let out = rows
            .iter()
            .map(|r| {
                let (y, gap) = result.oracle.query_with_gap(r[0])?;
                Ok(vec![format_number(r[0]), format_number(y), format_number(gap)])
            })
            .collect::<Result<Vec<_>, fresolvent::Error>>()?;
        let header = ["x", "tx", "gap"].map(String::from);
        write_table(sink(query_out)?, &header, &out)?;
    }
    if let Some(d) = diagnostics {
        write_json(Some(d), &result.diagnostics)?;
    }
    if !result.diagnostics.extracted_monotone {
        return Err(Failure::Invariant("extracted graph is not monotone".into()));
    }
    Ok(())
}

fn probe(spec: &Path, targets: usize, radius: f64, seed: u64, output: Option<&Path>) -> Outcome {
    let spec = OperatorSpec::from_path(spec)?;
    let report = maximality_probe(&spec.build_a()?, &spec.build_f()?, targets, radius, seed)?;
    write_json(output, &report)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Resolve { spec, input, output } => resolve(&spec.spec, &input, output.as_deref()),
        Command::Project { spec, input, output } => project(&spec.spec, &input, output.as_deref()),
        Command::Iterate { spec, x0, tol, max_iter, output } => {
            iterate(&spec.spec, &x0, tol, max_iter, output.as_deref())
        }
        Command::Check { seed, output } => check(seed, output.as_deref()),
        Command::Extend { spec, input, bound, resolution, eps, graph_out, query, query_out, diagnostics } => {
            extend_cmd(
                &spec.spec,
                &input,
                GridParams { bound, resolution, eps },
                graph_out.as_deref(),
                query.as_deref(),
                query_out.as_deref(),
                diagnostics.as_deref(),
            )
        }
        Command::Probe { spec, targets, radius, seed, output } => {
            probe(&spec.spec, targets, radius, seed, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("fresolvent: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("fresolvent: {msg}");
            ExitCode::from(2)
        }
    }
}
