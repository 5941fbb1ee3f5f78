use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use schord::action::{act, CochainTensor};
use schord::diagram::{generator, ChordDiagram};
use schord::frobenius::FrobeniusAlgebra;
use schord::hochschild::{algebra_from_json, cohomology, Cochain, Variant};
use schord::json::{canonical_string, parse, InputError};
use schord::linalg::Field;
use schord::prop::DiagramSum;
use schord::verify::{run_suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "schord", version, about = "Chord diagrams acting on Hochschild cochains")]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Scalar field: `q` or `p:<prime>`.
    #[arg(long, global = true, default_value = "q", value_parser = parse_field)]
    field: Field,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frobenius algebra files.
    Algebra {
        #[command(subcommand)]
        op: AlgebraOp,
    },
    /// Single diagrams or sums of diagrams.
    Diagram {
        #[command(subcommand)]
        op: DiagramOp,
    },
    /// `A∘B`, with B applied first.
    Compose { a: String, b: String },
    /// Dimension of HH^n.
    Hh {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Use the full instead of the normalized complex.
        #[arg(long)]
        full: bool,
    },
    /// Apply a diagram or sum to cochains.
    Act {
        diagram: String,
        #[arg(long, num_args = 0..)]
        inputs: Vec<PathBuf>,
    },
    /// Run the identity suite.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AlgebraOp {
    Validate { algebra: String },
}

#[derive(Subcommand)]
enum DiagramOp {
    Classify { file: String },
    Boundary { file: String },
    Canonical { file: String },
}

fn parse_field(s: &str) -> Result<Field, String> {
    if s == "q" {
        return Ok(Field::Rational);
    }
    let p: u64 = s
        .strip_prefix("p:")
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| format!("expected q or p:<prime>, got {s:?}"))?;
    if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
        return Err(format!("{p} is not prime"));
    }
    Ok(Field::Prime(p))
}

enum Failure {
    Input(String),
    Check,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Input(e.to_string())
    }
}

type Run = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// A file path, or a builtin name when no such file exists.
fn file_or_name(arg: &str) -> Result<Option<Value>, Failure> {
    let p = Path::new(arg);
    if p.exists() {
        read_json(p).map(Some)
    } else {
        Ok(None)
    }
}

fn load_algebra(arg: &str) -> Result<FrobeniusAlgebra, Failure> {
    let v = file_or_name(arg)?.unwrap_or_else(|| Value::String(arg.to_string()));
    Ok(algebra_from_json(&v, "$")?)
}

fn load_diagram(arg: &str) -> Result<ChordDiagram, Failure> {
    match file_or_name(arg)? {
        Some(v) => Ok(ChordDiagram::from_json(&v)?),
        None => Ok(generator(arg)?),
    }
}

/// An object is one diagram, an array a sum.
fn load_sum(arg: &str) -> Result<DiagramSum, Failure> {
    match file_or_name(arg)? {
        Some(v @ Value::Array(_)) => Ok(DiagramSum::from_json(&v)?),
        Some(v) => Ok(DiagramSum::from_diagram(&ChordDiagram::from_json(&v)?)),
        None => Ok(DiagramSum::from_diagram(&generator(arg)?)),
    }
}

fn print_sum(cli: &Cli, s: &DiagramSum) {
    if cli.json {
        println!("{}", canonical_string(&s.to_json()));
    } else if s.is_zero() {
        println!("0");
    } else {
        for (d, c) in s.terms() {
            println!("{c}\t{}", d.notation());
        }
    }
}

fn rational_only(cli: &Cli, what: &str) -> Run {
    match cli.field {
        Field::Rational => Ok(()),
        Field::Prime(_) => Err(Failure::Input(format!("{what} is only available over q"))),
    }
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Algebra { op: AlgebraOp::Validate { algebra } } => {
            let alg = load_algebra(algebra)?;
            let report = alg.validate();
            if cli.json {
                let checks: Vec<Value> = report
                    .entries
                    .iter()
                    .map(|e| json!({ "check": e.check, "status": if e.passed { "pass" } else { "fail" }, "witness": e.witness }))
                    .collect();
                println!("{}", canonical_string(&json!({ "algebra": alg.to_json(), "checks": checks })));
            } else {
                for e in &report.entries {
                    match &e.witness {
                        None => println!("pass  {}", e.check),
                        Some(w) => println!("FAIL  {}  {w}", e.check),
                    }
                }
            }
            if report.is_ok() {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Diagram { op } => match op {
            DiagramOp::Classify { file } => {
                let c = load_diagram(file)?.classify();
                if cli.json {
                    println!(
                        "{}",
                        canonical_string(&json!({
                            "euler_characteristic": c.euler_characteristic,
                            "genus": c.genus,
                            "orientable": c.orientable,
                            "n": c.n,
                            "m": c.m,
                        }))
                    );
                } else {
                    println!("{c}");
                }
                Ok(())
            }
            DiagramOp::Boundary { file } => {
                print_sum(cli, &load_sum(file)?.boundary());
                Ok(())
            }
            DiagramOp::Canonical { file } => {
                let v = match file_or_name(file)? {
                    Some(v @ Value::Array(_)) => DiagramSum::from_json(&v)?.to_json(),
                    _ => load_diagram(file)?.canonical().to_json(),
                };
                println!("{}", canonical_string(&v));
                Ok(())
            }
        },
        Command::Compose { a, b } => {
            print_sum(cli, &load_sum(a)?.compose(&load_sum(b)?)?);
            Ok(())
        }
        Command::Hh { algebra, degree, max_degree, full } => {
            let alg = Arc::new(load_algebra(algebra)?);
            let n_max = max_degree.unwrap_or((*degree + 1).max(schord::hochschild::DEFAULT_MAX_DEGREE));
            let variant = if *full { Variant::Full } else { Variant::Normalized };
            let h = cohomology(&alg, *degree, n_max, variant, cli.field)?;
            if cli.json {
                let field = match cli.field {
                    Field::Rational => "q".to_string(),
                    Field::Prime(p) => format!("p:{p}"),
                };
                let reps: Vec<Value> = h.representatives.iter().map(Cochain::to_json).collect();
                println!(
                    "{}",
                    canonical_string(&json!({
                        "algebra": alg.name(),
                        "degree": degree,
                        "dimension": h.dimension,
                        "field": field,
                        "representatives": reps,
                        "variant": if *full { "full" } else { "normalized" },
                    }))
                );
            } else {
                println!("dimension {}", h.dimension);
            }
            Ok(())
        }
        Command::Act { diagram, inputs } => {
            rational_only(cli, "act")?;
            let s = load_sum(diagram)?;
            let fs: Vec<Cochain> = inputs
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    Cochain::from_json(&read_json(p)?)
                        .map_err(|e| Failure::Input(format!("input {i} ({}): {e}", p.display())))
                })
                .collect::<Result<_, _>>()?;
            if fs.len() != s.n_inputs() {
                return Err(Failure::Input(format!(
                    "$: the diagram takes {} inputs, {} given",
                    s.n_inputs(),
                    fs.len()
                )));
            }
            let x = if fs.is_empty() {
                return Err(Failure::Input("$: at least one input cochain is needed".into()));
            } else {
                CochainTensor::from_cochains(&fs)?
            };
            let y = act(&s, &x)?;
            println!("{}", canonical_string(&tensor_json(&y, &fs)?));
            Ok(())
        }
        Command::Verify { config } => {
            rational_only(cli, "verify")?;
            let mut v = match config {
                Some(p) => read_json(p)?,
                None => json!({}),
            };
            if let (Ok(seed), Some(obj)) = (std::env::var("SCHORD_SEED"), v.as_object_mut()) {
                if !obj.contains_key("seed") {
                    let seed: u64 =
                        seed.parse().map_err(|_| InputError::new("SCHORD_SEED", "expected a nonnegative integer"))?;
                    obj.insert("seed".into(), json!(seed));
                }
            }
            let cfg = SuiteConfig::from_json(&v)?;
            let report = run_suite(&cfg)?;
            if cli.json {
                println!("{}", canonical_string(&report.to_json()));
            } else {
                println!("{report}");
            }
            if report.is_ok() {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

/// One output: a cochain file; otherwise the entries of the tensor.
fn tensor_json(y: &CochainTensor, fs: &[Cochain]) -> Result<Value, Failure> {
    let top = fs.iter().map(Cochain::max_degree).max().unwrap_or(0);
    let top = y.total_degrees().into_iter().chain([top]).max().unwrap_or(0);
    match y.arity() {
        1 => Ok(y.to_cochain(top)?.to_json()),
        0 => Ok(json!({ "scalar": y.scalar().unwrap_or_default().to_string() })),
        m => {
            let entries: Vec<Value> = y
                .entries()
                .into_iter()
                .map(|(factors, c)| json!([factors.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(), c.to_string()]))
                .collect();
            Ok(json!({ "algebra": schord::hochschild::algebra_json(y.algebra()), "arity": m, "entries": entries }))
        }
    }
}
