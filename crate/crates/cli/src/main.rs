use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use cubical::commands::{decompose_document, fold_document, render_document, Diagram};
use cubical::models::fincat::{bundled, FinCat};
use cubical::verify::{recheck, run_axioms, run_theorems, Family, ModelSpec, SuiteConfig, SuiteReport, VerifyError};

/// Checks the cubical laws and theorems on finite models.
#[derive(Debug, Parser)]
#[command(name = "cubical-verify", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// Model family.
    #[arg(long, value_enum, default_value_t = ModelArg::Nerve, global = true)]
    model: ModelArg,
    /// Bundled category name or path to a category document.
    #[arg(long, default_value = "poset2x2", global = true)]
    cat: String,
    /// Highest dimension checked.
    #[arg(long, default_value_t = 4, global = true)]
    dim: usize,
    /// Highest nerve dimension under a tower.
    #[arg(long, default_value_t = 1, global = true)]
    base_dim: usize,
    /// Largest accepted --dim.
    #[arg(long, default_value_t = 4, global = true)]
    cap: usize,
    #[arg(long, default_value_t = 500, global = true)]
    samples: usize,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Include wall times in reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Nerve,
    Tower,
    /// Nerve with the degeneracies deliberately wrong.
    Broken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Tap,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiagramArg {
    Psi,
    Array,
    Unfold,
    Refinement,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the law registry.
    Axioms {
        /// Law id; repeat to select several.
        #[arg(long)]
        name: Vec<String>,
        /// Re-run a counterexample (or the first in a JSON report).
        #[arg(long)]
        recheck: Option<PathBuf>,
    },
    /// Run the named theorem suites.
    Theorems {
        /// Suite id; repeat to select several.
        #[arg(long)]
        name: Vec<String>,
        /// Random thin composites in the closure check.
        #[arg(long, default_value_t = 1000)]
        composites: usize,
    },
    /// Fold a cube: Ψx, Nx, Px, thinness and the intermediate foldings.
    Fold { cube: PathBuf },
    /// Write a thin cube as a composite of degeneracies and connections.
    Decompose {
        cube: PathBuf,
        /// Also draw the outermost unfolding.
        #[arg(long)]
        render: bool,
    },
    /// Draw an array around a cube.
    Render {
        cube: PathBuf,
        #[arg(long, value_enum, default_value_t = DiagramArg::Psi)]
        diagram: DiagramArg,
        /// The direction j of ψⱼ.
        #[arg(long, default_value_t = 1)]
        dir: usize,
    },
}

enum Failure {
    /// A law or theorem failed, or the input is not thin.
    Check(String),
    /// Configuration, parse or IO error.
    Usage(String),
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Failure {
        match e {
            VerifyError::NotThin => Failure::Check(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn load_category(cat: &str) -> Result<FinCat, Failure> {
    if let Some(c) = bundled::load(cat) {
        return Ok(c);
    }
    let text = fs::read_to_string(cat).map_err(|e| {
        Failure::Usage(format!(
            "{cat}: {e} (bundled categories: {})",
            bundled::NAMES.join(", ")
        ))
    })?;
    FinCat::from_json_str(&text).map_err(|e| Failure::Usage(format!("{cat}: {e}")))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn config(opts: &Opts) -> Result<SuiteConfig, Failure> {
    let family = match opts.model {
        ModelArg::Nerve => Family::Nerve,
        ModelArg::Tower => Family::Tower,
        ModelArg::Broken => Family::Broken,
    };
    let mut spec = ModelSpec::new(family, load_category(&opts.cat)?);
    spec.base_dim = opts.base_dim;
    let mut c = SuiteConfig::new(spec);
    c.max_dim = opts.dim;
    c.dim_cap = opts.cap;
    c.samples = opts.samples;
    c.seed = opts.seed;
    c.timings = opts.timings;
    c.validate()?;
    Ok(c)
}

fn emit_report(report: &SuiteReport, format: Format) -> Result<(), Failure> {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
        Format::Tap => print!("{}", report.to_tap()),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} check(s) failed", report.failures().count())))
    }
}

fn emit_document(doc: &Value, format: Format, summary: impl FnOnce(&Value) -> String) {
    match format {
        Format::Text => print!("{}", summary(doc)),
        _ => println!("{}", serde_json::to_string_pretty(doc).expect("documents serialize")),
    }
}

fn label(doc: &Value, key: &str) -> String {
    doc[key]["label"].as_str().unwrap_or("?").to_string()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut c = config(&cli.opts)?;
    let format = cli.opts.format;
    match cli.command {
        Command::Axioms { name, recheck: None } => {
            c.names = name;
            emit_report(&run_axioms(&c)?, format)
        }
        Command::Axioms { recheck: Some(path), .. } => emit_report(&recheck(&c, &read_json(&path)?)?, format),
        Command::Theorems { name, composites } => {
            c.names = name;
            c.composites = composites;
            emit_report(&run_theorems(&c)?, format)
        }
        Command::Fold { cube } => {
            let doc = fold_document(&c, &read_json(&cube)?)?;
            emit_document(&doc, format, |d| {
                let mut out = format!("x = {}\n", label(d, "input"));
                for step in d["steps"].as_array().into_iter().flatten() {
                    out += &format!("after psi_{}: {}\n", step["psi"], step["label"].as_str().unwrap_or("?"));
                }
                out += &format!("Ψx = {}\nN = {}\nP = {}\n", label(d, "folded"), label(d, "n"), label(d, "p"));
                out += &format!("thin: {}\n", d["thin"]);
                out
            });
            Ok(())
        }
        Command::Decompose { cube, render } => {
            let (doc, drawing) = decompose_document(&c, &read_json(&cube)?, render)?;
            emit_document(&doc, format, |d| {
                format!(
                    "x = {}\n  = {}\n{} leaves, depth {}\n",
                    label(d, "input"),
                    d["pretty"].as_str().unwrap_or("?"),
                    d["leaves"],
                    d["depth"]
                )
            });
            if let Some(text) = drawing {
                print!("{text}");
            }
            Ok(())
        }
        Command::Render { cube, diagram, dir } => {
            let diagram = match diagram {
                DiagramArg::Psi => Diagram::Psi,
                DiagramArg::Array => Diagram::Array,
                DiagramArg::Unfold => Diagram::Unfold,
                DiagramArg::Refinement => Diagram::Refinement,
            };
            print!("{}", render_document(&c, &read_json(&cube)?, diagram, dir)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("cubical-verify: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("cubical-verify: {msg}");
            ExitCode::from(2)
        }
    }
}
