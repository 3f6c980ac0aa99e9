//! `sgi analyze` and `sgi serve`.

use std::fmt;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sgi_core::classify::Verdict;
use sgi_core::invariants::NamingMode;
use sgi_core::service::{run_analysis, AnalysisOptions, AnalysisRequest, AnalysisResult, Stage};
use sgi_core::structures::parse_structure;

use crate::api::ApiConfig;

#[derive(Debug, Parser)]
#[command(name = "sgi", version, about = "Structural identifiability of linear compartmental models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one structure and write a report.
    Analyze(AnalyzeArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
    /// List the bundled example structures.
    Examples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Naming {
    Caps,
    Underscore,
}

impl From<Naming> for NamingMode {
    fn from(n: Naming) -> Self {
        match n {
            Naming::Caps => NamingMode::Caps,
            Naming::Underscore => NamingMode::Underscore,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable report.
    Text,
    /// The full analysis result as JSON.
    Structured,
    /// The compartment diagram as Graphviz DOT.
    Graph,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Structure file (JSON).
    #[arg(long, required_unless_present = "example", conflicts_with = "example")]
    pub structure: Option<PathBuf>,
    /// A bundled example instead of a file.
    #[arg(long)]
    pub example: Option<String>,
    /// Edit `coord=expr`, e.g. `C[1][1]=1`. Repeatable; applied in order.
    #[arg(long = "edit", value_name = "COORD=EXPR")]
    pub edits: Vec<String>,
    /// Keep transfer-function denominators as computed.
    #[arg(long)]
    pub no_canonical: bool,
    #[arg(long, value_enum, default_value_t = Naming::Caps)]
    pub naming: Naming,
    /// Generic-point seed. Repeatable.
    #[arg(long = "seed")]
    pub seeds: Vec<u64>,
    /// Report which solution branches stay non-negative.
    #[arg(long)]
    pub positivity: bool,
    /// Layout hint recorded in the diagram.
    #[arg(long)]
    pub layout: Option<String>,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timings in structured output.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "SGI_HOST", default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, env = "SGI_PORT", default_value_t = 8080)]
    pub port: u16,
    /// Per-request time budget in seconds.
    #[arg(long, env = "SGI_TIMEOUT_SECS", default_value_t = 60)]
    pub timeout: u64,
    /// Directory with a built UI to serve at `/`.
    #[arg(long, env = "SGI_UI_DIR")]
    pub ui_dir: Option<PathBuf>,
}

/// Exit statuses of `sgi analyze`.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT_ERROR: u8 = 1;
    pub const UNKNOWN: u8 = 2;
}

#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AnalyzeArgs {
    pub fn request(&self) -> Result<AnalysisRequest, InputError> {
        let mut req = match (&self.structure, &self.example) {
            (Some(path), _) => {
                let text = std::fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                let spec = parse_structure(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                AnalysisRequest::for_spec(&spec)
            }
            (None, Some(name)) => AnalysisRequest::for_example(name),
            (None, None) => return Err(InputError("give --structure or --example".into())),
        };
        req.edits = self.edits.clone();
        req.canonical_form = !self.no_canonical;
        req.naming_mode = self.naming.into();
        req.seeds = (!self.seeds.is_empty()).then(|| self.seeds.clone());
        req.positivity_filter = self.positivity;
        req.layout_hint = self.layout.clone();
        req.include_timings = self.timings;
        req.resolve().map_err(|e| InputError(e.to_string()))?;
        Ok(req)
    }
}

pub fn render(result: &AnalysisResult, format: Format) -> String {
    match format {
        Format::Text => result.to_text(),
        Format::Structured => result.to_json(),
        Format::Graph => match &result.report {
            Stage::Ok { value } => value.graph.dot.clone(),
            _ => String::new(),
        },
    }
}

/// Runs an analysis and returns the rendered output with its exit status.
pub fn analyze(args: &AnalyzeArgs) -> Result<(String, u8), InputError> {
    let req = args.request()?;
    let options = AnalysisOptions { timeout: Duration::from_secs(args.timeout), ..Default::default() };
    let result = run_analysis(&req, &options);
    let status = if result.classification.verdict == Verdict::Unknown { exit::UNKNOWN } else { exit::OK };
    Ok((render(&result, args.format), status))
}

fn run_analyze(args: &AnalyzeArgs) -> u8 {
    let (output, status) = match analyze(args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::INPUT_ERROR;
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, output) {
                eprintln!("error: {}: {e}", path.display());
                return exit::INPUT_ERROR;
            }
        }
        None => print!("{output}"),
    }
    status
}

fn run_serve(args: &ServeArgs) -> u8 {
    let config = ApiConfig { timeout: Duration::from_secs(args.timeout), ui_dir: args.ui_dir.clone() };
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::INPUT_ERROR;
        }
    };
    match runtime.block_on(crate::api::serve((args.host, args.port).into(), config)) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit::INPUT_ERROR
        }
    }
}

pub fn run(cli: Cli) -> u8 {
    match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Serve(args) => run_serve(args),
        Command::Examples => {
            for (name, _) in sgi_core::service::EXAMPLES {
                println!("{name}");
            }
            exit::OK
        }
    }
}
