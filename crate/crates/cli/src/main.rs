use std::process::ExitCode;

use clap::Parser;
use sgi_workbench::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
