use std::process::ExitCode;

use bilrank::cli::{main_with, Cli};
use clap::Parser;

fn main() -> ExitCode {
    main_with(Cli::parse())
}
