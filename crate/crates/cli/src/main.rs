use clap::Parser;
use inflmm_cli::{run, Cli};

fn main() -> std::process::ExitCode {
    run(Cli::parse())
}
