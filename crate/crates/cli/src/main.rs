use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = scc_sim::Args::parse();
    match scc_sim::run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
