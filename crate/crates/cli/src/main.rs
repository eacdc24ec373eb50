use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crflat_cli::args::Cli;
use crflat_cli::{run, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let to_stdout = cli.out.is_none();
    match cli.into_config().and_then(|c| run(&c)) {
        Ok(outcome) => {
            if to_stdout {
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(outcome.text.as_bytes());
                let _ = out.flush();
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
