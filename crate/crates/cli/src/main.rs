use std::process::ExitCode;

use clap::Parser;
use sunlab_cli::args::Cli;
use sunlab_cli::{run, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(r) => {
            if cli.out.is_none() {
                print!("{}", r.report);
            }
            for line in &r.summary {
                eprintln!("{line}");
            }
            ExitCode::from(r.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
