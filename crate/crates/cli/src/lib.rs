//! Command-line drivers over `sunlab-core`: JSON reports, exit codes and
//! optional SVG figures.

pub mod args;
pub mod commands;
pub mod report;
pub mod svg;
pub mod verify;

use anyhow::Result;

use args::{Cli, Command};
use report::{write_atomic, Report, TOOL, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FALSIFIED: i32 = 2;

/// A finished run: the rendered report and the derived exit code.
pub struct Run {
    pub report: String,
    pub summary: Vec<String>,
    pub exit_code: i32,
}

/// Executes one command and writes the report (and figure) to disk when
/// requested.
pub fn run(cli: &Cli) -> Result<Run> {
    let seed = cli.seed;
    let outcome = match &cli.command {
        Command::Interval(a) => commands::cmd_interval(a)?,
        Command::Hull(a) => commands::cmd_hull(a, seed)?,
        Command::Mconnect(a) => commands::cmd_mconnect(a, seed)?,
        Command::Path(a) => commands::cmd_path(a)?,
        Command::Project(a) => commands::cmd_project(a)?,
        Command::Sun(a) => commands::cmd_sun(a, seed)?,
        Command::Embed(a) => commands::cmd_embed(a)?,
        Command::Verify(a) => verify::cmd_verify(a, seed)?,
    };
    let report = Report {
        tool: TOOL,
        version: VERSION,
        command: cli.command.name(),
        config: serde_json::to_value(&cli.command)?,
        seed,
        result: outcome.result,
    }
    .to_json()?;
    if let Some(path) = &cli.out {
        write_atomic(path, report.as_bytes())?;
    }
    let mut summary = outcome.summary;
    if let Some(path) = &cli.svg {
        match &outcome.figure {
            Some(fig) => write_atomic(path, fig.render().as_bytes())?,
            None => summary.push("no figure: SVG output needs two-dimensional input".into()),
        }
    }
    Ok(Run {
        report,
        summary,
        exit_code: if outcome.falsified { EXIT_FALSIFIED } else { EXIT_OK },
    })
}
