//! Command-line front end: image I/O and the `compress`, `decompress`,
//! `loops`, `compare` and `inspect` commands.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

use std::io::Write;

pub use args::{Cli, Command, RunConfig};
pub use error::{CliError, CliResult};

/// Run a parsed command line, writing reports to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let cfg = cli.command.to_config();
    match &cli.command {
        Command::Compress(_) => commands::cmd_compress(&cfg, out).map(drop),
        Command::Decompress(_) => commands::cmd_decompress(&cfg, out).map(drop),
        Command::Loops(_) => commands::cmd_loops(&cfg, out).map(drop),
        Command::Compare(_) => commands::cmd_compare(&cfg, out).map(drop),
        Command::Inspect(_) => commands::cmd_inspect(&cfg, out),
    }
}
