//! Library side of the `cascade` command-line tool: configuration parsing,
//! reports, sweeps and CSV export. The binary is a thin clap wrapper.

pub mod config;
pub mod format;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig, SweepAxis, SweepParam};
pub use run::{CliError, CliResult, Report, SweepTable};
