//! Command-line front end of the adsorb toolkit: configuration parsing,
//! dispatch to the solvers and deterministic CSV/JSON artifacts.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Format, Mode, Overrides, RunConfig};
pub use error::CliError;
