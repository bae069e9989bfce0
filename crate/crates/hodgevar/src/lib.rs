//! Command-line companion of `hodgevar-core`: model and family files,
//! run configuration, reports and the verification suite.

pub mod cli;
pub mod commands;
pub mod config;
pub mod io;
pub mod report;
pub mod verify;

pub use config::RunConfig;
pub use io::{load_family, load_model, Family, InputError};
