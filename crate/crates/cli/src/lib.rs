//! Command-line front end for the `zonovol` volume engines.

pub mod bench;
pub mod commands;
pub mod error;
pub mod model_file;
pub mod render;
pub mod verify;

pub use error::CliError;
pub use model_file::{parse_model, parse_model_str, render_model, resolve_model};
