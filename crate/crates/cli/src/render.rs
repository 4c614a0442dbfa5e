use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Four significant digits, `4.622E9` style.
    #[default]
    Default,
    /// Shortest representation that round-trips.
    Full,
}

impl FromStr for Precision {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "default" => Ok(Precision::Default),
            "full" => Ok(Precision::Full),
            _ => Err(CliError::Usage(format!("unknown precision '{s}'"))),
        }
    }
}

pub fn format_volume(v: f64, precision: Precision) -> String {
    match precision {
        Precision::Default => format!("{v:.3e}").replace('e', "E"),
        Precision::Full => format!("{v:?}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}'"))),
        }
    }
}
