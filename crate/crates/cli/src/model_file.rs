//! JSON model files: `{"name": str, "A": [[real...]...], "B": [[real...]...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use zonovol::{RealMatrix, SystemModel};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
}

impl ModelFile {
    pub fn from_model(model: &SystemModel) -> Self {
        ModelFile {
            name: model.name.clone(),
            a: model.a().to_rows(),
            b: model.b().to_rows(),
        }
    }

    pub fn into_model(self) -> Result<SystemModel, CliError> {
        let n = self.a.len();
        if n == 0 {
            return Err(CliError::parse("field A: matrix has no rows"));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != n {
                return Err(CliError::parse(format!(
                    "field A, row {}: {} entries, expected {n} (A must be square)",
                    i + 1,
                    row.len()
                )));
            }
        }
        if self.b.len() != n {
            return Err(CliError::parse(format!(
                "field B: {} rows, expected {n} to match A",
                self.b.len()
            )));
        }
        let r = self.b[0].len();
        if r == 0 {
            return Err(CliError::parse("field B, row 1: no entries"));
        }
        for (i, row) in self.b.iter().enumerate() {
            if row.len() != r {
                return Err(CliError::parse(format!(
                    "field B, row {}: {} entries, expected {r}",
                    i + 1,
                    row.len()
                )));
            }
        }
        let a =
            RealMatrix::from_rows(&self.a).map_err(|e| CliError::parse(format!("field A: {e}")))?;
        let b =
            RealMatrix::from_rows(&self.b).map_err(|e| CliError::parse(format!("field B: {e}")))?;
        SystemModel::new(self.name, a, b).map_err(|e| CliError::parse(e.to_string()))
    }
}

/// Parses and validates a model document.
pub fn parse_model_str(text: &str) -> Result<SystemModel, CliError> {
    let file: ModelFile = serde_json::from_str(text)
        .map_err(|e| CliError::parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    file.into_model()
}

pub fn parse_model(path: &Path) -> Result<SystemModel, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_model_str(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Pretty-printed JSON; numbers use the shortest representation that
/// parses back to the same double.
pub fn render_model(model: &SystemModel) -> String {
    let mut s =
        serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serializes");
    s.push('\n');
    s
}

/// A model file path, or the name of a built-in model when no such file exists.
pub fn resolve_model(arg: &str) -> Result<SystemModel, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return parse_model(path);
    }
    zonovol::builtin::by_name(arg).ok_or_else(|| {
        CliError::Io(format!(
            "{arg}: no such file, and not a built-in model (ex1, ex2)"
        ))
    })
}
