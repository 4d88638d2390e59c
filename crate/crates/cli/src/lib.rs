//! Command-line and HTTP front ends for `causal-forge`.

pub mod cli;
pub mod service;

use std::path::Path;

use causal_forge::dsl::ModelDocument;

/// A model loaded from a `.cm` file, named after the file stem.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub name: String,
    pub document: ModelDocument,
}

#[derive(Debug, Clone)]
pub struct LoadError {
    /// Diagnostics prefixed with the file path, one per line.
    pub message: String,
    /// The file could not be read or tokenized/parsed at all.
    pub syntax: bool,
}

/// Reads and parses a model file.
pub fn load_model(path: &Path) -> Result<LoadedModel, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError {
        message: format!("{}: {e}", path.display()),
        syntax: true,
    })?;
    let document = ModelDocument::parse(&text).map_err(|e| LoadError {
        message: e
            .diagnostics
            .iter()
            .map(|d| format!("{}:{d}", path.display()))
            .collect::<Vec<_>>()
            .join("\n"),
        syntax: e.is_syntax(),
    })?;
    let name = path
        .file_stem()
        .map_or_else(|| "model".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(LoadedModel { name, document })
}
