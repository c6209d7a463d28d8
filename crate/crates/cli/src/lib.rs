//! Scenario runner and command implementations behind the `starmod` binary.

pub mod runner;
pub mod scenario;

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use thiserror::Error;

use starmod_core::picard::morita_check;
use starmod_core::star::StarProduct;
use starmod_core::trace::index;
use starmod_core::wire::{AlgebraDto, ClassDto, ModelDto, MoritaReportDto};

pub use runner::{Report, RunOptions, Status};
pub use scenario::{Diagnostic, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", render(.0))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Core(#[from] starmod_core::Error),
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let doc = scenario::parse_json(&read(path)?).map_err(|d| CliError::Invalid(vec![d]))?;
    scenario::decode(&doc, "").map_err(|d| CliError::Invalid(vec![d]))
}

pub fn load_scenario(text: &str) -> Result<Scenario, CliError> {
    let doc = scenario::parse_json(text).map_err(|d| CliError::Invalid(vec![d]))?;
    scenario::compile(&doc).map_err(CliError::Invalid)
}

pub fn run_text(text: &str, options: RunOptions) -> Result<Report, CliError> {
    Ok(runner::run(&load_scenario(text)?, options))
}

pub fn run_path(path: &Path, options: RunOptions) -> Result<Report, CliError> {
    run_text(&read(path)?, options)
}

pub fn validate_path(path: &Path) -> Result<Vec<Diagnostic>, CliError> {
    Ok(scenario::validate_text(&read(path)?))
}

/// `{"index": [...]}` for a projection file on the given algebra.
pub fn index_command(projection: &Path, algebra: &Path, order: usize) -> Result<serde_json::Value, CliError> {
    let alg = read_json::<AlgebraDto>(algebra)?.to_core()?;
    let doc = scenario::parse_json(&read(projection)?).map_err(|d| CliError::Invalid(vec![d]))?;
    let p0 = scenario::projection_from_value(&alg, &doc, "").map_err(|d| CliError::Invalid(vec![d]))?;
    let star = StarProduct::moyal(&alg, order);
    let d = starmod_core::bundle::deform_projection(&p0, &star)?;
    Ok(serde_json::json!({ "index": index(&d)?.to_strings() }))
}

pub fn morita_command(model: &Path, a: &Path, b: &Path) -> Result<MoritaReportDto, CliError> {
    let model = read_json::<ModelDto>(model)?.to_core()?;
    let a = read_json::<ClassDto>(a)?.to_core()?;
    let b = read_json::<ClassDto>(b)?.to_core()?;
    Ok(MoritaReportDto::from_core(&morita_check(&a, &b, &model)?)?)
}
