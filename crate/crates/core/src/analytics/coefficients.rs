//! Shipped coefficient tables and coefficient-file loading.
//!
//! `model1` and `model2` are logit click-through models (the second adds
//! profile and receiver h-index terms). `did_citation` and
//! `did_direct_author` are open-rate difference-in-differences fits against
//! control.

use std::path::Path;

use serde::de::DeserializeOwned;
use thiserror::Error;

use super::did::DiDCoefficients;
use super::logit::ModelCoefficients;

pub const MODEL1_JSON: &str = include_str!("../../data/model1.json");
pub const MODEL2_JSON: &str = include_str!("../../data/model2.json");
pub const DID_CITATION_JSON: &str = include_str!("../../data/did_citation.json");
pub const DID_DIRECT_AUTHOR_JSON: &str = include_str!("../../data/did_direct_author.json");

#[derive(Debug, Error)]
pub enum CoefficientError {
    #[error("cannot read coefficient file {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("invalid coefficient file {path}: {err}")]
    Parse { path: String, err: serde_json::Error },
    #[error("coefficients in {0} are not finite")]
    NonFinite(String),
    #[error("coefficients in {0} imply a cell probability outside [0, 1]")]
    OutOfRange(String),
}

fn parse<T: DeserializeOwned>(json: &str, path: &str) -> Result<T, CoefficientError> {
    serde_json::from_str(json).map_err(|err| CoefficientError::Parse {
        path: path.to_owned(),
        err,
    })
}

pub fn parse_model(json: &str, origin: &str) -> Result<ModelCoefficients, CoefficientError> {
    let m: ModelCoefficients = parse(json, origin)?;
    if !m.is_finite() {
        return Err(CoefficientError::NonFinite(origin.to_owned()));
    }
    Ok(m)
}

pub fn parse_did(json: &str, origin: &str) -> Result<DiDCoefficients, CoefficientError> {
    let d: DiDCoefficients = parse(json, origin)?;
    if !d.is_valid() {
        return Err(CoefficientError::OutOfRange(origin.to_owned()));
    }
    Ok(d)
}

fn read(path: &Path) -> Result<String, CoefficientError> {
    std::fs::read_to_string(path).map_err(|err| CoefficientError::Io {
        path: path.display().to_string(),
        err,
    })
}

pub fn load_model(path: &Path) -> Result<ModelCoefficients, CoefficientError> {
    parse_model(&read(path)?, &path.display().to_string())
}

pub fn load_did(path: &Path) -> Result<DiDCoefficients, CoefficientError> {
    parse_did(&read(path)?, &path.display().to_string())
}

pub fn model1() -> ModelCoefficients {
    parse_model(MODEL1_JSON, "model1.json").expect("shipped model1.json is valid")
}

pub fn model2() -> ModelCoefficients {
    parse_model(MODEL2_JSON, "model2.json").expect("shipped model2.json is valid")
}

pub fn did_citation() -> DiDCoefficients {
    parse_did(DID_CITATION_JSON, "did_citation.json").expect("shipped did_citation.json is valid")
}

pub fn did_direct_author() -> DiDCoefficients {
    parse_did(DID_DIRECT_AUTHOR_JSON, "did_direct_author.json")
        .expect("shipped did_direct_author.json is valid")
}
