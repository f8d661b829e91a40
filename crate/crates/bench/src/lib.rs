//! Shared loaders for the benchmarks.

use purepoint_core::fixtures;
use purepoint_core::format::parse_model;
use purepoint_core::model::{validate, SubstitutionModel, Validated};

pub fn model(name: &str) -> SubstitutionModel {
    parse_model(fixtures::get(name).expect("bundled fixture").text, None).expect("fixture parses")
}

pub fn validated(name: &str) -> Validated {
    validate(&model(name)).expect("fixture validates")
}
