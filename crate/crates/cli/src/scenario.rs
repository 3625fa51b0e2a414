//! Scenario loading: TOML text in, validated `Scenario` out.

use std::fs;
use std::path::Path;

use tagnet_core::Scenario;

use crate::error::CliError;

/// Reads, parses and validates a scenario file. Parse errors carry TOML's
/// line/column diagnostics; semantic errors name the offending field.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let scenario: Scenario = toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    scenario
        .validate()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(scenario)
}
