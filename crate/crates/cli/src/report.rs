//! Report documents: the on-disk JSON form of a finished run.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tagnet_core::domain::Traces;
use tagnet_core::{MetricsReport, Policy};

use crate::error::CliError;

/// Reports are stamped with the emitting tool version so archived files
/// stay attributable.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A `MetricsReport` plus provenance, with a fixed key order so identical
/// runs serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub tool_version: String,
    pub policy: Policy,
    pub scenario_digest: String,
    pub seed: u64,
    pub spectrum_utilization: f64,
    pub mean_latency_ms: f64,
    pub throughput_bps: f64,
    pub energy_joules: f64,
    pub delivered_packets: u64,
    pub traces: Traces,
}

impl ReportDoc {
    pub fn from_report(report: MetricsReport) -> Self {
        ReportDoc {
            tool_version: TOOL_VERSION.to_string(),
            policy: report.policy,
            scenario_digest: report.scenario_digest,
            seed: report.seed,
            spectrum_utilization: report.spectrum_utilization,
            mean_latency_ms: report.mean_latency_ms,
            throughput_bps: report.throughput_bps,
            energy_joules: report.energy_joules,
            delivered_packets: report.delivered_packets,
            traces: report.traces,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> ReportDoc {
        ReportDoc {
            tool_version: TOOL_VERSION.to_string(),
            policy: Policy::Rfid,
            scenario_digest: "00f0aa".into(),
            seed: 7,
            spectrum_utilization: 0.5,
            mean_latency_ms: 12.25,
            throughput_bps: 5e7,
            energy_joules: 321.0,
            delivered_packets: 99,
            traces: Traces {
                spectrum_utilization: vec![0.5],
                mean_latency_ms: vec![12.25],
                throughput_bps: vec![5e7],
                energy_joules: vec![321.0],
            },
        }
    }

    #[test]
    fn json_round_trips() {
        let d = doc();
        let parsed: ReportDoc = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(parsed, d);
    }

    #[test]
    fn key_order_is_stable() {
        let json = doc().to_json();
        let tool = json.find("\"tool_version\"").unwrap();
        let policy = json.find("\"policy\"").unwrap();
        let util = json.find("\"spectrum_utilization\"").unwrap();
        let traces = json.find("\"traces\"").unwrap();
        assert!(tool < policy && policy < util && util < traces);
        assert!(json.ends_with('\n'));
    }
}
