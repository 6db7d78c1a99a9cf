//! TOML scenario files.
//!
//! Top-level keys mirror [`SystemConfig`]; each `[[bs]]` block describes one
//! station with exactly one gain source (`distance_m` or `channel_gain_db`)
//! and an optional `interference_dbm` (absent means no interference).
//!
//! ```toml
//! bandwidth_hz = 10e6
//! noise_psd_dbm_per_hz = -174.0
//! coherence_symbols = 1000
//! max_tx_power_dbm = 46.0
//! static_circuit_power_w = 0.05
//! dynamic_circuit_w_per_bps = 2e-9
//!
//! [[bs]]
//! distance_m = 200.0
//! ```

use std::path::Path;

use pilotopt_core::channel::{dbm_to_watt, BsLink, Scenario, SystemConfig};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("scenario must declare at least one [[bs]] block")]
    NoStations,
    #[error("bs {index}: exactly one of `distance_m` or `channel_gain_db` must be set")]
    GainSource { index: usize },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] pilotopt_core::Error),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    bandwidth_hz: f64,
    noise_psd_dbm_per_hz: f64,
    coherence_symbols: u32,
    max_tx_power_dbm: f64,
    static_circuit_power_w: f64,
    dynamic_circuit_w_per_bps: f64,
    #[serde(default)]
    bs: Vec<BsEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BsEntry {
    distance_m: Option<f64>,
    channel_gain_db: Option<f64>,
    interference_dbm: Option<f64>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioFileError> {
    let file: ScenarioFile = toml::from_str(text)?;
    if file.bs.is_empty() {
        return Err(ScenarioFileError::NoStations);
    }

    let mut links = Vec::with_capacity(file.bs.len());
    for (index, entry) in file.bs.iter().enumerate() {
        let link = match (entry.distance_m, entry.channel_gain_db) {
            (Some(d), None) => BsLink::from_distance(d)?,
            (None, Some(g)) => BsLink::from_gain_db(g),
            _ => return Err(ScenarioFileError::GainSource { index }),
        };
        let link = match entry.interference_dbm {
            Some(dbm) => link.with_interference_w(dbm_to_watt(dbm)),
            None => link,
        };
        links.push(link);
    }

    let config = SystemConfig {
        bandwidth_hz: file.bandwidth_hz,
        noise_psd_dbm_per_hz: file.noise_psd_dbm_per_hz,
        coherence_symbols: file.coherence_symbols,
        num_bs: links.len(),
        max_tx_power_dbm: file.max_tx_power_dbm,
        static_circuit_power_w: file.static_circuit_power_w,
        dynamic_circuit_w_per_bps: file.dynamic_circuit_w_per_bps,
    };
    Ok(Scenario::new(config, links)?)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const BASE: &str = "\
bandwidth_hz = 10e6
noise_psd_dbm_per_hz = -174.0
coherence_symbols = 1000
max_tx_power_dbm = 46.0
static_circuit_power_w = 0.05
dynamic_circuit_w_per_bps = 2e-9
";

    #[test]
    fn parses_distance_form() {
        let text = format!("{BASE}\n[[bs]]\ndistance_m = 200.0\n[[bs]]\ndistance_m = 300.0\n");
        let scenario = parse_scenario(&text).unwrap();
        assert_eq!(scenario.num_bs(), 2);
        assert!(scenario.links()[0].channel_gain_linear > scenario.links()[1].channel_gain_linear);
        assert_eq!(scenario.links()[0].interference_power_w, 0.0);
    }

    #[test]
    fn parses_gain_db_and_interference() {
        let text = format!(
            "{BASE}\n[[bs]]\nchannel_gain_db = -120.0\ninterference_dbm = -100.0\n"
        );
        let scenario = parse_scenario(&text).unwrap();
        assert_relative_eq!(
            scenario.links()[0].channel_gain_linear,
            1e-12,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            scenario.links()[0].interference_power_w,
            1e-13,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_both_gain_sources() {
        let text = format!("{BASE}\n[[bs]]\ndistance_m = 200.0\nchannel_gain_db = -120.0\n");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioFileError::GainSource { index: 0 })
        ));
    }

    #[test]
    fn rejects_neither_gain_source() {
        let text = format!("{BASE}\n[[bs]]\ninterference_dbm = -100.0\n");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioFileError::GainSource { index: 0 })
        ));
    }

    #[test]
    fn rejects_empty_station_list() {
        assert!(matches!(
            parse_scenario(BASE),
            Err(ScenarioFileError::NoStations)
        ));
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = format!("{BASE}\nbogus_key = 1\n[[bs]]\ndistance_m = 200.0\n");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioFileError::Syntax(_))
        ));
    }

    #[test]
    fn rejects_invalid_physics() {
        let text = "\
bandwidth_hz = 0.0
noise_psd_dbm_per_hz = -174.0
coherence_symbols = 1000
max_tx_power_dbm = 46.0
static_circuit_power_w = 0.05
dynamic_circuit_w_per_bps = 2e-9

[[bs]]
distance_m = 200.0
";
        assert!(matches!(
            parse_scenario(text),
            Err(ScenarioFileError::Invalid(_))
        ));
        let text = format!("{BASE}\n[[bs]]\ndistance_m = -5.0\n");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioFileError::Invalid(_))
        ));
    }
}
