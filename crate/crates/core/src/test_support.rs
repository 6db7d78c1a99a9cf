//! Scenario builders shared across the unit-test modules.

use alloc::vec::Vec;

use crate::channel::{BsLink, Scenario, SystemConfig};

/// Unit-noise config: 1 Hz bandwidth at 30 dBm/Hz gives N = 1 W, so a link
/// gain of `g` at 1 W transmit power is an SNR of `g`.
pub(crate) fn unit_noise_scenario(gains: &[f64], coherence_symbols: u32, max_dbm: f64) -> Scenario {
    let config = SystemConfig {
        bandwidth_hz: 1.0,
        noise_psd_dbm_per_hz: 30.0,
        coherence_symbols,
        num_bs: gains.len(),
        max_tx_power_dbm: max_dbm,
        static_circuit_power_w: 0.0,
        dynamic_circuit_w_per_bps: 0.0,
    };
    let links: Vec<BsLink> = gains.iter().map(|&g| BsLink::new(g, 0.0)).collect();
    Scenario::new(config, links).unwrap()
}

/// The three-station reference scenario used throughout the test suites.
pub(crate) fn table_reference_scenario() -> Scenario {
    let config = SystemConfig {
        bandwidth_hz: 10e6,
        noise_psd_dbm_per_hz: -174.0,
        coherence_symbols: 1000,
        num_bs: 3,
        max_tx_power_dbm: 46.0,
        static_circuit_power_w: 0.05,
        dynamic_circuit_w_per_bps: 2e-9,
    };
    Scenario::from_distances(config, &[200.0, 250.0, 300.0]).unwrap()
}
