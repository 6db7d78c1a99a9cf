//! Physical scenario parameters and their linear-domain conversions.
//!
//! Everything downstream works in linear watts and ratios; dB and dBm appear
//! only here, at the configuration boundary.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Global constants shared by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// System bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Noise power spectral density in dBm/Hz.
    pub noise_psd_dbm_per_hz: f64,
    /// Symbols per channel coherence interval.
    pub coherence_symbols: u32,
    /// Number of cooperating base stations.
    pub num_bs: usize,
    /// Transmit power ceiling in dBm.
    pub max_tx_power_dbm: f64,
    /// Static circuit power draw in W.
    pub static_circuit_power_w: f64,
    /// Dynamic circuit power in W per bit/s of served rate.
    pub dynamic_circuit_w_per_bps: f64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::Domain {
                what: "bandwidth_hz",
                value: self.bandwidth_hz,
            });
        }
        if !self.noise_psd_dbm_per_hz.is_finite() {
            return Err(Error::Domain {
                what: "noise_psd_dbm_per_hz",
                value: self.noise_psd_dbm_per_hz,
            });
        }
        if self.coherence_symbols < 1 {
            return Err(Error::Domain {
                what: "coherence_symbols",
                value: self.coherence_symbols as f64,
            });
        }
        if self.num_bs < 1 {
            return Err(Error::Domain {
                what: "num_bs",
                value: self.num_bs as f64,
            });
        }
        if !self.max_tx_power_dbm.is_finite() {
            return Err(Error::Domain {
                what: "max_tx_power_dbm",
                value: self.max_tx_power_dbm,
            });
        }
        if !(self.static_circuit_power_w.is_finite() && self.static_circuit_power_w >= 0.0) {
            return Err(Error::Domain {
                what: "static_circuit_power_w",
                value: self.static_circuit_power_w,
            });
        }
        if !(self.dynamic_circuit_w_per_bps.is_finite() && self.dynamic_circuit_w_per_bps >= 0.0) {
            return Err(Error::Domain {
                what: "dynamic_circuit_w_per_bps",
                value: self.dynamic_circuit_w_per_bps,
            });
        }
        // N = W * N0 must stay strictly positive in f64.
        let n = self.noise_power_w();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Domain {
                what: "derived noise power",
                value: n,
            });
        }
        Ok(())
    }

    /// Noise power over the full band, `N = W * N0`, in watts.
    pub fn noise_power_w(&self) -> f64 {
        self.bandwidth_hz * dbm_to_watt(self.noise_psd_dbm_per_hz)
    }

    /// Transmit power ceiling in watts.
    pub fn max_tx_power_w(&self) -> f64 {
        dbm_to_watt(self.max_tx_power_dbm)
    }
}

/// One cooperating base station: channel power gain and local interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsLink {
    /// Channel power gain `|h|^2` (linear).
    pub channel_gain_linear: f64,
    /// Interference power at the receiver, in W.
    pub interference_power_w: f64,
}

impl BsLink {
    pub fn new(channel_gain_linear: f64, interference_power_w: f64) -> Self {
        BsLink {
            channel_gain_linear,
            interference_power_w,
        }
    }

    /// Gain derived from the distance-based path-loss law, no interference.
    pub fn from_distance(distance_m: f64) -> Result<Self> {
        let pl = path_loss_db(distance_m)?;
        Ok(BsLink::new(math::pow10(-pl / 10.0), 0.0))
    }

    /// Gain given directly in dB, no interference.
    pub fn from_gain_db(gain_db: f64) -> Self {
        BsLink::new(math::pow10(gain_db / 10.0), 0.0)
    }

    pub fn with_interference_w(mut self, interference_power_w: f64) -> Self {
        self.interference_power_w = interference_power_w;
        self
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.channel_gain_linear.is_finite() && self.channel_gain_linear > 0.0) {
            return Err(Error::BadLink {
                index,
                what: "channel_gain_linear",
                value: self.channel_gain_linear,
            });
        }
        if !(self.interference_power_w.is_finite() && self.interference_power_w >= 0.0) {
            return Err(Error::BadLink {
                index,
                what: "interference_power_w",
                value: self.interference_power_w,
            });
        }
        Ok(())
    }
}

/// A validated system configuration plus its ordered station list.
///
/// Immutable after construction; the unit every solver consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    config: SystemConfig,
    links: Vec<BsLink>,
}

impl Scenario {
    /// Validates the configuration and every link; rejects zero-gain
    /// stations and list lengths that disagree with `config.num_bs`.
    pub fn new(config: SystemConfig, links: Vec<BsLink>) -> Result<Self> {
        config.validate()?;
        if links.len() != config.num_bs {
            return Err(Error::LengthMismatch {
                expected: config.num_bs,
                actual: links.len(),
            });
        }
        for (index, link) in links.iter().enumerate() {
            link.validate(index)?;
        }
        Ok(Scenario { config, links })
    }

    /// Builds every link from the path-loss law at the given distances.
    pub fn from_distances(config: SystemConfig, distances_m: &[f64]) -> Result<Self> {
        let links = distances_m
            .iter()
            .map(|&d| BsLink::from_distance(d))
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(config, links)
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn links(&self) -> &[BsLink] {
        &self.links
    }

    pub fn num_bs(&self) -> usize {
        self.links.len()
    }

    /// Per-station SNR per watt of transmit power: `|h|^2 / (I + N)`.
    pub fn snr_per_watt(&self) -> Vec<f64> {
        let noise = self.config.noise_power_w();
        self.links
            .iter()
            .map(|link| link.channel_gain_linear / (link.interference_power_w + noise))
            .collect()
    }

    /// Per-station SNR at the given transmit power.
    pub fn link_snrs(&self, tx_power_w: f64) -> Vec<f64> {
        let noise = self.config.noise_power_w();
        self.links
            .iter()
            .map(|link| per_bs_snr(tx_power_w, link, noise))
            .collect()
    }
}

/// Average path loss `30 + 40*log10(d)` in dB, distance in meters.
pub fn path_loss_db(distance_m: f64) -> Result<f64> {
    if !(distance_m.is_finite() && distance_m > 0.0) {
        return Err(Error::Domain {
            what: "distance_m",
            value: distance_m,
        });
    }
    Ok(30.0 + 40.0 * math::log10(distance_m))
}

pub fn dbm_to_watt(p_dbm: f64) -> f64 {
    math::pow10((p_dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(p_w: f64) -> Result<f64> {
    if !(p_w.is_finite() && p_w > 0.0) {
        return Err(Error::Domain {
            what: "p_w",
            value: p_w,
        });
    }
    Ok(10.0 * math::log10(p_w) + 30.0)
}

/// Received SNR at one station: `P * |h|^2 / (I + N)`.
pub fn per_bs_snr(tx_power_w: f64, link: &BsLink, noise_w: f64) -> f64 {
    debug_assert!(tx_power_w > 0.0 && noise_w > 0.0);
    tx_power_w * link.channel_gain_linear / (link.interference_power_w + noise_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn test_config(num_bs: usize) -> SystemConfig {
        SystemConfig {
            bandwidth_hz: 10e6,
            noise_psd_dbm_per_hz: -174.0,
            coherence_symbols: 1000,
            num_bs,
            max_tx_power_dbm: 46.0,
            static_circuit_power_w: 0.05,
            dynamic_circuit_w_per_bps: 2e-9,
        }
    }

    #[test]
    fn path_loss_reference_points() {
        assert_relative_eq!(path_loss_db(200.0).unwrap(), 122.04119982655925, max_relative = 1e-12);
        assert_relative_eq!(path_loss_db(1.0).unwrap(), 30.0);
        assert_relative_eq!(path_loss_db(10.0).unwrap(), 70.0, max_relative = 1e-15);
    }

    #[test]
    fn path_loss_rejects_nonpositive_distance() {
        assert!(matches!(path_loss_db(0.0), Err(Error::Domain { .. })));
        assert!(matches!(path_loss_db(-5.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn dbm_watt_reference_points() {
        assert_relative_eq!(dbm_to_watt(30.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watt(46.0), 39.810717055349734, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watt(0.0), 1e-3, max_relative = 1e-15);
        assert!(matches!(watt_to_dbm(0.0), Err(Error::Domain { .. })));
        assert!(matches!(watt_to_dbm(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn noise_power_reference_points() {
        let cfg = test_config(3);
        assert_relative_eq!(cfg.noise_power_w(), 3.981071705534986e-14, max_relative = 1e-12);

        let one_hz = SystemConfig {
            bandwidth_hz: 1.0,
            noise_psd_dbm_per_hz: -30.0,
            ..test_config(3)
        };
        assert_relative_eq!(one_hz.noise_power_w(), 1e-6, max_relative = 1e-12);
        let two_hz = SystemConfig {
            bandwidth_hz: 2.0,
            ..one_hz
        };
        assert_relative_eq!(two_hz.noise_power_w(), 2e-6, max_relative = 1e-12);
    }

    #[test]
    fn per_bs_snr_reference_points() {
        // Full chain at 46 dBm over 200 m: the exponents collapse to
        // 4*log10(5), i.e. exactly 625.
        let cfg = test_config(1);
        let link = BsLink::from_distance(200.0).unwrap();
        let snr = per_bs_snr(dbm_to_watt(46.0), &link, cfg.noise_power_w());
        assert_relative_eq!(snr, 625.0, max_relative = 1e-12);

        let unit = BsLink::new(1.0, 0.0);
        assert_relative_eq!(per_bs_snr(1.0, &unit, 1.0), 1.0);
        let interfered = BsLink::new(1.0, 1.0);
        assert_relative_eq!(per_bs_snr(1.0, &interfered, 1.0), 0.5);
    }

    #[test]
    fn scenario_rejects_zero_gain_link() {
        let links = vec![BsLink::new(1.0, 0.0), BsLink::new(0.0, 0.0)];
        let err = Scenario::new(test_config(2), links).unwrap_err();
        assert!(matches!(err, Error::BadLink { index: 1, .. }));
    }

    #[test]
    fn scenario_rejects_negative_interference() {
        let links = vec![BsLink::new(1.0, -1e-3)];
        assert!(matches!(
            Scenario::new(test_config(1), links),
            Err(Error::BadLink { .. })
        ));
    }

    #[test]
    fn scenario_rejects_length_mismatch() {
        let links = vec![BsLink::new(1.0, 0.0)];
        assert!(matches!(
            Scenario::new(test_config(2), links),
            Err(Error::LengthMismatch {
                expected: 2,
                actual: 1
            })
        ));
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let mut cfg = test_config(1);
        cfg.bandwidth_hz = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = test_config(1);
        cfg.coherence_symbols = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = test_config(0);
        cfg.num_bs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = test_config(1);
        cfg.static_circuit_power_w = -0.1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn gains_ordered_inversely_to_distance() {
        let scenario =
            Scenario::from_distances(test_config(3), &[200.0, 250.0, 300.0]).unwrap();
        let gains: Vec<f64> = scenario
            .links()
            .iter()
            .map(|l| l.channel_gain_linear)
            .collect();
        assert!(gains[0] > gains[1] && gains[1] > gains[2]);
    }

    proptest! {
        #[test]
        fn dbm_watt_round_trip(x in -200.0..60.0f64) {
            let back = watt_to_dbm(dbm_to_watt(x)).unwrap();
            prop_assert!((back - x).abs() <= 1e-9);
        }

        #[test]
        fn snr_linear_in_power(
            p in 1e-6..1e3f64,
            k in 1e-3..1e3f64,
            gain in 1e-14..1.0f64,
            interference in 0.0..1e-3f64,
        ) {
            let link = BsLink::new(gain, interference);
            let a = per_bs_snr(k * p, &link, 1e-12);
            let b = k * per_bs_snr(p, &link, 1e-12);
            prop_assert!((a - b).abs() <= 1e-12 * b.abs());
        }

        #[test]
        fn snr_decreasing_in_interference(
            p in 1e-3..1e3f64,
            gain in 1e-14..1.0f64,
            i1 in 0.0..1e-3f64,
            delta in 1e-9..1e-3f64,
        ) {
            let low = BsLink::new(gain, i1);
            let high = BsLink::new(gain, i1 + delta);
            prop_assert!(per_bs_snr(p, &high, 1e-12) < per_bs_snr(p, &low, 1e-12));
        }
    }
}
