//! Estimation-error model and the combined-SNR, capacity and efficiency
//! formulas every optimizer and baseline evaluates.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::channel::{Scenario, SystemConfig};
use crate::math;
use crate::{Error, Result};

/// Per-station pilot-symbol ratios, each in `[0, 1]`.
///
/// Solvers produce strictly interior values; evaluation accepts the closed
/// interval so sweeps can probe the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotAllocation {
    ratios: Vec<f64>,
}

impl PilotAllocation {
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        for &r in &ratios {
            if !(0.0..=1.0).contains(&r) || !r.is_finite() {
                return Err(Error::Domain {
                    what: "pilot ratio",
                    value: r,
                });
            }
        }
        Ok(PilotAllocation { ratios })
    }

    /// The same ratio at every station.
    pub fn uniform(alpha: f64, num_bs: usize) -> Result<Self> {
        PilotAllocation::new(alloc::vec![alpha; num_bs])
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }
}

/// Everything the combined-SNR formula needs: per-station SNRs and the
/// coherence length.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    per_bs_snr: Vec<f64>,
    coherence_symbols: u32,
}

impl LinkState {
    pub fn new(per_bs_snr: Vec<f64>, coherence_symbols: u32) -> Result<Self> {
        if per_bs_snr.is_empty() {
            return Err(Error::Domain {
                what: "per_bs_snr length",
                value: 0.0,
            });
        }
        if coherence_symbols < 1 {
            return Err(Error::Domain {
                what: "coherence_symbols",
                value: coherence_symbols as f64,
            });
        }
        for &s in &per_bs_snr {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Domain {
                    what: "per_bs_snr",
                    value: s,
                });
            }
        }
        Ok(LinkState {
            per_bs_snr,
            coherence_symbols,
        })
    }

    pub fn from_scenario(scenario: &Scenario, tx_power_w: f64) -> Result<Self> {
        if !(tx_power_w.is_finite() && tx_power_w > 0.0) {
            return Err(Error::Domain {
                what: "tx_power_w",
                value: tx_power_w,
            });
        }
        LinkState::new(
            scenario.link_snrs(tx_power_w),
            scenario.config().coherence_symbols,
        )
    }

    pub fn snrs(&self) -> &[f64] {
        &self.per_bs_snr
    }

    pub fn coherence_symbols(&self) -> u32 {
        self.coherence_symbols
    }

    pub fn num_bs(&self) -> usize {
        self.per_bs_snr.len()
    }
}

/// Residual channel-estimate variance fraction `1 / (1 + alpha*L*SNR)`.
///
/// Equals 1 exactly when `alpha` is 0 (no pilots, total uncertainty).
pub fn mmse_error(alpha: f64, coherence_symbols: u32, snr: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&alpha) && snr > 0.0);
    1.0 / (1.0 + alpha * coherence_symbols as f64 * snr)
}

/// Combined post-combining SNR of the desired information.
///
/// Per station, the useful share is discounted by the pilot overhead
/// `(1 - alpha)` and by the estimation quality `alpha*L*SNR / (1 + alpha*L*SNR)`;
/// the denominator keeps the residual estimation-error power of every branch
/// plus one noise unit per station. Zero when every ratio sits on {0, 1}.
pub fn combined_snr(alloc: &PilotAllocation, state: &LinkState) -> Result<f64> {
    if alloc.len() != state.num_bs() {
        return Err(Error::LengthMismatch {
            expected: state.num_bs(),
            actual: alloc.len(),
        });
    }
    Ok(combined_snr_raw(
        alloc.ratios(),
        state.snrs(),
        state.coherence_symbols() as f64,
    ))
}

/// Same formula without domain checks; solvers probe it with ratio values
/// outside `[0, 1]` while root finding.
pub(crate) fn combined_snr_raw(alphas: &[f64], snrs: &[f64], coherence_symbols: f64) -> f64 {
    debug_assert_eq!(alphas.len(), snrs.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (&alpha, &snr) in alphas.iter().zip(snrs) {
        let t = alpha * coherence_symbols * snr;
        num += (1.0 - alpha) * snr * (t / (1.0 + t));
        den += snr / (1.0 + t);
    }
    num / (den + snrs.len() as f64)
}

/// Shannon rate `W * log2(1 + SNR)` in bit/s.
pub fn capacity_bps(bandwidth_hz: f64, snr: f64) -> f64 {
    debug_assert!(snr >= 0.0);
    bandwidth_hz * math::log2(1.0 + snr)
}

/// Spectral efficiency `log2(1 + SNR)` in bit/s/Hz.
pub fn spectral_efficiency(snr: f64) -> f64 {
    math::log2(1.0 + snr)
}

/// Energy efficiency `R / (P + eps*R + P_base)` in bit/J, counting transmit
/// power plus the static and rate-proportional circuit terms.
pub fn energy_efficiency(rate_bps: f64, tx_power_w: f64, config: &SystemConfig) -> f64 {
    debug_assert!(rate_bps > 0.0 && tx_power_w > 0.0);
    rate_bps
        / (tx_power_w
            + config.dynamic_circuit_w_per_bps * rate_bps
            + config.static_circuit_power_w)
}

/// SNR required to carry `target_rate_bps` over `bandwidth_hz`:
/// `2^(R/W) - 1`, evaluated cancellation-free for small targets.
pub fn required_snr(target_rate_bps: f64, bandwidth_hz: f64) -> f64 {
    debug_assert!(target_rate_bps > 0.0 && bandwidth_hz > 0.0);
    math::exp_m1(LN_2 * target_rate_bps / bandwidth_hz)
}
