//! Pilot-ratio optimization for non-coherent joint-reception uplinks.
//!
//! A single transmitter is received by `M` cooperating base stations. Each
//! station spends a fraction `alpha_m` of every coherence frame on pilot
//! symbols; pilots improve the channel estimate but starve the data payload,
//! so there is an optimal split. This crate models the resulting combined
//! SNR under imperfect estimation ([`metrics`]), and solves two problems on
//! top of it:
//!
//! * [`se`] — maximize spectral efficiency at a fixed transmit power,
//! * [`ee`] — minimize transmit power (hence maximize energy efficiency)
//!   subject to a required uplink rate,
//!
//! each by a precise bracketed root-finding path and a closed-form
//! approximation. [`baselines`] provides the uniform-ratio scheme and a
//! seeded stochastic search used to validate the optimizers.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` instead.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod channel;
pub mod ee;
mod error;
mod math;
pub mod metrics;
pub mod se;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod test_support;

/// Which solver path produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Bracketed root finding on the exact stationarity equation.
    Precise,
    /// Closed-form quadratic approximation.
    Approximate,
    /// Seeded stochastic search over the ratio vector.
    Search,
}
