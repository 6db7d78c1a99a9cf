//! Transmit-power minimization under a required uplink rate, which is the
//! energy-efficiency optimum: with the rate pinned, every saved watt raises
//! bit-per-joule.
//!
//! At the optimum the rate constraint binds, so the combined SNR equals
//! `2^(R/W) - 1` and each station's ratio follows the same closed form as the
//! SE problem evaluated at that target. That leaves a scalar equation in the
//! transmit power; [`solve_ee_precise`] solves it by bracketed bisection and
//! [`solve_ee_approx`] applies the large-`L*SNR` quadratic shortcut.

use alloc::vec::Vec;

use crate::channel::Scenario;
use crate::math;
use crate::metrics::{self, PilotAllocation};
use crate::{Error, Result, SolveMethod};

/// Default tolerance, relative to the SNR target.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_BISECTIONS: u32 = 200;

/// Output of an EE solve: the minimal transmit power meeting the rate
/// target and the efficiency it yields.
#[derive(Debug, Clone, PartialEq)]
pub struct EeSolution {
    pub method: SolveMethod,
    /// Minimal transmit power in W.
    pub min_tx_power_w: f64,
    /// Pilot ratios at the optimum, each strictly inside (0, 1).
    pub allocation: PilotAllocation,
    /// Combined SNR actually achieved at `min_tx_power_w`; binds to
    /// `2^(R/W) - 1` for the precise path.
    pub achieved_snr: f64,
    /// `R / (P + eps*R + P_base)` at the optimum.
    pub energy_efficiency_bit_per_joule: f64,
    /// The requested rate, in bit/s.
    pub target_rate_bps: f64,
}

/// Pilot ratio meeting a rate target on one link:
/// `(sqrt(1 + L*SNR*2^(R/W)) - 1) / (L*SNR)`.
///
/// Identical to [`crate::se::alpha_from_target_snr`] at target SNR
/// `2^(R/W) - 1`.
pub fn alpha_for_rate(
    target_rate_bps: f64,
    bandwidth_hz: f64,
    snr: f64,
    coherence_symbols: u32,
) -> Result<f64> {
    if !(target_rate_bps.is_finite() && target_rate_bps > 0.0) {
        return Err(Error::Domain {
            what: "target_rate_bps",
            value: target_rate_bps,
        });
    }
    if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
        return Err(Error::Domain {
            what: "bandwidth_hz",
            value: bandwidth_hz,
        });
    }
    let target = metrics::required_snr(target_rate_bps, bandwidth_hz);
    crate::se::alpha_from_target_snr(target, snr, coherence_symbols)
}

/// Combined SNR at power `p` when every ratio follows the rate-target
/// stationarity form with `t = 2^(R/W)`. Out-of-range ratios are evaluated
/// as-is; the recovery step rejects them after the root is found.
fn constraint_lhs(p: f64, gains: &[f64], coherence_symbols: f64, t: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &g in gains {
        let s = p * g;
        let theta = math::sqrt(1.0 + coherence_symbols * s * t);
        let alpha = t / (1.0 + theta);
        num += (1.0 - alpha) * s * ((theta - 1.0) / theta);
        den += s / theta;
    }
    num / (den + gains.len() as f64)
}

fn validate_rate(target_rate_bps: f64) -> Result<()> {
    if !(target_rate_bps.is_finite() && target_rate_bps > 0.0) {
        return Err(Error::Domain {
            what: "target_rate_bps",
            value: target_rate_bps,
        });
    }
    Ok(())
}

/// Minimizes transmit power subject to the rate target by bisecting the
/// binding constraint `combined SNR = 2^(R/W) - 1` in `P`.
///
/// `tol` is relative to the SNR target. The lower bracket end
/// `(2^(R/W)-1) / (sum g * L)` is guaranteed infeasible; infeasibility at
/// the power ceiling is a first-class result carrying the boundary
/// evaluation as a certificate.
pub fn solve_ee_precise(
    scenario: &Scenario,
    target_rate_bps: f64,
    tol: f64,
) -> Result<EeSolution> {
    validate_rate(target_rate_bps)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
        });
    }
    let config = scenario.config();
    let w = config.bandwidth_hz;
    let l = config.coherence_symbols as f64;
    let gains = scenario.snr_per_watt();
    let sum_g: f64 = gains.iter().sum();
    let target = metrics::required_snr(target_rate_bps, w);
    if !target.is_finite() {
        return Err(Error::Domain {
            what: "rate target overflows the SNR domain",
            value: target_rate_bps,
        });
    }
    let t = target + 1.0;
    let p_max = config.max_tx_power_w();

    let lhs_at_max = constraint_lhs(p_max, &gains, l, t);
    if lhs_at_max < target {
        // the raw expression can go negative when the target-tuned ratios
        // exceed 1 at the ceiling; nothing is achievable there
        let achievable = lhs_at_max.max(0.0);
        return Err(Error::RateUnreachable {
            max_power_w: p_max,
            achievable_snr: achievable,
            achievable_rate_bps: metrics::capacity_bps(w, achievable),
        });
    }

    // Guaranteed infeasible: the combined SNR never exceeds P * sum(g),
    // which equals target/L <= target at this power.
    let p_lo = target / (sum_g * l);
    let g = |p: f64| constraint_lhs(p, &gains, l, t) - target;
    let ratio = math::pow10(math::log10(p_max / p_lo) / 3.0);
    let samples: Vec<(f64, f64)> = [p_lo, p_lo * ratio, p_lo * ratio * ratio, p_max]
        .iter()
        .map(|&p| (p, g(p)))
        .collect();
    let (mut lo, mut hi) = crate::se::bracket_sign_change(&samples)?;

    let mut iterations = 0;
    let root = loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if g_mid.abs() <= 0.5 * tol * target {
            break mid;
        }
        if iterations >= MAX_BISECTIONS {
            return Err(Error::NoConvergence {
                best: mid,
                residual: g_mid,
                iterations,
            });
        }
    };

    finish_solution(scenario, &gains, root, target_rate_bps, SolveMethod::Precise)
}

/// Closed-form approximate minimal power, valid when the per-link
/// `L*SNR*2^(R/W)` terms are large.
///
/// Solves `P*sum(g) - b*sqrt(P) - c = 0` for `sqrt(P)` with
/// `b = sum 2*sqrt(g*2^(R/W))/sqrt(L)` and `c = M*(2^(R/W)-1) - 2M/L`,
/// keeping the positive root; `g = |h|^2/(I+N)` so that `SNR_m = P*g`.
pub fn solve_ee_approx(scenario: &Scenario, target_rate_bps: f64) -> Result<EeSolution> {
    validate_rate(target_rate_bps)?;
    let config = scenario.config();
    let w = config.bandwidth_hz;
    let l = config.coherence_symbols as f64;
    let gains = scenario.snr_per_watt();
    let sum_g: f64 = gains.iter().sum();
    let m = gains.len() as f64;
    let target = metrics::required_snr(target_rate_bps, w);
    if !target.is_finite() {
        return Err(Error::Domain {
            what: "rate target overflows the SNR domain",
            value: target_rate_bps,
        });
    }
    let t = target + 1.0;

    let c = m * target - 2.0 * m / l;
    if c <= 0.0 {
        return Err(Error::ApproximationDomain(
            "rate target too small for the closed form (2^(R/W) - 1 <= 2/L); use solve_ee_precise",
        ));
    }
    let b: f64 = gains.iter().map(|&g| 2.0 * math::sqrt(g * t) / math::sqrt(l)).sum();
    let sqrt_p = (b + math::sqrt(b * b + 4.0 * c * sum_g)) / (2.0 * sum_g);
    let p = sqrt_p * sqrt_p;

    let p_max = config.max_tx_power_w();
    if p > p_max * (1.0 + 1e-12) {
        let achievable = constraint_lhs(p_max, &gains, l, t).max(0.0);
        return Err(Error::RateUnreachable {
            max_power_w: p_max,
            achievable_snr: achievable,
            achievable_rate_bps: metrics::capacity_bps(w, achievable),
        });
    }

    finish_solution(scenario, &gains, p, target_rate_bps, SolveMethod::Approximate)
}

fn finish_solution(
    scenario: &Scenario,
    gains: &[f64],
    power_w: f64,
    target_rate_bps: f64,
    method: SolveMethod,
) -> Result<EeSolution> {
    let config = scenario.config();
    let l = config.coherence_symbols;
    let lf = l as f64;
    let snrs: Vec<f64> = gains.iter().map(|&g| power_w * g).collect();

    let mut alphas = Vec::with_capacity(snrs.len());
    for &s in &snrs {
        let alpha = alpha_for_rate(target_rate_bps, config.bandwidth_hz, s, l)?;
        alphas.push(alpha);
    }
    let achieved_snr = metrics::combined_snr_raw(&alphas, &snrs, lf);
    let allocation =
        PilotAllocation::new(alphas).expect("recovered ratios are strictly inside (0, 1)");

    Ok(EeSolution {
        method,
        min_tx_power_w: power_w,
        allocation,
        achieved_snr,
        energy_efficiency_bit_per_joule: metrics::energy_efficiency(
            target_rate_bps,
            power_w,
            config,
        ),
        target_rate_bps,
    })
}

/// Search-path constructor shared with the stochastic baseline.
pub(crate) fn search_solution(
    scenario: &Scenario,
    power_w: f64,
    allocation: PilotAllocation,
    achieved_snr: f64,
    target_rate_bps: f64,
) -> EeSolution {
    EeSolution {
        method: SolveMethod::Search,
        min_tx_power_w: power_w,
        allocation,
        achieved_snr,
        energy_efficiency_bit_per_joule: metrics::energy_efficiency(
            target_rate_bps,
            power_w,
            scenario.config(),
        ),
        target_rate_bps,
    }
}
