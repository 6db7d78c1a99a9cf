//! Spectral-efficiency maximization at fixed transmit power.
//!
//! At the optimum, every station's ratio satisfies the same stationarity
//! condition `SNR = alpha^2*L*SNR_m + 2*alpha - 1`, which ties all ratios to
//! the combined SNR. Substituting the per-station solution back into the
//! combined-SNR formula leaves a scalar fixed-point equation in the combined
//! SNR; [`solve_se_precise`] solves it by bracketed bisection. Under large
//! `L*SNR_m` the fixed point collapses to a quadratic in `sqrt(SNR+1)`, which
//! [`solve_se_approx`] solves in closed form.

use alloc::vec::Vec;

use crate::channel::Scenario;
use crate::math;
use crate::metrics::{self, LinkState, PilotAllocation};
use crate::{Error, Result, SolveMethod};

/// Default absolute tolerance on the combined SNR.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_BISECTIONS: u32 = 200;

/// Output of an SE solve: the optimal ratio vector and what it achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct SeSolution {
    pub method: SolveMethod,
    /// Combined SNR at the optimum (linear).
    pub optimal_snr: f64,
    /// Achievable rate at the optimum, `W * log2(1 + SNR*)`.
    pub capacity_bps: f64,
    /// Optimal per-station pilot ratios, each strictly inside (0, 1).
    pub allocation: PilotAllocation,
    /// Per-station stationarity residuals
    /// `SNR* - (alpha^2*L*SNR_m + 2*alpha - 1)`.
    pub residuals: Vec<f64>,
    /// Bisection steps for the precise path, objective evaluations for the
    /// search path, 0 for the closed form.
    pub iterations: u32,
}

impl SeSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |acc, r| acc.max(r.abs()))
    }
}

/// Pilot ratio that satisfies the stationarity condition at a given combined
/// SNR: the feasible root `(sqrt(1 + L*SNR_m*(target+1)) - 1) / (L*SNR_m)`,
/// evaluated in the cancellation-free form
/// `(target+1) / (1 + sqrt(1 + L*SNR_m*(target+1)))`.
///
/// Errors when the root reaches 1: the target is unreachable for this link
/// and no interior optimum exists.
pub fn alpha_from_target_snr(target_snr: f64, snr: f64, coherence_symbols: u32) -> Result<f64> {
    if !(target_snr.is_finite() && target_snr >= 0.0) {
        return Err(Error::Domain {
            what: "target_snr",
            value: target_snr,
        });
    }
    if !(snr.is_finite() && snr > 0.0) {
        return Err(Error::Domain {
            what: "snr",
            value: snr,
        });
    }
    let alpha = alpha_kernel(target_snr + 1.0, coherence_symbols as f64 * snr);
    if alpha >= 1.0 {
        return Err(Error::PilotRatioOutOfRange { alpha });
    }
    Ok(alpha)
}

/// `(sqrt(1 + ls*x) - 1) / ls` rewritten as `x / (1 + sqrt(1 + ls*x))`,
/// shared by the SE and EE ratio recoveries (`x` is `SNR+1` or `2^(R/W)`).
pub(crate) fn alpha_kernel(x: f64, ls: f64) -> f64 {
    x / (1.0 + math::sqrt(1.0 + ls * x))
}

/// Right side of the scalar fixed-point equation: the combined SNR obtained
/// when every ratio tracks the candidate value `snr` through the
/// stationarity condition. Ratios above 1 are deliberately not clamped here;
/// the recovery step rejects them after the root is found.
fn fixed_point_rhs(snrs: &[f64], coherence_symbols: f64, snr: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &s in snrs {
        let theta = math::sqrt(1.0 + coherence_symbols * s * (snr + 1.0));
        let alpha = (snr + 1.0) / (1.0 + theta);
        num += (1.0 - alpha) * s * ((theta - 1.0) / theta);
        den += s / theta;
    }
    num / (den + snrs.len() as f64)
}

fn validate_power(scenario: &Scenario, tx_power_w: f64) -> Result<()> {
    if !(tx_power_w.is_finite() && tx_power_w > 0.0) {
        return Err(Error::Domain {
            what: "tx_power_w",
            value: tx_power_w,
        });
    }
    let ceiling = scenario.config().max_tx_power_w();
    if tx_power_w > ceiling * (1.0 + 1e-12) {
        return Err(Error::Domain {
            what: "tx_power_w above max_tx_power_dbm",
            value: tx_power_w,
        });
    }
    Ok(())
}

/// Locates the sub-bracket holding the unique sign change of `h`, sampling
/// the bracket at thirds. The fixed point is unique when the objective is
/// concave; more than one sign change means that assumption broke and the
/// scenario must be reported, not guessed around.
pub(crate) fn bracket_sign_change(
    samples: &[(f64, f64)],
) -> core::result::Result<(f64, f64), Error> {
    let mut change: Option<(f64, f64)> = None;
    let mut changes = 0;
    for pair in samples.windows(2) {
        let (x0, h0) = pair[0];
        let (x1, h1) = pair[1];
        if (h0 > 0.0) != (h1 > 0.0) {
            changes += 1;
            if change.is_none() {
                change = Some((x0, x1));
            }
        }
    }
    match (changes, change) {
        (1, Some(bracket)) => Ok(bracket),
        (0, _) => Err(Error::BracketFailure {
            samples: samples.to_vec(),
        }),
        _ => Err(Error::MultipleRoots {
            samples: samples.to_vec(),
        }),
    }
}

/// Maximizes the combined SNR over the ratio vector at fixed transmit power
/// by solving the fixed-point equation with bracketed bisection.
///
/// `tol` is absolute in linear SNR; the reported per-station residuals are
/// bounded by it. The bracket is `[0, sum(SNR_m)]`: the right side is
/// positive at 0 and the sum is a hard upper bound on the combined SNR.
pub fn solve_se_precise(scenario: &Scenario, tx_power_w: f64, tol: f64) -> Result<SeSolution> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
        });
    }
    validate_power(scenario, tx_power_w)?;
    let state = LinkState::from_scenario(scenario, tx_power_w)?;
    let snrs = state.snrs();
    let l = state.coherence_symbols() as f64;

    let upper: f64 = snrs.iter().sum();
    let h = |s: f64| fixed_point_rhs(snrs, l, s) - s;
    let samples: Vec<(f64, f64)> = [0.0, upper / 3.0, 2.0 * upper / 3.0, upper]
        .iter()
        .map(|&s| (s, h(s)))
        .collect();
    let (mut lo, mut hi) = bracket_sign_change(&samples)?;

    let mut iterations = 0;
    let root = loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let h_mid = h(mid);
        if h_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= tol && h_mid.abs() <= 0.5 * tol {
            break mid;
        }
        if iterations >= MAX_BISECTIONS {
            return Err(Error::NoConvergence {
                best: mid,
                residual: h_mid,
                iterations,
            });
        }
    };

    finish_solution(
        scenario,
        &state,
        root,
        SolveMethod::Precise,
        iterations,
        None,
    )
}

/// Closed-form approximate SE optimum, valid when `L*SNR_m` is large.
///
/// Solves `M*x^2 + b*x - c = 0` for `x = sqrt(SNR+1)` with
/// `b = sum 2*SNR_m/sqrt(L*SNR_m)` and `c = sum ((L*SNR_m + 2)/L + 1)`,
/// keeping the positive root. The reported capacity is `2*W*log2(x)`.
pub fn solve_se_approx(scenario: &Scenario, tx_power_w: f64) -> Result<SeSolution> {
    validate_power(scenario, tx_power_w)?;
    let state = LinkState::from_scenario(scenario, tx_power_w)?;
    let snrs = state.snrs();
    let l = state.coherence_symbols() as f64;
    let m = snrs.len() as f64;

    let b: f64 = snrs.iter().map(|&s| 2.0 * s / math::sqrt(l * s)).sum();
    let c: f64 = snrs.iter().map(|&s| (l * s + 2.0) / l + 1.0).sum();
    let x = (-b + math::sqrt(b * b + 4.0 * m * c)) / (2.0 * m);
    if !(x.is_finite() && x > 1.0) {
        return Err(Error::ApproximationDomain(
            "approximate SE optimum is nonpositive at this operating point; use solve_se_precise",
        ));
    }
    let snr_star = x * x - 1.0;
    let capacity = 2.0 * scenario.config().bandwidth_hz * math::log2(x);

    finish_solution(
        scenario,
        &state,
        snr_star,
        SolveMethod::Approximate,
        0,
        Some(capacity),
    )
}

/// Recovers the ratio vector from the solved SNR, evaluates what it actually
/// achieves, and assembles the solution with stationarity residuals.
fn finish_solution(
    scenario: &Scenario,
    state: &LinkState,
    solved_snr: f64,
    method: SolveMethod,
    iterations: u32,
    capacity_override: Option<f64>,
) -> Result<SeSolution> {
    let snrs = state.snrs();
    let l = state.coherence_symbols();
    let lf = l as f64;

    let mut alphas = Vec::with_capacity(snrs.len());
    for &s in snrs {
        alphas.push(alpha_from_target_snr(solved_snr, s, l)?);
    }

    let optimal_snr = match method {
        // the precise path reports what the recovered ratios achieve
        SolveMethod::Precise => metrics::combined_snr_raw(&alphas, snrs, lf),
        _ => solved_snr,
    };
    let capacity_bps = capacity_override
        .unwrap_or_else(|| metrics::capacity_bps(scenario.config().bandwidth_hz, optimal_snr));
    let residuals: Vec<f64> = alphas
        .iter()
        .zip(snrs)
        .map(|(&a, &s)| optimal_snr - (a * a * lf * s + 2.0 * a - 1.0))
        .collect();
    let allocation =
        PilotAllocation::new(alphas).expect("recovered ratios are strictly inside (0, 1)");

    Ok(SeSolution {
        method,
        optimal_snr,
        capacity_bps,
        allocation,
        residuals,
        iterations,
    })
}

/// Search-path constructor shared with the stochastic baseline.
pub(crate) fn search_solution(
    scenario: &Scenario,
    state: &LinkState,
    alphas: Vec<f64>,
    best_snr: f64,
    evaluations: u32,
) -> SeSolution {
    let lf = state.coherence_symbols() as f64;
    let residuals: Vec<f64> = alphas
        .iter()
        .zip(state.snrs())
        .map(|(&a, &s)| best_snr - (a * a * lf * s + 2.0 * a - 1.0))
        .collect();
    SeSolution {
        method: SolveMethod::Search,
        optimal_snr: best_snr,
        capacity_bps: metrics::capacity_bps(scenario.config().bandwidth_hz, best_snr),
        allocation: PilotAllocation::new(alphas).expect("search keeps ratios inside (0, 1)"),
        residuals,
        iterations: evaluations,
    }
}
