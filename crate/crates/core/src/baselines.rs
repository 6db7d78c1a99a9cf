//! Comparison schemes the optimizers are validated against: the uniform
//! pilot ratio and a seeded stochastic search over the ratio vector.
//!
//! The search exists to confirm the closed-form and root-finding paths, not
//! to compete with them: its only contract is reaching the same optimum
//! within tolerance, deterministically for a given seed.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::Scenario;
use crate::ee::EeSolution;
use crate::metrics::{self, LinkState, PilotAllocation};
use crate::se::SeSolution;
use crate::{Error, Result};

/// Hard cap on `population * generations` for one search.
pub const MAX_EVALUATIONS: usize = 10_000_000;

/// Ratios are kept strictly inside (0, 1); the boundary scores zero anyway.
const RATIO_FLOOR: f64 = 1e-12;
const RATIO_CEIL: f64 = 1.0 - 1e-12;

/// The mutation scale anneals down to this fraction of its initial value
/// over the generations, so late generations refine rather than explore.
const ANNEAL_FLOOR: f64 = 1e-3;

/// Outer bisection steps for the rate-constrained search.
const POWER_BISECTIONS: u32 = 60;

/// Size and seeding of one stochastic search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBudget {
    population: usize,
    generations: usize,
    seed: u64,
    mutation_scale: f64,
}

impl SearchBudget {
    pub fn new(
        population: usize,
        generations: usize,
        seed: u64,
        mutation_scale: f64,
    ) -> Result<Self> {
        if population < 2 {
            return Err(Error::Domain {
                what: "population",
                value: population as f64,
            });
        }
        if generations < 1 {
            return Err(Error::Domain {
                what: "generations",
                value: generations as f64,
            });
        }
        if !(mutation_scale.is_finite() && mutation_scale > 0.0) {
            return Err(Error::Domain {
                what: "mutation_scale",
                value: mutation_scale,
            });
        }
        if population.saturating_mul(generations) > MAX_EVALUATIONS {
            return Err(Error::Domain {
                what: "population * generations",
                value: (population as f64) * (generations as f64),
            });
        }
        Ok(SearchBudget {
            population,
            generations,
            seed,
            mutation_scale,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn population(&self) -> usize {
        self.population
    }

    pub fn generations(&self) -> usize {
        self.generations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mutation_scale(&self) -> f64 {
        self.mutation_scale
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(50, 100, 0, 0.05).expect("default budget is valid")
    }
}

/// The same ratio at every station, no optimization: the scheme everything
/// else is measured against. Returns the combined SNR.
pub fn traditional_scheme(
    scenario: &Scenario,
    tx_power_w: f64,
    alpha_uniform: f64,
) -> Result<f64> {
    let state = LinkState::from_scenario(scenario, tx_power_w)?;
    let alloc = PilotAllocation::uniform(alpha_uniform, state.num_bs())?;
    metrics::combined_snr(&alloc, &state)
}

/// Evolutionary maximization of the combined SNR over the ratio vector:
/// tournament selection, Gaussian mutation clipped into (0, 1), and an
/// elitist survivor, with the mutation scale annealed across generations.
/// Bit-identical results for identical inputs and seed.
pub fn stochastic_search_se(
    scenario: &Scenario,
    tx_power_w: f64,
    budget: &SearchBudget,
) -> Result<SeSolution> {
    let state = LinkState::from_scenario(scenario, tx_power_w)?;
    let snrs = state.snrs().to_vec();
    let lf = state.coherence_symbols() as f64;
    let num_bs = snrs.len();
    let fitness = |ratios: &[f64]| metrics::combined_snr_raw(ratios, &snrs, lf);

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut evaluations: u32 = 0;
    // A few log-spaced uniform-ratio candidates put the population in the
    // right basin from generation zero; the rest start random.
    let seeded = (budget.population / 2).min(8);
    let mut population: Vec<(Vec<f64>, f64)> = (0..budget.population)
        .map(|index| {
            let genome: Vec<f64> = if index < seeded {
                let span = seeded.saturating_sub(1).max(1) as f64;
                let alpha = 0.5 * crate::math::pow10(-4.0 + 4.0 * index as f64 / span);
                vec![alpha.clamp(RATIO_FLOOR, RATIO_CEIL); num_bs]
            } else {
                (0..num_bs)
                    .map(|_| rng.random::<f64>().clamp(RATIO_FLOOR, RATIO_CEIL))
                    .collect()
            };
            let fit = fitness(&genome);
            evaluations += 1;
            (genome, fit)
        })
        .collect();

    let span = budget.generations.saturating_sub(1).max(1) as f64;
    for generation in 0..budget.generations {
        let sigma = budget.mutation_scale
            * crate::math::powf(ANNEAL_FLOOR, generation as f64 / span);
        let elite = population
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .unwrap_or(0);

        let mut next = Vec::with_capacity(budget.population);
        next.push(population[elite].clone());
        while next.len() < budget.population {
            let parent = tournament(&mut rng, &population);
            let child: Vec<f64> = population[parent]
                .0
                .iter()
                .map(|&a| {
                    let z: f64 = rng.sample(StandardNormal);
                    (a + sigma * z).clamp(RATIO_FLOOR, RATIO_CEIL)
                })
                .collect();
            let fit = fitness(&child);
            evaluations += 1;
            next.push((child, fit));
        }
        population = next;
    }

    let (best_genome, best_fit) = population
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("population is never empty");
    Ok(crate::se::search_solution(
        scenario,
        &state,
        best_genome,
        best_fit,
        evaluations,
    ))
}

/// Minimal transmit power meeting the rate target, found by bisecting the
/// power with a stochastic SE search as the feasibility probe at each step.
/// Each probe is reseeded deterministically from the budget seed and the
/// bisection step, so the result is reproducible.
pub fn stochastic_search_ee(
    scenario: &Scenario,
    target_rate_bps: f64,
    budget: &SearchBudget,
) -> Result<EeSolution> {
    if !(target_rate_bps.is_finite() && target_rate_bps > 0.0) {
        return Err(Error::Domain {
            what: "target_rate_bps",
            value: target_rate_bps,
        });
    }
    let config = scenario.config();
    let target = metrics::required_snr(target_rate_bps, config.bandwidth_hz);
    let p_max = config.max_tx_power_w();
    let sum_g: f64 = scenario.snr_per_watt().iter().sum();
    let l = config.coherence_symbols as f64;

    let probe = |p: f64, step: u64| {
        stochastic_search_se(scenario, p, &budget.clone().with_seed(probe_seed(budget.seed, step)))
    };

    let at_ceiling = probe(p_max, 0)?;
    if at_ceiling.optimal_snr < target {
        return Err(Error::RateUnreachable {
            max_power_w: p_max,
            achievable_snr: at_ceiling.optimal_snr,
            achievable_rate_bps: metrics::capacity_bps(
                config.bandwidth_hz,
                at_ceiling.optimal_snr,
            ),
        });
    }

    // Same guaranteed-infeasible lower end as the precise solver.
    let mut lo = target / (sum_g * l);
    let mut hi = p_max;
    let mut best = at_ceiling;
    for step in 1..=POWER_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let sol = probe(mid, step as u64)?;
        if sol.optimal_snr >= target {
            hi = mid;
            best = sol;
        } else {
            lo = mid;
        }
        if (hi - lo) <= hi * 1e-12 {
            break;
        }
    }

    Ok(crate::ee::search_solution(
        scenario,
        hi,
        best.allocation,
        best.optimal_snr,
        target_rate_bps,
    ))
}

fn tournament(rng: &mut ChaCha8Rng, population: &[(Vec<f64>, f64)]) -> usize {
    let mut best = rng.random_range(0..population.len());
    for _ in 0..2 {
        let challenger = rng.random_range(0..population.len());
        if population[challenger].1 > population[best].1 {
            best = challenger;
        }
    }
    best
}

fn probe_seed(seed: u64, step: u64) -> u64 {
    seed.wrapping_add(step.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
