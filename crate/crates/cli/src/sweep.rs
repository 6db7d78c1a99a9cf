//! Experiment sweeps: power, rate and ratio grids evaluated per scheme,
//! assembled into deterministic CSV tables.
//!
//! Sweep points are independent and evaluated in parallel; output order and
//! bytes depend only on the inputs and the seed. A row is emitted for every
//! point regardless of its status.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use pilotopt_core::baselines::{stochastic_search_ee, stochastic_search_se, traditional_scheme, SearchBudget};
use pilotopt_core::channel::{dbm_to_watt, watt_to_dbm, Scenario};
use pilotopt_core::ee::{solve_ee_approx, solve_ee_precise, EeSolution};
use pilotopt_core::metrics::{capacity_bps, energy_efficiency, required_snr, spectral_efficiency};
use pilotopt_core::se::{solve_se_approx, solve_se_precise, SeSolution};
use pilotopt_core::Error as CoreError;
use rayon::prelude::*;

/// Comparison schemes a sweep can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scheme {
    /// Precise optimization (root finding).
    Pos,
    /// Approximate optimization (closed form).
    Aos,
    /// Seeded stochastic search.
    Gas,
    /// Uniform ratio without optimization, one curve per requested ratio.
    Ts,
}

impl Scheme {
    fn label(self) -> &'static str {
        match self {
            Scheme::Pos => "pos",
            Scheme::Aos => "aos",
            Scheme::Gas => "gas",
            Scheme::Ts => "ts",
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pos" => Ok(Scheme::Pos),
            "aos" => Ok(Scheme::Aos),
            "gas" => Ok(Scheme::Gas),
            "ts" => Ok(Scheme::Ts),
            other => Err(format!("unknown scheme `{other}` (expected pos, aos, gas or ts)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    PowerSweep,
    RateSweep,
    AlphaSweep,
}

/// Stochastic-search sizing shared by every GAS point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    pub population: usize,
    pub generations: usize,
    pub mutation_scale: f64,
}

impl Default for GasParams {
    fn default() -> Self {
        GasParams {
            population: 50,
            generations: 100,
            mutation_scale: 0.05,
        }
    }
}

/// Everything a sweep needs besides the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub schemes: Vec<Scheme>,
    pub ts_alphas: Vec<f64>,
    pub seed: u64,
    pub tol: f64,
    pub gas: GasParams,
}

impl SweepSpec {
    /// Canonicalizes scheme order and the ratio list, then checks bounds.
    fn validated(&self, expected: SweepKind) -> Result<SweepSpec, SweepError> {
        let mut spec = self.clone();
        if spec.kind != expected {
            return Err(SweepError::Spec(format!(
                "sweep kind {:?} does not match {:?}",
                spec.kind, expected
            )));
        }
        if !(spec.start.is_finite() && spec.stop.is_finite() && spec.start < spec.stop) {
            return Err(SweepError::Spec(format!(
                "start {} must be below stop {}",
                spec.start, spec.stop
            )));
        }
        if spec.points < 2 {
            return Err(SweepError::Spec(format!(
                "a sweep needs at least 2 points, got {}",
                spec.points
            )));
        }
        if spec.kind == SweepKind::AlphaSweep && !(spec.start > 0.0 && spec.stop < 1.0) {
            return Err(SweepError::Spec(
                "ratio grid must stay strictly inside (0, 1)".into(),
            ));
        }
        spec.schemes.sort();
        spec.schemes.dedup();
        if spec.kind != SweepKind::AlphaSweep && spec.schemes.is_empty() {
            return Err(SweepError::Spec("schemes must not be empty".into()));
        }
        spec.ts_alphas.sort_by(f64::total_cmp);
        spec.ts_alphas.dedup();
        if spec.schemes.contains(&Scheme::Ts) {
            if spec.ts_alphas.is_empty() {
                return Err(SweepError::Spec(
                    "the ts scheme needs at least one ratio in ts_alphas".into(),
                ));
            }
            for &a in &spec.ts_alphas {
                if !(0.0..=1.0).contains(&a) {
                    return Err(SweepError::Spec(format!("ts ratio {a} outside [0, 1]")));
                }
            }
        }
        if !(spec.tol.is_finite() && spec.tol > 0.0) {
            return Err(SweepError::Spec(format!("tol must be positive, got {}", spec.tol)));
        }
        // fail fast on bad search sizing instead of erroring per point
        SearchBudget::new(
            spec.gas.population,
            spec.gas.generations,
            spec.seed,
            spec.gas.mutation_scale,
        )
        .map_err(|e| SweepError::Spec(e.to_string()))?;
        Ok(spec)
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn budget_for_point(&self, index: usize) -> SearchBudget {
        SearchBudget::new(
            self.gas.population,
            self.gas.generations,
            point_seed(self.seed, index as u64),
            self.gas.mutation_scale,
        )
        .expect("sweep spec validated the budget")
    }
}

/// Outcome of one sweep point. Severity grows with the variant order; a
/// row's status is the worst outcome among its requested schemes, with the
/// failed cells written as `nan`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowStatus {
    Ok,
    ApproxDomainError,
    Infeasible,
    SolverError,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::ApproxDomainError => "approx_domain_error",
            RowStatus::Infeasible => "infeasible",
            RowStatus::SolverError => "solver_error",
        }
    }

    /// Numeric encoding for the plain plot-data format.
    pub fn code(self) -> u8 {
        match self {
            RowStatus::Ok => 0,
            RowStatus::ApproxDomainError => 1,
            RowStatus::Infeasible => 2,
            RowStatus::SolverError => 3,
        }
    }
}

fn status_of(err: &CoreError) -> RowStatus {
    match err {
        CoreError::RateUnreachable { .. } | CoreError::PilotRatioOutOfRange { .. } => {
            RowStatus::Infeasible
        }
        CoreError::ApproximationDomain(_) => RowStatus::ApproxDomainError,
        _ => RowStatus::SolverError,
    }
}

/// One sweep point: the x value, one entry per table column (`None` prints
/// as `nan`), and the point status.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x_value: f64,
    pub values: Vec<Option<f64>>,
    pub status: RowStatus,
}

/// Column-labelled sweep result; one row per grid point, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub x_label: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Comma-separated, `.` decimal point, header first, status column last.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = String::from(self.x_label);
        for column in &self.columns {
            let _ = write!(header, ",{column}");
        }
        writeln!(out, "{header},status")?;
        for row in &self.rows {
            debug_assert_eq!(row.values.len(), self.columns.len());
            let mut line = fmt_cell(Some(row.x_value));
            for value in &row.values {
                let _ = write!(line, ",{}", fmt_cell(*value));
            }
            writeln!(out, "{line},{}", row.status.as_str())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    /// Plain numeric matrix for plotting scripts: space-separated, no
    /// header, one row per point, the status as its integer code in the
    /// last column. The companion manifest lists `index name` per column.
    pub fn write_plot_data<D: Write, M: Write>(
        &self,
        mut data: D,
        mut manifest: M,
    ) -> io::Result<()> {
        for (index, name) in std::iter::once(self.x_label)
            .chain(self.columns.iter().map(String::as_str))
            .enumerate()
        {
            writeln!(manifest, "{} {name}", index + 1)?;
        }
        writeln!(
            manifest,
            "{} status_code (0=ok 1=approx_domain_error 2=infeasible 3=solver_error)",
            self.columns.len() + 2
        )?;
        for row in &self.rows {
            let mut line = fmt_cell(Some(row.x_value));
            for value in &row.values {
                let _ = write!(line, " {}", fmt_cell(*value));
            }
            writeln!(data, "{line} {}", row.status.code())?;
        }
        Ok(())
    }

    pub fn count_status(&self, status: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }
}

fn fmt_cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "nan".into(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep spec: {0}")]
    Spec(String),
}

fn point_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn push_missing(values: &mut Vec<Option<f64>>, count: usize) {
    values.extend(std::iter::repeat_n(None, count));
}

fn se_cells(values: &mut Vec<Option<f64>>, sol: &SeSolution) {
    values.push(Some(sol.capacity_bps));
    values.push(Some(sol.optimal_snr));
    for &a in sol.allocation.ratios() {
        values.push(Some(a));
    }
}

fn ee_cells(values: &mut Vec<Option<f64>>, sol: &EeSolution) {
    values.push(Some(sol.min_tx_power_w));
    values.push(watt_to_dbm(sol.min_tx_power_w).ok());
    values.push(Some(sol.energy_efficiency_bit_per_joule));
    for &a in sol.allocation.ratios() {
        values.push(Some(a));
    }
}

fn per_bs_columns(columns: &mut Vec<String>, scheme: Scheme, num_bs: usize) {
    for i in 1..=num_bs {
        columns.push(format!("{}_alpha_bs{i}", scheme.label()));
    }
}

fn ts_label(alpha: f64, what: &str) -> String {
    format!("ts{alpha:.3}_{what}")
}

/// Achievable rate per scheme over a transmit-power grid (dBm on the axis,
/// watts in the table).
pub fn run_power_sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    let spec = spec.validated(SweepKind::PowerSweep)?;
    let m = scenario.num_bs();

    let mut columns = vec!["power_w".to_string()];
    for &scheme in &spec.schemes {
        match scheme {
            Scheme::Pos | Scheme::Aos | Scheme::Gas => {
                columns.push(format!("{}_rate_bps", scheme.label()));
                columns.push(format!("{}_snr", scheme.label()));
                per_bs_columns(&mut columns, scheme, m);
            }
            Scheme::Ts => {
                for &a in &spec.ts_alphas {
                    columns.push(ts_label(a, "rate_bps"));
                }
            }
        }
    }

    let w = scenario.config().bandwidth_hz;
    let rows: Vec<SweepRow> = spec
        .grid()
        .par_iter()
        .enumerate()
        .map(|(index, &p_dbm)| {
            let p_w = dbm_to_watt(p_dbm);
            let mut values = vec![Some(p_w)];
            let mut status = RowStatus::Ok;
            for &scheme in &spec.schemes {
                match scheme {
                    Scheme::Pos => match solve_se_precise(scenario, p_w, spec.tol) {
                        Ok(sol) => se_cells(&mut values, &sol),
                        Err(e) => {
                            push_missing(&mut values, 2 + m);
                            status = status.max(status_of(&e));
                        }
                    },
                    Scheme::Aos => match solve_se_approx(scenario, p_w) {
                        Ok(sol) => se_cells(&mut values, &sol),
                        Err(e) => {
                            push_missing(&mut values, 2 + m);
                            status = status.max(status_of(&e));
                        }
                    },
                    Scheme::Gas => {
                        match stochastic_search_se(scenario, p_w, &spec.budget_for_point(index)) {
                            Ok(sol) => se_cells(&mut values, &sol),
                            Err(e) => {
                                push_missing(&mut values, 2 + m);
                                status = status.max(status_of(&e));
                            }
                        }
                    }
                    Scheme::Ts => {
                        for &a in &spec.ts_alphas {
                            match traditional_scheme(scenario, p_w, a) {
                                Ok(snr) => values.push(Some(capacity_bps(w, snr))),
                                Err(e) => {
                                    values.push(None);
                                    status = status.max(status_of(&e));
                                }
                            }
                        }
                    }
                }
            }
            SweepRow {
                x_value: p_dbm,
                values,
                status,
            }
        })
        .collect();

    Ok(SweepTable {
        x_label: "power_dbm",
        columns,
        rows,
    })
}

/// Minimal power and the resulting energy efficiency per scheme over a grid
/// of required spectral efficiencies (bit/s/Hz on the axis; the rate target
/// is `x * W`).
pub fn run_rate_sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    let spec = spec.validated(SweepKind::RateSweep)?;
    let m = scenario.num_bs();
    let config = scenario.config();
    let w = config.bandwidth_hz;

    let mut columns = vec!["rate_target_bps".to_string()];
    for &scheme in &spec.schemes {
        match scheme {
            Scheme::Pos | Scheme::Aos | Scheme::Gas => {
                columns.push(format!("{}_power_w", scheme.label()));
                columns.push(format!("{}_power_dbm", scheme.label()));
                columns.push(format!("{}_ee_bit_per_joule", scheme.label()));
                per_bs_columns(&mut columns, scheme, m);
            }
            Scheme::Ts => {
                for &a in &spec.ts_alphas {
                    columns.push(ts_label(a, "power_w"));
                    columns.push(ts_label(a, "ee_bit_per_joule"));
                }
            }
        }
    }

    let rows: Vec<SweepRow> = spec
        .grid()
        .par_iter()
        .enumerate()
        .map(|(index, &se_target)| {
            let rate = se_target * w;
            let target_snr = required_snr(rate, w);
            let mut values = vec![Some(rate)];
            let mut status = RowStatus::Ok;
            for &scheme in &spec.schemes {
                match scheme {
                    Scheme::Pos => match solve_ee_precise(scenario, rate, spec.tol) {
                        Ok(sol) => ee_cells(&mut values, &sol),
                        Err(e) => {
                            push_missing(&mut values, 3 + m);
                            status = status.max(status_of(&e));
                        }
                    },
                    Scheme::Aos => match solve_ee_approx(scenario, rate) {
                        Ok(sol) => ee_cells(&mut values, &sol),
                        Err(e) => {
                            push_missing(&mut values, 3 + m);
                            status = status.max(status_of(&e));
                        }
                    },
                    Scheme::Gas => {
                        match stochastic_search_ee(scenario, rate, &spec.budget_for_point(index)) {
                            Ok(sol) => ee_cells(&mut values, &sol),
                            Err(e) => {
                                push_missing(&mut values, 3 + m);
                                status = status.max(status_of(&e));
                            }
                        }
                    }
                    Scheme::Ts => {
                        for &a in &spec.ts_alphas {
                            match min_power_for_uniform_alpha(scenario, a, target_snr, spec.tol) {
                                Ok(Some(p)) => {
                                    values.push(Some(p));
                                    values.push(Some(energy_efficiency(rate, p, config)));
                                }
                                Ok(None) => {
                                    push_missing(&mut values, 2);
                                    status = status.max(RowStatus::Infeasible);
                                }
                                Err(e) => {
                                    push_missing(&mut values, 2);
                                    status = status.max(status_of(&e));
                                }
                            }
                        }
                    }
                }
            }
            SweepRow {
                x_value: se_target,
                values,
                status,
            }
        })
        .collect();

    Ok(SweepTable {
        x_label: "se_target_bit_per_s_per_hz",
        columns,
        rows,
    })
}

/// How the energy-efficiency column of a ratio sweep is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaSweepEeMode {
    /// Minimal power reaching `target_rate_bps` with the row's fixed ratio.
    MinPowerForRate,
    /// Efficiency of whatever rate the fixed ratio achieves at `tx_power_w`.
    FixedPower,
}

/// Spectral and energy efficiency of the uniform-ratio scheme over a ratio
/// grid, with the grid argmax of each column marked.
pub fn run_alpha_sweep(
    scenario: &Scenario,
    spec: &SweepSpec,
    tx_power_w: f64,
    target_rate_bps: f64,
    ee_mode: AlphaSweepEeMode,
) -> Result<SweepTable, SweepError> {
    let spec = spec.validated(SweepKind::AlphaSweep)?;
    let config = scenario.config();
    let w = config.bandwidth_hz;
    let target_snr = required_snr(target_rate_bps, w);

    let columns: Vec<String> = [
        "se_bit_per_s_per_hz",
        "ee_bit_per_joule",
        "ee_power_w",
        "ee_power_dbm",
        "is_se_argmax",
        "is_ee_argmax",
    ]
    .into_iter()
    .map(String::from)
    .collect();

    let mut rows: Vec<SweepRow> = spec
        .grid()
        .par_iter()
        .map(|&alpha| {
            let mut values: Vec<Option<f64>> = Vec::with_capacity(columns.len());
            let mut status = RowStatus::Ok;
            match traditional_scheme(scenario, tx_power_w, alpha) {
                Ok(snr) => values.push(Some(spectral_efficiency(snr))),
                Err(e) => {
                    values.push(None);
                    status = status.max(status_of(&e));
                }
            }
            match ee_mode {
                AlphaSweepEeMode::MinPowerForRate => {
                    match min_power_for_uniform_alpha(scenario, alpha, target_snr, spec.tol) {
                        Ok(Some(p)) => {
                            values.push(Some(energy_efficiency(target_rate_bps, p, config)));
                            values.push(Some(p));
                            values.push(watt_to_dbm(p).ok());
                        }
                        Ok(None) => {
                            push_missing(&mut values, 3);
                            status = status.max(RowStatus::Infeasible);
                        }
                        Err(e) => {
                            push_missing(&mut values, 3);
                            status = status.max(status_of(&e));
                        }
                    }
                }
                AlphaSweepEeMode::FixedPower => match traditional_scheme(scenario, tx_power_w, alpha)
                {
                    Ok(snr) => {
                        let achieved = capacity_bps(w, snr);
                        values.push(Some(energy_efficiency(achieved, tx_power_w, config)));
                        values.push(Some(tx_power_w));
                        values.push(watt_to_dbm(tx_power_w).ok());
                    }
                    Err(e) => {
                        push_missing(&mut values, 3);
                        status = status.max(status_of(&e));
                    }
                },
            }
            values.push(Some(0.0));
            values.push(Some(0.0));
            SweepRow {
                x_value: alpha,
                values,
                status,
            }
        })
        .collect();

    mark_argmax(&mut rows, 0, 4);
    mark_argmax(&mut rows, 1, 5);

    Ok(SweepTable {
        x_label: "alpha",
        columns,
        rows,
    })
}

fn mark_argmax(rows: &mut [SweepRow], value_index: usize, flag_index: usize) {
    let best = rows
        .iter()
        .enumerate()
        .filter_map(|(i, row)| row.values[value_index].map(|v| (i, v)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((i, _)) = best {
        rows[i].values[flag_index] = Some(1.0);
    }
}

/// Minimal transmit power at which the uniform ratio `alpha` reaches
/// `target_snr`, or `None` when even the power ceiling falls short. The
/// lower bracket end `target/(sum g * L)` cannot be feasible, so bisection
/// on the monotone feasibility boundary applies.
pub fn min_power_for_uniform_alpha(
    scenario: &Scenario,
    alpha: f64,
    target_snr: f64,
    tol: f64,
) -> Result<Option<f64>, CoreError> {
    let config = scenario.config();
    let p_max = config.max_tx_power_w();
    if traditional_scheme(scenario, p_max, alpha)? < target_snr {
        return Ok(None);
    }
    let sum_g: f64 = scenario.snr_per_watt().iter().sum();
    let mut lo = target_snr / (sum_g * config.coherence_symbols as f64);
    let mut hi = p_max;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let snr = traditional_scheme(scenario, mid, alpha)?;
        if snr < target_snr {
            lo = mid;
        } else {
            hi = mid;
        }
        if (snr - target_snr).abs() <= 0.5 * tol * target_snr || (hi - lo) <= hi * 1e-15 {
            break;
        }
    }
    Ok(Some(hi))
}
