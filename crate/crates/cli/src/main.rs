//! `pilotopt` — solve pilot-ratio optimization problems from scenario files
//! and run the sweep experiments.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pilotopt_cli::sweep::{
    run_alpha_sweep, run_power_sweep, run_rate_sweep, AlphaSweepEeMode, GasParams, RowStatus,
    Scheme, SweepKind, SweepSpec, SweepTable,
};
use pilotopt_cli::{load_scenario, ScenarioFileError};
use pilotopt_core::channel::{dbm_to_watt, watt_to_dbm};
use pilotopt_core::ee::{solve_ee_approx, solve_ee_precise, EeSolution};
use pilotopt_core::metrics::spectral_efficiency;
use pilotopt_core::se::{solve_se_approx, solve_se_precise, SeSolution};
use pilotopt_core::Error as CoreError;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "pilotopt",
    version,
    about = "Pilot-ratio optimization and sweep harness for cooperative uplinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize spectral efficiency at a fixed transmit power
    SolveSe {
        /// Scenario file (TOML)
        scenario: PathBuf,
        /// Transmit power in dBm
        #[arg(long)]
        power_dbm: f64,
        #[command(flatten)]
        method: MethodFlags,
        /// Solver tolerance (absolute in linear SNR)
        #[arg(long, default_value_t = pilotopt_core::se::DEFAULT_TOL)]
        tol: f64,
    },
    /// Minimize transmit power for a required uplink rate
    SolveEe {
        /// Scenario file (TOML)
        scenario: PathBuf,
        /// Required rate in Mbit/s
        #[arg(long)]
        rate_mbps: f64,
        #[command(flatten)]
        method: MethodFlags,
        /// Solver tolerance (relative to the SNR target)
        #[arg(long, default_value_t = pilotopt_core::ee::DEFAULT_TOL)]
        tol: f64,
    },
    /// Achievable rate per scheme over a transmit-power grid
    PowerSweep {
        /// Scenario file (TOML)
        scenario: PathBuf,
        /// First grid point in dBm
        #[arg(long, default_value_t = 20.0)]
        start: f64,
        /// Last grid point in dBm
        #[arg(long, default_value_t = 46.0)]
        stop: f64,
        #[arg(long, default_value_t = 27)]
        points: usize,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Minimal power and energy efficiency per scheme over a grid of
    /// required spectral efficiencies
    RateSweep {
        /// Scenario file (TOML)
        scenario: PathBuf,
        /// First required SE in bit/s/Hz
        #[arg(long, default_value_t = 1.0)]
        start: f64,
        /// Last required SE in bit/s/Hz
        #[arg(long, default_value_t = 8.0)]
        stop: f64,
        #[arg(long, default_value_t = 15)]
        points: usize,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Uniform-ratio SE and EE over a pilot-ratio grid
    AlphaSweep {
        /// Scenario file (TOML)
        scenario: PathBuf,
        /// First ratio, inside (0, 1)
        #[arg(long, default_value_t = 0.002)]
        start: f64,
        /// Last ratio, inside (0, 1)
        #[arg(long, default_value_t = 0.9)]
        stop: f64,
        #[arg(long, default_value_t = 150)]
        points: usize,
        /// Transmit power for the SE column, in dBm
        #[arg(long)]
        power_dbm: f64,
        /// Rate target for the EE column, in Mbit/s
        #[arg(long)]
        rate_mbps: f64,
        /// Evaluate EE at the fixed power instead of at the minimal power
        /// reaching the rate target
        #[arg(long)]
        ee_fixed_power: bool,
        #[command(flatten)]
        sweep: SweepFlags,
    },
}

#[derive(Args)]
struct MethodFlags {
    /// Run only the precise root-finding path
    #[arg(long, conflicts_with_all = ["approx", "both"])]
    precise: bool,
    /// Run only the closed-form approximation
    #[arg(long, conflicts_with = "both")]
    approx: bool,
    /// Run both paths (the default)
    #[arg(long)]
    both: bool,
}

impl MethodFlags {
    fn selection(&self) -> (bool, bool) {
        if self.precise {
            (true, false)
        } else if self.approx {
            (false, true)
        } else {
            (true, true)
        }
    }
}

#[derive(Args)]
struct SweepFlags {
    /// Schemes to evaluate
    #[arg(long, value_delimiter = ',', default_value = "pos,aos,gas,ts", value_parser = parse_scheme)]
    schemes: Vec<Scheme>,
    /// Uniform ratios for the ts curves
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    ts_alphas: Vec<f64>,
    /// Seed for the stochastic search
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write plain plot data (`<sweep>.dat` plus a `<sweep>.columns`
    /// manifest) into this directory
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    /// Solver tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    gas_population: usize,
    #[arg(long, default_value_t = 100)]
    gas_generations: usize,
    #[arg(long, default_value_t = 0.05)]
    gas_mutation_scale: f64,
}

impl SweepFlags {
    fn spec(&self, kind: SweepKind, start: f64, stop: f64, points: usize) -> SweepSpec {
        SweepSpec {
            kind,
            start,
            stop,
            points,
            schemes: self.schemes.clone(),
            ts_alphas: self.ts_alphas.clone(),
            seed: self.seed,
            tol: self.tol,
            gas: GasParams {
                population: self.gas_population,
                generations: self.gas_generations,
                mutation_scale: self.gas_mutation_scale,
            },
        }
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Solver(String),
    Infeasible(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Solver(_) => EXIT_SOLVER,
            Failure::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Solver(m) | Failure::Infeasible(m) => m,
        }
    }
}

impl From<ScenarioFileError> for Failure {
    fn from(e: ScenarioFileError) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Infeasibility is a result, not a malfunction; everything else that the
/// solvers report is a solver failure.
fn classify(err: &CoreError) -> Failure {
    match err {
        CoreError::RateUnreachable { .. } | CoreError::PilotRatioOutOfRange { .. } => {
            Failure::Infeasible(err.to_string())
        }
        _ => Failure::Solver(err.to_string()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::SolveSe {
            scenario,
            power_dbm,
            method,
            tol,
        } => cmd_solve_se(&scenario, power_dbm, &method, tol),
        Command::SolveEe {
            scenario,
            rate_mbps,
            method,
            tol,
        } => cmd_solve_ee(&scenario, rate_mbps, &method, tol),
        Command::PowerSweep {
            scenario,
            start,
            stop,
            points,
            sweep,
        } => {
            let scenario = load_scenario(&scenario)?;
            let spec = sweep.spec(SweepKind::PowerSweep, start, stop, points);
            let table = run_power_sweep(&scenario, &spec)
                .map_err(|e| Failure::Config(e.to_string()))?;
            emit_table(&table, sweep.out.as_deref(), sweep.plot_dir.as_deref(), "power_sweep")
        }
        Command::RateSweep {
            scenario,
            start,
            stop,
            points,
            sweep,
        } => {
            let scenario = load_scenario(&scenario)?;
            let spec = sweep.spec(SweepKind::RateSweep, start, stop, points);
            let table =
                run_rate_sweep(&scenario, &spec).map_err(|e| Failure::Config(e.to_string()))?;
            emit_table(&table, sweep.out.as_deref(), sweep.plot_dir.as_deref(), "rate_sweep")
        }
        Command::AlphaSweep {
            scenario,
            start,
            stop,
            points,
            power_dbm,
            rate_mbps,
            ee_fixed_power,
            sweep,
        } => {
            let scenario = load_scenario(&scenario)?;
            let spec = sweep.spec(SweepKind::AlphaSweep, start, stop, points);
            let mode = if ee_fixed_power {
                AlphaSweepEeMode::FixedPower
            } else {
                AlphaSweepEeMode::MinPowerForRate
            };
            let table = run_alpha_sweep(
                &scenario,
                &spec,
                dbm_to_watt(power_dbm),
                rate_mbps * 1e6,
                mode,
            )
            .map_err(|e| Failure::Config(e.to_string()))?;
            emit_table(&table, sweep.out.as_deref(), sweep.plot_dir.as_deref(), "alpha_sweep")
        }
    }
}

fn cmd_solve_se(
    path: &Path,
    power_dbm: f64,
    method: &MethodFlags,
    tol: f64,
) -> Result<ExitCode, Failure> {
    let scenario = load_scenario(path)?;
    let power_w = dbm_to_watt(power_dbm);
    let (precise, approx) = method.selection();
    let mut outcomes = Vec::new();
    if precise {
        outcomes.push(report_se("pos", solve_se_precise(&scenario, power_w, tol)));
    }
    if approx {
        outcomes.push(report_se("aos", solve_se_approx(&scenario, power_w)));
    }
    Ok(aggregate(outcomes))
}

fn cmd_solve_ee(
    path: &Path,
    rate_mbps: f64,
    method: &MethodFlags,
    tol: f64,
) -> Result<ExitCode, Failure> {
    let scenario = load_scenario(path)?;
    let rate_bps = rate_mbps * 1e6;
    let (precise, approx) = method.selection();
    let mut outcomes = Vec::new();
    if precise {
        outcomes.push(report_ee("pos", solve_ee_precise(&scenario, rate_bps, tol)));
    }
    if approx {
        outcomes.push(report_ee("aos", solve_ee_approx(&scenario, rate_bps)));
    }
    Ok(aggregate(outcomes))
}

fn report_se(
    scheme: &str,
    result: Result<SeSolution, CoreError>,
) -> Result<(), Failure> {
    match result {
        Ok(sol) => {
            let mut line = format!(
                "scheme={scheme} status=ok snr={} se_bit_per_s_per_hz={} capacity_bps={} \
                 iterations={} max_residual={}",
                sol.optimal_snr,
                spectral_efficiency(sol.optimal_snr),
                sol.capacity_bps,
                sol.iterations,
                sol.max_residual()
            );
            append_ratios(&mut line, sol.allocation.ratios());
            println!("{line}");
            Ok(())
        }
        Err(e) => {
            let failure = classify(&e);
            println!("scheme={scheme} status={} detail=\"{e}\"", status_word(&failure));
            Err(failure)
        }
    }
}

fn report_ee(
    scheme: &str,
    result: Result<EeSolution, CoreError>,
) -> Result<(), Failure> {
    match result {
        Ok(sol) => {
            let dbm = watt_to_dbm(sol.min_tx_power_w).expect("solved power is positive");
            let mut line = format!(
                "scheme={scheme} status=ok min_power_w={} min_power_dbm={dbm} \
                 ee_bit_per_joule={} achieved_snr={} target_rate_bps={}",
                sol.min_tx_power_w,
                sol.energy_efficiency_bit_per_joule,
                sol.achieved_snr,
                sol.target_rate_bps
            );
            append_ratios(&mut line, sol.allocation.ratios());
            println!("{line}");
            Ok(())
        }
        Err(e) => {
            let failure = classify(&e);
            let mut line = format!("scheme={scheme} status={}", status_word(&failure));
            if let CoreError::RateUnreachable {
                max_power_w,
                achievable_snr,
                achievable_rate_bps,
            } = &e
            {
                let _ = write!(
                    line,
                    " max_power_w={max_power_w} achievable_snr={achievable_snr} \
                     achievable_rate_bps={achievable_rate_bps}"
                );
            } else {
                let _ = write!(line, " detail=\"{e}\"");
            }
            println!("{line}");
            Err(failure)
        }
    }
}

fn status_word(failure: &Failure) -> &'static str {
    match failure {
        Failure::Infeasible(_) => "infeasible",
        _ => "solver_error",
    }
}

fn append_ratios(line: &mut String, ratios: &[f64]) {
    for (i, a) in ratios.iter().enumerate() {
        let _ = write!(line, " alpha_bs{}={a}", i + 1);
    }
}

/// All requested paths succeeded: 0. Any hard solver failure: 3.
/// Otherwise the only failures were infeasibility: 4.
fn aggregate(outcomes: Vec<Result<(), Failure>>) -> ExitCode {
    let mut saw_infeasible = false;
    for outcome in &outcomes {
        match outcome {
            Ok(()) => {}
            Err(Failure::Infeasible(_)) => saw_infeasible = true,
            Err(_) => return ExitCode::from(EXIT_SOLVER),
        }
    }
    if outcomes.iter().any(|o| o.is_err()) {
        if saw_infeasible {
            ExitCode::from(EXIT_INFEASIBLE)
        } else {
            ExitCode::from(EXIT_SOLVER)
        }
    } else {
        ExitCode::SUCCESS
    }
}

fn emit_table(
    table: &SweepTable,
    out: Option<&Path>,
    plot_dir: Option<&Path>,
    name: &str,
) -> Result<ExitCode, Failure> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
            table
                .write_csv(std::io::BufWriter::new(file))
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            let stdout = std::io::stdout();
            table
                .write_csv(stdout.lock())
                .map_err(|e| Failure::Config(format!("cannot write CSV: {e}")))?;
        }
    }

    if let Some(dir) = plot_dir {
        let write = || -> std::io::Result<()> {
            std::fs::create_dir_all(dir)?;
            let data = std::fs::File::create(dir.join(format!("{name}.dat")))?;
            let manifest = std::fs::File::create(dir.join(format!("{name}.columns")))?;
            table.write_plot_data(
                std::io::BufWriter::new(data),
                std::io::BufWriter::new(manifest),
            )
        };
        write().map_err(|e| {
            Failure::Config(format!("cannot write plot data to {}: {e}", dir.display()))
        })?;
    }

    let ok = table.count_status(RowStatus::Ok);
    let infeasible = table.count_status(RowStatus::Infeasible);
    let approx_domain = table.count_status(RowStatus::ApproxDomainError);
    let solver_err = table.count_status(RowStatus::SolverError);
    eprintln!(
        "{} rows: ok={ok} infeasible={infeasible} approx_domain_error={approx_domain} \
         solver_error={solver_err}",
        table.rows.len()
    );

    if ok > 0 {
        Ok(ExitCode::SUCCESS)
    } else if solver_err == 0 && approx_domain == 0 {
        Ok(ExitCode::from(EXIT_INFEASIBLE))
    } else {
        Ok(ExitCode::from(EXIT_SOLVER))
    }
}
