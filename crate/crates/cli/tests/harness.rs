//! Sweep behavior on the shipped reference scenario.

use std::path::PathBuf;

use pilotopt_cli::load_scenario;
use pilotopt_cli::sweep::{
    run_alpha_sweep, run_power_sweep, run_rate_sweep, AlphaSweepEeMode, GasParams, RowStatus,
    Scheme, SweepKind, SweepSpec,
};
use pilotopt_core::channel::{dbm_to_watt, Scenario, SystemConfig};
use pilotopt_core::se::solve_se_precise;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}"))
}

fn table1() -> Scenario {
    load_scenario(&scenario_path("table1.toml")).unwrap()
}

fn spec(kind: SweepKind, start: f64, stop: f64, points: usize, schemes: Vec<Scheme>) -> SweepSpec {
    SweepSpec {
        kind,
        start,
        stop,
        points,
        schemes,
        ts_alphas: vec![0.01, 0.05, 0.2],
        seed: 7,
        tol: 1e-10,
        gas: GasParams {
            population: 40,
            generations: 60,
            mutation_scale: 0.05,
        },
    }
}

#[test]
fn shipped_scenarios_load() {
    let table = table1();
    assert_eq!(table.num_bs(), 3);
    let gains: Vec<f64> = table.links().iter().map(|l| l.channel_gain_linear).collect();
    assert!(gains[0] > gains[1] && gains[1] > gains[2]);

    let demo = load_scenario(&scenario_path("interference_demo.toml")).unwrap();
    assert_eq!(demo.num_bs(), 3);
    assert!(demo.links().iter().all(|l| l.interference_power_w > 0.0));
}

#[test]
fn power_sweep_reference_structure() {
    let scenario = table1();
    let spec = spec(
        SweepKind::PowerSweep,
        20.0,
        46.0,
        27,
        vec![Scheme::Pos, Scheme::Aos, Scheme::Gas, Scheme::Ts],
    );
    let table = run_power_sweep(&scenario, &spec).unwrap();
    assert_eq!(table.rows.len(), 27);
    assert!(table.rows.iter().all(|r| r.status == RowStatus::Ok));

    let col = |name: &str| {
        table
            .columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("missing column {name}"))
    };
    let pos_rate = col("pos_rate_bps");
    let aos_rate = col("aos_rate_bps");
    let gas_rate = col("gas_rate_bps");
    let ts_cols: Vec<usize> = ["ts0.010_rate_bps", "ts0.050_rate_bps", "ts0.200_rate_bps"]
        .iter()
        .map(|c| col(c))
        .collect();

    let mut prev = 0.0;
    for (i, row) in table.rows.iter().enumerate() {
        let pos = row.values[pos_rate].unwrap();
        // the harness adds no arithmetic on top of the solver
        let direct = solve_se_precise(&scenario, dbm_to_watt(row.x_value), 1e-10).unwrap();
        assert_eq!(pos.to_bits(), direct.capacity_bps.to_bits(), "row {i}");
        assert!(pos >= prev, "row {i}: rate decreased");
        prev = pos;
        for &ts in &ts_cols {
            assert!(row.values[ts].unwrap() <= pos * (1.0 + 1e-12), "row {i}");
        }
        let aos = row.values[aos_rate].unwrap();
        assert!((aos - pos).abs() <= 0.01 * pos, "row {i}");
        let gas = row.values[gas_rate].unwrap();
        assert!(gas <= pos * (1.0 + 1e-9), "row {i}");
        assert!((gas - pos).abs() <= 0.005 * pos, "row {i}");
    }
}

#[test]
fn rate_sweep_reference_structure() {
    let scenario = table1();
    let spec = spec(
        SweepKind::RateSweep,
        1.0,
        8.0,
        8,
        vec![Scheme::Pos, Scheme::Aos, Scheme::Ts],
    );
    let table = run_rate_sweep(&scenario, &spec).unwrap();
    assert_eq!(table.rows.len(), 8);
    assert!(table.rows.iter().all(|r| r.status == RowStatus::Ok));

    let col = |name: &str| table.columns.iter().position(|c| c == name).unwrap();
    let pos_p = col("pos_power_w");
    let pos_ee = col("pos_ee_bit_per_joule");
    let ts_ee = col("ts0.050_ee_bit_per_joule");

    let mut prev_p = 0.0;
    for row in &table.rows {
        let p = row.values[pos_p].unwrap();
        assert!(p > prev_p);
        prev_p = p;
        assert!(row.values[pos_ee].unwrap() >= row.values[ts_ee].unwrap() * (1.0 - 1e-12));
    }
    // efficiency is impaired as the demand grows past the sweet spot
    let ees: Vec<f64> = table.rows.iter().map(|r| r.values[pos_ee].unwrap()).collect();
    for pair in ees[1..].windows(2) {
        assert!(pair[1] < pair[0]);
    }
}

#[test]
fn rate_sweep_beyond_ceiling_flags_rows() {
    let scenario = table1();
    let spec = spec(SweepKind::RateSweep, 8.0, 10.0, 5, vec![Scheme::Pos]);
    let table = run_rate_sweep(&scenario, &spec).unwrap();
    assert_eq!(table.rows.len(), 5);
    assert_eq!(table.rows[0].status, RowStatus::Ok);
    assert_eq!(table.rows[4].status, RowStatus::Infeasible);
    assert!(table.rows[4].values[1].is_none());
}

#[test]
fn alpha_sweep_argmax_tracks_optimizer_on_symmetric_scenario() {
    // equal distances make the optimum uniform, so the grid argmax must land
    // within one step of the solver's ratio
    let config = SystemConfig {
        bandwidth_hz: 10e6,
        noise_psd_dbm_per_hz: -174.0,
        coherence_symbols: 1000,
        num_bs: 3,
        max_tx_power_dbm: 46.0,
        static_circuit_power_w: 0.05,
        dynamic_circuit_w_per_bps: 2e-9,
    };
    let scenario = Scenario::from_distances(config, &[250.0, 250.0, 250.0]).unwrap();
    let power = dbm_to_watt(40.0);
    let sol = solve_se_precise(&scenario, power, 1e-12).unwrap();
    let alpha_star = sol.allocation.ratios()[0];
    assert!(sol.allocation.ratios().iter().all(|&a| (a - alpha_star).abs() < 1e-12));

    let spec = spec(SweepKind::AlphaSweep, 0.002, 0.9, 450, vec![Scheme::Ts]);
    let step = (0.9 - 0.002) / 449.0;
    let table = run_alpha_sweep(
        &scenario,
        &spec,
        power,
        4.0 * 10e6,
        AlphaSweepEeMode::MinPowerForRate,
    )
    .unwrap();
    let argmax_row = table
        .rows
        .iter()
        .find(|r| r.values[4] == Some(1.0))
        .expect("argmax marked");
    assert!(
        (argmax_row.x_value - alpha_star).abs() <= step,
        "grid argmax {} vs solver {alpha_star}",
        argmax_row.x_value
    );
}

#[test]
fn alpha_sweep_extreme_ratio_starves_the_payload() {
    let scenario = table1();
    let mut sp = spec(SweepKind::AlphaSweep, 0.001, 0.999, 100, vec![Scheme::Ts]);
    sp.tol = 1e-9;
    let table = run_alpha_sweep(
        &scenario,
        &sp,
        dbm_to_watt(40.0),
        1.0 * 10e6,
        AlphaSweepEeMode::FixedPower,
    )
    .unwrap();
    let last = table.rows.last().unwrap();
    let first_se = table.rows[0].values[0].unwrap();
    let last_se = last.values[0].unwrap();
    assert!(last_se < 0.2, "SE at ratio 0.999 should be near zero, got {last_se}");
    assert!(last_se < first_se);
}

#[test]
fn alpha_sweep_fixed_power_mode_uses_requested_power() {
    let scenario = table1();
    let sp = spec(SweepKind::AlphaSweep, 0.01, 0.5, 20, vec![Scheme::Ts]);
    let power = dbm_to_watt(33.0);
    let table =
        run_alpha_sweep(&scenario, &sp, power, 10e6, AlphaSweepEeMode::FixedPower).unwrap();
    for row in &table.rows {
        assert_eq!(row.values[2], Some(power));
    }
}
