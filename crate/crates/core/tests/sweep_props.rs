mod support;

use proptest::prelude::*;

use storparity::dispatch::scr_no_storage;
use storparity::finance::{CountryTable, EconomicParams};
use storparity::profiles::{
    parse_profile_csv, synthesize_load_profile, synthesize_pv_profile, write_profile_csv,
    LoadShapeParams, ProfileKind, PvShapeParams, TimeSeriesProfile,
};
use storparity::sweep::{
    box_stats, build_grid, read_results_csv, run_scenario, run_sweep, run_sweep_serial,
    write_results_csv, ProsumerType, Scenario, ScenarioResult, SystemModel, DEFAULT_BESS_PRICES,
    DEFAULT_RATIOS,
};
use support::naive_quantile;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn scenario(country: &str, t: ProsumerType, kwp: u32, ratio: f64, price: f64) -> Scenario {
    Scenario {
        country: country.into(),
        prosumer_type: t,
        pv_kwp: kwp,
        ratio_kwh_per_kwp: ratio,
        bess_price_eur_per_kwh: price,
    }
}

fn arb_result() -> impl Strategy<Value = ScenarioResult> {
    (
        prop::sample::select(vec![
            "Cyprus", "France", "Greece", "Italy", "Portugal", "Spain",
        ]),
        prop::sample::select(ProsumerType::ALL.to_vec()),
        1u32..=12,
        prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 1.25]),
        prop::sample::select(vec![150.0, 500.0, 275.5]),
        (
            0.0..=1.0f64,
            0.0..=1.0f64,
            0.01..2.0f64,
            0.01..2.0f64,
            -1e5..1e5f64,
            any::<bool>(),
        ),
    )
        .prop_map(
            |(c, t, k, ratio, price, (scr, ssr, lcoe, lcou, npv, parity))| ScenarioResult {
                scenario: scenario(c, t, k, ratio, price),
                scr,
                ssr,
                lcoe,
                lcou,
                npv,
                grid_parity: parity,
            },
        )
}

proptest! {
    #![proptest_config(cfg(1000))]

    #[test]
    fn box_stats_match_sort_oracle(values in prop::collection::vec(-1e3..1e3f64, 1..120)) {
        let b = box_stats(&values).unwrap();
        let tol = 1e-12 * 1e3;
        prop_assert!((b.min - naive_quantile(&values, 0.0)).abs() <= tol);
        prop_assert!((b.q1 - naive_quantile(&values, 0.25)).abs() <= tol);
        prop_assert!((b.median - naive_quantile(&values, 0.5)).abs() <= tol);
        prop_assert!((b.q3 - naive_quantile(&values, 0.75)).abs() <= tol);
        prop_assert!((b.max - naive_quantile(&values, 1.0)).abs() <= tol);
        prop_assert!(b.min <= b.q1 && b.q1 <= b.median && b.median <= b.q3 && b.q3 <= b.max);
    }

    #[test]
    fn results_csv_round_trip(rows in prop::collection::vec(arb_result(), 0..30)) {
        let mut first = Vec::new();
        write_results_csv(&rows, &mut first).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        let back = read_results_csv(&text).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!(&a.scenario.country, &b.scenario.country);
            prop_assert_eq!(a.scenario.prosumer_type, b.scenario.prosumer_type);
            prop_assert_eq!(a.scenario.pv_kwp, b.scenario.pv_kwp);
            prop_assert_eq!(a.grid_parity, b.grid_parity);
            for (x, y) in [(a.scr, b.scr), (a.lcou, b.lcou), (a.npv, b.npv)] {
                prop_assert!((x - y).abs() <= 5e-7);
            }
        }
        let mut second = Vec::new();
        write_results_csv(&back, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn profile_csv_round_trip(seed in any::<u64>(), quarter in any::<bool>()) {
        let step = if quarter { 0.25 } else { 1.0 };
        let n = (8760.0 / step) as usize;
        let values: Vec<f64> = (0..n)
            .map(|i| ((i as u64).wrapping_mul(seed | 1) % 1000) as f64 / 137.0)
            .collect();
        let p = TimeSeriesProfile::new(ProfileKind::Load, step, values).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&p, &mut buf).unwrap();
        let back = parse_profile_csv(std::str::from_utf8(&buf).unwrap(), ProfileKind::Load).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn synthesis_hits_annual_targets(annual in 500.0..20_000.0f64, kwp in 0.5..15.0f64, yield_kwh in 600.0..2200.0f64) {
        let load = synthesize_load_profile(annual, &LoadShapeParams::default()).unwrap();
        prop_assert!((load.year_energy_kwh() - annual).abs() <= 1e-9 * annual);
        let pv = synthesize_pv_profile(kwp, yield_kwh, &PvShapeParams::default()).unwrap();
        prop_assert!((pv.year_energy_kwh() - kwp * yield_kwh).abs() <= 1e-9 * kwp * yield_kwh);
        prop_assert!(pv.values().iter().chain(load.values()).all(|v| *v >= 0.0));
    }
}

#[test]
fn cyprus_bare_pv_self_consumption_fixture() {
    let table = CountryTable::builtin();
    let model = SystemModel::default();
    let pv = model
        .pv_for(1.0, table.get("Cyprus").unwrap().annual_yield_kwh_per_kwp)
        .unwrap();
    let load = model.load_for(ProsumerType::A).unwrap();
    let scr = scr_no_storage(&pv, &load).unwrap();
    assert!((scr - 0.885885083939788).abs() < 1e-9, "scr {scr}");
}

#[test]
fn end_to_end_examples() {
    let table = CountryTable::builtin();
    let econ = EconomicParams::default();
    let model = SystemModel::default();
    let cy = run_scenario(
        &scenario("Cyprus", ProsumerType::B, 3, 1.0, 150.0),
        table.get("Cyprus").unwrap(),
        &econ,
        &model,
    )
    .unwrap();
    assert!(cy.grid_parity);

    let fr = table.get("France").unwrap();
    for t in ProsumerType::ALL {
        for kwp in t.pv_range() {
            for ratio in DEFAULT_RATIOS {
                let r = run_scenario(&scenario("France", t, kwp, ratio, 500.0), fr, &econ, &model)
                    .unwrap();
                assert!(!r.grid_parity, "{}", r.scenario);
            }
        }
    }
}

#[test]
fn sweep_is_deterministic_and_order_preserving() {
    let table = CountryTable::builtin();
    let countries = vec!["Spain".to_string(), "Greece".to_string()];
    let grid = build_grid(
        &countries,
        &ProsumerType::ALL,
        &DEFAULT_RATIOS,
        &DEFAULT_BESS_PRICES,
    )
    .unwrap();
    let econ = EconomicParams::default();
    let model = SystemModel::default();
    let bytes = |outcomes: Vec<storparity::sweep::ScenarioOutcome>| {
        let rows: Vec<ScenarioResult> = outcomes.into_iter().map(|o| o.unwrap()).collect();
        let mut buf = Vec::new();
        write_results_csv(&rows, &mut buf).unwrap();
        (rows, buf)
    };
    let (rows, parallel) = bytes(run_sweep(&grid, &table, &econ, &model));
    let (_, again) = bytes(run_sweep(&grid, &table, &econ, &model));
    let (_, serial) = bytes(run_sweep_serial(&grid, &table, &econ, &model));
    assert_eq!(parallel, again);
    assert_eq!(parallel, serial);
    assert!(rows.iter().zip(&grid).all(|(r, s)| &r.scenario == s));
}
