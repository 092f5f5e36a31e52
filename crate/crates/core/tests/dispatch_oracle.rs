mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use storparity::dispatch::{
    annual_balance, scr_no_storage, simulate, BatterySpec, BatteryTechnology,
};
use storparity::profiles::{ProfileKind, TimeSeriesProfile};
use support::{close, naive_dispatch, random_instance};

const TOL: f64 = 1e-12;

#[test]
fn matches_reference_state_machine() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d15c);
    for case in 0..1500 {
        let inst = random_instance(&mut rng);
        let dt = inst.pv.step_hours();
        let trace = simulate(&inst.pv, &inst.load, &inst.battery).unwrap();
        let naive = naive_dispatch(inst.pv.values(), inst.load.values(), dt, &inst.battery);
        assert_eq!(trace.len(), naive.len());
        for (i, (got, want)) in trace.steps.iter().zip(&naive).enumerate() {
            let pairs = [
                ("direct", got.p_direct, want.direct),
                ("charge", got.p_charge, want.charge),
                ("delivered", got.p_discharge_delivered, want.delivered),
                ("import", got.p_import, want.import),
                ("curtail", got.p_curtail, want.curtail),
                ("soc", got.soc_kwh, want.soc),
            ];
            for (name, g, w) in pairs {
                assert!(
                    close(g, w, TOL),
                    "case {case} step {i}/{} {name}: {g} vs {w} ({:?})",
                    inst.active,
                    inst.battery
                );
            }
        }
    }
}

fn year_from(kind: ProfileKind, head: &[f64]) -> TimeSeriesProfile {
    let dt = 8760.0 / head.len() as f64;
    TimeSeriesProfile::new(kind, dt, head.to_vec()).unwrap()
}

fn powers(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..8.0f64], len)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=48).prop_flat_map(|n| (powers(n), powers(n)))
}

fn spec() -> impl Strategy<Value = BatterySpec> {
    (
        0.0..4000.0f64,
        0.2..=1.0f64,
        0.6..=1.0f64,
        0.6..=1.0f64,
        0.0..6.0f64,
        0.0..6.0f64,
        0.0..=1.0f64,
    )
        .prop_map(|(cap, usable, ec, ed, pc, pd, fill)| {
            let floor = (1.0 - usable) * cap;
            BatterySpec {
                capacity_kwh: cap,
                usable_fraction: usable,
                eta_charge: ec,
                eta_discharge: ed,
                max_charge_kw: pc,
                max_discharge_kw: pd,
                soc_init_kwh: floor + fill * (cap - floor),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 512,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn per_step_conservation_and_bounds((pv, load) in pair(), b in spec()) {
        let pv = year_from(ProfileKind::Pv, &pv);
        let load = year_from(ProfileKind::Load, &load);
        let dt = pv.step_hours();
        let trace = simulate(&pv, &load, &b).unwrap();
        let mut prev = b.soc_init_kwh;
        let scale = 1e-9 * (1.0 + b.capacity_kwh);
        for s in &trace.steps {
            prop_assert!(close(s.p_direct + s.p_charge + s.p_curtail, s.p_pv, 1e-12));
            prop_assert!(close(s.p_direct + s.p_discharge_delivered + s.p_import, s.p_load, 1e-12));
            for v in [s.p_direct, s.p_charge, s.p_discharge_delivered, s.p_import, s.p_curtail] {
                prop_assert!(v >= 0.0);
            }
            prop_assert!(s.p_charge <= b.max_charge_kw && s.p_discharge_delivered <= b.max_discharge_kw);
            prop_assert!(s.p_charge == 0.0 || s.p_discharge_delivered == 0.0);
            prop_assert!(s.soc_kwh >= b.soc_min_kwh() - scale && s.soc_kwh <= b.capacity_kwh + scale);
            let expected = prev + (s.p_charge * b.eta_charge - s.p_discharge_delivered / b.eta_discharge) * dt;
            prop_assert!((s.soc_kwh - expected).abs() <= scale, "soc {} vs {}", s.soc_kwh, expected);
            prev = s.soc_kwh;
        }
    }

    #[test]
    fn storage_never_lowers_self_consumption((pv, load) in pair(), b in spec()) {
        let pv = year_from(ProfileKind::Pv, &pv);
        let load = year_from(ProfileKind::Load, &load);
        prop_assume!(pv.year_energy_kwh() > 0.0);
        let bal = annual_balance(&simulate(&pv, &load, &b).unwrap(), pv.step_hours());
        let bare = scr_no_storage(&pv, &load).unwrap();
        prop_assert!(bal.scr >= bare - 1e-12);

        // starting empty, the battery can only return PV it stored
        let empty = BatterySpec { soc_init_kwh: b.soc_min_kwh(), ..b };
        let bal = annual_balance(&simulate(&pv, &load, &empty).unwrap(), pv.step_hours());
        prop_assert!(bal.scr <= 1.0 + 1e-12 && bal.ssr <= 1.0 + 1e-12);
    }

    #[test]
    fn self_consumption_monotone_in_capacity(
        (pv, load) in pair(),
        c1 in 0.0..3000.0f64,
        extra in 0.0..3000.0f64,
    ) {
        let pv = year_from(ProfileKind::Pv, &pv);
        let load = year_from(ProfileKind::Load, &load);
        prop_assume!(pv.year_energy_kwh() > 0.0);
        let tech = BatteryTechnology::default();
        let scr = |cap: f64| {
            let trace = simulate(&pv, &load, &tech.sized(cap)).unwrap();
            annual_balance(&trace, pv.step_hours()).scr
        };
        prop_assert!(scr(c1 + extra) >= scr(c1) - 1e-12);
    }
}

#[test]
fn annual_balance_closes_on_the_year() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let inst = random_instance(&mut rng);
        let trace = simulate(&inst.pv, &inst.load, &inst.battery).unwrap();
        let bal = annual_balance(&trace, inst.pv.step_hours());
        let last = trace.steps.last().unwrap().soc_kwh;
        let stored =
            bal.e_charged * inst.battery.eta_charge - bal.e_delivered / inst.battery.eta_discharge;
        assert!(close(last - inst.battery.soc_init_kwh, stored, 1e-9));
        assert!(close(
            bal.e_produced,
            bal.e_direct + bal.e_charged + bal.e_curtail,
            1e-12
        ));
        assert!(close(
            bal.e_consumed,
            bal.e_self_consumed() + bal.e_import,
            1e-12
        ));
    }
}
