//! Greedy self-consumption battery dispatch and annual energy metrics.
//!
//! Each step, PV first serves the load directly. Any surplus charges the
//! battery up to its power limit and headroom; what the battery cannot accept
//! is curtailed, since exports earn nothing. Any deficit is met from the
//! battery up to its power limit and usable energy; the rest is imported.
//! The battery never charges from the grid.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profiles::TimeSeriesProfile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispatchError {
    #[error("profiles are not aligned: {0}")]
    UnalignedProfiles(String),
    #[error("invalid battery: {0}")]
    InvalidBattery(String),
    #[error("PV production is zero")]
    ZeroProduction,
}

/// Technology parameters shared by every battery size in a study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryTechnology {
    pub round_trip_efficiency: f64,
    pub usable_fraction: f64,
    /// Charge and discharge power limit per kWh of nominal capacity.
    pub c_rate_per_hour: f64,
}

impl Default for BatteryTechnology {
    fn default() -> Self {
        Self {
            round_trip_efficiency: 0.90,
            usable_fraction: 0.90,
            c_rate_per_hour: 0.5,
        }
    }
}

impl BatteryTechnology {
    /// A battery of `capacity_kwh` with the round trip split evenly between
    /// charging and discharging, starting empty (at its minimum state of
    /// charge).
    pub fn sized(&self, capacity_kwh: f64) -> BatterySpec {
        let eta = self.round_trip_efficiency.sqrt();
        let power = self.c_rate_per_hour * capacity_kwh;
        BatterySpec {
            capacity_kwh,
            usable_fraction: self.usable_fraction,
            eta_charge: eta,
            eta_discharge: eta,
            max_charge_kw: power,
            max_discharge_kw: power,
            soc_init_kwh: (1.0 - self.usable_fraction) * capacity_kwh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatterySpec {
    pub capacity_kwh: f64,
    /// Share of the nominal capacity available for cycling (depth of discharge).
    pub usable_fraction: f64,
    pub eta_charge: f64,
    pub eta_discharge: f64,
    pub max_charge_kw: f64,
    pub max_discharge_kw: f64,
    pub soc_init_kwh: f64,
}

impl BatterySpec {
    /// No storage at all.
    pub fn none() -> Self {
        Self {
            capacity_kwh: 0.0,
            usable_fraction: 1.0,
            eta_charge: 1.0,
            eta_discharge: 1.0,
            max_charge_kw: 0.0,
            max_discharge_kw: 0.0,
            soc_init_kwh: 0.0,
        }
    }

    pub fn soc_min_kwh(&self) -> f64 {
        (1.0 - self.usable_fraction) * self.capacity_kwh
    }

    pub fn round_trip_efficiency(&self) -> f64 {
        self.eta_charge * self.eta_discharge
    }

    pub fn validate(&self) -> Result<(), DispatchError> {
        let bad = |msg: String| Err(DispatchError::InvalidBattery(msg));
        let fields = [
            self.capacity_kwh,
            self.usable_fraction,
            self.eta_charge,
            self.eta_discharge,
            self.max_charge_kw,
            self.max_discharge_kw,
            self.soc_init_kwh,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return bad("all fields must be finite".into());
        }
        if self.capacity_kwh < 0.0 {
            return bad(format!("capacity {} kWh is negative", self.capacity_kwh));
        }
        if !(self.usable_fraction > 0.0 && self.usable_fraction <= 1.0) {
            return bad(format!(
                "usable fraction {} outside (0, 1]",
                self.usable_fraction
            ));
        }
        for (name, eta) in [
            ("charge", self.eta_charge),
            ("discharge", self.eta_discharge),
        ] {
            if !(eta > 0.0 && eta <= 1.0) {
                return bad(format!("{name} efficiency {eta} outside (0, 1]"));
            }
        }
        if self.max_charge_kw < 0.0 || self.max_discharge_kw < 0.0 {
            return bad("power limits must be non-negative".into());
        }
        let slack = 1e-12 * self.capacity_kwh.max(1.0);
        if self.soc_init_kwh < self.soc_min_kwh() - slack
            || self.soc_init_kwh > self.capacity_kwh + slack
        {
            return bad(format!(
                "initial state {} kWh outside [{}, {}]",
                self.soc_init_kwh,
                self.soc_min_kwh(),
                self.capacity_kwh
            ));
        }
        Ok(())
    }
}

/// One step of a dispatch run. Powers are step averages in kW; the state of
/// charge is the stored energy at the end of the step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StepRecord {
    pub p_pv: f64,
    pub p_load: f64,
    pub p_direct: f64,
    /// PV power routed into the battery, before charge losses.
    pub p_charge: f64,
    /// Battery power reaching the load, after discharge losses.
    pub p_discharge_delivered: f64,
    pub p_import: f64,
    pub p_curtail: f64,
    pub soc_kwh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchTrace {
    pub step_hours: f64,
    pub steps: Vec<StepRecord>,
}

impl DispatchTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Dumps the trace as CSV with one row per step.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "step,p_pv_kw,p_load_kw,p_direct_kw,p_charge_kw,p_discharge_delivered_kw,p_import_kw,p_curtail_kw,soc_kwh"
        )?;
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                out,
                "{i},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                s.p_pv,
                s.p_load,
                s.p_direct,
                s.p_charge,
                s.p_discharge_delivered,
                s.p_import,
                s.p_curtail,
                s.soc_kwh
            )?;
        }
        Ok(())
    }
}

/// Stored energy tracked above the discharge floor.
struct Store {
    floor_kwh: f64,
    usable_kwh: f64,
    level_kwh: f64,
    spec: BatterySpec,
}

impl Store {
    fn new(spec: &BatterySpec) -> Self {
        let floor_kwh = spec.soc_min_kwh();
        Self {
            floor_kwh,
            usable_kwh: spec.capacity_kwh - floor_kwh,
            level_kwh: (spec.soc_init_kwh - floor_kwh).max(0.0),
            spec: *spec,
        }
    }

    /// Accepts up to `surplus_kw` of PV for `dt` hours; returns the PV-side
    /// power taken.
    fn charge(&mut self, surplus_kw: f64, dt: f64) -> f64 {
        let room_kw = (self.usable_kwh - self.level_kwh).max(0.0) / (self.spec.eta_charge * dt);
        let accepted = surplus_kw.min(self.spec.max_charge_kw).min(room_kw);
        self.level_kwh =
            (self.level_kwh + accepted * dt * self.spec.eta_charge).min(self.usable_kwh);
        accepted
    }

    /// Serves up to `deficit_kw` for `dt` hours; returns the power delivered
    /// to the load.
    fn discharge(&mut self, deficit_kw: f64, dt: f64) -> f64 {
        let avail_kw = self.level_kwh * self.spec.eta_discharge / dt;
        let delivered = deficit_kw.min(self.spec.max_discharge_kw).min(avail_kw);
        self.level_kwh = (self.level_kwh - delivered * dt / self.spec.eta_discharge).max(0.0);
        delivered
    }

    fn soc_kwh(&self) -> f64 {
        self.floor_kwh + self.level_kwh
    }
}

fn check_aligned(pv: &TimeSeriesProfile, load: &TimeSeriesProfile) -> Result<(), DispatchError> {
    if pv.step_hours() != load.step_hours() || pv.len() != load.len() {
        return Err(DispatchError::UnalignedProfiles(format!(
            "PV {} steps of {} h, load {} steps of {} h",
            pv.len(),
            pv.step_hours(),
            load.len(),
            load.step_hours()
        )));
    }
    Ok(())
}

/// Runs the greedy self-consumption controller over aligned profiles.
pub fn simulate(
    pv: &TimeSeriesProfile,
    load: &TimeSeriesProfile,
    battery: &BatterySpec,
) -> Result<DispatchTrace, DispatchError> {
    check_aligned(pv, load)?;
    battery.validate()?;
    let dt = pv.step_hours();
    let mut store = Store::new(battery);
    let steps = pv
        .values()
        .iter()
        .zip(load.values())
        .map(|(&p_pv, &p_load)| {
            let p_direct = p_pv.min(p_load);
            let surplus = p_pv - p_direct;
            let deficit = p_load - p_direct;
            let p_charge = store.charge(surplus, dt);
            let p_discharge_delivered = store.discharge(deficit, dt);
            StepRecord {
                p_pv,
                p_load,
                p_direct,
                p_charge,
                p_discharge_delivered,
                p_import: deficit - p_discharge_delivered,
                p_curtail: surplus - p_charge,
                soc_kwh: store.soc_kwh(),
            }
        })
        .collect();
    Ok(DispatchTrace {
        step_hours: dt,
        steps,
    })
}

/// Annual energy aggregates in kWh.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBalance {
    pub e_produced: f64,
    pub e_consumed: f64,
    pub e_direct: f64,
    pub e_charged: f64,
    pub e_delivered: f64,
    pub e_import: f64,
    pub e_curtail: f64,
    /// Self-consumption rate: on-site use over PV production.
    pub scr: f64,
    /// Self-sufficiency rate: on-site use over consumption.
    pub ssr: f64,
}

impl EnergyBalance {
    pub fn e_self_consumed(&self) -> f64 {
        self.e_direct + self.e_delivered
    }
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub fn annual_balance(trace: &DispatchTrace, step_hours: f64) -> EnergyBalance {
    let mut b = trace
        .steps
        .iter()
        .fold(EnergyBalance::default(), |mut b, s| {
            b.e_produced += s.p_pv;
            b.e_consumed += s.p_load;
            b.e_direct += s.p_direct;
            b.e_charged += s.p_charge;
            b.e_delivered += s.p_discharge_delivered;
            b.e_import += s.p_import;
            b.e_curtail += s.p_curtail;
            b
        });
    for e in [
        &mut b.e_produced,
        &mut b.e_consumed,
        &mut b.e_direct,
        &mut b.e_charged,
        &mut b.e_delivered,
        &mut b.e_import,
        &mut b.e_curtail,
    ] {
        *e *= step_hours;
    }
    b.scr = ratio_or_zero(b.e_self_consumed(), b.e_produced);
    b.ssr = ratio_or_zero(b.e_self_consumed(), b.e_consumed);
    b
}

/// Self-consumption rate of the PV system alone.
pub fn scr_no_storage(
    pv: &TimeSeriesProfile,
    load: &TimeSeriesProfile,
) -> Result<f64, DispatchError> {
    check_aligned(pv, load)?;
    let produced: f64 = pv.values().iter().sum();
    if produced <= 0.0 {
        return Err(DispatchError::ZeroProduction);
    }
    let direct: f64 = pv
        .values()
        .iter()
        .zip(load.values())
        .map(|(p, l)| p.min(*l))
        .sum();
    Ok(direct / produced)
}
