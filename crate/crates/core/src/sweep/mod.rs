//! Scenario grid enumeration and evaluation.

mod io;
mod stats;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::{self, BatteryTechnology, DispatchError, EnergyBalance};
use crate::finance::{self, CountryData, CountryTable, EconomicParams, FinanceError};
use crate::profiles::{self, LoadShapeParams, ProfileError, PvShapeParams, TimeSeriesProfile};

pub use io::{
    box_table, parity_table, read_results_csv, write_box_csv, write_parity_csv, write_results_csv,
    BoxRow, ParityRow, RESULTS_HEADER,
};
pub use stats::{best_pv_size, box_stats, parity_share, BoxStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("selection is empty")]
    EmptySelection,
    #[error("{pv_kwp} kWp is outside the {min}..={max} kWp range of type {prosumer_type}")]
    OutOfRange {
        prosumer_type: ProsumerType,
        pv_kwp: u32,
        min: u32,
        max: u32,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("malformed results file: {0}")]
    MalformedResults(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown country `{0}`")]
    UnknownCountry(String),
    #[error(transparent)]
    Scenario(#[from] SweepError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error(transparent)]
    Finance(#[from] FinanceError),
}

/// Household consumption class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProsumerType {
    A,
    B,
    C,
}

impl ProsumerType {
    pub const ALL: [ProsumerType; 3] = [ProsumerType::A, ProsumerType::B, ProsumerType::C];

    pub fn annual_kwh(self) -> f64 {
        match self {
            ProsumerType::A => 4500.0,
            ProsumerType::B => 7500.0,
            ProsumerType::C => 10500.0,
        }
    }

    /// Examined PV sizes in whole kWp.
    pub fn pv_range(self) -> std::ops::RangeInclusive<u32> {
        match self {
            ProsumerType::A => 1..=5,
            ProsumerType::B => 3..=8,
            ProsumerType::C => 5..=10,
        }
    }
}

impl fmt::Display for ProsumerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProsumerType::A => "A",
            ProsumerType::B => "B",
            ProsumerType::C => "C",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ProsumerType {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(ProsumerType::A),
            "B" | "b" => Ok(ProsumerType::B),
            "C" | "c" => Ok(ProsumerType::C),
            other => Err(SweepError::InvalidScenario(format!(
                "unknown prosumer type `{other}`"
            ))),
        }
    }
}

/// Storage-to-PV sizing ratios examined by default, in kWh per kWp.
pub const DEFAULT_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];
/// Current and expected future battery prices, EUR/kWh before VAT.
pub const DEFAULT_BESS_PRICES: [f64; 2] = [150.0, 500.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub country: String,
    pub prosumer_type: ProsumerType,
    pub pv_kwp: u32,
    pub ratio_kwh_per_kwp: f64,
    pub bess_price_eur_per_kwh: f64,
}

impl Scenario {
    pub fn bess_kwh(&self) -> f64 {
        self.pv_kwp as f64 * self.ratio_kwh_per_kwp
    }

    pub fn check(&self, allow_out_of_range: bool) -> Result<(), SweepError> {
        if self.pv_kwp == 0 {
            return Err(SweepError::InvalidScenario(
                "PV size must be at least 1 kWp".into(),
            ));
        }
        if !(self.ratio_kwh_per_kwp.is_finite() && self.ratio_kwh_per_kwp >= 0.0) {
            return Err(SweepError::InvalidScenario(format!(
                "storage ratio {} must be >= 0",
                self.ratio_kwh_per_kwp
            )));
        }
        if !(self.bess_price_eur_per_kwh.is_finite() && self.bess_price_eur_per_kwh >= 0.0) {
            return Err(SweepError::InvalidScenario(format!(
                "battery price {} must be >= 0",
                self.bess_price_eur_per_kwh
            )));
        }
        let range = self.prosumer_type.pv_range();
        if !allow_out_of_range && !range.contains(&self.pv_kwp) {
            return Err(SweepError::OutOfRange {
                prosumer_type: self.prosumer_type,
                pv_kwp: self.pv_kwp,
                min: *range.start(),
                max: *range.end(),
            });
        }
        Ok(())
    }

    #[cfg(test)]
    fn sort_key(&self) -> (String, ProsumerType, u32, u64, u64) {
        (
            self.country.clone(),
            self.prosumer_type,
            self.pv_kwp,
            self.ratio_kwh_per_kwp.to_bits(),
            self.bess_price_eur_per_kwh.to_bits(),
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}kWp/{}kWh-per-kWp/{}EUR",
            self.country,
            self.prosumer_type,
            self.pv_kwp,
            self.ratio_kwh_per_kwp,
            self.bess_price_eur_per_kwh
        )
    }
}

fn sorted_unique_f64(axis: &[f64]) -> Vec<f64> {
    let mut v = axis.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| a.to_bits() == b.to_bits());
    v
}

/// Full Cartesian product of the axes, restricted to each type's PV range,
/// in lexicographic (country, type, kWp, ratio, price) order. Duplicate axis
/// entries are dropped.
pub fn build_grid(
    countries: &[String],
    types: &[ProsumerType],
    ratios: &[f64],
    bess_prices: &[f64],
) -> Result<Vec<Scenario>, SweepError> {
    for (name, empty) in [
        ("countries", countries.is_empty()),
        ("types", types.is_empty()),
        ("ratios", ratios.is_empty()),
        ("bess_prices", bess_prices.is_empty()),
    ] {
        if empty {
            return Err(SweepError::EmptyAxis(name));
        }
    }
    let mut countries = countries.to_vec();
    countries.sort();
    countries.dedup();
    let mut types = types.to_vec();
    types.sort();
    types.dedup();
    let ratios = sorted_unique_f64(ratios);
    let prices = sorted_unique_f64(bess_prices);

    let mut grid = Vec::new();
    for country in &countries {
        for &prosumer_type in &types {
            for pv_kwp in prosumer_type.pv_range() {
                for &ratio in &ratios {
                    for &price in &prices {
                        grid.push(Scenario {
                            country: country.clone(),
                            prosumer_type,
                            pv_kwp,
                            ratio_kwh_per_kwp: ratio,
                            bess_price_eur_per_kwh: price,
                        });
                    }
                }
            }
        }
    }
    Ok(grid)
}

/// Everything besides economics that shapes a scenario's energy flows.
///
/// Imported profiles, when present, replace the synthetic shapes; they are
/// rescaled to the scenario's annual targets (type consumption, and
/// kWp x country yield for PV).
#[derive(Debug, Clone, Default)]
pub struct SystemModel {
    pub load_shape: LoadShapeParams,
    pub pv_shape: PvShapeParams,
    pub battery: BatteryTechnology,
    pub load_profile: Option<Arc<TimeSeriesProfile>>,
    pub pv_profile: Option<Arc<TimeSeriesProfile>>,
}

impl SystemModel {
    pub fn load_for(&self, prosumer_type: ProsumerType) -> Result<TimeSeriesProfile, ProfileError> {
        let annual = prosumer_type.annual_kwh();
        match &self.load_profile {
            Some(p) => p.scaled_to_energy(annual),
            None => profiles::synthesize_load_profile(annual, &self.load_shape),
        }
    }

    pub fn pv_for(
        &self,
        kwp: f64,
        yield_kwh_per_kwp: f64,
    ) -> Result<TimeSeriesProfile, ProfileError> {
        match &self.pv_profile {
            Some(p) => {
                if !(kwp > 0.0 && yield_kwh_per_kwp > 0.0) {
                    return Err(ProfileError::InvalidInput(format!(
                        "PV size {kwp} kWp and yield {yield_kwh_per_kwp} kWh/kWp must be positive"
                    )));
                }
                p.scaled_to_energy(kwp * yield_kwh_per_kwp)
            }
            None => profiles::synthesize_pv_profile(kwp, yield_kwh_per_kwp, &self.pv_shape),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub scr: f64,
    pub ssr: f64,
    pub lcoe: f64,
    pub lcou: f64,
    pub npv: f64,
    pub grid_parity: bool,
}

/// A scenario result together with the intermediate quantities behind it.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub result: ScenarioResult,
    pub balance: EnergyBalance,
    pub trace: dispatch::DispatchTrace,
    pub economics: EconomicParams,
    pub capex_eur: f64,
}

/// The scenario-specific economics: country VAT and the scenario's battery price.
pub fn scenario_economics(
    s: &Scenario,
    data: &CountryData,
    econ: &EconomicParams,
) -> EconomicParams {
    EconomicParams {
        vat_rate: data.vat_rate,
        bess_price_eur_per_kwh: s.bess_price_eur_per_kwh,
        ..econ.clone()
    }
}

/// Profiles, dispatch, balance and finance for one scenario, keeping the trace.
pub fn run_scenario_detailed(
    s: &Scenario,
    data: &CountryData,
    econ: &EconomicParams,
    model: &SystemModel,
) -> Result<ScenarioRun, ScenarioError> {
    s.check(true)?;
    if !data.name.eq_ignore_ascii_case(&s.country) {
        return Err(ScenarioError::UnknownCountry(s.country.clone()));
    }
    let economics = scenario_economics(s, data, econ);
    economics.validate()?;

    let kwp = s.pv_kwp as f64;
    let pv = model.pv_for(kwp, data.annual_yield_kwh_per_kwp)?;
    let load = model.load_for(s.prosumer_type)?;
    let (pv, load) = profiles::align(&pv, &load)?;
    let battery = model.battery.sized(s.bess_kwh());
    let trace = dispatch::simulate(&pv, &load, &battery)?;
    let balance = dispatch::annual_balance(&trace, trace.step_hours);

    let fin = finance::evaluate(
        kwp,
        s.bess_kwh(),
        &economics,
        balance.e_produced,
        balance.scr,
        data.retail_price_eur_per_kwh,
    )?;
    Ok(ScenarioRun {
        result: ScenarioResult {
            scenario: s.clone(),
            scr: balance.scr,
            ssr: balance.ssr,
            lcoe: fin.lcoe_eur_per_kwh,
            lcou: fin.lcou_eur_per_kwh,
            npv: fin.npv_eur,
            grid_parity: fin.grid_parity,
        },
        balance,
        trace,
        economics,
        capex_eur: fin.capex_eur,
    })
}

pub fn run_scenario(
    s: &Scenario,
    data: &CountryData,
    econ: &EconomicParams,
    model: &SystemModel,
) -> Result<ScenarioResult, ScenarioError> {
    run_scenario_detailed(s, data, econ, model).map(|r| r.result)
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{scenario}: {error}")]
pub struct ScenarioFailure {
    pub scenario: Scenario,
    pub error: ScenarioError,
}

pub type ScenarioOutcome = Result<ScenarioResult, ScenarioFailure>;

fn evaluate_one(
    s: &Scenario,
    countries: &CountryTable,
    econ: &EconomicParams,
    model: &SystemModel,
) -> ScenarioOutcome {
    countries
        .get(&s.country)
        .ok_or_else(|| ScenarioError::UnknownCountry(s.country.clone()))
        .and_then(|data| run_scenario(s, data, econ, model))
        .map_err(|error| ScenarioFailure {
            scenario: s.clone(),
            error,
        })
}

/// Evaluates every scenario on the current rayon pool. Output order matches
/// `grid`; failures are returned in place rather than aborting the sweep.
pub fn run_sweep(
    grid: &[Scenario],
    countries: &CountryTable,
    econ: &EconomicParams,
    model: &SystemModel,
) -> Vec<ScenarioOutcome> {
    grid.par_iter()
        .map(|s| evaluate_one(s, countries, econ, model))
        .collect()
}

/// Same as [`run_sweep`] on the calling thread only.
pub fn run_sweep_serial(
    grid: &[Scenario],
    countries: &CountryTable,
    econ: &EconomicParams,
    model: &SystemModel,
) -> Vec<ScenarioOutcome> {
    grid.iter()
        .map(|s| evaluate_one(s, countries, econ, model))
        .collect()
}
