//! Discounted cash-flow evaluation of a PV-and-storage investment.
//!
//! Year `n` (1..=N) cash flows and energies are discounted by `(1 + r)^-n`;
//! CAPEX is paid at year 0. LCOE divides discounted lifetime cost by
//! discounted PV production; LCOU divides the same cost by discounted
//! *self-consumed* energy. NPV counts avoided grid purchases at a flat tariff
//! minus maintenance, so `npv > 0` holds exactly when `lcou < retail price`.

mod country;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use country::{CountryData, CountryTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinanceError {
    #[error("annual energy is zero")]
    ZeroEnergy,
    #[error("discounted self-consumed energy is zero")]
    ZeroSelfConsumption,
    #[error("expected one value per year ({expected}), got {found}")]
    HorizonMismatch { expected: usize, found: usize },
    #[error("invalid economic parameters: {0}")]
    InvalidParams(String),
    #[error("country data: {0}")]
    CountryData(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicParams {
    /// PV array plus hybrid inverter, before VAT.
    pub pv_price_eur_per_kwp: f64,
    /// Battery modules, before VAT.
    pub bess_price_eur_per_kwh: f64,
    pub vat_rate: f64,
    /// Yearly maintenance as a share of the pre-VAT CAPEX.
    pub maintenance_rate: f64,
    /// Real yearly discount rate. The 7 % default is a calibration choice:
    /// at lower rates smooth synthetic profiles put the weakest-yield market
    /// at parity for small systems.
    pub discount_rate: f64,
    pub horizon_years: u32,
    pub pv_degradation_rate: f64,
}

impl Default for EconomicParams {
    fn default() -> Self {
        Self {
            pv_price_eur_per_kwp: 1300.0,
            bess_price_eur_per_kwh: 150.0,
            vat_rate: 0.0,
            maintenance_rate: 0.01,
            discount_rate: 0.07,
            horizon_years: 20,
            pv_degradation_rate: 0.0,
        }
    }
}

impl EconomicParams {
    pub fn validate(&self) -> Result<(), FinanceError> {
        let bad = |m: String| Err(FinanceError::InvalidParams(m));
        if self.horizon_years < 1 {
            return bad("horizon must be at least one year".into());
        }
        if !(self.discount_rate.is_finite() && self.discount_rate >= 0.0) {
            return bad(format!("discount rate {} must be >= 0", self.discount_rate));
        }
        for (name, v) in [
            ("VAT", self.vat_rate),
            ("maintenance rate", self.maintenance_rate),
            ("degradation rate", self.pv_degradation_rate),
        ] {
            if !(0.0..1.0).contains(&v) {
                return bad(format!("{name} {v} outside [0, 1)"));
            }
        }
        for (name, v) in [
            ("PV price", self.pv_price_eur_per_kwp),
            ("BESS price", self.bess_price_eur_per_kwh),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} {v} must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.horizon_years as usize
    }

    /// Discount factors `(1 + r)^-n` for n = 1..=N.
    pub fn discount_factors(&self) -> Vec<f64> {
        let growth = 1.0 + self.discount_rate;
        std::iter::successors(Some(1.0 / growth), |d| Some(d / growth))
            .take(self.horizon())
            .collect()
    }

    /// Yearly maintenance cost for a system that cost `capex_eur` including VAT.
    pub fn annual_maintenance(&self, capex_eur: f64) -> f64 {
        self.maintenance_rate * capex_eur / (1.0 + self.vat_rate)
    }

    /// PV production per year for a first-year production of `annual_energy_kwh`.
    pub fn energy_series(&self, annual_energy_kwh: f64) -> Vec<f64> {
        let keep = 1.0 - self.pv_degradation_rate;
        std::iter::successors(Some(annual_energy_kwh), |e| Some(e * keep))
            .take(self.horizon())
            .collect()
    }

    /// CAPEX plus discounted maintenance: the common numerator of LCOE and LCOU.
    pub fn lifetime_cost(&self, capex_eur: f64) -> f64 {
        let factor_sum: f64 = self.discount_factors().iter().sum();
        capex_eur + self.annual_maintenance(capex_eur) * factor_sum
    }

    fn discounted_sum(&self, yearly: impl IntoIterator<Item = f64>) -> f64 {
        self.discount_factors()
            .iter()
            .zip(yearly)
            .map(|(d, x)| d * x)
            .sum()
    }
}

/// Upfront cost including VAT. No subsidies are applied.
pub fn capex(pv_kwp: f64, bess_kwh: f64, econ: &EconomicParams) -> f64 {
    (pv_kwp * econ.pv_price_eur_per_kwp + bess_kwh * econ.bess_price_eur_per_kwh)
        * (1.0 + econ.vat_rate)
}

pub fn lcoe(
    capex_eur: f64,
    econ: &EconomicParams,
    annual_energy_kwh: f64,
) -> Result<f64, FinanceError> {
    if annual_energy_kwh.is_nan() || annual_energy_kwh <= 0.0 {
        return Err(FinanceError::ZeroEnergy);
    }
    let energy = econ.discounted_sum(econ.energy_series(annual_energy_kwh));
    Ok(econ.lifetime_cost(capex_eur) / energy)
}

/// Levelized cost of the self-consumed energy, with one SCR per year.
pub fn lcou(
    capex_eur: f64,
    econ: &EconomicParams,
    annual_energy_kwh: f64,
    scr_per_year: &[f64],
) -> Result<f64, FinanceError> {
    if scr_per_year.len() != econ.horizon() {
        return Err(FinanceError::HorizonMismatch {
            expected: econ.horizon(),
            found: scr_per_year.len(),
        });
    }
    if let Some(s) = scr_per_year.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(FinanceError::InvalidParams(format!(
            "SCR {s} outside [0, 1]"
        )));
    }
    let used = econ
        .energy_series(annual_energy_kwh)
        .into_iter()
        .zip(scr_per_year)
        .map(|(e, s)| e * s);
    let energy = econ.discounted_sum(used);
    if energy.is_nan() || energy <= 0.0 {
        return Err(FinanceError::ZeroSelfConsumption);
    }
    Ok(econ.lifetime_cost(capex_eur) / energy)
}

/// Net present value of avoided purchases at a flat `retail_price` minus
/// maintenance, after paying `capex_eur` upfront.
pub fn npv(
    capex_eur: f64,
    econ: &EconomicParams,
    self_consumed_kwh_per_year: &[f64],
    retail_price: f64,
) -> Result<f64, FinanceError> {
    if self_consumed_kwh_per_year.len() != econ.horizon() {
        return Err(FinanceError::HorizonMismatch {
            expected: econ.horizon(),
            found: self_consumed_kwh_per_year.len(),
        });
    }
    let maintenance = econ.annual_maintenance(capex_eur);
    let flows = self_consumed_kwh_per_year
        .iter()
        .map(|e| retail_price * e - maintenance);
    Ok(econ.discounted_sum(flows) - capex_eur)
}

/// Hybrid grid parity: the levelized cost of use is strictly below the tariff.
pub fn grid_parity(lcou: f64, retail_price: f64) -> bool {
    lcou < retail_price
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinancialResult {
    pub capex_eur: f64,
    pub lcoe_eur_per_kwh: f64,
    pub lcou_eur_per_kwh: f64,
    pub npv_eur: f64,
    pub grid_parity: bool,
}

/// Evaluates a system with a constant yearly SCR.
pub fn evaluate(
    pv_kwp: f64,
    bess_kwh: f64,
    econ: &EconomicParams,
    annual_energy_kwh: f64,
    scr: f64,
    retail_price: f64,
) -> Result<FinancialResult, FinanceError> {
    econ.validate()?;
    let capex_eur = capex(pv_kwp, bess_kwh, econ);
    let scr_per_year = vec![scr; econ.horizon()];
    let self_consumed: Vec<f64> = econ
        .energy_series(annual_energy_kwh)
        .iter()
        .map(|e| e * scr)
        .collect();
    let lcou_eur_per_kwh = lcou(capex_eur, econ, annual_energy_kwh, &scr_per_year)?;
    Ok(FinancialResult {
        capex_eur,
        lcoe_eur_per_kwh: lcoe(capex_eur, econ, annual_energy_kwh)?,
        lcou_eur_per_kwh,
        npv_eur: npv(capex_eur, econ, &self_consumed, retail_price)?,
        grid_parity: grid_parity(lcou_eur_per_kwh, retail_price),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(r: f64, n: u32) -> EconomicParams {
        EconomicParams {
            maintenance_rate: 0.0,
            discount_rate: r,
            horizon_years: n,
            ..EconomicParams::default()
        }
    }

    #[test]
    fn capex_examples() {
        let econ = EconomicParams::default();
        assert_eq!(capex(3.0, 3.0, &econ), 4350.0);
        let with_vat = EconomicParams {
            vat_rate: 0.19,
            ..econ.clone()
        };
        assert!((capex(1.0, 0.0, &with_vat) - 1547.0).abs() < 1e-9);
        assert_eq!(capex(0.0, 0.0, &with_vat), 0.0);
    }

    #[test]
    fn lcoe_examples() {
        assert!((lcoe(1300.0, &plain(0.0, 20), 1000.0).unwrap() - 0.065).abs() < 1e-15);
        assert!((lcoe(1000.0, &plain(0.05, 1), 1000.0).unwrap() - 1.05).abs() < 1e-12);
        assert_eq!(
            lcoe(1000.0, &plain(0.05, 1), 0.0),
            Err(FinanceError::ZeroEnergy)
        );
    }

    #[test]
    fn lcoe_closed_form_at_zero_rate() {
        // c = 0.02 * 5000 = 100 per year
        let econ = EconomicParams {
            maintenance_rate: 0.02,
            ..plain(0.0, 20)
        };
        let got = lcoe(5000.0, &econ, 800.0).unwrap();
        assert!((got - (5000.0 + 20.0 * 100.0) / (20.0 * 800.0)).abs() < 1e-15);
    }

    #[test]
    fn lcou_reduces_to_lcoe() {
        let econ = EconomicParams::default();
        let l = lcoe(5000.0, &econ, 4000.0).unwrap();
        let u = lcou(5000.0, &econ, 4000.0, &[1.0; 20]).unwrap();
        assert_eq!(l, u);
        let half = lcou(5000.0, &plain(0.0, 20), 4000.0, &[0.5; 20]).unwrap();
        let full = lcoe(5000.0, &plain(0.0, 20), 4000.0).unwrap();
        assert!((half - 2.0 * full).abs() < 1e-15);
    }

    #[test]
    fn lcou_errors() {
        let econ = EconomicParams::default();
        assert_eq!(
            lcou(1.0, &econ, 100.0, &[0.0; 20]),
            Err(FinanceError::ZeroSelfConsumption)
        );
        assert!(matches!(
            lcou(1.0, &econ, 100.0, &[0.5; 3]),
            Err(FinanceError::HorizonMismatch {
                expected: 20,
                found: 3
            })
        ));
        assert!(lcou(1.0, &econ, 100.0, &[1.5; 20]).is_err());
    }

    #[test]
    fn npv_examples() {
        let econ = plain(0.0, 20);
        // 100 EUR/yr of savings: 1000 kWh at 0.1 EUR/kWh
        assert!((npv(0.0, &econ, &[1000.0; 20], 0.1).unwrap() - 2000.0).abs() < 1e-9);
        assert!(npv(2000.0, &econ, &[1000.0; 20], 0.1).unwrap().abs() < 1e-9);
    }

    #[test]
    fn parity_is_strict() {
        assert!(grid_parity(0.107, 0.19270));
        assert!(!grid_parity(0.19270, 0.19270));
        assert!(!grid_parity(0.205, 0.16814));
    }

    #[test]
    fn degradation_shrinks_energy() {
        let econ = EconomicParams {
            pv_degradation_rate: 0.005,
            ..EconomicParams::default()
        };
        let e = econ.energy_series(1000.0);
        assert_eq!(e[0], 1000.0);
        assert!((e[19] - 1000.0 * 0.995f64.powi(19)).abs() < 1e-9);
        let base = lcoe(3000.0, &EconomicParams::default(), 1000.0).unwrap();
        assert!(lcoe(3000.0, &econ, 1000.0).unwrap() > base);
    }

    #[test]
    fn invalid_params() {
        let e = EconomicParams {
            horizon_years: 0,
            ..EconomicParams::default()
        };
        assert!(e.validate().is_err());
        let e = EconomicParams {
            discount_rate: -0.01,
            ..EconomicParams::default()
        };
        assert!(e.validate().is_err());
        let e = EconomicParams {
            vat_rate: 1.0,
            ..EconomicParams::default()
        };
        assert!(e.validate().is_err());
        let e = EconomicParams {
            bess_price_eur_per_kwh: -1.0,
            ..EconomicParams::default()
        };
        assert!(e.validate().is_err());
        EconomicParams::default().validate().unwrap();
    }

    #[test]
    fn evaluate_is_consistent() {
        let econ = EconomicParams {
            vat_rate: 0.19,
            ..EconomicParams::default()
        };
        let r = evaluate(3.0, 3.0, &econ, 4394.55, 0.6, 0.1927).unwrap();
        assert!((r.capex_eur - 5176.5).abs() < 1e-9);
        assert!(r.lcou_eur_per_kwh > r.lcoe_eur_per_kwh);
        assert_eq!(r.grid_parity, r.npv_eur > 0.0);
    }
}
