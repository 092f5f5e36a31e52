use serde::{Deserialize, Serialize};

use super::{ProsumerType, ScenarioResult, SweepError};

/// Five-number summary. Quartiles use inclusive linear interpolation: the
/// p-quantile of n sorted values sits at position p*(n-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn box_stats(values: &[f64]) -> Result<BoxStats, SweepError> {
    if values.is_empty() {
        return Err(SweepError::EmptySelection);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(BoxStats {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Percentage of results for `country` (and `bess_price`, when given) that
/// reach grid parity.
pub fn parity_share(
    results: &[ScenarioResult],
    country: &str,
    bess_price: Option<f64>,
) -> Result<f64, SweepError> {
    let selected: Vec<&ScenarioResult> = results
        .iter()
        .filter(|r| r.scenario.country.eq_ignore_ascii_case(country))
        .filter(|r| bess_price.is_none_or(|p| r.scenario.bess_price_eur_per_kwh == p))
        .collect();
    if selected.is_empty() {
        return Err(SweepError::EmptySelection);
    }
    let hits = selected.iter().filter(|r| r.grid_parity).count();
    Ok(100.0 * hits as f64 / selected.len() as f64)
}

/// PV size with the lowest LCOU for the given axes; ties go to the smaller size.
pub fn best_pv_size(
    results: &[ScenarioResult],
    country: &str,
    prosumer_type: ProsumerType,
    ratio: f64,
    bess_price: f64,
) -> Result<u32, SweepError> {
    results
        .iter()
        .filter(|r| {
            let s = &r.scenario;
            s.country.eq_ignore_ascii_case(country)
                && s.prosumer_type == prosumer_type
                && s.ratio_kwh_per_kwp == ratio
                && s.bess_price_eur_per_kwh == bess_price
        })
        .min_by(|a, b| {
            a.lcou
                .total_cmp(&b.lcou)
                .then(a.scenario.pv_kwp.cmp(&b.scenario.pv_kwp))
        })
        .map(|r| r.scenario.pv_kwp)
        .ok_or(SweepError::EmptySelection)
}
