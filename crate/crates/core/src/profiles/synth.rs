//! Deterministic synthesis of household-load and PV-generation years.

use chrono::{Datelike, Duration, Weekday};
use serde::{Deserialize, Serialize};

use super::{year_start, ProfileError, ProfileKind, TimeSeriesProfile, DAYS_IN_MONTH};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Intraday and seasonal shape of household consumption.
///
/// `monthly_weights` are shares of the annual energy; every day in a month
/// receives the same energy, distributed over the day by the weekday or
/// weekend intraday weights. The arity of the intraday weights fixes the
/// resolution (24 for hourly, 96 for quarter-hourly).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadShapeParams {
    pub weekday_weights: Vec<f64>,
    pub weekend_weights: Vec<f64>,
    pub monthly_weights: [f64; 12],
    pub weekend_days: Vec<Weekday>,
}

/// Monthly sunrise/sunset (local clock hours) and the exponent applied to the
/// half-cosine bell between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaylightModel {
    pub sunrise_hours: [f64; 12],
    pub sunset_hours: [f64; 12],
    pub bell_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvShapeParams {
    /// Shares of the annual PV energy per calendar month.
    pub monthly_weights: [f64; 12],
    pub daylight: DaylightModel,
    pub steps_per_hour: u32,
}

fn normalized<const N: usize>(raw: [f64; N]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

fn days_proportional() -> [f64; 12] {
    DAYS_IN_MONTH.map(|d| d as f64 / 365.0)
}

fn check_weights(name: &str, weights: &[f64]) -> Result<(), ProfileError> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(ProfileError::InvalidShape(format!(
            "{name} must be finite and non-negative"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(ProfileError::InvalidShape(format!(
            "{name} sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

impl LoadShapeParams {
    /// Generic residential shape: morning and evening peaks on working days,
    /// a flatter and later weekend, and a winter-heavy seasonal cycle with a
    /// smaller summer cooling bump.
    pub fn residential() -> Self {
        let weekday = normalized([
            0.030, 0.025, 0.022, 0.021, 0.021, 0.024, 0.035, 0.048, 0.045, 0.034, 0.029, 0.028,
            0.031, 0.032, 0.029, 0.029, 0.034, 0.045, 0.057, 0.067, 0.071, 0.066, 0.054, 0.041,
        ]);
        let weekend = normalized([
            0.032, 0.027, 0.023, 0.021, 0.020, 0.021, 0.024, 0.030, 0.039, 0.045, 0.047, 0.047,
            0.049, 0.047, 0.041, 0.038, 0.040, 0.046, 0.054, 0.061, 0.064, 0.060, 0.050, 0.040,
        ]);
        let monthly = normalized([
            0.100, 0.090, 0.085, 0.075, 0.070, 0.075, 0.090, 0.090, 0.075, 0.070, 0.080, 0.100,
        ]);
        Self {
            weekday_weights: weekday,
            weekend_weights: weekend,
            monthly_weights: monthly.try_into().expect("12 months"),
            weekend_days: vec![Weekday::Sat, Weekday::Sun],
        }
    }

    /// Flat consumption at `steps_per_day` resolution: every step of the year
    /// carries the same power.
    pub fn uniform(steps_per_day: usize) -> Self {
        let flat = vec![1.0 / steps_per_day as f64; steps_per_day];
        Self {
            weekday_weights: flat.clone(),
            weekend_weights: flat,
            monthly_weights: days_proportional(),
            weekend_days: vec![Weekday::Sat, Weekday::Sun],
        }
    }

    /// Same shape with each intraday step split into `parts` equal sub-steps.
    pub fn subdivided(&self, parts: usize) -> Self {
        let split = |w: &[f64]| {
            w.iter()
                .flat_map(|x| std::iter::repeat_n(x / parts as f64, parts))
                .collect()
        };
        Self {
            weekday_weights: split(&self.weekday_weights),
            weekend_weights: split(&self.weekend_weights),
            ..self.clone()
        }
    }

    pub fn steps_per_day(&self) -> usize {
        self.weekday_weights.len()
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let n = self.weekday_weights.len();
        if n != 24 && n != 96 {
            return Err(ProfileError::InvalidShape(format!(
                "intraday weights need 24 or 96 entries, found {n}"
            )));
        }
        if self.weekend_weights.len() != n {
            return Err(ProfileError::InvalidShape(format!(
                "weekend weights have {} entries, weekday weights {n}",
                self.weekend_weights.len()
            )));
        }
        check_weights("weekday weights", &self.weekday_weights)?;
        check_weights("weekend weights", &self.weekend_weights)?;
        check_weights("monthly weights", &self.monthly_weights)
    }
}

impl Default for LoadShapeParams {
    fn default() -> Self {
        Self::residential()
    }
}

impl DaylightModel {
    /// Mid-latitude (~38°N) Mediterranean day lengths, centred on 12:30
    /// local time.
    pub fn mediterranean() -> Self {
        const DAY_LENGTH: [f64; 12] = [
            9.6, 10.5, 11.8, 13.1, 14.2, 14.8, 14.5, 13.6, 12.4, 11.1, 9.9, 9.3,
        ];
        const NOON: f64 = 12.5;
        Self {
            sunrise_hours: DAY_LENGTH.map(|l| NOON - l / 2.0),
            sunset_hours: DAY_LENGTH.map(|l| NOON + l / 2.0),
            bell_exponent: 1.2,
        }
    }

    fn validate(&self) -> Result<(), ProfileError> {
        if !(self.bell_exponent.is_finite() && self.bell_exponent > 0.0) {
            return Err(ProfileError::InvalidShape(format!(
                "bell exponent must be positive, got {}",
                self.bell_exponent
            )));
        }
        for (m, (&rise, &set)) in self
            .sunrise_hours
            .iter()
            .zip(&self.sunset_hours)
            .enumerate()
        {
            if !(0.0..=24.0).contains(&rise) || !(0.0..=24.0).contains(&set) || rise >= set {
                return Err(ProfileError::InvalidShape(format!(
                    "month {}: sunrise {rise} / sunset {set} out of order or range",
                    m + 1
                )));
            }
        }
        Ok(())
    }

    /// Relative irradiance at clock hour `t` of a day in `month` (0-based).
    fn bell(&self, month: usize, t: f64) -> f64 {
        let (rise, set) = (self.sunrise_hours[month], self.sunset_hours[month]);
        if t <= rise || t >= set {
            return 0.0;
        }
        let phase = std::f64::consts::PI * (t - 0.5 * (rise + set)) / (set - rise);
        phase.cos().max(0.0).powf(self.bell_exponent)
    }
}

impl PvShapeParams {
    pub fn mediterranean() -> Self {
        let monthly = normalized([
            0.058, 0.064, 0.084, 0.092, 0.102, 0.106, 0.112, 0.108, 0.092, 0.078, 0.058, 0.046,
        ]);
        Self {
            monthly_weights: monthly.try_into().expect("12 months"),
            daylight: DaylightModel::mediterranean(),
            steps_per_hour: 1,
        }
    }

    pub fn with_steps_per_hour(mut self, steps_per_hour: u32) -> Self {
        self.steps_per_hour = steps_per_hour;
        self
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.steps_per_hour == 0 || 60 % self.steps_per_hour != 0 {
            return Err(ProfileError::InvalidShape(format!(
                "steps per hour must divide 60, got {}",
                self.steps_per_hour
            )));
        }
        check_weights("monthly weights", &self.monthly_weights)?;
        self.daylight.validate()
    }

    /// Normalized intraday shape (sums to 1) for each month, integrated over
    /// each step with a one-minute midpoint rule.
    fn day_shapes(&self) -> Vec<Vec<f64>> {
        let steps = 24 * self.steps_per_hour as usize;
        let step_hours = 1.0 / self.steps_per_hour as f64;
        let samples = (60 / self.steps_per_hour) as usize;
        (0..12)
            .map(|month| {
                let raw: Vec<f64> = (0..steps)
                    .map(|s| {
                        let start = s as f64 * step_hours;
                        (0..samples)
                            .map(|k| {
                                let t = start + (k as f64 + 0.5) * step_hours / samples as f64;
                                self.daylight.bell(month, t)
                            })
                            .sum()
                    })
                    .collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / total).collect()
            })
            .collect()
    }
}

impl Default for PvShapeParams {
    fn default() -> Self {
        Self::mediterranean()
    }
}

/// Lays out 365 days of `day_energy(month) * shape(month, weekday)` as a
/// power series at `steps_per_day` resolution.
fn lay_out_year<'a>(
    kind: ProfileKind,
    steps_per_day: usize,
    day_energy_kwh: impl Fn(usize) -> f64,
    day_shape: impl Fn(usize, Weekday) -> &'a [f64],
) -> Result<TimeSeriesProfile, ProfileError> {
    let step_hours = 24.0 / steps_per_day as f64;
    let mut values = Vec::with_capacity(365 * steps_per_day);
    let first = year_start().date();
    for day in 0..365 {
        let date = first + Duration::days(day);
        let month = date.month0() as usize;
        let energy = day_energy_kwh(month);
        let shape = day_shape(month, date.weekday());
        values.extend(shape.iter().map(|w| energy * w / step_hours));
    }
    TimeSeriesProfile::new(kind, step_hours, values)
}

/// Builds a load year whose energy equals `annual_kwh`.
pub fn synthesize_load_profile(
    annual_kwh: f64,
    shape: &LoadShapeParams,
) -> Result<TimeSeriesProfile, ProfileError> {
    if !(annual_kwh.is_finite() && annual_kwh > 0.0) {
        return Err(ProfileError::InvalidInput(format!(
            "annual consumption must be positive, got {annual_kwh}"
        )));
    }
    shape.validate()?;
    lay_out_year(
        ProfileKind::Load,
        shape.steps_per_day(),
        |m| annual_kwh * shape.monthly_weights[m] / DAYS_IN_MONTH[m] as f64,
        |_, wd| {
            if shape.weekend_days.contains(&wd) {
                &shape.weekend_weights
            } else {
                &shape.weekday_weights
            }
        },
    )
}

/// Builds a PV year for `kwp` of installed capacity producing
/// `annual_yield_kwh_per_kwp` per kWp.
pub fn synthesize_pv_profile(
    kwp: f64,
    annual_yield_kwh_per_kwp: f64,
    shape: &PvShapeParams,
) -> Result<TimeSeriesProfile, ProfileError> {
    if !(kwp.is_finite() && kwp > 0.0) {
        return Err(ProfileError::InvalidInput(format!(
            "rated power must be positive, got {kwp} kWp"
        )));
    }
    if !(annual_yield_kwh_per_kwp.is_finite() && annual_yield_kwh_per_kwp > 0.0) {
        return Err(ProfileError::InvalidInput(format!(
            "specific yield must be positive, got {annual_yield_kwh_per_kwp} kWh/kWp"
        )));
    }
    shape.validate()?;
    let annual = kwp * annual_yield_kwh_per_kwp;
    let shapes = shape.day_shapes();
    lay_out_year(
        ProfileKind::Pv,
        24 * shape.steps_per_hour as usize,
        |m| annual * shape.monthly_weights[m] / DAYS_IN_MONTH[m] as f64,
        |m, _| &shapes[m],
    )
}
