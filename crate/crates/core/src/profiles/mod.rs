//! Annual PV-generation and household-load power series.
//!
//! Every series covers one non-leap representative year at a regular step.
//! Values are average power in kW over each step, so the energy of a step is
//! `value * step_hours`.

mod align;
mod csv_io;
mod synth;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use align::align;
pub use csv_io::{parse_profile_csv, write_profile_csv};
pub use synth::{
    synthesize_load_profile, synthesize_pv_profile, DaylightModel, LoadShapeParams, PvShapeParams,
};

/// Hours in the representative (non-leap) year.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Calendar year used to lay out days and weekdays. 2019 is non-leap and
/// starts on a Tuesday.
pub const REFERENCE_YEAR: i32 = 2019;

pub(crate) const DAYS_IN_MONTH: [u32; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfileKind {
    Pv,
    Load,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("non-uniform step at line {line}: expected {expected_secs} s, found {found_secs} s")]
    NonUniformStep {
        line: usize,
        expected_secs: i64,
        found_secs: i64,
    },
    #[error("negative power {value} kW at line {line}")]
    NegativePower { line: usize, value: f64 },
    #[error("invalid shape parameters: {0}")]
    InvalidShape(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{steps} steps of {step_hours} h do not cover one {HOURS_PER_YEAR} h year")]
    WrongLength { steps: usize, step_hours: f64 },
    #[error("incompatible profiles: {0}")]
    IncompatibleProfiles(String),
}

/// Regular-interval power series over one representative year.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesProfile {
    kind: ProfileKind,
    step_hours: f64,
    values: Vec<f64>,
    year_energy_kwh: f64,
}

impl TimeSeriesProfile {
    pub fn new(kind: ProfileKind, step_hours: f64, values: Vec<f64>) -> Result<Self, ProfileError> {
        if !(step_hours.is_finite() && step_hours > 0.0) {
            return Err(ProfileError::InvalidInput(format!(
                "step must be a positive number of hours, got {step_hours}"
            )));
        }
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(ProfileError::NegativePower {
                line: i + 1,
                value: v,
            });
        }
        let covered = values.len() as f64 * step_hours;
        if (covered - HOURS_PER_YEAR).abs() > step_hours * (1.0 + 1e-9) {
            return Err(ProfileError::WrongLength {
                steps: values.len(),
                step_hours,
            });
        }
        let year_energy_kwh = values.iter().sum::<f64>() * step_hours;
        Ok(Self {
            kind,
            step_hours,
            values,
            year_energy_kwh,
        })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn step_hours(&self) -> f64 {
        self.step_hours
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn year_energy_kwh(&self) -> f64 {
        self.year_energy_kwh
    }

    /// Rescales the series so that its annual energy equals `target_kwh`,
    /// keeping the shape.
    pub fn scaled_to_energy(&self, target_kwh: f64) -> Result<Self, ProfileError> {
        if !(target_kwh.is_finite() && target_kwh >= 0.0) {
            return Err(ProfileError::InvalidInput(format!(
                "target energy must be non-negative, got {target_kwh}"
            )));
        }
        if self.year_energy_kwh <= 0.0 {
            return Err(ProfileError::InvalidInput(
                "cannot rescale a profile with zero energy".into(),
            ));
        }
        let factor = target_kwh / self.year_energy_kwh;
        Self::new(
            self.kind,
            self.step_hours,
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    /// Energy per calendar month of the reference year, in kWh.
    pub fn monthly_energy_kwh(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (i, v) in self.values.iter().enumerate() {
            let month = step_start(i, self.step_hours).month0() as usize;
            out[month.min(11)] += v * self.step_hours;
        }
        out
    }
}

/// Timestamp at the start of step `index` in the reference year.
pub fn step_start(index: usize, step_hours: f64) -> NaiveDateTime {
    let secs = (index as f64 * step_hours * 3600.0).round() as i64;
    year_start() + chrono::Duration::seconds(secs)
}

pub(crate) fn year_start() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(REFERENCE_YEAR, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid reference date")
}
