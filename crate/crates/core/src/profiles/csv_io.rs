use std::io::Write;

use chrono::{DateTime, NaiveDateTime};

use super::{step_start, ProfileError, ProfileKind, TimeSeriesProfile};

const HEADER: [&str; 2] = ["timestamp", "power_kw"];

fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    const FORMATS: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%d %H:%M",
    ];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok())
        .or_else(|| {
            DateTime::parse_from_rfc3339(raw)
                .ok()
                .map(|t| t.naive_utc())
        })
}

/// Parses a `timestamp,power_kw` document into a profile.
///
/// The step is inferred from the first two timestamps; every later interval
/// must match it exactly, so gaps and duplicates surface as
/// [`ProfileError::NonUniformStep`]. Line numbers in errors are 1-based and
/// count the header.
pub fn parse_profile_csv(text: &str, kind: ProfileKind) -> Result<TimeSeriesProfile, ProfileError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| ProfileError::MalformedRow {
        line: 1,
        reason: e.to_string(),
    })?;
    if headers.len() != 2 || headers.iter().zip(HEADER).any(|(h, want)| h != want) {
        return Err(ProfileError::MalformedRow {
            line: 1,
            reason: format!(
                "expected header `timestamp,power_kw`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut values = Vec::new();
    let mut previous: Option<NaiveDateTime> = None;
    let mut step_secs: Option<i64> = None;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| ProfileError::MalformedRow {
            line,
            reason: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(ProfileError::MalformedRow {
                line,
                reason: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let ts = parse_timestamp(&record[0]).ok_or_else(|| ProfileError::MalformedRow {
            line,
            reason: format!("unparseable timestamp `{}`", &record[0]),
        })?;
        let power: f64 = record[1].parse().map_err(|_| ProfileError::MalformedRow {
            line,
            reason: format!("unparseable power `{}`", &record[1]),
        })?;
        if !power.is_finite() {
            return Err(ProfileError::MalformedRow {
                line,
                reason: format!("non-finite power `{}`", &record[1]),
            });
        }
        if power < 0.0 {
            return Err(ProfileError::NegativePower { line, value: power });
        }

        if let Some(prev) = previous {
            let delta = (ts - prev).num_seconds();
            match step_secs {
                None if delta > 0 => step_secs = Some(delta),
                None => {
                    return Err(ProfileError::NonUniformStep {
                        line,
                        expected_secs: 0,
                        found_secs: delta,
                    })
                }
                Some(step) if step != delta => {
                    return Err(ProfileError::NonUniformStep {
                        line,
                        expected_secs: step,
                        found_secs: delta,
                    })
                }
                Some(_) => {}
            }
        }
        previous = Some(ts);
        values.push(power);
    }

    let step_secs = step_secs.ok_or_else(|| ProfileError::MalformedRow {
        line: values.len() + 1,
        reason: "at least two rows are needed to infer the step".into(),
    })?;
    TimeSeriesProfile::new(kind, step_secs as f64 / 3600.0, values)
}

/// Writes a profile as `timestamp,power_kw`, stamping steps from the start
/// of the reference year.
pub fn write_profile_csv<W: Write>(profile: &TimeSeriesProfile, mut out: W) -> std::io::Result<()> {
    writeln!(out, "timestamp,power_kw")?;
    for (i, v) in profile.values().iter().enumerate() {
        let ts = step_start(i, profile.step_hours());
        writeln!(out, "{},{}", ts.format("%Y-%m-%dT%H:%M:%S"), v)?;
    }
    Ok(())
}
