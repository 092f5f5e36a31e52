use super::{ProfileError, TimeSeriesProfile};

/// Brings a PV and a load profile onto a common step.
///
/// The coarser series is repeated down to the finer step, so each sub-step
/// carries the same kW and energy is preserved. Step ratios that are not an
/// integer, or lengths that do not line up after expansion, are rejected.
pub fn align(
    pv: &TimeSeriesProfile,
    load: &TimeSeriesProfile,
) -> Result<(TimeSeriesProfile, TimeSeriesProfile), ProfileError> {
    let (a, b) = (pv.step_hours(), load.step_hours());
    if a == b {
        if pv.len() != load.len() {
            return Err(ProfileError::IncompatibleProfiles(format!(
                "same step but {} vs {} steps",
                pv.len(),
                load.len()
            )));
        }
        return Ok((pv.clone(), load.clone()));
    }

    let ratio = a.max(b) / a.min(b);
    let factor = ratio.round();
    if (ratio - factor).abs() > 1e-9 * ratio {
        return Err(ProfileError::IncompatibleProfiles(format!(
            "step ratio {a} h / {b} h is not an integer"
        )));
    }
    let factor = factor as usize;
    let expand = |p: &TimeSeriesProfile, fine_len: usize, fine_step: f64| {
        if p.len() * factor != fine_len {
            return Err(ProfileError::IncompatibleProfiles(format!(
                "{} steps x {factor} does not match {fine_len} fine steps",
                p.len()
            )));
        }
        let values = p
            .values()
            .iter()
            .flat_map(|v| std::iter::repeat_n(*v, factor))
            .collect();
        TimeSeriesProfile::new(p.kind(), fine_step, values)
    };

    if a > b {
        Ok((expand(pv, load.len(), b)?, load.clone()))
    } else {
        Ok((pv.clone(), expand(load, pv.len(), a)?))
    }
}
