//! Distance measures derived from fidelity: the Bures distance and the
//! Fuchs–van de Graaf bracket on the trace distance.

use crate::math;
use crate::{CoreError, Result};

fn check_fidelity(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(CoreError::Domain("fidelity must lie in [0, 1]"));
    }
    Ok(())
}

/// Bures distance `D_B = √(2(1 − √F))`.
pub fn bures_distance(f: f64) -> Result<f64> {
    check_fidelity(f)?;
    Ok(math::sqrt(2.0 * (1.0 - math::sqrt(f))))
}

/// Fuchs–van de Graaf bounds `1 − √F ≤ T ≤ √(1 − F)` on the trace distance,
/// returned as `(lower, upper)`.
pub fn trace_distance_bounds(f: f64) -> Result<(f64, f64)> {
    check_fidelity(f)?;
    Ok((1.0 - math::sqrt(f), math::sqrt(1.0 - f)))
}
