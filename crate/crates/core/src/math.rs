//! Float intrinsics routed through `std` or `libm`, plus compensated sums.
//!
//! The closed forms downstream only ever need these few functions; keeping
//! them behind one seam is what lets the crate build without `std`.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn asinh(x: f64) -> f64 {
        x.asinh()
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
mod imp {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn asinh(x: f64) -> f64 {
        libm::asinh(x)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
}

pub(crate) use imp::{abs, asinh, exp, ln, sqrt};

/// NaN-free maximum (inputs here are always ordered reals).
#[inline]
pub(crate) fn fmax(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

/// NaN-free minimum.
#[inline]
pub(crate) fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

/// Clamp a closed-form fidelity into [0, 1].
///
/// Round-off may push a genuine fidelity a hair above 1; anything beyond
/// 1e-8 is an internal contradiction, not noise, and is reported as such.
pub(crate) fn clamp_unit_fidelity(f: f64) -> crate::Result<f64> {
    use crate::CoreError;
    if f > 1.0 {
        if f - 1.0 > 1e-8 {
            return Err(CoreError::NumericalConsistency(
                "fidelity exceeds 1 beyond round-off allowance",
            ));
        }
        return Ok(1.0);
    }
    if f < 0.0 {
        // Every closed form here is manifestly ≥ 0; a negative value means
        // the inputs escaped all validated paths.
        return Err(CoreError::NumericalConsistency("fidelity below 0"));
    }
    Ok(f)
}

/// Kahan compensated accumulator for the long coefficient series.
///
/// The non-Gaussianity discriminant subtracts quantities that agree to ten
/// digits; plain summation noise would be visible at the documented
/// tolerances, compensation keeps it at genuine f64 level.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, term: f64) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
