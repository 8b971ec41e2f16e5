use crate::error::{Error, Result};
use rug::float::Constant;
use rug::Float;

/// Working-precision settings threaded through every numeric operation.
///
/// `working_precision` is the mantissa size in bits for all `rug::Float`
/// arithmetic. `target_relative_tolerance` is the accuracy the derived
/// operations aim for (quadrature stopping, extrapolation contraction,
/// series tail targets); operations that cannot reach it report an error
/// rather than returning silently degraded values.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    working_precision: u32,
    target_relative_tolerance: f64,
    series_truncation_default: usize,
}

impl PrecisionContext {
    pub fn new(
        working_precision: u32,
        target_relative_tolerance: f64,
        series_truncation_default: usize,
    ) -> Result<Self> {
        if working_precision < 64 {
            return Err(Error::InvalidInput(format!(
                "working precision {working_precision} below 64 bits"
            )));
        }
        if !(target_relative_tolerance > 0.0) {
            return Err(Error::InvalidInput(
                "target relative tolerance must be positive".into(),
            ));
        }
        if series_truncation_default == 0 {
            return Err(Error::InvalidInput(
                "series truncation default must be positive".into(),
            ));
        }
        Ok(Self {
            working_precision,
            target_relative_tolerance,
            series_truncation_default,
        })
    }

    /// 512 bits, 1e-30 target tolerance. Enough headroom for every
    /// routine except the deep coefficient range, see [`Self::for_magnitude`].
    pub fn standard() -> Self {
        Self::new(512, 1e-30, 1200).unwrap()
    }

    /// Picks 512 or 768 bits depending on the largest intermediate
    /// magnitude the computation will see. Coefficients beyond ~1e120
    /// (Fourier index past ~480) get the wider mantissa so that the final
    /// cancellations retain their leading digits.
    pub fn for_magnitude(log10_max: f64) -> Self {
        if log10_max > 120.0 {
            Self::new(768, 1e-30, 1200).unwrap()
        } else {
            Self::standard()
        }
    }

    /// Context suitable for computing Poincare coefficients up to index `n_max`.
    pub fn for_coefficient_range(n_max: u32) -> Self {
        // leading growth exp(4 pi sqrt(n))
        let log10_max = 4.0 * std::f64::consts::PI * (n_max as f64).sqrt() / std::f64::consts::LN_10;
        Self::for_magnitude(log10_max)
    }

    pub fn bits(&self) -> u32 {
        self.working_precision
    }

    pub fn rel_tol(&self) -> f64 {
        self.target_relative_tolerance
    }

    pub fn series_truncation_default(&self) -> usize {
        self.series_truncation_default
    }

    pub fn new_float(&self, v: f64) -> Float {
        Float::with_val(self.working_precision, v)
    }

    pub fn new_int_float(&self, v: i64) -> Float {
        Float::with_val(self.working_precision, v)
    }

    pub fn zero(&self) -> Float {
        Float::with_val(self.working_precision, 0)
    }

    pub fn one(&self) -> Float {
        Float::with_val(self.working_precision, 1)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.working_precision, Constant::Pi)
    }

    pub fn tolerance(&self) -> Float {
        self.new_float(self.target_relative_tolerance)
    }

    /// Absolute target for truncation tails of coefficient series. Kept a
    /// couple of orders below the relative target so tails never dominate.
    pub fn tail_epsilon(&self) -> f64 {
        self.target_relative_tolerance * 1e-2
    }

    /// Machine epsilon at the working precision.
    pub fn epsilon(&self) -> Float {
        let mut e = self.one();
        e >>= self.working_precision - 1;
        e
    }

    /// With the requested relative tolerance scaled by `factor`.
    pub fn with_rel_tol(&self, tol: f64) -> Self {
        Self {
            working_precision: self.working_precision,
            target_relative_tolerance: tol,
            series_truncation_default: self.series_truncation_default,
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(32, 1e-10, 100).is_err());
        assert!(PrecisionContext::new(64, 1e-10, 100).is_ok());
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(PrecisionContext::new(128, 0.0, 100).is_err());
        assert!(PrecisionContext::new(128, -1.0, 100).is_err());
    }

    #[test]
    fn magnitude_escalation() {
        assert_eq!(PrecisionContext::for_magnitude(100.0).bits(), 512);
        assert_eq!(PrecisionContext::for_magnitude(155.0).bits(), 768);
        assert_eq!(PrecisionContext::for_coefficient_range(1000).bits(), 768);
        assert_eq!(PrecisionContext::for_coefficient_range(100).bits(), 512);
    }
}
