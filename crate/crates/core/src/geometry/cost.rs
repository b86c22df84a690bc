use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An increasing, continuously differentiable cost of distance.
///
/// Library routines are generic over this trait; [`CostSpec`] is the closed,
/// serializable family used in scenario files.
pub trait CostFunction {
    fn value(&self, distance: f64) -> f64;
    fn derivative(&self, distance: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CostSpec {
    /// Travel time `x / speed`.
    Linear { speed: f64 },
    /// `x^2`
    Quadratic,
    /// `x^alpha` with `alpha >= 1`.
    Power { alpha: f64 },
}

impl CostSpec {
    pub fn distance() -> Self {
        CostSpec::Linear { speed: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CostSpec::Linear { speed } if !(speed.is_finite() && speed > 0.0) => {
                Err(Error::param("cost.speed", "must be positive and finite"))
            }
            CostSpec::Power { alpha } if !(alpha.is_finite() && alpha >= 1.0) => {
                Err(Error::param("cost.alpha", "must be at least 1"))
            }
            _ => Ok(()),
        }
    }
}

impl CostFunction for CostSpec {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        match *self {
            CostSpec::Linear { speed } => x / speed,
            CostSpec::Quadratic => x * x,
            CostSpec::Power { alpha } => x.powf(alpha),
        }
    }

    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        match *self {
            CostSpec::Linear { speed } => 1.0 / speed,
            CostSpec::Quadratic => 2.0 * x,
            CostSpec::Power { alpha } => {
                if alpha == 1.0 {
                    1.0
                } else {
                    alpha * x.powf(alpha - 1.0)
                }
            }
        }
    }
}

impl<F: CostFunction + ?Sized> CostFunction for &F {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        (**self).derivative(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for cost in [
            CostSpec::Linear { speed: 2.0 },
            CostSpec::Quadratic,
            CostSpec::Power { alpha: 1.5 },
            CostSpec::Power { alpha: 3.0 },
        ] {
            for &x in &[0.1, 0.5, 1.3] {
                let fd = (cost.value(x + h) - cost.value(x - h)) / (2.0 * h);
                assert!((fd - cost.derivative(x)).abs() < 1e-6, "{cost:?} at {x}");
            }
        }
    }

    #[test]
    fn quadratic_derivative_examples() {
        assert!((CostSpec::Quadratic.derivative(0.4) - 0.8).abs() < 1e-15);
        assert_eq!(CostSpec::Quadratic.derivative(0.0), 0.0);
    }

    #[test]
    fn rejects_concave_powers() {
        assert!(CostSpec::Power { alpha: 0.5 }.validate().is_err());
        assert!(CostSpec::Linear { speed: 0.0 }.validate().is_err());
        assert!(CostSpec::Quadratic.validate().is_ok());
    }
}
