use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The Orlicz function φ of a modular `∫ φ(|f|) dμ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiFunction {
    /// `uᵖ`, `p ≥ 1`.
    Power { p: f64 },
    Linear,
    /// `eᵘ − 1`.
    ExpM1,
}

impl PhiFunction {
    pub fn power(p: f64) -> Result<Self> {
        let phi = Self::Power { p };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Power { p } = *self {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::InvalidArgument(format!("power exponent {p} must be at least 1")));
            }
        }
        let ladder = [0.0, 1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0];
        let values: Vec<f64> = ladder.iter().map(|&u| self.eval(u)).collect();
        if values[0] != 0.0
            || values.windows(2).any(|w| w[1] < w[0])
            || values[1..].iter().any(|&v| v <= 0.0)
        {
            return Err(Error::InvalidArgument(format!("{self:?} is not an admissible Orlicz function")));
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Self::Power { p } => u.powf(p),
            Self::Linear => u,
            Self::ExpM1 => u.exp_m1(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Power { p } => format!("power({p})"),
            Self::Linear => "linear".into(),
            Self::ExpM1 => "expm1".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_functions_are_admissible() {
        for phi in [PhiFunction::Linear, PhiFunction::ExpM1, PhiFunction::power(2.0).unwrap()] {
            phi.validate().unwrap();
            assert_eq!(phi.eval(0.0), 0.0);
        }
        assert!(PhiFunction::power(0.5).is_err());
        assert_eq!(PhiFunction::power(3.0).unwrap().eval(2.0), 8.0);
    }
}
