use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time stepping and nonlinear solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    /// `δt = dt_coeff / N²`.
    pub dt_coeff: f64,
    pub t_final: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Interior penalty; `None` means `10 (p + 1)²`.
    pub sigma: Option<f64>,
    /// Time levels kept for difference quotients.
    pub history: usize,
    /// Keep every `snapshot_stride`-th state in the trajectory.
    pub snapshot_stride: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            dt_coeff: 1.0,
            t_final: 0.5,
            newton_tol: 1e-10,
            newton_max_iter: 30,
            sigma: None,
            history: 3,
            snapshot_stride: 1,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_coeff > 0.0 && self.dt_coeff.is_finite()) {
            return Err(Error::Config(format!("dt_coeff must be positive, got {}", self.dt_coeff)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return Err(Error::Config("Newton tolerance and iteration cap must be positive".into()));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("sigma must be positive, got {s}")));
            }
        }
        if self.history < 3 {
            return Err(Error::Config(format!("history must keep at least 3 levels, got {}", self.history)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn dt(&self, n_elements: usize) -> f64 {
        self.dt_coeff / (n_elements * n_elements) as f64
    }

    /// Smallest number of steps reaching `t_final`; exact when `t_final` is a multiple of `δt`.
    pub fn n_steps(&self, n_elements: usize) -> usize {
        let raw = self.t_final / self.dt(n_elements);
        let r = raw.round();
        if (raw - r).abs() < 1e-9 * r.max(1.0) {
            r as usize
        } else {
            raw.ceil() as usize
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_and_validation() {
        let c = SolveConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.dt(32), 1.0 / 1024.0);
        assert_eq!(c.n_steps(32), 512);
        let bad = SolveConfig {
            history: 2,
            ..SolveConfig::default()
        };
        assert!(bad.validate().is_err());
        let zero = SolveConfig {
            t_final: 0.0,
            ..SolveConfig::default()
        };
        assert_eq!(zero.n_steps(16), 0);
    }
}
