//! Run configuration: JSON file keys, validation and the derived problem.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::BoundaryMode;
use crate::model::{Benchmark, BumpVariant, ModelParams, Profile, TestCase};
use crate::operators::default_sigma;
use crate::solver::SolveConfig;

/// Environment variable overriding `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "DGELASTO_OUTPUT_DIR";

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 3;

/// Interior penalty: `"auto"` for `10 (p + 1)²` or an explicit value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaChoice {
    #[default]
    #[serde(with = "auto_tag")]
    Auto,
    Value(f64),
}

mod auto_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected \"auto\" or a number, got {s:?}")))
        }
    }
}

impl SigmaChoice {
    pub fn resolve(self, p: usize) -> f64 {
        match self {
            SigmaChoice::Auto => default_sigma(p),
            SigmaChoice::Value(s) => s,
        }
    }
}

impl std::str::FromStr for SigmaChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(SigmaChoice::Auto);
        }
        s.parse::<f64>()
            .map(SigmaChoice::Value)
            .map_err(|_| format!("expected \"auto\" or a number, got {s:?}"))
    }
}

/// Stored energy density; the quartic double well is the only built-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Well {
    #[default]
    Quartic,
}

/// Problem data for `test_case = "custom"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProblem {
    pub domain: (f64, f64),
    pub bc_mode: BoundaryMode,
    pub u0: Profile,
    #[serde(default = "Profile::zero")]
    pub v0: Profile,
    /// Time-independent exact solution, when one is known.
    #[serde(default)]
    pub exact: Option<(Profile, Profile)>,
}

/// One run, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub test_case: TestCase,
    /// Number of elements `N`.
    pub n: usize,
    pub p: usize,
    /// Defaults to the test case's value when absent.
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub well: Well,
    pub sigma: SigmaChoice,
    /// `δt = dt_coeff / N²`.
    pub dt_coeff: f64,
    pub t_final: f64,
    /// Overrides the test case's boundary treatment.
    pub bc_mode: Option<BoundaryMode>,
    /// Steps between written snapshots and report rows; `None` keeps about 100.
    pub snapshot_stride: Option<usize>,
    pub output_dir: PathBuf,
    pub test3_variant: BumpVariant,
    /// Seed for every randomized check; runs themselves are deterministic.
    pub seed: u64,
    pub custom: Option<CustomProblem>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            test_case: TestCase::Test1,
            n: 32,
            p: 1,
            gamma: None,
            mu: None,
            well: Well::Quartic,
            sigma: SigmaChoice::Auto,
            dt_coeff: 1.0,
            t_final: 0.5,
            bc_mode: None,
            snapshot_stride: None,
            output_dir: PathBuf::from("out"),
            test3_variant: BumpVariant::C1,
            seed: 0,
            custom: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Replaces `output_dir` with the environment override when it is set.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p > MAX_DEGREE {
            return Err(Error::Config(format!("p must lie in 0..={MAX_DEGREE}, got {}", self.p)));
        }
        if self.n < 2 {
            return Err(Error::Config(format!("N must be at least 2, got {}", self.n)));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Config(format!("gamma must be positive, got {g}")));
            }
        }
        if let Some(m) = self.mu {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::Config(format!("mu must be non-negative, got {m}")));
            }
        }
        if let SigmaChoice::Value(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("sigma must be positive, got {s}")));
            }
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::Config("snapshot_stride must be at least 1".into()));
        }
        match (self.test_case, &self.custom) {
            (TestCase::Custom, None) => {
                return Err(Error::Config("test_case \"custom\" needs a \"custom\" section".into()))
            }
            (TestCase::Custom, Some(c)) if !(c.domain.0 < c.domain.1) => {
                return Err(Error::Config("custom domain must be a non-empty interval".into()))
            }
            (TestCase::Custom, _) => {}
            (_, Some(_)) => return Err(Error::Config("\"custom\" is only valid with test_case \"custom\"".into())),
            _ => {}
        }
        self.solve_config().validate()
    }

    /// The benchmark with parameter and boundary overrides applied.
    pub fn benchmark(&self) -> Result<Benchmark> {
        let mut b = match (self.test_case, &self.custom) {
            (TestCase::Custom, Some(c)) => Benchmark {
                domain: c.domain,
                bc: c.bc_mode,
                gamma: 1e-2,
                mu: 1e-2,
                u0: c.u0,
                v0: c.v0,
                exact: c.exact,
            },
            (case, _) => Benchmark::standard(case, self.test3_variant)?,
        };
        let gamma = self.gamma.unwrap_or(b.gamma);
        let mu = self.mu.unwrap_or(b.mu);
        if self.test_case == TestCase::Test1 {
            // the kink's width depends on γ
            b = Benchmark::test1(gamma, mu);
        }
        b.gamma = gamma;
        b.mu = mu;
        if let Some(bc) = self.bc_mode {
            b.bc = bc;
        }
        Ok(b)
    }

    pub fn model_params(&self, b: &Benchmark) -> Result<ModelParams> {
        match self.well {
            Well::Quartic => ModelParams::quartic(b.gamma, b.mu, b.bc, b.domain),
        }
    }

    pub fn sigma_value(&self) -> f64 {
        self.sigma.resolve(self.p)
    }

    pub fn solve_config(&self) -> SolveConfig {
        let mut s = SolveConfig {
            dt_coeff: self.dt_coeff,
            t_final: self.t_final,
            sigma: Some(self.sigma_value()),
            ..SolveConfig::default()
        };
        s.snapshot_stride = self.stride_for(&s);
        s
    }

    fn stride_for(&self, s: &SolveConfig) -> usize {
        match self.snapshot_stride {
            Some(k) => k,
            None => s.n_steps(self.n).div_ceil(100).max(1),
        }
    }

    /// The resolved stride between kept snapshots and report rows.
    pub fn stride(&self) -> usize {
        self.solve_config().snapshot_stride
    }
}

/// Parses `16,32,64`.
pub fn parse_list(text: &str) -> std::result::Result<Vec<usize>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_round_trip() {
        let c = RunConfig {
            test_case: TestCase::Test3,
            n: 64,
            p: 2,
            gamma: Some(1e-3),
            sigma: SigmaChoice::Value(25.0),
            bc_mode: Some(BoundaryMode::Periodic),
            snapshot_stride: Some(7),
            ..RunConfig::default()
        };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&s).unwrap(), c);
        let auto: RunConfig = serde_json::from_str(r#"{"sigma": "auto", "p": 3}"#).unwrap();
        assert_eq!(auto.sigma, SigmaChoice::Auto);
        assert_eq!(auto.sigma_value(), 160.0);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sigma": "big"}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"N": 3}"#).is_err());
    }

    #[test]
    fn validation() {
        let bad_p = RunConfig {
            p: 5,
            ..RunConfig::default()
        };
        assert!(matches!(bad_p.validate(), Err(Error::Config(_))));
        let custom = RunConfig {
            test_case: TestCase::Custom,
            ..RunConfig::default()
        };
        assert!(custom.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn overrides_reach_the_benchmark() {
        let c = RunConfig {
            gamma: Some(4e-2),
            ..RunConfig::default()
        };
        let b = c.benchmark().unwrap();
        assert_eq!(b.u0, Profile::Tanh { rate: (2.0f64 / 4e-2).sqrt() });
        assert_eq!(b.mu, 1e-2);
        let t2 = RunConfig {
            test_case: TestCase::Test2,
            mu: Some(0.0),
            ..RunConfig::default()
        };
        let b2 = t2.benchmark().unwrap();
        assert_eq!((b2.gamma, b2.mu, b2.bc), (1e-3, 0.0, BoundaryMode::Periodic));
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("16, 32,64").unwrap(), vec![16, 32, 64]);
        assert!(parse_list("16,x").is_err());
    }
}
