use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::BoundaryMode;

use super::energy::{EnergyDensity, QuarticWell};

/// Which formula to use for the compactly supported bump of the third benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpVariant {
    /// `¼(cos(8π|x-½|) + 1)`: C¹ with a jump in the second derivative.
    #[default]
    C1,
    /// `¼(cos(8π|x-½|²) + 1)`: jumps at `|x-½| = ⅛`.
    Printed,
}

/// Closed-form scalar profiles used for initial data and exact solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Profile {
    Constant { value: f64 },
    /// `amplitude * sin(wavenumber * x)`.
    Sine { amplitude: f64, wavenumber: f64 },
    /// `tanh(rate * x)`.
    Tanh { rate: f64 },
    /// Bump of height ½ centred at `center` with radius ⅛.
    Bump { center: f64, variant: BumpVariant },
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Constant { value: 0.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Sine {
                amplitude,
                wavenumber,
            } => amplitude * (wavenumber * x).sin(),
            Profile::Tanh { rate } => (rate * x).tanh(),
            Profile::Bump { center, variant } => {
                let r = (x - center).abs();
                if r > 0.125 {
                    return 0.0;
                }
                match variant {
                    BumpVariant::C1 => 0.25 * ((8.0 * PI * r).cos() + 1.0),
                    BumpVariant::Printed => 0.25 * ((8.0 * PI * r * r).cos() + 1.0),
                }
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant { .. } => 0.0,
            Profile::Sine {
                amplitude,
                wavenumber,
            } => amplitude * wavenumber * (wavenumber * x).cos(),
            Profile::Tanh { rate } => {
                let t = (rate * x).tanh();
                rate * (1.0 - t * t)
            }
            Profile::Bump { center, variant } => {
                let s = x - center;
                let r = s.abs();
                if r > 0.125 {
                    return 0.0;
                }
                let sgn = s.signum();
                match variant {
                    BumpVariant::C1 => -2.0 * PI * (8.0 * PI * r).sin() * sgn,
                    BumpVariant::Printed => -4.0 * PI * r * (8.0 * PI * r * r).sin() * sgn,
                }
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant { .. } => 0.0,
            Profile::Sine {
                amplitude,
                wavenumber,
            } => -amplitude * wavenumber * wavenumber * (wavenumber * x).sin(),
            Profile::Tanh { rate } => {
                let t = (rate * x).tanh();
                -2.0 * rate * rate * t * (1.0 - t * t)
            }
            Profile::Bump { center, variant } => {
                let r = (x - center).abs();
                if r > 0.125 {
                    return 0.0;
                }
                match variant {
                    BumpVariant::C1 => -16.0 * PI * PI * (8.0 * PI * r).cos(),
                    BumpVariant::Printed => {
                        let a = 8.0 * PI * r * r;
                        -4.0 * PI * a.sin() - 64.0 * PI * PI * r * r * a.cos()
                    }
                }
            }
        }
    }
}

/// Physical parameters shared by the scheme and the estimators.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub gamma: f64,
    pub mu: f64,
    pub energy: Arc<dyn EnergyDensity>,
    pub bc: BoundaryMode,
    pub domain: (f64, f64),
}

impl ModelParams {
    pub fn new(
        gamma: f64,
        mu: f64,
        energy: Arc<dyn EnergyDensity>,
        bc: BoundaryMode,
        domain: (f64, f64),
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("mu must be non-negative, got {mu}")));
        }
        Ok(Self {
            gamma,
            mu,
            energy,
            bc,
            domain,
        })
    }

    pub fn quartic(gamma: f64, mu: f64, bc: BoundaryMode, domain: (f64, f64)) -> Result<Self> {
        Self::new(gamma, mu, Arc::new(QuarticWell), bc, domain)
    }
}

/// Steady kink `u = tanh(x √(2/γ))`, `v = 0`.
pub fn exact_steady(x: f64, gamma: f64) -> (f64, f64) {
    ((x * (2.0 / gamma).sqrt()).tanh(), 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestCase {
    Test1,
    Test2,
    Test3,
    Custom,
}

/// Everything that defines one benchmark problem apart from discretization choices.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub domain: (f64, f64),
    pub bc: BoundaryMode,
    pub gamma: f64,
    pub mu: f64,
    pub u0: Profile,
    pub v0: Profile,
    /// Exact `(u, v)` when known; both are time independent here.
    pub exact: Option<(Profile, Profile)>,
}

impl Benchmark {
    pub fn test1(gamma: f64, mu: f64) -> Self {
        let u = Profile::Tanh {
            rate: (2.0 / gamma).sqrt(),
        };
        Self {
            domain: (-1.0, 1.0),
            bc: BoundaryMode::Natural,
            gamma,
            mu,
            u0: u,
            v0: Profile::zero(),
            exact: Some((u, Profile::zero())),
        }
    }

    pub fn test2(gamma: f64, mu: f64) -> Self {
        Self {
            domain: (0.0, 1.0),
            bc: BoundaryMode::Periodic,
            gamma,
            mu,
            u0: Profile::Sine {
                amplitude: 0.01,
                wavenumber: 50.0 * PI,
            },
            v0: Profile::zero(),
            exact: None,
        }
    }

    pub fn test3(gamma: f64, mu: f64, variant: BumpVariant) -> Self {
        Self {
            domain: (0.0, 1.0),
            bc: BoundaryMode::Periodic,
            gamma,
            mu,
            u0: Profile::Bump {
                center: 0.5,
                variant,
            },
            v0: Profile::zero(),
            exact: None,
        }
    }

    /// Default parameters: `γ = μ = 1e-2` for the first case, `γ = 1e-3, μ = 1e-1` otherwise.
    pub fn standard(case: TestCase, variant: BumpVariant) -> Result<Self> {
        match case {
            TestCase::Test1 => Ok(Self::test1(1e-2, 1e-2)),
            TestCase::Test2 => Ok(Self::test2(1e-3, 1e-1)),
            TestCase::Test3 => Ok(Self::test3(1e-3, 1e-1, variant)),
            TestCase::Custom => Err(Error::Config(
                "custom test case needs explicit data".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steady_profile() {
        assert_eq!(exact_steady(0.0, 1e-2).0, 0.0);
        assert!((exact_steady(1.0, 2.0).0 - 0.761594155955765).abs() < 1e-12);
        let gamma: f64 = 1e-2;
        let p = Profile::Tanh {
            rate: (2.0 / gamma).sqrt(),
        };
        let w = QuarticWell;
        for i in 0..=100 {
            let x = -1.0 + 0.02 * i as f64;
            let res = w.dw(p.value(x)) - gamma * p.second_derivative(x);
            assert!(res.abs() <= 1e-10, "x={x} res={res}");
        }
    }

    #[test]
    fn initial_data_values() {
        let b2 = Benchmark::test2(1e-3, 1e-1);
        assert!((b2.u0.value(0.01) - 0.01).abs() < 1e-15);
        let b3 = Benchmark::test3(1e-3, 1e-1, BumpVariant::C1);
        assert_eq!(b3.u0.value(0.8), 0.0);
        assert_eq!(b3.u0.value(0.5), 0.5);
        // C1 variant closes continuously with zero slope
        assert!(b3.u0.value(0.625).abs() < 1e-15);
        assert!(b3.u0.derivative(0.625 - 1e-12).abs() < 1e-9);
        let printed = Profile::Bump {
            center: 0.5,
            variant: BumpVariant::Printed,
        };
        assert!(printed.value(0.625 - 1e-12) > 0.4);
    }

    #[test]
    fn derivatives_consistent() {
        let profiles = [
            Profile::Sine {
                amplitude: 0.3,
                wavenumber: 7.0,
            },
            Profile::Tanh { rate: 3.0 },
            Profile::Bump {
                center: 0.5,
                variant: BumpVariant::C1,
            },
            Profile::Bump {
                center: 0.5,
                variant: BumpVariant::Printed,
            },
        ];
        for p in profiles {
            for &x in &[0.41, 0.47, 0.53, 0.6] {
                let e = 1e-6;
                let fd = (p.value(x + e) - p.value(x - e)) / (2.0 * e);
                assert!((fd - p.derivative(x)).abs() < 1e-6, "{p:?} at {x}");
                let fd2 = (p.derivative(x + e) - p.derivative(x - e)) / (2.0 * e);
                assert!((fd2 - p.second_derivative(x)).abs() < 1e-5 * fd2.abs().max(1.0));
            }
        }
    }
}
