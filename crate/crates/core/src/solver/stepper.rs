//! Crank–Nicolson time stepping with a Newton solve per step.

use crate::error::{Error, Result};
use crate::linalg::BandedLu;
use crate::space::BrokenField;

use super::config::SolveConfig;
use super::scheme::Scheme;

/// One time level of the discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub u: BrokenField,
    pub v: BrokenField,
    pub tau: BrokenField,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub iterations: usize,
    pub residual: f64,
    pub factorizations: usize,
    /// The chord iteration failed and the damped full Newton path was taken.
    pub fallback: bool,
}

/// Advances `(u, v)` by `U⁺ = U + δt/2 (F(U) + F(U⁺))`.
///
/// The Jacobian factorization is reused across iterations and steps and
/// refreshed whenever the contraction degrades; if that fails the step is
/// redone with a fresh Jacobian at every iterate and step halving.
pub struct Stepper {
    scheme: Scheme,
    config: SolveConfig,
    dt: f64,
    step: usize,
    t: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    f: (Vec<f64>, Vec<f64>),
    prev: Option<(Vec<f64>, Vec<f64>)>,
    lu: Option<BandedLu>,
}

struct Residual {
    norm: f64,
    packed: Vec<f64>,
    f: (Vec<f64>, Vec<f64>),
}

impl Stepper {
    pub fn new(scheme: Scheme, config: SolveConfig, u0: &BrokenField, v0: &BrokenField) -> Result<Self> {
        config.validate()?;
        if u0.degree() != scheme.degree() || v0.degree() != scheme.degree() {
            return Err(Error::InvalidArgument("initial data degree does not match the scheme".into()));
        }
        let dt = config.dt(scheme.mesh().n_elements());
        let f = scheme.rhs(u0.coeffs(), v0.coeffs());
        Ok(Self {
            scheme,
            config,
            dt,
            step: 0,
            t: 0.0,
            u: u0.coeffs().to_vec(),
            v: v0.coeffs().to_vec(),
            f,
            prev: None,
            lu: None,
        })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn state(&self) -> SolverState {
        let mesh = self.scheme.mesh().clone();
        let p = self.scheme.degree();
        let u = BrokenField::from_coeffs(mesh.clone(), p, self.u.clone()).expect("consistent length");
        let v = BrokenField::from_coeffs(mesh, p, self.v.clone()).expect("consistent length");
        let tau = self.scheme.eliminate_tau(&u);
        SolverState { t: self.t, u, v, tau }
    }

    fn residual(&self, u: &[f64], v: &[f64]) -> Residual {
        let theta = 0.5 * self.dt;
        let f = self.scheme.rhs(u, v);
        let ru: Vec<f64> = (0..u.len())
            .map(|g| u[g] - self.u[g] - theta * (self.f.0[g] + f.0[g]))
            .collect();
        let rv: Vec<f64> = (0..v.len())
            .map(|g| v[g] - self.v[g] - theta * (self.f.1[g] + f.1[g]))
            .collect();
        let norm = (self.scheme.mass_norm_sq(&ru) + self.scheme.mass_norm_sq(&rv)).sqrt();
        let mut packed = vec![0.0; 2 * u.len()];
        self.scheme.pack(&ru, &rv, &mut packed);
        Residual { norm, packed, f }
    }

    fn factor_at(&self, u: &[f64]) -> Result<BandedLu> {
        self.scheme.assemble_system(u, 0.5 * self.dt).factor()
    }

    fn apply_update(&self, u: &mut [f64], v: &mut [f64], delta: &[f64], lambda: f64) {
        let n = u.len();
        let mut du = vec![0.0; n];
        let mut dv = vec![0.0; n];
        self.scheme.unpack(delta, &mut du, &mut dv);
        for g in 0..n {
            u[g] -= lambda * du[g];
            v[g] -= lambda * dv[g];
        }
    }

    fn guess(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.prev {
            Some((pu, pv)) => (
                self.u.iter().zip(pu).map(|(a, b)| 2.0 * a - b).collect(),
                self.v.iter().zip(pv).map(|(a, b)| 2.0 * a - b).collect(),
            ),
            None => (self.u.clone(), self.v.clone()),
        }
    }

    fn tolerance(&self) -> f64 {
        let size = (self.scheme.mass_norm_sq(&self.u) + self.scheme.mass_norm_sq(&self.v)).sqrt();
        self.config.newton_tol * (1.0 + size)
    }

    /// Chord iterations with the cached factorization.
    fn solve_chord(&mut self, history: &mut Vec<f64>, stats: &mut StepStats) -> Result<Option<(Vec<f64>, Vec<f64>, Residual)>> {
        let tol = self.tolerance();
        let (mut u, mut v) = self.guess();
        let mut fresh = false;
        if self.lu.is_none() {
            self.lu = Some(self.factor_at(&u)?);
            stats.factorizations += 1;
            fresh = true;
        }
        let mut last = f64::INFINITY;
        for it in 0..self.config.newton_max_iter {
            let r = self.residual(&u, &v);
            history.push(r.norm);
            stats.iterations += 1;
            if it > 0 && r.norm <= tol {
                return Ok(Some((u, v, r)));
            }
            if !r.norm.is_finite() {
                return Ok(None);
            }
            if it > 0 && r.norm > 0.25 * last && !fresh {
                self.lu = Some(self.factor_at(&u)?);
                stats.factorizations += 1;
                fresh = true;
            } else {
                fresh = false;
            }
            last = r.norm;
            let mut delta = r.packed;
            self.lu.as_ref().expect("factorized").solve_in_place(&mut delta);
            self.apply_update(&mut u, &mut v, &delta, 1.0);
        }
        Ok(None)
    }

    /// Full Newton with a fresh Jacobian per iterate and halving line search.
    fn solve_damped(&mut self, history: &mut Vec<f64>, stats: &mut StepStats) -> Result<Option<(Vec<f64>, Vec<f64>, Residual)>> {
        let tol = self.tolerance();
        let (mut u, mut v) = (self.u.clone(), self.v.clone());
        let mut r = self.residual(&u, &v);
        history.push(r.norm);
        for it in 0..self.config.newton_max_iter {
            if it > 0 && r.norm <= tol {
                return Ok(Some((u, v, r)));
            }
            let lu = self.factor_at(&u)?;
            stats.factorizations += 1;
            let mut delta = r.packed.clone();
            lu.solve_in_place(&mut delta);
            let mut lambda = 1.0;
            loop {
                let (mut ut, mut vt) = (u.clone(), v.clone());
                self.apply_update(&mut ut, &mut vt, &delta, lambda);
                let rt = self.residual(&ut, &vt);
                stats.iterations += 1;
                if rt.norm < r.norm || lambda < 1e-3 {
                    u = ut;
                    v = vt;
                    r = rt;
                    break;
                }
                lambda *= 0.5;
            }
            history.push(r.norm);
            self.lu = Some(lu);
        }
        if r.norm <= tol {
            return Ok(Some((u, v, r)));
        }
        Ok(None)
    }

    /// Takes one step; on failure the state is left unchanged.
    pub fn step(&mut self) -> Result<StepStats> {
        let mut stats = StepStats::default();
        let mut history = Vec::new();
        let mut solved = self.solve_chord(&mut history, &mut stats)?;
        if solved.is_none() {
            stats.fallback = true;
            solved = self.solve_damped(&mut history, &mut stats)?;
        }
        let Some((u, v, r)) = solved else {
            self.lu = None;
            return Err(Error::NewtonDivergence {
                step: self.step + 1,
                time: self.t + self.dt,
                residuals: history,
            });
        };
        stats.residual = r.norm;
        let old_u = std::mem::replace(&mut self.u, u);
        let old_v = std::mem::replace(&mut self.v, v);
        self.prev = Some((old_u, old_v));
        self.f = r.f;
        self.t = (self.step + 1) as f64 * self.dt;
        self.step += 1;
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryMode, Mesh1D};
    use crate::model::{EnergyDensity, ModelParams};
    use std::sync::Arc;

    #[derive(Debug)]
    struct Harmonic;

    impl EnergyDensity for Harmonic {
        fn name(&self) -> &str {
            "harmonic"
        }
        fn max_order(&self) -> Option<usize> {
            None
        }
        fn derivative(&self, order: usize, u: f64) -> Result<f64> {
            Ok(match order {
                0 => 0.5 * u * u,
                1 => u,
                2 => 1.0,
                _ => 0.0,
            })
        }
        fn is_polynomial(&self) -> bool {
            true
        }
    }

    fn setup(bc: BoundaryMode, params: ModelParams, n: usize, p: usize) -> Scheme {
        let mesh = Arc::new(Mesh1D::uniform(params.domain, n, bc).unwrap());
        Scheme::new(mesh, p, params, None).unwrap()
    }

    #[test]
    fn constant_state_fixed_point() {
        let params = ModelParams::quartic(1e-2, 1e-2, BoundaryMode::Periodic, (0.0, 1.0)).unwrap();
        let s = setup(BoundaryMode::Periodic, params, 8, 2);
        let u0 = BrokenField::constant(s.mesh().clone(), 2, 0.4);
        let v0 = BrokenField::zeros(s.mesh().clone(), 2);
        let mut st = Stepper::new(s, SolveConfig::default(), &u0, &v0).unwrap();
        for _ in 0..3 {
            st.step().unwrap();
        }
        let s1 = st.state();
        for (a, b) in s1.u.coeffs().iter().zip(u0.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s1.v.coeffs().iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn linear_problem_converges_in_one_update() {
        let params = ModelParams::new(
            1e-2,
            0.1,
            Arc::new(Harmonic),
            BoundaryMode::Periodic,
            (0.0, 1.0),
        )
        .unwrap();
        let s = setup(BoundaryMode::Periodic, params, 8, 2);
        let u0 = crate::space::project_l2(|x| (6.0 * x).sin(), s.mesh().clone(), 2);
        let v0 = BrokenField::zeros(s.mesh().clone(), 2);
        let mut st = Stepper::new(s, SolveConfig::default(), &u0, &v0).unwrap();
        for _ in 0..4 {
            let stats = st.step().unwrap();
            // one update then one confirming residual evaluation
            assert_eq!(stats.iterations, 2);
            assert!(!stats.fallback);
        }
    }

    #[test]
    fn energy_dissipates_on_kink() {
        let b = crate::model::Benchmark::test1(1e-2, 1e-2);
        let params = ModelParams::quartic(b.gamma, b.mu, b.bc, b.domain).unwrap();
        let s = setup(b.bc, params, 32, 1);
        let u0 = crate::space::project_l2(|x| b.u0.value(x) + 0.1 * (3.0 * x).cos(), s.mesh().clone(), 1);
        let v0 = crate::space::project_l2(|x| 0.2 * (2.0 * x).sin(), s.mesh().clone(), 1);
        let mut st = Stepper::new(s, SolveConfig::default(), &u0, &v0).unwrap();
        let mut e = st.scheme().energy(&u0, &v0);
        let mass = u0.integral();
        for _ in 0..20 {
            st.step().unwrap();
            let s1 = st.state();
            let e1 = st.scheme().energy(&s1.u, &s1.v);
            assert!(e1 <= e + 1e-10, "{e1} > {e}");
            assert!((s1.u.integral() - mass).abs() < 1e-12);
            e = e1;
        }
    }
}
