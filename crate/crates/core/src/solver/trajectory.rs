use std::collections::VecDeque;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::space::io::{sci, write_field};
use crate::space::{project_l2, ritz_project, BrokenField};

use super::config::SolveConfig;
use super::scheme::Scheme;
use super::stepper::{SolverState, StepStats, Stepper};

/// The most recent time levels, newest first.
#[derive(Debug, Clone)]
pub struct History {
    dt: f64,
    capacity: usize,
    levels: VecDeque<SolverState>,
}

impl History {
    pub fn new(dt: f64, capacity: usize) -> Self {
        Self {
            dt,
            capacity: capacity.max(1),
            levels: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, state: SolverState) {
        if self.levels.len() == self.capacity {
            self.levels.pop_back();
        }
        self.levels.push_front(state);
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `back = 0` is the newest level.
    pub fn level(&self, back: usize) -> Result<&SolverState> {
        self.levels.get(back).ok_or(Error::InsufficientHistory {
            needed: back + 1,
            available: self.levels.len(),
        })
    }

    pub fn current(&self) -> &SolverState {
        self.levels.front().expect("history is never empty once started")
    }
}

/// Backward difference quotients at the newest level.
#[derive(Debug, Clone)]
pub struct TimeQuotients {
    pub dt_u: BrokenField,
    pub dt_v: BrokenField,
    pub dt_tau: BrokenField,
    /// Present once three levels are available.
    pub dtt_u: Option<BrokenField>,
    pub dtt_tau: Option<BrokenField>,
}

fn first(a: &BrokenField, b: &BrokenField, dt: f64) -> BrokenField {
    a.sub(b).scale(1.0 / dt)
}

fn second(a: &BrokenField, b: &BrokenField, c: &BrokenField, dt: f64) -> BrokenField {
    let coeffs = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .zip(c.coeffs())
        .map(|((x, y), z)| (x - 2.0 * y + z) / (dt * dt))
        .collect();
    a.with_coeffs(coeffs)
}

/// `(fⁿ - fⁿ⁻¹)/δt` and `(fⁿ - 2fⁿ⁻¹ + fⁿ⁻²)/δt²` for `u`, `v` and `τ`.
pub fn time_quotients(history: &History) -> Result<TimeQuotients> {
    let dt = history.dt();
    let s0 = history.level(0)?;
    let s1 = history.level(1)?;
    let (dtt_u, dtt_tau) = match history.level(2) {
        Ok(s2) => (
            Some(second(&s0.u, &s1.u, &s2.u, dt)),
            Some(second(&s0.tau, &s1.tau, &s2.tau, dt)),
        ),
        Err(_) => (None, None),
    };
    Ok(TimeQuotients {
        dt_u: first(&s0.u, &s1.u, dt),
        dt_v: first(&s0.v, &s1.v, dt),
        dt_tau: first(&s0.tau, &s1.tau, dt),
        dtt_u,
        dtt_tau,
    })
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub mass: f64,
    /// `|int τ_h - int W'(u_h)|`.
    pub tau_defect: f64,
    /// Trapezoid accumulation of `μ‖G⁻ v_h‖²`.
    pub dissipation: f64,
    pub newton_iterations: usize,
    pub newton_residual: f64,
    pub factorizations: usize,
}

/// Called after the initial state and after every accepted step.
pub trait StepObserver {
    fn observe(&mut self, history: &History, stats: Option<&StepStats>) -> Result<()>;
}

/// Observer that does nothing.
pub struct NoObserver;

impl StepObserver for NoObserver {
    fn observe(&mut self, _: &History, _: Option<&StepStats>) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug)]
pub struct Trajectory {
    pub dt: f64,
    /// Strided snapshots; the initial and the last reached state are always included.
    pub snapshots: Vec<SolverState>,
    pub log: Vec<StepRecord>,
    /// Set when the run stopped early; the trajectory up to that point is kept.
    pub failure: Option<Error>,
}

impl Trajectory {
    pub fn last(&self) -> &SolverState {
        self.snapshots.last().expect("at least the initial state")
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    /// Writes every snapshot as `state_<k>_{u,v,tau}` plus `steps.csv`.
    pub fn write_checkpoint(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (k, s) in self.snapshots.iter().enumerate() {
            for (name, f) in [("u", &s.u), ("v", &s.v), ("tau", &s.tau)] {
                write_field(&dir.join(format!("state_{k:05}_{name}")), f, s.t, false)?;
            }
        }
        write_step_log(&dir.join("steps.csv"), &self.log)
    }
}

pub fn write_step_log(path: &Path, log: &[StepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "step",
        "t",
        "energy",
        "mass",
        "tau_defect",
        "dissipation",
        "newton_iterations",
        "newton_residual",
        "factorizations",
    ])?;
    for r in log {
        w.write_record([
            r.step.to_string(),
            sci(r.t),
            sci(r.energy),
            sci(r.mass),
            sci(r.tau_defect),
            sci(r.dissipation),
            r.newton_iterations.to_string(),
            sci(r.newton_residual),
            r.factorizations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Ritz projection of `u0` (with its mean) and `L²` projection of `v0`.
pub fn initial_state(
    scheme: &Scheme,
    u0: &dyn Fn(f64) -> f64,
    du0: &dyn Fn(f64) -> f64,
    v0: &dyn Fn(f64) -> f64,
) -> Result<(BrokenField, BrokenField)> {
    let mesh: Arc<Mesh1D> = scheme.mesh().clone();
    let u = ritz_project(u0, du0, scheme.penalty(), mesh.clone())?;
    let v = project_l2(v0, mesh, scheme.degree());
    Ok((u, v))
}

fn record(scheme: &Scheme, s: &SolverState, dissipation: f64, stats: Option<&StepStats>, step: usize) -> StepRecord {
    let dw = s.u.with_coeffs(scheme.project_dw(s.u.coeffs()));
    let st = stats.copied().unwrap_or_default();
    StepRecord {
        step,
        t: s.t,
        energy: scheme.energy(&s.u, &s.v),
        mass: s.u.integral(),
        tau_defect: (s.tau.integral() - dw.integral()).abs(),
        dissipation,
        newton_iterations: st.iterations,
        newton_residual: st.residual,
        factorizations: st.factorizations,
    }
}

/// Integrates from `(u0, v0)` to `config.t_final`, feeding every level to `observer`.
pub fn run(
    scheme: Scheme,
    config: &SolveConfig,
    u0: &BrokenField,
    v0: &BrokenField,
    observer: &mut dyn StepObserver,
) -> Result<Trajectory> {
    let n_steps = config.n_steps(scheme.mesh().n_elements());
    let mut stepper = Stepper::new(scheme, config.clone(), u0, v0)?;
    let dt = stepper.dt();
    let mut history = History::new(dt, config.history);
    let s0 = stepper.state();
    let mut rate = stepper.scheme().dissipation_rate(&s0.v);
    let mut dissipation = 0.0;
    let mut log = vec![record(stepper.scheme(), &s0, 0.0, None, 0)];
    let mut snapshots = vec![s0.clone()];
    history.push(s0);
    let mut failure = None;
    if let Err(e) = observer.observe(&history, None) {
        failure = Some(e);
    }
    let mut k = 0;
    while failure.is_none() && k < n_steps {
        match stepper.step() {
            Ok(stats) => {
                k += 1;
                let s = stepper.state();
                let r1 = stepper.scheme().dissipation_rate(&s.v);
                dissipation += 0.5 * dt * (rate + r1);
                rate = r1;
                log.push(record(stepper.scheme(), &s, dissipation, Some(&stats), k));
                if k % config.snapshot_stride == 0 || k == n_steps {
                    snapshots.push(s.clone());
                }
                history.push(s);
                if let Err(e) = observer.observe(&history, Some(&stats)) {
                    failure = Some(e);
                }
            }
            Err(e) => failure = Some(e),
        }
    }
    if failure.is_some() && snapshots.last().map(|s| s.t) != Some(history.current().t) {
        snapshots.push(history.current().clone());
    }
    Ok(Trajectory {
        dt,
        snapshots,
        log,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryMode;
    use crate::model::ModelParams;

    fn history_of(f: impl Fn(f64) -> f64, dt: f64) -> History {
        let mesh = Arc::new(Mesh1D::uniform((0.0, 1.0), 3, BoundaryMode::Periodic).unwrap());
        let phi = BrokenField::from_coeffs(mesh, 1, vec![1.0, 2.0, -1.0, 0.5, 3.0, 0.0]).unwrap();
        let mut h = History::new(dt, 3);
        for n in 0..5 {
            let t = n as f64 * dt;
            let u = phi.scale(f(t));
            h.push(SolverState {
                t,
                u: u.clone(),
                v: u.clone(),
                tau: u,
            });
        }
        h
    }

    #[test]
    fn quotients_exact_in_time() {
        let dt = 0.125;
        let h = history_of(|t| t, dt);
        let q = time_quotients(&h).unwrap();
        let phi = h.level(0).unwrap().u.scale(1.0 / (4.0 * dt));
        for (a, b) in q.dt_u.coeffs().iter().zip(phi.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(q.dtt_u.unwrap().coeffs().iter().all(|x| x.abs() < 1e-12));
        let h2 = history_of(|t| t * t, dt);
        let q2 = time_quotients(&h2).unwrap();
        let phi2 = h2.level(0).unwrap().u.scale(2.0 / (16.0 * dt * dt));
        for (a, b) in q2.dtt_u.unwrap().coeffs().iter().zip(phi2.coeffs()) {
            assert!((a - b).abs() < 1e-11);
        }
        let still = history_of(|_| 1.0, dt);
        let q3 = time_quotients(&still).unwrap();
        assert!(q3.dt_v.coeffs().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn quotients_need_history() {
        let mut h = History::new(0.1, 3);
        let mesh = Arc::new(Mesh1D::uniform((0.0, 1.0), 2, BoundaryMode::Periodic).unwrap());
        let z = BrokenField::zeros(mesh, 0);
        h.push(SolverState {
            t: 0.0,
            u: z.clone(),
            v: z.clone(),
            tau: z,
        });
        assert!(matches!(
            time_quotients(&h),
            Err(Error::InsufficientHistory { needed: 2, available: 1 })
        ));
    }

    #[test]
    fn zero_horizon_has_one_state() {
        let b = crate::model::Benchmark::test1(1e-2, 1e-2);
        let params = ModelParams::quartic(b.gamma, b.mu, b.bc, b.domain).unwrap();
        let mesh = Arc::new(Mesh1D::uniform(b.domain, 8, b.bc).unwrap());
        let scheme = Scheme::new(mesh, 1, params, None).unwrap();
        let (u, v) = initial_state(&scheme, &|x| b.u0.value(x), &|x| b.u0.derivative(x), &|x| b.v0.value(x)).unwrap();
        let cfg = SolveConfig {
            t_final: 0.0,
            ..SolveConfig::default()
        };
        let tr = run(scheme, &cfg, &u, &v, &mut NoObserver).unwrap();
        assert_eq!(tr.snapshots.len(), 1);
        assert_eq!(tr.log.len(), 1);
        assert!(tr.is_complete());
    }
}
