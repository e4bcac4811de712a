//! Operator and invariant checks of every module at a fixed seed.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::estimator::{eoc, EstimatorObserver, ReferenceData};
use crate::mesh::{BoundaryMode, Grading, Mesh1D};
use crate::model::{Benchmark, BumpVariant, EnergyDensity, ModelParams, QuarticWell};
use crate::operators::{
    default_sigma, discrete_gradient, discrete_reconstruction, elementwise_ibp_check, ibp_duality_check, ip_form,
    GradientSide, PenaltyForm,
};
use crate::reconstruct::{r2_rhs, reconstruct_r2, second_order_residual};
use crate::solver::{initial_state, run, Scheme, SolveConfig};
use crate::space::BrokenField;

/// One named check; `id` is `module/invariant`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub sigma: Option<f64>,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// `PASS id detail` lines.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| format!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.detail))
            .collect()
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn bound(&mut self, id: &str, worst: f64, tol: f64) {
        self.0.push(CheckResult {
            id: id.into(),
            passed: worst <= tol,
            detail: format!("max {worst:.3e} (tol {tol:.0e})"),
        });
    }

    fn flag(&mut self, id: &str, passed: bool, detail: String) {
        self.0.push(CheckResult {
            id: id.into(),
            passed,
            detail,
        });
    }
}

fn random_mesh(rng: &mut ChaCha8Rng, bc: BoundaryMode) -> Arc<Mesh1D> {
    let n = rng.random_range(2..12);
    let grading = Grading::RandomPerturbed {
        seed: rng.random(),
        strength: 0.3,
    };
    Arc::new(Mesh1D::build((-1.0, 1.5), n, grading, bc).expect("valid mesh parameters"))
}

fn random_field(rng: &mut ChaCha8Rng, mesh: Arc<Mesh1D>, p: usize) -> BrokenField {
    let len = mesh.n_elements() * (p + 1);
    let c = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
    BrokenField::from_coeffs(mesh, p, c).expect("coefficient count matches")
}

fn operator_checks(out: &mut Checks, seed: u64, cases: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ibp, mut dual, mut grad, mut cont, mut trace, mut sym) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..cases {
        let bc = if k % 2 == 0 { BoundaryMode::Periodic } else { BoundaryMode::Natural };
        let mesh = random_mesh(&mut rng, bc);
        let p = rng.random_range(0..=3);
        let psi = random_field(&mut rng, mesh.clone(), p);
        let phi = random_field(&mut rng, mesh.clone(), p);
        ibp = ibp.max(elementwise_ibp_check(&psi, &phi));
        dual = dual.max(ibp_duality_check(&psi, &phi));
        sym = sym.max((ip_form(&psi, &phi, 7.0) - ip_form(&phi, &psi, 7.0)).abs());
        for side in [GradientSide::Plus, GradientSide::Minus] {
            let d = discrete_reconstruction(&psi, side);
            let f = d.field();
            cont = cont.max(f.max_jump());
            for face in mesh.faces() {
                // D+ takes the left trace, D- the right trace
                let want = match side {
                    GradientSide::Plus => psi.right_trace(face.left),
                    GradientSide::Minus => psi.left_trace(face.right),
                };
                trace = trace.max((f.right_trace(face.left) - want).abs());
            }
            // on a periodic mesh G± of a continuous field is its derivative
            if mesh.is_periodic() {
                let g = discrete_gradient(f, side, p + 1);
                grad = grad.max(g.sub(&f.derivative().with_degree(p + 1)).l2_norm());
            }
        }
    }
    out.bound("operators/elementwise_ibp", ibp, 1e-11);
    out.bound("operators/ibp_duality", dual, 1e-11);
    out.bound("operators/gradient_of_continuous", grad, 1e-10);
    out.bound("operators/reconstruction_continuity", cont, 1e-10);
    out.bound("operators/reconstruction_traces", trace, 1e-11);
    out.bound("operators/penalty_symmetry", sym, 1e-10);
}

fn penalty_checks(out: &mut Checks, sigma: Option<f64>) {
    let mut worst = f64::INFINITY;
    let mut ok = true;
    let mut detail = String::new();
    for bc in [BoundaryMode::Periodic, BoundaryMode::Natural] {
        for p in 0..=3 {
            let s = sigma.unwrap_or_else(|| default_sigma(p));
            let mesh = Mesh1D::uniform((0.0, 1.0), 8, bc).expect("valid mesh");
            let r = PenaltyForm::assemble(&mesh, p, s).and_then(|f| f.coercivity_constant(&mesh));
            match r {
                Ok(c) => {
                    worst = worst.min(c);
                    if c <= 1e-8 {
                        ok = false;
                        detail = format!("{bc:?} p = {p}, sigma = {s}: constant {c:.3e}");
                    }
                }
                Err(e) => {
                    ok = false;
                    detail = e.to_string();
                }
            }
        }
    }
    if ok {
        detail = format!("smallest constant {worst:.3e}");
    }
    out.flag("operators/penalty_coercivity", ok, detail);
}

fn model_checks(out: &mut Checks, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let w = QuarticWell;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u: f64 = rng.random_range(-3.0..3.0);
        for k in 0..4 {
            let e = 1e-5;
            let fd = (w.derivative(k, u + e).unwrap() - w.derivative(k, u - e).unwrap()) / (2.0 * e);
            let exact = w.derivative(k + 1, u).unwrap();
            worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
        }
    }
    out.bound("model/energy_derivatives", worst, 1e-6);
}

/// Short Test 3 run exercising the solver, reconstruction and estimator.
fn dynamic_checks(out: &mut Checks, sigma: Option<f64>) {
    let b = Benchmark::test3(1e-3, 1e-1, BumpVariant::C1);
    let result = (|| {
        let params = ModelParams::quartic(b.gamma, b.mu, b.bc, b.domain)?;
        let mesh = Arc::new(Mesh1D::uniform(b.domain, 16, b.bc)?);
        let scheme = Scheme::new(mesh, 1, params.clone(), sigma)?;
        let (u, v) = initial_state(&scheme, &|x| b.u0.value(x), &|x| b.u0.derivative(x), &|x| b.v0.value(x))?;
        let cfg = SolveConfig {
            t_final: 0.02,
            sigma,
            ..SolveConfig::default()
        };
        let mut obs = EstimatorObserver::new(&scheme, ReferenceData::default(), 1);
        let traj = run(scheme, &cfg, &u, &v, &mut obs)?;
        if let Some(e) = traj.failure {
            return Err(e);
        }
        let last = traj.last();
        let r2 = reconstruct_r2(&last.u, &last.tau, &params)?;
        let g = r2_rhs(&last.u, &last.tau, &params)?;
        let r2_res = second_order_residual(&r2, &g, 9);
        Ok((traj.log, r2_res, obs.rows()))
    })();
    let (log, r2_res, rows) = match result {
        Ok(r) => r,
        Err(e) => {
            out.flag("solver/short_run", false, e.to_string());
            return;
        }
    };
    out.flag("solver/short_run", true, format!("{} steps", log.len() - 1));
    let m0 = log[0].mass;
    let drift = log.iter().map(|r| (r.mass - m0).abs()).fold(0.0, f64::max);
    out.bound("solver/mass_conservation", drift, 1e-10);
    let e0 = log[0].energy;
    let rise = log.windows(2).map(|w| w[1].energy - w[0].energy).fold(f64::MIN, f64::max);
    out.bound("solver/energy_dissipation", rise.max(0.0) / e0.abs().max(1.0), 1e-8);
    out.bound("reconstruct/r2_residual", r2_res, 1e-10);
    let negative = rows.iter().any(|r| {
        r.indicator < 0.0 || !r.indicator.is_finite() || r.indicator_parts.iter().any(|x| *x < 0.0)
    });
    out.flag("estimator/nonnegative", !negative, format!("{} levels", rows.len()));
}

fn eoc_checks(out: &mut Checks) {
    let h = [0.5, 0.25, 0.125, 0.0625];
    let worst = eoc(&h, &h)
        .map(|r| r.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
    out.bound("estimator/eoc_identity", worst, 1e-14);
}

/// Every check at `seed`; `sigma` overrides the penalty used by the penalty
/// and dynamic checks.
pub fn cmd_selftest(seed: u64, sigma: Option<f64>) -> SelftestReport {
    let mut out = Checks(Vec::new());
    operator_checks(&mut out, seed, 200);
    penalty_checks(&mut out, sigma);
    model_checks(&mut out, seed);
    dynamic_checks(&mut out, sigma);
    eoc_checks(&mut out);
    SelftestReport {
        seed,
        sigma,
        checks: out.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes() {
        let r = cmd_selftest(1, None);
        assert!(r.passed(), "{:#?}", r.failures());
    }

    #[test]
    fn tiny_penalty_is_reported() {
        let r = cmd_selftest(1, Some(0.01));
        let ids: Vec<&str> = r.failures().iter().map(|c| c.id.as_str()).collect();
        assert!(ids.contains(&"operators/penalty_coercivity"), "{ids:?}");
    }
}
