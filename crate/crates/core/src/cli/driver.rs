//! Single runs and convergence sweeps, with their artifacts on disk.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimator::{
    write_report_csv, write_summary_json, ConvergenceRow, ConvergenceTable, EstimatorObserver, EstimatorSummary,
    ReferenceData,
};
use crate::mesh::Mesh1D;
use crate::model::TestCase;
use crate::solver::{initial_state, run, Scheme};

use super::config::RunConfig;

/// Echo of the configuration plus what identifies the produced data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    /// SHA-256 over the canonical config JSON and the mesh hash.
    pub content_hash: String,
    pub mesh_hash: String,
    pub version: String,
    pub dt: f64,
    pub n_steps: usize,
    pub snapshot_stride: usize,
    pub completed: bool,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Machine-readable failure, written as `error.json` and to stderr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

impl ErrorReport {
    pub fn new(e: &Error) -> Self {
        Self {
            error: ErrorBody {
                kind: e.kind().into(),
                message: e.to_string(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain strings serialize")
    }
}

/// What a finished run returns besides its files.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
    pub summary: EstimatorSummary,
}

pub fn content_hash(config: &RunConfig, mesh_hash: &str) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    h.update(mesh_hash.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Solves one configuration and writes `manifest.json`, `report.csv`,
/// `summary.json`, `energy.csv` and `snapshots/` into `config.output_dir`.
///
/// A solver failure still writes everything reached so far plus
/// `error.json`, then returns the error.
pub fn cmd_run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let bench = config.benchmark()?;
    let params = config.model_params(&bench)?;
    let mesh = Arc::new(Mesh1D::uniform(bench.domain, config.n, bench.bc)?);
    let solve = config.solve_config();
    let scheme = Scheme::new(mesh.clone(), config.p, params, solve.sigma)?;
    let (u0, v0) = (bench.u0, bench.v0);
    let (uh, vh) = initial_state(&scheme, &|x| u0.value(x), &|x| u0.derivative(x), &|x| v0.value(x))?;
    let reference = ReferenceData {
        exact: bench.exact,
        initial: Some((u0, v0)),
    };
    let mut observer = EstimatorObserver::new(&scheme, reference, solve.snapshot_stride);
    let dir = config.output_dir.clone();
    std::fs::create_dir_all(&dir)?;
    let _ = std::fs::remove_file(dir.join("error.json"));

    let trajectory = run(scheme, &solve, &uh, &vh, &mut observer)?;
    let mesh_hash = mesh.content_hash();
    let manifest = Manifest {
        config: config.clone(),
        content_hash: content_hash(config, &mesh_hash),
        mesh_hash,
        version: env!("CARGO_PKG_VERSION").into(),
        dt: trajectory.dt,
        n_steps: solve.n_steps(config.n),
        snapshot_stride: solve.snapshot_stride,
        completed: trajectory.is_complete(),
    };
    let (rows, summary) = observer.into_parts();
    write_json(&dir.join("manifest.json"), &manifest)?;
    write_report_csv(&dir.join("report.csv"), &rows)?;
    write_summary_json(&dir.join("summary.json"), &summary)?;
    crate::solver::trajectory::write_step_log(&dir.join("energy.csv"), &trajectory.log)?;
    trajectory.write_checkpoint(&dir.join("snapshots"))?;
    if let Some(e) = trajectory.failure {
        write_json(&dir.join("error.json"), &ErrorReport::new(&e))?;
        return Err(e);
    }
    Ok(RunOutcome {
        output_dir: dir,
        manifest,
        summary,
    })
}

/// One table per degree; `failures` lists `(N, p, error)` of runs that did not finish.
#[derive(Debug)]
pub struct ConvergeOutcome {
    pub tables: Vec<ConvergenceTable>,
    pub failures: Vec<(usize, usize, Error)>,
}

/// Directory of one sweep member below the template's output directory.
pub fn member_dir(root: &Path, n: usize, p: usize) -> PathBuf {
    root.join(format!("p{p}_N{n}"))
}

/// Runs every `(N, p)` pair and writes `table_p{p}.csv` into the template's
/// output directory. Failed runs leave gaps; tables are written regardless.
/// Independent runs share a pool of `available_parallelism` workers.
pub fn cmd_converge(template: &RunConfig, ns: &[usize], ps: &[usize]) -> Result<ConvergeOutcome> {
    if ns.len() < 2 {
        return Err(Error::Config("a convergence sweep needs at least two values of N".into()));
    }
    if ps.is_empty() {
        return Err(Error::Config("a convergence sweep needs at least one degree".into()));
    }
    let root = template.output_dir.clone();
    let mut jobs = Vec::new();
    for &p in ps {
        for &n in ns {
            let cfg = RunConfig {
                n,
                p,
                output_dir: member_dir(&root, n, p),
                ..template.clone()
            };
            cfg.validate()?;
            jobs.push(cfg);
        }
    }
    std::fs::create_dir_all(&root)?;

    let results: Mutex<Vec<Option<Result<RunOutcome>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = jobs.get(k) else { break };
                let r = cmd_run(cfg);
                results.lock().expect("no worker panics while holding the lock")[k] = Some(r);
            });
        }
    });
    let results = results.into_inner().expect("workers joined");

    let with_error = template.test_case == TestCase::Test1
        || (template.test_case == TestCase::Custom
            && template.custom.as_ref().is_some_and(|c| c.exact.is_some()));
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    let mut by_p: Vec<(usize, Vec<ConvergenceRow>)> = ps.iter().map(|&p| (p, Vec::new())).collect();
    for (cfg, r) in jobs.iter().zip(results) {
        let bench = cfg.benchmark()?;
        let h = (bench.domain.1 - bench.domain.0) / cfg.n as f64;
        let row = match r.expect("every job ran") {
            Ok(o) => ConvergenceRow {
                n: cfg.n,
                h,
                error: if with_error { o.summary.max_error_reduced } else { None },
                indicator: Some(o.summary.max_indicator),
            },
            Err(e) => {
                failures.push((cfg.n, cfg.p, e));
                ConvergenceRow {
                    n: cfg.n,
                    h,
                    error: None,
                    indicator: None,
                }
            }
        };
        if let Some(entry) = by_p.iter_mut().find(|(p, _)| *p == cfg.p) {
            entry.1.push(row);
        }
    }
    for (p, rows) in by_p {
        let mut table = ConvergenceTable::new(p, rows)?;
        if with_error {
            table = table.with_error_columns();
        }
        table.write_csv(&root.join(format!("table_p{p}.csv")))?;
        tables.push(table);
    }
    Ok(ConvergeOutcome { tables, failures })
}
