//! Command-line front end: `run`, `converge` and `selftest`.

pub mod config;
pub mod driver;
pub mod selftest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::mesh::BoundaryMode;
use crate::model::{BumpVariant, TestCase};

pub use config::{parse_list, CustomProblem, RunConfig, SigmaChoice, Well, OUTPUT_DIR_ENV};
pub use driver::{cmd_converge, cmd_run, ConvergeOutcome, ErrorReport, Manifest, RunOutcome};
pub use selftest::{cmd_selftest, CheckResult, SelftestReport};

/// Exit code of configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code of solver and I/O failures, and of failed checks.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "dgelasto", version, about = "DG solver and a posteriori indicators for 1D viscosity-capillarity elastodynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one configuration and write its artifacts.
    Run {
        #[command(flatten)]
        overrides: Overrides,
        /// Number of elements.
        #[arg(long = "N")]
        n: Option<usize>,
        /// Polynomial degree.
        #[arg(long = "p")]
        p: Option<usize>,
    },
    /// Sweep N and p and write one EOC table per degree.
    Converge {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma separated element counts.
        #[arg(long = "N", value_parser = parse_list)]
        ns: SizeList,
        /// Comma separated degrees.
        #[arg(long = "p", value_parser = parse_list, default_value = "1,2,3")]
        ps: SizeList,
    },
    /// Run the operator and invariant checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Penalty used by the coercivity and run checks.
        #[arg(long)]
        sigma: Option<f64>,
    },
}

/// Comma separated list; an alias so clap parses it as one value.
pub type SizeList = Vec<usize>;

/// Config file plus per-key overrides shared by `run` and `converge`.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "test", value_enum)]
    pub test_case: Option<CaseArg>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// A positive number or `auto`.
    #[arg(long)]
    pub sigma: Option<SigmaChoice>,
    #[arg(long)]
    pub dt_coeff: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long = "bc", value_enum)]
    pub bc_mode: Option<BcArg>,
    #[arg(long = "stride")]
    pub snapshot_stride: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long = "variant", value_enum)]
    pub test3_variant: Option<VariantArg>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum CaseArg {
    Test1,
    Test2,
    Test3,
    Custom,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum BcArg {
    Periodic,
    Natural,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum VariantArg {
    C1,
    Printed,
}

impl Overrides {
    /// Config file (or defaults), then the environment, then flags.
    pub fn resolve(&self) -> crate::Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        c.apply_env();
        if let Some(t) = self.test_case {
            c.test_case = match t {
                CaseArg::Test1 => TestCase::Test1,
                CaseArg::Test2 => TestCase::Test2,
                CaseArg::Test3 => TestCase::Test3,
                CaseArg::Custom => TestCase::Custom,
            };
        }
        if let Some(b) = self.bc_mode {
            c.bc_mode = Some(match b {
                BcArg::Periodic => BoundaryMode::Periodic,
                BcArg::Natural => BoundaryMode::Natural,
            });
        }
        if let Some(v) = self.test3_variant {
            c.test3_variant = match v {
                VariantArg::C1 => BumpVariant::C1,
                VariantArg::Printed => BumpVariant::Printed,
            };
        }
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(x) = self.$f.clone() { c.$f = x; })*};
        }
        set!(sigma, dt_coeff, t_final, output_dir, seed);
        if self.gamma.is_some() {
            c.gamma = self.gamma;
        }
        if self.mu.is_some() {
            c.mu = self.mu;
        }
        if self.snapshot_stride.is_some() {
            c.snapshot_stride = self.snapshot_stride;
        }
        Ok(c)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("{}", ErrorReport::new(e).to_json());
    exit_code(e)
}

/// Dispatches a parsed command line; the return value is the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { overrides, n, p } => {
            let outcome = overrides.resolve().and_then(|mut c| {
                c.n = n.unwrap_or(c.n);
                c.p = p.unwrap_or(c.p);
                cmd_run(&c)
            });
            match outcome {
                Ok(o) => {
                    let s = &o.summary;
                    println!("output: {}", o.output_dir.display());
                    println!("levels: {}  t: {}", s.levels, s.t_final);
                    println!("max indicator: {:.7e}", s.max_indicator);
                    if let Some(e) = s.max_error_reduced {
                        println!("max error: {e:.7e}");
                    }
                    if let Some(ei) = s.effectivity {
                        println!("EI: {ei:.2}");
                    }
                    0
                }
                Err(e) => report_error(&e),
            }
        }
        Command::Converge { overrides, ns, ps } => {
            let outcome = overrides.resolve().and_then(|c| cmd_converge(&c, &ns, &ps));
            match outcome {
                Ok(o) => {
                    for t in &o.tables {
                        println!("p = {}", t.degree);
                        for r in t.records() {
                            println!("  {}", r.join("  "));
                        }
                    }
                    for (n, p, e) in &o.failures {
                        eprintln!("{}", serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string(), "n": n, "p": p}}));
                    }
                    if o.failures.is_empty() {
                        0
                    } else {
                        EXIT_FAILURE
                    }
                }
                Err(e) => report_error(&e),
            }
        }
        Command::Selftest { seed, sigma } => {
            let r = cmd_selftest(seed, sigma);
            for line in r.lines() {
                println!("{line}");
            }
            if r.passed() {
                0
            } else {
                for c in r.failures() {
                    eprintln!("{}", serde_json::json!({"error": {"kind": "selftest", "message": c.detail, "id": c.id}}));
                }
                EXIT_FAILURE
            }
        }
    }
}
