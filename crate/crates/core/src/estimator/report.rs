//! CSV/JSON output of estimator runs and convergence tables.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::io::sci;

use super::metrics::{effectivity, eoc};
use super::observer::{EstimatorRow, EstimatorSummary};

/// Marker written for values that do not exist (missing run, absent quotient).
pub const GAP: &str = "-";

fn cell(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

/// Columns that only exist when the exact solution is known.
fn is_error_column(name: &str) -> bool {
    name.starts_with("err_") || name.starts_with("int_err_") || name.starts_with("error_")
}

/// One row per kept level, one column per term. Error columns are left out
/// when no row has an exact solution to compare with.
pub fn write_report_csv(path: &Path, rows: &[EstimatorRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let keep_errors = rows.iter().any(|r| r.errors.is_some());
    let keep = |name: &str| keep_errors || !is_error_column(name);
    if let Some(first) = rows.first() {
        w.write_record(first.columns().iter().map(|(n, _)| n.as_str()).filter(|n| keep(n)))?;
    }
    for r in rows {
        let cols = r.columns();
        let mut rec = Vec::with_capacity(cols.len());
        rec.push(r.terms.step.to_string());
        rec.extend(cols.iter().skip(1).filter(|(n, _)| keep(n)).map(|(_, v)| cell(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json(path: &Path, summary: &EstimatorSummary) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(summary)?)?;
    Ok(())
}

/// One resolution of a sweep; `None` entries are failed or unavailable runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub error: Option<f64>,
    pub indicator: Option<f64>,
}

/// Rows of `(N, error, EOC, indicator, EOC, EI)`, one table per degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub degree: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Emit the error, its EOC and EI; set when any row has an error.
    pub error_columns: bool,
}

fn local_rate(a: Option<f64>, b: Option<f64>, ha: f64, hb: f64) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => eoc(&[x, y], &[ha, hb]).ok().map(|r| r[0]),
        _ => None,
    }
}

impl ConvergenceTable {
    pub fn new(degree: usize, mut rows: Vec<ConvergenceRow>) -> Result<Self> {
        rows.sort_by_key(|r| r.n);
        if rows.windows(2).any(|w| w[0].n == w[1].n) {
            return Err(Error::InvalidArgument("duplicate resolution in convergence table".into()));
        }
        let error_columns = rows.iter().any(|r| r.error.is_some());
        Ok(Self {
            degree,
            rows,
            error_columns,
        })
    }

    /// Keeps the error columns even if every error is missing.
    pub fn with_error_columns(mut self) -> Self {
        self.error_columns = true;
        self
    }

    pub fn has_error(&self) -> bool {
        self.error_columns
    }

    /// EOC of the error column; entry `i` belongs to row `i + 1`.
    pub fn error_rates(&self) -> Vec<Option<f64>> {
        self.rows
            .windows(2)
            .map(|w| local_rate(w[0].error, w[1].error, w[0].h, w[1].h))
            .collect()
    }

    pub fn indicator_rates(&self) -> Vec<Option<f64>> {
        self.rows
            .windows(2)
            .map(|w| local_rate(w[0].indicator, w[1].indicator, w[0].h, w[1].h))
            .collect()
    }

    pub fn effectivities(&self) -> Vec<Option<f64>> {
        self.rows
            .iter()
            .map(|r| match (r.indicator, r.error) {
                (Some(i), Some(e)) => effectivity(i, e).ok(),
                _ => None,
            })
            .collect()
    }

    /// Text rows in the layout `N, error, EOC, indicator, EOC, EI`, or
    /// `N, indicator, EOC` without errors; gaps are [`GAP`].
    pub fn records(&self) -> Vec<Vec<String>> {
        let fmt = |v: Option<f64>| v.map(sci).unwrap_or_else(|| GAP.into());
        let rate = |v: Option<f64>| v.map(|r| format!("{r:.3}")).unwrap_or_else(|| GAP.into());
        let er = self.error_rates();
        let ir = self.indicator_rates();
        let ei = self.effectivities();
        let with_error = self.has_error();
        let mut out = vec![if with_error {
            ["N", "error", "EOC", "indicator", "EOC", "EI"].map(String::from).to_vec()
        } else {
            ["N", "indicator", "EOC"].map(String::from).to_vec()
        }];
        for (i, r) in self.rows.iter().enumerate() {
            let prev = |v: &[Option<f64>]| if i == 0 { None } else { v[i - 1] };
            let mut rec = vec![r.n.to_string()];
            if with_error {
                rec.push(fmt(r.error));
                rec.push(if i == 0 { GAP.into() } else { rate(prev(&er)) });
            }
            rec.push(fmt(r.indicator));
            rec.push(if i == 0 { GAP.into() } else { rate(prev(&ir)) });
            if with_error {
                rec.push(ei[i].map(|x| format!("{x:.2}")).unwrap_or_else(|| GAP.into()));
            }
            out.push(rec);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in self.records() {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sequence_has_unit_rates() {
        let rows = [16, 32, 64]
            .iter()
            .map(|&n| {
                let h = 1.0 / n as f64;
                ConvergenceRow {
                    n,
                    h,
                    error: Some(h),
                    indicator: Some(h),
                }
            })
            .collect();
        let t = ConvergenceTable::new(1, rows).unwrap();
        assert!(t.error_rates().iter().all(|r| (r.unwrap() - 1.0).abs() < 1e-14));
        let rec = t.records();
        assert_eq!(rec[0], ["N", "error", "EOC", "indicator", "EOC", "EI"]);
        assert_eq!(rec[2][2], "1.000");
        assert_eq!(rec[2][5], "1.00");
    }

    #[test]
    fn gaps_without_error_column() {
        let rows = vec![
            ConvergenceRow {
                n: 8,
                h: 0.125,
                error: None,
                indicator: Some(1.0),
            },
            ConvergenceRow {
                n: 16,
                h: 0.0625,
                error: None,
                indicator: None,
            },
        ];
        let rec = ConvergenceTable::new(2, rows).unwrap().records();
        assert_eq!(rec[0], ["N", "indicator", "EOC"]);
        assert_eq!(rec[2], ["16", GAP, GAP]);
    }
}
