//! Sweeps that bind the modules into sharpness verifications, with
//! machine-readable reports.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fit::least_squares;

mod runs;
mod suites;
pub use runs::*;
pub use suites::*;

/// Residual bound for slope fits, in log units.
pub const MAX_RESIDUAL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid_n: usize,
    pub depth: usize,
    pub modes: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { grid_n: 4096, depth: 14, modes: 2048, seed: 2024 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Within { center: f64, tol: f64 },
    AtLeast { bound: f64 },
    AtMost { bound: f64 },
    /// informational only
    Report,
}

impl Target {
    fn accepts(&self, slope: f64) -> bool {
        match *self {
            Target::Within { center, tol } => (slope - center).abs() <= tol,
            Target::AtLeast { bound } => slope >= bound,
            Target::AtMost { bound } => slope <= bound,
            Target::Report => true,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Target::Within { center, tol } => format!("{center} ± {tol}"),
            Target::AtLeast { bound } => format!("≥ {bound}"),
            Target::AtMost { bound } => format!("≤ {bound}"),
            Target::Report => "report".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
    pub target: Target,
    /// whether the residual bound applies
    pub check_residual: bool,
    pub pass: bool,
}

impl SlopeFit {
    /// Least squares of log y against log x.
    pub fn log_log(name: &str, xs: &[f64], ys: &[f64], target: Target, check_residual: bool) -> Self {
        let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
        let fit = least_squares(&pts);
        let (slope, intercept, residual) = fit.map(|f| (f.slope, f.intercept, f.residual)).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        let finite = slope.is_finite() && residual.is_finite();
        let pass = matches!(target, Target::Report)
            || (finite && pts.len() >= 4 && target.accepts(slope) && (!check_residual || residual < MAX_RESIDUAL));
        Self { name: name.into(), slope, intercept, residual, points: pts.len(), target, check_residual, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// exact (set arithmetic / algebraic identity) vs tolerance check
    pub exact: bool,
    pub detail: String,
}

impl Check {
    pub fn exact(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, exact: true, detail }
    }

    pub fn tolerance(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, exact: false, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub experiment: String,
    pub grid_n: usize,
    pub depth: usize,
    pub modes: usize,
    pub seed: u64,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub meta: Meta,
    pub rows: Vec<Vec<f64>>,
    pub fit: Vec<SlopeFit>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(experiment: &str, cfg: &RunConfig, columns: &[&str]) -> Self {
        Self {
            meta: Meta {
                experiment: experiment.into(),
                grid_n: cfg.grid_n,
                depth: cfg.depth,
                modes: cfg.modes,
                seed: cfg.seed,
                columns: columns.iter().map(|c| c.to_string()).collect(),
            },
            rows: Vec::new(),
            fit: Vec::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            pass: true,
        }
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let i = self.meta.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i]).collect()
    }

    pub fn add_fit(&mut self, name: &str, x: &str, y: &str, target: Target, check_residual: bool) {
        let (xs, ys) = (self.column(x), self.column(y));
        self.fit.push(SlopeFit::log_log(name, &xs, &ys, target, check_residual));
    }

    pub fn fit_named(&self, name: &str) -> Option<&SlopeFit> {
        self.fit.iter().find(|f| f.name == name)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn finish(mut self) -> Self {
        self.pass = self.fit.iter().all(|f| f.pass) && self.checks.iter().all(|c| c.pass);
        self
    }

    /// 0 on success, 2 when an exact property failed, 3 for tolerance failures.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.exact && !c.pass) {
            2
        } else if !self.pass {
            3
        } else {
            0
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.meta.columns)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(|v| format!("{v:.12e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    /// One line per fit and check, for terminals.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} (N={}, depth={}, K={}, seed={}): {}\n",
            self.meta.experiment,
            self.meta.grid_n,
            self.meta.depth,
            self.meta.modes,
            self.meta.seed,
            if self.pass { "PASS" } else { "FAIL" }
        );
        for f in &self.fit {
            out += &format!(
                "  fit {:<40} slope {:>8.4} (target {}), residual {:.4}, n={} {}\n",
                f.name,
                f.slope,
                f.target.describe(),
                f.residual,
                f.points,
                if f.pass { "ok" } else { "FAIL" }
            );
        }
        for c in &self.checks {
            out += &format!(
                "  {} {:<40} {} {}\n",
                if c.exact { "exact" } else { "check" },
                c.name,
                if c.pass { "ok" } else { "FAIL" },
                c.detail
            );
        }
        for w in &self.warnings {
            out += &format!("  warning: {w}\n");
        }
        out
    }
}

/// Evaluate `f` over the sweep in parallel, keeping the input order.
pub(crate) fn sweep<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(points: &[T], f: F) -> Vec<R> {
    points.par_iter().map(f).collect()
}
