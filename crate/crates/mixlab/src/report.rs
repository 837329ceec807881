//! Experiment reports: named pass/fail checks, long-format CSV rows, and fit
//! records, written deterministically (only the timestamp header line varies
//! between reruns).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::fit::LineFit;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub series: String,
    pub parameter: f64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct FitRecord {
    pub name: String,
    pub constant: f64,
    pub residual: f64,
    pub r2: f64,
}

impl FitRecord {
    pub fn from_fit(name: &str, fit: &LineFit, constant: f64) -> Self {
        FitRecord { name: name.to_string(), constant, residual: fit.residual, r2: fit.r2 }
    }

    /// Fits below the quality floor are flagged, not silently accepted.
    pub fn flagged(&self) -> bool {
        self.r2 < 0.9
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub experiment: String,
    pub digest: String,
    pub checks: Vec<Check>,
    pub rows: Vec<Row>,
    pub fits: Vec<FitRecord>,
    /// Named field checkpoints, written as fields/<name>.mixf.
    pub fields: Vec<(String, mixcore::ScalarField)>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, digest: &str) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            digest: digest.to_string(),
            checks: Vec::new(),
            rows: Vec::new(),
            fits: Vec::new(),
            fields: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }

    pub fn row(&mut self, series: &str, parameter: f64, value: f64) {
        self.rows.push(Row { series: series.to_string(), parameter, value });
    }

    pub fn fit(&mut self, record: FitRecord) {
        self.fits.push(record);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Long-format report CSV (deterministic apart from the timestamp line).
    pub fn report_csv(&self, timestamp: bool) -> String {
        let mut out = String::new();
        if timestamp {
            let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
            let _ = writeln!(out, "# generated_unix_time={}", t.as_secs());
        }
        let _ = writeln!(out, "# experiment={} config_digest={}", self.experiment, self.digest);
        let _ = writeln!(out, "experiment,parameter,value");
        for r in &self.rows {
            let _ = writeln!(out, "{}:{},{},{}", self.experiment, r.series, r.parameter, r.value);
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{}:check_{},{},{}",
                self.experiment,
                c.name,
                if c.passed { 1 } else { 0 },
                c.detail.replace(',', ";")
            );
        }
        out
    }

    pub fn fit_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name,fitted_constant,residual,r2,flagged,config_digest");
        for f in &self.fits {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                f.name,
                f.constant,
                f.residual,
                f.r2,
                if f.flagged() { 1 } else { 0 },
                self.digest
            );
        }
        out
    }

    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.csv"), self.report_csv(true))?;
        fs::write(dir.join("fit.csv"), self.fit_csv())?;
        if !self.fields.is_empty() {
            let fdir = dir.join("fields");
            fs::create_dir_all(&fdir)?;
            for (name, field) in &self.fields {
                crate::mixf::write_field(&fdir.join(format!("{name}.mixf")), field)?;
            }
        }
        Ok(())
    }

    /// Human summary, one line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}: {} ({})",
                if c.passed { "PASS" } else { "FAIL" },
                self.experiment,
                c.name,
                c.detail
            );
        }
        out
    }
}

/// Output directory helper; `None` means do not write files.
#[derive(Debug, Clone)]
pub struct OutDir(pub Option<PathBuf>);

impl OutDir {
    pub fn path(&self) -> Option<&Path> {
        self.0.as_deref()
    }
}

/// Kernel symbol export: (|ξ|, value) rows along the grid's radial set.
pub fn symbol_csv(kernel: &mixcore::KernelSpec, grid: &mixcore::TorusGrid) -> String {
    let mut rows: Vec<(f64, f64)> = Vec::new();
    grid.for_each_mode(|_, _, xi| {
        let s = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        rows.push((s, kernel.symbol(xi)));
    });
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    let mut out = String::from("xi_abs,value\n");
    for (s, v) in rows {
        let _ = writeln!(out, "{s},{v}");
    }
    out
}

/// CzReport export: one CSV row per kernel.
pub fn cz_csv(reports: &[(String, mixcore::CzReport)]) -> String {
    let mut out = String::from("kernel,sup_xd_k,sup_xd1_grad_k,sup_symbol,scalar\n");
    for (name, r) in reports {
        let _ = writeln!(
            out,
            "{name},{},{},{},{}",
            r.sup_xd_k,
            r.sup_xd1_grad_k,
            r.sup_symbol,
            r.scalar()
        );
    }
    out
}

/// Trajectory export: time, tracked norms, dual norm, accumulator.
pub fn trajectory_csv(
    traj: &mixcore::Trajectory,
    dual_norms: &[f64],
) -> String {
    let mut out = String::from("time");
    for p in &traj.tracked_exponents {
        let _ = write!(out, ",l{p}_norm");
    }
    out.push_str(",dual_norm,accumulator\n");
    // dual norms are computed at snapshot times
    let mut snap = 0usize;
    for (k, t) in traj.step_times.iter().enumerate() {
        let _ = write!(out, "{t}");
        for series in &traj.tracked_norms {
            let _ = write!(out, ",{}", series[k]);
        }
        let dual = if snap < traj.times.len() && (traj.times[snap] - t).abs() <= 1e-12 {
            let v = dual_norms.get(snap).copied().unwrap_or(f64::NAN);
            snap += 1;
            v
        } else {
            f64::NAN
        };
        let _ = writeln!(out, ",{dual},{}", traj.accumulator[k]);
    }
    out
}
