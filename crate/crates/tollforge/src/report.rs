//! Solve reports (JSON, schema version 1), per-run trace CSV and sweep CSV.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tollforge_core::baselines::{red_metric, Rule};
use tollforge_core::pbcd::InnerRecord;

use crate::error::{Error, Result};
use crate::tolls::TollRow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Equilibrium under a given (possibly empty) toll table.
    Ue,
    Pbcd,
    H1,
    H2,
    H3,
    H4,
    /// Brute-force enumeration of every `kappa`-set.
    Oracle,
}

impl From<Rule> for Method {
    fn from(r: Rule) -> Self {
        match r {
            Rule::H1 => Method::H1,
            Rule::H2 => Method::H2,
            Rule::H3 => Method::H3,
            Rule::H4 => Method::H4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema_version: u32,
    pub instance: String,
    /// Cardinality budget; absent for plain equilibrium runs.
    pub kappa: Option<usize>,
    pub method: Method,
    /// Nonzero tolls, largest first.
    pub tolls: Vec<TollRow>,
    /// `F` at the equilibrium under `tolls`.
    pub objective: f64,
    pub f_ue: f64,
    pub f_so: f64,
    pub red: f64,
    /// PBCD: penalty levels. Baselines: toll sets searched.
    pub outer_iterations: usize,
    /// PBCD: BCD rounds. Baselines: equilibrium evaluations. UE: solver iterations.
    pub inner_iterations: usize,
    /// Zero in deterministic mode.
    pub wall_time_s: f64,
    pub converged: bool,
    /// Relative gap of the final equilibrium solve, where one was run.
    pub relative_gap: Option<f64>,
    pub trace_path: Option<String>,
}

impl SolveReport {
    /// Builds a report; R.E.D. is derived from the three `F` values.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        instance: &str,
        kappa: Option<usize>,
        method: Method,
        tolls: Vec<TollRow>,
        objective: f64,
        f_ue: f64,
        f_so: f64,
    ) -> Result<Self> {
        Ok(SolveReport {
            schema_version: SCHEMA_VERSION,
            instance: instance.to_string(),
            kappa,
            method,
            tolls,
            objective,
            f_ue,
            f_so,
            red: red_metric(objective, f_ue, f_so)?,
            outer_iterations: 0,
            inner_iterations: 0,
            wall_time_s: 0.0,
            converged: true,
            relative_gap: None,
            trace_path: None,
        })
    }

    /// R.E.D. recomputed from the stored `F` fields.
    pub fn recomputed_red(&self) -> Result<f64> {
        Ok(red_metric(self.objective, self.f_ue, self.f_so)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: SolveReport = serde_json::from_str(text)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "report schema version {} is not {SCHEMA_VERSION}",
                r.schema_version
            )));
        }
        Ok(r)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Human-readable summary with the toll table.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "instance {}  method {:?}{}\nF = {:.6}  F_ue = {:.6}  F_so = {:.6}  R.E.D. = {:.2}%\n",
            self.instance,
            self.method,
            self.kappa.map(|k| format!("  kappa {k}")).unwrap_or_default(),
            self.objective,
            self.f_ue,
            self.f_so,
            100.0 * self.red,
        );
        s += &format!(
            "iterations {}/{}  converged {}\n",
            self.outer_iterations, self.inner_iterations, self.converged
        );
        if !self.tolls.is_empty() {
            s += "link      toll\n";
            for r in &self.tolls {
                s += &format!("{:<8} {:>8.4}\n", format!("{}-{}", r.tail, r.head), r.toll);
            }
        }
        s
    }
}

/// Writes the BCD trace as CSV.
pub fn write_trace<W: Write>(trace: &[InnerRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in trace {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

pub fn write_trace_file(trace: &[InnerRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(trace, file)
}

/// One κ of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kappa: usize,
    pub red: Option<f64>,
    pub objective: Option<f64>,
    pub cpu_time_s: f64,
    pub converged: Option<bool>,
    pub outer_iterations: Option<usize>,
    pub inner_iterations: Option<usize>,
    pub tolled_links: Option<usize>,
    pub error: Option<String>,
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<sweep>", e))?;
    Ok(())
}

pub fn read_sweep<R: std::io::Read>(reader: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Link flows as CSV `tail,head,flow,time`.
pub fn write_flows<W: Write>(
    net: &crate::tntp::RawNetwork,
    core: &tollforge_core::Network,
    flows: &[f64],
    writer: W,
) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        tail: usize,
        head: usize,
        flow: f64,
        time: f64,
    }
    let mut w = csv::Writer::from_writer(writer);
    for (a, l) in net.links.iter().enumerate() {
        w.serialize(Row {
            tail: l.tail,
            head: l.head,
            flow: flows[a],
            time: core.bpr_time(a, flows[a].max(0.0))?,
        })?;
    }
    w.flush().map_err(|e| Error::io("<flows>", e))?;
    Ok(())
}
