//! Input loaders and report rendering shared by the command-line front end.

use std::fmt::Write as _;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::numeric::Tolerance;
use crate::tensor::DerivTensor;
use crate::topology::GridRegion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Format {
    Json,
    Text,
}

/// Everything needed to rerun a report: tool version, command, inputs,
/// blocks, seed and tolerances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub blocks: Option<String>,
    pub seed: u64,
    pub tolerance: Tolerance,
}

impl ReportHeader {
    pub fn new(command: &str, inputs: Vec<String>, blocks: Option<String>, seed: u64, tolerance: Tolerance) -> Self {
        ReportHeader {
            tool: "mechindep".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            inputs,
            blocks,
            seed,
            tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub header: ReportHeader,
    pub certificates: Vec<Certificate>,
    /// Command-specific payload such as a decomposition or a sparsity gap.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<serde_json::Value>,
}

impl Report {
    /// Exit status `0` when every certificate holds, `1` otherwise.
    pub fn all_hold(&self) -> bool {
        self.certificates.iter().all(|c| c.holds)
    }
}

/// Renders a report. JSON is pretty-printed with a trailing newline; text
/// lists the header, then one block per certificate: criterion, verdict,
/// witness, notes.
pub fn emit_report(report: &Report, format: Format) -> Result<String> {
    if report.certificates.is_empty() {
        return Err(Error::InvalidInput("a report needs at least one certificate".into()));
    }
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report).expect("report values serialize") + "\n"),
        Format::Text => {
            let h = &report.header;
            let mut out = String::new();
            let _ = writeln!(out, "# {} {} {}", h.tool, h.version, h.command);
            let _ = writeln!(out, "# inputs: {}", h.inputs.join(" "));
            if let Some(b) = &h.blocks {
                let _ = writeln!(out, "# blocks: {b}");
            }
            let _ = writeln!(out, "# seed: {}", h.seed);
            let _ = writeln!(out, "# tolerance: rel={:e} abs={:e}", h.tolerance.rel, h.tolerance.abs);
            for c in &report.certificates {
                let verdict = if c.holds { "holds" } else { "fails" };
                let _ = writeln!(out, "{:<16} {verdict}", c.criterion.name());
                if !c.witness.is_none() {
                    let _ = writeln!(out, "  witness: {}", compact(&c.witness));
                }
                for n in &c.notes {
                    let _ = writeln!(out, "  note: {n}");
                }
            }
            if let Some(r) = &report.result {
                let _ = writeln!(out, "result: {}", compact(r));
            }
            Ok(out)
        }
    }
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report values serialize")
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses a derivative tensor `{"dims": [...], "entries": [...]}` with
/// row-major entries.
pub fn parse_tensor_json(text: &str) -> Result<DerivTensor> {
    parse_json(text)
}

/// Parses a region `{"dims": [...], "occupied": [[...], ...]}` with
/// zero-based cell coordinates.
pub fn parse_region_json(text: &str) -> Result<GridRegion> {
    parse_json(text)
}
