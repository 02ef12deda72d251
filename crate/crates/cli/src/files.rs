//! Instance, pattern and trace files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use apf_grid::config::{Chirality, Configuration};
use apf_grid::controller::TargetPattern;
use apf_grid::geometry::GridPoint;
use apf_grid::sim::{EventKind, TraceRecord};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub robots: Vec<GridPoint>,
    /// Empty means every robot has positive chirality.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chirality: Vec<Chirality>,
}

impl InstanceFile {
    pub fn configuration(&self) -> Result<Configuration, CliError> {
        Configuration::from_positions(&self.robots, &self.chirality)
            .map_err(|e| CliError::Malformed(format!("instance: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub targets: Vec<GridPoint>,
}

impl PatternFile {
    pub fn pattern(&self) -> Result<TargetPattern, CliError> {
        TargetPattern::order_targets(&self.targets).map_err(|e| CliError::Malformed(format!("pattern: {e}")))
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut out = BufWriter::new(fs::File::create(path).map_err(io)?);
    for rec in trace {
        serde_json::to_writer(&mut out, rec).expect("plain data serializes");
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a JSONL trace and checks that it is a complete prefix of a run:
/// consecutive sequence numbers from 0, every robot's records chaining
/// position and light, Looks and Moves alternating per robot, and a final
/// newline.
pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    parse_trace(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>, String> {
    if !text.is_empty() && !text.ends_with('\n') {
        return Err("trace ends in the middle of a record".into());
    }
    let mut trace: Vec<TraceRecord> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let rec: TraceRecord = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", line_no + 1))?;
        if rec.seq != trace.len() as u64 {
            return Err(format!("line {}: expected seq {}, found {}", line_no + 1, trace.len(), rec.seq));
        }
        if let Some(prev) = trace.iter().rev().find(|r| r.robot == rec.robot) {
            let chained = prev.pos_after == rec.pos_before && prev.light_after == rec.light_before;
            if !chained || prev.kind == rec.kind && rec.kind == EventKind::Move {
                return Err(format!("line {}: robot {} does not continue its previous record", line_no + 1, rec.robot.0));
            }
        } else if rec.kind == EventKind::Move {
            return Err(format!("line {}: robot {} moves before looking", line_no + 1, rec.robot.0));
        }
        if rec.kind == EventKind::Look && (rec.pos_before != rec.pos_after || rec.light_before != rec.light_after) {
            return Err(format!("line {}: a look changed the robot", line_no + 1));
        }
        trace.push(rec);
    }
    Ok(trace)
}
