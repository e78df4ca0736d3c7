//! Machine-readable reports. Ratios are always an exact integer pair; the
//! decimal field is advisory.

use std::fmt;

use fifo_anomaly::verify::VerifyReport;
use fifo_anomaly::{Fraction, Page, RatioReport, ReferenceString};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactRatio {
    pub numerator: u64,
    pub denominator: u64,
    /// Advisory rendering only.
    pub approx_advisory: f64,
}

impl From<Fraction> for ExactRatio {
    fn from(r: Fraction) -> Self {
        Self {
            numerator: *r.numer(),
            denominator: *r.denom(),
            approx_advisory: *r.numer() as f64 / *r.denom() as f64,
        }
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

pub fn ids(pages: &[Page]) -> Vec<u32> {
    pages.iter().map(|p| p.id()).collect()
}

fn tuple(ids: &[u32]) -> String {
    let parts: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    format!("({})", parts.join(", "))
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub command: &'static str,
    pub policy: String,
    pub frames: usize,
    pub warm_start: Vec<u32>,
    pub length: usize,
    pub faults: usize,
    pub fault_positions: Vec<usize>,
    pub faulted_pages: Vec<u32>,
    pub final_state: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<Vec<u32>>>,
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "policy {} with {} frames, {} references",
            self.policy, self.frames, self.length
        )?;
        if !self.warm_start.is_empty() {
            writeln!(f, "warm start: {}", tuple(&self.warm_start))?;
        }
        writeln!(f, "faults: {}", self.faults)?;
        writeln!(f, "final state: {}", tuple(&self.final_state))?;
        if let Some(states) = &self.states {
            for (t, q) in states.iter().enumerate() {
                writeln!(f, "q_{t} = {}", tuple(q))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct RatioSummary {
    pub command: &'static str,
    pub policy: String,
    pub frames: usize,
    pub frames_large: usize,
    pub length: usize,
    pub small_faults: u64,
    pub large_faults: u64,
    pub ratio: ExactRatio,
    pub anomaly: bool,
}

impl RatioSummary {
    pub fn new(command: &'static str, policy: String, length: usize, r: &RatioReport) -> Self {
        Self {
            command,
            policy,
            frames: r.small_capacity,
            frames_large: r.large_capacity,
            length,
            small_faults: r.small_faults,
            large_faults: r.large_faults,
            ratio: r.ratio.into(),
            anomaly: r.is_anomaly(),
        }
    }
}

impl fmt::Display for RatioSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} faults at {} frames, {} faults at {} frames ({} references)",
            self.small_faults, self.frames, self.large_faults, self.frames_large, self.length
        )?;
        if self.anomaly {
            writeln!(f, "{} ANOMALY", self.ratio)
        } else {
            writeln!(f, "{}", self.ratio)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BlockSummary {
    pub small_faults: u64,
    pub large_faults: u64,
}

#[derive(Debug, Serialize)]
pub struct FamilySummary {
    pub command: &'static str,
    pub pages: u32,
    pub repeats: usize,
    pub frames: usize,
    pub frames_large: usize,
    pub target_state: Vec<u32>,
    pub prefix_length: usize,
    pub block_length: usize,
    pub length: usize,
    pub prefix_small_faults: u64,
    pub prefix_large_faults: u64,
    pub blocks: Vec<BlockSummary>,
    pub small_faults: u64,
    pub large_faults: u64,
    pub ratio: ExactRatio,
    pub limit_ratio: ExactRatio,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
}

impl fmt::Display for FamilySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n = {}, k = {}, frames {} / {}",
            self.pages, self.repeats, self.frames, self.frames_large
        )?;
        writeln!(f, "target state: {}", tuple(&self.target_state))?;
        writeln!(
            f,
            "prefix: {} references, {} / {} faults",
            self.prefix_length, self.prefix_small_faults, self.prefix_large_faults
        )?;
        if let Some(first) = self.blocks.first() {
            let steady = self.blocks.last().expect("nonempty");
            writeln!(
                f,
                "block: {} references, first pass {} / {} faults, last pass {} / {} faults",
                self.block_length,
                first.small_faults,
                first.large_faults,
                steady.small_faults,
                steady.large_faults
            )?;
        }
        writeln!(
            f,
            "total: {} references, {} / {} faults",
            self.length, self.small_faults, self.large_faults
        )?;
        writeln!(f, "ratio {} (limit {})", self.ratio, self.limit_ratio)?;
        if let Some(path) = &self.trace_file {
            writeln!(f, "trace written to {path}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct TargetSummary {
    pub command: &'static str,
    pub target: ExactRatio,
    pub pages: u32,
    pub frames: usize,
    pub frames_large: usize,
    pub repeats: usize,
    pub length: usize,
    pub small_faults: u64,
    pub large_faults: u64,
    pub ratio: ExactRatio,
    pub exceeds_target: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
}

impl fmt::Display for TargetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "target {}: n = {}, frames {} / {}, k = {}",
            self.target, self.pages, self.frames, self.frames_large, self.repeats
        )?;
        writeln!(
            f,
            "{} references, {} / {} faults",
            self.length, self.small_faults, self.large_faults
        )?;
        writeln!(
            f,
            "ratio {} {}",
            self.ratio,
            if self.exceeds_target {
                "> target"
            } else {
                "<= target"
            }
        )?;
        if let Some(path) = &self.trace_file {
            writeln!(f, "trace written to {path}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct PrefixSummary {
    pub command: &'static str,
    pub frames: usize,
    pub frames_large: usize,
    pub target_state: Vec<u32>,
    pub prefix: Vec<u32>,
    pub small_faults: usize,
    pub small_final_state: Vec<u32>,
    pub large_faults: usize,
    pub large_final_state: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
}

impl fmt::Display for PrefixSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "prefix ({} references): {}",
            self.prefix.len(),
            tuple(&self.prefix)
        )?;
        writeln!(
            f,
            "{} frames: {} faults, final state {}",
            self.frames,
            self.small_faults,
            tuple(&self.small_final_state)
        )?;
        writeln!(
            f,
            "{} frames: {} faults, final state {}",
            self.frames_large,
            self.large_faults,
            tuple(&self.large_final_state)
        )?;
        if let Some(path) = &self.trace_file {
            writeln!(f, "trace written to {path}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct SearchSummary {
    pub command: &'static str,
    pub mode: &'static str,
    pub frames: usize,
    pub frames_large: usize,
    pub pages: u32,
    pub max_len: usize,
    pub anomaly_feasible: bool,
    pub best_ratio: ExactRatio,
    pub small_faults: u64,
    pub large_faults: u64,
    pub witness: Vec<u32>,
    pub strings_examined: u64,
    pub exhausted: bool,
}

impl fmt::Display for SearchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} search, frames {} / {}, {} pages, length <= {}",
            self.mode, self.frames, self.frames_large, self.pages, self.max_len
        )?;
        writeln!(
            f,
            "anomaly feasible for these sizes: {}",
            if self.anomaly_feasible { "yes" } else { "no" }
        )?;
        writeln!(
            f,
            "examined {} strings{}",
            self.strings_examined,
            if self.exhausted { " (exhaustive)" } else { "" }
        )?;
        writeln!(
            f,
            "best ratio {} ({} / {} faults)",
            self.best_ratio, self.large_faults, self.small_faults
        )?;
        writeln!(f, "witness: {}", tuple(&self.witness))
    }
}

#[derive(Debug, Serialize)]
pub struct RateSummary {
    pub command: &'static str,
    pub policy: String,
    pub frames: usize,
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_pages: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    pub rate: ExactRatio,
}

impl fmt::Display for RateSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(n), Some(c)) = (self.cycle_pages, self.cycles) {
            writeln!(
                f,
                "policy {} with {} frames on (1..{n})^{c}",
                self.policy, self.frames
            )?;
        } else {
            writeln!(
                f,
                "policy {} with {} frames on {} references",
                self.policy, self.frames, self.length
            )?;
        }
        writeln!(
            f,
            "paging rate {} (~{:.6})",
            self.rate, self.rate.approx_advisory
        )
    }
}

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub command: &'static str,
    pub passed: bool,
    pub disproof_ratio: (u64, u64),
    pub checks: Vec<CheckLine>,
}

impl From<&VerifyReport> for VerifySummary {
    fn from(r: &VerifyReport) -> Self {
        Self {
            command: "verify-paper",
            passed: r.all_passed(),
            disproof_ratio: r.disproof_ratio,
            checks: r
                .checks
                .iter()
                .map(|c| CheckLine {
                    name: c.name.clone(),
                    passed: c.passed,
                    expected: c.expected.clone(),
                    actual: c.actual.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            if c.passed {
                writeln!(f, "PASS  {}", c.name)?;
            } else {
                writeln!(f, "FAIL  {}", c.name)?;
                writeln!(f, "      expected {}", c.expected)?;
                writeln!(f, "      got      {}", c.actual)?;
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        writeln!(
            f,
            "disproof ratio {}/{}",
            self.disproof_ratio.0, self.disproof_ratio.1
        )?;
        if failed == 0 {
            writeln!(f, "all {} checks passed", self.checks.len())
        } else {
            writeln!(f, "{failed} of {} checks FAILED", self.checks.len())
        }
    }
}

pub fn trace_header(lines: &[String], refs: &ReferenceString) -> Vec<String> {
    let mut header = lines.to_vec();
    header.push(format!("{} references", refs.len()));
    header
}
