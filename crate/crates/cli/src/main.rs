//! `fifo-lab`: simulate paging policies, build anomaly strings, search small
//! spaces and replay the published FIFO anomaly numbers.

mod error;
mod report;
mod trace;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fifo_anomaly::construct::{anomaly_prefix, construct_for_ratio, unbounded_family};
use fifo_anomaly::search::{anomaly_feasible, exhaustive_search, randomized_search, SearchSpace};
use fifo_anomaly::verify::{verify_published, FifoModel};
use fifo_anomaly::{
    anomaly_ratio, cyclic_rate_estimate, paging_rate, Fraction, Policy, ReferenceString, Simulator,
};
use serde::Serialize;

use crate::error::CliError;
use crate::report::*;

#[derive(Parser)]
#[command(
    name = "fifo-lab",
    version,
    about = "Paging-policy laboratory for FIFO's Belady anomaly"
)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Fifo,
    Lru,
    Min,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Fifo => Policy::Fifo,
            PolicyArg::Lru => Policy::Lru,
            PolicyArg::Min => Policy::Min,
        }
    }
}

#[derive(Args)]
struct Input {
    /// Trace file: whitespace-separated page ids, `#` comments.
    #[arg(long, conflicts_with = "refs")]
    trace: Option<PathBuf>,
    /// Inline reference string, e.g. "1,2,3,4,1,2,5".
    #[arg(long)]
    refs: Option<String>,
}

impl Input {
    fn load(&self) -> Result<ReferenceString, CliError> {
        match (&self.trace, &self.refs) {
            (Some(path), _) => trace::read(path),
            (None, Some(inline)) => Ok(trace::parse_list(inline)?.into()),
            (None, None) => Err(CliError::Usage(
                "give a reference string with --trace PATH or --refs LIST".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one policy over a reference string.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "fifo")]
        policy: PolicyArg,
        #[arg(long)]
        frames: usize,
        /// Warm-start control state, oldest first: "7,3,6,2,5".
        #[arg(long)]
        warm: Option<String>,
        /// Print the control state after every reference.
        #[arg(long)]
        states: bool,
    },
    /// Exact fault ratio between two memory sizes.
    Ratio {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "fifo")]
        policy: PolicyArg,
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        frames_large: usize,
    },
    /// Build and simulate U V^k for odd n >= 5.
    Family {
        n: u32,
        k: usize,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Build a string whose FIFO anomaly ratio exceeds L (e.g. 10 or 5/2).
    RatioTarget {
        target: String,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Prefix driving the small memory into a given FIFO control state.
    ConstructPrefix {
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        frames_large: usize,
        /// Required small-memory control state, oldest first.
        #[arg(long)]
        target: String,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Search for the largest FIFO ratio: exhaustive, or genetic with --seed/--budget.
    Search {
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        frames_large: usize,
        /// Alphabet size; defaults to frames-large + 1.
        #[arg(long)]
        pages: Option<u32>,
        #[arg(long)]
        max_len: usize,
        /// Enumerate every string instead of one per page relabelling.
        #[arg(long)]
        no_canonical: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Paging rate of a finite string, or the finite-cycle estimate for (1..n)^c.
    Rate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "fifo")]
        policy: PolicyArg,
        #[arg(long)]
        frames: usize,
        /// Use the cyclic string (1, ..., n) instead of an input string.
        #[arg(long, conflicts_with_all = ["trace", "refs"])]
        cycle: Option<u32>,
        #[arg(long, default_value_t = 100)]
        cycles: usize,
    },
    /// Replay every published count, state and ratio.
    VerifyPaper {
        /// Replay against a deliberately broken FIFO.
        #[arg(long, hide = true, value_name = "MUTATION")]
        mutate: Option<Mutation>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutation {
    FifoVictim,
}

fn emit<T: Serialize + std::fmt::Display>(json: bool, report: &T) {
    let text = if json {
        let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        report.to_string()
    };
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn parse_fraction(text: &str) -> Result<Fraction, CliError> {
    let bad = || CliError::Parse(format!("`{text}` is not a ratio (expected N or P/Q)"));
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.trim(), "1"),
    };
    let p: u64 = p.parse().map_err(|_| bad())?;
    let q: u64 = q.parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok(Fraction::new(p, q))
}

fn report_path(trace: &Path) -> PathBuf {
    let mut name = trace.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

/// Writes the trace and a JSON report next to it.
fn write_outputs<T: Serialize>(
    trace_out: &Path,
    refs: &ReferenceString,
    header: &[String],
    report: &T,
) -> Result<(), CliError> {
    trace::write(trace_out, refs, &trace_header(header, refs))?;
    let path = report_path(trace_out);
    let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
    json.push('\n');
    std::fs::write(&path, json).map_err(|e| CliError::io(&path, e))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let json = cli.json;
    match cli.command {
        Command::Simulate {
            input,
            policy,
            frames,
            warm,
            states,
        } => {
            let refs = input.load()?;
            let warm = warm.as_deref().map(trace::parse_list).transpose()?;
            let mut sim = Simulator::new(policy.into(), frames)?.record_trace(states);
            if let Some(state) = &warm {
                sim = sim.warm_start(state)?;
            }
            let res = sim.run(&refs);
            emit(
                json,
                &SimulateReport {
                    command: "simulate",
                    policy: Policy::from(policy).to_string(),
                    frames,
                    warm_start: warm.as_deref().map(ids).unwrap_or_default(),
                    length: refs.len(),
                    faults: res.fault_count(),
                    fault_positions: res.fault_positions.clone(),
                    faulted_pages: ids(&res.faulted_pages),
                    final_state: ids(&res.final_state),
                    states: res
                        .state_trace
                        .as_ref()
                        .map(|t| t.iter().map(|q| ids(q)).collect()),
                },
            );
        }
        Command::Ratio {
            input,
            policy,
            frames,
            frames_large,
        } => {
            let refs = input.load()?;
            let r = anomaly_ratio(&refs, frames, frames_large, policy.into())?;
            emit(
                json,
                &RatioSummary::new("ratio", Policy::from(policy).to_string(), refs.len(), &r),
            );
        }
        Command::Family { n, k, trace_out } => {
            let f = unbounded_family(n, k)?;
            let summary = FamilySummary {
                command: "family",
                pages: n,
                repeats: k,
                frames: f.spec.small,
                frames_large: f.spec.large,
                target_state: ids(&f.spec.target_state),
                prefix_length: f.prefix.len(),
                block_length: f.block.len(),
                length: f.full_string.len(),
                prefix_small_faults: f.prefix_small_faults,
                prefix_large_faults: f.prefix_large_faults,
                blocks: f
                    .passes
                    .iter()
                    .map(|p| BlockSummary {
                        small_faults: p.small_faults,
                        large_faults: p.large_faults,
                    })
                    .collect(),
                small_faults: f.small_faults,
                large_faults: f.large_faults,
                ratio: f.ratio.into(),
                limit_ratio: f.limit_ratio.into(),
                trace_file: trace_out.as_ref().map(|p| p.display().to_string()),
            };
            if let Some(path) = &trace_out {
                let header = [format!("FIFO anomaly family n = {n}, k = {k}")];
                write_outputs(path, &f.full_string, &header, &summary)?;
            }
            emit(json, &summary);
        }
        Command::RatioTarget { target, trace_out } => {
            let target = parse_fraction(&target)?;
            let c = construct_for_ratio(target)?;
            let summary = TargetSummary {
                command: "ratio-target",
                target: target.into(),
                pages: c.n,
                frames: c.small,
                frames_large: c.large,
                repeats: c.repeats,
                length: c.refs.len(),
                small_faults: c.small_faults,
                large_faults: c.large_faults,
                ratio: c.ratio.into(),
                exceeds_target: c.ratio > target,
                trace_file: trace_out.as_ref().map(|p| p.display().to_string()),
            };
            if let Some(path) = &trace_out {
                let header = [format!(
                    "FIFO anomaly ratio above {target}: n = {}, k = {}",
                    c.n, c.repeats
                )];
                write_outputs(path, &c.refs, &header, &summary)?;
            }
            emit(json, &summary);
        }
        Command::ConstructPrefix {
            frames,
            frames_large,
            target,
            trace_out,
        } => {
            let target = trace::parse_list(&target)?;
            let u = anomaly_prefix(frames, frames_large, &target)?;
            let s = Simulator::new(Policy::Fifo, frames)?.run(&u);
            let l = Simulator::new(Policy::Fifo, frames_large)?.run(&u);
            let summary = PrefixSummary {
                command: "construct-prefix",
                frames,
                frames_large,
                target_state: ids(&target),
                prefix: u.ids(),
                small_faults: s.fault_count(),
                small_final_state: ids(&s.final_state),
                large_faults: l.fault_count(),
                large_final_state: ids(&l.final_state),
                trace_file: trace_out.as_ref().map(|p| p.display().to_string()),
            };
            if let Some(path) = &trace_out {
                let header = [format!("FIFO prefix for frames {frames} / {frames_large}")];
                write_outputs(path, &u, &header, &summary)?;
            }
            emit(json, &summary);
        }
        Command::Search {
            frames,
            frames_large,
            pages,
            max_len,
            no_canonical,
            seed,
            budget,
        } => {
            let pages = pages.unwrap_or(frames_large as u32 + 1);
            let space =
                SearchSpace::new(frames, frames_large, pages, max_len).canonical(!no_canonical);
            let (mode, result) = match (seed, budget) {
                (None, None) => ("exhaustive", exhaustive_search(&space)?),
                (seed, budget) => (
                    "genetic",
                    randomized_search(&space, seed.unwrap_or(0), budget.unwrap_or(10_000))?,
                ),
            };
            emit(
                json,
                &SearchSummary {
                    command: "search",
                    mode,
                    frames,
                    frames_large,
                    pages,
                    max_len,
                    anomaly_feasible: anomaly_feasible(frames, frames_large)?,
                    best_ratio: result.best_ratio.into(),
                    small_faults: result.small_faults,
                    large_faults: result.large_faults,
                    witness: result.witness.ids(),
                    strings_examined: result.strings_examined,
                    exhausted: result.exhausted,
                },
            );
        }
        Command::Rate {
            input,
            policy,
            frames,
            cycle,
            cycles,
        } => {
            let policy = Policy::from(policy);
            let summary = match cycle {
                Some(n) => RateSummary {
                    command: "rate",
                    policy: policy.to_string(),
                    frames,
                    length: n as usize * cycles,
                    cycle_pages: Some(n),
                    cycles: Some(cycles),
                    rate: cyclic_rate_estimate(policy, n, frames, cycles)?.into(),
                },
                None => {
                    let refs = input.load()?;
                    RateSummary {
                        command: "rate",
                        policy: policy.to_string(),
                        frames,
                        length: refs.len(),
                        cycle_pages: None,
                        cycles: None,
                        rate: paging_rate(policy, &refs, frames)?.into(),
                    }
                }
            };
            emit(json, &summary);
        }
        Command::VerifyPaper { mutate } => {
            let model = match mutate {
                Some(Mutation::FifoVictim) => FifoModel::EvictNewest,
                None => FifoModel::Reference,
            };
            let report = verify_published(model);
            emit(json, &VerifySummary::from(&report));
            if !report.all_passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
