//! Replays the published numbers: the classical 10/9 example, the 161/78
//! disproof string, the residue-system properties, the cyclic block counts
//! and the ratio-2 instance of the unbounded construction.
//!
//! Every simulation goes through a [`FifoModel`], so a broken FIFO
//! implementation can be plugged in to confirm the replay catches it.

use std::collections::VecDeque;
use std::fmt;

use crate::construct::{
    anomaly_prefix, classical_example, construct_for_ratio, cycle_block, published_disproof_prefix,
    target_state, unbounded_family,
};
use crate::paging::{Fraction, Page, Policy, ReferenceString, SimulationResult, Simulator};
use crate::residue::{build_w, is_complete_residue_system};

/// The FIFO implementation under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FifoModel {
    /// The library's FIFO automaton.
    #[default]
    Reference,
    /// A deliberately wrong FIFO that evicts the newest page.
    EvictNewest,
}

impl FifoModel {
    /// Runs the model with a state trace.
    pub fn run(self, refs: &ReferenceString, capacity: usize, warm: &[Page]) -> SimulationResult {
        match self {
            FifoModel::Reference => Simulator::new(Policy::Fifo, capacity)
                .and_then(|s| s.warm_start(warm))
                .expect("replay inputs are valid")
                .record_trace(true)
                .run(refs),
            FifoModel::EvictNewest => evict_newest(refs, capacity, warm),
        }
    }

    fn faults(self, refs: &ReferenceString, capacity: usize) -> u64 {
        self.run(refs, capacity, &[]).fault_count() as u64
    }
}

fn evict_newest(refs: &ReferenceString, capacity: usize, warm: &[Page]) -> SimulationResult {
    let mut queue: VecDeque<Page> = warm.iter().copied().collect();
    let mut res = SimulationResult {
        fault_positions: Vec::new(),
        faulted_pages: Vec::new(),
        evictions: Vec::new(),
        final_state: Vec::new(),
        state_trace: Some(vec![warm.to_vec()]),
    };
    for (t, &page) in refs.iter().enumerate() {
        if !queue.contains(&page) {
            let evicted = if queue.len() == capacity {
                queue.pop_back()
            } else {
                None
            };
            queue.push_back(page);
            res.fault_positions.push(t);
            res.faulted_pages.push(page);
            res.evictions.push(evicted);
        }
        if let Some(trace) = res.state_trace.as_mut() {
            trace.push(queue.iter().copied().collect());
        }
    }
    res.final_state = queue.into_iter().collect();
    res
}

/// One replayed value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "PASS  {}: {}", self.name, self.actual)
        } else {
            write!(
                f,
                "FAIL  {}: expected {}, got {}",
                self.name, self.expected, self.actual
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// Exact `(numerator, denominator)` of the 161/78 replay.
    pub disproof_ratio: (u64, u64),
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn check<T: PartialEq + fmt::Debug>(
        &mut self,
        name: impl Into<String>,
        expected: T,
        actual: T,
    ) {
        self.checks.push(Check {
            name: name.into(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            passed: expected == actual,
        });
    }

    fn claim(&mut self, name: impl Into<String>, claim: &str, holds: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            expected: claim.to_string(),
            actual: detail,
            passed: holds,
        });
    }
}

fn ids(pages: &[Page]) -> Vec<u32> {
    pages.iter().map(|p| p.id()).collect()
}

fn ids_of(refs: &ReferenceString) -> Vec<u32> {
    refs.ids()
}

fn ratio_pair(r: Fraction) -> (u64, u64) {
    (*r.numer(), *r.denom())
}

/// Replays every published count, state and ratio against `model`.
pub fn verify_published(model: FifoModel) -> VerifyReport {
    let mut report = VerifyReport::default();
    classical(model, &mut report);
    disproof(model, &mut report);
    residues(&mut report);
    cyclic_blocks(model, &mut report);
    ratio_target_instance(model, &mut report);
    report
}

fn classical(model: FifoModel, report: &mut VerifyReport) {
    let (refs, small, large) = classical_example();
    let s = model.run(&refs, small, &[]);
    report.check("classical: faults at 3 frames", 9, s.fault_count());
    report.check(
        "classical: final state at 3 frames",
        vec![5, 3, 4],
        ids(&s.final_state),
    );
    let expected_trace: Vec<Vec<u32>> = vec![
        vec![],
        vec![1],
        vec![1, 2],
        vec![1, 2, 3],
        vec![2, 3, 4],
        vec![3, 4, 1],
        vec![4, 1, 2],
        vec![1, 2, 5],
        vec![1, 2, 5],
        vec![1, 2, 5],
        vec![2, 5, 3],
        vec![5, 3, 4],
        vec![5, 3, 4],
    ];
    let trace: Vec<Vec<u32>> = s
        .state_trace
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|q| ids(q))
        .collect();
    report.check("classical: control states q0..q12", expected_trace, trace);

    let l = model.run(&refs, large, &[]);
    report.check("classical: faults at 4 frames", 10, l.fault_count());
    report.check(
        "classical: final state at 4 frames",
        vec![2, 3, 4, 5],
        ids(&l.final_state),
    );
    let ratio = Fraction::new(l.fault_count() as u64, s.fault_count().max(1) as u64);
    report.check("classical: anomaly ratio", (10, 9), ratio_pair(ratio));
}

fn disproof(model: FifoModel, report: &mut VerifyReport) {
    let target = target_state(7).expect("7 is odd");
    let published = published_disproof_prefix();
    match anomaly_prefix(5, 6, &target) {
        Ok(u) => report.check(
            "disproof: generated prefix equals published core",
            ids_of(&published)[..29].to_vec(),
            ids_of(&u),
        ),
        Err(e) => report.claim(
            "disproof: generated prefix equals published core",
            "a prefix",
            false,
            e.to_string(),
        ),
    }

    let core: ReferenceString = published.pages()[..29].iter().copied().collect();
    for (label, u) in [("29-reference", &core), ("34-reference", &published)] {
        let s = model.run(u, 5, &[]);
        let l = model.run(u, 6, &[]);
        report.check(
            format!("disproof: {label} prefix at 5 frames (faults, state)"),
            (29, vec![7, 3, 6, 2, 5]),
            (s.fault_count(), ids(&s.final_state)),
        );
        report.check(
            format!("disproof: {label} prefix at 6 frames (faults, state)"),
            (14, vec![2, 3, 4, 5, 6, 7]),
            (l.fault_count(), ids(&l.final_state)),
        );
    }

    let v = cycle_block(7).expect("7 is odd");
    let small_warm = target.clone();
    let large_warm: Vec<Page> = (2..=7).map(|id| Page::new(id).expect("positive")).collect();
    let s = model.run(&v, 5, &small_warm);
    let l = model.run(&v, 6, &large_warm);
    report.check(
        "disproof: block at 5 frames (faults, state)",
        (7, ids(&small_warm)),
        (s.fault_count(), ids(&s.final_state)),
    );
    report.check(
        "disproof: block at 6 frames (faults, state)",
        (21, ids(&large_warm)),
        (l.fault_count(), ids(&l.final_state)),
    );

    let mut full = published.clone();
    full.extend_from(&v.repeated(7));
    let (sf, lf) = (model.faults(&full, 5), model.faults(&full, 6));
    report.disproof_ratio = ratio_pair(Fraction::new(lf, sf.max(1)));
    report.check("disproof: U V^7 faults (large, small)", (161, 78), (lf, sf));
    report.check("disproof: U V^7 ratio", (161, 78), report.disproof_ratio);

    // The ratio of U V^k is (14 + 21k)/(29 + 7k), approaching 3 from below.
    let k = 1000u64;
    let mut long = core;
    long.extend_from(&v.repeated(k as usize));
    let (sf, lf) = (model.faults(&long, 5), model.faults(&long, 6));
    report.check(
        "disproof: U V^1000 faults match (14 + 21k, 29 + 7k)",
        (14 + 21 * k, 29 + 7 * k),
        (lf, sf),
    );
    let three = Fraction::from_integer(3);
    let ratio = Fraction::new(lf, sf.max(1));
    report.claim(
        "disproof: U V^1000 ratio below 3 by 73/(29 + 7k)",
        "3 - ratio = 73/7029",
        ratio < three && three - ratio == Fraction::new(73, 29 + 7 * k),
        format!("{lf}/{sf}"),
    );
}

fn residues(report: &mut VerifyReport) {
    for n in [5i64, 7, 9, 11, 13] {
        let w = build_w(n).expect("odd modulus");
        let windows_ok =
            (1..=3 * n as usize + 1).all(|start| w.window_is_crs(4, start).unwrap_or(false));
        report.claim(
            format!("residues: W({n}) and its windows are complete residue systems"),
            "all complete",
            is_complete_residue_system(w.values(), n) && windows_ok,
            format!("{:?}", w.values()),
        );
    }
}

fn cyclic_blocks(model: FifoModel, report: &mut VerifyReport) {
    for n in [5u32, 7, 9, 11, 13] {
        let block = cycle_block(n).expect("odd n");
        let small_warm = target_state(n).expect("odd n");
        let large_warm: Vec<Page> = (2..=n).map(|id| Page::new(id).expect("positive")).collect();
        let s = model.run(&block, n as usize - 2, &small_warm);
        let l = model.run(&block, n as usize - 1, &large_warm);
        report.check(
            format!("cyclic block n={n}: faults (small, large) and states restored"),
            (n as usize, (n * (n - 1) / 2) as usize, true, true),
            (
                s.fault_count(),
                l.fault_count(),
                s.final_state == small_warm,
                l.final_state == large_warm,
            ),
        );
    }
    match unbounded_family(7, 7) {
        Ok(family) => report.check("family n=7 k=7: ratio", (161, 78), ratio_pair(family.ratio)),
        Err(e) => report.claim("family n=7 k=7: ratio", "161/78", false, e.to_string()),
    }
}

fn ratio_target_instance(model: FifoModel, report: &mut VerifyReport) {
    let target = Fraction::from_integer(2);
    match construct_for_ratio(target) {
        Ok(c) => {
            let (sf, lf) = (
                model.faults(&c.refs, c.small),
                model.faults(&c.refs, c.large),
            );
            let ratio = Fraction::new(lf, sf.max(1));
            report.claim(
                "ratio target 2: page count 7 and simulated ratio above 2",
                "n = 7, ratio > 2",
                c.n == 7 && ratio > target,
                format!("n = {}, k = {}, ratio {lf}/{sf}", c.n, c.repeats),
            );
        }
        Err(e) => report.claim("ratio target 2", "a construction", false, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_model_passes_everything() {
        let report = verify_published(FifoModel::Reference);
        for check in report.failures() {
            eprintln!("{check}");
        }
        assert!(report.all_passed());
        assert_eq!(report.disproof_ratio, (161, 78));
    }

    #[test]
    fn broken_victim_choice_is_caught() {
        let report = verify_published(FifoModel::EvictNewest);
        assert!(!report.all_passed());
        let first = report.failures().next().unwrap();
        assert!(first.name.starts_with("classical"), "{first}");
    }
}
