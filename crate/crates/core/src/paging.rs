//! Demand-paging automata: FIFO, LRU and MIN.
//!
//! All three policies start from an empty memory unless a warm-start state is
//! given. A warm-start state is an ordered list of resident pages, oldest
//! first, exactly as if those pages had been loaded in that order: for FIFO
//! the first entry is the next victim, for LRU it is the least recently used.
//!
//! Fault counts are exact and every ratio or rate is an exact [`Fraction`].

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

/// Exact non-negative rational used for anomaly ratios and paging rates.
pub type Fraction = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PagingError {
    #[error("page ids start at 1, got {0}")]
    InvalidPage(u64),
    #[error("memory capacity must be at least 1")]
    ZeroCapacity,
    #[error("warm-start state lists page {0} more than once")]
    DuplicateWarmPage(Page),
    #[error("warm-start state holds {len} pages but capacity is {capacity}")]
    WarmStateTooLarge { len: usize, capacity: usize },
    #[error("reference string is empty")]
    EmptyReferenceString,
    #[error("small capacity {small} exceeds large capacity {large}")]
    CapacityOrder { small: usize, large: usize },
    #[error("small memory produced no faults, ratio is undefined")]
    DegenerateRatio,
    #[error("capacity {capacity} must be below the cycle length {pages}")]
    CapacityNotBelowCycle { capacity: usize, pages: u32 },
    #[error("cycle count must be at least 1")]
    ZeroCycles,
}

/// A page identifier; ids are positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Page(u32);

impl Page {
    pub fn new(id: u32) -> Result<Self, PagingError> {
        if id == 0 {
            Err(PagingError::InvalidPage(0))
        } else {
            Ok(Page(id))
        }
    }

    pub const fn id(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Page {
    type Error = PagingError;

    fn try_from(id: u32) -> Result<Self, Self::Error> {
        Page::new(id)
    }
}

impl fmt::Display for Page {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Converts raw ids into pages, rejecting zero.
pub fn pages(ids: &[u32]) -> Result<Vec<Page>, PagingError> {
    ids.iter().map(|&id| Page::new(id)).collect()
}

/// A finite sequence of page references.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReferenceString(Vec<Page>);

impl ReferenceString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Result<Self, PagingError> {
        ids.into_iter()
            .map(Page::new)
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    /// `(1, 2, ..., n)` repeated `cycles` times.
    pub fn cyclic(n: u32, cycles: usize) -> Self {
        let mut refs = Vec::with_capacity(n as usize * cycles);
        for _ in 0..cycles {
            refs.extend((1..=n).map(Page));
        }
        Self(refs)
    }

    pub fn pages(&self) -> &[Page] {
        &self.0
    }

    pub fn ids(&self) -> Vec<u32> {
        self.0.iter().map(|p| p.id()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Page> {
        self.0.iter()
    }

    pub fn push(&mut self, page: Page) {
        self.0.push(page);
    }

    pub fn extend_from(&mut self, other: &ReferenceString) {
        self.0.extend_from_slice(&other.0);
    }

    /// This string concatenated with itself `times` times.
    pub fn repeated(&self, times: usize) -> Self {
        Self(self.0.repeat(times))
    }

    pub fn distinct_pages(&self) -> usize {
        self.0.iter().collect::<HashSet<_>>().len()
    }

    pub fn max_page(&self) -> Option<Page> {
        self.0.iter().copied().max()
    }

    pub fn into_pages(self) -> Vec<Page> {
        self.0
    }
}

impl From<Vec<Page>> for ReferenceString {
    fn from(refs: Vec<Page>) -> Self {
        Self(refs)
    }
}

impl FromIterator<Page> for ReferenceString {
    fn from_iter<I: IntoIterator<Item = Page>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a ReferenceString {
    type Item = &'a Page;
    type IntoIter = std::slice::Iter<'a, Page>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ReferenceString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, page) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{page}")?;
        }
        write!(f, ")")
    }
}

/// Outcome of processing one reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub fault: bool,
    pub evicted: Option<Page>,
}

impl Step {
    const HIT: Step = Step {
        fault: false,
        evicted: None,
    };

    fn fault(evicted: Option<Page>) -> Step {
        Step {
            fault: true,
            evicted,
        }
    }
}

fn check_state(entries: &[Page], capacity: usize) -> Result<(), PagingError> {
    if capacity == 0 {
        return Err(PagingError::ZeroCapacity);
    }
    if entries.len() > capacity {
        return Err(PagingError::WarmStateTooLarge {
            len: entries.len(),
            capacity,
        });
    }
    let mut seen = HashSet::with_capacity(entries.len());
    for &page in entries {
        if !seen.insert(page) {
            return Err(PagingError::DuplicateWarmPage(page));
        }
    }
    Ok(())
}

/// FIFO control state. The queue's element set is the memory state; the
/// front entry has been resident longest and is the next victim.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FifoQueue {
    entries: VecDeque<Page>,
    capacity: usize,
}

impl FifoQueue {
    pub fn new(capacity: usize) -> Result<Self, PagingError> {
        Self::with_entries(capacity, &[])
    }

    /// A warm queue, oldest entry first.
    pub fn with_entries(capacity: usize, entries: &[Page]) -> Result<Self, PagingError> {
        check_state(entries, capacity)?;
        let mut queue = VecDeque::with_capacity(capacity);
        queue.extend(entries.iter().copied());
        Ok(Self {
            entries: queue,
            capacity,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, page: Page) -> bool {
        self.entries.contains(&page)
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = Page> + '_ {
        self.entries.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<Page> {
        self.entries.iter().copied().collect()
    }

    pub fn step(&mut self, page: Page) -> Step {
        if self.entries.contains(&page) {
            return Step::HIT;
        }
        let evicted = if self.entries.len() == self.capacity {
            self.entries.pop_front()
        } else {
            None
        };
        self.entries.push_back(page);
        Step::fault(evicted)
    }
}

/// LRU recency list, least recently used first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LruList {
    entries: VecDeque<Page>,
    capacity: usize,
}

impl LruList {
    pub fn new(capacity: usize) -> Result<Self, PagingError> {
        Self::with_entries(capacity, &[])
    }

    pub fn with_entries(capacity: usize, entries: &[Page]) -> Result<Self, PagingError> {
        check_state(entries, capacity)?;
        Ok(Self {
            entries: entries.iter().copied().collect(),
            capacity,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, page: Page) -> bool {
        self.entries.contains(&page)
    }

    pub fn to_vec(&self) -> Vec<Page> {
        self.entries.iter().copied().collect()
    }

    pub fn step(&mut self, page: Page) -> Step {
        if let Some(pos) = self.entries.iter().position(|&p| p == page) {
            self.entries.remove(pos);
            self.entries.push_back(page);
            return Step::HIT;
        }
        let evicted = if self.entries.len() == self.capacity {
            self.entries.pop_front()
        } else {
            None
        };
        self.entries.push_back(page);
        Step::fault(evicted)
    }
}

/// Belady's MIN victim: the resident page whose next reference at or after
/// `position` is farthest away. Pages never referenced again are infinitely
/// far; among those the smallest id is chosen.
///
/// Panics if `memory` is empty.
pub fn min_victim(memory: &[Page], refs: &[Page], position: usize) -> Page {
    assert!(
        !memory.is_empty(),
        "MIN victim requested from an empty memory"
    );
    let future = refs.get(position..).unwrap_or(&[]);
    let distance = |page: Page| future.iter().position(|&r| r == page).unwrap_or(usize::MAX);
    memory
        .iter()
        .copied()
        .max_by(|&a, &b| distance(a).cmp(&distance(b)).then(b.cmp(&a)))
        .expect("memory is nonempty")
}

/// MIN memory backed by a precomputed next-use table. Resident pages are kept
/// in load order so the final state reads like the other policies.
struct MinMemory {
    resident: Vec<(Page, usize)>,
    capacity: usize,
}

/// `next_use[t]` is the index of the next reference to `refs[t]` after `t`,
/// or `usize::MAX` if there is none.
fn next_use_table(refs: &[Page]) -> Vec<usize> {
    let mut last_seen = std::collections::HashMap::new();
    let mut next = vec![usize::MAX; refs.len()];
    for (t, page) in refs.iter().enumerate().rev() {
        if let Some(later) = last_seen.insert(*page, t) {
            next[t] = later;
        }
    }
    next
}

impl MinMemory {
    fn new(capacity: usize, warm: &[Page], refs: &[Page]) -> Self {
        let resident = warm
            .iter()
            .map(|&page| {
                let first = refs.iter().position(|&r| r == page).unwrap_or(usize::MAX);
                (page, first)
            })
            .collect();
        Self { resident, capacity }
    }

    fn step(&mut self, page: Page, next: usize) -> Step {
        if let Some(slot) = self.resident.iter_mut().find(|(p, _)| *p == page) {
            slot.1 = next;
            return Step::HIT;
        }
        let evicted = if self.resident.len() == self.capacity {
            let (idx, _) = self
                .resident
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("capacity is at least 1");
            Some(self.resident.remove(idx).0)
        } else {
            None
        };
        self.resident.push((page, next));
        Step::fault(evicted)
    }

    fn to_vec(&self) -> Vec<Page> {
        self.resident.iter().map(|(p, _)| *p).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    Fifo,
    Lru,
    Min,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Fifo, Policy::Lru, Policy::Min];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Fifo => "fifo",
            Policy::Lru => "lru",
            Policy::Min => "min",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fifo" => Ok(Policy::Fifo),
            "lru" => Ok(Policy::Lru),
            "min" | "opt" => Ok(Policy::Min),
            other => Err(format!(
                "unknown policy `{other}` (expected fifo, lru or min)"
            )),
        }
    }
}

/// Everything a simulation run observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationResult {
    /// Zero-based indices of the faulting references.
    pub fault_positions: Vec<usize>,
    pub faulted_pages: Vec<Page>,
    /// Evicted page for every fault, `None` for cold faults.
    pub evictions: Vec<Option<Page>>,
    /// Ordered control state after the last reference.
    pub final_state: Vec<Page>,
    /// Control state before the first reference followed by the state after
    /// each reference, when tracing was requested.
    pub state_trace: Option<Vec<Vec<Page>>>,
}

impl SimulationResult {
    pub fn fault_count(&self) -> usize {
        self.fault_positions.len()
    }
}

/// A configured simulation: policy, capacity, optional warm start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulator {
    policy: Policy,
    capacity: usize,
    warm: Vec<Page>,
    record_trace: bool,
}

impl Simulator {
    pub fn new(policy: Policy, capacity: usize) -> Result<Self, PagingError> {
        check_state(&[], capacity)?;
        Ok(Self {
            policy,
            capacity,
            warm: Vec::new(),
            record_trace: false,
        })
    }

    /// Start from `state` (oldest first) instead of an empty memory.
    pub fn warm_start(mut self, state: &[Page]) -> Result<Self, PagingError> {
        check_state(state, self.capacity)?;
        self.warm = state.to_vec();
        Ok(self)
    }

    pub fn record_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn run(&self, refs: &ReferenceString) -> SimulationResult {
        let mut out = Recorder::new(self.record_trace, refs.len(), &self.warm);
        let final_state = match self.policy {
            Policy::Fifo => {
                let mut queue = FifoQueue::with_entries(self.capacity, &self.warm)
                    .expect("validated on construction");
                for (t, &page) in refs.iter().enumerate() {
                    let step = queue.step(page);
                    out.record(t, page, step, || queue.to_vec());
                }
                queue.to_vec()
            }
            Policy::Lru => {
                let mut list = LruList::with_entries(self.capacity, &self.warm)
                    .expect("validated on construction");
                for (t, &page) in refs.iter().enumerate() {
                    let step = list.step(page);
                    out.record(t, page, step, || list.to_vec());
                }
                list.to_vec()
            }
            Policy::Min => {
                let next = next_use_table(refs.pages());
                let mut memory = MinMemory::new(self.capacity, &self.warm, refs.pages());
                for (t, &page) in refs.iter().enumerate() {
                    let step = memory.step(page, next[t]);
                    out.record(t, page, step, || memory.to_vec());
                }
                memory.to_vec()
            }
        };
        out.finish(final_state)
    }
}

struct Recorder {
    fault_positions: Vec<usize>,
    faulted_pages: Vec<Page>,
    evictions: Vec<Option<Page>>,
    trace: Option<Vec<Vec<Page>>>,
}

impl Recorder {
    fn new(record_trace: bool, len: usize, initial: &[Page]) -> Self {
        let trace = record_trace.then(|| {
            let mut states = Vec::with_capacity(len + 1);
            states.push(initial.to_vec());
            states
        });
        Self {
            fault_positions: Vec::new(),
            faulted_pages: Vec::new(),
            evictions: Vec::new(),
            trace,
        }
    }

    fn record(&mut self, t: usize, page: Page, step: Step, state: impl FnOnce() -> Vec<Page>) {
        if step.fault {
            self.fault_positions.push(t);
            self.faulted_pages.push(page);
            self.evictions.push(step.evicted);
        }
        if let Some(trace) = self.trace.as_mut() {
            trace.push(state());
        }
    }

    fn finish(self, final_state: Vec<Page>) -> SimulationResult {
        SimulationResult {
            fault_positions: self.fault_positions,
            faulted_pages: self.faulted_pages,
            evictions: self.evictions,
            final_state,
            state_trace: self.trace,
        }
    }
}

/// Runs `policy` over `refs` at `capacity`, from `warm` or from empty memory.
pub fn simulate(
    policy: Policy,
    refs: &ReferenceString,
    capacity: usize,
    warm: Option<&[Page]>,
) -> Result<SimulationResult, PagingError> {
    let mut sim = Simulator::new(policy, capacity)?;
    if let Some(state) = warm {
        sim = sim.warm_start(state)?;
    }
    Ok(sim.run(refs))
}

fn cold_faults(
    policy: Policy,
    refs: &ReferenceString,
    capacity: usize,
) -> Result<u64, PagingError> {
    Ok(simulate(policy, refs, capacity, None)?.fault_count() as u64)
}

/// Fault counts of one string at two memory sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatioReport {
    pub small_capacity: usize,
    pub large_capacity: usize,
    pub small_faults: u64,
    pub large_faults: u64,
    /// `large_faults / small_faults`.
    pub ratio: Fraction,
}

impl RatioReport {
    pub fn from_counts(
        small_capacity: usize,
        large_capacity: usize,
        small_faults: u64,
        large_faults: u64,
    ) -> Result<Self, PagingError> {
        if small_faults == 0 {
            return Err(PagingError::DegenerateRatio);
        }
        Ok(Self {
            small_capacity,
            large_capacity,
            small_faults,
            large_faults,
            ratio: Fraction::new(large_faults, small_faults),
        })
    }

    pub fn is_anomaly(&self) -> bool {
        self.large_capacity > self.small_capacity && self.large_faults > self.small_faults
    }
}

/// Cold-start fault counts of `refs` at `small` and `large` frames.
pub fn anomaly_ratio(
    refs: &ReferenceString,
    small: usize,
    large: usize,
    policy: Policy,
) -> Result<RatioReport, PagingError> {
    if small > large {
        return Err(PagingError::CapacityOrder { small, large });
    }
    let small_faults = cold_faults(policy, refs, small)?;
    let large_faults = cold_faults(policy, refs, large)?;
    RatioReport::from_counts(small, large, small_faults, large_faults)
}

/// Faults per reference of a finite string, from a cold start.
pub fn paging_rate(
    policy: Policy,
    refs: &ReferenceString,
    capacity: usize,
) -> Result<Fraction, PagingError> {
    if refs.is_empty() {
        return Err(PagingError::EmptyReferenceString);
    }
    let faults = cold_faults(policy, refs, capacity)?;
    Ok(Fraction::new(faults, refs.len() as u64))
}

/// Finite-prefix estimate of the paging rate of the infinite cycle
/// `(1, ..., n)*`: the cold-start rate of `cycles` whole periods.
pub fn cyclic_rate_estimate(
    policy: Policy,
    n: u32,
    capacity: usize,
    cycles: usize,
) -> Result<Fraction, PagingError> {
    if capacity == 0 {
        return Err(PagingError::ZeroCapacity);
    }
    if capacity >= n as usize {
        return Err(PagingError::CapacityNotBelowCycle { capacity, pages: n });
    }
    if cycles == 0 {
        return Err(PagingError::ZeroCycles);
    }
    paging_rate(policy, &ReferenceString::cyclic(n, cycles), capacity)
}
