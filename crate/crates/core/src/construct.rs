//! Reference strings that make FIFO misbehave.
//!
//! The odd-`n` family uses `m = n - 2` and `M = n - 1` frames over the pages
//! `1..=n`. A prefix `U` drives the small memory into the state
//! `(w_3, ..., w_n)` while the large memory loads pages in cyclic order.
//! Every cyclic block `V = (1, ..., n)^((n-1)/2)` then costs the small memory
//! `n` faults and returns it to `(w_3, ..., w_n)`. The large memory reaches
//! `(2, ..., n)` by the end of the first block at the latest, and from there
//! each block costs it `n(n-1)/2` faults, so the ratio of `U V^k` tends to
//! `(n - 1)/2` as `k` grows.
//!
//! The prefix leaves the large memory exactly in `(2, ..., n)` only when its
//! large-memory fault count is a multiple of `n` (for instance `n = 7` and
//! `n = 13`). Otherwise the first block is cheaper for the large memory by the
//! number of leading hits.

use std::collections::HashSet;

use thiserror::Error;

use crate::paging::{
    simulate, FifoQueue, Fraction, Page, PagingError, Policy, RatioReport, ReferenceString,
};
use crate::residue::{build_w, ResidueError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("page count must be odd and at least 5, got {0}")]
    InvalidPageCount(u32),
    #[error("need 1 <= small < large, got small {small}, large {large}")]
    InvalidGeometry { small: usize, large: usize },
    #[error("target state has {len} pages, expected {expected}")]
    TargetLength { len: usize, expected: usize },
    #[error("target page {page} lies outside 1..={max}")]
    TargetOutOfRange { page: Page, max: u32 },
    #[error("target state lists page {0} more than once")]
    DuplicateTarget(Page),
    #[error("repeat count must be at least 1")]
    ZeroRepeats,
    #[error("ratio target must be at least 1, got {0}")]
    RatioTargetTooSmall(Fraction),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Paging(#[from] PagingError),
}

fn page(id: u32) -> Page {
    Page::new(id).expect("construction only emits positive ids")
}

/// The classical string with its memory sizes 3 and 4.
pub fn classical_example() -> (ReferenceString, usize, usize) {
    let refs = ReferenceString::from_ids([1, 2, 3, 4, 1, 2, 5, 1, 2, 3, 4, 5])
        .expect("literal ids are positive");
    (refs, 3, 4)
}

/// The 34-reference prefix as originally published for `n = 7`. Its last five
/// references are hits in both memories; [`anomaly_prefix`] emits the
/// 29-reference core.
pub fn published_disproof_prefix() -> ReferenceString {
    ReferenceString::from_ids([
        1, 2, 3, 4, 5, 6, 7, 1, 2, 4, 5, 6, 7, 3, 1, 2, 4, 5, 7, 3, 6, 2, 1, 4, 7, 3, 6, 2, 5, 7,
        3, 6, 2, 5,
    ])
    .expect("literal ids are positive")
}

fn check_odd(n: u32) -> Result<(), ConstructError> {
    if n < 5 || n.is_multiple_of(2) {
        Err(ConstructError::InvalidPageCount(n))
    } else {
        Ok(())
    }
}

/// `(w_3, ..., w_n)`: the small-memory state the cyclic block preserves.
pub fn target_state(n: u32) -> Result<Vec<Page>, ConstructError> {
    check_odd(n)?;
    let w = build_w(n as i64)?;
    Ok(w.values()[2..].iter().map(|&v| page(v as u32)).collect())
}

/// `V = (1, ..., n)` repeated `(n - 1)/2` times.
pub fn cycle_block(n: u32) -> Result<ReferenceString, ConstructError> {
    check_odd(n)?;
    Ok(ReferenceString::cyclic(n, (n as usize - 1) / 2))
}

/// Builds a prefix that leaves a FIFO memory of `small` frames in exactly the
/// control state `target` (oldest first), while a FIFO memory of `large`
/// frames faults on pages in the cyclic order `1, 2, ..., large + 1, 1, ...`.
///
/// Pages are drawn from `1..=large + 1`. Every emitted reference faults in
/// the small memory.
pub fn anomaly_prefix(
    small: usize,
    large: usize,
    target: &[Page],
) -> Result<ReferenceString, ConstructError> {
    if small == 0 || small >= large {
        return Err(ConstructError::InvalidGeometry { small, large });
    }
    if target.len() != small {
        return Err(ConstructError::TargetLength {
            len: target.len(),
            expected: small,
        });
    }
    let alphabet = large as u32 + 1;
    let mut seen = HashSet::new();
    for &b in target {
        if b.id() > alphabet {
            return Err(ConstructError::TargetOutOfRange {
                page: b,
                max: alphabet,
            });
        }
        if !seen.insert(b) {
            return Err(ConstructError::DuplicateTarget(b));
        }
    }

    let mut prefix = PrefixBuilder {
        memory: FifoQueue::new(small)?,
        refs: ReferenceString::new(),
        alphabet,
    };
    for id in 1..=large as u32 {
        prefix.emit(page(id));
    }
    let first = target[0];
    for (i, &next) in target.iter().enumerate() {
        if prefix.memory.contains(next) {
            while prefix.memory.contains(next) {
                let filler = prefix.lowest_absent(None);
                prefix.emit(filler);
            }
            while prefix.memory.contains(first) {
                let filler = prefix.lowest_absent(Some(next));
                prefix.emit(filler);
            }
            for &earlier in &target[..i] {
                prefix.emit(earlier);
            }
        }
        prefix.emit(next);
    }
    Ok(prefix.refs)
}

struct PrefixBuilder {
    memory: FifoQueue,
    refs: ReferenceString,
    alphabet: u32,
}

impl PrefixBuilder {
    fn emit(&mut self, p: Page) {
        self.memory.step(p);
        self.refs.push(p);
    }

    fn lowest_absent(&self, except: Option<Page>) -> Page {
        (1..=self.alphabet)
            .map(page)
            .find(|&p| !self.memory.contains(p) && Some(p) != except)
            .expect("alphabet exceeds memory size by at least two")
    }
}

/// Parameters of one member of the odd-`n` family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub n: u32,
    pub small: usize,
    pub large: usize,
    pub repeats: usize,
    pub target_state: Vec<Page>,
}

impl ConstructionSpec {
    pub fn new(n: u32, repeats: usize) -> Result<Self, ConstructError> {
        if repeats == 0 {
            return Err(ConstructError::ZeroRepeats);
        }
        Ok(Self {
            n,
            small: n as usize - 2,
            large: n as usize - 1,
            repeats,
            target_state: target_state(n)?,
        })
    }

    /// `(n - 1)/2`, the limit of the family's ratio.
    pub fn limit_ratio(&self) -> Fraction {
        Fraction::new(self.n as u64 - 1, 2)
    }
}

/// Faults and resulting states of one pass of the cyclic block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPass {
    pub small_faults: u64,
    pub large_faults: u64,
    pub small_state: Vec<Page>,
    pub large_state: Vec<Page>,
}

/// `U V^k` and its simulated behaviour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub spec: ConstructionSpec,
    pub prefix: ReferenceString,
    pub block: ReferenceString,
    pub full_string: ReferenceString,
    pub prefix_small_faults: u64,
    pub prefix_large_faults: u64,
    pub prefix_small_state: Vec<Page>,
    pub prefix_large_state: Vec<Page>,
    /// One entry per repetition of the block.
    pub passes: Vec<BlockPass>,
    pub small_faults: u64,
    pub large_faults: u64,
    pub ratio: Fraction,
    pub limit_ratio: Fraction,
}

impl FamilyReport {
    pub fn ratio_report(&self) -> RatioReport {
        RatioReport {
            small_capacity: self.spec.small,
            large_capacity: self.spec.large,
            small_faults: self.small_faults,
            large_faults: self.large_faults,
            ratio: self.ratio,
        }
    }
}

struct BlockRun {
    prefix_small_state: Vec<Page>,
    prefix_large_state: Vec<Page>,
    prefix_small_faults: u64,
    prefix_large_faults: u64,
    passes: Vec<BlockPass>,
}

/// Simulates the prefix and then each block, carrying both memories across.
fn run_blocks(
    spec: &ConstructionSpec,
    prefix: &ReferenceString,
    block: &ReferenceString,
) -> Result<BlockRun, ConstructError> {
    let mut small = FifoQueue::new(spec.small)?;
    let mut large = FifoQueue::new(spec.large)?;
    let count = |queue: &mut FifoQueue, refs: &ReferenceString| {
        refs.iter().filter(|&&p| queue.step(p).fault).count() as u64
    };
    let prefix_small_faults = count(&mut small, prefix);
    let prefix_large_faults = count(&mut large, prefix);
    let (prefix_small_state, prefix_large_state) = (small.to_vec(), large.to_vec());
    let passes = (0..spec.repeats)
        .map(|_| BlockPass {
            small_faults: count(&mut small, block),
            large_faults: count(&mut large, block),
            small_state: small.to_vec(),
            large_state: large.to_vec(),
        })
        .collect();
    Ok(BlockRun {
        prefix_small_state,
        prefix_large_state,
        prefix_small_faults,
        prefix_large_faults,
        passes,
    })
}

/// Builds `U V^k` for odd `n >= 5` and simulates it at `n - 2` and `n - 1`
/// frames.
pub fn unbounded_family(n: u32, repeats: usize) -> Result<FamilyReport, ConstructError> {
    let spec = ConstructionSpec::new(n, repeats)?;
    let prefix = anomaly_prefix(spec.small, spec.large, &spec.target_state)?;
    let block = cycle_block(n)?;
    let mut full_string = prefix.clone();
    full_string.extend_from(&block.repeated(repeats));

    let small_faults = simulate(Policy::Fifo, &full_string, spec.small, None)?.fault_count() as u64;
    let large_faults = simulate(Policy::Fifo, &full_string, spec.large, None)?.fault_count() as u64;
    let BlockRun {
        prefix_small_state,
        prefix_large_state,
        prefix_small_faults,
        prefix_large_faults,
        passes,
    } = run_blocks(&spec, &prefix, &block)?;

    let limit_ratio = spec.limit_ratio();
    Ok(FamilyReport {
        spec,
        prefix,
        block,
        full_string,
        prefix_small_faults,
        prefix_large_faults,
        prefix_small_state,
        prefix_large_state,
        passes,
        small_faults,
        large_faults,
        ratio: Fraction::new(large_faults, small_faults),
        limit_ratio,
    })
}

/// A reference string whose FIFO anomaly ratio exceeds a requested bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioConstruction {
    pub target: Fraction,
    pub n: u32,
    pub small: usize,
    pub large: usize,
    pub repeats: usize,
    pub refs: ReferenceString,
    pub small_faults: u64,
    pub large_faults: u64,
    pub ratio: Fraction,
}

/// Smallest odd `n >= 5` with `n > 2L + 1`.
pub fn page_count_for_ratio(target: Fraction) -> u32 {
    // 2L + 1 = (2p + q)/q; the smallest integer above it is floor(.) + 1.
    let bound = (2 * target.numer() + target.denom()) / target.denom() + 1;
    let mut n = bound.max(5) as u32;
    if n.is_multiple_of(2) {
        n += 1;
    }
    n
}

/// Finds the smallest number of block repetitions whose simulated ratio
/// exceeds `target`, using the smallest admissible odd page count.
pub fn construct_for_ratio(target: Fraction) -> Result<RatioConstruction, ConstructError> {
    if target < Fraction::from_integer(1) {
        return Err(ConstructError::RatioTargetTooSmall(target));
    }
    let n = page_count_for_ratio(target);
    let spec = ConstructionSpec::new(n, 1)?;
    let prefix = anomaly_prefix(spec.small, spec.large, &spec.target_state)?;
    let block = cycle_block(n)?;

    // Walk the blocks one at a time; the walk is the simulation of U V^k for
    // every k at once.
    let mut small = FifoQueue::new(spec.small)?;
    let mut large = FifoQueue::new(spec.large)?;
    let mut small_faults = 0u64;
    let mut large_faults = 0u64;
    let mut feed = |small: &mut FifoQueue, large: &mut FifoQueue, refs: &ReferenceString| {
        for &p in refs {
            small_faults += small.step(p).fault as u64;
            large_faults += large.step(p).fault as u64;
        }
        (small_faults, large_faults)
    };
    feed(&mut small, &mut large, &prefix);
    let mut repeats = 0usize;
    loop {
        repeats += 1;
        let (s, l) = feed(&mut small, &mut large, &block);
        if Fraction::new(l, s) > target {
            break;
        }
    }

    let mut refs = prefix;
    refs.extend_from(&block.repeated(repeats));
    let small_faults = simulate(Policy::Fifo, &refs, spec.small, None)?.fault_count() as u64;
    let large_faults = simulate(Policy::Fifo, &refs, spec.large, None)?.fault_count() as u64;
    Ok(RatioConstruction {
        target,
        n,
        small: spec.small,
        large: spec.large,
        repeats,
        refs,
        small_faults,
        large_faults,
        ratio: Fraction::new(large_faults, small_faults),
    })
}
