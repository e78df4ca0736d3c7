//! Small-scale anomaly search.
//!
//! Exhaustive enumeration backs up the feasibility boundary `M < 2m - 1` on
//! tiny spaces, a seeded genetic search explores longer strings, and
//! [`inclusion_check`] tests the stack property that rules the anomaly out
//! for LRU and MIN.
//!
//! Every reported ratio comes with a witness string that is re-simulated
//! before it is returned.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::paging::{
    anomaly_ratio, FifoQueue, Fraction, Page, PagingError, Policy, ReferenceString, Simulator,
};

/// Upper bound on the number of strings an exhaustive search may visit.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("need 1 <= small < large, got small {small}, large {large}")]
    InvalidGeometry { small: usize, large: usize },
    #[error("alphabet of {pages} pages is smaller than the large memory ({large} frames)")]
    AlphabetTooSmall { pages: u32, large: usize },
    #[error("maximum string length must be at least 1")]
    ZeroLength,
    #[error("search space holds {count} strings, above the limit of {limit}")]
    SpaceTooLarge { count: u128, limit: u128 },
    #[error(transparent)]
    Paging(#[from] PagingError),
}

/// Whether some reference string over at least `large + 1` pages makes FIFO
/// fault more with `large` frames than with `small`.
pub fn anomaly_feasible(small: usize, large: usize) -> Result<bool, SearchError> {
    if small == 0 || small >= large {
        return Err(SearchError::InvalidGeometry { small, large });
    }
    Ok(large + 1 < 2 * small)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSpace {
    pub small: usize,
    pub large: usize,
    /// Strings are drawn from pages `1..=pages`.
    pub pages: u32,
    pub max_len: usize,
    /// Only visit strings whose pages first appear in increasing order.
    pub canonicalize: bool,
}

impl SearchSpace {
    pub fn new(small: usize, large: usize, pages: u32, max_len: usize) -> Self {
        Self {
            small,
            large,
            pages,
            max_len,
            canonicalize: true,
        }
    }

    pub fn canonical(mut self, on: bool) -> Self {
        self.canonicalize = on;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.small == 0 || self.small >= self.large {
            return Err(SearchError::InvalidGeometry {
                small: self.small,
                large: self.large,
            });
        }
        if (self.pages as usize) < self.large {
            return Err(SearchError::AlphabetTooSmall {
                pages: self.pages,
                large: self.large,
            });
        }
        if self.max_len == 0 {
            return Err(SearchError::ZeroLength);
        }
        Ok(())
    }

    /// Number of strings of exactly `len` references in this space.
    pub fn strings_of_len(&self, len: usize) -> u128 {
        let n = self.pages as usize;
        if !self.canonicalize {
            return (0..len).fold(1u128, |acc, _| acc.saturating_mul(n as u128));
        }
        // ways[k]: canonical strings so far using exactly k distinct pages.
        let mut ways = vec![0u128; n + 1];
        ways[0] = 1;
        for _ in 0..len {
            let mut next = vec![0u128; n + 1];
            for k in 0..=n {
                if ways[k] == 0 {
                    continue;
                }
                next[k] = next[k].saturating_add(ways[k].saturating_mul(k as u128));
                if k < n {
                    next[k + 1] = next[k + 1].saturating_add(ways[k]);
                }
            }
            ways = next;
        }
        ways.into_iter().fold(0u128, u128::saturating_add)
    }

    /// Number of strings of length `1..=max_len`.
    pub fn size(&self) -> u128 {
        (1..=self.max_len).fold(0u128, |acc, len| {
            acc.saturating_add(self.strings_of_len(len))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best_ratio: Fraction,
    pub small_faults: u64,
    pub large_faults: u64,
    pub witness: ReferenceString,
    pub strings_examined: u64,
    /// True iff every string of the space was examined.
    pub exhausted: bool,
}

/// Best string found so far, as fault counts plus the string.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    small_faults: u64,
    large_faults: u64,
    refs: Vec<Page>,
}

impl Candidate {
    /// Higher ratio wins; equal ratios prefer the lexicographically smaller
    /// string.
    fn beats(&self, other: &Candidate) -> bool {
        let lhs = self.large_faults as u128 * other.small_faults as u128;
        let rhs = other.large_faults as u128 * self.small_faults as u128;
        match lhs.cmp(&rhs) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.refs < other.refs,
        }
    }

    /// Selection order for the genetic search: ratio first, then more
    /// large-memory faults, which keeps pressure on the ratio-1 plateau.
    fn fitter(&self, other: &Candidate) -> Ordering {
        let lhs = self.large_faults as u128 * other.small_faults as u128;
        let rhs = other.large_faults as u128 * self.small_faults as u128;
        lhs.cmp(&rhs)
            .then(self.large_faults.cmp(&other.large_faults))
            .then(other.refs.cmp(&self.refs))
    }

    fn merge(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.beats(&a) { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

/// Re-simulates `result.witness` from scratch and checks the reported counts.
pub fn validate_witness(space: &SearchSpace, result: &SearchResult) -> bool {
    match anomaly_ratio(&result.witness, space.small, space.large, Policy::Fifo) {
        Ok(report) => {
            report.small_faults == result.small_faults
                && report.large_faults == result.large_faults
                && report.ratio == result.best_ratio
        }
        Err(_) => false,
    }
}

fn finish(
    space: &SearchSpace,
    best: Candidate,
    examined: u64,
    exhausted: bool,
) -> Result<SearchResult, SearchError> {
    let result = SearchResult {
        best_ratio: Fraction::new(best.large_faults, best.small_faults),
        small_faults: best.small_faults,
        large_faults: best.large_faults,
        witness: ReferenceString::from(best.refs),
        strings_examined: examined,
        exhausted,
    };
    assert!(
        validate_witness(space, &result),
        "witness {} does not reproduce ratio {}",
        result.witness,
        result.best_ratio
    );
    Ok(result)
}

/// DFS node: the string so far plus both FIFO memories after it.
#[derive(Clone)]
struct Node {
    refs: Vec<Page>,
    small: FifoQueue,
    large: FifoQueue,
    small_faults: u64,
    large_faults: u64,
    distinct: u32,
}

impl Node {
    fn root(space: &SearchSpace) -> Result<Self, SearchError> {
        Ok(Self {
            refs: Vec::with_capacity(space.max_len),
            small: FifoQueue::new(space.small)?,
            large: FifoQueue::new(space.large)?,
            small_faults: 0,
            large_faults: 0,
            distinct: 0,
        })
    }

    /// Highest page id the next reference may use.
    fn next_bound(&self, space: &SearchSpace) -> u32 {
        if space.canonicalize {
            (self.distinct + 1).min(space.pages)
        } else {
            space.pages
        }
    }

    fn child(&self, id: u32) -> Node {
        let page = Page::new(id).expect("ids start at 1");
        let mut next = self.clone();
        next.small_faults += next.small.step(page).fault as u64;
        next.large_faults += next.large.step(page).fault as u64;
        next.distinct = next.distinct.max(id);
        next.refs.push(page);
        next
    }

    fn candidate(&self) -> Candidate {
        Candidate {
            small_faults: self.small_faults,
            large_faults: self.large_faults,
            refs: self.refs.clone(),
        }
    }
}

/// All strings of exactly `depth` more references below `node`.
fn dfs(node: &Node, depth: usize, space: &SearchSpace) -> (Option<Candidate>, u64) {
    if depth == 0 {
        return (Some(node.candidate()), 1);
    }
    let mut best = None;
    let mut count = 0;
    for id in 1..=node.next_bound(space) {
        let (cand, n) = dfs(&node.child(id), depth - 1, space);
        best = Candidate::merge(best, cand);
        count += n;
    }
    (best, count)
}

/// Nodes at exactly `depth` below `node`, in lexicographic order.
fn frontier(node: Node, depth: usize, space: &SearchSpace) -> Vec<Node> {
    let mut level = vec![node];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|n| (1..=n.next_bound(space)).map(move |id| n.child(id)))
            .collect();
    }
    level
}

const SPLIT_DEPTH: usize = 4;

fn search_length(space: &SearchSpace, len: usize) -> Result<(Option<Candidate>, u64), SearchError> {
    let split = len.min(SPLIT_DEPTH);
    let roots = frontier(Node::root(space)?, split, space);
    Ok(roots
        .par_iter()
        .map(|node| dfs(node, len - split, space))
        .reduce(
            || (None, 0),
            |(a, na), (b, nb)| (Candidate::merge(a, b), na + nb),
        ))
}

/// Enumerates every string of the space, shortest first, and returns the
/// largest FIFO ratio `f(large) / f(small)`.
///
/// Refuses spaces above [`ENUMERATION_LIMIT`] strings.
pub fn exhaustive_search(space: &SearchSpace) -> Result<SearchResult, SearchError> {
    space.validate()?;
    let count = space.size();
    if count > ENUMERATION_LIMIT {
        return Err(SearchError::SpaceTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    exhaustive_search_bounded(space, u64::MAX)
}

/// Like [`exhaustive_search`] but without the size guard: whole lengths are
/// searched in increasing order while the running total stays within
/// `max_strings`. The result covers all strings up to the last finished
/// length.
pub fn exhaustive_search_bounded(
    space: &SearchSpace,
    max_strings: u64,
) -> Result<SearchResult, SearchError> {
    space.validate()?;
    let mut best: Option<Candidate> = None;
    let mut examined = 0u64;
    let mut exhausted = true;
    for len in 1..=space.max_len {
        let needed = space.strings_of_len(len);
        if examined as u128 + needed > max_strings as u128 {
            exhausted = false;
            break;
        }
        let (cand, n) = search_length(space, len)?;
        best = Candidate::merge(best, cand);
        examined += n;
    }
    let best = match best {
        Some(best) => best,
        // Nothing fit the budget: report the single-reference string.
        None => Node::root(space)?.child(1).candidate(),
    };
    finish(space, best, examined, exhausted)
}

/// Result of running two memory sizes side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InclusionReport {
    pub holds: bool,
    /// Index of the first reference after which the small memory held a page
    /// the large memory did not.
    pub first_violation: Option<usize>,
}

/// Checks that after every reference the set of pages resident in `small`
/// frames is a subset of those resident in `large` frames.
pub fn inclusion_check(
    policy: Policy,
    refs: &ReferenceString,
    small: usize,
    large: usize,
) -> Result<InclusionReport, SearchError> {
    if small == 0 || small >= large {
        return Err(SearchError::InvalidGeometry { small, large });
    }
    let trace = |capacity| -> Result<Vec<Vec<Page>>, SearchError> {
        Ok(Simulator::new(policy, capacity)?
            .record_trace(true)
            .run(refs)
            .state_trace
            .expect("trace was requested"))
    };
    let small_trace = trace(small)?;
    let large_trace = trace(large)?;
    let first_violation = small_trace
        .iter()
        .zip(&large_trace)
        .skip(1)
        .position(|(s, l)| {
            let l: HashSet<_> = l.iter().collect();
            s.iter().any(|p| !l.contains(p))
        });
    Ok(InclusionReport {
        holds: first_violation.is_none(),
        first_violation,
    })
}

const POPULATION: usize = 48;
const TOURNAMENT: usize = 3;

struct Genetic<'a> {
    space: &'a SearchSpace,
    rng: ChaCha8Rng,
}

impl Genetic<'_> {
    fn random_page(&mut self) -> Page {
        Page::new(self.rng.gen_range(1..=self.space.pages)).expect("ids start at 1")
    }

    fn random_string(&mut self) -> Vec<Page> {
        let len = self.rng.gen_range(1..=self.space.max_len);
        (0..len).map(|_| self.random_page()).collect()
    }

    fn evaluate(&self, refs: &[Page]) -> Candidate {
        let mut small = FifoQueue::new(self.space.small).expect("validated");
        let mut large = FifoQueue::new(self.space.large).expect("validated");
        let (mut small_faults, mut large_faults) = (0, 0);
        for &p in refs {
            small_faults += small.step(p).fault as u64;
            large_faults += large.step(p).fault as u64;
        }
        Candidate {
            small_faults,
            large_faults,
            refs: refs.to_vec(),
        }
    }

    fn pick<'p>(&mut self, population: &'p [Candidate]) -> &'p Candidate {
        let mut winner = population
            .choose(&mut self.rng)
            .expect("population is nonempty");
        for _ in 1..TOURNAMENT {
            let rival = population
                .choose(&mut self.rng)
                .expect("population is nonempty");
            if rival.fitter(winner) == Ordering::Greater {
                winner = rival;
            }
        }
        winner
    }

    fn crossover(&mut self, a: &[Page], b: &[Page]) -> Vec<Page> {
        let cut_a = self.rng.gen_range(0..=a.len());
        let cut_b = self.rng.gen_range(0..=b.len());
        let mut child: Vec<Page> = a[..cut_a].iter().chain(&b[cut_b..]).copied().collect();
        child.truncate(self.space.max_len);
        child
    }

    fn mutate(&mut self, refs: &mut Vec<Page>) {
        let max_len = self.space.max_len;
        match self.rng.gen_range(0..5) {
            0 if !refs.is_empty() => {
                let i = self.rng.gen_range(0..refs.len());
                refs[i] = self.random_page();
            }
            1 if refs.len() < max_len => {
                let i = self.rng.gen_range(0..=refs.len());
                let p = self.random_page();
                refs.insert(i, p);
            }
            2 if refs.len() > 1 => {
                let i = self.rng.gen_range(0..refs.len());
                refs.remove(i);
            }
            3 if !refs.is_empty() && refs.len() < max_len => {
                // Repeat a segment right after itself.
                let start = self.rng.gen_range(0..refs.len());
                let end = self.rng.gen_range(start + 1..=refs.len());
                let room = max_len - refs.len();
                let segment: Vec<Page> = refs[start..end].iter().take(room).copied().collect();
                refs.splice(end..end, segment);
            }
            _ if refs.len() > 1 => {
                let i = self.rng.gen_range(0..refs.len());
                let j = self.rng.gen_range(0..refs.len());
                refs.swap(i, j);
            }
            _ => {
                let p = self.random_page();
                if refs.len() < max_len {
                    refs.push(p);
                } else {
                    refs[0] = p;
                }
            }
        }
    }
}

/// Seeded genetic search over strings of length `1..=max_len`, with the exact
/// FIFO ratio as fitness. Spends exactly `budget` evaluations (at least one)
/// and is reproducible for a given seed.
pub fn randomized_search(
    space: &SearchSpace,
    seed: u64,
    budget: u64,
) -> Result<SearchResult, SearchError> {
    space.validate()?;
    let budget = budget.max(1);
    let mut ga = Genetic {
        space,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };

    let initial = (POPULATION as u64).min(budget) as usize;
    let seeds: Vec<Vec<Page>> = (0..initial).map(|_| ga.random_string()).collect();
    let mut population: Vec<Candidate> = seeds.par_iter().map(|s| ga.evaluate(s)).collect();
    let mut examined = population.len() as u64;
    let mut best = population
        .iter()
        .cloned()
        .reduce(|a, b| if b.beats(&a) { b } else { a })
        .expect("at least one evaluation");

    while examined < budget {
        let batch = (POPULATION as u64).min(budget - examined) as usize;
        let mut children = Vec::with_capacity(batch);
        for _ in 0..batch {
            let a = ga.pick(&population).refs.clone();
            let mut child = if ga.rng.gen_bool(0.6) {
                let b = ga.pick(&population).refs.clone();
                ga.crossover(&a, &b)
            } else {
                a
            };
            let rounds = ga.rng.gen_range(1..=3);
            for _ in 0..rounds {
                ga.mutate(&mut child);
            }
            if child.is_empty() {
                child.push(ga.random_page());
            }
            children.push(child);
        }
        let scored: Vec<Candidate> = children.par_iter().map(|c| ga.evaluate(c)).collect();
        examined += scored.len() as u64;
        for cand in &scored {
            if cand.beats(&best) {
                best = cand.clone();
            }
        }
        // Elitist replacement: keep the strongest of parents and children.
        population.extend(scored);
        population.sort_by(|a, b| b.fitter(a));
        population.dedup_by(|a, b| a.refs == b.refs);
        population.truncate(POPULATION);
    }
    finish(space, best, examined, false)
}
