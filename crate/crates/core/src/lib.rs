//! A paging-theory laboratory built around FIFO's Belady anomaly.
//!
//! * [`paging`] holds the FIFO, LRU and MIN replacement automata with exact
//!   fault accounting, warm starts, anomaly ratios and paging rates.
//! * [`residue`] has the complete-residue-system machinery behind the
//!   cyclic block construction.
//! * [`construct`] builds the classical 10/9 string, the FIFO prefix
//!   generator and the `U V^k` family whose ratio exceeds any bound.
//! * [`search`] probes small instance spaces exhaustively or stochastically.
//! * [`verify`] replays every published number against a FIFO model.

pub mod construct;
pub mod paging;
pub mod residue;
pub mod search;
pub mod verify;

pub use paging::{
    anomaly_ratio, cyclic_rate_estimate, min_victim, paging_rate, simulate, FifoQueue, Fraction,
    LruList, Page, PagingError, Policy, RatioReport, ReferenceString, SimulationResult, Simulator,
    Step,
};
