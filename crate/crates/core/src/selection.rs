//! Types shared by every selection engine: results, counters, input validation
//! and the lazily sorted view of one input vector.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::heap::MaxIndexHeap;
use crate::{oracle, tensor, tree};

/// One value of the Cartesian sum with the index tuple (positions in the
/// original, unsorted inputs) that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedValue {
    pub value: f64,
    pub indices: Vec<u32>,
}

impl IndexedValue {
    /// Sum of the referenced input entries, accumulated left to right.
    pub fn recompute(&self, vectors: &[Vec<f64>]) -> f64 {
        self.indices
            .iter()
            .zip(vectors)
            .map(|(&i, v)| v[i as usize])
            .sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InstrumentationCounters {
    pub heap_pushes: u64,
    pub heap_pops: u64,
    /// Most fringe entries alive at once, summed over every fringe heap of the run.
    pub peak_fringe_entries: u64,
    pub peak_entry_bytes_estimate: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TopKResult {
    pub items: Vec<IndexedValue>,
    pub counters: InstrumentationCounters,
}

impl TopKResult {
    pub fn values(&self) -> Vec<f64> {
        self.items.iter().map(|item| item.value).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("no input vectors")]
    NoVectors,
    #[error("input vector {vector} is empty")]
    EmptyVector { vector: usize },
    #[error("input vector {vector} has a non-finite entry at position {position}")]
    NonFinite { vector: usize, position: usize },
    #[error("input vector {vector} has {len} entries, more than an index can address")]
    VectorTooLong { vector: usize, len: usize },
    #[error("sums of the input vectors overflow to infinity")]
    SumOverflow,
    #[error("instance too large for oracle: {cells} sums exceed the cap of {cap}")]
    TooLargeForOracle { cells: u64, cap: u64 },
}

/// Checks the shared engine contract: at least one vector, none empty, all
/// entries finite, and every possible sum finite.
pub fn validate(vectors: &[Vec<f64>]) -> Result<(), SelectionError> {
    if vectors.is_empty() {
        return Err(SelectionError::NoVectors);
    }
    let mut magnitude = 0.0f64;
    for (vector, values) in vectors.iter().enumerate() {
        if values.is_empty() {
            return Err(SelectionError::EmptyVector { vector });
        }
        if u32::try_from(values.len()).is_err() {
            return Err(SelectionError::VectorTooLong {
                vector,
                len: values.len(),
            });
        }
        let mut largest = 0.0f64;
        for (position, x) in values.iter().enumerate() {
            if !x.is_finite() {
                return Err(SelectionError::NonFinite { vector, position });
            }
            largest = largest.max(x.abs());
        }
        magnitude += largest;
    }
    if !magnitude.is_finite() {
        return Err(SelectionError::SumOverflow);
    }
    Ok(())
}

/// Number of cells in the Cartesian sum, saturating at `u64::MAX`.
pub fn cell_count(vectors: &[Vec<f64>]) -> u64 {
    vectors
        .iter()
        .fold(1u64, |acc, v| acc.saturating_mul(v.len() as u64))
}

pub fn clamp_k(k: usize, vectors: &[Vec<f64>]) -> usize {
    usize::try_from(cell_count(vectors)).map_or(k, |cells| k.min(cells))
}

/// Running counters threaded through the fringe heaps of one engine run.
#[derive(Debug, Clone)]
pub(crate) struct Meter {
    enabled: bool,
    entry_bytes: u64,
    live: u64,
    counters: InstrumentationCounters,
}

impl Meter {
    pub(crate) fn new(enabled: bool, entry_bytes: u64) -> Self {
        Self {
            enabled,
            entry_bytes,
            live: 0,
            counters: InstrumentationCounters::default(),
        }
    }

    pub(crate) fn pushed(&mut self) {
        if self.enabled {
            self.counters.heap_pushes += 1;
            self.live += 1;
            self.counters.peak_fringe_entries = self.counters.peak_fringe_entries.max(self.live);
        }
    }

    pub(crate) fn popped(&mut self) {
        if self.enabled {
            self.counters.heap_pops += 1;
            self.live -= 1;
        }
    }

    pub(crate) fn snapshot(&self) -> InstrumentationCounters {
        InstrumentationCounters {
            peak_entry_bytes_estimate: self.counters.peak_fringe_entries * self.entry_bytes,
            ..self.counters
        }
    }
}

/// Whether an engine run records counters. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instrument {
    On,
    Off,
}

impl Instrument {
    pub(crate) fn enabled(self) -> bool {
        self == Instrument::On
    }
}

/// The three interchangeable selection engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Tree,
    Tensor,
    Oracle,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Tree, Engine::Tensor, Engine::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Tree => "tree",
            Engine::Tensor => "tensor",
            Engine::Oracle => "oracle",
        }
    }

    pub fn top_k(self, vectors: &[Vec<f64>], k: usize) -> Result<TopKResult, SelectionError> {
        self.top_k_with(vectors, k, Instrument::On)
    }

    pub fn top_k_with(
        self,
        vectors: &[Vec<f64>],
        k: usize,
        instrument: Instrument,
    ) -> Result<TopKResult, SelectionError> {
        match self {
            Engine::Tree => tree::top_k_with(vectors, k, instrument),
            Engine::Tensor => tensor::top_k_with(vectors, k, instrument),
            Engine::Oracle => oracle::top_k_with(vectors, k, oracle::DEFAULT_CELL_CAP, instrument),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected tree, tensor or oracle)"))
    }
}

/// One input vector, sorted non-increasing on demand.
///
/// The entries start out heapified; position `p` of the sorted order is
/// realized the first time somebody asks for it, so pulling the top `r`
/// values costs O(n + r log n) rather than a full sort.
#[derive(Debug, Clone)]
pub(crate) struct LazySortedAxis {
    pending: MaxIndexHeap<u32>,
    /// Realized prefix: (value, original index), non-increasing in value.
    sorted: Vec<(f64, u32)>,
}

impl LazySortedAxis {
    /// `values` must already be validated (finite, addressable by `u32`).
    pub(crate) fn new(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as u32))
            .collect();
        Self {
            pending: MaxIndexHeap::from_entries(entries).expect("validated input has no NaN"),
            sorted: Vec::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.sorted.len() + self.pending.len()
    }

    pub(crate) fn get(&mut self, position: usize) -> Option<(f64, u32)> {
        while self.sorted.len() <= position {
            self.sorted.push(self.pending.pop()?);
        }
        Some(self.sorted[position])
    }
}
