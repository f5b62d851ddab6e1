//! Brute-force reference engine: materialize every sum, sort, truncate.

use std::cmp::Ordering;

use crate::selection::{
    cell_count, clamp_k, validate, IndexedValue, Instrument, InstrumentationCounters,
    SelectionError, TopKResult,
};

pub const DEFAULT_CELL_CAP: u64 = 2_000_000;

pub fn brute_force_top_k(vectors: &[Vec<f64>], k: usize) -> Result<TopKResult, SelectionError> {
    top_k_with(vectors, k, DEFAULT_CELL_CAP, Instrument::On)
}

/// Ties are ordered by index tuple, lexicographically, so repeated runs agree.
pub fn top_k_with(
    vectors: &[Vec<f64>],
    k: usize,
    cap: u64,
    instrument: Instrument,
) -> Result<TopKResult, SelectionError> {
    validate(vectors)?;
    let cells = cell_count(vectors);
    if cells > cap {
        return Err(SelectionError::TooLargeForOracle { cells, cap });
    }
    let k = clamp_k(k, vectors);

    let mut all = Vec::with_capacity(cells as usize);
    let mut tuple = vec![0u32; vectors.len()];
    'cells: loop {
        let item = IndexedValue {
            value: 0.0,
            indices: tuple.clone(),
        };
        all.push(IndexedValue {
            value: item.recompute(vectors),
            ..item
        });
        // odometer, last axis fastest
        let mut axis = vectors.len();
        loop {
            if axis == 0 {
                break 'cells;
            }
            axis -= 1;
            tuple[axis] += 1;
            if (tuple[axis] as usize) < vectors[axis].len() {
                break;
            }
            tuple[axis] = 0;
        }
    }

    all.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.indices.cmp(&b.indices))
    });
    all.truncate(k);

    let counters = if instrument.enabled() {
        InstrumentationCounters {
            heap_pushes: cells,
            heap_pops: k as u64,
            peak_fringe_entries: cells,
            peak_entry_bytes_estimate: cells * (8 + 4 * vectors.len() as u64),
        }
    } else {
        InstrumentationCounters::default()
    };
    Ok(TopKResult {
        items: all,
        counters,
    })
}
