//! Best-first fringe expansion over the implicit m-dimensional tensor of sums.
//!
//! The fringe holds positions in the sorted axes. Popping position
//! `(p1, ..., pm)` pushes each of its `m` axis successors that is in bounds
//! and has not been pushed before. A visited set keyed on the position tuple
//! keeps a cell reachable from several predecessors from entering twice.

use std::collections::HashSet;

use crate::heap::MaxIndexHeap;
use crate::selection::{
    clamp_k, validate, IndexedValue, Instrument, LazySortedAxis, Meter, SelectionError, TopKResult,
};

pub fn tensor_top_k(vectors: &[Vec<f64>], k: usize) -> Result<TopKResult, SelectionError> {
    top_k_with(vectors, k, Instrument::On)
}

pub fn top_k_with(
    vectors: &[Vec<f64>],
    k: usize,
    instrument: Instrument,
) -> Result<TopKResult, SelectionError> {
    let k = clamp_k(k, vectors);
    let mut selector = TensorSelector::new(vectors, instrument)?;
    let items = selector.by_ref().take(k).collect();
    Ok(TopKResult {
        items,
        counters: selector.meter.snapshot(),
    })
}

/// Stateful iterator emitting the Cartesian sum in non-increasing order.
#[derive(Debug)]
pub struct TensorSelector {
    axes: Vec<LazySortedAxis>,
    fringe: MaxIndexHeap<Box<[u32]>>,
    visited: HashSet<Box<[u32]>>,
    meter: Meter,
}

impl TensorSelector {
    pub fn new(vectors: &[Vec<f64>], instrument: Instrument) -> Result<Self, SelectionError> {
        validate(vectors)?;
        let m = vectors.len() as u64;
        let mut selector = Self {
            axes: vectors.iter().map(|v| LazySortedAxis::new(v)).collect(),
            fringe: MaxIndexHeap::new(),
            visited: HashSet::new(),
            // key + position tuple in the heap + its copy in the visited set
            meter: Meter::new(instrument.enabled(), 8 + 8 * m),
        };
        let origin: Box<[u32]> = vec![0; vectors.len()].into();
        selector.push(origin);
        Ok(selector)
    }

    pub fn counters(&self) -> crate::selection::InstrumentationCounters {
        self.meter.snapshot()
    }

    pub fn fringe_len(&self) -> usize {
        self.fringe.len()
    }

    fn push(&mut self, position: Box<[u32]>) {
        let sum = position
            .iter()
            .zip(self.axes.iter_mut())
            .map(|(&p, axis)| axis.get(p as usize).expect("position in bounds").0)
            .sum();
        self.fringe
            .push(sum, position.clone())
            .expect("sums of validated input are finite");
        self.visited.insert(position);
        self.meter.pushed();
    }
}

impl Iterator for TensorSelector {
    type Item = IndexedValue;

    fn next(&mut self) -> Option<IndexedValue> {
        let (value, position) = self.fringe.pop()?;
        self.meter.popped();
        for axis in 0..position.len() {
            let next = position[axis] as usize + 1;
            if next >= self.axes[axis].len() {
                continue;
            }
            let mut successor = position.clone();
            successor[axis] = next as u32;
            if !self.visited.contains(&successor) {
                self.push(successor);
            }
        }
        let indices = position
            .iter()
            .zip(self.axes.iter_mut())
            .map(|(&p, axis)| axis.get(p as usize).expect("realized").1)
            .collect();
        Some(IndexedValue { value, indices })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(vectors: &[Vec<f64>], k: usize) -> Vec<f64> {
        tensor_top_k(vectors, k).unwrap().values()
    }

    #[test]
    fn three_binary_axes() {
        let x = [vec![0.0, -1.0], vec![0.0, -2.0], vec![0.0, -4.0]];
        assert_eq!(values(&x, 4), vec![0.0, -1.0, -2.0, -3.0]);
        assert_eq!(
            values(&x, 8),
            vec![0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0]
        );
    }

    #[test]
    fn pair_with_tie() {
        let result = tensor_top_k(&[vec![3.0, 1.0], vec![4.0, 2.0]], 3).unwrap();
        assert_eq!(result.values(), vec![7.0, 5.0, 5.0]);
        assert_eq!(result.items[0].indices, vec![0, 0]);
        let mut tied: Vec<_> = result.items[1..]
            .iter()
            .map(|it| it.indices.clone())
            .collect();
        tied.sort();
        assert_eq!(tied, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn k_one_is_sum_of_maxima() {
        let x = [vec![0.5, 2.0, -1.0], vec![-3.0, -0.25], vec![7.0]];
        let result = tensor_top_k(&x, 1).unwrap();
        assert_eq!(result.values(), vec![2.0 - 0.25 + 7.0]);
        assert_eq!(result.items[0].indices, vec![1, 1, 0]);
    }

    #[test]
    fn zero_k_and_clamp() {
        assert!(values(&[vec![1.0, 2.0]], 0).is_empty());
        assert_eq!(values(&[vec![1.0, 2.0], vec![0.0]], 10), vec![2.0, 1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(tensor_top_k(&[], 1), Err(SelectionError::NoVectors));
        assert_eq!(
            tensor_top_k(&[vec![1.0], vec![]], 1),
            Err(SelectionError::EmptyVector { vector: 1 })
        );
        assert!(matches!(
            tensor_top_k(&[vec![f64::NAN]], 1),
            Err(SelectionError::NonFinite { .. })
        ));
    }

    #[test]
    fn pops_push_exactly_the_unvisited_successors() {
        let x = vec![
            vec![0.3, 0.9, 0.1, 0.5],
            vec![0.2, 0.8, 0.4],
            vec![0.7, 0.6, 0.0, 0.35],
        ];
        let lens: Vec<u32> = x.iter().map(|v| v.len() as u32).collect();
        let mut selector = TensorSelector::new(&x, Instrument::On).unwrap();
        while let Some((_, top)) = selector.fringe.peek() {
            let top = top.clone();
            let expected: Vec<Box<[u32]>> = (0..top.len())
                .filter(|&d| top[d] + 1 < lens[d])
                .map(|d| {
                    let mut s = top.clone();
                    s[d] += 1;
                    s
                })
                .filter(|s| !selector.visited.contains(s))
                .collect();
            let before = selector.counters().heap_pushes;
            selector.next().unwrap();
            assert_eq!(
                selector.counters().heap_pushes - before,
                expected.len() as u64
            );
            assert!(expected.len() <= x.len());
            for s in &expected {
                assert!(selector.visited.contains(s));
            }
        }
        assert_eq!(selector.visited.len(), 4 * 3 * 4);
    }

    #[test]
    fn push_bound() {
        let x: Vec<Vec<f64>> = (0..4)
            .map(|d| (0..5).map(|j| ((d * 7 + j * 3) % 11) as f64).collect())
            .collect();
        for k in 0..=40 {
            let c = tensor_top_k(&x, k).unwrap().counters;
            assert!(c.heap_pushes <= 4 * k as u64 + 1);
            assert!(c.heap_pops <= c.heap_pushes);
        }
    }
}
