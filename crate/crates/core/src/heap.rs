//! Array-embedded binary max-heap keyed on `f64`, carrying an arbitrary payload.
//!
//! Every fringe in the crate is one of these. Keys are never NaN, so the
//! ordering used for sifting is total.

use std::fmt;

/// Returned when a NaN key is offered to [`MaxIndexHeap::push`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NanKey;

impl fmt::Display for NanKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("heap key is NaN")
    }
}

impl std::error::Error for NanKey {}

#[derive(Debug, Clone)]
pub struct MaxIndexHeap<P> {
    entries: Vec<(f64, P)>,
}

impl<P> Default for MaxIndexHeap<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> MaxIndexHeap<P> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity),
        }
    }

    /// Builds a heap from unordered entries in linear time (bottom-up heapify).
    pub fn from_entries(entries: Vec<(f64, P)>) -> Result<Self, NanKey> {
        if entries.iter().any(|(key, _)| key.is_nan()) {
            return Err(NanKey);
        }
        let mut heap = Self { entries };
        for parent in (0..heap.entries.len() / 2).rev() {
            heap.sift_down(parent);
        }
        Ok(heap)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn peek(&self) -> Option<(f64, &P)> {
        self.entries.first().map(|(key, payload)| (*key, payload))
    }

    pub fn push(&mut self, key: f64, payload: P) -> Result<(), NanKey> {
        if key.is_nan() {
            return Err(NanKey);
        }
        self.entries.push((key, payload));
        self.sift_up(self.entries.len() - 1);
        Ok(())
    }

    /// Removes an entry with the largest key. Ties come out in no particular order.
    ///
    /// `None` on an empty heap; callers treat that as exhaustion, never as bad data.
    pub fn pop(&mut self) -> Option<(f64, P)> {
        let last = self.entries.len().checked_sub(1)?;
        self.entries.swap(0, last);
        let top = self.entries.pop();
        if !self.entries.is_empty() {
            self.sift_down(0);
        }
        top
    }

    fn sift_up(&mut self, mut child: usize) {
        while child > 0 {
            let parent = (child - 1) / 2;
            if self.entries[parent].0 >= self.entries[child].0 {
                break;
            }
            self.entries.swap(parent, child);
            child = parent;
        }
    }

    fn sift_down(&mut self, mut parent: usize) {
        let len = self.entries.len();
        loop {
            let left = 2 * parent + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let larger = if right < len && self.entries[right].0 > self.entries[left].0 {
                right
            } else {
                left
            };
            if self.entries[parent].0 >= self.entries[larger].0 {
                break;
            }
            self.entries.swap(parent, larger);
            parent = larger;
        }
    }

    #[cfg(test)]
    fn heap_property_holds(&self) -> bool {
        (1..self.entries.len()).all(|c| self.entries[(c - 1) / 2].0 >= self.entries[c].0)
    }
}
