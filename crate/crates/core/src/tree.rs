//! Hierarchical selection: a balanced binary tree of lazy pairwise sum heaps.
//!
//! Each internal node treats its two children as ordered sources and runs the
//! two-dimensional fringe walk over their outputs. A node pulls another value
//! out of a child only when a fringe successor points one past the child's
//! realized margin, so nothing below the root does more work than the root
//! actually asks for.
//!
//! Inside a node, cell `(i, j)` is pushed by exactly one predecessor: `(i+1, j)`
//! follows every pop, `(i, j+1)` only pops from row 0. This covers the grid
//! without a visited set.

use std::ops::Range;

use crate::heap::MaxIndexHeap;
use crate::selection::{
    clamp_k, validate, IndexedValue, Instrument, InstrumentationCounters, LazySortedAxis, Meter,
    SelectionError, TopKResult,
};

/// Estimated bytes per fringe entry: the key plus two `u32` coordinates.
const PAIR_ENTRY_BYTES: u64 = 16;

pub fn tree_top_k(vectors: &[Vec<f64>], k: usize) -> Result<TopKResult, SelectionError> {
    top_k_with(vectors, k, Instrument::On)
}

pub fn top_k_with(
    vectors: &[Vec<f64>],
    k: usize,
    instrument: Instrument,
) -> Result<TopKResult, SelectionError> {
    let k = clamp_k(k, vectors);
    let mut selector = TreeSelector::new(vectors, instrument)?;
    let items = selector.by_ref().take(k).collect();
    Ok(TopKResult {
        items,
        counters: selector.counters(),
    })
}

/// Shape of a built tree, leaves labelled by input vector position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Leaf(usize),
    Pair(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn depth(&self) -> usize {
        match self {
            Shape::Leaf(_) => 0,
            Shape::Pair(l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

/// Per-node bookkeeping used to check that the tree stays lazy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeStats {
    pub span: Range<usize>,
    pub depth: usize,
    pub pops: u64,
    pub realized_left: usize,
    pub realized_right: usize,
    pub fringe_len: usize,
    /// Largest `fringe_len - pops` seen at any point in the node's life.
    pub max_fringe_excess: i64,
    /// Largest `realized - pops` over both children, at any point.
    pub max_realized_excess: i64,
}

impl NodeStats {
    /// Realized-from-child and fringe size never exceeded pops + 1.
    pub fn is_lazy(&self) -> bool {
        self.max_fringe_excess <= 1 && self.max_realized_excess <= 1
    }
}

/// The built tree, consumed as an iterator over the Cartesian sum in
/// non-increasing order.
#[derive(Debug)]
pub struct TreeSelector {
    root: Source,
    meter: Meter,
}

impl TreeSelector {
    /// Builds the balanced tree. Every pair node is primed with the sum of
    /// its children's maxima, so construction already pops once from each
    /// child.
    pub fn new(vectors: &[Vec<f64>], instrument: Instrument) -> Result<Self, SelectionError> {
        validate(vectors)?;
        let mut meter = Meter::new(instrument.enabled(), PAIR_ENTRY_BYTES);
        let root = Source::build(vectors, 0..vectors.len(), &mut meter);
        Ok(Self { root, meter })
    }

    pub fn counters(&self) -> InstrumentationCounters {
        self.meter.snapshot()
    }

    pub fn shape(&self) -> Shape {
        self.root.shape()
    }

    /// Stats for every pair node, in pre-order.
    pub fn node_stats(&self) -> Vec<NodeStats> {
        let mut out = Vec::new();
        self.root.collect_stats(0, &mut out);
        out
    }
}

impl Iterator for TreeSelector {
    type Item = IndexedValue;

    fn next(&mut self) -> Option<IndexedValue> {
        self.root.pop_next(&mut self.meter)
    }
}

#[derive(Debug)]
enum Source {
    Leaf(LeafSource),
    Pair(Box<PairNode>),
}

impl Source {
    fn build(vectors: &[Vec<f64>], span: Range<usize>, meter: &mut Meter) -> Source {
        if span.len() == 1 {
            // a leaf's single live candidate is the value under its cursor
            meter.pushed();
            return Source::Leaf(LeafSource {
                vector: span.start,
                axis: LazySortedAxis::new(&vectors[span.start]),
                cursor: 0,
            });
        }
        let mid = span.start + span.len().div_ceil(2);
        let left = Source::build(vectors, span.start..mid, meter);
        let right = Source::build(vectors, mid..span.end, meter);
        Source::Pair(Box::new(PairNode::new(span, left, right, meter)))
    }

    fn pop_next(&mut self, meter: &mut Meter) -> Option<IndexedValue> {
        match self {
            Source::Leaf(leaf) => leaf.pop_next(meter),
            Source::Pair(node) => node.pop_next(meter),
        }
    }

    fn shape(&self) -> Shape {
        match self {
            Source::Leaf(leaf) => Shape::Leaf(leaf.vector),
            Source::Pair(node) => {
                Shape::Pair(Box::new(node.left.shape()), Box::new(node.right.shape()))
            }
        }
    }

    fn collect_stats(&self, depth: usize, out: &mut Vec<NodeStats>) {
        if let Source::Pair(node) = self {
            out.push(NodeStats {
                span: node.span.clone(),
                depth,
                pops: node.pops,
                realized_left: node.left_margin.realized.len(),
                realized_right: node.right_margin.realized.len(),
                fringe_len: node.fringe.len(),
                max_fringe_excess: node.max_fringe_excess,
                max_realized_excess: node.max_realized_excess,
            });
            node.left.collect_stats(depth + 1, out);
            node.right.collect_stats(depth + 1, out);
        }
    }
}

/// One input vector served in non-increasing order.
#[derive(Debug)]
struct LeafSource {
    vector: usize,
    axis: LazySortedAxis,
    cursor: usize,
}

impl LeafSource {
    fn pop_next(&mut self, meter: &mut Meter) -> Option<IndexedValue> {
        let (value, index) = self.axis.get(self.cursor)?;
        meter.popped();
        self.cursor += 1;
        if self.cursor < self.axis.len() {
            meter.pushed();
        }
        Some(IndexedValue {
            value,
            indices: vec![index],
        })
    }
}

/// The prefix of a child's output its parent has pulled so far.
#[derive(Debug, Default)]
struct Margin {
    realized: Vec<IndexedValue>,
    exhausted: bool,
}

impl Margin {
    /// Makes `position` available, pulling from `child` if needed. False once
    /// the child has nothing left at that position.
    fn reach(&mut self, child: &mut Source, position: usize, meter: &mut Meter) -> bool {
        while self.realized.len() <= position {
            if self.exhausted {
                return false;
            }
            match child.pop_next(meter) {
                Some(v) => self.realized.push(v),
                None => self.exhausted = true,
            }
        }
        true
    }
}

#[derive(Debug)]
struct PairNode {
    span: Range<usize>,
    left: Source,
    right: Source,
    left_margin: Margin,
    right_margin: Margin,
    fringe: MaxIndexHeap<(u32, u32)>,
    pops: u64,
    max_fringe_excess: i64,
    max_realized_excess: i64,
}

impl PairNode {
    fn new(span: Range<usize>, left: Source, right: Source, meter: &mut Meter) -> Self {
        let mut node = Self {
            span,
            left,
            right,
            left_margin: Margin::default(),
            right_margin: Margin::default(),
            fringe: MaxIndexHeap::with_capacity(4),
            pops: 0,
            max_fringe_excess: i64::MIN,
            max_realized_excess: i64::MIN,
        };
        // children are never empty
        let primed = node.left_margin.reach(&mut node.left, 0, meter)
            && node.right_margin.reach(&mut node.right, 0, meter);
        assert!(primed, "children of a pair node are nonempty");
        node.push(0, 0, meter);
        node.track_excess();
        node
    }

    fn push(&mut self, i: usize, j: usize, meter: &mut Meter) {
        let key = self.left_margin.realized[i].value + self.right_margin.realized[j].value;
        self.fringe
            .push(key, (i as u32, j as u32))
            .expect("sums of validated input are finite");
        meter.pushed();
    }

    fn pop_next(&mut self, meter: &mut Meter) -> Option<IndexedValue> {
        let (value, (i, j)) = self.fringe.pop()?;
        meter.popped();
        self.pops += 1;
        let (i, j) = (i as usize, j as usize);

        if self.left_margin.reach(&mut self.left, i + 1, meter) {
            self.push(i + 1, j, meter);
        }
        if i == 0 && self.right_margin.reach(&mut self.right, j + 1, meter) {
            self.push(0, j + 1, meter);
        }
        self.track_excess();
        debug_assert!(
            self.max_fringe_excess <= 1 && self.max_realized_excess <= 1,
            "pair node over {:?} pulled more than it popped",
            self.span
        );

        let left = &self.left_margin.realized[i].indices;
        let right = &self.right_margin.realized[j].indices;
        let mut indices = Vec::with_capacity(left.len() + right.len());
        indices.extend_from_slice(left);
        indices.extend_from_slice(right);
        Some(IndexedValue { value, indices })
    }

    fn track_excess(&mut self) {
        let pops = self.pops as i64;
        let realized = self
            .left_margin
            .realized
            .len()
            .max(self.right_margin.realized.len()) as i64;
        self.max_fringe_excess = self.max_fringe_excess.max(self.fringe.len() as i64 - pops);
        self.max_realized_excess = self.max_realized_excess.max(realized - pops);
    }
}
