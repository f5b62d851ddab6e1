//! Top-k values of the Cartesian sum `X1 + X2 + ... + Xm` of real vectors.
//!
//! Three engines return the same answer:
//!
//! * [`tree`]: a balanced binary tree of lazy pairwise sum heaps, the fast path;
//! * [`tensor`]: best-first fringe expansion over the implicit m-dimensional grid;
//! * [`oracle`]: enumerate, sort, truncate.
//!
//! [`isotope`] applies the tree engine to isotope peak prediction, and
//! [`bench`] holds the instance generator and timing helpers used by the CLI.

pub mod bench;
pub mod cli;
pub mod heap;
pub mod isotope;
pub mod oracle;
pub mod selection;
pub mod tensor;
pub mod tree;

pub use oracle::brute_force_top_k;
pub use selection::{
    Engine, IndexedValue, Instrument, InstrumentationCounters, SelectionError, TopKResult,
};
pub use tensor::tensor_top_k;
pub use tree::tree_top_k;
