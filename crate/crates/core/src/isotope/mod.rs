//! Most abundant isotope peaks of a molecular formula.
//!
//! Each element's atoms are collapsed into one vector of multinomial
//! log-probabilities, one entry per isotope composition. The peaks of the
//! molecule are then the top sums over those per-element vectors, which the
//! tree engine produces directly.

mod expand;
mod formula;
mod peaks;
mod table;

use thiserror::Error;

use crate::selection::SelectionError;

pub use expand::{expand_element, ExpandOptions, IsotopologueVector, DEFAULT_CONFIGURATION_CAP};
pub use formula::{parse_formula, ElementCounts, FormulaError, FormulaErrorKind};
pub use peaks::{top_peaks, Peak, PeakOptions};
pub use table::{Isotope, IsotopeTable, TableError, TableErrorKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsotopeError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("element {0} is not in the isotope table")]
    UnknownElement(String),
    #[error("{element}: {count} isotope configurations exceed the cap of {cap}")]
    TooManyConfigurations {
        element: String,
        count: u64,
        cap: u64,
    },
    #[error("prune delta must be a non-negative number, got {0}")]
    InvalidPruneDelta(f64),
    #[error(transparent)]
    Selection(#[from] SelectionError),
}
