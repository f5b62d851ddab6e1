use super::expand::{expand_element, ExpandOptions, IsotopologueVector};
use super::formula::parse_formula;
use super::table::IsotopeTable;
use super::IsotopeError;
use crate::selection::Engine;

#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub mass: f64,
    pub abundance: f64,
    pub log_abundance: f64,
    /// Per element, in formula order: atoms of each isotope.
    pub configuration: Vec<(String, Vec<u32>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    pub expand: ExpandOptions,
    pub engine: Engine,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            expand: ExpandOptions::default(),
            engine: Engine::Tree,
        }
    }
}

/// The `k` most abundant isotope peaks of `formula`, most abundant first.
pub fn top_peaks(
    formula: &str,
    k: usize,
    table: &IsotopeTable,
    options: PeakOptions,
) -> Result<Vec<Peak>, IsotopeError> {
    let counts = parse_formula(formula, table)?;
    let elements: Vec<IsotopologueVector> = counts
        .iter()
        .map(|(symbol, count)| expand_element(symbol, count, table, options.expand))
        .collect::<Result<_, _>>()?;
    let vectors: Vec<Vec<f64>> = elements.iter().map(|e| e.log_abundances.clone()).collect();
    let result = options.engine.top_k(&vectors, k)?;

    Ok(result
        .items
        .into_iter()
        .map(|item| {
            let mut mass = 0.0;
            let configuration = item
                .indices
                .iter()
                .zip(&elements)
                .map(|(&i, element)| {
                    mass += element.masses[i as usize];
                    (
                        element.symbol.clone(),
                        element.composition(i as usize).to_vec(),
                    )
                })
                .collect();
            Peak {
                mass,
                abundance: item.value.exp(),
                log_abundance: item.value,
                configuration,
            }
        })
        .collect())
}
