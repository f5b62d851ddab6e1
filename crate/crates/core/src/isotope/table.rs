use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

const BUILTIN_TSV: &str = include_str!("../../data/isotopes.tsv");

/// Abundances of an element must sum to 1 within this tolerance.
pub const ABUNDANCE_SUM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isotope {
    pub mass: f64,
    pub abundance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableErrorKind {
    ColumnCount(usize),
    BadNumber(String),
    NonPositiveMass,
    AbundanceOutOfRange,
    DuplicateIsotope(String),
    AbundanceSum(String),
    Empty,
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("isotope table line {line}: {}", describe(.kind))]
pub struct TableError {
    /// 1-based; 0 when the problem is not tied to one line.
    pub line: usize,
    pub kind: TableErrorKind,
}

fn describe(kind: &TableErrorKind) -> String {
    match kind {
        TableErrorKind::ColumnCount(n) => format!("expected 3 tab-separated fields, found {n}"),
        TableErrorKind::BadNumber(s) => format!("not a number: {s:?}"),
        TableErrorKind::NonPositiveMass => "mass must be positive".into(),
        TableErrorKind::AbundanceOutOfRange => "abundance must lie in (0, 1]".into(),
        TableErrorKind::DuplicateIsotope(e) => format!("duplicate isotope row for {e}"),
        TableErrorKind::AbundanceSum(e) => format!("abundances of {e} do not sum to 1"),
        TableErrorKind::Empty => "no isotopes".into(),
        TableErrorKind::Io(msg) => msg.clone(),
    }
}

/// Isotope masses and abundances per element symbol, isotopes kept in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotopeTable {
    elements: HashMap<String, Vec<Isotope>>,
}

impl IsotopeTable {
    pub fn builtin() -> Self {
        Self::parse_tsv(BUILTIN_TSV, false).expect("built-in isotope table is valid")
    }

    pub fn from_path(path: impl AsRef<Path>, renormalize: bool) -> Result<Self, TableError> {
        let text = fs::read_to_string(path.as_ref()).map_err(|e| TableError {
            line: 0,
            kind: TableErrorKind::Io(format!("{}: {e}", path.as_ref().display())),
        })?;
        Self::parse_tsv(&text, renormalize)
    }

    /// Parses `element<TAB>mass_da<TAB>abundance` rows. Blank lines and lines
    /// starting with `#` are skipped.
    ///
    /// An element whose abundances miss 1 by more than
    /// [`ABUNDANCE_SUM_TOLERANCE`] is rejected, or rescaled to sum to 1 when
    /// `renormalize` is set.
    pub fn parse_tsv(text: &str, renormalize: bool) -> Result<Self, TableError> {
        let mut elements: HashMap<String, Vec<Isotope>> = HashMap::new();
        let mut first_line: HashMap<String, usize> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |kind| TableError { line, kind };
            let row = raw.trim_end_matches('\r');
            if row.trim().is_empty() || row.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = row.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(TableErrorKind::ColumnCount(fields.len())));
            }
            let symbol = fields[0].trim();
            let number = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| err(TableErrorKind::BadNumber(s.to_string())))
            };
            let mass = number(fields[1])?;
            let abundance = number(fields[2])?;
            if mass <= 0.0 {
                return Err(err(TableErrorKind::NonPositiveMass));
            }
            if !(abundance > 0.0 && abundance <= 1.0) {
                return Err(err(TableErrorKind::AbundanceOutOfRange));
            }
            let isotopes = elements.entry(symbol.to_string()).or_default();
            if isotopes.iter().any(|iso| iso.mass == mass) {
                return Err(err(TableErrorKind::DuplicateIsotope(symbol.to_string())));
            }
            isotopes.push(Isotope { mass, abundance });
            first_line.entry(symbol.to_string()).or_insert(line);
        }
        if elements.is_empty() {
            return Err(TableError {
                line: 0,
                kind: TableErrorKind::Empty,
            });
        }
        for (symbol, isotopes) in &mut elements {
            let total: f64 = isotopes.iter().map(|iso| iso.abundance).sum();
            if (total - 1.0).abs() > ABUNDANCE_SUM_TOLERANCE {
                if !renormalize {
                    return Err(TableError {
                        line: first_line[symbol],
                        kind: TableErrorKind::AbundanceSum(symbol.clone()),
                    });
                }
                for iso in isotopes.iter_mut() {
                    iso.abundance /= total;
                }
            }
        }
        Ok(Self { elements })
    }

    pub fn isotopes(&self, symbol: &str) -> Option<&[Isotope]> {
        self.elements.get(symbol).map(Vec::as_slice)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.elements.contains_key(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.elements.keys().map(String::as_str)
    }
}
