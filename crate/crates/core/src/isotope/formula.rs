use std::fmt;

use thiserror::Error;

use super::table::IsotopeTable;

/// Element symbols with atom counts, in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementCounts(pub Vec<(String, u32)>);

impl ElementCounts {
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(s, c)| (s.as_str(), *c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaErrorKind {
    Empty,
    UnexpectedCharacter(char),
    UnknownElement(String),
    RepeatedElement(String),
    ZeroCount,
    CountTooLarge,
}

impl fmt::Display for FormulaErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("empty formula"),
            Self::UnexpectedCharacter(c) => write!(f, "unexpected character {c:?}"),
            Self::UnknownElement(s) => write!(f, "unknown element {s}"),
            Self::RepeatedElement(s) => write!(f, "element {s} appears more than once"),
            Self::ZeroCount => f.write_str("atom count must be at least 1"),
            Self::CountTooLarge => f.write_str("atom count does not fit in 32 bits"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula error at byte {offset}: {kind}")]
pub struct FormulaError {
    pub offset: usize,
    pub kind: FormulaErrorKind,
}

/// Parses `(Upper Lower? Digits?)+`, e.g. `C3H8`. No parentheses or charges.
pub fn parse_formula(text: &str, table: &IsotopeTable) -> Result<ElementCounts, FormulaError> {
    let bytes = text.as_bytes();
    if bytes.is_empty() {
        return Err(FormulaError {
            offset: 0,
            kind: FormulaErrorKind::Empty,
        });
    }
    let unexpected = |offset: usize| FormulaError {
        offset,
        kind: FormulaErrorKind::UnexpectedCharacter(text[offset..].chars().next().unwrap_or('?')),
    };

    let mut counts: Vec<(String, u32)> = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let start = pos;
        if !bytes[pos].is_ascii_uppercase() {
            return Err(unexpected(pos));
        }
        pos += 1;
        if pos < bytes.len() && bytes[pos].is_ascii_lowercase() {
            pos += 1;
        }
        let symbol = &text[start..pos];
        if !table.contains(symbol) {
            return Err(FormulaError {
                offset: start,
                kind: FormulaErrorKind::UnknownElement(symbol.to_string()),
            });
        }
        if counts.iter().any(|(s, _)| s == symbol) {
            return Err(FormulaError {
                offset: start,
                kind: FormulaErrorKind::RepeatedElement(symbol.to_string()),
            });
        }

        let digits_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let count = if digits_start == pos {
            1
        } else {
            let count: u32 = text[digits_start..pos].parse().map_err(|_| FormulaError {
                offset: digits_start,
                kind: FormulaErrorKind::CountTooLarge,
            })?;
            if count == 0 {
                return Err(FormulaError {
                    offset: digits_start,
                    kind: FormulaErrorKind::ZeroCount,
                });
            }
            count
        };
        counts.push((symbol.to_string(), count));
    }
    Ok(ElementCounts(counts))
}
