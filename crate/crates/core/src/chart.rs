//! Coordinate charts: an ordered list of distinct coordinate names.
//!
//! All indices exposed by this crate are 1-based; only internal exponent
//! vectors are positional.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChartError {
    #[error("chart must have at least one coordinate")]
    Empty,
    #[error("coordinate name `{0}` is not a valid identifier")]
    BadName(String),
    #[error("duplicate coordinate name `{0}`")]
    Duplicate(String),
}

/// A coordinate chart of dimension `n` with named coordinates.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Arc<Chart>, ChartError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ChartError::Empty);
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(ChartError::BadName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(ChartError::Duplicate(name.clone()));
            }
        }
        Ok(Arc::new(Chart { names }))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Name of the 1-based coordinate `i`.
    pub fn name(&self, i: usize) -> &str {
        &self.names[i - 1]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// 1-based index of a coordinate name, if declared.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).map(|p| p + 1)
    }

    /// All 1-based coordinate indices.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        1..=self.dim()
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names.join(", "))
    }
}

/// Two values living on structurally different charts were combined.
pub fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_chart() {
        let c = Chart::new(vec!["x", "y"]).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.name(1), "x");
        assert_eq!(c.index_of("y"), Some(2));
        assert_eq!(c.index_of("z"), None);
    }

    #[test]
    fn rejects_bad_names() {
        assert_eq!(
            Chart::new(vec!["2x"]).unwrap_err(),
            ChartError::BadName("2x".into())
        );
        assert_eq!(
            Chart::new(vec!["x", "x"]).unwrap_err(),
            ChartError::Duplicate("x".into())
        );
        assert_eq!(Chart::new(Vec::<String>::new()).unwrap_err(), ChartError::Empty);
    }
}
