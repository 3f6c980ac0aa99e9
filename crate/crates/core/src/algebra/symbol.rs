use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgebraError;

/// A named indeterminate. Two symbols are equal iff their names are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    /// Creates a symbol, rejecting names that are empty, do not start with an
    /// alphabetic character, or contain anything other than alphanumerics and `_`.
    pub fn new(name: &str) -> Result<Self, AlgebraError> {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(AlgebraError::InvalidSymbol(name.to_string())),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(AlgebraError::InvalidSymbol(name.to_string()));
        }
        Ok(Symbol(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Symbol::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout tests and fixtures; panics on an invalid name.
pub fn sym(name: &str) -> Symbol {
    Symbol::new(name).unwrap_or_else(|_| panic!("invalid symbol name {name:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_validated() {
        assert!(Symbol::new("k01").is_ok());
        assert!(Symbol::new("k01_").is_ok());
        assert!(Symbol::new("").is_err());
        assert!(Symbol::new("1k").is_err());
        assert!(Symbol::new("_k").is_err());
        assert!(Symbol::new("k-1").is_err());
    }

    #[test]
    fn equality_is_by_name() {
        assert_eq!(sym("c1"), Symbol::new("c1").unwrap());
        assert_ne!(sym("c1"), sym("C1"));
    }
}
