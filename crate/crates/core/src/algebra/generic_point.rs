use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{rat, Rational, Symbol};

const MAX_VALUE: i64 = 1_000_000;

/// A random rational specialization of a set of symbols, standing in for
/// "almost every" parameter vector. Values are integers in `[1, 10^6]`,
/// pairwise distinct, and fully determined by the seed and symbol order.
#[derive(Clone, Debug, Serialize)]
pub struct GenericPoint {
    pub seed: u64,
    #[serde(serialize_with = "serialize_assignment")]
    pub assignment: BTreeMap<Symbol, Rational>,
}

fn serialize_assignment<S: serde::Serializer>(a: &BTreeMap<Symbol, Rational>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(a.len()))?;
    for (k, v) in a {
        m.serialize_entry(k.name(), &v.to_string())?;
    }
    m.end()
}

impl GenericPoint {
    pub fn new(symbols: &[Symbol], seed: u64) -> Self {
        Self::with_collisions(symbols, seed, false)
    }

    /// With `allow_collisions`, distinct symbols may share a value.
    pub fn with_collisions(symbols: &[Symbol], seed: u64, allow_collisions: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut used = BTreeSet::new();
        let mut assignment = BTreeMap::new();
        for s in symbols {
            if assignment.contains_key(s) {
                continue;
            }
            let v = loop {
                let v: i64 = rng.gen_range(1..=MAX_VALUE);
                if allow_collisions || used.insert(v) {
                    break v;
                }
            };
            assignment.insert(s.clone(), rat(v));
        }
        GenericPoint { seed, assignment }
    }

    pub fn get(&self, s: &Symbol) -> Option<&Rational> {
        self.assignment.get(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;
    use num_traits::{Signed, Zero};

    #[test]
    fn deterministic_distinct_and_nonzero() {
        let syms: Vec<Symbol> = (0..50).map(|i| sym(&format!("p{i}"))).collect();
        let a = GenericPoint::new(&syms, 7);
        let b = GenericPoint::new(&syms, 7);
        assert_eq!(a.assignment, b.assignment);
        let values: BTreeSet<_> = a.assignment.values().cloned().collect();
        assert_eq!(values.len(), 50);
        assert!(a.assignment.values().all(|v| !v.is_zero() && v.is_positive() && *v <= rat(MAX_VALUE)));
        let c = GenericPoint::new(&syms, 8);
        assert_ne!(a.assignment, c.assignment);
    }
}
